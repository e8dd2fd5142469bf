import numpy as np
import pytest

from featgenn.dataset import ColumnMeta, Dataset, NUMERIC


def make_dataset(x, y, name="test", class_labels=None):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if class_labels is None:
        class_labels = tuple(str(c) for c in sorted(np.unique(y)))
    cols = tuple(ColumnMeta(f"f{j}", NUMERIC) for j in range(x.shape[1]))
    return Dataset(x=x, y=y, columns=cols, name=name, class_labels=class_labels)


def synthetic_classification(n_rows, n_cols, n_informative, seed, noise=1.0):
    """Binary classification data: informative columns are noisy copies of a
    latent score, the rest are pure noise."""
    rng = np.random.default_rng(seed)
    latent = rng.normal(size=n_rows)
    y = (latent > 0).astype(np.int64)
    x = rng.normal(size=(n_rows, n_cols))
    for j in range(n_informative):
        x[:, j] = latent + noise * rng.normal(size=n_rows)
    return make_dataset(x, y, name=f"synth{seed}")


@pytest.fixture
def toy_dataset():
    return synthetic_classification(80, 6, 3, seed=11, noise=0.5)
