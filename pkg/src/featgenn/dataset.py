"""Tabular dataset handling: CSV loading, encoding, scaling, folds, subsampling."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

NUMERIC = "numeric"
CATEGORICAL = "categorical"


class DataError(ValueError):
    """Raised for malformed input data (missing files aside)."""


@dataclass(frozen=True)
class ColumnMeta:
    """Metadata for one feature column.

    category_map is the sorted tuple of distinct raw values for categorical
    columns (the ordinal code of a value is its position) and None otherwise.
    """

    name: str
    kind: str
    category_map: tuple[str, ...] | None = None


@dataclass(frozen=True)
class Dataset:
    """A row-major numeric feature matrix with an integer-coded target.

    Categorical cells are stored as their ordinal code (position in the
    column's category_map), so x is always a finite float matrix.
    class_labels holds the sorted distinct raw target values; y[i] is an
    index into it.
    """

    x: np.ndarray
    y: np.ndarray
    columns: tuple[ColumnMeta, ...]
    name: str
    class_labels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.x.ndim != 2:
            raise DataError("x must be 2-D")
        if self.x.shape[0] != self.y.shape[0]:
            raise DataError("x row count must equal y length")
        if self.x.shape[1] != len(self.columns):
            raise DataError("x column count must equal columns length")
        if self.x.size and not np.isfinite(self.x).all():
            raise DataError("x contains non-finite entries")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DataError("duplicate column names")

    @property
    def n_rows(self) -> int:
        return self.x.shape[0]

    @property
    def n_cols(self) -> int:
        return self.x.shape[1]

    def label_index(self, label) -> int:
        """Map a raw target value (or an already-encoded index) to its code."""
        if isinstance(label, (int, np.integer)):
            return int(label)
        try:
            return self.class_labels.index(str(label))
        except ValueError:
            raise DataError(
                f"label {label!r} not among target classes {self.class_labels}"
            ) from None


@dataclass(frozen=True)
class FoldPlan:
    """Stratified cross-validation assignment: fold index per row."""

    k: int
    assignments: np.ndarray


@dataclass(frozen=True)
class ScalerStats:
    """Per-column mean/std used by prepare; constant marks zero-variance columns."""

    mean: np.ndarray
    std: np.ndarray
    constant: np.ndarray


def _is_float(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def load_csv(path, target: str, name: str | None = None) -> Dataset:
    """Load a headered, comma-separated CSV into a Dataset.

    Columns whose every cell parses as a float become numeric; all others are
    categorical and ordinal-coded by sorted distinct value. The target column
    is removed from the matrix and label-encoded (sorted distinct values).
    Empty cells and ragged rows are errors; no imputation is attempted.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = list(reader)

    header = [h.strip() for h in header]
    if target not in header:
        raise DataError(f"{path}: target column {target!r} not in header")
    if not rows:
        raise DataError(f"{path}: no data rows")
    width = len(header)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataError(f"{path}: row {i + 2} has {len(row)} cells, expected {width}")
        for j, cell in enumerate(row):
            if cell.strip() == "":
                raise DataError(f"{path}: missing value at row {i + 2}, column {header[j]!r}")

    t_idx = header.index(target)
    raw_y = [row[t_idx].strip() for row in rows]
    class_labels = tuple(sorted(set(raw_y)))
    code = {v: i for i, v in enumerate(class_labels)}
    y = np.array([code[v] for v in raw_y], dtype=np.int64)

    feat_idx = [j for j in range(width) if j != t_idx]
    n = len(rows)
    x = np.empty((n, len(feat_idx)), dtype=np.float64)
    columns = []
    for out_j, j in enumerate(feat_idx):
        cells = [row[j].strip() for row in rows]
        if all(_is_float(c) for c in cells):
            x[:, out_j] = [float(c) for c in cells]
            columns.append(ColumnMeta(header[j], NUMERIC))
        else:
            cmap = tuple(sorted(set(cells)))
            cat_code = {v: i for i, v in enumerate(cmap)}
            x[:, out_j] = [cat_code[c] for c in cells]
            columns.append(ColumnMeta(header[j], CATEGORICAL, cmap))

    return Dataset(x=x, y=y, columns=tuple(columns), name=name or str(path),
                   class_labels=class_labels)


def prepare(d: Dataset) -> tuple[Dataset, ScalerStats]:
    """Z-score every column with the population std; constants map to zeros.

    Categorical columns already hold their ordinal codes, so scaling applies
    uniformly. Idempotent up to float rounding on non-constant columns.
    """
    mean = d.x.mean(axis=0)
    std = d.x.std(axis=0)
    constant = std == 0.0
    safe = np.where(constant, 1.0, std)
    x = (d.x - mean) / safe
    x[:, constant] = 0.0
    scaled = Dataset(x=x, y=d.y, columns=d.columns, name=d.name,
                     class_labels=d.class_labels)
    return scaled, ScalerStats(mean=mean, std=std, constant=constant)


def make_folds(d: Dataset, k: int, seed: int) -> FoldPlan:
    """Stratified k-fold assignment, deterministic for a fixed seed.

    Rows of each class are shuffled and dealt out in equal shares; the
    remainder goes to the currently lightest folds, so fold sizes differ by
    at most one and per-fold class counts stay within one of the ideal.
    """
    if k < 2:
        raise DataError("k must be at least 2")
    rng = np.random.default_rng(seed)
    assignments = np.full(d.n_rows, -1, dtype=np.int64)
    load = np.zeros(k, dtype=np.int64)
    for cls in np.unique(d.y):
        idx = np.flatnonzero(d.y == cls)
        if len(idx) < k:
            raise DataError(f"class {cls} has {len(idx)} members, fewer than k={k}")
        idx = rng.permutation(idx)
        base, rem = divmod(len(idx), k)
        counts = np.full(k, base, dtype=np.int64)
        # lightest folds absorb the remainder; ties go to the lowest index
        for f in np.lexsort((np.arange(k), load))[:rem]:
            counts[f] += 1
        pos = 0
        for f in range(k):
            assignments[idx[pos:pos + counts[f]]] = f
            pos += counts[f]
        load += counts
    return FoldPlan(k=k, assignments=assignments)


def subsample_rows(d: Dataset, fraction: float, seed: int) -> np.ndarray:
    """ceil(fraction * n_rows) distinct row indices, uniform without replacement."""
    if not 0.0 < fraction <= 1.0:
        raise DataError("fraction must lie in (0, 1]")
    m = math.ceil(fraction * d.n_rows)
    rng = np.random.default_rng(seed)
    picked = rng.permutation(d.n_rows)[:m]
    picked.sort()
    return picked


def append_features(d: Dataset, cols: np.ndarray, names: list[str]) -> Dataset:
    """Concatenate generated columns onto a dataset, leaving the original intact."""
    cols = np.asarray(cols, dtype=np.float64)
    if cols.ndim == 1:
        cols = cols.reshape(-1, 1)
    if cols.shape[1] != len(names):
        raise DataError("one name required per appended column")
    if cols.shape[1] == 0:
        return d
    if cols.shape[0] != d.n_rows:
        raise DataError(f"row mismatch: {cols.shape[0]} vs {d.n_rows}")
    existing = {c.name for c in d.columns}
    for nm in names:
        if nm in existing:
            raise DataError(f"duplicate column name {nm!r}")
        existing.add(nm)
    if cols.size and not np.isfinite(cols).all():
        raise DataError("appended columns contain non-finite entries")
    x = np.hstack([d.x, cols])
    columns = d.columns + tuple(ColumnMeta(nm, NUMERIC) for nm in names)
    return Dataset(x=x, y=d.y, columns=columns, name=d.name,
                   class_labels=d.class_labels)


def select_features(d: Dataset, indices) -> Dataset:
    """Restrict a dataset to the given feature columns, in the given order."""
    indices = np.asarray(indices, dtype=np.int64)
    return Dataset(x=d.x[:, indices], y=d.y,
                   columns=tuple(d.columns[i] for i in indices),
                   name=d.name, class_labels=d.class_labels)
