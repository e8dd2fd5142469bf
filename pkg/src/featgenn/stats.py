"""Correlation and information-theoretic statistics used for pooling and selection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset


@dataclass(frozen=True)
class CorrelationMatrix:
    """Pairwise Pearson coefficients; constant columns get all-zero rows/cols."""

    r: np.ndarray


@dataclass(frozen=True)
class CorrelationScores:
    """Per-feature mean of its correlation-matrix row (self term included)."""

    cs: np.ndarray


def pearson(x, y) -> float:
    """Pearson correlation via the n-weighted sum form.

    r = (n*sum(xy) - sum(x)*sum(y)) / sqrt((n*sum(x^2) - sum(x)^2) * (n*sum(y^2) - sum(y)^2))

    Returns 0.0 when either variance factor is zero.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D vectors of equal length")
    n = x.shape[0]
    if n < 2:
        raise ValueError("need at least 2 samples")
    sx = x.sum()
    sy = y.sum()
    vx = n * (x * x).sum() - sx * sx
    vy = n * (y * y).sum() - sy * sy
    if vx <= 0.0 or vy <= 0.0:
        return 0.0
    r = (n * (x * y).sum() - sx * sy) / np.sqrt(vx * vy)
    return float(min(1.0, max(-1.0, r)))


def correlation_matrix(x: np.ndarray, rows) -> CorrelationMatrix:
    """Pairwise Pearson matrix over the selected rows only.

    Constant columns (over the selected rows) get zero everywhere including
    the diagonal; other diagonal entries are exactly 1. Entries are clamped
    to [-1, 1] and the matrix is symmetrized to absorb rounding.
    """
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size < 2:
        raise ValueError("need at least 2 rows")
    xs = np.asarray(x, dtype=np.float64)[rows]
    n, d = xs.shape
    constant = (xs == xs[0]).all(axis=0)
    s1 = xs.sum(axis=0)
    var = n * (xs * xs).sum(axis=0) - s1 * s1
    constant |= var <= 0.0
    num = n * (xs.T @ xs) - np.outer(s1, s1)
    denom = np.sqrt(np.outer(np.where(constant, 1.0, var),
                             np.where(constant, 1.0, var)))
    r = num / denom
    r = (r + r.T) / 2.0
    np.clip(r, -1.0, 1.0, out=r)
    r[constant, :] = 0.0
    r[:, constant] = 0.0
    di = np.arange(d)
    r[di, di] = np.where(constant, 0.0, 1.0)
    return CorrelationMatrix(r=r)


def correlation_scores(m: CorrelationMatrix) -> CorrelationScores:
    """Mean correlation of each feature against all features (self included)."""
    return CorrelationScores(cs=m.r.mean(axis=1))


def _equal_width_bins(x: np.ndarray, bins: int) -> np.ndarray:
    lo = x.min()
    hi = x.max()
    if hi <= lo:
        return np.zeros(x.shape[0], dtype=np.int64)
    idx = np.floor((x - lo) / (hi - lo) * bins).astype(np.int64)
    return np.clip(idx, 0, bins - 1)


def _discrete_mi(a: np.ndarray, b: np.ndarray) -> float:
    n = a.shape[0]
    ka = int(a.max()) + 1
    kb = int(b.max()) + 1
    joint = np.bincount(a * kb + b, minlength=ka * kb).reshape(ka, kb).astype(np.float64)
    ca = joint.sum(axis=1)
    cb = joint.sum(axis=0)
    mask = joint > 0
    j = joint[mask]
    outer = np.outer(ca, cb)[mask]
    mi = float((j / n * np.log(n * j / outer)).sum())
    return max(mi, 0.0)


def mutual_information(x, y, bins: int = 10) -> float:
    """MI in nats between an equal-width-binned feature and integer labels."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D vectors of equal length")
    if bins < 2:
        raise ValueError("bins must be at least 2")
    return _discrete_mi(_equal_width_bins(x, bins), y)


def mrmr_select(d: Dataset, m: int, bins: int = 10) -> list[int]:
    """Greedy max-relevance min-redundancy feature ordering (MID criterion).

    The first pick maximizes MI(feature; target); each later pick maximizes
    MI(feature; target) minus the mean MI against the already-selected set.
    Ties break to the lowest feature index.
    """
    if not 1 <= m <= d.n_cols:
        raise ValueError(f"m must be in [1, {d.n_cols}]")
    disc = np.stack([_equal_width_bins(d.x[:, j], bins) for j in range(d.n_cols)])
    relevance = np.array([_discrete_mi(disc[j], d.y) for j in range(d.n_cols)])

    selected = [int(np.argmax(relevance))]
    pair_mi: dict[tuple[int, int], float] = {}

    def mi_pair(a: int, b: int) -> float:
        key = (a, b) if a < b else (b, a)
        if key not in pair_mi:
            pair_mi[key] = _discrete_mi(disc[key[0]], disc[key[1]])
        return pair_mi[key]

    while len(selected) < m:
        best_j = -1
        best_score = -np.inf
        for j in range(d.n_cols):
            if j in selected:
                continue
            redundancy = sum(mi_pair(j, s) for s in selected) / len(selected)
            score = relevance[j] - redundancy
            if score > best_score:
                best_score = score
                best_j = j
        selected.append(best_j)
    return selected
