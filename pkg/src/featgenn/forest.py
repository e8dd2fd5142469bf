"""Random-forest scorer: CART trees on bootstrap samples, f1 under k-fold CV.

Tree construction is written from scratch and compiled with numba. Splits
minimize weighted Gini impurity over midpoint thresholds between consecutive
distinct sorted values; ties break to the lowest feature index, then the
lowest threshold. Per-tree randomness comes from an explicit splitmix64
stream, so fitting is bit-deterministic for a fixed seed no matter how the
trees are scheduled across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit, prange

from .dataset import Dataset, FoldPlan


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int = 0  # 0 = unlimited
    min_samples_leaf: int = 1
    features_per_split: str | int = "sqrt"
    seed: int = 9001

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be at least 1")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be at least 1")
        if isinstance(self.features_per_split, str) and \
                self.features_per_split not in ("sqrt", "all"):
            raise ValueError("features_per_split must be 'sqrt', 'all', or a count")


@dataclass(frozen=True)
class Forest:
    """Fitted ensemble stored as flat node arrays, one row per tree."""

    features: np.ndarray   # [trees, nodes] split feature, -1 for leaves
    thresholds: np.ndarray
    lefts: np.ndarray
    rights: np.ndarray
    labels: np.ndarray     # leaf majority label
    n_classes: int
    n_features: int


@dataclass(frozen=True)
class EvalReport:
    """Per-fold and aggregate f1 of a cross-validated forest."""

    fold_f1: np.ndarray
    mean_f1: float
    std_f1: float
    n_features_used: int
    fold_f1_weighted: np.ndarray
    mean_f1_weighted: float
    std_f1_weighted: float


@njit(cache=True, nogil=True)
def _build_tree(xs, ys, n_classes, max_depth, min_leaf, n_feat, seed,
                feat_out, thr_out, left_out, right_out, label_out):
    n, d = xs.shape
    idx = np.arange(n)
    tmp = np.empty(n, np.int64)
    counts = np.zeros(n_classes, np.int64)
    left_cnt = np.zeros(n_classes, np.int64)
    featbuf = np.empty(d, np.int64)
    vals = np.empty(n, np.float64)
    stack = np.empty((2 * n + 1, 4), np.int64)
    stack[0, 0] = 0
    stack[0, 1] = n
    stack[0, 2] = 0
    stack[0, 3] = 0
    top = 1
    n_nodes = 1
    state = np.uint64(seed)

    while top > 0:
        top -= 1
        start, end, depth, node = stack[top, 0], stack[top, 1], stack[top, 2], stack[top, 3]
        m = end - start

        for c in range(n_classes):
            counts[c] = 0
        for i in range(start, end):
            counts[ys[idx[i]]] += 1
        best_c = 0
        for c in range(1, n_classes):
            if counts[c] > counts[best_c]:
                best_c = c

        if counts[best_c] == m or m < 2 * min_leaf or \
                (max_depth > 0 and depth >= max_depth):
            feat_out[node] = -1
            label_out[node] = best_c
            continue

        # sample the feature subset without replacement, then scan ascending
        for j in range(d):
            featbuf[j] = j
        nf = n_feat if n_feat < d else d
        for j in range(nf):
            state = (state + np.uint64(0x9E3779B97F4A7C15))
            z = state
            z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
            z = z ^ (z >> np.uint64(31))
            r = j + int(z % np.uint64(d - j))
            featbuf[j], featbuf[r] = featbuf[r], featbuf[j]
        for a in range(1, nf):
            v = featbuf[a]
            b = a - 1
            while b >= 0 and featbuf[b] > v:
                featbuf[b + 1] = featbuf[b]
                b -= 1
            featbuf[b + 1] = v

        ss_total = 0.0
        for c in range(n_classes):
            ss_total += float(counts[c]) * float(counts[c])

        best_s = -1.0
        best_f = -1
        best_thr = 0.0
        for fi in range(nf):
            f = featbuf[fi]
            for i in range(m):
                vals[i] = xs[idx[start + i], f]
            order = np.argsort(vals[:m])
            for c in range(n_classes):
                left_cnt[c] = 0
            ssl = 0.0
            ssr = ss_total
            for i in range(1, m):
                c = ys[idx[start + order[i - 1]]]
                ssl += 2.0 * left_cnt[c] + 1.0
                ssr -= 2.0 * (counts[c] - left_cnt[c]) - 1.0
                left_cnt[c] += 1
                vprev = vals[order[i - 1]]
                vcur = vals[order[i]]
                if vcur > vprev and i >= min_leaf and m - i >= min_leaf:
                    s = ssl / i + ssr / (m - i)
                    if s > best_s:
                        best_s = s
                        best_f = f
                        best_thr = 0.5 * (vprev + vcur)

        if best_f < 0:
            feat_out[node] = -1
            label_out[node] = best_c
            continue

        nl = 0
        for i in range(start, end):
            if xs[idx[i], best_f] <= best_thr:
                tmp[start + nl] = idx[i]
                nl += 1
        nr = 0
        for i in range(start, end):
            if xs[idx[i], best_f] > best_thr:
                tmp[start + nl + nr] = idx[i]
                nr += 1
        for i in range(start, end):
            idx[i] = tmp[i]

        feat_out[node] = best_f
        thr_out[node] = best_thr
        left_out[node] = n_nodes
        right_out[node] = n_nodes + 1
        stack[top, 0] = start
        stack[top, 1] = start + nl
        stack[top, 2] = depth + 1
        stack[top, 3] = n_nodes
        stack[top + 1, 0] = start + nl
        stack[top + 1, 1] = end
        stack[top + 1, 2] = depth + 1
        stack[top + 1, 3] = n_nodes + 1
        top += 2
        n_nodes += 2


@njit(cache=True, parallel=True)
def _fit_trees(x, y, n_classes, boot, seeds, max_depth, min_leaf, n_feat,
               feats, thrs, lefts, rights, labels):
    for t in prange(boot.shape[0]):
        xs = x[boot[t]]
        ys = y[boot[t]]
        _build_tree(xs, ys, n_classes, max_depth, min_leaf, n_feat, seeds[t],
                    feats[t], thrs[t], lefts[t], rights[t], labels[t])


@njit(cache=True, parallel=True)
def _predict_votes(x, feats, thrs, lefts, rights, labels, votes):
    n = x.shape[0]
    n_trees = feats.shape[0]
    for i in prange(n):
        for t in range(n_trees):
            node = 0
            while feats[t, node] >= 0:
                if x[i, feats[t, node]] <= thrs[t, node]:
                    node = lefts[t, node]
                else:
                    node = rights[t, node]
            votes[i, labels[t, node]] += 1


def _resolve_n_feat(mode, d: int) -> int:
    if mode == "sqrt":
        return max(1, math.isqrt(d))
    if mode == "all":
        return d
    return min(d, max(1, int(mode)))


def fit_forest(x: np.ndarray, y: np.ndarray, cfg: ForestConfig) -> Forest:
    """Fit n_trees CART trees on bootstrap samples with Gini splits."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.int64)
    n, d = x.shape
    if n < 2:
        raise ValueError("need at least 2 rows")
    n_classes = int(y.max()) + 1
    if len(np.unique(y)) < 2:
        raise ValueError("training data contains a single class")

    rng = np.random.default_rng(cfg.seed)
    boot = rng.integers(0, n, size=(cfg.n_trees, n), dtype=np.int64)
    seeds = rng.integers(1, np.iinfo(np.int64).max, size=cfg.n_trees,
                         dtype=np.int64).astype(np.uint64)

    max_nodes = 2 * n + 1
    feats = np.full((cfg.n_trees, max_nodes), -1, dtype=np.int64)
    thrs = np.zeros((cfg.n_trees, max_nodes), dtype=np.float64)
    lefts = np.zeros((cfg.n_trees, max_nodes), dtype=np.int64)
    rights = np.zeros((cfg.n_trees, max_nodes), dtype=np.int64)
    labels = np.zeros((cfg.n_trees, max_nodes), dtype=np.int64)

    _fit_trees(x, y, n_classes, boot, seeds, cfg.max_depth,
               cfg.min_samples_leaf, _resolve_n_feat(cfg.features_per_split, d),
               feats, thrs, lefts, rights, labels)
    return Forest(features=feats, thresholds=thrs, lefts=lefts, rights=rights,
                  labels=labels, n_classes=n_classes, n_features=d)


def predict(forest: Forest, x: np.ndarray) -> np.ndarray:
    """Majority vote over trees; vote ties resolve to the lower label."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape[1] != forest.n_features:
        raise ValueError(f"expected {forest.n_features} columns, got {x.shape[1]}")
    votes = np.zeros((x.shape[0], forest.n_classes), dtype=np.int64)
    _predict_votes(x, forest.features, forest.thresholds, forest.lefts,
                   forest.rights, forest.labels, votes)
    return votes.argmax(axis=1)


def f1_score(y_true, y_pred, positive: int) -> float:
    """f1 of the positive class: 2PR/(P+R), zero when P+R is zero."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise ValueError("length mismatch")
    tp = int(((y_pred == positive) & (y_true == positive)).sum())
    fp = int(((y_pred == positive) & (y_true != positive)).sum())
    fn = int(((y_pred != positive) & (y_true == positive)).sum())
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def f1_weighted(y_true, y_pred) -> float:
    """Support-weighted mean of per-class f1 (used as a metric cross-check)."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    classes, support = np.unique(y_true, return_counts=True)
    total = support.sum()
    return float(sum(s / total * f1_score(y_true, y_pred, int(c))
                     for c, s in zip(classes, support)))


def evaluate_cv(d: Dataset, folds: FoldPlan, cfg: ForestConfig,
                positive) -> EvalReport:
    """Train on k-1 folds, score f1 on the held-out fold, for each fold."""
    pos = d.label_index(positive)
    if folds.assignments.shape[0] != d.n_rows:
        raise ValueError("fold plan does not cover the dataset")
    fold_seeds = np.random.default_rng(cfg.seed).integers(
        0, np.iinfo(np.int64).max, size=folds.k)
    fold_f1 = np.zeros(folds.k)
    fold_f1w = np.zeros(folds.k)
    for f in range(folds.k):
        test = folds.assignments == f
        train = ~test
        assert not np.any(train & test), "train/test overlap"
        y_train = d.y[train]
        if len(np.unique(y_train)) < 2:
            raise ValueError(f"fold {f}: training portion has a single class")
        forest = fit_forest(d.x[train], y_train,
                            ForestConfig(cfg.n_trees, cfg.max_depth,
                                         cfg.min_samples_leaf,
                                         cfg.features_per_split,
                                         int(fold_seeds[f])))
        pred = predict(forest, d.x[test])
        fold_f1[f] = f1_score(d.y[test], pred, pos)
        fold_f1w[f] = f1_weighted(d.y[test], pred)
    return EvalReport(fold_f1=fold_f1,
                      mean_f1=float(fold_f1.mean()),
                      std_f1=float(fold_f1.std()),
                      n_features_used=d.n_cols,
                      fold_f1_weighted=fold_f1w,
                      mean_f1_weighted=float(fold_f1w.mean()),
                      std_f1_weighted=float(fold_f1w.std()))
