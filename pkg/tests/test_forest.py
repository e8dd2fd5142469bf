import numpy as np
import pytest

from featgenn.dataset import make_folds
from featgenn.forest import (EvalReport, Forest, ForestConfig, evaluate_cv,
                             f1_score, f1_weighted, fit_forest, predict)

from conftest import make_dataset


def xor_dataset(n=100, noise=0.1, seed=0):
    rng = np.random.default_rng(seed)
    centers = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=float)
    which = rng.integers(0, 4, size=n)
    x = centers[which] + noise * rng.normal(size=(n, 2))
    y = (centers[which, 0].astype(int) ^ centers[which, 1].astype(int)).astype(np.int64)
    return x, y


def depth2_brute_force_accuracy(x, y):
    """Exhaustive search over depth-2 axis-aligned trees (root + two stumps).

    Verifies independently that this tree class can represent the labels.
    """
    best = 0.0
    for f0 in range(x.shape[1]):
        for t0 in np.unique(x[:, f0]):
            left = x[:, f0] <= t0
            acc = 0
            for side in (left, ~left):
                if not side.any():
                    continue
                side_best = max(np.mean(y[side] == 0), np.mean(y[side] == 1)) * side.sum()
                for f1 in range(x.shape[1]):
                    for t1 in np.unique(x[side, f1]):
                        lo = side & (x[:, f1] <= t1)
                        hi = side & (x[:, f1] > t1)
                        hits = 0
                        for part in (lo, hi):
                            if part.any():
                                hits += max((y[part] == 0).sum(), (y[part] == 1).sum())
                        side_best = max(side_best, hits)
                acc += side_best
            best = max(best, acc / len(y))
    return best


class TestFitPredict:
    def test_separable_threshold(self):
        rng = np.random.default_rng(1)
        x = np.concatenate([rng.uniform(-2, -0.1, 10), rng.uniform(0.1, 2, 10)])
        y = (x > 0).astype(np.int64)
        x = x.reshape(-1, 1)
        forest = fit_forest(x, y, ForestConfig(n_trees=10, seed=0))
        assert (predict(forest, x) == y).mean() == 1.0

    def test_deterministic_per_seed(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=(60, 5))
        y = (x[:, 0] + x[:, 1] > 0).astype(np.int64)
        probe = rng.normal(size=(30, 5))
        cfg = ForestConfig(n_trees=20, seed=77)
        p1 = predict(fit_forest(x, y, cfg), probe)
        p2 = predict(fit_forest(x, y, cfg), probe)
        assert np.array_equal(p1, p2)

    def test_xor_training_accuracy(self):
        x, y = xor_dataset(n=100, noise=0.1, seed=3)
        assert depth2_brute_force_accuracy(x, y) >= 0.95
        forest = fit_forest(x, y, ForestConfig(n_trees=100, seed=5))
        assert (predict(forest, x) == y).mean() >= 0.95

    def test_single_class_rejected(self):
        with pytest.raises(ValueError, match="single class"):
            fit_forest(np.zeros((10, 2)), np.zeros(10, dtype=np.int64),
                       ForestConfig(n_trees=2, seed=0))

    def test_column_mismatch_rejected(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=(20, 3))
        y = (x[:, 0] > 0).astype(np.int64)
        forest = fit_forest(x, y, ForestConfig(n_trees=2, seed=0))
        with pytest.raises(ValueError, match="columns"):
            predict(forest, rng.normal(size=(5, 4)))


def leaf_only_forest(leaf_labels, n_classes=2, n_features=1):
    """Hand-built forest where every tree is a single leaf."""
    t = len(leaf_labels)
    return Forest(features=np.full((t, 1), -1, dtype=np.int64),
                  thresholds=np.zeros((t, 1)),
                  lefts=np.zeros((t, 1), dtype=np.int64),
                  rights=np.zeros((t, 1), dtype=np.int64),
                  labels=np.array(leaf_labels, dtype=np.int64).reshape(t, 1),
                  n_classes=n_classes, n_features=n_features)


class TestVoting:
    def test_single_tree_forest(self):
        f = leaf_only_forest([1])
        assert predict(f, np.zeros((4, 1))).tolist() == [1, 1, 1, 1]

    def test_unanimous(self):
        f = leaf_only_forest([1, 1, 1])
        assert predict(f, np.zeros((2, 1))).tolist() == [1, 1]

    def test_even_split_goes_to_lower_label(self):
        f = leaf_only_forest([0, 1, 1, 0])
        assert predict(f, np.zeros((3, 1))).tolist() == [0, 0, 0]

    def test_vote_recount_matches_per_tree_traversal(self):
        rng = np.random.default_rng(6)
        for trial in range(5):
            x = rng.normal(size=(40, 4))
            y = ((x[:, 0] > 0) | (x[:, 1] > 0.5)).astype(np.int64)
            forest = fit_forest(x, y, ForestConfig(n_trees=5, seed=trial))
            probe = rng.normal(size=(25, 4))
            votes = np.zeros((25, forest.n_classes), dtype=int)
            for t in range(5):
                for i in range(25):
                    node = 0
                    while forest.features[t, node] >= 0:
                        if probe[i, forest.features[t, node]] <= forest.thresholds[t, node]:
                            node = forest.lefts[t, node]
                        else:
                            node = forest.rights[t, node]
                    votes[i, forest.labels[t, node]] += 1
            assert np.array_equal(predict(forest, probe), votes.argmax(axis=1))


class TestF1:
    def test_perfect_predictions(self):
        assert f1_score([0, 1, 0, 1], [0, 1, 0, 1], positive=1) == 1.0

    def test_known_counts(self):
        # TP=2, FP=1, FN=1 -> P = R = 2/3 -> f1 = 2/3
        y_true = [1, 1, 1, 0, 0]
        y_pred = [1, 1, 0, 1, 0]
        assert f1_score(y_true, y_pred, positive=1) == pytest.approx(2 / 3, abs=1e-15)

    def test_degenerate_zero(self):
        assert f1_score([0, 0], [0, 0], positive=1) == 0.0

    def test_permutation_invariance(self):
        rng = np.random.default_rng(7)
        y_true = rng.integers(0, 2, 30)
        y_pred = rng.integers(0, 2, 30)
        perm = rng.permutation(30)
        assert f1_score(y_true, y_pred, 1) == f1_score(y_true[perm], y_pred[perm], 1)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            f1_score([0, 1], [0], positive=1)

    def test_weighted_equals_binary_mix(self):
        y_true = np.array([0, 0, 0, 1, 1])
        y_pred = np.array([0, 1, 0, 1, 0])
        expected = 0.6 * f1_score(y_true, y_pred, 0) + 0.4 * f1_score(y_true, y_pred, 1)
        assert f1_weighted(y_true, y_pred) == pytest.approx(expected, abs=1e-15)


class TestEvaluateCv:
    def make_separable(self, n=60, seed=8):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(n, 3))
        y = (x[:, 0] > 0).astype(np.int64)
        x[:, 0] += np.where(y == 1, 1.0, -1.0)  # widen the margin
        return make_dataset(x, y)

    def test_report_consistency(self):
        d = self.make_separable()
        folds = make_folds(d, 5, seed=0)
        rep = evaluate_cv(d, folds, ForestConfig(n_trees=20, seed=1), positive=1)
        assert isinstance(rep, EvalReport)
        assert rep.mean_f1 == pytest.approx(rep.fold_f1.mean(), abs=1e-12)
        assert rep.std_f1 == pytest.approx(rep.fold_f1.std(), abs=1e-12)
        assert np.all((rep.fold_f1 >= 0) & (rep.fold_f1 <= 1))
        assert rep.n_features_used == 3

    def test_leakage_sanity(self):
        rng = np.random.default_rng(9)
        y = rng.integers(0, 2, 50).astype(np.int64)
        x = np.column_stack([y.astype(float), rng.normal(size=50)])
        d = make_dataset(x, y)
        rep = evaluate_cv(d, make_folds(d, 5, seed=1),
                          ForestConfig(n_trees=20, seed=2), positive=1)
        assert rep.mean_f1 == 1.0

    def test_duplicate_feature_robustness(self):
        d = self.make_separable()
        dup = make_dataset(np.column_stack([d.x, d.x[:, 0]]), d.y)
        folds = make_folds(d, 5, seed=2)
        cfg = ForestConfig(n_trees=50, seed=3)
        base = evaluate_cv(d, folds, cfg, positive=1).mean_f1
        extended = evaluate_cv(dup, folds, cfg, positive=1).mean_f1
        assert abs(extended - base) < 0.02

    def test_positive_label_by_raw_name(self):
        d = self.make_separable()
        folds = make_folds(d, 5, seed=3)
        cfg = ForestConfig(n_trees=10, seed=4)
        by_name = evaluate_cv(d, folds, cfg, positive="1")
        by_index = evaluate_cv(d, folds, cfg, positive=1)
        assert by_name.mean_f1 == by_index.mean_f1

    def test_single_class_training_fold(self):
        x = np.arange(12, dtype=float).reshape(-1, 1)
        y = np.array([0] * 10 + [1] * 2, dtype=np.int64)
        d = make_dataset(x, y)
        folds = make_folds(d, 2, seed=0)
        # force a broken plan: put every positive row in fold 0
        bad = folds.assignments.copy()
        bad[y == 1] = 0
        from featgenn.dataset import FoldPlan
        with pytest.raises(ValueError, match="single class"):
            evaluate_cv(d, FoldPlan(k=2, assignments=bad),
                        ForestConfig(n_trees=2, seed=0), positive=1)
