import numpy as np
import pytest

from featgenn.dataset import make_folds
from featgenn.evolve import (CachingEvaluator, Candidate, EvolutionConfig,
                             Population, accept, crossover, evolve_epoch,
                             init_population, mutate, run_evolution,
                             tournament_select)
from featgenn.forest import ForestConfig, evaluate_cv
from featgenn.netgen import GeneratorConfig, init_genome
from featgenn.stats import pearson

from conftest import synthetic_classification


def correlation_evaluator():
    """Cheap deterministic scorer: |pearson| of the last column vs the target."""
    def score(d):
        return abs(pearson(d.x[:, -1], d.y.astype(float)))
    return CachingEvaluator(score)


def forest_evaluator(folds_seed=0, trees=10, seed=1):
    def score(d):
        folds = make_folds(d, 3, seed=folds_seed)
        return evaluate_cv(d, folds, ForestConfig(n_trees=trees, seed=seed),
                           positive=1).mean_f1
    return CachingEvaluator(score)


def gcfg(d, **kw):
    defaults = dict(n_inputs=d, conv_layers=1, channels=2, kernel=3,
                    pool_group=2, mlp_hidden=(4,), n_out=1)
    defaults.update(kw)
    return GeneratorConfig(**defaults)


def ecfg(**kw):
    defaults = dict(pop_size=6, elite_size=2, generations=2, seed=3,
                    tournament_opponents=2, depreciation_eps=0.0)
    defaults.update(kw)
    return EvolutionConfig(**defaults)


def fixed_population(scores):
    cfg = gcfg(4)
    members = [Candidate(genome=init_genome(cfg, i), score=s, id=i)
               for i, s in enumerate(scores)]
    return Population(members=members, generation=0,
                      best_history=[(0, max(scores))], plans=None)


class TestTournament:
    def test_distinct_scores_max_wins(self):
        pop = fixed_population([0.1, 0.9, 0.5, 0.3])
        rng = np.random.default_rng(0)
        winner = tournament_select(pop, exclude=0, q=2, rng=rng)
        assert winner.id == 1  # q+1=3 of the 3 eligible, so 0.9 must be in

    def test_two_player(self):
        pop = fixed_population([0.2, 0.8, 0.5])
        for seed in range(5):
            w = tournament_select(pop, exclude=2, q=1,
                                  rng=np.random.default_rng(seed))
            assert w.id == 1  # both eligible players always drawn

    def test_all_equal_lowest_id(self):
        pop = fixed_population([0.5, 0.5, 0.5, 0.5])
        w = tournament_select(pop, exclude=3, q=2, rng=np.random.default_rng(1))
        assert w.id == 0

    def test_insufficient_members(self):
        pop = fixed_population([0.5, 0.6])
        with pytest.raises(ValueError):
            tournament_select(pop, exclude=0, q=2, rng=np.random.default_rng(0))


class TestCrossoverMutate:
    def test_identical_parents(self):
        g = init_genome(gcfg(4), 9)
        child = crossover(g, g, 0.5, np.random.default_rng(0))
        assert np.array_equal(child.weights, g.weights)

    def test_boundary_probabilities(self):
        a = init_genome(gcfg(4), 1)
        b = init_genome(gcfg(4), 2)
        assert np.array_equal(crossover(a, b, 1.0, np.random.default_rng(0)).weights,
                              a.weights)
        assert np.array_equal(crossover(a, b, 0.0, np.random.default_rng(0)).weights,
                              b.weights)

    def test_gene_mixing_concentration(self):
        cfg = gcfg(62, mlp_hidden=(30,))  # comfortably over 1000 genes
        n = init_genome(cfg, 0).layout.total
        assert n >= 1000
        from featgenn.netgen import Genome, build_layout
        layout = build_layout(cfg)
        a = Genome(weights=np.zeros(n), layout=layout)
        b = Genome(weights=np.ones(n), layout=layout)
        child = crossover(a, b, 0.5, np.random.default_rng(5))
        assert 0.45 <= child.weights.mean() <= 0.55

    def test_mutate_noop_cases(self):
        g = init_genome(gcfg(4), 3)
        assert np.array_equal(mutate(g, 0.0, 0.05, np.random.default_rng(0)).weights,
                              g.weights)
        assert np.array_equal(mutate(g, 1.0, 0.0, np.random.default_rng(0)).weights,
                              g.weights)

    def test_mutation_scale(self):
        cfg = gcfg(200, channels=4, mlp_hidden=(90,))
        g = init_genome(cfg, 4)
        assert g.layout.total >= 10000
        mutated = mutate(g, 1.0, 0.05, np.random.default_rng(6))
        deltas = mutated.weights - g.weights
        assert 0.045 <= deltas.std() <= 0.055


class TestAccept:
    def test_strict_improvement(self):
        assert accept(0.93, 0.91, 0.0, np.random.default_rng(0)) is True

    def test_worse_no_depreciation(self):
        assert accept(0.90, 0.91, 0.0, np.random.default_rng(0)) is False

    def test_worse_always_accept(self):
        assert accept(0.10, 0.91, 1.0, np.random.default_rng(0)) is True


class TestInitPopulation:
    def test_contract(self):
        d = synthetic_classification(50, 6, 2, seed=5)
        pop = init_population(ecfg(pop_size=4, elite_size=1), gcfg(6), d,
                              correlation_evaluator())
        assert len(pop.members) == 4
        assert all(0.0 <= c.score <= 1.0 for c in pop.members)
        assert pop.generation == 0 and len(pop.best_history) == 1

    def test_deterministic(self):
        d = synthetic_classification(50, 6, 2, seed=5)
        a = init_population(ecfg(), gcfg(6), d, correlation_evaluator())
        b = init_population(ecfg(), gcfg(6), d, correlation_evaluator())
        assert [c.score for c in a.members] == [c.score for c in b.members]
        assert all(np.array_equal(x.genome.weights, y.genome.weights)
                   for x, y in zip(a.members, b.members))


class TestEvolveEpoch:
    def test_elitism_keeps_best(self):
        d = synthetic_classification(50, 6, 2, seed=6)
        ev = correlation_evaluator()
        cfg = ecfg(depreciation_eps=0.0)
        pop = init_population(cfg, gcfg(6), d, ev)
        before = max(c.score for c in pop.members)
        nxt = evolve_epoch(pop, cfg, gcfg(6), d, ev)
        assert max(c.score for c in nxt.members) >= before

    def test_elites_bit_identical(self):
        d = synthetic_classification(50, 6, 2, seed=7)
        ev = correlation_evaluator()
        cfg = ecfg()
        pop = init_population(cfg, gcfg(6), d, ev)
        elite_ids = {c.id for c in sorted(pop.members,
                                          key=lambda c: (-c.score, c.id))[:cfg.elite_size]}
        nxt = evolve_epoch(pop, cfg, gcfg(6), d, ev)
        for c in nxt.members:
            if c.id in elite_ids:
                old = next(m for m in pop.members if m.id == c.id)
                assert c.genome is old.genome and c.score == old.score

    def test_identical_population_is_fixed_point(self):
        d = synthetic_classification(40, 6, 2, seed=8)
        ev = correlation_evaluator()
        cfg = ecfg(mutation_rate=0.0, depreciation_eps=0.0)
        pop = init_population(cfg, gcfg(6), d, ev)
        same_genome = pop.members[0].genome
        for c in pop.members:
            c.genome = same_genome
            c.score = pop.members[0].score
        nxt = evolve_epoch(pop, cfg, gcfg(6), d, ev)
        for c in nxt.members:
            assert np.array_equal(c.genome.weights, same_genome.weights)
            assert c.score == pop.members[0].score

    def test_epoch_deterministic(self):
        d = synthetic_classification(40, 6, 2, seed=9)
        cfg = ecfg(depreciation_eps=0.3)

        def run_once():
            ev = correlation_evaluator()
            pop = init_population(cfg, gcfg(6), d, ev)
            nxt = evolve_epoch(pop, cfg, gcfg(6), d, ev)
            return [(c.id, c.score, c.genome.weights.tobytes()) for c in nxt.members]

        assert run_once() == run_once()

    def test_layouts_stay_uniform(self):
        d = synthetic_classification(40, 6, 2, seed=10)
        ev = correlation_evaluator()
        cfg = ecfg()
        pop = init_population(cfg, gcfg(6), d, ev)
        for _ in range(2):
            pop = evolve_epoch(pop, cfg, gcfg(6), d, ev)
        totals = {c.genome.layout.total for c in pop.members}
        assert len(totals) == 1


class TestRunEvolution:
    def test_zero_generations_returns_init_best(self):
        d = synthetic_classification(40, 6, 2, seed=11)
        res = run_evolution(ecfg(generations=0), gcfg(6), d,
                            correlation_evaluator())
        assert len(res.history) == 1
        assert res.history[0][0] == 0
        assert res.best.score == res.history[0][1]

    def test_history_length(self):
        d = synthetic_classification(40, 6, 2, seed=12)
        res = run_evolution(ecfg(generations=3), gcfg(6), d,
                            correlation_evaluator())
        assert len(res.history) == 4
        assert [g for g, _ in res.history] == [0, 1, 2, 3]

    def test_hall_of_fame_non_decreasing_eps0(self):
        d = synthetic_classification(60, 6, 3, seed=13)
        res = run_evolution(ecfg(generations=4, depreciation_eps=0.0), gcfg(6),
                            d, correlation_evaluator())
        scores = [s for _, s in res.history]
        assert all(b >= a for a, b in zip(scores, scores[1:]))
        assert res.best.score == max(scores)

    def test_full_run_deterministic(self):
        d = synthetic_classification(40, 6, 2, seed=14)
        r1 = run_evolution(ecfg(generations=2, depreciation_eps=0.1), gcfg(6),
                           d, correlation_evaluator())
        r2 = run_evolution(ecfg(generations=2, depreciation_eps=0.1), gcfg(6),
                           d, correlation_evaluator())
        assert r1.history == r2.history
        assert r1.best.score == r2.best.score
        assert np.array_equal(r1.best_features, r2.best_features)

    def test_best_features_shape_and_scoring(self):
        d = synthetic_classification(40, 6, 2, seed=15)
        res = run_evolution(ecfg(generations=1), gcfg(6, n_out=2), d,
                            correlation_evaluator())
        assert res.best_features.shape == (40, 2)

    def test_works_with_forest_evaluator(self):
        d = synthetic_classification(45, 4, 2, seed=16, noise=0.3)
        res = run_evolution(ecfg(pop_size=4, elite_size=1, generations=1),
                            gcfg(4), d, forest_evaluator())
        assert 0.0 <= res.best.score <= 1.0

    def test_max_pooling_variant_runs(self):
        d = synthetic_classification(40, 6, 2, seed=17)
        res = run_evolution(ecfg(generations=1), gcfg(6, pooling="max"), d,
                            correlation_evaluator())
        assert res.best_features.shape[1] == 1


class TestCachingEvaluator:
    def test_identical_matrices_hit_cache(self):
        d = synthetic_classification(30, 4, 2, seed=18)
        ev = correlation_evaluator()
        s1 = ev(d)
        s2 = ev(d)
        assert s1 == s2
        assert ev.calls == 1 and ev.hits == 1

    def test_different_matrices_miss(self):
        d1 = synthetic_classification(30, 4, 2, seed=19)
        d2 = synthetic_classification(30, 4, 2, seed=20)
        ev = correlation_evaluator()
        ev(d1)
        ev(d2)
        assert ev.calls == 2 and ev.hits == 0
