"""Genetic algorithm over generator genomes: init, tournament, crossover,
mutation, depreciation acceptance, and the per-epoch pool-plan refresh."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import Dataset, append_features, select_features
from .netgen import (CORRELATION, GeneratorConfig, Genome, PoolPlan,
                     generated_columns, init_genome, initial_pool_plans,
                     update_pool_plans)
from .stats import mrmr_select

# fixed stream tags so the per-purpose RNGs never collide
_INIT_TAG = 101
_EPOCH_TAG = 211
_PLAN_TAG = 307


@dataclass(frozen=True)
class EvolutionConfig:
    pop_size: int = 16
    elite_size: int = 4
    generations: int = 30
    crossover_prob: float = 0.5
    mutation_rate: float = 0.1
    mutation_sigma: float = 0.05
    depreciation_eps: float = 0.05
    tournament_opponents: int = 3
    seed: int = 0
    corr_fraction: float = 0.8

    def __post_init__(self):
        if not 0 < self.elite_size < self.pop_size:
            raise ValueError("elite_size must be in (0, pop_size)")
        for p in (self.crossover_prob, self.mutation_rate, self.depreciation_eps):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must lie in [0, 1]")
        if self.mutation_sigma < 0:
            raise ValueError("mutation_sigma must be non-negative")
        if self.tournament_opponents < 1:
            raise ValueError("need at least one tournament opponent")
        if self.tournament_opponents + 1 > self.pop_size - 1:
            raise ValueError("tournament needs opponents + 1 candidates besides "
                             "the excluded one; shrink tournament_opponents or "
                             "grow pop_size")
        if not 0.0 < self.corr_fraction <= 1.0:
            raise ValueError("corr_fraction must lie in (0, 1]")


@dataclass
class Candidate:
    genome: Genome
    score: float | None
    id: int


@dataclass
class Population:
    members: list[Candidate]
    generation: int
    best_history: list[tuple[int, float]]
    plans: list[PoolPlan] | None = None


@dataclass
class EvolutionResult:
    best: Candidate
    history: list[tuple[int, float]]
    best_features: np.ndarray
    selected_features: list[int]


class CachingEvaluator:
    """Wraps a dataset scorer with a content-hash cache.

    Candidates that produce bit-identical appended matrices share one fit.
    """

    def __init__(self, score_fn):
        self._fn = score_fn
        self._cache: dict[bytes, float] = {}
        self.calls = 0
        self.hits = 0

    def __call__(self, d: Dataset) -> float:
        h = hashlib.blake2b(digest_size=16)
        h.update(d.name.encode())
        h.update(np.ascontiguousarray(d.x).tobytes())
        h.update(np.ascontiguousarray(d.y).tobytes())
        key = h.digest()
        if key in self._cache:
            self.hits += 1
            return self._cache[key]
        self.calls += 1
        score = float(self._fn(d))
        self._cache[key] = score
        return score


def _feature_names(d: Dataset, n: int) -> list[str]:
    existing = {c.name for c in d.columns}
    names = []
    i = 0
    while len(names) < n:
        nm = f"genf_{i}"
        if nm not in existing:
            names.append(nm)
        i += 1
    return names


def _score_genome(genome: Genome, d: Dataset, gcfg: GeneratorConfig,
                  plans, evaluator) -> tuple[float, np.ndarray]:
    cols = generated_columns(d.x, genome, gcfg,
                             plans if gcfg.pooling == CORRELATION else None)
    d_star = append_features(d, cols, _feature_names(d, cols.shape[1]))
    return evaluator(d_star), cols


def _best(members) -> Candidate:
    return max(members, key=lambda c: (c.score, -c.id))


def init_population(ecfg: EvolutionConfig, gcfg: GeneratorConfig, d: Dataset,
                    evaluator) -> Population:
    """Seeded random genomes, each scored on its appended dataset."""
    if gcfg.n_inputs != d.n_cols:
        raise ValueError("generator n_inputs must match the dataset width")
    plans = None
    if gcfg.pooling == CORRELATION:
        plan_seed = np.random.SeedSequence([ecfg.seed, _PLAN_TAG, 0])
        plans = initial_pool_plans(gcfg, d, ecfg.corr_fraction,
                                   int(plan_seed.generate_state(1)[0]))
    genome_seeds = np.random.SeedSequence([ecfg.seed, _INIT_TAG]) \
        .generate_state(ecfg.pop_size)
    members = []
    for i in range(ecfg.pop_size):
        genome = init_genome(gcfg, int(genome_seeds[i]))
        score, _ = _score_genome(genome, d, gcfg, plans, evaluator)
        members.append(Candidate(genome=genome, score=score, id=i))
    best = _best(members)
    return Population(members=members, generation=0,
                      best_history=[(0, best.score)], plans=plans)


def tournament_select(pop: Population, exclude: int, q: int,
                      rng: np.random.Generator) -> Candidate:
    """Round-robin tournament among q+1 sampled candidates.

    Every sampled candidate plays every other; a win is a strictly higher
    score. The most wins takes it, with ties going to the higher score and
    then the lower id.
    """
    eligible = [c for c in pop.members if c.id != exclude]
    if len(eligible) < q + 1:
        raise ValueError(f"need {q + 1} eligible members, have {len(eligible)}")
    picks = rng.choice(len(eligible), size=q + 1, replace=False)
    players = [eligible[i] for i in picks]
    wins = [sum(1 for other in players if p.score > other.score) for p in players]
    return max(zip(wins, players), key=lambda wp: (wp[0], wp[1].score, -wp[1].id))[1]


def crossover(a: Genome, b: Genome, p: float, rng: np.random.Generator) -> Genome:
    """Uniform crossover: each gene comes from a with probability p, else b."""
    if a.layout.total != b.layout.total:
        raise ValueError("parent layouts differ")
    from_a = rng.random(a.layout.total) < p
    return Genome(weights=np.where(from_a, a.weights, b.weights), layout=a.layout)


def mutate(g: Genome, rate: float, sigma: float, rng: np.random.Generator) -> Genome:
    """Perturb each gene by N(0, sigma) independently with probability rate."""
    if rate < 0 or sigma < 0:
        raise ValueError("rate and sigma must be non-negative")
    if rate == 0.0 or sigma == 0.0:
        return Genome(weights=g.weights.copy(), layout=g.layout)
    hit = rng.random(g.layout.total) < rate
    w = g.weights.copy()
    w[hit] += rng.normal(0.0, sigma, size=int(hit.sum()))
    return Genome(weights=w, layout=g.layout)


def accept(child_score: float, incumbent_score: float, eps: float,
           rng: np.random.Generator) -> bool:
    """Take a strictly better child always; a worse one with probability eps."""
    if child_score > incumbent_score:
        return True
    return bool(rng.random() < eps)


def evolve_epoch(pop: Population, ecfg: EvolutionConfig, gcfg: GeneratorConfig,
                 d: Dataset, evaluator) -> Population:
    """One GA epoch: elites pass through, every other member faces its child.

    Children are built from tournament partners via crossover and mutation and
    scored with the current generation's pool plans; replacement follows the
    acceptance rule. Plans refresh from the new elite-best at the end.
    """
    gen = pop.generation + 1
    ranked = sorted(pop.members, key=lambda c: (-c.score, c.id))
    elite_ids = {c.id for c in ranked[:ecfg.elite_size]}

    new_members = []
    for p in pop.members:
        if p.id in elite_ids:
            new_members.append(p)
            continue
        rng = np.random.default_rng([ecfg.seed, _EPOCH_TAG, gen, p.id])
        partner = tournament_select(pop, p.id, ecfg.tournament_opponents, rng)
        child = mutate(crossover(p.genome, partner.genome, ecfg.crossover_prob, rng),
                       ecfg.mutation_rate, ecfg.mutation_sigma, rng)
        child_score, _ = _score_genome(child, d, gcfg, pop.plans, evaluator)
        if accept(child_score, p.score, ecfg.depreciation_eps, rng):
            new_members.append(Candidate(genome=child, score=child_score, id=p.id))
        else:
            new_members.append(p)

    best = _best(new_members)
    plans = pop.plans
    if gcfg.pooling == CORRELATION:
        plan_seed = np.random.SeedSequence([ecfg.seed, _PLAN_TAG, gen])
        plans = update_pool_plans(best.genome, gcfg, d, ecfg.corr_fraction,
                                  int(plan_seed.generate_state(1)[0]))
    return Population(members=new_members, generation=gen,
                      best_history=pop.best_history + [(gen, best.score)],
                      plans=plans)


def run_evolution(ecfg: EvolutionConfig, gcfg: GeneratorConfig, d: Dataset,
                  evaluator, mrmr_keep: int | None = None,
                  mrmr_bins: int = 10) -> EvolutionResult:
    """Full pipeline: MRMR pre-selection, population init, GA epochs.

    Returns the hall-of-fame best candidate (never lost to depreciation), its
    generated feature columns, and the per-generation best-score history.
    """
    evaluator = evaluator if isinstance(evaluator, CachingEvaluator) \
        else CachingEvaluator(evaluator)
    selected = mrmr_select(d, mrmr_keep if mrmr_keep is not None else d.n_cols,
                           mrmr_bins)
    # the selection is used as a feature SET: keeping the original column
    # order makes the default keep-everything case the identity, so scores
    # reproduce on the unmodified dataset
    d_work = select_features(d, sorted(selected))
    gcfg = replace(gcfg, n_inputs=d_work.n_cols)

    pop = init_population(ecfg, gcfg, d_work, evaluator)

    def snapshot(c: Candidate) -> tuple[Candidate, np.ndarray]:
        cols = generated_columns(d_work.x, c.genome, gcfg,
                                 pop.plans if gcfg.pooling == CORRELATION else None)
        return Candidate(genome=Genome(c.genome.weights.copy(), c.genome.layout),
                         score=c.score, id=c.id), cols

    hof, hof_cols = snapshot(_best(pop.members))
    for _ in range(ecfg.generations):
        prev_plans = pop.plans
        pop = evolve_epoch(pop, ecfg, gcfg, d_work, evaluator)
        best = _best(pop.members)
        if best.score > hof.score:
            # children this epoch were scored with the pre-refresh plans
            cols = generated_columns(d_work.x, best.genome, gcfg,
                                     prev_plans if gcfg.pooling == CORRELATION else None)
            hof = Candidate(genome=Genome(best.genome.weights.copy(),
                                          best.genome.layout),
                            score=best.score, id=best.id)
            hof_cols = cols
    return EvolutionResult(best=hof, history=list(pop.best_history),
                           best_features=hof_cols, selected_features=selected)
