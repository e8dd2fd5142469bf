"""Forward-only convolutional feature generator with correlation or max pooling.

The generator treats a row's features as a 1-D signal: each layer applies a
same-padded convolution over the feature axis, a tanh, and a pooling step that
shrinks the position count by the pool group size. Correlation pooling groups
co-varying positions and averages each group with softmax weights over the
positions' correlation scores; max pooling takes plain window maxima. An MLP
head merges the flattened activations into the new feature columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, subsample_rows
from .stats import CorrelationMatrix, CorrelationScores, correlation_matrix, correlation_scores

CORRELATION = "correlation"
MAX = "max"


@dataclass(frozen=True)
class GeneratorConfig:
    """Architecture of the feature generator.

    n_inputs is the width of the feature axis the generator consumes; it is
    bound per dataset before genomes are created.
    """

    n_inputs: int
    conv_layers: int = 2
    channels: int = 4
    kernel: int = 3
    pool_group: int = 2
    mlp_hidden: tuple[int, ...] = (16,)
    n_out: int = 1
    activation: str = "tanh"
    pooling: str = CORRELATION

    def __post_init__(self):
        if self.n_inputs < 1:
            raise ValueError("n_inputs must be positive")
        if self.conv_layers < 1:
            raise ValueError("need at least one conv layer")
        if self.kernel % 2 != 1:
            raise ValueError("kernel width must be odd")
        if self.pool_group < 2:
            raise ValueError("pool_group must be at least 2")
        if self.n_out < 1:
            raise ValueError("n_out must be at least 1")
        if self.activation != "tanh":
            raise ValueError("only tanh activation is supported")
        if self.pooling not in (CORRELATION, MAX):
            raise ValueError(f"unknown pooling {self.pooling!r}")


@dataclass(frozen=True)
class Block:
    name: str
    shape: tuple[int, ...]
    offset: int
    fan_in: int
    fan_out: int
    is_bias: bool


@dataclass(frozen=True)
class GenomeLayout:
    """Offsets of every weight/bias block in the flat genome vector."""

    blocks: tuple[Block, ...]
    total: int
    layer_positions: tuple[int, ...]  # position count entering each conv layer

    def block(self, name: str) -> Block:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)


@dataclass(frozen=True)
class Genome:
    """Flat weight vector of a generator; the unit of crossover and mutation."""

    weights: np.ndarray
    layout: GenomeLayout

    def __post_init__(self):
        if self.weights.shape != (self.layout.total,):
            raise ValueError("genome length does not match its layout")
        if not np.isfinite(self.weights).all():
            raise ValueError("genome contains non-finite weights")

    def view(self, name: str) -> np.ndarray:
        b = self.layout.block(name)
        return self.weights[b.offset:b.offset + int(np.prod(b.shape))].reshape(b.shape)


@dataclass(frozen=True)
class PoolPlan:
    """Disjoint position groups for one layer plus the scores weighting them."""

    groups: tuple[tuple[int, ...], ...]
    layer: int
    scores: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def positions(self) -> int:
        return sum(len(g) for g in self.groups)


def build_layout(cfg: GeneratorConfig) -> GenomeLayout:
    """Compute block shapes and offsets for the configured architecture."""
    blocks = []
    offset = 0

    def add(name, shape, fan_in, fan_out, is_bias=False):
        nonlocal offset
        blocks.append(Block(name, shape, offset, fan_in, fan_out, is_bias))
        offset += int(np.prod(shape))

    p = cfg.n_inputs
    layer_positions = []
    in_ch = 1
    for l in range(cfg.conv_layers):
        layer_positions.append(p)
        add(f"conv{l}_w", (cfg.channels, in_ch, cfg.kernel),
            in_ch * cfg.kernel, cfg.channels * cfg.kernel)
        add(f"conv{l}_b", (cfg.channels,), 0, 0, is_bias=True)
        in_ch = cfg.channels
        p = math.ceil(p / cfg.pool_group)
    dims = [cfg.channels * p, *cfg.mlp_hidden, cfg.n_out]
    for l, (din, dout) in enumerate(zip(dims[:-1], dims[1:])):
        add(f"mlp{l}_w", (din, dout), din, dout)
        add(f"mlp{l}_b", (dout,), 0, 0, is_bias=True)
    return GenomeLayout(blocks=tuple(blocks), total=offset,
                        layer_positions=tuple(layer_positions))


def init_genome(cfg: GeneratorConfig, seed: int) -> Genome:
    """Random genome: uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases."""
    layout = build_layout(cfg)
    rng = np.random.default_rng(seed)
    w = np.zeros(layout.total, dtype=np.float64)
    for b in layout.blocks:
        size = int(np.prod(b.shape))
        if not b.is_bias:
            bound = math.sqrt(6.0 / (b.fan_in + b.fan_out))
            w[b.offset:b.offset + size] = rng.uniform(-bound, bound, size)
    return Genome(weights=w, layout=layout)


def build_pool_plan(m: CorrelationMatrix, k: int, layer: int = 0) -> PoolPlan:
    """Greedy correlation grouping of positions into groups of at most k.

    Repeatedly seed a group with the unassigned position of highest mean
    correlation (computed over the unassigned positions only), then attach its
    k-1 most |r|-correlated unassigned peers. Ties break to the lowest index;
    the final group may be smaller.
    """
    r = m.r
    d = r.shape[0]
    unassigned = np.ones(d, dtype=bool)
    groups = []
    while unassigned.any():
        u = np.flatnonzero(unassigned)
        cs_u = r[np.ix_(u, u)].mean(axis=1)
        seed_pos = int(u[np.argmax(cs_u)])
        others = u[u != seed_pos]
        order = np.lexsort((others, -np.abs(r[seed_pos, others])))
        members = [seed_pos] + [int(o) for o in others[order[:k - 1]]]
        members.sort()
        groups.append(tuple(members))
        unassigned[members] = False
    return PoolPlan(groups=tuple(groups), layer=layer,
                    scores=correlation_scores(m).cs)


def uniform_pool_plan(positions: int, k: int, layer: int = 0) -> PoolPlan:
    """Consecutive-window partition with flat scores (plain averaging)."""
    groups = tuple(tuple(range(s, min(s + k, positions)))
                   for s in range(0, positions, k))
    return PoolPlan(groups=groups, layer=layer, scores=np.zeros(positions))


def _softmax(v: np.ndarray) -> np.ndarray:
    e = np.exp(v - v.max())
    return e / e.sum()


def correlation_pool(act: np.ndarray, plan: PoolPlan, cs) -> np.ndarray:
    """Aggregate each position group as a softmax(cs)-weighted sum.

    Works on any array with positions as the last axis; the output replaces
    that axis with one entry per group.
    """
    scores = cs.cs if isinstance(cs, CorrelationScores) else np.asarray(cs)
    if plan.positions() != act.shape[-1] or scores.shape[0] != act.shape[-1]:
        raise ValueError("pool plan does not cover the activation positions")
    out = np.empty(act.shape[:-1] + (len(plan.groups),), dtype=act.dtype)
    for g, members in enumerate(plan.groups):
        w = _softmax(scores[list(members)])
        out[..., g] = act[..., list(members)] @ w
    return out


def max_pool(act: np.ndarray, k: int) -> np.ndarray:
    """Per-row maximum over non-overlapping windows of k consecutive positions."""
    if k < 1:
        raise ValueError("window must be at least 1")
    act = np.asarray(act)
    p = act.shape[-1]
    starts = range(0, p, k)
    out = np.empty(act.shape[:-1] + (len(starts),), dtype=act.dtype)
    for i, s in enumerate(starts):
        out[..., i] = act[..., s:min(s + k, p)].max(axis=-1)
    return out


def _conv1d_same(a: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Same-padded stride-1 convolution over the last axis.

    a: [rows, in_ch, p]; w: [out_ch, in_ch, k]; b: [out_ch] -> [rows, out_ch, p]
    """
    k = w.shape[2]
    pad = (k - 1) // 2
    ap = np.pad(a, ((0, 0), (0, 0), (pad, pad)))
    windows = np.lib.stride_tricks.sliding_window_view(ap, k, axis=2)
    return np.einsum("rcpk,ock->rop", windows, w, optimize=True) + b[None, :, None]


def _pool(act: np.ndarray, cfg: GeneratorConfig, plan: PoolPlan | None) -> np.ndarray:
    if cfg.pooling == MAX:
        return max_pool(act, cfg.pool_group)
    if plan is None:
        raise ValueError("correlation pooling needs a pool plan per conv layer")
    return correlation_pool(act, plan, plan.scores)


def _check_plans(cfg: GeneratorConfig, plans) -> list[PoolPlan | None]:
    if cfg.pooling == MAX:
        return [None] * cfg.conv_layers
    if plans is None or len(plans) != cfg.conv_layers:
        raise ValueError(f"expected {cfg.conv_layers} pool plans")
    return list(plans)


def network_forward(x_rows: np.ndarray, g: Genome, cfg: GeneratorConfig,
                    plans=None) -> np.ndarray:
    """Run the generator over rows of features, producing n_out columns."""
    x_rows = np.asarray(x_rows, dtype=np.float64)
    if x_rows.ndim != 2 or x_rows.shape[1] != cfg.n_inputs:
        raise ValueError(f"expected [rows, {cfg.n_inputs}] input")
    if g.layout.total != build_layout(cfg).total:
        raise ValueError("genome does not match the generator config")
    plans = _check_plans(cfg, plans)

    a = x_rows[:, None, :]
    for l in range(cfg.conv_layers):
        z = _conv1d_same(a, g.view(f"conv{l}_w"), g.view(f"conv{l}_b"))
        a = np.tanh(z)
        a = _pool(a, cfg, plans[l])
    h = a.reshape(a.shape[0], -1)
    n_mlp = len(cfg.mlp_hidden) + 1
    for l in range(n_mlp):
        h = h @ g.view(f"mlp{l}_w") + g.view(f"mlp{l}_b")
        if l < n_mlp - 1:
            h = np.tanh(h)
    if not np.isfinite(h).all():
        raise FloatingPointError("generator produced non-finite output")
    return h


def generated_columns(x_rows: np.ndarray, g: Genome, cfg: GeneratorConfig,
                      plans=None) -> np.ndarray:
    """Forward pass plus the z-scoring convention applied to each output column."""
    out = network_forward(x_rows, g, cfg, plans)
    mean = out.mean(axis=0)
    std = out.std(axis=0)
    safe = np.where(std == 0.0, 1.0, std)
    out = (out - mean) / safe
    out[:, std == 0.0] = 0.0
    return out


def initial_pool_plans(cfg: GeneratorConfig, d: Dataset, fraction: float,
                       seed: int) -> list[PoolPlan]:
    """Generation-zero plans: raw-feature correlations for layer 0.

    No activations exist before the first generation, so deeper layers start
    from consecutive windows with flat scores and are replaced by
    update_pool_plans after the first epoch.
    """
    rows = subsample_rows(d, fraction, seed)
    plans = [build_pool_plan(correlation_matrix(d.x, rows), cfg.pool_group, layer=0)]
    p = math.ceil(cfg.n_inputs / cfg.pool_group)
    for l in range(1, cfg.conv_layers):
        plans.append(uniform_pool_plan(p, cfg.pool_group, layer=l))
        p = math.ceil(p / cfg.pool_group)
    return plans


def update_pool_plans(best: Genome, cfg: GeneratorConfig, d: Dataset,
                      fraction: float, seed: int) -> list[PoolPlan]:
    """Refresh pool plans from the elite-best candidate's activations.

    Layer 0 groups by raw-input correlations on a row subsample; each deeper
    layer groups by the correlations of the previous layer's pooled
    activations (channel-averaged), computed on the same subsample with the
    plans built so far.
    """
    rows = subsample_rows(d, fraction, seed)
    xs = d.x[rows]
    plans = [build_pool_plan(correlation_matrix(xs, np.arange(len(rows))),
                             cfg.pool_group, layer=0)]
    a = xs[:, None, :]
    for l in range(1, cfg.conv_layers):
        z = _conv1d_same(a, best.view(f"conv{l - 1}_w"), best.view(f"conv{l - 1}_b"))
        a = correlation_pool(np.tanh(z), plans[l - 1], plans[l - 1].scores)
        pooled = a.mean(axis=1)
        m = correlation_matrix(pooled, np.arange(pooled.shape[0]))
        plans.append(build_pool_plan(m, cfg.pool_group, layer=l))
    return plans
