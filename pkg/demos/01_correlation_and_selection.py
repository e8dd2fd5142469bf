"""Correlation statistics and MRMR pre-selection on a small synthetic table.

Walks through the statistical primitives the feature generator is built on:
pairwise Pearson correlation, per-feature correlation scores, binned mutual
information, and greedy max-relevance min-redundancy feature ordering.

Run: python demos/01_correlation_and_selection.py
"""

import numpy as np

from featgenn import (correlation_matrix, correlation_scores, mrmr_select,
                      mutual_information, pearson)
from featgenn.dataset import ColumnMeta, Dataset

rng = np.random.default_rng(0)

# a tiny table: two noisy copies of the signal, one anti-correlated copy,
# one pure-noise column
n = 200
signal = rng.normal(size=n)
x = np.column_stack([
    signal + 0.3 * rng.normal(size=n),   # s1
    signal + 0.3 * rng.normal(size=n),   # s2 (redundant with s1)
    -signal + 0.3 * rng.normal(size=n),  # anti (anti-correlated)
    rng.normal(size=n),                  # noise
])
y = (signal > 0).astype(np.int64)
names = ["s1", "s2", "anti", "noise"]

print("pairwise Pearson r between s1 and the others:")
for j, name in enumerate(names):
    print(f"  r(s1, {name}) = {pearson(x[:, 0], x[:, j]):+.3f}")

m = correlation_matrix(x, rows=range(n))
print("\nfull correlation matrix:")
for row, name in zip(m.r, names):
    print(f"  {name:<6}", " ".join(f"{v:+.2f}" for v in row))

cs = correlation_scores(m).cs
print("\nper-feature correlation scores (mean of each row, self included):")
for name, v in zip(names, cs):
    print(f"  CS({name}) = {v:+.3f}")
print("the anti-correlated copy drags its own score down -- grouping for")
print("pooling therefore uses |r|, while the scores weight group members")

print("\nmutual information with the target (10 equal-width bins):")
for j, name in enumerate(names):
    print(f"  MI({name}; y) = {mutual_information(x[:, j], y):.3f} nats")

d = Dataset(x=x, y=y,
            columns=tuple(ColumnMeta(nm, "numeric") for nm in names),
            name="demo", class_labels=("0", "1"))
order = mrmr_select(d, m=4)
print("\nMRMR selection order (relevance minus mean redundancy):")
print("  " + " -> ".join(names[j] for j in order))
print("s2 is pushed behind the less redundant columns despite its high")
print("relevance, which is the point of the redundancy penalty")
