"""Inside the feature generator: convolution, pooling variants, genomes.

Builds a small generator, shows how correlation pooling groups co-varying
feature positions (versus max pooling's fixed windows), and runs the forward
pass that turns dataset rows into new feature columns.

Run: python demos/02_feature_generator.py
"""

import numpy as np

from featgenn import (GeneratorConfig, build_layout, build_pool_plan,
                      correlation_matrix, generated_columns, init_genome,
                      max_pool, network_forward, update_pool_plans)
from featgenn.dataset import ColumnMeta, Dataset

rng = np.random.default_rng(1)

# eight features where (0,4) and (2,6) are near-duplicates
n = 150
base = rng.normal(size=(n, 8))
base[:, 4] = base[:, 0] + 0.05 * rng.normal(size=n)
base[:, 6] = base[:, 2] + 0.05 * rng.normal(size=n)
y = (base[:, 0] + base[:, 2] > 0).astype(np.int64)
d = Dataset(x=base, y=y,
            columns=tuple(ColumnMeta(f"f{j}", "numeric") for j in range(8)),
            name="demo", class_labels=("0", "1"))

cfg = GeneratorConfig(n_inputs=8, conv_layers=2, channels=4, kernel=3,
                      pool_group=2, mlp_hidden=(16,), n_out=2)
layout = build_layout(cfg)
print(f"generator architecture: {cfg.conv_layers} conv layers x "
      f"{cfg.channels} channels, kernel {cfg.kernel}, pool groups of "
      f"{cfg.pool_group}, MLP {cfg.mlp_hidden} -> {cfg.n_out} outputs")
print(f"genome length: {layout.total} weights in {len(layout.blocks)} blocks")

plan = build_pool_plan(correlation_matrix(d.x, range(n)), k=2)
print("\nlayer-0 correlation pooling groups (duplicates end up together):")
for g in plan.groups:
    print(f"  positions {g}")

print("\nmax pooling, by contrast, always takes consecutive windows:")
row = d.x[:1]
print(f"  row head {np.round(row[0, :4], 2)} -> window maxima "
      f"{np.round(max_pool(row, 2)[0, :2], 2)}")

genome = init_genome(cfg, seed=42)
plans = update_pool_plans(genome, cfg, d, fraction=0.8, seed=0)
out = network_forward(d.x, genome, cfg, plans)
print(f"\nforward pass: {d.x.shape} rows -> {out.shape} generated columns")
print(f"  raw output ranges: {np.round(out.min(0), 3)} .. {np.round(out.max(0), 3)}")

cols = generated_columns(d.x, genome, cfg, plans)
print(f"  after the z-score convention: means {np.round(cols.mean(0), 6)}, "
      f"stds {np.round(cols.std(0), 6)}")
print("these columns are what gets appended to the dataset for evaluation")
