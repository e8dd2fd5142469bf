#!/usr/bin/env python3
"""Generate synthetic stand-in datasets shaped like the benchmarks, plus a
matching config file, so every CLI command can run without downloads.

These are random classification problems (latent score + noisy copies +
distractors), useful for exercising the pipeline end to end. They are NOT the
published benchmarks and carry no comparable f1 levels.

Usage: python scripts/make_synthetic_data.py [--dest data-synthetic]
                                             [--config configs/synthetic.ini]
"""

import argparse
from pathlib import Path

import numpy as np

# name -> (rows, feature columns, informative columns, target name)
SHAPES = {
    "synth_small": (300, 12, 4, "t"),
    "synth_wide": (400, 30, 6, "t"),
    "synth_skewed": (500, 16, 5, "t"),
}


def make_one(name, rows, cols, informative, target, rng):
    latent = rng.normal(size=rows)
    y = (latent > (0.4 if name == "synth_skewed" else 0.0)).astype(int)
    x = rng.normal(size=(rows, cols))
    for j in range(informative):
        x[:, j] = latent + (0.6 + 0.2 * j) * rng.normal(size=rows)
    # a redundant pair so correlation pooling has structure to find
    x[:, informative] = x[:, 0] + 0.05 * rng.normal(size=rows)
    header = ",".join([f"c{j}" for j in range(cols)] + [target])
    lines = [header]
    for i in range(rows):
        lines.append(",".join(f"{v:.6f}" for v in x[i]) + f",{y[i]}")
    return "\n".join(lines) + "\n"


CONFIG_TEMPLATE = """\
; synthetic desk-scale experiment config (generated by make_synthetic_data.py)
[experiment]
runs = 3
out = results-synthetic
folds = 5
fold_seed = 4242

[generator]
conv_layers = 2
channels = 4
kernel = 3
pool_group = 2
mlp_hidden = 16
n_out = 2

[evolution]
pop_size = 8
elite_size = 2
generations = 5
tournament_opponents = 2
seed = 0

[forest]
n_trees = 40
seed = 9001

"""


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dest", default="data-synthetic")
    ap.add_argument("--config", default="configs/synthetic.ini")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    sections = []
    for name, (rows, cols, informative, target) in SHAPES.items():
        path = dest / f"{name}.csv"
        path.write_text(make_one(name, rows, cols, informative, target, rng),
                        encoding="utf-8")
        print(f"wrote {path}")
        sections.append(f"[dataset.{name}]\npath = {path}\ntarget = {target}\n"
                        f"positive = 1\nn_out = 2\n")

    cfg_path = Path(args.config)
    cfg_path.parent.mkdir(parents=True, exist_ok=True)
    cfg_path.write_text(CONFIG_TEMPLATE + "\n".join(sections), encoding="utf-8")
    print(f"wrote {cfg_path}")


if __name__ == "__main__":
    main()
