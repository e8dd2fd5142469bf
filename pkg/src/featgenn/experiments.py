"""Experiment harness: config file handling, the five experiment commands,
and CSV/JSON result emission.

Config lives in one INI file with sections mirroring the config dataclasses
plus one [dataset.<name>] section per manifest entry. Results are written as
results.csv and results.json; the JSON variant omits wall-clock timing so a
re-run with the same config and seed is byte-identical.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import reference
from .dataset import Dataset, load_csv, make_folds, prepare
from .evolve import CachingEvaluator, EvolutionConfig, run_evolution
from .forest import ForestConfig, evaluate_cv
from .netgen import CORRELATION, MAX, GeneratorConfig

BASE = "base"


class ConfigError(ValueError):
    """Bad configuration file or flag values (CLI exit code 2)."""


@dataclass(frozen=True)
class DatasetEntry:
    name: str
    path: str
    target: str
    positive: str
    n_out: int = 1
    optional: bool = False


@dataclass
class ExperimentConfig:
    manifest: dict[str, DatasetEntry]
    generator: GeneratorConfig
    evolution: EvolutionConfig
    forest: ForestConfig
    runs: int = 5
    pooling: str = CORRELATION
    fractions: tuple[float, ...] = (0.3, 0.6, 0.8, 1.0)
    out_dir: str = "results"
    workers: int = 0
    folds: int = 5
    fold_seed: int = 4242
    mrmr_keep: int | None = None
    mrmr_bins: int = 10

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigError("runs must be at least 1")
        if self.pooling not in (CORRELATION, MAX):
            raise ConfigError(f"unknown pooling {self.pooling!r}")
        for f in self.fractions:
            if not 0.0 < f <= 1.0:
                raise ConfigError("fractions must lie in (0, 1]")
        if self.folds < 2:
            raise ConfigError("folds must be at least 2")


def default_manifest(data_dir: str = "data") -> dict[str, DatasetEntry]:
    """The six benchmark datasets; megawatt1 has no public source and is
    optional (skipped when its file is absent)."""
    targets = {
        "spambase": ("spam", "1"),
        "megawatt1": ("failure", "1"),
        "ionosphere": ("label", "g"),
        "spectf": ("diagnosis", "1"),
        "credit_default": ("default", "1"),
        "german_credit": ("risk", "1"),
    }
    out = {}
    for name in reference.DATASETS:
        target, positive = targets[name]
        out[name] = DatasetEntry(name=name, path=f"{data_dir}/{name}.csv",
                                 target=target, positive=positive,
                                 n_out=reference.N_OUT[name],
                                 optional=name == "megawatt1")
    return out


def default_config() -> ExperimentConfig:
    return ExperimentConfig(manifest=default_manifest(),
                            generator=GeneratorConfig(n_inputs=1),
                            evolution=EvolutionConfig(),
                            forest=ForestConfig())


def _get(parser, section, option, cast, fallback):
    if not parser.has_option(section, option):
        return fallback
    raw = parser.get(section, option)
    try:
        if cast is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return cast(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {option} = {raw!r}: not a valid "
                          f"{cast.__name__}") from None


def _int_tuple(raw: str) -> tuple[int, ...]:
    raw = raw.strip()
    if not raw:
        return ()
    return tuple(int(v) for v in raw.split(","))


def _float_tuple(raw: str) -> tuple[float, ...]:
    return tuple(float(v) for v in raw.split(","))


def load_config(path=None) -> ExperimentConfig:
    """Parse an INI config file; with no path, return built-in defaults.

    A config file owns the dataset manifest outright: its [dataset.<name>]
    sections are the manifest, and a file with none of them means an empty
    one. Only the built-in defaults carry the six benchmark entries.
    """
    if path is None:
        return default_config()
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ConfigError(f"cannot parse {path}: {e}") from None

    base = default_config()
    g, e, f = base.generator, base.evolution, base.forest
    try:
        generator = GeneratorConfig(
            n_inputs=1,
            conv_layers=_get(parser, "generator", "conv_layers", int, g.conv_layers),
            channels=_get(parser, "generator", "channels", int, g.channels),
            kernel=_get(parser, "generator", "kernel", int, g.kernel),
            pool_group=_get(parser, "generator", "pool_group", int, g.pool_group),
            mlp_hidden=_get(parser, "generator", "mlp_hidden", _int_tuple, g.mlp_hidden),
            n_out=_get(parser, "generator", "n_out", int, g.n_out),
            pooling=_get(parser, "generator", "pooling", str, g.pooling),
        )
        evolution = EvolutionConfig(
            pop_size=_get(parser, "evolution", "pop_size", int, e.pop_size),
            elite_size=_get(parser, "evolution", "elite_size", int, e.elite_size),
            generations=_get(parser, "evolution", "generations", int, e.generations),
            crossover_prob=_get(parser, "evolution", "crossover_prob", float, e.crossover_prob),
            mutation_rate=_get(parser, "evolution", "mutation_rate", float, e.mutation_rate),
            mutation_sigma=_get(parser, "evolution", "mutation_sigma", float, e.mutation_sigma),
            depreciation_eps=_get(parser, "evolution", "depreciation_eps", float, e.depreciation_eps),
            tournament_opponents=_get(parser, "evolution", "tournament_opponents", int,
                                      e.tournament_opponents),
            seed=_get(parser, "evolution", "seed", int, e.seed),
            corr_fraction=_get(parser, "evolution", "corr_fraction", float, e.corr_fraction),
        )
        forest = ForestConfig(
            n_trees=_get(parser, "forest", "n_trees", int, f.n_trees),
            max_depth=_get(parser, "forest", "max_depth", int, f.max_depth),
            min_samples_leaf=_get(parser, "forest", "min_samples_leaf", int,
                                  f.min_samples_leaf),
            features_per_split=_get(parser, "forest", "features_per_split", str,
                                    f.features_per_split),
            seed=_get(parser, "forest", "seed", int, f.seed),
        )
    except ValueError as err:
        raise ConfigError(str(err)) from None

    manifest = {}
    for section in parser.sections():
        if not section.startswith("dataset."):
            continue
        name = section.split(".", 1)[1]
        for required in ("path", "target"):
            if not parser.has_option(section, required):
                raise ConfigError(f"[{section}] is missing {required!r}")
        manifest[name] = DatasetEntry(
            name=name,
            path=parser.get(section, "path"),
            target=parser.get(section, "target"),
            positive=_get(parser, section, "positive", str, "1"),
            n_out=_get(parser, section, "n_out", int,
                       reference.N_OUT.get(name, generator.n_out)),
            optional=_get(parser, section, "optional", bool, False),
        )
    try:
        return ExperimentConfig(
            manifest=manifest,
            generator=generator,
            evolution=evolution,
            forest=forest,
            runs=_get(parser, "experiment", "runs", int, base.runs),
            pooling=_get(parser, "experiment", "pooling", str, generator.pooling),
            fractions=_get(parser, "experiment", "fractions", _float_tuple, base.fractions),
            out_dir=_get(parser, "experiment", "out", str, base.out_dir),
            workers=_get(parser, "experiment", "workers", int, base.workers),
            folds=_get(parser, "experiment", "folds", int, base.folds),
            fold_seed=_get(parser, "experiment", "fold_seed", int, base.fold_seed),
            mrmr_keep=_get(parser, "experiment", "mrmr_keep", int, base.mrmr_keep),
            mrmr_bins=_get(parser, "experiment", "mrmr_bins", int, base.mrmr_bins),
        )
    except ValueError as err:
        raise ConfigError(str(err)) from None


def config_dict(cfg: ExperimentConfig) -> dict:
    """Fully-resolved config as plain JSON-serializable data."""
    return {
        "manifest": {n: vars(e) for n, e in sorted(cfg.manifest.items())},
        "generator": {k: list(v) if isinstance(v, tuple) else v
                      for k, v in vars(cfg.generator).items() if k != "n_inputs"},
        "evolution": vars(cfg.evolution),
        "forest": vars(cfg.forest),
        "experiment": {"runs": cfg.runs, "pooling": cfg.pooling,
                       "fractions": list(cfg.fractions), "folds": cfg.folds,
                       "fold_seed": cfg.fold_seed, "mrmr_keep": cfg.mrmr_keep,
                       "mrmr_bins": cfg.mrmr_bins},
    }


def config_hash(cfg: ExperimentConfig) -> str:
    blob = json.dumps(config_dict(cfg), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class Row:
    dataset: str
    method: str
    mean_f1: float
    std_f1: float
    n_generated: int
    runs: int
    wall_clock_s: float
    config_hash: str
    source: str = "measured"
    extras: dict = field(default_factory=dict)


_CSV_COLUMNS = ("dataset", "method", "source", "mean_f1", "std_f1",
                "n_generated", "runs", "fraction", "mean_f1_weighted",
                "std_f1_weighted", "reference_mean", "reference_std",
                "config_hash", "wall_clock_s")


@dataclass
class ResultTable:
    rows: list[Row] = field(default_factory=list)

    def sorted_rows(self):
        return sorted(self.rows, key=lambda r: (r.dataset, r.method,
                                                r.extras.get("fraction", -1.0)))

    def write(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "results.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(_CSV_COLUMNS)
            for r in self.sorted_rows():
                w.writerow([r.dataset, r.method, r.source, repr(r.mean_f1),
                            repr(r.std_f1), r.n_generated, r.runs,
                            r.extras.get("fraction", ""),
                            _opt_repr(r.extras.get("mean_f1_weighted")),
                            _opt_repr(r.extras.get("std_f1_weighted")),
                            _opt_repr(r.extras.get("reference_mean")),
                            _opt_repr(r.extras.get("reference_std")),
                            r.config_hash, repr(r.wall_clock_s)])
        # timing is excluded so identical configs reproduce identical bytes
        payload = [{"dataset": r.dataset, "method": r.method, "source": r.source,
                    "mean_f1": r.mean_f1, "std_f1": r.std_f1,
                    "n_generated": r.n_generated, "runs": r.runs,
                    "config_hash": r.config_hash,
                    **{k: v for k, v in sorted(r.extras.items())}}
                   for r in self.sorted_rows()]
        with open(out / "results.json", "w", encoding="utf-8") as fh:
            json.dump({"rows": payload}, fh, sort_keys=True, indent=1)
            fh.write("\n")


def _opt_repr(v):
    return "" if v is None else repr(v)


def write_config_echo(cfg: ExperimentConfig, out_dir, note: str = "") -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    parser = configparser.ConfigParser()
    for section, values in config_dict(cfg).items():
        if section == "manifest":
            for name, entry in values.items():
                parser[f"dataset.{name}"] = {k: str(v) for k, v in entry.items()
                                             if k != "name"}
            continue
        parser[section] = {
            k: ",".join(str(x) for x in v) if isinstance(v, (list, tuple)) else str(v)
            for k, v in values.items() if v is not None}
    with open(out / "config_echo.ini", "w", encoding="utf-8") as fh:
        fh.write(f"; config_hash = {config_hash(cfg)}\n")
        if note:
            fh.write(f"; {note}\n")
        parser.write(fh)


def set_workers(workers: int) -> None:
    """Cap numba's thread pool; 0 leaves the default (all cores)."""
    if workers > 0:
        import numba
        numba.set_num_threads(max(1, min(workers, numba.config.NUMBA_NUM_THREADS)))


@dataclass
class PreparedDataset:
    entry: DatasetEntry
    data: Dataset
    folds: object
    evaluator: CachingEvaluator
    baseline: object  # EvalReport


def prepare_dataset(cfg: ExperimentConfig, entry: DatasetEntry) -> PreparedDataset:
    """Load, scale, and fold a manifest dataset, and build its CV evaluator."""
    raw = load_csv(entry.path, target=entry.target, name=entry.name)
    data, _ = prepare(raw)
    folds = make_folds(data, cfg.folds, seed=cfg.fold_seed)
    positive = data.label_index(entry.positive)

    def score(ds: Dataset) -> float:
        return evaluate_cv(ds, folds, cfg.forest, positive).mean_f1

    evaluator = CachingEvaluator(score)
    baseline = evaluate_cv(data, folds, cfg.forest, positive)
    return PreparedDataset(entry=entry, data=data, folds=folds,
                           evaluator=evaluator, baseline=baseline)


def _select_entries(cfg: ExperimentConfig, datasets) -> list[DatasetEntry]:
    if datasets:
        missing = [d for d in datasets if d not in cfg.manifest]
        if missing:
            raise ConfigError(f"datasets not in manifest: {missing}")
        return [cfg.manifest[d] for d in datasets]
    return [cfg.manifest[n] for n in sorted(cfg.manifest)]


def _each_dataset(cfg, datasets, failures, skipped):
    for entry in _select_entries(cfg, datasets):
        if entry.optional and not Path(entry.path).exists():
            skipped.append(entry.name)
            continue
        try:
            yield entry, prepare_dataset(cfg, entry)
        except Exception as err:  # per-dataset isolation; the run continues
            failures.append((entry.name, f"{type(err).__name__}: {err}"))


def _evolution_row(cfg, prep, mode, seeds, out, tag=None, fraction=None,
                   write_history=True, extras=None):
    """Run one evolution set (several seeds) and collapse it into a table row."""
    entry = prep.entry
    gcfg = replace(cfg.generator, n_inputs=1, n_out=entry.n_out, pooling=mode)
    t0 = time.perf_counter()
    results = []
    for r, seed in enumerate(seeds):
        ecfg = replace(cfg.evolution, seed=seed,
                       corr_fraction=(fraction if fraction is not None
                                      else cfg.evolution.corr_fraction))
        res = run_evolution(ecfg, gcfg, prep.data, prep.evaluator,
                            mrmr_keep=cfg.mrmr_keep, mrmr_bins=cfg.mrmr_bins)
        results.append(res)
        if write_history and out is not None:
            label = tag or f"{entry.name}_{mode}"
            _write_history(Path(out) / f"history_{label}_run{r}.csv", res.history)
    wall = time.perf_counter() - t0
    best_scores = np.array([res.best.score for res in results])
    method = f"featgenn-{'corr' if mode == CORRELATION else 'max'}"
    ref = reference.POOLING_COMPARISON.get(entry.name, {}).get(
        "corr" if mode == CORRELATION else "max")
    ex = {"seeds": list(map(int, seeds)),
          "run_scores": [float(s) for s in best_scores]}
    if ref:
        ex["reference_mean"], ex["reference_std"] = ref
    if fraction is not None:
        ex["fraction"] = fraction
        ex["variant"] = "full" if fraction == 1.0 else f"{fraction:g}"
    if extras:
        ex.update(extras)
    row = Row(dataset=entry.name, method=method,
              mean_f1=float(best_scores.mean()), std_f1=float(best_scores.std()),
              n_generated=entry.n_out, runs=len(seeds), wall_clock_s=wall,
              config_hash=config_hash(cfg), extras=ex)
    return row, results


def _write_history(path, history):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["generation", "best_f1"])
        for gen, score in history:
            w.writerow([gen, repr(score)])


def _export_best(out, entry, results):
    """Write the best run's generated columns and genome."""
    best = max(results, key=lambda r: r.best.score)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / f"features_{entry.name}.csv", "w", newline="",
              encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"genf_{i}" for i in range(best.best_features.shape[1])])
        for row in best.best_features:
            w.writerow([repr(v) for v in row])
    np.savetxt(out / f"genome_{entry.name}.csv", best.best.genome.weights,
               delimiter=",")


def _baseline_row(cfg, prep, wall) -> Row:
    entry = prep.entry
    rep = prep.baseline
    extras = {"mean_f1_weighted": rep.mean_f1_weighted,
              "std_f1_weighted": rep.std_f1_weighted}
    ref = reference.POOLING_COMPARISON.get(entry.name)
    if ref:
        extras["reference_mean"] = ref["base"]
    return Row(dataset=entry.name, method=BASE, mean_f1=rep.mean_f1,
               std_f1=rep.std_f1, n_generated=0, runs=1, wall_clock_s=wall,
               config_hash=config_hash(cfg), extras=extras)


def _run_seeds(cfg: ExperimentConfig, runs=None) -> list[int]:
    n = runs if runs is not None else cfg.runs
    return [cfg.evolution.seed + i for i in range(n)]


def cmd_baseline(cfg: ExperimentConfig, datasets=None, out_dir=None):
    """Cross-validated f1 of the raw prepared datasets, next to the published
    base numbers."""
    out = out_dir or cfg.out_dir
    table, failures, skipped = ResultTable(), [], []
    for entry, prep in _each_dataset(cfg, datasets, failures, skipped):
        t0 = time.perf_counter()
        table.rows.append(_baseline_row(cfg, prep, time.perf_counter() - t0))
    table.write(out)
    write_config_echo(cfg, out, note="command = baseline")
    return table, failures, skipped


def cmd_run(cfg: ExperimentConfig, datasets=None, out_dir=None, runs=None):
    """Seeded evolution runs per dataset; exports the best run's features."""
    out = out_dir or cfg.out_dir
    table, failures, skipped = ResultTable(), [], []
    seeds = _run_seeds(cfg, runs)
    for entry, prep in _each_dataset(cfg, datasets, failures, skipped):
        try:
            row, results = _evolution_row(
                cfg, prep, cfg.pooling, seeds, out, tag=entry.name,
                extras={"measured_base_f1": prep.baseline.mean_f1})
            table.rows.append(row)
            _export_best(out, entry, results)
        except Exception as err:
            failures.append((entry.name, f"{type(err).__name__}: {err}"))
    table.write(out)
    write_config_echo(cfg, out, note="command = run")
    return table, failures, skipped


def cmd_compare_pooling(cfg: ExperimentConfig, datasets=None, out_dir=None,
                        runs=None):
    """Paired-seed correlation-vs-max pooling comparison (two rows per dataset)."""
    out = out_dir or cfg.out_dir
    table, failures, skipped = ResultTable(), [], []
    seeds = _run_seeds(cfg, runs)
    for entry, prep in _each_dataset(cfg, datasets, failures, skipped):
        try:
            rows = {}
            for mode in (CORRELATION, MAX):
                row, _ = _evolution_row(cfg, prep, mode, seeds, out,
                                        tag=f"{entry.name}_{mode}")
                rows[mode] = row
            delta = rows[CORRELATION].mean_f1 - rows[MAX].mean_f1
            for row in rows.values():
                row.extras["delta_corr_minus_max"] = delta
            table.rows.extend(rows.values())
        except Exception as err:
            failures.append((entry.name, f"{type(err).__name__}: {err}"))
    table.write(out)
    write_config_echo(cfg, out, note="command = compare-pooling; "
                                     "paired seeds shared across pooling modes")
    return table, failures, skipped


def cmd_data_fraction(cfg: ExperimentConfig, datasets=None, out_dir=None,
                      runs=None, fractions=None):
    """Evolution at several correlation-data fractions with shared seeds."""
    out = out_dir or cfg.out_dir
    fractions = tuple(fractions) if fractions else cfg.fractions
    for f in fractions:
        if not 0.0 < f <= 1.0:
            raise ConfigError("fractions must lie in (0, 1]")
    table, failures, skipped = ResultTable(), [], []
    seeds = _run_seeds(cfg, runs)
    curves = []
    for entry, prep in _each_dataset(cfg, datasets, failures, skipped):
        try:
            for frac in fractions:
                row, results = _evolution_row(
                    cfg, prep, CORRELATION, seeds, out,
                    tag=f"{entry.name}_f{frac:g}", fraction=frac)
                for delta_frac, pct in reference.DATA_FRACTION_DELTAS.items():
                    if abs(frac - delta_frac) < 1e-9:
                        row.extras["reference_full_vs_this_pct"] = pct
                table.rows.append(row)
                by_gen = {}
                for res in results:
                    for gen, score in res.history:
                        by_gen.setdefault(gen, []).append(score)
                for gen in sorted(by_gen):
                    curves.append((entry.name, frac, gen,
                                   float(np.mean(by_gen[gen]))))
        except Exception as err:
            failures.append((entry.name, f"{type(err).__name__}: {err}"))
    outp = Path(out)
    outp.mkdir(parents=True, exist_ok=True)
    with open(outp / "rq2_curves.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset", "fraction", "generation", "best_f1"])
        for rec in curves:
            w.writerow([rec[0], rec[1], rec[2], repr(rec[3])])
    table.write(out)
    write_config_echo(cfg, out, note="command = data-fraction")
    return table, failures, skipped


def cmd_bench(cfg: ExperimentConfig, datasets=None, out_dir=None, runs=None):
    """Baseline + evolution per dataset plus literature-shaped reports.

    bench_table_f1 mirrors the published method-comparison table (read-only
    constants tagged source=paper) with our measured numbers appended;
    bench_table_counts mirrors the generated-feature-count table.
    """
    out = out_dir or cfg.out_dir
    table, failures, skipped = ResultTable(), [], []
    seeds = _run_seeds(cfg, runs)
    measured = {}
    for entry, prep in _each_dataset(cfg, datasets, failures, skipped):
        try:
            table.rows.append(_baseline_row(cfg, prep, 0.0))
            row, results = _evolution_row(cfg, prep, cfg.pooling, seeds, out,
                                          tag=entry.name)
            table.rows.append(row)
            _export_best(out, entry, results)
            measured[entry.name] = {"mean_f1": row.mean_f1, "std_f1": row.std_f1,
                                    "base_f1": prep.baseline.mean_f1}
        except Exception as err:
            failures.append((entry.name, f"{type(err).__name__}: {err}"))

    names = [e.name for e in _select_entries(cfg, datasets)]
    f1_rows = []
    count_rows = []
    for name in names:
        lit = reference.LITERATURE_F1.get(name)
        counts = reference.FEATURE_COUNTS.get(name)
        n_out = cfg.manifest[name].n_out if name in cfg.manifest else None
        f1_rows.append({
            "dataset": name, "source": "paper",
            **({k: v for k, v in lit.items()} if lit else {}),
            "measured_mean_f1": measured.get(name, {}).get("mean_f1"),
            "measured_std_f1": measured.get(name, {}).get("std_f1"),
            "measured_base_f1": measured.get(name, {}).get("base_f1"),
        })
        count_rows.append({
            "dataset": name, "source": "paper",
            **({k: v for k, v in counts.items()} if counts else {}),
            "configured_featgenn": n_out,
        })
    outp = Path(out)
    outp.mkdir(parents=True, exist_ok=True)
    _write_report(outp, "bench_table_f1", f1_rows)
    _write_report(outp, "bench_table_counts", count_rows)
    table.write(out)
    write_config_echo(cfg, out, note="command = bench")
    return table, failures, skipped


def _write_report(out: Path, stem: str, rows: list[dict]) -> None:
    keys = []
    for r in rows:
        for k in r:
            if k not in keys:
                keys.append(k)
    with open(out / f"{stem}.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(keys)
        for r in rows:
            w.writerow(["" if r.get(k) is None else
                        (repr(r[k]) if isinstance(r[k], float) else r[k])
                        for k in keys])
    with open(out / f"{stem}.json", "w", encoding="utf-8") as fh:
        json.dump({"rows": rows}, fh, sort_keys=True, indent=1)
        fh.write("\n")
