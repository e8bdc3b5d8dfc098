"""Command-line surface: decompose, dtw, predict, benchmark, gradcheck.

Every command is reproducible: the config file and seeds fully determine
all outputs, byte for byte, and output files are written atomically.
Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numeric
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np

from .core import DataError, TimeSeries, format_number, load_csv
from .decomposition import (
    EemdConfig,
    InsufficientExtremaError,
    SiftConfig,
    count_zero_crossings,
    eemd,
    emd_with_stats,
)
from .dtw import dtw_distance, warp_path
from .evaluation import benchmark
from .grouping import GroupingConfig, sliding_window_set
from .pipeline import FrameworkSpec, PipelineError, run_framework
from .predictors import (
    GRADIENT_TRAINED,
    PredictorConfig,
    TrainingDivergedError,
    gradient_check,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class ConfigError(ValueError):
    """Invalid configuration or command usage."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # map argparse usage errors onto exit code 1
        raise ConfigError(message)


# ---------------------------------------------------------------------------
# Atomic output helpers
# ---------------------------------------------------------------------------

def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: Path, payload) -> None:
    _write_atomic(path, json.dumps(payload, indent=2) + "\n")


# ---------------------------------------------------------------------------
# Config parsing (strict: unknown keys rejected)
# ---------------------------------------------------------------------------

def _check_keys(doc: dict, allowed, context: str) -> None:
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {context}: {', '.join(unknown)}")


def _parse_predictor(doc: dict) -> PredictorConfig:
    _check_keys(doc, ("kind", "hidden_units", "learning_rate", "epochs",
                      "grnn_sigma", "seed"), "predictor")
    return PredictorConfig(**doc)


def _parse_sift(doc: dict) -> SiftConfig:
    _check_keys(doc, ("sd_threshold", "max_sift_iterations", "max_imfs",
                      "boundary_mode"), "sift")
    return SiftConfig(**doc)


def _parse_eemd(doc: dict, sift: SiftConfig) -> EemdConfig:
    _check_keys(doc, ("ensemble_size", "noise_amplitude", "seed"), "eemd")
    return EemdConfig(sift=sift, **doc)


def _parse_grouping(doc: dict) -> GroupingConfig:
    _check_keys(doc, ("segment_length", "group_size", "dtw_weight", "znormalize",
                      "selection", "threshold_alpha"), "grouping")
    return GroupingConfig(**doc)


def parse_framework(doc: dict) -> FrameworkSpec:
    """Build a FrameworkSpec from its JSON form, rejecting unknown keys."""
    _check_keys(doc, ("variant", "predictor", "sift", "eemd", "split",
                      "grouping", "horizon"), "framework")
    sift = _parse_sift(doc.get("sift", {}))
    split = doc.get("split", "auto")
    if split != "auto":
        if not isinstance(split, (list, tuple)) or len(split) != 2:
            raise ConfigError('split must be "auto" or a [P, Q] pair')
        split = (int(split[0]), int(split[1]))
    return FrameworkSpec(
        variant=doc.get("variant", "EMD_DTW_NN"),
        predictor=_parse_predictor(doc.get("predictor", {})),
        sift=sift,
        eemd=_parse_eemd(doc.get("eemd", {}), sift),
        split=split,
        grouping=_parse_grouping(doc.get("grouping", {})),
        horizon=int(doc.get("horizon", 1)),
    )


def _parse_dataset(doc: dict) -> dict:
    _check_keys(doc, ("path", "column", "has_header"), "dataset")
    if "path" not in doc:
        raise ConfigError("dataset.path is required")
    return {
        "path": doc["path"],
        "column": doc.get("column", 1),
        "has_header": bool(doc.get("has_header", False)),
    }


def _load_config(path: str, allowed, context: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    _check_keys(doc, allowed, context)
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version must be {SCHEMA_VERSION}, got {version!r}"
        )
    return doc


def parse_predict_config(path: str) -> dict:
    doc = _load_config(path, ("schema_version", "dataset", "framework",
                              "output_dir", "seed"), "config")
    try:
        framework = parse_framework(doc.get("framework", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return {
        "dataset": _parse_dataset(doc.get("dataset", {})),
        "framework": framework,
        "output_dir": doc.get("output_dir", "."),
        "seed": doc.get("seed"),
    }


def parse_benchmark_config(path: str) -> dict:
    doc = _load_config(path, ("schema_version", "dataset", "frameworks", "labels",
                              "holdout", "runs", "seeds", "output_dir"), "config")
    frameworks_doc = doc.get("frameworks", [])
    if len(frameworks_doc) < 2:
        raise ConfigError("benchmark needs at least 2 framework specs")
    try:
        frameworks = [parse_framework(f) for f in frameworks_doc]
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if "holdout" not in doc:
        raise ConfigError("holdout is required")
    seeds = doc.get("seeds")
    if not seeds:
        raise ConfigError("a non-empty seed list is required")
    labels = doc.get("labels")
    if labels is not None and len(labels) != len(frameworks):
        raise ConfigError("labels must match the number of frameworks")
    return {
        "dataset": _parse_dataset(doc.get("dataset", {})),
        "frameworks": frameworks,
        "labels": labels,
        "holdout": int(doc["holdout"]),
        "runs": int(doc.get("runs", len(seeds))),
        "seeds": [int(s) for s in seeds],
        "output_dir": doc.get("output_dir", "."),
    }


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _fmt_distance(value: float) -> str:
    return str(int(value)) if value == int(value) else format_number(value)


def cmd_decompose(args) -> int:
    series = load_csv(args.input, column=args.column, has_header=args.has_header)
    sift = SiftConfig(
        sd_threshold=args.sd_threshold,
        max_sift_iterations=args.max_sift_iterations,
        max_imfs=args.max_imfs,
        boundary_mode=args.boundary_mode,
    )
    if args.method == "emd":
        decomp, stats = emd_with_stats(series, sift)
        sift_stats = [
            {"imf": i + 1, "iterations": s.iterations, "sd_at_stop": s.sd_at_stop,
             "converged": s.converged, "stop_reason": s.stop_reason}
            for i, s in enumerate(stats)
        ]
        method_info = {"method": "emd"}
    else:
        cfg = EemdConfig(sift=sift, ensemble_size=args.ensemble,
                         noise_amplitude=args.noise, seed=args.seed or 0)
        decomp = eemd(series, cfg, workers=args.threads)
        sift_stats = None  # per-trial statistics are not aggregated
        method_info = {"method": "eemd", "ensemble_size": args.ensemble,
                       "noise_amplitude": args.noise, "seed": args.seed or 0}

    out = Path(args.out)
    names = [f"imf_{i + 1}" for i in range(decomp.n_imfs)] + ["residual"]
    comps = decomp.components()
    lines = [",".join(names)]
    for t in range(decomp.source_length):
        lines.append(",".join(format_number(c.values[t]) for c in comps))
    _write_atomic(out / "components.csv", "\n".join(lines) + "\n")

    zero_crossings = [count_zero_crossings(c.values) for c in comps]
    _write_json(out / "decompose_stats.json", {
        **method_info,
        "n_imfs": decomp.n_imfs,
        "length": decomp.source_length,
        "zero_crossings": dict(zip(names, zero_crossings)),
        "sift_stats": sift_stats,
    })

    if decomp.n_imfs == 0:
        print("0 IMFs, residual only")
    else:
        print(f"{decomp.n_imfs} IMFs")
    for name, zc in zip(names, zero_crossings):
        print(f"  {name}: {zc} zero crossings")
    return EXIT_OK


def cmd_dtw(args) -> int:
    a = load_csv(args.series_a, column=args.column, has_header=args.has_header)
    b = load_csv(args.series_b, column=args.column, has_header=args.has_header)
    distance, matrix = dtw_distance(a.values, b.values, weight=args.weight)
    print(_fmt_distance(distance))
    if args.path:
        for i, j in warp_path(matrix):
            print(f"({i},{j})")
    return EXIT_OK


def cmd_predict(args) -> int:
    cfg = parse_predict_config(args.config)
    if args.horizon is not None:
        cfg["framework"] = replace(cfg["framework"], horizon=args.horizon)
    seed = args.seed if args.seed is not None else cfg["seed"]
    series = load_csv(**cfg["dataset"])

    group_trace = {} if args.dump_groups else None
    result = run_framework(series, cfg["framework"], seed=seed,
                           workers=args.threads, group_trace=group_trace)

    out = Path(args.out if args.out != "." else cfg["output_dir"])
    _write_json(out / "forecast.json", result.to_dict())
    lines = [
        f"{step + 1},{format_number(v)}"
        for step, v in enumerate(result.combined)
    ]
    _write_atomic(out / "forecast.csv", "\n".join(lines) + "\n")
    if group_trace is not None:
        _write_json(out / "groups.json", group_trace)

    print(f"{cfg['framework'].variant}: {len(result.combined)} steps -> {out / 'forecast.csv'}")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    cfg = parse_benchmark_config(args.config)
    runs = args.runs if args.runs is not None else cfg["runs"]
    seeds = cfg["seeds"][:runs]
    if len(seeds) != runs:
        raise ConfigError(f"config provides {len(cfg['seeds'])} seeds, need {runs}")
    series = load_csv(**cfg["dataset"])
    reports = benchmark(series, cfg["holdout"], cfg["frameworks"], runs, seeds,
                        labels=cfg["labels"], workers=args.threads)

    out = Path(args.out if args.out != "." else cfg["output_dir"])
    horizon = len(reports[0].per_point)
    header = (
        ["framework"]
        + [f"pred_mean_{i + 1}" for i in range(horizon)]
        + [f"pred_std_{i + 1}" for i in range(horizon)]
        + ["mean_re", "std_re"]
    )
    lines = [",".join(header)]
    for rep in reports:
        row = [rep.label]
        row += [format_number(p) for _, p, _ in rep.per_point]
        row += [format_number(s) for s in rep.per_point_std]
        row += [format_number(rep.re_mean_over_runs), format_number(rep.re_std_over_runs)]
        lines.append(",".join(row))
    _write_atomic(out / "benchmark.csv", "\n".join(lines) + "\n")
    _write_json(out / "benchmark_runs.json", {
        "runs": runs,
        "seeds": list(seeds),
        "holdout": cfg["holdout"],
        "reports": [rep.to_dict() for rep in reports],
    })

    print(f"{'rank':<5}{'framework':<20}{'mean RE':>10}{'std RE':>10}")
    ranked = sorted(reports, key=lambda r: r.re_mean_over_runs)
    for rank, rep in enumerate(ranked, start=1):
        print(f"{rank:<5}{rep.label:<20}{rep.re_mean_over_runs:>10.4f}"
              f"{rep.re_std_over_runs:>10.4f}")
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    kinds = [k.strip().upper() for k in args.kinds.split(",")]
    for kind in kinds:
        if kind not in GRADIENT_TRAINED:
            raise ConfigError(
                f"gradcheck supports {', '.join(GRADIENT_TRAINED)}; got {kind}"
            )
    worst = 0.0
    root = args.seed if args.seed is not None else 0
    for kind in kinds:
        errors = []
        for trial in range(args.trials):
            rng = np.random.default_rng(
                np.random.SeedSequence(root, spawn_key=(trial,)))
            values = rng.normal(size=args.pairs + args.window)
            ts = sliding_window_set(TimeSeries(values), args.window)
            cfg = PredictorConfig(kind=kind, hidden_units=args.hidden,
                                  seed=int(rng.integers(2**63)))
            errors.append(gradient_check(cfg, ts))
        kind_worst = max(errors)
        worst = max(worst, kind_worst)
        print(f"{kind}: max relative error {kind_worst:.3e} over {args.trials} trials")
    if worst >= args.tolerance:
        print(f"FAIL: worst error {worst:.3e} >= tolerance {args.tolerance:g}")
        return EXIT_NUMERIC
    print(f"OK: all gradients within {args.tolerance:g}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser wiring
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modecast",
                     description="Decomposition-driven time-series forecasting")
    parser.add_argument("--seed", type=int, default=None,
                        help="root seed override")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for ensemble trials")
    parser.add_argument("--out", default=".", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="decompose a series into IMFs + residual")
    p.add_argument("input", help="input CSV file")
    p.add_argument("--column", type=_column_arg, default=1,
                   help="value column (1-based number or header name)")
    p.add_argument("--has-header", action="store_true")
    p.add_argument("--method", choices=("emd", "eemd"), default="emd")
    p.add_argument("--sd-threshold", type=float, default=0.2)
    p.add_argument("--max-sift-iterations", type=int, default=100)
    p.add_argument("--max-imfs", type=int, default=12)
    p.add_argument("--boundary-mode", choices=("mirror", "clamp"), default="mirror")
    p.add_argument("--ensemble", type=int, default=100, help="EEMD trial count")
    p.add_argument("--noise", type=float, default=0.2,
                   help="EEMD noise amplitude as a fraction of the input std")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("dtw", help="DTW distance between two series")
    p.add_argument("series_a")
    p.add_argument("series_b")
    p.add_argument("--column", type=_column_arg, default=1)
    p.add_argument("--has-header", action="store_true")
    p.add_argument("--weight", type=float, default=1.0)
    p.add_argument("--path", action="store_true", help="also print the warping path")
    p.set_defaults(func=cmd_dtw)

    p = sub.add_parser("predict", help="forecast beyond a series with one framework")
    p.add_argument("config", help="JSON run configuration")
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--dump-groups", action="store_true",
                   help="emit per-step similarity-group provenance JSON")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("benchmark", help="compare frameworks on a holdout window")
    p.add_argument("config", help="JSON benchmark configuration")
    p.add_argument("--runs", type=int, default=None)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("gradcheck", help="verify analytic gradients against "
                                         "finite differences")
    p.add_argument("--kinds", default="BPNN,WNN,ENN")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--pairs", type=int, default=6)
    p.add_argument("--window", type=int, default=4)
    p.add_argument("--hidden", type=int, default=3)
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.set_defaults(func=cmd_gradcheck)
    return parser


def _column_arg(text: str):
    try:
        return int(text)
    except ValueError:
        return text


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (PipelineError, TrainingDivergedError, InsufficientExtremaError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
