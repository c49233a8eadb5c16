"""Command line: ``validate``, ``run``, ``sweep`` and ``report``.

Exit codes: 0 ok, 2 invalid config or instance, 3 too many failed replicas.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, load_config, parse_seeds
from .experiment import (fit_scaling_slope, read_scaling_table, read_summaries, run, scaling_row,
                         sweep_horizons, write_scaling_table)
from .market import InvalidInstanceError

OUT_ENV = "CENSORED_PRICING_OUT"
EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 2, 3
MIN_GRID_M = 4


def _out_dir(args, config, default_name: str) -> Path:
    if args.out:
        return Path(args.out)
    if config.out:
        return Path(config.out)
    return Path(os.environ.get(OUT_ENV, "runs")) / default_name


def _load(args):
    config = load_config(args.config)
    if getattr(args, "seeds", None):
        config = config.with_seeds(parse_seeds(args.seeds))
    if getattr(args, "workers", None):
        config = replace(config, workers=args.workers)
    return config


def cmd_validate(args) -> int:
    config = _load(args)
    if args.T:
        config = config.with_horizon(args.T)
    report = config.validation()
    print(f"instance: {'pass' if report.ok else 'FAIL'}")
    print(report.format())
    print(f"gamma_0 = {config.instance.gamma0!r}")
    try:
        sched = config.schedule()
    except ValueError as exc:
        print(f"schedule: unavailable ({exc})")
        return EXIT_INVALID
    print(f"schedule for T={config.T}:")
    for key in ("tau", "Delta", "M", "C_a", "C_b", "C_N", "C_tau", "eta", "delta", "L_F", "scale", "scale_n"):
        print(f"  {key} = {getattr(sched, key)!r}")
    if sched.M < MIN_GRID_M:
        what = "stage 2 degenerates to the plug-in price" if sched.M == 0 else f"only {2 * sched.M + 1} grid prices"
        print(f"warning: M={sched.M} < {MIN_GRID_M}: grid too coarse for T={config.T} ({what})")
    return EXIT_OK if report.ok else EXIT_INVALID


def _print_summaries(summaries) -> None:
    print("seed  final_regret  a_err  b_err  clamps  coverage  failed")
    for s in summaries:
        print(f"{s.seed:4d}  {s.final_regret:12.3f}  {s.a_error:.4f}  {s.b_error:.4f}  {s.clamp_events:6d}"
              f"  {s.coverage:8.4f}  {'yes: ' + s.error if s.failed else 'no'}")
    row = scaling_row(summaries[0].horizon, [math.nan if s.failed else s.final_regret for s in summaries])
    print(f"T={row.T}: mean regret {row.mean:.3f} +/- {row.stderr:.3f} over {row.n} seeds ({row.failed} failed)")


def cmd_run(args) -> int:
    config = _load(args)
    out = _out_dir(args, config, Path(args.config).stem)
    result = run(config, out=out, per_round=True if args.per_round else None)
    _print_summaries(result.summaries)
    print(f"wrote {out}")
    if result.threshold_exceeded:
        print(f"error: {result.failed} of {len(result.summaries)} replicas failed "
              f"(limit {config.max_failed_fraction:.0%})", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def _print_fit(rows) -> None:
    print("T  n  failed  mean_regret  stderr")
    for r in rows:
        print(f"{r.T}  {r.n}  {r.failed}  {r.mean:.3f}  {r.stderr:.3f}")
    if len(rows) >= 2:
        fit = fit_scaling_slope(rows)
        print(f"log-log fit: slope={fit.slope:.4f} intercept={fit.intercept:.4f} r2={fit.r2:.4f}")


def cmd_sweep(args) -> int:
    config = _load(args)
    horizons = [int(h) for h in args.horizons.split(",") if h.strip()]
    out = _out_dir(args, config, Path(args.config).stem + "-sweep")
    rows = sweep_horizons(config, horizons, out=out)
    _print_fit(rows)
    print(f"wrote {out}")
    failed = sum(r.failed for r in rows)
    total = failed + sum(r.n for r in rows)
    if failed / total > config.max_failed_fraction:
        print(f"error: {failed} of {total} replicas failed", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def cmd_report(args) -> int:
    d = Path(args.input)
    if (d / "sweep.csv").exists():
        _print_fit(read_scaling_table(d / "sweep.csv"))
        return EXIT_OK
    if (d / "summary.csv").exists():
        _print_summaries(read_summaries(d / "summary.csv"))
        return EXIT_OK
    subdirs = sorted(p for p in d.iterdir() if (p / "summary.csv").exists()) if d.is_dir() else []
    if not subdirs:
        print(f"error: no sweep.csv or summary.csv under {d}", file=sys.stderr)
        return EXIT_INVALID
    rows = []
    for p in subdirs:
        s = read_summaries(p / "summary.csv")
        rows.append(scaling_row(s[0].horizon, [math.nan if x.failed else x.final_regret for x in s]))
    rows.sort(key=lambda r: r.T)
    write_scaling_table(d / "sweep.csv", rows)
    _print_fit(rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="censored-pricing", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the instance assumptions and print the constant schedule")
    p.add_argument("--config", required=True)
    p.add_argument("--T", type=int, help="override run.T")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="run every seed and write summaries and traces")
    p.add_argument("--config", required=True)
    p.add_argument("--seeds", help="inclusive range a..b or comma list")
    p.add_argument("--out", help=f"output directory (default: run.out, then ${OUT_ENV}/<config>)")
    p.add_argument("--per-round", action="store_true", help="write one CSV row per round per seed")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run the config at several horizons and fit the log-log slope")
    p.add_argument("--config", required=True)
    p.add_argument("--horizons", required=True, help="comma list, e.g. 2500,10000,40000")
    p.add_argument("--seeds")
    p.add_argument("--out")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="print the scaling table and fit for an output directory")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return args.func(args)
    except (ConfigError, InvalidInstanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
