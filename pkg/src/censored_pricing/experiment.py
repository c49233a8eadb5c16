"""Replica fan-out, persistence, horizon sweeps and the log-log scaling fit."""
from __future__ import annotations

import csv
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np
from scipy import stats

from .config import ExperimentConfig
from .market import InvalidInstanceError
from .policies import EstimationFailure
from .simulate import RunSummary, failed_summary, run_replica

CURVE_POINTS = 200
MIN_SWEEP_HORIZON = 2500


@dataclass
class ReplicaResult:
    summary: RunSummary
    trace_csv: str | None
    curve: list  # (t, regret_cum) checkpoints


@dataclass
class RunResult:
    config: ExperimentConfig
    summaries: list  # sorted by seed
    out_dir: Path | None

    @property
    def failed(self) -> int:
        return sum(s.failed for s in self.summaries)

    @property
    def failed_fraction(self) -> float:
        return self.failed / len(self.summaries)

    @property
    def threshold_exceeded(self) -> bool:
        return self.failed_fraction > self.config.max_failed_fraction

    def final_regrets(self) -> np.ndarray:
        return np.array([s.final_regret for s in self.summaries if not s.failed])

    def mean_regret(self) -> float:
        r = self.final_regrets()
        return float(r.mean()) if r.size else math.nan


def _checkpoints(T: int, n: int = CURVE_POINTS) -> np.ndarray:
    return np.unique(np.geomspace(1, T, n).round().astype(np.int64))


def run_one(config: ExperimentConfig, seed: int, keep_trace: bool = False) -> ReplicaResult:
    """One seeded replica; an estimation breakdown becomes a failed summary."""
    policy = config.build_policy(seed)
    try:
        summary, trace = run_replica(config.instance, policy, config.T, seed, keep_trace=True)
    except EstimationFailure as exc:
        summary = failed_summary(seed, policy.name, config.T, exc)
        summary.stage1_rounds = int(getattr(policy, "stage1_rounds", 0))
        return ReplicaResult(summary, None, [])
    ts = _checkpoints(config.T)
    curve = [(int(t), float(trace.regret_cum[t - 1])) for t in ts]
    return ReplicaResult(summary, trace.to_csv() if keep_trace else None, curve)


def _run_one_star(args):
    return run_one(*args)


def _replicas(config: ExperimentConfig, keep_trace: bool) -> list:
    jobs = [(config, s, keep_trace) for s in config.seeds]
    if config.workers == 1 or len(jobs) == 1:
        results = [run_one(*job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_run_one_star, jobs))
    return sorted(results, key=lambda r: r.summary.seed)


def run(config: ExperimentConfig, out: Path | str | None = None, per_round: bool | None = None) -> RunResult:
    """Run every seed of ``config``; writes outputs when ``out`` (or ``config.out``) is set.

    Raises ``InvalidInstanceError`` if the instance fails validation.
    """
    report = config.validation()
    if not report.ok:
        raise InvalidInstanceError(report)
    per_round = config.trace == "per-round" if per_round is None else per_round
    results = _replicas(config, per_round)
    out = out if out is not None else config.out
    out_dir = None
    if out is not None:
        out_dir = Path(out)
        _write_run(out_dir, config, results, per_round)
    return RunResult(config, [r.summary for r in results], out_dir)


SUMMARY_COLUMNS = tuple(f.name for f in fields(RunSummary))


def _write_run(out_dir: Path, config: ExperimentConfig, results: list, per_round: bool) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "summary.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, SUMMARY_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in results:
            w.writerow(r.summary.row())
    with open(out_dir / "regret_curves.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("seed", "t", "regret_cum"))
        for r in results:
            for t, reg in r.curve:
                w.writerow((r.summary.seed, t, repr(reg)))
    if per_round:
        trace_dir = out_dir / "traces"
        trace_dir.mkdir(exist_ok=True)
        for r in results:
            if r.trace_csv is not None:
                (trace_dir / f"seed_{r.summary.seed}.csv").write_text(r.trace_csv)
    meta = {"policy": asdict(config.policy), "T": config.T, "seeds": list(config.seeds),
            "config": config.source}
    (out_dir / "run.json").write_text(json.dumps(meta, indent=1, sort_keys=True, default=str))


def read_summaries(path) -> list:
    """Load ``summary.csv`` written by :func:`run`."""
    kinds = {f.name: f.type for f in fields(RunSummary)}
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            vals = {}
            for k, v in row.items():
                t = kinds[k]
                if t == "int":
                    vals[k] = int(v)
                elif t == "float":
                    vals[k] = float(v)
                elif t == "bool":
                    vals[k] = v == "True"
                else:
                    vals[k] = v
            out.append(RunSummary(**vals))
    return out


@dataclass(frozen=True)
class ScalingRow:
    T: int
    n: int
    failed: int
    mean: float
    stderr: float


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r2: float
    n_points: int


def scaling_row(T: int, regrets) -> ScalingRow:
    r = np.asarray(regrets, dtype=float)
    ok = r[np.isfinite(r)]
    se = float(ok.std(ddof=1) / math.sqrt(ok.size)) if ok.size > 1 else math.nan
    mean = float(ok.mean()) if ok.size else math.nan
    return ScalingRow(int(T), int(ok.size), int(r.size - ok.size), mean, se)


def sweep_horizons(config: ExperimentConfig, horizons, out: Path | str | None = None) -> list:
    """Run ``config`` at each horizon; one :class:`ScalingRow` per horizon."""
    horizons = [int(h) for h in horizons]
    if len(horizons) < 3:
        raise ValueError("a sweep needs at least 3 horizons")
    if min(horizons) < MIN_SWEEP_HORIZON:
        raise ValueError(f"sweep horizons must be >= {MIN_SWEEP_HORIZON}")
    out = Path(out) if out is not None else None
    rows = []
    for T in sorted(horizons):
        res = run(config.with_horizon(T), out=None if out is None else out / f"T{T}", per_round=False)
        regrets = [s.final_regret if not s.failed else math.nan for s in res.summaries]
        rows.append(scaling_row(T, regrets))
    if out is not None:
        write_scaling_table(out / "sweep.csv", rows)
    return rows


def write_scaling_table(path, rows) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("T", "n", "failed", "mean_regret", "stderr"))
        for r in rows:
            w.writerow((r.T, r.n, r.failed, repr(r.mean), repr(r.stderr)))


def read_scaling_table(path) -> list:
    with open(path, newline="") as fh:
        return [ScalingRow(int(r["T"]), int(r["n"]), int(r["failed"]), float(r["mean_regret"]),
                           float(r["stderr"])) for r in csv.DictReader(fh)]


def fit_scaling_slope(table) -> ScalingFit:
    """OLS of ``log mean_regret`` on ``log T``.

    ``table`` holds :class:`ScalingRow` items or ``(T, mean)`` pairs.  Points
    with non-positive or missing regret are dropped with a warning.
    """
    pts = [(r.T, r.mean) if isinstance(r, ScalingRow) else (r[0], r[1]) for r in table]
    kept = []
    for T, m in pts:
        if not (np.isfinite(m) and m > 0):
            warnings.warn(f"dropping T={T}: mean regret {m} is not positive", RuntimeWarning, stacklevel=2)
        else:
            kept.append((T, m))
    if len(kept) < 2:
        raise ValueError("need at least two positive points to fit a slope")
    x = np.log([T for T, _ in kept])
    y = np.log([m for _, m in kept])
    fit = stats.linregress(x, y)
    return ScalingFit(float(fit.slope), float(fit.intercept), float(fit.rvalue**2), len(kept))
