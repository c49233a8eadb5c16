"""Single-replica driver: one market, one policy, one regret ledger."""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass

import numpy as np

from .market import Market, ProblemInstance
from .oracle import expected_derivative, expected_revenue, optimal_prices
from .policies import EstimationFailure, Policy

TRACE_COLUMNS = ("t", "stage", "gamma", "price", "bin", "d_potential", "d_observed", "indicator",
                 "reward", "opt_price", "opt_reward", "regret_inst", "regret_cum")

COVERAGE_CASES = ("bar-contains-zero", "closest-to-zero")


@dataclass
class Trace:
    gamma: np.ndarray
    price: np.ndarray
    bin: np.ndarray  # -1 when no bin; never a valid index outside C20CB/UCB
    has_bin: np.ndarray
    stage: list
    d_potential: np.ndarray
    d_observed: np.ndarray
    indicator: np.ndarray
    reward: np.ndarray
    opt_price: np.ndarray
    opt_reward: np.ndarray
    regret_inst: np.ndarray
    regret_cum: np.ndarray
    clamped: np.ndarray
    r_hat: np.ndarray
    bar: np.ndarray

    def __len__(self):
        return len(self.price)

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for i in range(len(self)):
            w.writerow((
                i + 1, self.stage[i], repr(float(self.gamma[i])), repr(float(self.price[i])),
                int(self.bin[i]) if self.has_bin[i] else "",
                repr(float(self.d_potential[i])), repr(float(self.d_observed[i])), int(self.indicator[i]),
                repr(float(self.reward[i])), repr(float(self.opt_price[i])), repr(float(self.opt_reward[i])),
                repr(float(self.regret_inst[i])), repr(float(self.regret_cum[i])),
            ))

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


@dataclass
class RunSummary:
    seed: int
    policy: str
    horizon: int
    final_regret: float
    a_error: float
    b_error: float
    clamp_events: int
    coverage: float
    coverage_rounds: int
    stage1_rounds: int
    wall_time: float
    failed: bool = False
    error: str = ""

    def row(self) -> dict:
        return dict(self.__dict__)


def run_replica(instance: ProblemInstance, policy: Policy, horizon: int, seed: int,
                keep_trace: bool = True) -> tuple[RunSummary, Trace | None]:
    """Play ``horizon`` rounds; raises ``EstimationFailure`` if stage-1 estimation breaks down."""
    start = time.perf_counter()
    market = Market(instance, horizon, seed)
    T = market.horizon
    price = np.empty(T)
    bins = np.full(T, -1, dtype=np.int64)
    has_bin = np.zeros(T, dtype=bool)
    recorded = np.zeros(T, dtype=bool)
    clamped = np.zeros(T, dtype=bool)
    r_hat = np.full(T, np.nan)
    bar = np.full(T, np.nan)
    stage = [""] * T
    d_obs = np.empty(T)
    d_pot = np.empty(T)
    indicator = np.empty(T, dtype=np.int64)
    for t in range(1, T + 1):
        i = t - 1
        gamma = market.inventory(t)
        dec = policy.act(t, gamma)
        out = market.step(t, dec.price)
        policy.observe(out.observation())
        price[i] = dec.price
        stage[i] = dec.case
        if dec.bin is not None:
            bins[i] = dec.bin
            has_bin[i] = True
        recorded[i] = dec.record_feedback
        clamped[i] = dec.clamped
        r_hat[i] = dec.r_hat
        bar[i] = dec.bar
        d_obs[i] = out.d_observed
        d_pot[i] = out.d_potential
        indicator[i] = out.indicator

    gamma = np.asarray(market.gamma)
    p_star, r_star = optimal_prices(instance, gamma)
    r_played = expected_revenue(instance, gamma, price)
    regret = r_star - r_played
    cum = np.cumsum(regret)

    stage_arr = np.array(stage)
    cov_mask = np.isin(stage_arr, COVERAGE_CASES) & recorded & ~clamped
    n_cov = int(cov_mask.sum())
    if n_cov:
        true_d = expected_derivative(instance, gamma[cov_mask], price[cov_mask])
        coverage = float(np.mean(np.abs(true_d - r_hat[cov_mask]) <= bar[cov_mask]))
    else:
        coverage = math.nan

    a_err = b_err = math.nan
    grid = getattr(policy, "grid", None)
    if grid is not None:
        a_err, b_err = abs(grid.a_hat - instance.a), abs(grid.b_hat - instance.b)
    elif hasattr(policy, "a_hat") and not math.isnan(policy.a_hat):
        a_err, b_err = abs(policy.a_hat - instance.a), abs(policy.b_hat - instance.b)

    summary = RunSummary(
        seed=seed, policy=policy.name, horizon=T, final_regret=float(cum[-1]),
        a_error=a_err, b_error=b_err, clamp_events=int(clamped.sum()), coverage=coverage,
        coverage_rounds=n_cov, stage1_rounds=int(getattr(policy, "stage1_rounds", 0)),
        wall_time=time.perf_counter() - start,
    )
    trace = None
    if keep_trace:
        trace = Trace(gamma, price, bins, has_bin, stage, d_pot, d_obs, indicator, price * d_obs,
                      p_star, r_star, regret, cum, clamped, r_hat, bar)
    return summary, trace


def failed_summary(seed: int, policy: str, horizon: int, exc: EstimationFailure) -> RunSummary:
    nan = math.nan
    return RunSummary(seed, policy, horizon, nan, nan, nan, 0, nan, 0, 0, 0.0, True, str(exc))
