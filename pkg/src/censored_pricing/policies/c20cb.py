"""Closest-to-zero confidence bound (C20CB) pricing.

Stage 1 posts uniform prices for ``tau`` rounds and recovers the demand line from
quarter-point exceedance indicators.  Stage 2 keeps running estimates of the noise
CDF ``F`` and its integral ``G`` on a grid of ``2M + 1`` offsets ``w_k = 2 k Delta``
and, each round, posts the grid price whose revenue-derivative error bar contains
zero (largest such price), or else comes closest to zero.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..market import ContractViolation, KnownBounds, Observation, substream
from .base import EstimationFailure, Policy, PolicyDecision, clamp_price
from .schedule import ConstantSchedule

SNAPSHOT_VERSION = 1


@dataclass
class Stage1Accumulators:
    sum_q: float = 0.0  # running sum of (e1 - e2) / (gamma - gamma0)
    sum_e3: float = 0.0
    sum_level: float = 0.0  # running sum of (3 gamma + gamma0) / 4
    count: int = 0

    def add(self, obs: Observation, gamma0: float) -> None:
        e1, e2, e3 = obs.e
        self.sum_q += (e1 - e2) / (obs.gamma - gamma0)
        self.sum_e3 += e3
        self.sum_level += (3 * obs.gamma + gamma0) / 4
        self.count += 1


def finish_stage1(acc: Stage1Accumulators, bounds: KnownBounds) -> tuple[float, float]:
    """Moment estimates ``(b_hat, a_hat)`` from the exploration rounds, clipped to the known box."""
    if acc.count == 0 or acc.sum_q <= 0:
        raise EstimationFailure(f"slope statistic is zero after {acc.count} exploration rounds")
    n = acc.count
    b_hat = 1.0 / (4 * bounds.p_max * acc.sum_q / n)
    b_hat = min(max(b_hat, bounds.b_min), bounds.b_max)
    a_hat = b_hat * bounds.p_max * acc.sum_e3 / n + acc.sum_level / n
    a_hat = min(max(a_hat, 1e-12), bounds.a_max)
    return b_hat, a_hat


@dataclass
class GridState:
    M: int
    Delta: float
    a_hat: float
    b_hat: float
    c: float
    F: np.ndarray = field(default=None)
    G: np.ndarray = field(default=None)
    N: np.ndarray = field(default=None)
    bars: np.ndarray = field(default=None)

    def __post_init__(self):
        size = 2 * self.M + 1
        if self.F is None:
            self.F = np.zeros(size)
            self.G = np.zeros(size)
            self.N = np.zeros(size, dtype=np.int64)
            self.bars = np.full(size, np.inf)

    @property
    def ks(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)

    def offset(self, k: int) -> float:
        return 2 * k * self.Delta

    def raw_price(self, k, gamma: float):
        """Price putting ``gamma - a_hat + b_hat p`` at the bin centre ``w_k``."""
        return (2 * np.asarray(k) * self.Delta - (gamma - self.a_hat)) / self.b_hat

    def to_dict(self) -> dict:
        return {
            "M": self.M, "Delta": self.Delta, "a_hat": self.a_hat, "b_hat": self.b_hat, "c": self.c,
            "bins": [
                {"k": int(k), "F_k": float(f), "G_k": float(g), "N_k": int(n), "Delta_k": float(d)}
                for k, f, g, n, d in zip(self.ks, self.F, self.G, self.N, self.bars)
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GridState":
        bins = sorted(d["bins"], key=lambda b: b["k"])
        return cls(int(d["M"]), float(d["Delta"]), float(d["a_hat"]), float(d["b_hat"]), float(d["c"]),
                   np.array([b["F_k"] for b in bins], dtype=float),
                   np.array([b["G_k"] for b in bins], dtype=float),
                   np.array([b["N_k"] for b in bins], dtype=np.int64),
                   np.array([b["Delta_k"] for b in bins], dtype=float))


def derivative_estimates(state: GridState, gamma: float, c: float, base: float | None = None):
    """Estimated ``r'`` at every grid price, in bin order ``k = -M..M``.

    ``base`` replaces ``gamma`` in the leading ``gamma - c`` term when given.
    """
    prices = state.raw_price(state.ks, gamma)
    lead = gamma if base is None else base
    return lead - c + state.G - state.b_hat * prices * state.F, prices


def grid_init_step(state: GridState, k: int, gamma: float, p_max: float) -> PolicyDecision:
    price, clamped = clamp_price(float(state.raw_price(k, gamma)), p_max)
    return PolicyDecision(price, k, True, "grid-init", clamped)


def opt_price(state: GridState, gamma: float, c: float, p_max: float, base: float | None = None) -> PolicyDecision:
    """Closest-to-zero selection over the grid, scanning ``k = M`` down to ``-M``."""
    r_hat, prices = derivative_estimates(state, gamma, c, base)
    # scan order: largest k first
    r_hat, prices, bars = r_hat[::-1], prices[::-1], state.bars[::-1]
    ks = state.ks[::-1]
    lower, upper = r_hat - bars, r_hat + bars
    contains = (lower <= 0) & (upper >= 0)
    if contains.any():
        i, case = int(np.argmax(contains)), "bar-contains-zero"
    elif (upper < 0).any():
        rho = np.minimum(np.abs(lower), np.abs(upper))
        i, case = int(np.argmin(rho)), "closest-to-zero"  # argmin keeps the first (larger k) on ties
    else:
        price, clamped = clamp_price(state.a_hat / (2 * state.b_hat), p_max)
        return PolicyDecision(price, None, False, "all-above-zero", clamped)
    price, clamped = clamp_price(float(prices[i]), p_max)
    return PolicyDecision(price, int(ks[i]), True, case, clamped, float(r_hat[i]), float(bars[i]))


def record_feedback(state: GridState, k: int | None, d_observed: float, indicator: int, gamma: float,
                    schedule: ConstantSchedule) -> GridState:
    if k is None:
        raise ContractViolation("cannot record feedback without a bin")
    j = k + state.M
    n = state.N[j]
    state.F[j] = (n * state.F[j] + indicator) / (n + 1)
    state.G[j] = (n * state.G[j] + d_observed - gamma + state.c) / (n + 1)
    state.bars[j] = schedule.bar(n + 1)
    state.N[j] = n + 1
    return state


class C20CB(Policy):
    """C20CB over a horizon of ``horizon`` rounds.

    Only the known bounds are used; ``seed`` drives the exploration prices.
    ``gamma0_variant`` puts ``gamma_0`` instead of ``gamma_t`` in the leading term
    of the derivative estimate.
    """

    name = "c20cb"

    def __init__(self, bounds: KnownBounds, horizon: int, seed: int = 0, *, delta: float = 0.05,
                 eta: float | None = None, L_F: float | None = None, scale: float = 1.0,
                 scale_n: float = 1.0, cb_variant: str = "appendix", gamma0_variant: bool = False):
        super().__init__()
        self.bounds = bounds
        self.schedule = ConstantSchedule.build(bounds, horizon, delta=delta, eta=eta, L_F=L_F,
                                               scale=scale, scale_n=scale_n, cb_variant=cb_variant)
        self.gamma0_variant = gamma0_variant
        self.rng = substream(seed, "stage1")
        self.acc = Stage1Accumulators()
        self.grid: GridState | None = None
        self.stage = "stage1"
        self._init_k = 0

    @property
    def tau(self) -> int:
        return self.schedule.tau

    def _act(self, gamma):
        b, sched = self.bounds, self.schedule
        if self.stage == "stage1":
            return PolicyDecision(float(self.rng.uniform(0.0, b.p_max)), None, False, "stage1")
        grid = self.grid
        if self.stage == "grid-init":
            return grid_init_step(grid, self._init_k, gamma, b.p_max)
        if gamma >= (grid.a_hat + sched.a_radius) / 2 + b.c:
            price, clamped = clamp_price(grid.a_hat / (2 * grid.b_hat), b.p_max)
            return PolicyDecision(price, None, False, "skip-large-gamma", clamped)
        base = b.gamma0 if self.gamma0_variant else None
        return opt_price(grid, gamma, b.c, b.p_max, base)

    def _observe(self, decision, obs):
        b, sched = self.bounds, self.schedule
        if self.stage == "stage1":
            self.acc.add(obs, b.gamma0)
            if self.acc.count >= sched.tau and self.acc.sum_q > 0:
                self._start_stage2()
            elif self.acc.count >= 2 * sched.tau:
                raise EstimationFailure(
                    f"no e1 > e2 event in {self.acc.count} exploration rounds (tau={sched.tau})"
                )
            return
        if not decision.record_feedback:
            return
        grid = self.grid
        record_feedback(grid, decision.bin, obs.d_observed, obs.indicator, obs.gamma, sched)
        if self.stage == "grid-init":
            self._init_k += 1
            if self._init_k > grid.M:
                self.stage = "main"

    def _start_stage2(self):
        b_hat, a_hat = finish_stage1(self.acc, self.bounds)
        self.grid = GridState(self.schedule.M, self.schedule.Delta, a_hat, b_hat, self.bounds.c)
        self._init_k = -self.schedule.M
        self.stage = "grid-init"

    @property
    def stage1_rounds(self) -> int:
        return self.acc.count

    def snapshot(self) -> str:
        """Versioned JSON snapshot of the learned state."""
        return json.dumps({
            "format_version": SNAPSHOT_VERSION,
            "policy": self.name,
            "t": self.t,
            "stage": self.stage,
            "schedule": self.schedule.to_dict(),
            "stage1": {"sum_q": self.acc.sum_q, "sum_e3": self.acc.sum_e3,
                       "sum_level": self.acc.sum_level, "count": self.acc.count},
            "grid": None if self.grid is None else self.grid.to_dict(),
        }, indent=1, sort_keys=True)


def load_snapshot(text: str) -> dict:
    data = json.loads(text)
    if data.get("format_version") != SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version {data.get('format_version')!r}")
    if data["grid"] is not None:
        data["grid"] = GridState.from_dict(data["grid"])
    return data


def expected_slope_statistic(b: float, p_max: float) -> float:
    """Mean of ``(e1 - e2) / (gamma - gamma0)`` under uniform exploration prices."""
    return 1.0 / (4 * b * p_max)


__all__ = [
    "C20CB", "GridState", "Stage1Accumulators", "finish_stage1", "grid_init_step", "opt_price",
    "record_feedback", "derivative_estimates", "load_snapshot", "expected_slope_statistic",
]
