"""Full-information benchmark: expected revenue, its derivative, the per-round
optimal price and the regret ledger.

Nothing here is visible to a pricing policy; the harness is the only consumer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .market import ContractViolation, ProblemInstance

BISECTION_MAX_ITER = 80
DEFAULT_TOL = 1e-9


def _revenue(inst: ProblemInstance, gamma, p):
    x = gamma - inst.a + inst.b * p
    g = inst.noise.int_cdf
    return p * (gamma - inst.c + g(inst.c) - g(x))


def _derivative(inst: ProblemInstance, gamma, p):
    x = gamma - inst.a + inst.b * p
    g = inst.noise.int_cdf
    return gamma - inst.c + g(inst.c) - g(x) - inst.b * p * inst.noise.cdf(x)


@dataclass(frozen=True)
class OptimalPrice:
    p_star: float
    r_star: float
    boundary: bool  # True when the price cap binds


@dataclass(frozen=True)
class RevenueCurve:
    """Expected revenue ``r(p) = p * E[min(gamma, a - b p + N)]`` for one round."""

    instance: ProblemInstance
    gamma: float

    def _check(self, p):
        arr = np.asarray(p, dtype=float)
        if np.any(arr < 0) or np.any(arr > self.instance.p_max):
            raise ContractViolation(f"price outside [0, {self.instance.p_max}]")
        return arr

    def revenue(self, p):
        return _revenue(self.instance, self.gamma, self._check(p))

    def derivative(self, p):
        return _derivative(self.instance, self.gamma, self._check(p))

    def optimal_price(self, tol: float = DEFAULT_TOL) -> OptimalPrice:
        if not tol > 0:
            raise ContractViolation("tol must be positive")
        inst = self.instance
        hi = min(inst.p_max, inst.a / inst.b)
        lo = 0.0
        if _derivative(inst, self.gamma, hi) > 0:
            return OptimalPrice(hi, float(_revenue(inst, self.gamma, hi)), hi == inst.p_max)
        if _derivative(inst, self.gamma, lo) <= 0:
            return OptimalPrice(lo, 0.0, False)
        # r' is non-increasing, so the sign change is bracketed by [lo, hi]
        for _ in range(BISECTION_MAX_ITER):
            if hi - lo <= tol:
                break
            mid = 0.5 * (lo + hi)
            if _derivative(inst, self.gamma, mid) > 0:
                lo = mid
            else:
                hi = mid
        p = 0.5 * (lo + hi)
        return OptimalPrice(p, float(_revenue(inst, self.gamma, p)), False)


def revenue(curve: RevenueCurve, p):
    return curve.revenue(p)


def revenue_derivative(curve: RevenueCurve, p):
    return curve.derivative(p)


def optimal_price(curve: RevenueCurve, tol: float = DEFAULT_TOL) -> OptimalPrice:
    return curve.optimal_price(tol)


def optimal_prices(instance: ProblemInstance, gammas, tol: float = DEFAULT_TOL):
    """Vectorised ``optimal_price`` over an inventory sequence.

    Returns ``(p_star, r_star)`` arrays.
    """
    gammas = np.asarray(gammas, dtype=float)
    cap = min(instance.p_max, instance.a / instance.b)
    lo = np.zeros_like(gammas)
    hi = np.full_like(gammas, cap)
    at_cap = _derivative(instance, gammas, hi) > 0
    at_zero = _derivative(instance, gammas, lo) <= 0
    for _ in range(BISECTION_MAX_ITER):
        if np.max(hi - lo, initial=0.0) <= tol:
            break
        mid = 0.5 * (lo + hi)
        up = _derivative(instance, gammas, mid) > 0
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
    p = np.where(at_cap, cap, np.where(at_zero, 0.0, 0.5 * (lo + hi)))
    return p, _revenue(instance, gammas, p)


def expected_revenue(instance: ProblemInstance, gammas, prices):
    """Vectorised ``r_t(p_t)`` (no range check)."""
    return _revenue(instance, np.asarray(gammas, dtype=float), np.asarray(prices, dtype=float))


def expected_derivative(instance: ProblemInstance, gammas, prices):
    return _derivative(instance, np.asarray(gammas, dtype=float), np.asarray(prices, dtype=float))


@dataclass
class RegretLedger:
    entries: list = field(default_factory=list)
    cumulative: float = 0.0

    def update(self, t: int, price: float, curve: RevenueCurve, tol: float = DEFAULT_TOL) -> "RegretLedger":
        if self.entries and t <= self.entries[-1][0]:
            raise ContractViolation(f"round {t} does not follow round {self.entries[-1][0]}")
        opt = curve.optimal_price(tol)
        r_p = float(curve.revenue(price))
        inst = opt.r_star - r_p
        self.cumulative += inst
        self.entries.append((t, float(price), r_p, opt.p_star, opt.r_star, inst))
        return self


def regret_update(ledger: RegretLedger, t: int, p_t: float, curve: RevenueCurve) -> RegretLedger:
    return ledger.update(t, p_t, curve)


def lipschitz_revenue_derivative(instance: ProblemInstance) -> float:
    """``L_r = 2 b_max + b_max^2 p_max L_F``."""
    return 2 * instance.b_max + instance.b_max**2 * instance.p_max * instance.noise.lipschitz


@dataclass
class Lemma1Report:
    nonincreasing: bool
    sign_changes: int
    boundary_optimum: bool
    p_star: float
    smooth: bool | None
    C_s: float
    locally_strongly_concave: bool | None
    epsilon: float
    C_eps: float
    derivative_bound: bool | None  # r(p*) - r(p) <= C_v r'(p)^2 near p*
    C_v: float
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        checks = [self.nonincreasing, self.sign_changes <= 1, self.smooth,
                  self.locally_strongly_concave, self.derivative_bound]
        return all(c is not False for c in checks)


def check_lemma1_properties(curve: RevenueCurve, resolution: int = 10_000, tol: float = 1e-9) -> Lemma1Report:
    """Grid check of monotonicity, unimodality, smoothness at the optimum and
    local strong concavity of one revenue curve."""
    if resolution < 1000:
        raise ContractViolation("resolution must be at least 1000 points")
    inst = curve.instance
    grid = np.linspace(0.0, inst.p_max, resolution)
    r = curve.revenue(grid)
    dr = curve.derivative(grid)
    scale = max(1.0, float(np.max(np.abs(dr))))
    nonincreasing = bool(np.all(np.diff(dr) <= tol * scale))
    signs = np.sign(np.where(np.abs(dr) <= tol * scale, 0.0, dr))
    signs = signs[signs != 0]
    sign_changes = int(np.count_nonzero(np.diff(signs)))

    opt = curve.optimal_price()
    notes = []
    L_r = lipschitz_revenue_derivative(inst)
    C_s = L_r / 2
    smooth = concave = bound7 = None
    eps = C_eps = C_v = math.nan
    if opt.boundary:
        notes.append("boundary optimum at p_max; no interior stationary point")
    if not math.isfinite(L_r):
        notes.append("noise CDF is not Lipschitz; smoothness checks skipped")
    elif not opt.boundary:
        smooth = bool(np.all(opt.r_star - r <= C_s * (opt.p_star - grid) ** 2 + tol))
        f_star = float(inst.noise.cdf(curve.gamma - inst.a + inst.b * opt.p_star))
        if f_star > 0:
            eps = f_star / (2 * inst.noise.lipschitz * inst.b_max)
            C_eps = inst.b_min * f_star / 2
            near = (grid >= opt.p_star - eps) & (grid <= opt.p_star + eps)
            d_near = dr[near]
            # r' is monotone, so adjacent pairs cover every pair
            concave = bool(np.all(-np.diff(d_near) >= C_eps * np.diff(grid[near]) - tol))
            if f_star >= 1e-3:
                C_v = L_r / (2 * C_eps**2)
                bound7 = bool(np.all(opt.r_star - r[near] <= C_v * d_near**2 + tol))
            else:
                notes.append(f"F at optimum {f_star:.2e} < 1e-3; derivative bound skipped")
    return Lemma1Report(nonincreasing, sign_changes, opt.boundary, opt.p_star, smooth, C_s,
                        concave, eps, C_eps, bound7, C_v, notes)
