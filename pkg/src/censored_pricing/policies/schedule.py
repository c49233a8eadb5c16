"""Confidence constants and grid geometry for C20CB."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from ..market import KnownBounds

MIN_TAU = 16
CB_VARIANTS = ("appendix", "statement")


def stage1_length(horizon: int) -> int:
    return max(MIN_TAU, int(round(math.sqrt(horizon))))


def _log_factor(eta: float, delta: float) -> float:
    return math.sqrt(0.5 * math.log(2.0 / (eta * delta)))


def _ab_constants(bounds: KnownBounds, eta: float, delta: float, cb_variant: str):
    lf = _log_factor(eta, delta)
    gap = bounds.gamma_min - bounds.gamma0
    if cb_variant == "appendix":
        C_b = 4 * bounds.b_max**2 * bounds.p_max / gap * lf
    elif cb_variant == "statement":
        C_b = 8 * bounds.b_max**2 / gap * lf
    else:
        raise ValueError(f"cb_variant must be one of {CB_VARIANTS}")
    C_a = bounds.p_max * (C_b + bounds.b_max * lf)
    return C_a, C_b


def default_eta(bounds: KnownBounds, horizon: int, delta: float, cb_variant: str = "appendix") -> float:
    """``eta = (C_a + C_b p_max) / (10 c T^(5/4))`` after one fixed-point pass from ``T^(-5/4)``."""
    t54 = horizon**1.25
    C_a, C_b = _ab_constants(bounds, 1.0 / t54, delta, cb_variant)
    return min(1.0, (C_a + C_b * bounds.p_max) / (10 * bounds.c * t54))


@dataclass(frozen=True)
class ConstantSchedule:
    horizon: int
    eta: float
    delta: float
    tau: int
    C_a: float
    C_b: float
    C_N: float
    C_tau: float
    Delta: float
    M: int
    L_F: float
    scale: float = 1.0
    scale_n: float = 1.0
    cb_variant: str = "appendix"

    @classmethod
    def build(cls, bounds: KnownBounds, horizon: int, *, delta: float = 0.05, eta: float | None = None,
              L_F: float | None = None, scale: float = 1.0, scale_n: float = 1.0,
              cb_variant: str = "appendix") -> "ConstantSchedule":
        """Derive every constant from the known bounds.

        ``scale`` multiplies the parameter-error coefficients ``C_a, C_b`` and the
        bias term ``C_tau`` built from them, and so also the grid spacing ``Delta``.
        ``scale_n`` multiplies the sampling coefficient ``C_N``.  ``1.0`` gives the
        worst-case theory values, which leave ``M = 0`` for any horizon a desktop
        can simulate.
        """
        if horizon < 1:
            raise ValueError("horizon must be positive")
        if not bounds.p_max > 0:
            raise ValueError(f"p_max must be positive, got {bounds.p_max}")
        if not 0 < delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if not (scale > 0 and scale_n > 0):
            raise ValueError("scale and scale_n must be positive")
        if bounds.gamma_min <= bounds.gamma0:
            raise ValueError(f"gamma_min={bounds.gamma_min} must exceed gamma_0={bounds.gamma0}")
        if eta is None:
            eta = default_eta(bounds, horizon, delta, cb_variant)
        if not 0 < eta <= 1:
            raise ValueError("eta must lie in (0, 1]")
        L_F = bounds.lipschitz_F if L_F is None else L_F
        if not math.isfinite(L_F):
            raise ValueError("C20CB needs a finite CDF Lipschitz bound L_F")
        b = bounds
        lf = _log_factor(eta, delta)
        C_a, C_b = _ab_constants(b, eta, delta, cb_variant)
        C_N = (b.c + b.a_max + b.b_max * b.p_max) * lf
        C_tau = 2 * (b.b_max * b.p_max * L_F + 1) * (C_a + C_b * (b.c + b.a_max) / b.b_min) + b.p_max * C_b
        C_a, C_b, C_tau = scale * C_a, scale * C_b, scale * C_tau
        C_N = scale_n * C_N
        tau = stage1_length(horizon)
        Delta = (C_a + C_b * b.p_max) / math.sqrt(tau)
        M = int(math.floor(b.c / (2 * Delta)))
        return cls(horizon, eta, delta, tau, C_a, C_b, C_N, C_tau, Delta, M, L_F, scale, scale_n, cb_variant)

    @property
    def a_radius(self) -> float:
        """``C_a / sqrt(tau)``, the high-probability error of the intercept estimate."""
        return self.C_a / math.sqrt(self.tau)

    @property
    def b_radius(self) -> float:
        return self.C_b / math.sqrt(self.tau)

    def bar(self, n) -> float:
        """Error-bar half-width after ``n`` observations in a bin."""
        return self.C_N / math.sqrt(n) + self.C_tau / math.sqrt(self.tau)

    def to_dict(self) -> dict:
        return asdict(self)
