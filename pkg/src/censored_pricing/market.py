"""Linear noisy demand censored by a pre-committed inventory sequence."""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from .inventory import ExhaustedSequenceError, InventoryGenerator
from .noise import NoiseModel


class ContractViolation(ValueError):
    """An operation was called outside its documented domain."""


class InvalidInstanceError(ValueError):
    def __init__(self, report: "ValidationReport"):
        super().__init__("invalid problem instance:\n" + report.format())
        self.report = report


def substream(seed: int, name: str) -> np.random.Generator:
    """Independent generator for one concern (``noise``, ``inventory``, ``stage1``, ...)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), zlib.crc32(name.encode())]))


@dataclass(frozen=True)
class ProblemInstance:
    a: float
    b: float
    a_max: float
    b_min: float
    b_max: float
    c: float
    p_max: float
    gamma_min: float
    noise: NoiseModel
    inventory: InventoryGenerator

    def __post_init__(self):
        if self.noise.c != self.c:
            raise ValueError(f"noise half-width {self.noise.c} differs from instance c={self.c}")
        if not self.p_max > 0:
            raise ValueError(f"p_max must be positive, got {self.p_max}")

    def known_bounds(self) -> "KnownBounds":
        return KnownBounds(self.a_max, self.b_min, self.b_max, self.c, self.p_max, self.gamma_min,
                           self.noise.lipschitz)

    @property
    def gamma0(self) -> float:
        """Largest inventory that demand at ``p_max`` could still hit."""
        return self.a_max - self.b_min * self.p_max + self.c

    def quarter_points(self, gamma):
        g0 = self.gamma0
        return tuple((i * np.asarray(gamma) + (4 - i) * g0) / 4 for i in (1, 2, 3))


@dataclass(frozen=True)
class KnownBounds:
    """The part of an instance a policy may know: the parameter box, never ``a``, ``b`` or the noise law.

    ``lipschitz_F`` is the assumed CDF Lipschitz bound; it defaults to the instance's
    true ``L_F`` but can be overridden in configuration.
    """

    a_max: float
    b_min: float
    b_max: float
    c: float
    p_max: float
    gamma_min: float
    lipschitz_F: float

    @property
    def gamma0(self) -> float:
        return self.a_max - self.b_min * self.p_max + self.c


@dataclass(frozen=True)
class ValidationItem:
    name: str
    ok: bool
    detail: str


@dataclass
class ValidationReport:
    items: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(item.ok for item in self.items)

    @property
    def failures(self) -> list:
        return [item.name for item in self.items if not item.ok]

    def format(self) -> str:
        return "\n".join(f"  [{'pass' if i.ok else 'FAIL'}] {i.name}: {i.detail}" for i in self.items)


def validate_instance(instance: ProblemInstance) -> ValidationReport:
    """Check the boundedness and inequality assumptions; never raises.

    Items ``(1)``..``(5)`` are the inequality conditions; ``bounds-*`` are the
    parameter box; ``band-floor`` ties the inventory band to ``gamma_min``.
    """
    s = instance
    g0 = s.gamma0
    lo, hi = s.inventory.lo, s.inventory.hi
    rep = ValidationReport()

    def add(name, ok, detail):
        rep.items.append(ValidationItem(name, bool(ok), detail))

    add("bounds-a", 0 < s.a <= s.a_max, f"0 < a={s.a} <= a_max={s.a_max}")
    add("bounds-b", 0 < s.b_min <= s.b <= s.b_max, f"0 < b_min={s.b_min} <= b={s.b} <= b_max={s.b_max}")
    add("(1)", hi < s.a - s.c, f"gamma_hi={hi} < a - c={s.a - s.c}")
    add("(2)", lo > 2 * s.c, f"gamma_lo={lo} > 2c={2 * s.c}")
    add("(3)", s.a - s.b * s.p_max - s.c > 0, f"a - b*p_max - c={s.a - s.b * s.p_max - s.c} > 0")
    add("(4)", s.gamma_min > g0, f"gamma_min={s.gamma_min} > gamma_0={g0}")
    add("(5)", s.p_max >= s.a / (2 * s.b), f"p_max={s.p_max} >= a/(2b)={s.a / (2 * s.b)}")
    add("band-floor", lo >= s.gamma_min, f"gamma_lo={lo} >= gamma_min={s.gamma_min}")
    return rep


@dataclass(frozen=True)
class Observation:
    """What a pricing policy is allowed to see after posting its price."""

    t: int
    gamma: float
    price: float
    d_observed: float
    indicator: int
    e: tuple


@dataclass(frozen=True)
class RoundOutcome:
    t: int
    gamma: float
    price: float
    d_potential: float
    d_observed: float
    indicator: int
    e: tuple
    reward: float

    def observation(self) -> Observation:
        return Observation(self.t, self.gamma, self.price, self.d_observed, self.indicator, self.e)


def realize(instance: ProblemInstance, gamma, price, noise):
    """Vectorised outcome map.  Returns ``(d_potential, d_observed, indicator, e, reward)``."""
    gamma = np.asarray(gamma, dtype=float)
    price = np.asarray(price, dtype=float)
    d_pot = instance.a - instance.b * price + np.asarray(noise, dtype=float)
    d_obs = np.minimum(gamma, d_pot)
    indicator = (d_obs < gamma).astype(int)
    e = tuple((d_obs >= q).astype(int) for q in instance.quarter_points(gamma))
    return d_pot, d_obs, indicator, e, price * d_obs


class Market:
    """One replica of the environment.

    Inventory and noise are drawn for all ``horizon`` rounds at construction from
    their own substreams, so nothing a policy does can change them.
    """

    def __init__(self, instance: ProblemInstance, horizon: int, seed: int, check: bool = True):
        if check:
            report = validate_instance(instance)
            if not report.ok:
                raise InvalidInstanceError(report)
        self.instance = instance
        self.horizon = int(horizon)
        self.seed = seed
        self.gamma = instance.inventory.generate(self.horizon, substream(seed, "inventory"))
        noise = np.asarray(instance.noise.sample(substream(seed, "noise"), self.horizon), dtype=float)
        noise.setflags(write=False)
        self.noise = noise

    def inventory(self, t: int) -> float:
        if not 1 <= t <= self.horizon:
            raise ExhaustedSequenceError(f"round {t} outside 1..{self.horizon}")
        return float(self.gamma[t - 1])

    def step(self, t: int, price: float) -> RoundOutcome:
        gamma = self.inventory(t)
        if not 0.0 <= price <= self.instance.p_max:
            raise ContractViolation(f"price {price} outside [0, {self.instance.p_max}]")
        inst = self.instance
        d_pot = inst.a - inst.b * price + float(self.noise[t - 1])
        d_obs = min(gamma, d_pot)
        g0 = inst.gamma0
        e = tuple(int(d_obs >= (i * gamma + (4 - i) * g0) / 4) for i in (1, 2, 3))
        return RoundOutcome(t, gamma, float(price), d_pot, d_obs, int(d_obs < gamma), e, price * d_obs)
