"""Comparison policies sharing the C20CB interface."""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from ..market import KnownBounds, ProblemInstance, substream
from ..oracle import expected_derivative
from .base import EstimationFailure, Policy, PolicyDecision, clamp_price
from .c20cb import Stage1Accumulators, finish_stage1


class ExploreThenCommit(Policy):
    """Uniform exploration for ``window`` rounds, then ``a_hat / (2 b_hat)`` forever.

    Uses the same moment estimators and zero-denominator extension as C20CB.
    """

    name = "etc"

    def __init__(self, bounds: KnownBounds, window: int, seed: int = 0):
        super().__init__()
        if window < 1:
            raise ValueError("exploration window must be positive")
        self.bounds = bounds
        self.window = int(window)
        self.rng = substream(seed, "stage1")
        self.acc = Stage1Accumulators()
        self.committed: float | None = None
        self.a_hat = self.b_hat = math.nan

    def _act(self, gamma):
        if self.committed is None:
            return PolicyDecision(float(self.rng.uniform(0.0, self.bounds.p_max)), None, False, "stage1")
        return PolicyDecision(self.committed, None, False, "commit")

    def _observe(self, decision, obs):
        if self.committed is not None:
            return
        self.acc.add(obs, self.bounds.gamma0)
        if self.acc.count >= self.window and self.acc.sum_q > 0:
            self.b_hat, self.a_hat = finish_stage1(self.acc, self.bounds)
            self.committed, _ = clamp_price(self.a_hat / (2 * self.b_hat), self.bounds.p_max)
        elif self.acc.count >= 2 * self.window:
            raise EstimationFailure(f"no e1 > e2 event in {self.acc.count} exploration rounds")

    @property
    def stage1_rounds(self) -> int:
        return self.acc.count


class UCBGrid(Policy):
    """UCB1 over ``K`` evenly spaced prices on ``[0, p_max]``.

    Rewards are divided by ``p_max * a_max`` and the index is
    ``mean + bonus * sqrt(2 log t / n)``.
    """

    name = "ucb"

    def __init__(self, bounds: KnownBounds, arms: int, bonus: float = 1.0):
        super().__init__()
        if arms < 1:
            raise ValueError("need at least one arm")
        self.bounds = bounds
        self.prices = np.linspace(0.0, bounds.p_max, arms)
        self.means = np.zeros(arms)
        self.counts = np.zeros(arms, dtype=np.int64)
        self.bonus = bonus
        self._norm = bounds.p_max * bounds.a_max

    @classmethod
    def for_horizon(cls, bounds: KnownBounds, horizon: int, bonus: float = 1.0) -> "UCBGrid":
        return cls(bounds, math.ceil(horizon ** (1 / 3)), bonus)

    def _act(self, gamma):
        k = len(self.prices)
        if self.t <= k:
            arm = self.t - 1
        else:
            index = self.means + self.bonus * np.sqrt(2 * math.log(self.t) / self.counts)
            arm = int(np.argmax(index))
        return PolicyDecision(float(self.prices[arm]), arm, True, "ucb")

    def _observe(self, decision, obs):
        arm = decision.bin
        n = self.counts[arm]
        self.means[arm] = (n * self.means[arm] + obs.price * obs.d_observed / self._norm) / (n + 1)
        self.counts[arm] = n + 1


class OraclePolicy(Policy):
    """Plays the true optimal price each round.  Reads the hidden instance: benchmark only."""

    name = "oracle"

    def __init__(self, instance: ProblemInstance):
        super().__init__()
        self.instance = instance
        self._cache = {}

    def _act(self, gamma):
        p = self._cache.get(gamma)
        if p is None:
            p = self._cache[gamma] = self._solve(gamma)
        return PolicyDecision(p, None, False, "oracle")

    def _solve(self, gamma):
        inst = self.instance
        cap = min(inst.p_max, inst.a / inst.b)
        slope = lambda p: float(expected_derivative(inst, gamma, p))  # noqa: E731
        if slope(cap) > 0:
            return cap
        if slope(0.0) <= 0:
            return 0.0
        return brentq(slope, 0.0, cap, xtol=1e-12)
