from __future__ import annotations

from dataclasses import dataclass

from ..market import ContractViolation, Observation

CASES = ("stage1", "grid-init", "skip-large-gamma", "bar-contains-zero", "closest-to-zero", "all-above-zero")


class EstimationFailure(RuntimeError):
    """Stage-1 exploration ended without a usable slope estimate."""


@dataclass(frozen=True)
class PolicyDecision:
    price: float
    bin: int | None = None
    record_feedback: bool = False
    case: str = "stage1"
    clamped: bool = False
    r_hat: float = float("nan")  # derivative estimate of the chosen bin
    bar: float = float("nan")  # its half-width Delta_k


class Policy:
    """Sequential pricing policy.

    ``act(t, gamma)`` is called once per round with ``t`` advancing by one, and is
    followed by ``observe(obs)`` with the censored feedback of that round.
    """

    name = "policy"

    def __init__(self):
        self.t = 0
        self._pending: PolicyDecision | None = None

    def act(self, t: int, gamma: float) -> PolicyDecision:
        if t != self.t + 1:
            raise ContractViolation(f"expected round {self.t + 1}, got {t}")
        if self._pending is not None:
            raise ContractViolation(f"round {self.t} was never observed")
        self.t = t
        decision = self._act(gamma)
        self._pending = decision
        return decision

    def observe(self, obs: Observation) -> None:
        if self._pending is None or obs.t != self.t:
            raise ContractViolation(f"unexpected observation for round {obs.t}")
        decision, self._pending = self._pending, None
        self._observe(decision, obs)

    def _act(self, gamma: float) -> PolicyDecision:
        raise NotImplementedError

    def _observe(self, decision: PolicyDecision, obs: Observation) -> None:
        pass


def clamp_price(p: float, p_max: float) -> tuple[float, bool]:
    if p < 0.0:
        return 0.0, True
    if p > p_max:
        return p_max, True
    return p, False
