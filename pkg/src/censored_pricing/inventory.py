"""Oblivious inventory adversaries.

A generator emits the whole sequence ``gamma_1..gamma_T`` up front from its own
random substream, before any price is posted.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

INVENTORY_KINDS = ("constant", "cyclic", "iid-uniform-in-band", "piecewise-adversarial", "replay-from-file")


class ExhaustedSequenceError(IndexError):
    """Raised when a round index runs past the pre-committed inventory sequence."""


@dataclass(frozen=True)
class InventoryGenerator:
    """Inventory schedule over the band ``[lo, hi]``.

    kind
        ``constant``: every round at ``level`` (defaults to ``lo``).
        ``cyclic``: cosine wave between ``lo`` and ``hi`` with ``period`` rounds.
        ``iid-uniform-in-band``: independent uniform draws on the band.
        ``piecewise-adversarial``: epochs alternating between the floor ``lo`` and
        the ceiling ``hi``.  Epoch ``j`` lasts ``epoch * growth**j`` rounds; with
        ``jitter > 0`` each level is drawn uniformly within ``jitter * (hi - lo)``
        of its edge.
        ``replay-from-file``: one decimal level per line of ``path``.
    """

    kind: str
    lo: float
    hi: float
    level: float | None = None
    period: int = 100
    epoch: int = 500
    growth: float = 1.0
    jitter: float = 0.0
    path: str | None = None
    _replay: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in INVENTORY_KINDS:
            raise ValueError(f"unknown inventory kind {self.kind!r}; expected one of {INVENTORY_KINDS}")
        if self.kind == "replay-from-file":
            if self.path is None:
                raise ValueError("replay-from-file needs a path")
            values = tuple(load_inventory_file(self.path))
            object.__setattr__(self, "_replay", values)
            if self.lo is None or self.hi is None:
                object.__setattr__(self, "lo", min(values))
                object.__setattr__(self, "hi", max(values))
        if self.lo > self.hi:
            raise ValueError(f"empty band [{self.lo}, {self.hi}]")
        if self.period < 1 or self.epoch < 1 or self.growth < 1.0:
            raise ValueError("period and epoch must be >= 1 and growth >= 1")
        if not 0.0 <= self.jitter <= 1.0:
            raise ValueError("jitter must lie in [0, 1]")
        if self.kind == "constant" and self.level is not None and not self.lo <= self.level <= self.hi:
            raise ValueError(f"constant level {self.level} outside band [{self.lo}, {self.hi}]")

    def generate(self, horizon: int, rng: np.random.Generator) -> np.ndarray:
        lo, hi = self.lo, self.hi
        t = np.arange(horizon)
        if self.kind == "constant":
            seq = np.full(horizon, lo if self.level is None else self.level, dtype=float)
        elif self.kind == "cyclic":
            seq = lo + (hi - lo) * 0.5 * (1 - np.cos(2 * np.pi * t / self.period))
        elif self.kind == "iid-uniform-in-band":
            seq = rng.uniform(lo, hi, horizon)
        elif self.kind == "piecewise-adversarial":
            seq = self._piecewise(horizon, rng)
        else:
            if len(self._replay) < horizon:
                raise ExhaustedSequenceError(
                    f"{self.path} holds {len(self._replay)} levels, horizon needs {horizon}"
                )
            seq = np.array(self._replay[:horizon], dtype=float)
        seq = np.asarray(seq, dtype=float)
        seq.setflags(write=False)
        return seq

    def _piecewise(self, horizon, rng):
        width = self.jitter * (self.hi - self.lo)
        out = np.empty(horizon)
        start, j, length = 0, 0, float(self.epoch)
        while start < horizon:
            stop = min(horizon, start + max(1, int(round(length))))
            n = stop - start
            offset = rng.uniform(0.0, width, n) if width > 0 else np.zeros(n)
            out[start:stop] = self.lo + offset if j % 2 == 0 else self.hi - offset
            start, j, length = stop, j + 1, length * self.growth
        return out

    def params(self) -> dict:
        d = {"kind": self.kind, "lo": self.lo, "hi": self.hi}
        if self.kind == "constant" and self.level is not None:
            d["level"] = self.level
        if self.kind == "cyclic":
            d["period"] = self.period
        if self.kind == "piecewise-adversarial":
            d.update(epoch=self.epoch, growth=self.growth, jitter=self.jitter)
        if self.kind == "replay-from-file":
            d["path"] = self.path
        return d


def load_inventory_file(path) -> list[float]:
    """Read one decimal level per line; blank lines and ``#`` comments are skipped."""
    values = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: not a number: {raw!r}") from exc
    if not values:
        raise ValueError(f"{path}: no inventory levels")
    return values


def write_inventory_file(path, levels) -> None:
    Path(path).write_text("".join(f"{float(g)!r}\n" for g in levels))
