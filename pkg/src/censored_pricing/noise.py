"""Bounded, zero-mean demand noise laws.

Every model exposes the CDF ``F`` and the integrated CDF ``G(x) = int_{-inf}^x F``
in closed form.  Both accept scalars or arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

NOISE_KINDS = ("uniform", "triangular", "truncated-gaussian", "degenerate")


@dataclass(frozen=True)
class NoiseModel:
    """Base class.  Subclasses fill in the law on ``[-c, c]``."""

    c: float

    kind = "abstract"

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"noise half-width must be positive, got c={self.c}")

    # subclass hooks, only ever called with x inside [-c, c]
    def _cdf(self, x):
        raise NotImplementedError

    def _int_cdf(self, x):
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    @property
    def lipschitz(self) -> float:
        """Lipschitz constant ``L_F`` of the CDF."""
        raise NotImplementedError

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        inner = self._cdf(np.clip(x, -self.c, self.c))
        out = np.where(x <= -self.c, 0.0, np.where(x >= self.c, 1.0, inner))
        return out[()] if out.ndim == 0 else out

    def int_cdf(self, x):
        x = np.asarray(x, dtype=float)
        inner = self._int_cdf(np.clip(x, -self.c, self.c))
        g_c = float(self._int_cdf(np.float64(self.c)))
        out = np.where(x <= -self.c, 0.0, np.where(x >= self.c, g_c + (x - self.c), inner))
        return out[()] if out.ndim == 0 else out

    def params(self) -> dict:
        return {"kind": self.kind, "c": self.c}


@dataclass(frozen=True)
class UniformNoise(NoiseModel):
    kind = "uniform"

    def _cdf(self, x):
        return (x + self.c) / (2 * self.c)

    def _int_cdf(self, x):
        return (x + self.c) ** 2 / (4 * self.c)

    def sample(self, rng, size=None):
        return rng.uniform(-self.c, self.c, size)

    @property
    def lipschitz(self):
        return 1.0 / (2 * self.c)


@dataclass(frozen=True)
class TriangularNoise(NoiseModel):
    """Symmetric triangular law with apex at 0."""

    kind = "triangular"

    def _cdf(self, x):
        c = self.c
        return np.where(x <= 0, (x + c) ** 2 / (2 * c * c), 1 - (c - x) ** 2 / (2 * c * c))

    def _int_cdf(self, x):
        c = self.c
        left = (x + c) ** 3 / (6 * c * c)
        right = c / 6 + x - (c**3 - (c - x) ** 3) / (6 * c * c)
        return np.where(x <= 0, left, right)

    def sample(self, rng, size=None):
        return rng.triangular(-self.c, 0.0, self.c, size)

    @property
    def lipschitz(self):
        return 1.0 / self.c


@dataclass(frozen=True)
class TruncatedGaussianNoise(NoiseModel):
    """Centred Gaussian with scale ``sigma`` truncated to ``[-c, c]``.

    The truncation is symmetric, so the mean stays exactly zero.
    """

    sigma: float = 0.0

    kind = "truncated-gaussian"

    def __post_init__(self):
        super().__post_init__()
        if self.sigma == 0.0:
            object.__setattr__(self, "sigma", self.c / 2)
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @property
    def _z0(self):
        return -self.c / self.sigma

    @property
    def _mass(self):
        return float(ndtr(self.c / self.sigma) - ndtr(self._z0))

    def _cdf(self, x):
        return (ndtr(x / self.sigma) - ndtr(self._z0)) / self._mass

    def _int_cdf(self, x):
        s, z0 = self.sigma, self._z0

        def antideriv(z):
            # int Phi(u/s) du = s * (z Phi(z) + phi(z)),  z = u/s
            return s * (z * ndtr(z) + np.exp(-0.5 * z * z) / math.sqrt(2 * math.pi))

        z = x / s
        return (antideriv(z) - antideriv(z0) - (x + self.c) * ndtr(z0)) / self._mass

    def sample(self, rng, size=None):
        u = rng.uniform(0.0, 1.0, size)
        lo = ndtr(self._z0)
        x = self.sigma * ndtri(lo + u * self._mass)
        return np.clip(x, -self.c, self.c)

    @property
    def lipschitz(self):
        return 1.0 / (self.sigma * math.sqrt(2 * math.pi) * self._mass)

    def params(self):
        return {"kind": self.kind, "c": self.c, "sigma": self.sigma}


@dataclass(frozen=True)
class DegenerateNoise(NoiseModel):
    """Point mass at zero.  Its CDF is not Lipschitz; used for oracle sanity checks."""

    kind = "degenerate"

    def _cdf(self, x):
        return np.where(x >= 0, 1.0, 0.0)

    def _int_cdf(self, x):
        return np.maximum(x, 0.0)

    def sample(self, rng, size=None):
        return np.zeros(size) if size is not None else 0.0

    @property
    def lipschitz(self):
        return math.inf


def make_noise(kind: str, c: float, **shape) -> NoiseModel:
    if kind == "uniform":
        return UniformNoise(c)
    if kind == "triangular":
        return TriangularNoise(c)
    if kind == "truncated-gaussian":
        return TruncatedGaussianNoise(c, sigma=float(shape.get("sigma", 0.0)))
    if kind == "degenerate":
        return DegenerateNoise(c)
    raise ValueError(f"unknown noise kind {kind!r}; expected one of {NOISE_KINDS}")
