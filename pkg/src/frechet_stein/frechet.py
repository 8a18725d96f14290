"""The Frechet law Phi_alpha(x) = exp(-x**-alpha) on x > 0."""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .numerics import QuadConfig, RngStream, frechet_weight_integral, integrate


def _scalar_or_array(x, out):
    return float(out) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class FrechetLaw:
    """Frechet distribution with shape index ``alpha > 0``.

    ``cdf`` and ``pdf`` accept scalars or numpy arrays and return 0 for
    ``x <= 0``.
    """

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")

    def cdf(self, x):
        xa = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            out = np.where(xa > 0, np.exp(-np.power(np.where(xa > 0, xa, 1.0), -self.alpha)), 0.0)
        return _scalar_or_array(x, out)

    def logpdf(self, x):
        a = self.alpha
        xa = np.asarray(x, dtype=float)
        safe = np.where(xa > 0, xa, 1.0)
        with np.errstate(over="ignore"):
            out = math.log(a) - (a + 1) * np.log(safe) - np.power(safe, -a)
        return _scalar_or_array(x, np.where(xa > 0, out, -np.inf))

    def pdf(self, x):
        return _scalar_or_array(x, np.exp(self.logpdf(x)))

    def quantile(self, p):
        pa = np.asarray(p, dtype=float)
        if np.any((pa <= 0) | (pa >= 1)):
            raise DomainError("quantile needs 0 < p < 1")
        return _scalar_or_array(p, np.power(-np.log(pa), -1.0 / self.alpha))

    @property
    def median(self) -> float:
        return math.log(2.0) ** (-1.0 / self.alpha)

    def sample(self, rng: RngStream) -> float:
        return self.quantile(rng.uniform())

    def sample_many(self, rng: RngStream, size: int) -> np.ndarray:
        return self.quantile(rng.uniforms(size))

    def expect(
        self,
        h: Callable,
        cfg: QuadConfig | None = None,
        *,
        points: Iterable[float] = (),
        vectorized: bool = False,
        direct: bool = False,
    ) -> float:
        """E[h(G)] for G ~ Phi_alpha.

        By default integrates ``h(y**(-1/alpha)) exp(-y)`` over ``y > 0``.
        ``direct=True`` integrates ``h(x) pdf(x)`` in ``x`` instead; it is
        kept for cross-checking the substitution. ``points`` are
        breakpoints of ``h`` in ``x``.
        """
        if direct:
            if vectorized:
                def g(x):
                    return np.asarray(h(x), dtype=float) * self.pdf(x)
            else:
                def g(x):
                    return h(x) * self.pdf(x)
            return integrate(g, 0.0, math.inf, cfg, points=points, vectorized=vectorized)
        return frechet_weight_integral(h, self.alpha, cfg, points=points, vectorized=vectorized)
