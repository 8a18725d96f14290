"""Parent laws in the Frechet domain of attraction and the law of W_n = (M_n - b_n)/a_n.

All law callables are numpy-vectorized and return 0 (cdf, pdf) outside the
support. Besides the textbook F, f, f' each law carries two numerically
stable helpers used by the rate computations:

``logcdf``
    log F, exact near F = 1 where ``log(cdf(x))`` would lose digits; the
    slowly varying function L(t) = -t**alpha log F(t) is built on it.
``score_excess``
    y f'(y)/f(y) + alpha + 1. For a pure power tail this is identically 0,
    and writing the score through it avoids the cancellation of two
    O(x**alpha) terms inside the Stein kernel.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NoBracket
from .numerics import QuadConfig, RngStream, RootConfig, find_root, power_substitution

Fn = Callable[[np.ndarray], np.ndarray]


class NormingMode(str, enum.Enum):
    PAPER = "paper"
    QUANTILE = "quantile"


@dataclass(frozen=True)
class MaxLaw:
    name: str
    alpha: float
    cdf: Fn
    pdf: Fn
    pdf_deriv: Fn
    logcdf: Fn
    quantile: Fn
    isf: Fn
    score_excess: Fn
    support_lo: float
    support_hi: float = math.inf
    params: dict = field(default_factory=dict)
    canonical_an: Callable[[int], float] | None = None


def _check_positive(**kw):
    for k, v in kw.items():
        if not v > 0:
            raise DomainError(f"{k} must be positive, got {v}")


def _arr(x):
    return np.asarray(x, dtype=float)


def _ret(x, out):
    return float(out) if np.ndim(x) == 0 else out


def make_pareto(alpha: float) -> MaxLaw:
    """Pareto parent F(x) = 1 - x**-alpha on x >= 1."""
    _check_positive(alpha=alpha)
    a = float(alpha)

    def inside(x):
        return x > 1.0

    def safe(x):
        return np.where(x > 1.0, x, 2.0)

    def cdf(x):
        xa = _arr(x)
        return _ret(x, np.where(inside(xa), -np.expm1(-a * np.log(safe(xa))), 0.0))

    def pdf(x):
        xa = _arr(x)
        return _ret(x, np.where(inside(xa), a * safe(xa) ** (-a - 1), 0.0))

    def pdf_deriv(x):
        xa = _arr(x)
        return _ret(x, np.where(inside(xa), -a * (a + 1) * safe(xa) ** (-a - 2), 0.0))

    def logcdf(x):
        xa = _arr(x)
        return _ret(x, np.where(inside(xa), np.log1p(-safe(xa) ** -a), -np.inf))

    def quantile(p):
        return _ret(p, np.power(1.0 - _arr(p), -1.0 / a))

    def isf(q):
        return _ret(q, np.power(_arr(q), -1.0 / a))

    def score_excess(y):
        return _ret(y, np.zeros_like(_arr(y)))

    return MaxLaw(
        name="pareto", alpha=a, cdf=cdf, pdf=pdf, pdf_deriv=pdf_deriv, logcdf=logcdf,
        quantile=quantile, isf=isf, score_excess=score_excess, support_lo=1.0,
        params={"alpha": a}, canonical_an=lambda n: n ** (1.0 / a),
    )


def make_burr(c: float, k: float) -> MaxLaw:
    """Burr XII parent F(x) = 1 - (1 + x**c)**-k on x > 0; tail index c*k."""
    _check_positive(c=c, k=k)
    c, k = float(c), float(k)

    def pos(x):
        return np.where(x > 0, x, 1.0)

    def log_sf(x):
        return -k * np.log1p(pos(x) ** c)

    def cdf(x):
        xa = _arr(x)
        return _ret(x, np.where(xa > 0, -np.expm1(log_sf(xa)), 0.0))

    def pdf(x):
        xa = _arr(x)
        xp = pos(xa)
        with np.errstate(divide="ignore"):
            val = c * k * xp ** (c - 1) * np.exp((-k - 1) * np.log1p(xp**c))
        return _ret(x, np.where(xa > 0, val, 0.0))

    def pdf_deriv(x):
        xa = _arr(x)
        xp = pos(xa)
        f = pdf(xp)
        val = f * ((c - 1) / xp - (k + 1) * c * xp ** (c - 1) / (1 + xp**c))
        return _ret(x, np.where(xa > 0, val, 0.0))

    def logcdf(x):
        xa = _arr(x)
        s = np.exp(log_sf(xa))
        with np.errstate(divide="ignore"):
            val = np.where(s < 0.5, np.log1p(-s), np.log(-np.expm1(log_sf(xa))))
        return _ret(x, np.where(xa > 0, val, -np.inf))

    def quantile(p):
        pa = _arr(p)
        return _ret(p, np.expm1(-np.log1p(-pa) / k) ** (1.0 / c))

    def isf(q):
        return _ret(q, np.expm1(-np.log(_arr(q)) / k) ** (1.0 / c))

    def score_excess(y):
        return _ret(y, c * (k + 1) / (1 + pos(_arr(y)) ** c))

    return MaxLaw(
        name="burr", alpha=c * k, cdf=cdf, pdf=pdf, pdf_deriv=pdf_deriv, logcdf=logcdf,
        quantile=quantile, isf=isf, score_excess=score_excess, support_lo=0.0,
        params={"c": c, "k": k}, canonical_an=None,
    )


def make_frechet_parent(alpha: float) -> MaxLaw:
    """Phi_alpha as its own parent: max-stable, L(t) == 1, zero remainder."""
    _check_positive(alpha=alpha)
    a = float(alpha)

    def pos(x):
        return np.where(x > 0, x, 1.0)

    def cdf(x):
        xa = _arr(x)
        with np.errstate(over="ignore"):
            return _ret(x, np.where(xa > 0, np.exp(-pos(xa) ** -a), 0.0))

    def pdf(x):
        xa = _arr(x)
        xp = pos(xa)
        with np.errstate(over="ignore"):
            val = np.exp(math.log(a) - (a + 1) * np.log(xp) - xp**-a)
        return _ret(x, np.where(xa > 0, val, 0.0))

    def pdf_deriv(x):
        xa = _arr(x)
        xp = pos(xa)
        val = pdf(xp) * (-(a + 1) / xp + a * xp ** (-a - 1))
        return _ret(x, np.where(xa > 0, val, 0.0))

    def logcdf(x):
        xa = _arr(x)
        return _ret(x, np.where(xa > 0, -pos(xa) ** -a, -np.inf))

    def quantile(p):
        return _ret(p, np.power(-np.log(_arr(p)), -1.0 / a))

    def isf(q):
        return _ret(q, np.power(-np.log1p(-_arr(q)), -1.0 / a))

    def score_excess(y):
        return _ret(y, a * pos(_arr(y)) ** -a)

    return MaxLaw(
        name="frechet", alpha=a, cdf=cdf, pdf=pdf, pdf_deriv=pdf_deriv, logcdf=logcdf,
        quantile=quantile, isf=isf, score_excess=score_excess, support_lo=0.0,
        params={"alpha": a}, canonical_an=lambda n: n ** (1.0 / a),
    )


def make_law(name: str, **params) -> MaxLaw:
    """Build a shipped law by name: ``pareto(alpha)``, ``burr(c, k)``, ``frechet(alpha)``."""
    factories = {"pareto": make_pareto, "burr": make_burr, "frechet": make_frechet_parent}
    try:
        factory = factories[name]
    except KeyError:
        raise DomainError(f"unknown law {name!r}; choose from {sorted(factories)}") from None
    return factory(**params)


def slow_variation_L(law: MaxLaw, t):
    """L(t) = -t**alpha log F(t)."""
    ta = _arr(t)
    if np.any(ta <= 0):
        raise DomainError("L(t) needs t > 0")
    lc = law.logcdf(ta)
    if np.any(np.isneginf(lc)):
        raise DomainError("F(t) = 0: log F undefined")
    return _ret(t, -ta**law.alpha * lc)


# --------------------------------------------------------------------------
# the normalized maximum


@dataclass(frozen=True)
class NormedMaximum:
    """Law of W_n = (M_n - b_n)/a_n with M_n the max of n iid draws from ``law``."""

    law: MaxLaw
    n: int
    a_n: float
    b_n: float = 0.0
    mode: NormingMode = NormingMode.PAPER

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("n must be >= 2")
        if not self.a_n > 0:
            raise DomainError("a_n must be positive")

    @property
    def alpha(self) -> float:
        return self.law.alpha

    @property
    def support(self) -> tuple[float, float]:
        lo = (self.law.support_lo - self.b_n) / self.a_n
        hi = (self.law.support_hi - self.b_n) / self.a_n
        return lo, hi

    def _y(self, x):
        return self.a_n * _arr(x) + self.b_n

    def _interior(self, x):
        lo, hi = self.support
        xa = _arr(x)
        return (xa > lo) & (xa < hi)

    def cdf(self, x):
        with np.errstate(invalid="ignore"):
            out = np.exp(self.n * self.law.logcdf(self._y(x)))
        return _ret(x, np.clip(out, 0.0, 1.0))

    def pdf(self, x):
        y = self._y(x)
        inside = self._interior(x)
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            out = self.n * self.a_n * self.law.pdf(y) * np.exp((self.n - 1) * self.law.logcdf(y))
        return _ret(x, np.where(inside, out, 0.0))

    def score(self, x):
        """rho_n(x) = (log f_n)'(x); interior of the support only."""
        if not np.all(self._interior(x)):
            raise DomainError("score is defined on the open support of W_n only")
        y = self._y(x)
        law = self.law
        f = law.pdf(y)
        val = self.a_n * ((self.n - 1) * f / law.cdf(y) + law.pdf_deriv(y) / f)
        return _ret(x, val)

    def stein_kernel(self, x):
        """1 - x**alpha ((alpha+1)/alpha + x rho_n(x)/alpha); nan outside the support.

        Delta_n is E|stein_kernel(W_n)|.
        """
        a = self.alpha
        xa = _arr(x)
        inside = self._interior(xa)
        y = np.where(inside, self._y(xa), np.nan)
        xs = np.where(inside, xa, np.nan)
        law = self.law
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            hazard = y * law.pdf(y) / np.exp(law.logcdf(y))
            r = self.a_n * xs / y
            bracket = (a + 1) * (1 - r) + r * ((self.n - 1) * hazard + law.score_excess(y))
            out = 1.0 - xs**a * bracket / a
        return _ret(x, out)

    def expect(
        self,
        g: Callable,
        cfg: QuadConfig | None = None,
        *,
        points: Iterable[float] = (),
        vectorized: bool = False,
    ) -> float:
        """E[g(W_n)], integrated in z = x**-alpha over the open support."""
        lo, hi = self.support
        lo = max(lo, 0.0)
        gv = g if vectorized else np.vectorize(g, otypes=[float])

        def integrand(x):
            fx = self.pdf(x)
            # g may be nan where f_n underflows to 0 (e.g. the Stein kernel)
            with np.errstate(invalid="ignore"):
                return np.where(fx > 0, gv(x) * fx, 0.0)

        return power_substitution(integrand, self.alpha, lo, hi, cfg, points=points, vectorized=True)

    def sample_many(self, rng: RngStream, size: int) -> np.ndarray:
        """Exact draws of W_n by inverting F^n on the survival scale."""
        u = rng.uniforms(size)
        q = -np.expm1(np.log(u) / self.n)
        return (self.law.isf(q) - self.b_n) / self.a_n

    def sample(self, rng: RngStream) -> float:
        return float(self.sample_many(rng, 1)[0])


def quantile_rule_an(law: MaxLaw, n: int, cfg: RootConfig | None = None) -> float:
    """Solve -log F(a) = 1/n by bracketing outward from the support's lower end."""
    target = 1.0 / n

    def g(a: float) -> float:
        return float(law.logcdf(a)) + target

    lo_edge = max(law.support_lo, 0.0)
    hi = lo_edge + 1.0
    for _ in range(200):
        if g(hi) >= 0:
            break
        hi = lo_edge + 2.0 * (hi - lo_edge)
    else:
        raise NoBracket("no upper bracket for the quantile rule within 200 doublings")
    lo = hi
    for _ in range(200):
        lo = lo_edge + 0.5 * (lo - lo_edge)
        if g(lo) < 0:
            break
    else:
        raise NoBracket("no lower bracket for the quantile rule within 200 halvings")
    return find_root(g, lo, hi, cfg)


def norming(
    law: MaxLaw,
    n: int,
    mode: NormingMode | str = NormingMode.PAPER,
    cfg: RootConfig | None = None,
) -> NormedMaximum:
    """Norming constants with b_n = 0.

    ``paper`` uses the law's canonical a_n (n**(1/alpha) for Pareto and the
    Frechet parent) and falls back to the quantile rule when the law has
    none (Burr). ``quantile`` solves -log F(a_n) = 1/n.
    """
    mode = NormingMode(mode)
    if n < 2:
        raise DomainError("n must be >= 2")
    if mode is NormingMode.PAPER and law.canonical_an is not None:
        a_n = law.canonical_an(n)
    else:
        a_n = quantile_rule_an(law, n, cfg)
    return NormedMaximum(law=law, n=n, a_n=a_n, b_n=0.0, mode=mode)
