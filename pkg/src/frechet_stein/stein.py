"""Stein operators for the Frechet law and for normalized maxima.

For G ~ Phi_alpha the operator

    T phi(x) = phi'(x) x**(alpha+1) + alpha phi(x)

has E[T phi(G)] = 0 on functions with phi(x) exp(-x**-alpha) -> 0 at 0 and
infinity. For the maximum W_n with density f_n and score rho_n,

    T_n phi(x) = phi'(x) x**(alpha+1) + phi(x) x**alpha (alpha + 1 + x rho_n(x))

plays the same role, and for phi_h solving T phi = h - E h(G)

    E h(W_n) - E h(G) = alpha E[phi_h(W_n) k_n(W_n)],

with k_n the Stein kernel of :meth:`NormedMaximum.stein_kernel`.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .attraction import NormedMaximum, make_pareto, norming
from .errors import DomainError
from .frechet import FrechetLaw
from .numerics import QuadConfig, integrate

# Tighter than the numerics default: identity residuals are asserted at 1e-8.
IDENTITY_QUAD = QuadConfig(abs_tol=1e-12, rel_tol=1e-12, max_subdivisions=4000)


def stein_op(law: FrechetLaw, phi: Callable, dphi: Callable, x):
    """T phi(x) = phi'(x) x**(alpha+1) + alpha phi(x), for x > 0."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise DomainError("the Frechet Stein operator is defined for x > 0")
    a = law.alpha
    out = dphi(xa) * xa ** (a + 1) + a * phi(xa)
    return float(out) if np.ndim(x) == 0 else out


# --------------------------------------------------------------------------
# solutions of the Stein equation


@dataclass(frozen=True)
class SteinSolution:
    """phi_h solving T phi = h - E h(G).

    ``kind == "indicator"`` is h = 1(. <= t) in closed form; ``"general"``
    evaluates one of two integral representations by quadrature, the
    lower-tail form below ``switch`` (default: the Frechet median) and the
    upper-tail form above it.
    """

    law: FrechetLaw
    kind: str
    t: float = math.nan
    h: Callable | None = None
    eh: float = math.nan
    cfg: QuadConfig = field(default_factory=QuadConfig)
    switch: float = math.nan
    points: tuple[float, ...] = ()

    @property
    def alpha(self) -> float:
        return self.law.alpha

    def value(self, x):
        if self.kind == "indicator":
            return self._indicator_value(x)
        if np.ndim(x) == 0:
            return self._general_value(float(x))
        return np.array([self._general_value(float(v)) for v in np.ravel(x)]).reshape(np.shape(x))

    __call__ = value

    def derivative(self, x):
        """phi_h' recovered from the Stein equation itself."""
        xa = np.asarray(x, dtype=float)
        if self.kind == "indicator":
            hx = (xa <= self.t).astype(float)
        else:
            hx = np.vectorize(self.h, otypes=[float])(xa)
        out = (hx - self.eh - self.alpha * self.value(xa)) / xa ** (self.alpha + 1)
        return float(out) if np.ndim(x) == 0 else out

    def sup_norm(self) -> float:
        """Exact sup-norm for the indicator kind: (1 - exp(-t**-alpha))/alpha."""
        if self.kind != "indicator":
            raise NotImplementedError("closed-form sup-norm only for indicator solutions")
        return -math.expm1(-self.t ** -self.alpha) / self.alpha

    def _indicator_value(self, x):
        a, t = self.alpha, self.t
        xa = np.asarray(x, dtype=float)
        if np.any(xa < 0):
            raise DomainError("phi_h is defined for x >= 0")
        low = -math.expm1(-t**-a) / a
        safe = np.where(xa > t, xa, 2.0 * t)
        high = math.exp(-t**-a) * np.expm1(safe**-a) / a
        out = np.where(xa <= t, low, high)
        return float(out) if np.ndim(x) == 0 else out

    def _general_value(self, x: float) -> float:
        if x < 0:
            raise DomainError("phi_h is defined for x >= 0")
        if x == 0:
            return (self.h(0.0) - self.eh) / self.alpha
        if x <= self.switch:
            return self.value_lower(x)
        return self.value_upper(x)

    def value_lower(self, x: float) -> float:
        """exp(x**-a) int_0^x (h - Eh) y**(-a-1) exp(-y**-a) dy, via s = y**-a."""
        a = self.alpha
        sx = x**-a
        pts = [p**-a - sx for p in self.points if 0 < p < x]

        def g(v):
            return (self.h((sx + v) ** (-1.0 / a)) - self.eh) * math.exp(-v)

        return integrate(g, 0.0, math.inf, self.cfg, points=pts) / a

    def value_upper(self, x: float) -> float:
        """exp(x**-a) int_x^inf (Eh - h) y**(-a-1) exp(-y**-a) dy, via s = y**-a."""
        a = self.alpha
        sx = x**-a
        pts = [p**-a for p in self.points if p > x]

        def g(s):
            y = s ** (-1.0 / a) if s > 0 else math.inf
            return (self.eh - self.h(y)) * math.exp(sx - s)

        return integrate(g, 0.0, sx, self.cfg, points=pts) / a


def solve_indicator(law: FrechetLaw, t: float) -> SteinSolution:
    """Closed-form solution for h = 1(. <= t)."""
    if not t > 0:
        raise DomainError(f"threshold t must be positive, got {t}")
    return SteinSolution(law=law, kind="indicator", t=float(t), eh=float(law.cdf(t)))


def solve_stein(
    law: FrechetLaw,
    h: Callable[[float], float],
    cfg: QuadConfig | None = None,
    *,
    switch: float | None = None,
    points: Iterable[float] = (),
) -> SteinSolution:
    """Quadrature-backed solution for a general scalar ``h`` with E|h(G)| finite.

    ``points`` lists discontinuities or kinks of ``h``.
    """
    cfg = cfg or QuadConfig()
    pts = tuple(sorted(float(p) for p in points))
    eh = law.expect(h, cfg, points=pts)
    return SteinSolution(
        law=law,
        kind="general",
        h=h,
        eh=eh,
        cfg=cfg,
        switch=law.median if switch is None else float(switch),
        points=pts,
    )


# --------------------------------------------------------------------------
# identities under the Frechet law


def zero_mean_residual(
    law: FrechetLaw, phi: Callable, dphi: Callable, cfg: QuadConfig | None = None, *, op=stein_op
) -> float:
    """E[T phi(G)]; vanishes for phi in the operator's domain."""
    return law.expect(lambda x: op(law, phi, dphi, x), cfg or IDENTITY_QUAD, vectorized=True)


def check_ibp(
    law: FrechetLaw,
    f: Callable,
    df: Callable,
    phi: Callable,
    dphi: Callable,
    cfg: QuadConfig | None = None,
    *,
    op=stein_op,
) -> float:
    """E[f(G) T phi(G)] + E[G**(alpha+1) f'(G) phi(G)]  (zero when integration by parts holds).

    All callables are numpy-vectorized.
    """
    cfg = cfg or IDENTITY_QUAD
    a = law.alpha
    lhs = law.expect(lambda x: f(x) * op(law, phi, dphi, x), cfg, vectorized=True)
    rhs = -law.expect(lambda x: x ** (a + 1) * df(x) * phi(x), cfg, vectorized=True)
    return lhs - rhs


def decays_at_infinity(law: FrechetLaw, phi: Callable, probes: Sequence[float] = (1e3, 1e6), tol: float = 1e-2) -> bool:
    """Heuristic membership probe: |phi(x) exp(-x**-alpha)| small and shrinking at large x.

    Not a proof; shipped test functions pass, constants do not.
    """
    vals = [abs(float(phi(np.float64(p)))) * math.exp(-p**-law.alpha) for p in probes]
    return vals[-1] <= tol and all(b <= a for a, b in zip(vals, vals[1:]))


# --------------------------------------------------------------------------
# maxima side


@dataclass(frozen=True)
class ScoreModel:
    normed: NormedMaximum

    @property
    def alpha(self) -> float:
        return self.normed.alpha


def stein_op_n(model: ScoreModel, phi: Callable, dphi: Callable, x):
    """T_n phi(x) on the open support of W_n.

    Uses x**alpha (alpha + 1 + x rho_n) = alpha (1 - k_n(x)), which is the
    same quantity written without cancellation.
    """
    nm = model.normed
    xa = np.asarray(x, dtype=float)
    if not np.all(nm._interior(xa)):
        raise DomainError("T_n is defined on the open support of W_n only")
    a = model.alpha
    out = dphi(xa) * xa ** (a + 1) + a * phi(xa) * (1.0 - nm.stein_kernel(xa))
    return float(out) if np.ndim(x) == 0 else out


def expect_stein_op_n(model: ScoreModel, phi: Callable, dphi: Callable, cfg: QuadConfig | None = None) -> float:
    """E[T_n phi(W_n)] by quadrature; phi, dphi vectorized."""
    nm = model.normed
    a = model.alpha

    def g(x):
        return dphi(x) * x ** (a + 1) + a * phi(x) * (1.0 - nm.stein_kernel(x))

    return nm.expect(g, cfg or IDENTITY_QUAD, vectorized=True)


def stein_identity_rhs(model: ScoreModel, sol: SteinSolution, cfg: QuadConfig | None = None) -> float:
    """alpha E[phi_h(W_n) (1 - W_n**alpha ((alpha+1)/alpha + W_n rho_n(W_n)/alpha))]."""
    nm = model.normed
    if not math.isclose(sol.alpha, model.alpha):
        raise DomainError("solution and model use different alpha")
    pts = [sol.t] if sol.kind == "indicator" else list(sol.points)

    def g(x):
        return sol.value(x) * nm.stein_kernel(x)

    return model.alpha * nm.expect(g, cfg or IDENTITY_QUAD, points=pts, vectorized=True)


# --------------------------------------------------------------------------
# identity suite


def _sigmoid(x):
    return expit(-2.0 * (x - 2.0))


def _dsigmoid(x):
    s = _sigmoid(x)
    return -2.0 * s * (1.0 - s)


# (name, phi, phi') -- bounded, smooth, vanishing at infinity
TEST_FAMILY: list[tuple[str, Callable, Callable]] = [
    ("exp(-x)", lambda x: np.exp(-x), lambda x: -np.exp(-x)),
    ("1/(1+x)", lambda x: 1.0 / (1.0 + x), lambda x: -1.0 / (1.0 + x) ** 2),
    ("exp(-x^2)", lambda x: np.exp(-x * x), lambda x: -2.0 * x * np.exp(-x * x)),
    ("x exp(-x)", lambda x: x * np.exp(-x), lambda x: (1.0 - x) * np.exp(-x)),
    ("sigmoid", _sigmoid, _dsigmoid),
]


@dataclass(frozen=True)
class IdentityResult:
    name: str
    max_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


def indicator_sup_residual(n_pairs: int = 100, grid: int = 1000, seed: int = 0) -> float:
    """max over random (alpha, t) in (0.2, 5)^2 of sup_grid |phi_h| - 1/alpha (<= 0 expected)."""
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for alpha, t in rng.uniform(0.2, 5.0, size=(n_pairs, 2)):
        sol = solve_indicator(FrechetLaw(alpha), t)
        xs = t * np.logspace(-3, 3, grid)
        worst = max(worst, float(np.max(np.abs(sol.value(xs)))) - 1.0 / alpha)
    return worst


def run_identity_suite(
    alphas: Sequence[float] = (0.5, 1.0, 2.0),
    *,
    ns: Sequence[int] = (2, 10, 100),
    thresholds: Sequence[float] = (0.5, 1.0, 2.0, 4.0),
    op=stein_op,
) -> list[IdentityResult]:
    """Residuals of the operator identities over a law/parameter grid.

    ``op`` replaces the Frechet operator (used to check the suite catches a
    broken one).
    """
    f, df = (lambda x: 1.0 / (1.0 + x)), (lambda x: -1.0 / (1.0 + x) ** 2)
    zero_mean, ibp, tn_mean, identity = [], [], [], []
    for alpha in alphas:
        law = FrechetLaw(alpha)
        for _, phi, dphi in TEST_FAMILY:
            zero_mean.append(abs(zero_mean_residual(law, phi, dphi, op=op)))
            ibp.append(abs(check_ibp(law, f, df, phi, dphi, op=op)))
        for n in ns:
            model = ScoreModel(norming(make_pareto(alpha), n))
            for _, phi, dphi in TEST_FAMILY:
                tn_mean.append(abs(expect_stein_op_n(model, phi, dphi)))
            for t in thresholds:
                rhs = stein_identity_rhs(model, solve_indicator(law, t))
                identity.append(abs(rhs - (model.normed.cdf(t) - law.cdf(t))))
    return [
        IdentityResult("zero mean E[T phi(G)]", max(zero_mean), 1e-8),
        IdentityResult("integration by parts", max(ibp), 1e-6),
        IdentityResult("zero mean E[T_n phi(W_n)] (Pareto)", max(tn_mean), 1e-7),
        IdentityResult("maxima Stein identity (Pareto, indicators)", max(identity), 1e-7),
        IdentityResult("indicator sup-norm <= 1/alpha", max(indicator_sup_residual(), 0.0), 1e-12),
    ]
