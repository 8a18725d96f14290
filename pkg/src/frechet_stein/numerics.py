"""Numerical kernel: adaptive quadrature, root finding, sup search and RNG streams.

Quadrature is an adaptive 7/15-point Gauss-Kronrod scheme with global
error control (the worst panel is bisected first). A semi-infinite upper
limit is handled by the map ``x = lo + t / (1 - t)``, ``t in [0, 1)``; the
Kronrod nodes never touch ``t = 1``.

Integrals against the Frechet weight go through ``y = x**-alpha`` which turns
``alpha x**(-alpha-1) exp(-x**-alpha) dx`` into ``exp(-y) dy`` and removes
the essential singularity at the origin; see :func:`frechet_weight_integral`
and :func:`power_substitution`.
"""

from __future__ import annotations

import heapq
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import InvalidInterval, NoBracket, NonConvergence

__all__ = [
    "QuadConfig",
    "RootConfig",
    "RngStream",
    "integrate",
    "integrate_with_error",
    "power_substitution",
    "frechet_weight_integral",
    "find_root",
    "maximize_abs",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class RootConfig:
    x_tol: float = 1e-12
    max_iter: int = 200

    def __post_init__(self):
        if not self.x_tol > 0:
            raise ValueError("x_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


# --------------------------------------------------------------------------
# Gauss-Kronrod 7/15 rule (QUADPACK qk15 constants)

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
_WK = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
# Gauss nodes sit at odd positions of the Kronrod layout (plus the centre).
_WG_FULL = np.zeros(15)
_WG_FULL[[1, 3, 5]] = _WG[:3]
_WG_FULL[[13, 11, 9]] = _WG[:3]
_WG_FULL[7] = _WG[3]


def _as_vector_fn(f: Callable, vectorized: bool) -> Callable[[np.ndarray], np.ndarray]:
    if vectorized:
        return lambda x: np.asarray(f(x), dtype=float)
    return lambda x: np.fromiter((f(float(v)) for v in x), dtype=float, count=len(x))


def _gk15(fv: Callable[[np.ndarray], np.ndarray], a: float, b: float):
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    vals = fv(centre + half * _NODES)
    resk = float(np.dot(_WK, vals))
    resg = float(np.dot(_WG_FULL, vals))
    resabs = float(np.dot(_WK, np.abs(vals)))
    resasc = float(np.dot(_WK, np.abs(vals - 0.5 * resk)))
    result = resk * half
    resabs *= abs(half)
    resasc *= abs(half)
    err = abs((resk - resg) * half)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > np.finfo(float).tiny / (50.0 * _EPS):
        err = max(50.0 * _EPS * resabs, err)
    if not math.isfinite(result):
        raise NonConvergence(f"non-finite integrand on [{a}, {b}]", result, math.inf)
    return result, err, resabs


def _adaptive(fv, edges: Sequence[float], cfg: QuadConfig) -> tuple[float, float]:
    heap: list[tuple[float, float, float, float, float]] = []
    total = 0.0
    total_err = 0.0
    total_abs = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        r, e, ra = _gk15(fv, a, b)
        heapq.heappush(heap, (-e, a, b, r, ra))
        total += r
        total_err += e
        total_abs += ra

    def tolerance() -> float:
        # Roundoff floor: asking for more than ~eps * int|f| cannot succeed.
        return max(cfg.abs_tol, cfg.rel_tol * abs(total), 50.0 * _EPS * total_abs)

    n_panels = len(heap)
    while total_err > tolerance():
        if n_panels >= cfg.max_subdivisions:
            raise NonConvergence(
                f"subdivision budget {cfg.max_subdivisions} exhausted "
                f"(estimate {total!r}, error bound {total_err:.3g})",
                total,
                total_err,
            )
        neg_e, a, b, r, ra = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        if not (a < mid < b):
            raise NonConvergence(
                f"panel [{a!r}, {b!r}] cannot be split further", total, total_err
            )
        r1, e1, ra1 = _gk15(fv, a, mid)
        r2, e2, ra2 = _gk15(fv, mid, b)
        heapq.heappush(heap, (-e1, a, mid, r1, ra1))
        heapq.heappush(heap, (-e2, mid, b, r2, ra2))
        total += r1 + r2 - r
        total_err += e1 + e2 + neg_e
        total_abs += ra1 + ra2 - ra
        n_panels += 1
        if n_panels % 64 == 0:
            # running sums drift; resynchronise
            total = math.fsum(p[3] for p in heap)
            total_err = math.fsum(-p[0] for p in heap)
            total_abs = math.fsum(p[4] for p in heap)
    return math.fsum(p[3] for p in heap), math.fsum(-p[0] for p in heap)


def integrate_with_error(
    f: Callable,
    lo: float,
    hi: float,
    cfg: QuadConfig | None = None,
    *,
    points: Iterable[float] = (),
    vectorized: bool = False,
) -> tuple[float, float]:
    """Adaptive Gauss-Kronrod integral of ``f`` over ``(lo, hi)``.

    Returns ``(value, error_bound)``. ``hi`` may be ``math.inf``. ``points``
    are interior breakpoints (kinks, jumps) that panels must not straddle.
    With ``vectorized=True`` ``f`` receives and returns numpy arrays.
    """
    cfg = cfg or QuadConfig()
    lo = float(lo)
    hi = float(hi)
    if not math.isfinite(lo) or math.isnan(hi) or not lo < hi:
        raise InvalidInterval(f"need finite lo < hi, got ({lo}, {hi})")
    fv = _as_vector_fn(f, vectorized)
    pts = sorted({float(p) for p in points if lo < p < hi})

    if math.isinf(hi):
        def g(t: np.ndarray) -> np.ndarray:
            s = 1.0 - t
            # a node can round onto t == 1; its weight is below resolution
            s_safe = np.where(s > 0, s, 1.0)
            return np.where(s > 0, fv(lo + t / s_safe) / (s_safe * s_safe), 0.0)

        edges = [0.0] + [(p - lo) / (1.0 + p - lo) for p in pts] + [1.0]
        return _adaptive(g, edges, cfg)
    return _adaptive(fv, [lo, *pts, hi], cfg)


def integrate(
    f: Callable,
    lo: float,
    hi: float,
    cfg: QuadConfig | None = None,
    *,
    points: Iterable[float] = (),
    vectorized: bool = False,
) -> float:
    """Like :func:`integrate_with_error` but returns only the value."""
    return integrate_with_error(f, lo, hi, cfg, points=points, vectorized=vectorized)[0]


def power_substitution(
    g: Callable,
    alpha: float,
    lo: float,
    hi: float,
    cfg: QuadConfig | None = None,
    *,
    points: Iterable[float] = (),
    vectorized: bool = False,
) -> float:
    """Integrate ``g`` over ``(lo, hi) subset (0, inf]`` in the variable ``z = x**-alpha``.

    ``int g(x) dx = int g(z**(-1/alpha)) z**(-1/alpha - 1) / alpha dz`` over
    ``(hi**-alpha, lo**-alpha)``. Regularly varying tails of index ``-alpha-1``
    become bounded integrands on a finite (or exponentially damped) range.
    """
    if lo < 0 or not lo < hi:
        raise InvalidInterval(f"need 0 <= lo < hi, got ({lo}, {hi})")
    zlo = 0.0 if math.isinf(hi) else hi ** -alpha
    zhi = math.inf if lo == 0 else lo ** -alpha
    zpts = [p ** -alpha for p in points if lo < p < hi]
    gv = _as_vector_fn(g, vectorized)

    def integrand(z: np.ndarray) -> np.ndarray:
        x = z ** (-1.0 / alpha)
        with np.errstate(over="ignore", invalid="ignore"):
            out = gv(x) * x / (alpha * z)
        # z so close to 0 that x overflows: the panel weight there is ~0.
        return np.where(np.isfinite(x), out, 0.0)

    return integrate(integrand, zlo, zhi, cfg, points=zpts, vectorized=True)


def frechet_weight_integral(
    h: Callable,
    alpha: float,
    cfg: QuadConfig | None = None,
    *,
    lo: float = 0.0,
    hi: float = math.inf,
    points: Iterable[float] = (),
    vectorized: bool = False,
) -> float:
    """``int_lo^hi h(x) phi_alpha(x) dx`` computed as ``int h(y**(-1/alpha)) exp(-y) dy``.

    ``points`` are breakpoints in the original ``x`` variable.
    """
    if lo < 0 or not lo < hi:
        raise InvalidInterval(f"need 0 <= lo < hi, got ({lo}, {hi})")
    ylo = 0.0 if math.isinf(hi) else hi ** -alpha
    yhi = math.inf if lo == 0 else lo ** -alpha
    ypts = [p ** -alpha for p in points if lo < p < hi]
    hv = _as_vector_fn(h, vectorized)

    def integrand(y: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", over="ignore"):
            x = y ** (-1.0 / alpha)
        return hv(x) * np.exp(-y)

    return integrate(integrand, ylo, yhi, cfg, points=ypts, vectorized=True)


# --------------------------------------------------------------------------
# roots and maxima

def find_root(f: Callable[[float], float], lo: float, hi: float, cfg: RootConfig | None = None) -> float:
    """Root of ``f`` on a sign-changing bracket ``[lo, hi]`` (Brent's method)."""
    cfg = cfg or RootConfig()
    if not lo < hi:
        raise InvalidInterval(f"need lo < hi, got ({lo}, {hi})")
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return float(lo)
    if fhi == 0.0:
        return float(hi)
    if np.sign(flo) == np.sign(fhi):
        raise NoBracket(f"f({lo})={flo:.3g} and f({hi})={fhi:.3g} have the same sign")
    try:
        return float(
            optimize.brentq(f, lo, hi, xtol=cfg.x_tol, rtol=4 * _EPS, maxiter=cfg.max_iter)
        )
    except RuntimeError as exc:
        raise NonConvergence(str(exc)) from exc


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(g: Callable[[float], float], a: float, b: float, cfg: RootConfig) -> tuple[float, float]:
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(cfg.max_iter):
        if b - a <= cfg.x_tol:
            break
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - _INVPHI * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _INVPHI * (b - a)
            gd = g(d)
    return (c, gc) if gc >= gd else (d, gd)


def maximize_abs(
    f: Callable,
    lo: float,
    hi: float,
    grid_points: int = 512,
    cfg: RootConfig | None = None,
    *,
    vectorized: bool = False,
    max_candidates: int = 64,
) -> tuple[float, float]:
    """Locate ``sup |f|`` on ``[lo, hi]``: grid scan, then golden-section
    refinement in the two cells around each grid local maximum.

    Returns ``(x_star, |f(x_star)|)``; the value is a lower bound on the sup.
    """
    cfg = cfg or RootConfig()
    if not lo < hi:
        raise InvalidInterval(f"need lo < hi, got ({lo}, {hi})")
    if grid_points < 16:
        raise ValueError("grid_points must be >= 16")
    xs = np.linspace(lo, hi, grid_points)
    vals = np.abs(_as_vector_fn(f, vectorized)(xs))
    vals = np.where(np.isnan(vals), -np.inf, vals)

    left = np.concatenate([[-np.inf], vals[:-1]])
    right = np.concatenate([vals[1:], [-np.inf]])
    cand = np.flatnonzero((vals >= left) & (vals >= right) & (vals > 0))
    if cand.size > max_candidates:
        cand = cand[np.argsort(vals[cand])[::-1][:max_candidates]]

    best = int(np.argmax(vals))
    x_best, m_best = float(xs[best]), float(vals[best])

    if vectorized:
        def g(x: float) -> float:
            return float(abs(np.asarray(f(np.array([x])))[0]))
    else:
        def g(x: float) -> float:
            return abs(float(f(x)))

    for i in cand:
        a = xs[max(i - 1, 0)]
        b = xs[min(i + 1, grid_points - 1)]
        x, m = _golden_max(g, float(a), float(b), cfg)
        if m > m_best:
            x_best, m_best = x, m
    return x_best, m_best


# --------------------------------------------------------------------------
# random streams

@dataclass
class RngStream:
    """Counter-based uniform(0, 1) stream keyed by ``(seed, stream_id)``.

    Backed by Philox-4x64 with the pair as its 128-bit key, so each stream is
    reproducible on any platform and independent of how work is scheduled.
    Draws lie strictly inside (0, 1).
    """

    seed: int
    stream_id: int = 0
    _bitgen: np.random.Philox = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not 0 <= v < 2**64:
                raise ValueError(f"{name} must be a 64-bit unsigned integer")
        self._bitgen = np.random.Philox(key=np.array([self.seed, self.stream_id], dtype=np.uint64))

    def uniforms(self, size: int) -> np.ndarray:
        bits = self._bitgen.random_raw(size)
        return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53

    def uniform(self) -> float:
        return float(self.uniforms(1)[0])
