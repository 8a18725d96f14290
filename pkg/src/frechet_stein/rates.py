"""Finite-n convergence quantities for W_n towards Phi_alpha.

Everything here is a concrete number for a given n: the Stein bound
Delta_n = E|k_n(W_n)| (by quadrature and by Monte Carlo), the exact
Kolmogorov and density sup-distances, the local-limit functional
E[phi_u(W_n)], and a finite-probe surrogate for the slow-variation
remainder r_n = g(a_n).
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .attraction import MaxLaw, NormedMaximum, NormingMode, norming, slow_variation_L
from .errors import DomainError, NonConvergence
from .frechet import FrechetLaw
from .numerics import QuadConfig, RngStream, RootConfig, find_root, maximize_abs, power_substitution

RATE_QUAD = QuadConfig(abs_tol=1e-13, rel_tol=1e-12, max_subdivisions=4000)
DEFAULT_PROBES = (0.5, 1.0, 2.0, 4.0)
# grid in probability space: covers (0, Q(1 - 1e-10)) evenly in mass
_P_HI = 1.0 - 1e-10
_P_LO = 1e-300
# fixed Monte Carlo chunk: each chunk is one RNG stream
MC_CHUNK = 1 << 15


@dataclass(frozen=True)
class McConfig:
    samples: int = 10**6
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1000:
            raise ValueError("need at least 1000 samples for a standard error")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


# --------------------------------------------------------------------------
# Delta_n


def kernel_roots(nm: NormedMaximum, grid: int = 400, cfg: RootConfig | None = None) -> list[float]:
    """Sign changes of the Stein kernel, scanned on a W_n-quantile grid and polished."""
    p = np.linspace(0.0, 1.0, grid + 2)[1:-1]
    q = -np.expm1(np.log(p) / nm.n)
    xs = np.unique((nm.law.isf(q) - nm.b_n) / nm.a_n)
    k = nm.stein_kernel(xs)
    roots = []
    for i in np.flatnonzero(np.sign(k[:-1]) * np.sign(k[1:]) < 0):
        roots.append(find_root(lambda x: float(nm.stein_kernel(x)), float(xs[i]), float(xs[i + 1]), cfg))
    roots.extend(float(x) for x in xs[k == 0])
    return sorted(roots)


def delta_n_quadrature(nm: NormedMaximum, cfg: QuadConfig | None = None) -> float:
    """Delta_n = E|k_n(W_n)|, split at the kernel's sign changes."""
    return nm.expect(
        lambda x: np.abs(nm.stein_kernel(x)), cfg or RATE_QUAD, points=kernel_roots(nm), vectorized=True
    )


def delta_n_pareto_exact(n: int) -> float:
    """Closed form 2/(n-1) (1-1/n)**n for Pareto maxima; free of alpha."""
    if n < 2:
        raise DomainError("n must be >= 2")
    return 2.0 / (n - 1) * math.exp(n * math.log1p(-1.0 / n))


def pareto_kolmogorov_bound(n: int) -> float:
    """2 e**-1 / (n-1)."""
    if n < 2:
        raise DomainError("n must be >= 2")
    return 2.0 * math.exp(-1.0) / (n - 1)


def _mc_chunk(nm: NormedMaximum, seed: int, index: int, size: int) -> tuple[float, float]:
    w = nm.sample_many(RngStream(seed, index), size)
    v = np.abs(nm.stein_kernel(w))
    return math.fsum(v), math.fsum(v * v)


def delta_n_monte_carlo(nm: NormedMaximum, mc: McConfig | None = None) -> tuple[float, float]:
    """Monte Carlo Delta_n with its standard error.

    Samples are cut into fixed chunks of ``MC_CHUNK`` draws, chunk ``i``
    drawing from ``RngStream(seed, i)``; chunk sums are combined in index
    order, so the result is bitwise independent of ``workers``.
    """
    mc = mc or McConfig()
    sizes = [MC_CHUNK] * (mc.samples // MC_CHUNK)
    if mc.samples % MC_CHUNK:
        sizes.append(mc.samples % MC_CHUNK)
    jobs = list(enumerate(sizes))
    if mc.workers == 1:
        parts = [_mc_chunk(nm, mc.seed, i, s) for i, s in jobs]
    else:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            parts = list(pool.map(lambda job: _mc_chunk(nm, mc.seed, *job), jobs))
    n = mc.samples
    s1 = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    mean = s1 / n
    var = max(s2 - s1 * s1 / n, 0.0) / (n - 1)
    return mean, math.sqrt(var / n)


# --------------------------------------------------------------------------
# sup-distances


def _prob_grid_sup(nm: NormedMaximum, diff, grid: int, cfg: RootConfig | None) -> tuple[float, float]:
    target = FrechetLaw(nm.alpha)

    def on_p(p):
        return diff(target, np.power(-np.log(np.asarray(p, dtype=float)), -1.0 / nm.alpha))

    p_star, dist = maximize_abs(on_p, _P_LO, _P_HI, grid, cfg, vectorized=True)
    return dist, float(target.quantile(p_star))


def kolmogorov_distance(nm: NormedMaximum, grid: int = 512, cfg: RootConfig | None = None) -> tuple[float, float]:
    """sup_x |F(a_n x)**n - Phi_alpha(x)| and its location."""
    return _prob_grid_sup(nm, lambda g, x: nm.cdf(x) - g.cdf(x), grid, cfg)


def density_sup_distance(nm: NormedMaximum, grid: int = 512, cfg: RootConfig | None = None) -> tuple[float, float]:
    """sup_u |f_n(u) - phi_alpha(u)| and its location."""
    return _prob_grid_sup(nm, lambda g, x: nm.pdf(x) - g.pdf(x), grid, cfg)


# --------------------------------------------------------------------------
# local limit


def local_limit_functional(nm: NormedMaximum, u: float, cfg: QuadConfig | None = None) -> float:
    """E[phi_u(W_n)] = phi_alpha(u)/alpha (int_u^inf exp(w**-alpha) f_n(w) dw - 1).

    Evaluated as u**(-alpha-1) (int_u^inf exp(w**-alpha - u**-alpha) f_n(w) dw
    - exp(-u**-alpha)), which keeps the exponent non-positive.
    """
    if not u > 0:
        raise DomainError("u must be positive")
    a = nm.alpha
    su = u**-a
    lo, hi = nm.support
    start = max(u, lo, 0.0)
    if start < hi:
        def g(w):
            fw = nm.pdf(w)
            return np.where(fw > 0, np.exp(w**-a - su) * fw, 0.0)

        integral = power_substitution(g, a, start, hi, cfg or RATE_QUAD, vectorized=True)
    else:
        integral = 0.0
    return u ** (-a - 1) * (integral - math.exp(-su))


def pareto_local_limit_bound(alpha: float, u: float) -> float:
    """(1/alpha) |u**-alpha - 1| phi_alpha(u)."""
    return abs(u**-alpha - 1.0) * float(FrechetLaw(alpha).pdf(u)) / alpha


def kappa_alpha_estimate(law: MaxLaw, ns: Iterable[int], us: Iterable[float], mode=NormingMode.PAPER) -> float:
    """max over the (u, n) grid of |E[phi_u(W_n)]|; reported, never asserted."""
    us = list(us)
    best = 0.0
    for n in ns:
        nm = norming(law, n, mode)
        best = max(best, max(abs(local_limit_functional(nm, u)) for u in us))
    return best


# --------------------------------------------------------------------------
# slow variation remainder


def remainder_estimate(law: MaxLaw, a_n: float, probes: Sequence[float] = DEFAULT_PROBES) -> float:
    """max over probes x of |L(a_n x)/L(a_n) - 1|, a finite stand-in for g(a_n)."""
    if any(p <= 0 for p in probes):
        raise DomainError("probes must be positive")
    if a_n * min(probes) <= law.support_lo:
        raise DomainError("a_n * min(probe) must exceed the support's lower end")
    base = slow_variation_L(law, a_n)
    return max(abs(slow_variation_L(law, a_n * x) / base - 1.0) for x in probes)


def loglog_slope(ns: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of log(values) on log(ns)."""
    return float(np.polyfit(np.log(ns), np.log(values), 1)[0])


# --------------------------------------------------------------------------
# reports

CSV_COLUMNS = (
    "law", "alpha", "n", "a_n", "delta_quad", "delta_mc", "delta_mc_stderr",
    "kolmogorov", "ks_argmax", "paper_bound", "density_sup", "r_n",
)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


@dataclass
class RateReport:
    law_name: str
    alpha: float
    n: int
    a_n: float
    delta_n_quad: float = math.nan
    delta_n_mc: float = math.nan
    delta_n_mc_stderr: float = math.nan
    kolmogorov: float = math.nan
    kolmogorov_argmax: float = math.nan
    paper_bound: float | None = None
    density_sup: float = math.nan
    r_n: float = math.nan
    errors: dict[str, str] = field(default_factory=dict)

    @property
    def rate_ratio(self) -> float:
        """kolmogorov / r_n: the empirical constant hidden in O(r_n)."""
        return self.kolmogorov / self.r_n if self.r_n else math.nan

    def row(self) -> list[str]:
        return [
            self.law_name, _fmt(self.alpha), _fmt(self.n), _fmt(self.a_n),
            _fmt(self.delta_n_quad), _fmt(self.delta_n_mc), _fmt(self.delta_n_mc_stderr),
            _fmt(self.kolmogorov), _fmt(self.kolmogorov_argmax), _fmt(self.paper_bound),
            _fmt(self.density_sup), _fmt(self.r_n),
        ]

    @classmethod
    def from_row(cls, row: Sequence[str]) -> RateReport:
        d = dict(zip(CSV_COLUMNS, row))
        return cls(
            law_name=d["law"], alpha=float(d["alpha"]), n=int(d["n"]), a_n=float(d["a_n"]),
            delta_n_quad=float(d["delta_quad"]), delta_n_mc=float(d["delta_mc"]),
            delta_n_mc_stderr=float(d["delta_mc_stderr"]), kolmogorov=float(d["kolmogorov"]),
            kolmogorov_argmax=float(d["ks_argmax"]),
            paper_bound=float(d["paper_bound"]) if d["paper_bound"] else None,
            density_sup=float(d["density_sup"]), r_n=float(d["r_n"]),
        )


def reports_to_csv(reports: Iterable[RateReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


def reports_from_csv(text: str) -> list[RateReport]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError("unexpected CSV header")
    return [RateReport.from_row(r) for r in rows[1:]]


def write_reports(reports: Iterable[RateReport], path: str | Path) -> None:
    Path(path).write_text(reports_to_csv(reports), encoding="utf-8")


def build_report(
    law: MaxLaw,
    n: int,
    mode: NormingMode | str = NormingMode.PAPER,
    *,
    quad: QuadConfig | None = None,
    mc: McConfig | None = None,
    grid: int = 512,
    probes: Sequence[float] = DEFAULT_PROBES,
) -> RateReport:
    """All rate quantities for one (law, n).

    A failing sub-computation leaves its field NaN and records the error
    message under the field name in ``errors``; norming failures propagate.
    """
    nm = norming(law, n, mode)
    rep = RateReport(law_name=law.name, alpha=law.alpha, n=n, a_n=nm.a_n)
    if law.name == "pareto":
        rep.paper_bound = pareto_kolmogorov_bound(n)

    def attempt(name, fn):
        try:
            return fn()
        except (NonConvergence, DomainError, ValueError, ArithmeticError) as exc:
            rep.errors[name] = f"{type(exc).__name__}: {exc}"
            return None

    out = attempt("delta_quad", lambda: delta_n_quadrature(nm, quad))
    if out is not None:
        rep.delta_n_quad = out
    out = attempt("delta_mc", lambda: delta_n_monte_carlo(nm, mc))
    if out is not None:
        rep.delta_n_mc, rep.delta_n_mc_stderr = out
    out = attempt("kolmogorov", lambda: kolmogorov_distance(nm, grid))
    if out is not None:
        rep.kolmogorov, rep.kolmogorov_argmax = out
    out = attempt("density_sup", lambda: density_sup_distance(nm, grid))
    if out is not None:
        rep.density_sup = out[0]
    out = attempt("r_n", lambda: remainder_estimate(law, nm.a_n, probes))
    if out is not None:
        rep.r_n = out
    return rep
