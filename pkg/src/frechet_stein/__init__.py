"""Stein's method for the Frechet distribution: explicit finite-n rates for
renormalized sample maxima."""

from .attraction import (
    MaxLaw,
    NormedMaximum,
    NormingMode,
    make_burr,
    make_frechet_parent,
    make_law,
    make_pareto,
    norming,
    slow_variation_L,
)
from .errors import DomainError, InvalidInterval, NoBracket, NonConvergence
from .frechet import FrechetLaw
from .numerics import QuadConfig, RngStream, RootConfig, find_root, integrate, maximize_abs
from .rates import (
    McConfig,
    RateReport,
    build_report,
    delta_n_monte_carlo,
    delta_n_pareto_exact,
    delta_n_quadrature,
    density_sup_distance,
    kolmogorov_distance,
    local_limit_functional,
    remainder_estimate,
)
from .stein import (
    ScoreModel,
    SteinSolution,
    check_ibp,
    solve_indicator,
    solve_stein,
    stein_identity_rhs,
    stein_op,
    stein_op_n,
)

__version__ = "0.1.0"
