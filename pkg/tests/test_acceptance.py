"""Acceptance gate: one PASS/FAIL line per criterion.

Run alone with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``;
the lines are repeated in an "acceptance criteria" section of the pytest summary.
"""

import math
import sys

import numpy as np
import pytest

from frechet_stein.attraction import make_frechet_parent, make_pareto, norming
from frechet_stein.frechet import FrechetLaw
from frechet_stein.numerics import QuadConfig
from frechet_stein.rates import (
    McConfig,
    delta_n_monte_carlo,
    delta_n_quadrature,
    density_sup_distance,
    kolmogorov_distance,
    local_limit_functional,
    loglog_slope,
    pareto_local_limit_bound,
    remainder_estimate,
)
from frechet_stein.stein import (
    TEST_FAMILY,
    ScoreModel,
    check_ibp,
    expect_stein_op_n,
    indicator_sup_residual,
    solve_indicator,
    solve_stein,
    stein_identity_rhs,
    zero_mean_residual,
)

from oracles import frechet_cdf, frechet_pdf, pareto_wn_cdf, pareto_wn_pdf

ALPHAS = (0.5, 1.0, 2.0)
NS = (2, 10, 100, 1000)


def closed_form_delta(n):
    # written out again rather than imported from the package
    return 2.0 / (n - 1) * (1.0 - 1.0 / n) ** n


def test_1_pareto_exact_oracle(acceptance):
    worst = 0.0
    for alpha in ALPHAS:
        for n in NS:
            val = delta_n_quadrature(norming(make_pareto(alpha), n))
            worst = max(worst, abs(val / closed_form_delta(n) - 1))
    ok = worst <= 1e-7
    acceptance("1 Pareto Delta_n = 2/(n-1)(1-1/n)^n", ok, f"max rel err {worst:.2e} (tol 1e-7)")
    assert ok


def test_2_kolmogorov_bound(acceptance):
    slack_bound = slack_delta = -math.inf
    for alpha in ALPHAS:
        for n in NS:
            nm = norming(make_pareto(alpha), n)
            dist, _ = kolmogorov_distance(nm)
            slack_bound = max(slack_bound, dist - 2 * math.exp(-1) / (n - 1))
            slack_delta = max(slack_delta, dist - delta_n_quadrature(nm))
    ok = slack_bound <= 1e-9 and slack_delta <= 1e-7
    acceptance(
        "2 Kolmogorov <= 2e^-1/(n-1) and <= Delta_n",
        ok,
        f"max(dist - bound) {slack_bound:.3e}, max(dist - Delta_n) {slack_delta:.3e}",
    )
    assert ok


def test_3_identity_suite(acceptance):
    f, df = (lambda x: 1 / (1 + x)), (lambda x: -1 / (1 + x) ** 2)
    zero_mean = ibp = tn = 0.0
    for alpha in ALPHAS:
        law = FrechetLaw(alpha)
        for _, phi, dphi in TEST_FAMILY:
            zero_mean = max(zero_mean, abs(zero_mean_residual(law, phi, dphi)))
            ibp = max(ibp, abs(check_ibp(law, f, df, phi, dphi)))
        for n in (2, 10, 100):
            model = ScoreModel(norming(make_pareto(alpha), n))
            for _, phi, dphi in TEST_FAMILY:
                tn = max(tn, abs(expect_stein_op_n(model, phi, dphi)))
    ok = zero_mean <= 1e-8 and ibp <= 1e-6 and tn <= 1e-7
    acceptance(
        "3 identity suite",
        ok,
        f"|E T phi(G)| {zero_mean:.2e} (1e-8), IBP {ibp:.2e} (1e-6), |E T_n phi(W_n)| {tn:.2e} (1e-7)",
    )
    assert ok


def test_4_maxima_stein_identity(acceptance):
    worst = 0.0
    for alpha in ALPHAS:
        law = FrechetLaw(alpha)
        for n in (2, 10, 100):
            model = ScoreModel(norming(make_pareto(alpha), n))
            for t in (0.5, 1.0, 2.0, 4.0):
                rhs = stein_identity_rhs(model, solve_indicator(law, t))
                target = float(pareto_wn_cdf(alpha, n, t) - frechet_cdf(alpha, t))
                worst = max(worst, abs(rhs - target))
    ok = worst <= 1e-7
    acceptance("4 alpha E[phi_h(W_n) k_n(W_n)] = F_n(t) - Phi(t)", ok, f"max residual {worst:.2e} (tol 1e-7)")
    assert ok


def test_5_indicator_solution(acceptance):
    sup_excess = indicator_sup_residual(n_pairs=100, grid=1000, seed=0)
    rng = np.random.default_rng(5)
    disagreement = 0.0
    cfg = QuadConfig(1e-13, 1e-13, 4000)
    for idx in rng.choice(len(TEST_FAMILY), size=5, replace=True):
        alpha = float(rng.choice(ALPHAS))
        h = TEST_FAMILY[idx][1]
        sol = solve_stein(FrechetLaw(alpha), lambda x, h=h: float(h(np.float64(x))), cfg)
        for x in np.exp(rng.uniform(math.log(0.5), math.log(10), 50)):
            disagreement = max(disagreement, abs(sol.value_lower(x) - sol.value_upper(x)))
    ok = sup_excess <= 1e-12 and disagreement <= 1e-8
    acceptance(
        "5 indicator sup-norm <= 1/alpha; representations agree",
        ok,
        f"max(sup|phi| - 1/alpha) {sup_excess:.2e} (1e-12), representation gap {disagreement:.2e} (1e-8)",
    )
    assert ok


def test_6_rate_slope(acceptance):
    ns = [10, 100, 1000, 10_000]
    law = make_pareto(1.0)
    ks = [kolmogorov_distance(norming(law, n))[0] for n in ns]
    rs = [remainder_estimate(law, norming(law, n).a_n) for n in ns]
    s_k, s_r = loglog_slope(ns, ks), loglog_slope(ns, rs)
    ok = -1.05 <= s_k <= -0.95 and -1.1 <= s_r <= -0.9
    acceptance("6 log-log slopes", ok, f"kolmogorov {s_k:.4f} in [-1.05,-0.95], remainder {s_r:.4f} in [-1.1,-0.9]")
    assert ok


def test_7_zero_remainder_control(acceptance):
    worst = 0.0
    for alpha in ALPHAS:
        law = make_frechet_parent(alpha)
        for n in (2, 7, 100):
            nm = norming(law, n)
            vals = [
                delta_n_quadrature(nm),
                delta_n_monte_carlo(nm, McConfig(samples=10_000, seed=n))[0],
                kolmogorov_distance(nm)[0],
                density_sup_distance(nm)[0],
                remainder_estimate(law, nm.a_n),
            ]
            worst = max(worst, max(abs(v) for v in vals))
    ok = worst <= 1e-12
    acceptance("7 Frechet parent distances vanish", ok, f"max distance {worst:.2e} (tol 1e-12)")
    assert ok


@pytest.mark.slow
def test_8_monte_carlo(acceptance):
    nm = norming(make_pareto(1.0), 10)
    quad = delta_n_quadrature(nm)
    hits = 0
    for seed in range(40):
        est, se = delta_n_monte_carlo(nm, McConfig(samples=10**5, seed=seed))
        hits += abs(est - quad) <= 4 * se
    runs = [delta_n_monte_carlo(nm, McConfig(samples=10**5, seed=123, workers=w)) for w in (1, 2, 4, 8)]
    bitwise = all(r == runs[0] for r in runs)
    ok = hits >= 38 and bitwise
    acceptance("8 Monte Carlo vs quadrature", ok, f"{hits}/40 within 4 se (need 38); workers 1,2,4,8 bitwise equal: {bitwise}")
    assert ok


def local_limit_grid():
    """100 log-uniform u in (1, 20) for every (alpha, n) in {0.5,1,2} x {2,10,100}."""
    rng = np.random.default_rng(9)
    us = np.exp(rng.uniform(0.0, math.log(20.0), 100))
    return [(alpha, n, float(u)) for alpha in ALPHAS for n in (2, 10, 100) for u in us]


def test_9_local_limit(acceptance):
    violations = []
    for alpha, n, u in local_limit_grid():
        val = local_limit_functional(norming(make_pareto(alpha), n), u)
        excess = abs(val) - pareto_local_limit_bound(alpha, u)
        if excess > 1e-10:
            violations.append((excess, alpha, n, u))
    bound_ok = not violations

    dist, _ = density_sup_distance(norming(make_pareto(1.0), 10))
    xs = np.linspace(0.1, 60, 10**7)
    dense = float(np.max(np.abs(pareto_wn_pdf(1.0, 10, xs) - frechet_pdf(1.0, xs))))
    density_ok = abs(dist - dense) <= 1e-7

    if violations:
        worst = max(violations)
        detail = (
            f"bound violated at {len(violations)}/900 points, worst excess {worst[0]:.3e} "
            f"(alpha={worst[1]}, n={worst[2]}, u={worst[3]:.4f}); "
        )
    else:
        detail = "bound holds on 900 points; "
    detail += f"density sup {dist:.10f} vs dense grid {dense:.10f}"
    ok = bound_ok and density_ok
    acceptance("9 local-limit bound; density sup vs dense grid", ok, detail)
    assert density_ok, detail
    assert bound_ok, detail


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
