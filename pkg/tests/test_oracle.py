"""Direct dynamic-programming evaluation of the speed-space value function.

The oracle minimizes the action over explicit ray topologies, with no PDE
march involved, so it cross-checks both the grid solver and the closed
form on an independent route.
"""

import numpy as np
import pytest

from terrace import (
    DecayRate,
    INFINITE,
    ModelParams,
    build_rate,
    build_underline_rate,
    check_theorem12,
    piecewise_rate,
    rho_nlp_closed,
    solve_rho_grid,
    solve_rho_oracle,
)
from terrace.hj import single_rate_profile

from conftest import FIG1_BASE


def test_oracle_exact_for_constant_rate():
    rate = piecewise_rate((), (1.1,))
    s = np.linspace(0.0, 5.0, 41)
    for lam in (INFINITE, DecayRate.finite(0.5), DecayRate.finite(2.5)):
        orc = solve_rho_oracle(rate, 0.6, lam, s)
        exact = single_rate_profile(s, 0.6, 1.1, lam)
        assert np.max(np.abs(orc.values - exact)) < 1e-10


def test_oracle_matches_closed_profile_fig1a(fig1a_params, fig1a_ctx):
    rate = build_rate(fig1a_params, fig1a_ctx, 1.0)
    s = np.linspace(0.0, fig1a_ctx.c1, 33)
    orc = solve_rho_oracle(rate, 0.6, INFINITE, s)
    prof = rho_nlp_closed(fig1a_params, fig1a_ctx.c1, fig1a_ctx.c2, INFINITE)
    exact = np.array([seg_eval(prof, x) for x in s])
    assert np.max(np.abs(orc.values - exact)) < 1e-7


def seg_eval(prof, x):
    for seg in prof.segments:
        if seg.lo - 1e-12 <= x <= seg.hi + 1e-12:
            return seg(x)
    return prof(x)


def test_oracle_matches_closed_profile_branch1():
    p = ModelParams(d1=1.0, d3=0.6, r1=1.6, r3=1.1, a12=1.2, a13=1.1,
                    a21=0.01, a23=1.1, a31=0.02, a32=0.4)
    ctx = check_theorem12(p, INFINITE).context
    rate = build_rate(p, ctx, 1.0)
    s = np.linspace(0.0, ctx.c1, 33)
    orc = solve_rho_oracle(rate, 0.6, INFINITE, s)
    prof = rho_nlp_closed(p, ctx.c1, ctx.c2, INFINITE)
    exact = np.array([seg_eval(prof, x) for x in s])
    assert np.max(np.abs(orc.values - exact)) < 1e-6


def test_oracle_matches_grid_with_valley_rate():
    # a31 > a32 makes the middle band slower than the wake band, so the
    # optimal path can dip to the slow ray and ride it
    p = ModelParams(**{**FIG1_BASE, "a31": 0.45, "a32": 0.05})
    chk = check_theorem12(p, INFINITE)
    assert chk.ok
    rate = build_rate(p, chk.context, 1.0)
    assert rate.values[0] > rate.values[1]
    sol = solve_rho_grid(rate, 0.6, INFINITE, n=2048)
    s = np.linspace(0.0, chk.context.c1, 33)
    orc = solve_rho_oracle(rate, 0.6, INFINITE, s)
    assert np.max(np.abs(orc.values - sol(s))) < 1e-2


def test_oracle_matches_grid_underline_rate(fig1a_params, fig1a_ctx):
    b3 = 1.2904189009123703
    rate = build_underline_rate(fig1a_params, fig1a_ctx, b3)
    sol = solve_rho_grid(rate, 0.6, INFINITE, n=2048)
    s = np.linspace(0.0, fig1a_ctx.c1, 33)
    orc = solve_rho_oracle(rate, 0.6, INFINITE, s)
    assert np.max(np.abs(orc.values - sol(s))) < 1e-2


def test_oracle_matches_grid_finite_decay(fig1a_params, fig1a_ctx):
    lam = DecayRate.finite(1.0)
    rate = build_rate(fig1a_params, fig1a_ctx, 1.0)
    sol = solve_rho_grid(rate, 0.6, lam, n=2048)
    s = np.linspace(0.0, fig1a_ctx.c1, 33)
    orc = solve_rho_oracle(rate, 0.6, lam, s)
    assert np.max(np.abs(orc.values - sol(s))) < 1e-2


def test_oracle_slide_value(fig1a_params, fig1a_ctx):
    # interior point of the wake band: the optimal topology slides along
    # the u1 ray before descending, reproducing the affine piece
    rate = build_rate(fig1a_params, fig1a_ctx, 1.0)
    orc = solve_rho_oracle(rate, 0.6, INFINITE, np.array([2.0]))
    prof = rho_nlp_closed(fig1a_params, fig1a_ctx.c1, fig1a_ctx.c2, INFINITE)
    assert orc.values[0] == pytest.approx(prof.segments[2](2.0), abs=1e-8)
    assert orc.values[0] == pytest.approx(0.59769, abs=1e-4)
