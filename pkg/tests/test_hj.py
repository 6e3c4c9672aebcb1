"""Variational-inequality solver in speed space and its building blocks."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from terrace import (
    DecayRate,
    INFINITE,
    ModelParams,
    alpha3,
    beta3,
    build_rate,
    build_underline_rate,
    c_llw,
    free_boundary,
    kanon_speed_bound,
    piecewise_rate,
    reference_solutions,
    s_nlp_closed,
    sigma3,
    solve_rho_grid,
    underline_beta3,
)
from terrace.hj import (
    RateProfile,
    Segment,
    SpeedFunction,
    default_s_max,
    single_rate_profile,
)

from conftest import FIG1_BASE


def test_build_rate_fig1a(fig1a_params, fig1a_ctx):
    rate = build_rate(fig1a_params, fig1a_ctx, 1.0)
    assert rate.breakpoints == (fig1a_ctx.c2, fig1a_ctx.c1)
    assert rate.values == pytest.approx((0.66, 0.99, 1.1))
    assert rate.base_rate == pytest.approx(1.1)
    assert rate.g_support == pytest.approx(fig1a_ctx.c1)


def test_build_rate_no_direct_pressure(fig1a_params, fig1a_ctx):
    # mu = 0 removes the wake band, leaving a two-piece rate
    rate = build_rate(fig1a_params, fig1a_ctx, 0.0)
    assert rate.breakpoints == (fig1a_ctx.c2,)
    assert rate.values == pytest.approx((0.66, 1.1))
    assert rate.g_support == pytest.approx(fig1a_ctx.c2)


def test_build_rate_constant(fig1a_ctx):
    p = ModelParams(**{**FIG1_BASE, "a31": 0.0, "a32": 0.0})
    rate = build_rate(p, fig1a_ctx, 1.0)
    assert rate.breakpoints == ()
    assert rate.values == (1.1,)
    assert rate.g_support == 0.0


def test_build_rate_mu_validation(fig1a_params, fig1a_ctx):
    with pytest.raises(ValueError):
        build_rate(fig1a_params, fig1a_ctx, -0.1)
    with pytest.raises(ValueError):
        build_rate(fig1a_params, fig1a_ctx, 1.1)


def test_build_underline_rate(fig1a_params, fig1a_ctx):
    b3 = 1.2904189009123703
    rate = build_underline_rate(fig1a_params, fig1a_ctx, b3)
    assert rate.breakpoints == pytest.approx(
        (b3, fig1a_ctx.c2, fig1a_ctx.c1))
    assert rate.values == pytest.approx((0.55, 0.66, 0.99, 1.1))
    with pytest.raises(ValueError):
        build_underline_rate(fig1a_params, fig1a_ctx, fig1a_ctx.c2)
    with pytest.raises(ValueError):
        build_underline_rate(fig1a_params, fig1a_ctx, 0.0)


def test_rate_profile_evaluation(fig1a_params, fig1a_ctx):
    rate = build_rate(fig1a_params, fig1a_ctx, 1.0)
    c2, c1 = fig1a_ctx.c2, fig1a_ctx.c1
    # half-open pieces: the left value rules at a breakpoint
    assert rate(0.0) == pytest.approx(0.66)
    assert rate(c2) == pytest.approx(0.66)
    assert rate(c2 + 1e-9) == pytest.approx(0.99)
    assert rate(c1) == pytest.approx(0.99)
    assert rate(c1 + 1e-9) == pytest.approx(1.1)
    assert rate(100.0) == pytest.approx(1.1)
    arr = rate(np.array([0.0, c2, c2 + 1e-9, c1, 10.0]))
    assert arr == pytest.approx([0.66, 0.66, 0.99, 0.99, 1.1])


def test_rate_profile_validation():
    with pytest.raises(ValueError):
        RateProfile((2.0, 1.0), (0.5, 0.7, 1.0), 1.0, 2.0)
    with pytest.raises(ValueError):
        RateProfile((1.0,), (1.5, 1.0), 1.0, 1.0)  # piece above base
    with pytest.raises(ValueError):
        RateProfile((1.0,), (0.5, 0.9), 1.0, 1.0)  # tail must equal base


def test_piecewise_rate_merges_equal_pieces():
    rate = piecewise_rate((1.0, 2.0), (0.7, 0.7, 0.7))
    assert rate.breakpoints == ()
    assert rate.g_support == 0.0
    rate = piecewise_rate((1.0, 2.0), (0.5, 0.7, 0.7))
    assert rate.breakpoints == (1.0,)
    assert rate.g_support == 1.0


def test_single_rate_profile_shapes():
    s = np.linspace(0.0, 6.0, 601)
    # steep tail: parabola with sharp support point
    v = single_rate_profile(s, 0.6, 1.1, INFINITE)
    assert np.all(v[s <= 2 * math.sqrt(0.66)] == 0.0)
    i = np.argmin(np.abs(s - 4.0))
    assert v[i] == pytest.approx(16.0 / 2.4 - 1.1, rel=1e-12)
    # shallow tail: affine beyond the speed, zero before
    lam = DecayRate.finite(0.5)
    v = single_rate_profile(s, 0.6, 1.1, lam)
    sig = 0.6 * 0.5 + 1.1 / 0.5
    assert np.all(v[s <= sig] == 0.0)
    assert v[-1] == pytest.approx(0.5 * 6.0 - (0.6 * 0.25 + 1.1), rel=1e-12)


def test_default_s_max(fig1a_params, fig1a_ctx):
    rate = build_rate(fig1a_params, fig1a_ctx, 1.0)
    smax = default_s_max(rate, 0.6, INFINITE)
    assert smax == pytest.approx(2.0 * fig1a_ctx.c1, rel=1e-12)
    assert smax > rate.g_support


def test_solve_validation(fig1a_params, fig1a_ctx):
    rate = build_rate(fig1a_params, fig1a_ctx, 1.0)
    with pytest.raises(ValueError):
        solve_rho_grid(rate, 0.6, INFINITE, n=100)
    with pytest.raises(ValueError):
        solve_rho_grid(rate, 0.6, INFINITE, s_max=1.0)
    with pytest.raises(ValueError):
        solve_rho_grid(rate, 0.6, INFINITE, right_value=-1.0)


def test_constant_rate_recovers_single_rate_speeds():
    rate = piecewise_rate((), (1.1,))
    sol = solve_rho_grid(rate, 0.6, INFINITE, n=2048)
    assert abs(free_boundary(sol) - 1.624807680927192) < 1e-2
    sol = solve_rho_grid(rate, 0.6, DecayRate.finite(0.5), n=2048)
    assert abs(free_boundary(sol) - 2.5) < 1e-2


def test_solution_structure(fig1a_params, fig1a_ctx):
    rate = build_rate(fig1a_params, fig1a_ctx, 1.0)
    sol = solve_rho_grid(rate, 0.6, INFINITE, n=2048)
    assert sol.values[0] == 0.0
    assert np.all(sol.values >= -1e-12)
    assert np.all(np.diff(sol.values) >= -1e-10)
    # far field matches the single-rate datum
    datum = single_rate_profile(np.array([sol.grid[-1]]), 0.6, 1.1,
                                INFINITE)[0]
    assert sol.values[-1] == pytest.approx(datum, rel=1e-12)


def test_grid_matches_closed_form(fig1a_params, fig1a_ctx):
    rate = build_rate(fig1a_params, fig1a_ctx, 1.0)
    sol = solve_rho_grid(rate, 0.6, INFINITE)
    closed = s_nlp_closed(fig1a_params, fig1a_ctx.c1, fig1a_ctx.c2, INFINITE)
    assert abs(free_boundary(sol) - closed) < 1e-2


def test_solver_deterministic(fig1a_params, fig1a_ctx):
    rate = build_rate(fig1a_params, fig1a_ctx, 1.0)
    a = solve_rho_grid(rate, 0.6, INFINITE, n=1024)
    b = solve_rho_grid(rate, 0.6, INFINITE, n=1024)
    assert np.array_equal(a.values, b.values)


def test_free_boundary_from_segments():
    segs = (Segment("zero", 0.0, 2.0, 0.0, 0.0, 0.0),
            Segment("linear", 2.0, 4.0, 1.5, -3.0, 0.0))
    grid = np.linspace(0.0, 4.0, 401)
    vals = np.maximum(1.5 * grid - 3.0, 0.0)
    fb = free_boundary(SpeedFunction(grid, vals, segs))
    assert fb == 2.0


def test_free_boundary_from_samples():
    grid = np.linspace(0.0, 4.0, 4001)
    vals = np.maximum(1.5 * (grid - 2.0), 0.0)
    fb = free_boundary(SpeedFunction(grid, vals))
    assert abs(fb - 2.0) < 2e-3


def test_free_boundary_errors():
    grid = np.linspace(0.0, 4.0, 101)
    with pytest.raises(RuntimeError, match="beyond s_max"):
        free_boundary(SpeedFunction(grid, np.zeros(101)))
    # positive everywhere: the boundary sits at the left edge
    vals = 1.0 + grid
    assert free_boundary(SpeedFunction(grid, vals)) == 0.0


def test_beta3_fig1a(fig1a_params, fig1a_ctx):
    res = beta3(fig1a_params, fig1a_ctx)
    assert res.determinate
    assert res.value == pytest.approx(1.2904189009123703, rel=1e-12)
    assert res.s_nlp == res.value  # s_nlp > c_llw here
    assert res.value < fig1a_ctx.c2
    assert res.value <= sigma3(fig1a_params, INFINITE) + 1e-9


def test_beta3_bracket_when_cllw_is():
    from terrace import check_theorem12

    p = ModelParams(**{**FIG1_BASE, "a23": 0.9})
    chk = check_theorem12(p, INFINITE)
    assert chk.ok
    res = beta3(p, chk.context)
    assert not res.determinate
    assert res.value is None
    assert res.lower <= res.upper
    br = c_llw(p)
    assert res.upper == pytest.approx(max(res.s_nlp, br.upper), rel=1e-12)


def test_underline_beta3_fig1a(fig1a_params, fig1a_ctx):
    res = underline_beta3(fig1a_params, fig1a_ctx, n=2048)
    assert res.determinate
    snlp = res.s_nlp
    # worst-case two-competitor pressure barely moves the corner speed
    assert abs(res.value - snlp) <= 0.02
    floor = alpha3(fig1a_params) * math.sqrt(1.0 - 0.1 - 0.4)
    assert res.value >= floor - 0.02


def test_kanon_bound_matches_grid(fig1a_params, fig1a_ctx):
    # same obstacle problem solved on [0, c_hat] with a boundary datum:
    # the formula and the marched free boundary must agree
    p = fig1a_params
    c_hat = fig1a_ctx.c2
    r_eff = p.r3 * (1.0 - p.a32 * (1.0 - p.a21))
    rate = piecewise_rate((), (r_eff,))
    for mu in (0.1, 2.0):
        sol = solve_rho_grid(rate, p.d3, INFINITE, s_max=c_hat, n=2048,
                             right_value=mu)
        formula = kanon_speed_bound(p, c_hat, mu)
        assert abs(free_boundary(sol) - formula) < 1e-2


def test_reference_solutions_sandwich(fig1a_params, fig1a_ctx):
    rate = build_rate(fig1a_params, fig1a_ctx, 1.0)
    sol = solve_rho_grid(rate, 0.6, INFINITE, n=2048)
    refs = reference_solutions(rate, 0.6, INFINITE, grid=sol.grid)
    sub, sup = refs["sub"], refs["super"]
    assert np.all(sol.values >= sub(sol.grid) - 1e-8)
    assert np.all(sol.values <= sup(sol.grid) + 5e-3)
    # the sub solution is the exact far-field datum
    assert sub(sol.grid[-1]) == pytest.approx(sol.values[-1], rel=1e-10)


def test_numpy_backend_matches_compiled(fig1a_params, fig1a_ctx):
    import terrace._backend as backend

    code = (
        "import numpy as np\n"
        "from terrace import (ModelParams, INFINITE, build_rate,"
        " check_theorem12, solve_rho_grid)\n"
        "import terrace._backend as backend\n"
        "p = ModelParams(d1=1.0, d3=0.6, r1=1.08, r3=1.1, a12=1.2,"
        " a13=1.1, a21=0.01, a23=1.1, a31=0.1, a32=0.4)\n"
        "ctx = check_theorem12(p, INFINITE).context\n"
        "rate = build_rate(p, ctx, 1.0)\n"
        "sol = solve_rho_grid(rate, 0.6, INFINITE, n=1024)\n"
        "print(backend.COMPILED, repr(float(sol.values[512])),"
        " repr(float(sol.values[-1])))\n"
    )
    env = {**os.environ, "TERRACE_FORCE_NUMPY": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    flag, mid, last = out.stdout.split()
    assert flag == "False"

    rate = build_rate(fig1a_params, fig1a_ctx, 1.0)
    sol = solve_rho_grid(rate, 0.6, INFINITE, n=1024)
    assert float(mid) == pytest.approx(float(sol.values[512]), rel=1e-13)
    assert float(last) == pytest.approx(float(sol.values[-1]), rel=1e-13)
