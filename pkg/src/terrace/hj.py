"""Obstacle Hamilton-Jacobi problems in speed space.

Along rays x = s t the exponential decay rate rho(s) of the trailing
species solves the variational inequality

    min{ rho - s rho' + d |rho'|^2 + R(s), rho } = 0,    rho(0) = 0,

where R is the piecewise-constant net growth rate seen along the ray and
the far-field slope of rho is set by the tail of the initial datum.  The
free boundary s_nlp = sup{s : rho(s) = 0} is the spreading speed.  This
module provides the rate constructors, a monotone grid solver, an
independent dynamic-programming evaluator used for cross-checks, and the
explicit sub/supersolution pair that sandwiches rho.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._backend import hj_march
from .model import DecayRate, c_llw, sigma3

_GOLD = (math.sqrt(5.0) - 1.0) / 2.0
_BIG = 1e18


@dataclass(frozen=True)
class RateProfile:
    """Piecewise-constant rate: values[i] on (breakpoints[i-1], breakpoints[i]].

    values has one more entry than breakpoints; the last entry is the
    far-field rate base_rate = r_hat, attained for all s > g_support.
    g = base_rate - R is nonnegative and supported in [0, g_support].
    """

    breakpoints: tuple
    values: tuple
    base_rate: float
    g_support: float

    def __post_init__(self):
        if len(self.values) != len(self.breakpoints) + 1:
            raise ValueError("values must have one more entry than breakpoints")
        if any(b <= 0 for b in self.breakpoints):
            raise ValueError("breakpoints must be positive")
        if any(b1 <= b0 for b0, b1 in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if self.base_rate <= 0:
            raise ValueError("far-field rate must be positive")
        if self.values[-1] != self.base_rate:
            raise ValueError("last value must equal base_rate")
        if max(self.values) > self.base_rate + 1e-12:
            raise ValueError("rate may not exceed its far-field value")

    def __call__(self, s):
        idx = np.searchsorted(np.asarray(self.breakpoints), s, side="left")
        vals = np.asarray(self.values, dtype=float)[idx]
        if np.isscalar(s):
            return float(vals)
        return vals


def piecewise_rate(breakpoints, values):
    """Build a RateProfile, merging adjacent pieces with equal values."""
    bp = []
    vv = [float(values[0])]
    for b, v in zip(breakpoints, values[1:]):
        v = float(v)
        if v == vv[-1]:
            continue
        bp.append(float(b))
        vv.append(v)
    base = vv[-1]
    support = bp[-1] if bp else 0.0
    return RateProfile(tuple(bp), tuple(vv), base, support)


def build_rate(p, ctx, mu):
    """Rate seen by the third species when the leading fronts are weighted by mu.

    Ahead of c1 nothing has arrived (full rate r3); between c2 and c1 only
    the first species, discounted by mu; behind c2 the second species sits
    at carrying capacity.
    """
    if not 0.0 <= mu <= 1.0:
        raise ValueError("mu must lie in [0, 1]")
    r3 = p.r3
    return piecewise_rate(
        (ctx.c2, ctx.c1),
        (r3 * (1.0 - p.a32), r3 * (1.0 - mu * p.a31), r3),
    )


def build_underline_rate(p, ctx, beta3):
    """Worst-case rate with both competitors present behind speed beta3."""
    if not 0.0 < beta3 < ctx.c2:
        raise ValueError("beta3 must lie in (0, c2)")
    r3 = p.r3
    return piecewise_rate(
        (beta3, ctx.c2, ctx.c1),
        (
            r3 * (1.0 - p.a31 - p.a32),
            r3 * (1.0 - p.a32),
            r3 * (1.0 - p.a31),
            r3,
        ),
    )


@dataclass(frozen=True)
class Segment:
    """One analytic piece of a speed function on [lo, hi]."""

    kind: str  # "zero" | "linear" | "parabola"
    lo: float
    hi: float
    slope: float = 0.0
    intercept: float = 0.0
    curvature_d: float = 1.0

    def __call__(self, s):
        if self.kind == "linear":
            return self.slope * s + self.intercept
        if self.kind == "parabola":
            return s * s / (4.0 * self.curvature_d) + self.intercept
        return 0.0 * s


@dataclass
class SpeedFunction:
    """Sampled speed function, optionally backed by analytic segments."""

    grid: np.ndarray
    values: np.ndarray
    segments: tuple = None

    def __call__(self, s):
        return np.interp(s, self.grid, self.values)


def profile_from_segments(segments, grid):
    grid = np.asarray(grid, dtype=float)
    vals = np.zeros_like(grid)
    for seg in segments:
        mask = (grid >= seg.lo - 1e-15) & (grid <= seg.hi + 1e-15)
        vals[mask] = seg(grid[mask])
    return vals


def _lam_wedge(d, r_hat, lam):
    cap = math.sqrt(r_hat / d)
    if lam.is_finite:
        return min(lam.lam, cap)
    return cap


def default_s_max(rate, d, lam):
    """Right endpoint comfortably inside the rate-free far field."""
    r_hat = rate.base_rate
    lw = _lam_wedge(d, r_hat, lam)
    sigma_hat = d * lw + r_hat / lw
    return max(
        2.0 * rate.g_support,
        4.0 * math.sqrt(d * r_hat),
        4.0 * d * lw,
        2.0 * sigma_hat,
    )


def single_rate_profile(s, d, r_hat, lam):
    """Exact solution for a constant rate r_hat; also the subsolution."""
    s = np.asarray(s, dtype=float)
    parab = np.maximum(s * s / (4.0 * d) - r_hat, 0.0)
    if not lam.is_finite:
        return parab
    lv = lam.lam
    affine = lv * s - (d * lv * lv + r_hat)
    if lv <= math.sqrt(r_hat / d):
        return np.maximum(affine, 0.0)
    return np.where(s >= 2.0 * d * lv, affine, parab)


def solve_rho_grid(rate, d, lam, s_max=None, n=4096, right_value=None,
                   tol=1e-4, max_doublings=40):
    """March the lifted VI to its self-similar limit on a uniform s-grid.

    The time-dependent lift w(t, x) = t v(log t, x/t) turns the stationary
    VI into a damped evolution for v that contracts toward rho; we march v
    over successive doublings of t and stop when consecutive doubling-end
    profiles agree to tol in sup norm.  Dirichlet data: v = 0 at s = 0 and
    the single-rate far-field value (or right_value if given) at s_max.
    """
    if n < 512:
        raise ValueError("n must be at least 512")
    if s_max is None:
        s_max = default_s_max(rate, d, lam)
    if s_max <= rate.g_support:
        raise ValueError("s_max must exceed the support of g")
    s = np.linspace(0.0, s_max, n)
    ds = s[1] - s[0]
    rates = np.ascontiguousarray(rate(s))
    v = np.ascontiguousarray(single_rate_profile(s, d, rate.base_rate, lam))
    if right_value is not None:
        if right_value < 0:
            raise ValueError("right_value must be nonnegative")
        v[-1] = right_value
    v[0] = 0.0

    # slopes stay bounded by the steeper of the far-field parabola and the
    # prescribed tail, so this CFL bound keeps the scheme monotone
    p_bound = s_max / (2.0 * d)
    if lam.is_finite:
        p_bound = max(p_bound, lam.lam)
    dtau = 0.45 * ds / (2.0 * d * p_bound + s_max)
    steps = int(math.ceil(math.log(2.0) / dtau))

    vbuf = np.empty_like(v)
    prev = v.copy()
    residual = math.inf
    for _ in range(max_doublings):
        hj_march(v, vbuf, rates, ds, d, dtau, steps)
        residual = float(np.max(np.abs(v - prev)))
        if residual < tol:
            return SpeedFunction(s, v)
        prev[:] = v
    raise RuntimeError(
        f"VI march did not converge in {max_doublings} doublings; "
        f"last residual {residual:.3e}"
    )


def _seg_cost(d, t0, x0, t1, x1, rate):
    dt = t1 - t0
    if dt <= 1e-14:
        return 0.0 if (x1 - x0) ** 2 <= 1e-18 else _BIG
    return (x1 - x0) ** 2 / (4.0 * d * dt) - rate * dt


def _golden(f, lo, hi, tol=1e-8):
    if hi - lo < tol:
        x = 0.5 * (lo + hi)
        return x, f(x)
    x1 = hi - _GOLD * (hi - lo)
    x2 = lo + _GOLD * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLD * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLD * (hi - lo)
            f2 = f(x2)
    x = 0.5 * (lo + hi)
    return x, f(x)


def _min_ordered(cost, m, tol=1e-8):
    """Minimize cost over 0 <= u_1 <= ... <= u_m <= 1.

    One and two crossing times use golden-section search (nested for two);
    longer chains use coordinate descent with a golden line search, which
    converges on these jointly convex chain costs.
    """
    if m == 1:
        return _golden(lambda a: cost((a,)), 0.0, 1.0, tol)[1]
    if m == 2:
        def outer(a):
            return _golden(lambda b: cost((a, b)), a, 1.0, tol)[1]
        return _golden(outer, 0.0, 1.0, tol)[1]
    u = [(i + 1.0) / (m + 1.0) for i in range(m)]
    best = cost(u)
    for _ in range(80):
        prev = best
        for i in range(m):
            lo = u[i - 1] if i else 0.0
            hi = u[i + 1] if i < m - 1 else 1.0
            xi, fi = _golden(lambda x: cost(u[:i] + [x] + u[i + 1:]), lo, hi, tol)
            if fi < best:
                u[i] = xi
                best = fi
        if prev - best < 1e-11:
            break
    return best


def _chain(d, b, R, j, s, k, start_kind, f_entry, below_slide):
    """Cost of a ray-crossing chain ending at (1, s) in cone j.

    Starts on ray b[k] (reached either by sliding along it from the origin
    or by a straight entry segment from the initial support), descends
    through rays k-1, ..., j at free crossing times, and either runs
    straight to the target or, when below_slide is set, dips onto ray
    b[j-1], rides it, and comes back up.
    """
    m = (k - j + 1) + (2 if below_slide else 0)

    def cost(u):
        t0 = u[0]
        if start_kind == "slide":
            acc = t0 * (b[k] * b[k] / (4.0 * d) - max(R[k], R[k + 1]))
        else:
            acc = t0 * f_entry(b[k])
        tp, xp = t0, b[k] * t0
        idx = 1
        for ray in range(k - 1, j - 1, -1):
            t = u[idx]
            idx += 1
            acc += _seg_cost(d, tp, xp, t, b[ray] * t, R[ray + 1])
            tp, xp = t, b[ray] * t
        if below_slide:
            t_in, t_out = u[idx], u[idx + 1]
            acc += _seg_cost(d, tp, xp, t_in, b[j - 1] * t_in, R[j])
            acc += (t_out - t_in) * (b[j - 1] * b[j - 1] / (4.0 * d)
                                     - max(R[j - 1], R[j]))
            acc += _seg_cost(d, t_out, b[j - 1] * t_out, 1.0, s, R[j])
        else:
            acc += _seg_cost(d, tp, xp, 1.0, s, R[j])
        return acc

    return cost, m


def solve_rho_oracle(rate, d, lam, samples):
    """Evaluate rho pointwise from its control representation.

    rho(s) = max{0, inf over paths gamma with gamma(1) = s of
    h(gamma(0)) + integral of |gamma'|^2/(4d) - R(gamma/t)}.  With
    piecewise-constant rates the optimal path is straight between ray
    crossings, so the infimum reduces to finitely many chain topologies
    (straight, slide along a ray then descend, tail entry then descend,
    and a dip onto a slower ray when the rate below it is higher), each
    minimized over its ordered crossing times.  Independent of the grid
    solver; used to cross-check it.
    """
    samples = np.atleast_1d(np.asarray(samples, dtype=float))
    b = tuple(rate.breakpoints)
    R = tuple(rate.values)
    M = len(b)
    r_hat = rate.base_rate
    finite = lam.is_finite
    lamv = lam.lam if finite else None
    barr = np.asarray(b)

    def f_entry(x):
        # optimal cost rate for reaching the ray x = b t from the tail
        if lamv <= x / (2.0 * d):
            return lamv * x - (d * lamv * lamv + r_hat)
        return x * x / (4.0 * d) - r_hat

    out = np.empty_like(samples)
    for i, s in enumerate(samples):
        if s <= 0.0:
            out[i] = 0.0
            continue
        j = int(np.searchsorted(barr, s, side="left"))
        cands = [s * s / (4.0 * d) - R[j]]
        if j == M and finite:
            cands.append(f_entry(s))
        for k in range(j, M):
            cost, m = _chain(d, b, R, j, s, k, "slide", f_entry, False)
            cands.append(_min_ordered(cost, m))
        if finite and j < M:
            cost, m = _chain(d, b, R, j, s, M - 1, "entry", f_entry, False)
            cands.append(_min_ordered(cost, m))
        if j >= 1 and R[j - 1] > R[j]:
            def origin_dip(u, _s=s, _j=j):
                t = u[0]
                ride = t * (b[_j - 1] * b[_j - 1] / (4.0 * d) - R[_j - 1])
                return ride + _seg_cost(d, t, b[_j - 1] * t, 1.0, _s, R[_j])
            cands.append(_min_ordered(origin_dip, 1))
            for k in range(j, M):
                cost, m = _chain(d, b, R, j, s, k, "slide", f_entry, True)
                cands.append(_min_ordered(cost, m))
            if finite and j < M:
                cost, m = _chain(d, b, R, j, s, M - 1, "entry", f_entry, True)
                cands.append(_min_ordered(cost, m))
        out[i] = max(0.0, min(cands))
    return SpeedFunction(samples, out)


def free_boundary(rho, eps=None):
    """Largest speed where rho leaves zero.

    Segment-backed profiles report the end of their leading zero piece
    exactly.  Sampled profiles are thresholded at eps (default 1e-6 of the
    maximum) and refined by inverse linear interpolation against the first
    sample exceeding eps.
    """
    if rho.segments:
        lead = rho.segments[0]
        if lead.kind == "zero":
            return lead.hi
    v = np.asarray(rho.values, dtype=float)
    g = np.asarray(rho.grid, dtype=float)
    vmax = float(v.max(initial=0.0))
    if vmax <= 0.0:
        raise RuntimeError("free boundary beyond s_max")
    if eps is None:
        eps = 1e-6 * vmax
    below = np.nonzero(v <= eps)[0]
    if below.size == 0:
        return float(g[0])
    i0 = int(below[-1])
    if i0 == len(v) - 1:
        raise RuntimeError("free boundary beyond s_max")
    frac = (eps - v[i0]) / (v[i0 + 1] - v[i0])
    return float(g[i0] + frac * (g[i0 + 1] - g[i0]))


@dataclass(frozen=True)
class Beta3Result:
    """Terrace corner speed, possibly bracketed when c_llw is."""

    s_nlp: float
    lower: float
    upper: float
    determinate: bool

    @property
    def value(self):
        return self.lower if self.determinate else None


def beta3(p, ctx):
    """Speed behind which both faster species are established.

    beta3 = max{s_nlp, c_llw}.  When c_llw is only bracketed, both
    endpoint combinations are returned with determinate = False.
    """
    from .closed_form import s_nlp_closed

    snlp = s_nlp_closed(p, ctx.c1, ctx.c2, ctx.lam)
    br = c_llw(p)
    if br.determinate:
        lo = hi = max(snlp, br.linear)
        det = True
    else:
        lo = max(snlp, br.lower)
        hi = max(snlp, br.upper)
        det = False
    sig = sigma3(p, ctx.lam)
    assert hi <= sig + 1e-9 and hi < ctx.c2, "beta3 must stay below sigma3 and c2"
    return Beta3Result(snlp, lo, hi, det)


def underline_beta3(p, ctx, n=4096, s_max=None):
    """Free boundary of the VI driven by the worst-case two-competitor rate."""
    b3 = beta3(p, ctx)
    ends = (b3.lower,) if b3.determinate else (b3.lower, b3.upper)
    fbs = []
    for be in ends:
        rate = build_underline_rate(p, ctx, be)
        sol = solve_rho_grid(rate, p.d3, ctx.lam, s_max=s_max, n=n)
        fbs.append(free_boundary(sol))
    return Beta3Result(b3.s_nlp, fbs[0], fbs[-1], b3.determinate)


def reference_solutions(rate, d, lam, grid=None):
    """Explicit sub/supersolution pair sandwiching the VI solution.

    The subsolution ignores g entirely (single-rate profile); the
    supersolution replaces g by its worst constant bound g_max on an
    interval [0, c_g] wide enough to make the construction positive.
    Returns {"sub": SpeedFunction, "super": SpeedFunction}.
    """
    r_hat = rate.base_rate
    lw = _lam_wedge(d, r_hat, lam)
    cg = max(rate.g_support, d * lw + r_hat / lw)
    sup_g = r_hat - min(rate.values)
    g_max = max(sup_g, cg * cg / (4.0 * d))

    if grid is None:
        grid = np.linspace(0.0, default_s_max(rate, d, lam), 2049)
    grid = np.asarray(grid, dtype=float)
    S = float(grid[-1])

    # subsolution: the exact single-rate profile
    sub_segs = []
    sqr = math.sqrt(r_hat / d)
    if lam.is_finite and lam.lam <= sqr:
        lv = lam.lam
        sigma = d * lv + r_hat / lv
        sub_segs.append(Segment("zero", 0.0, sigma))
        sub_segs.append(Segment("linear", sigma, S, slope=lv,
                                intercept=-(d * lv * lv + r_hat)))
    else:
        a_single = 2.0 * math.sqrt(d * r_hat)
        sub_segs.append(Segment("zero", 0.0, a_single))
        if lam.is_finite:
            lv = lam.lam
            sub_segs.append(Segment("parabola", a_single, 2.0 * d * lv,
                                    curvature_d=d, intercept=-r_hat))
            sub_segs.append(Segment("linear", 2.0 * d * lv, S, slope=lv,
                                    intercept=-(d * lv * lv + r_hat)))
        else:
            sub_segs.append(Segment("parabola", a_single, S,
                                    curvature_d=d, intercept=-r_hat))

    # supersolution
    sup_segs = []
    if (not lam.is_finite) or lam.lam > cg / (2.0 * d):
        lh = cg / (2.0 * d) - math.sqrt(g_max / d)
        sup_segs.append(Segment("linear", 0.0, cg, slope=lh,
                                intercept=-(d * lh * lh + r_hat - g_max)))
        if lam.is_finite:
            lv = lam.lam
            sup_segs.append(Segment("parabola", cg, 2.0 * d * lv,
                                    curvature_d=d, intercept=-r_hat))
            sup_segs.append(Segment("linear", 2.0 * d * lv, S, slope=lv,
                                    intercept=-(d * lv * lv + r_hat)))
        else:
            sup_segs.append(Segment("parabola", cg, S,
                                    curvature_d=d, intercept=-r_hat))
    else:
        lv = lam.lam
        lh = (cg - math.sqrt((cg - 2.0 * d * lv) ** 2 + 4.0 * d * g_max)) / (2.0 * d)
        sup_segs.append(Segment("linear", 0.0, cg, slope=lh,
                                intercept=-(d * lh * lh + r_hat - g_max)))
        sup_segs.append(Segment("linear", cg, S, slope=lv,
                                intercept=-(d * lv * lv + r_hat)))

    sub = SpeedFunction(grid, profile_from_segments(sub_segs, grid),
                        tuple(sub_segs))
    sup = SpeedFunction(grid, profile_from_segments(sup_segs, grid),
                        tuple(sup_segs))
    return {"sub": sub, "super": sup}
