"""Direct simulation of the three-species competition-diffusion system.

    u1_t = d1 u1_xx + r1 u1 (1 - u1 - a12 u2 - a13 u3)
    u2_t =    u2_xx +    u2 (1 - a21 u1 - u2 - a23 u3)
    u3_t = d3 u3_xx + r3 u3 (1 - a31 u1 - a32 u2 - u3)

on [0, L] with zero-flux boundaries, explicit Euler in time and
second-order central differences in space.  Used to measure spreading
speeds and invasion outcomes independently of the speed-space solvers.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._backend import euler_march


@dataclass(frozen=True)
class Grid1D:
    """Domain [0, L] with n interior nodes; dx = L/(n+1)."""

    L: float
    n: int
    T: float

    def __post_init__(self):
        if self.L <= 0 or self.n < 16 or self.T <= 0:
            raise ValueError("need L > 0, n >= 16, T > 0")

    @property
    def dx(self):
        return self.L / (self.n + 1)

    def nodes(self):
        return np.linspace(0.0, self.L, self.n + 2)

    def stable_dt(self, p):
        dmax = max(p.d1, 1.0, p.d3)
        rmax = max(p.r1, 1.0, p.r3)
        return min(0.9 * self.dx ** 2 / (2.0 * dmax), 0.1 / rmax)


@dataclass(frozen=True)
class Indicator:
    """1 on [0, x0], 0 beyond."""

    x0: float = 10.0

    def sample(self, x):
        return (x <= self.x0).astype(float)


@dataclass(frozen=True)
class ExpDecay:
    """1 on [0, x0], exp(-lam (x - x0)) beyond."""

    lam: float
    x0: float = 10.0

    def sample(self, x):
        return np.where(x <= self.x0, 1.0, np.exp(-self.lam * (x - self.x0)))


@dataclass
class SimulationResult:
    x: np.ndarray
    times: np.ndarray
    u: np.ndarray  # (len(times), 3, len(x))
    params: object
    active: tuple
    dt: float


def _check_bounds(arrays, active, t):
    for act, u in zip(active, arrays):
        if not act:
            continue
        mn, mx = float(u.min()), float(u.max())
        if mn < -1e-9 or mx > 1.0 + 1e-9:
            raise RuntimeError(
                f"solution left [0, 1] at t = {t:.6f} "
                f"(range [{mn:.3e}, {mx:.3e}]); decrease dt or dx"
            )


def simulate(p, inits, grid, snapshot_times, active=(True, True, True),
             auto_enlarge=True):
    """Run the system and record snapshots at the requested times.

    inits: one object with .sample(x) per species (entries for inactive
    species may be None).  Inactive species are pinned at zero.  If an
    active front ends the run within 50 dx of the right boundary the
    domain is enlarged by half and the run repeated.
    """
    snapshot_times = np.asarray(snapshot_times, dtype=float)
    if snapshot_times.size == 0:
        raise ValueError("need at least one snapshot time")
    if np.any(np.diff(snapshot_times) < 0) or snapshot_times[0] < 0:
        raise ValueError("snapshot times must be nonnegative and sorted")
    if snapshot_times[-1] > grid.T:
        raise ValueError("snapshot times exceed T")

    L, n = grid.L, grid.n
    for _attempt in range(3):
        g = Grid1D(L, n, grid.T)
        x = g.nodes()
        dt = g.stable_dt(p)
        cur = []
        for i in range(3):
            if active[i]:
                u0 = np.ascontiguousarray(inits[i].sample(x), dtype=float)
            else:
                u0 = np.zeros_like(x)
            cur.append(u0)
        _check_bounds(cur, active, 0.0)
        bufs = [np.empty_like(x) for _ in range(3)]

        targets = np.rint(snapshot_times / dt).astype(np.int64)
        out = np.empty((len(targets), 3, len(x)))
        times = targets * dt
        done = 0
        for k, tgt in enumerate(targets):
            steps = int(tgt - done)
            if steps > 0:
                euler_march(cur[0], cur[1], cur[2],
                            bufs[0], bufs[1], bufs[2],
                            p.d1, p.d3, p.r1, p.r3,
                            p.a12, p.a13, p.a21, p.a23, p.a31, p.a32,
                            dt, g.dx, steps,
                            active[0], active[1], active[2])
                done = int(tgt)
            _check_bounds(cur, active, times[k])
            for i in range(3):
                out[k, i] = cur[i]

        result = SimulationResult(x, times, out, p, tuple(active), dt)
        if not auto_enlarge:
            return result
        margin = L - 50.0 * g.dx
        crowded = False
        for i in range(3):
            if not active[i]:
                continue
            hot = np.nonzero(out[-1, i] >= 1e-3)[0]
            if hot.size and x[hot[-1]] > margin:
                crowded = True
        if not crowded:
            return result
        L *= 1.5
        n = int(math.ceil(n * 1.5))
    raise RuntimeError("front reached the right boundary despite enlarging L")


def no_gap_diagnostic(result, ctx, eta=0.1):
    """Minimum of a31 u1 + a32 u2 around the ray x = c2 t.

    Scans x in [(c2 - eta) t, (c2 + eta) t] over the last quarter of the
    snapshot times.  A positive return certifies that the second front
    leaves no competition-free gap for the third species.
    """
    p = result.params
    times = result.times
    sel = np.nonzero(times >= 0.75 * times[-1])[0]
    sel = sel[times[sel] > 0]
    if sel.size == 0:
        raise ValueError("no usable snapshot times in the last quarter")
    L = result.x[-1]
    best = math.inf
    for k in sel:
        t = times[k]
        lo, hi = (ctx.c2 - eta) * t, (ctx.c2 + eta) * t
        if hi > L:
            raise ValueError("no-gap window outside the domain; increase L")
        mask = (result.x >= lo) & (result.x <= hi)
        vals = p.a31 * result.u[k, 0, mask] + p.a32 * result.u[k, 1, mask]
        best = min(best, float(vals.min()))
    return best
