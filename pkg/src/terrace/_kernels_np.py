"""Pure-numpy kernels: reference implementation and import-time fallback.

Mirrors the signatures of the compiled module ``terrace._kernels``; the
choice between the two happens in :mod:`terrace._backend`.  Both implement
the same arithmetic so results agree to roundoff.
"""

import numpy as np


def hj_march(v, vbuf, rates, ds, d, dtau, steps):
    """Advance the projected obstacle update `steps` times, in place.

    v, vbuf: working arrays (n,); both endpoints are Dirichlet and never
    touched.  rates holds R(s_i) per node.  The spatial term is the Godunov
    flux for the convex Hamiltonian H(p) = d p^2 - s p, the obstacle is a
    projection onto v >= 0 after each step.  Result lands in v.
    """
    n = v.shape[0]
    si = (np.arange(n, dtype=np.float64) * ds)[1:-1]
    ri = rates[1:-1]
    pstar = si / (2.0 * d)
    a, b = v, vbuf
    for _ in range(steps):
        pm = (a[1:-1] - a[:-2]) / ds
        pp = (a[2:] - a[1:-1]) / ds
        # min over [pm, pp] when pm <= pp, else max of the endpoint values
        pcl = np.minimum(np.maximum(pstar, pm), pp)
        hmin = d * pcl * pcl - si * pcl
        hm = d * pm * pm - si * pm
        hp = d * pp * pp - si * pp
        ham = np.where(pm <= pp, hmin, np.maximum(hm, hp))
        b[1:-1] = a[1:-1] + dtau * (-a[1:-1] - ham - ri)
        np.maximum(b[1:-1], 0.0, out=b[1:-1])
        b[0] = a[0]
        b[-1] = a[-1]
        a, b = b, a
    if a is not v:
        v[:] = a


def euler_march(u1, u2, u3, b1, b2, b3,
                d1, d3, r1, r3,
                a12, a13, a21, a23, a31, a32,
                dt, dx, steps, act1, act2, act3):
    """Advance the three-species explicit-Euler stencil `steps` times, in place.

    Zero-flux boundaries via ghost reflection (u[-1] = u[1] and mirrored on
    the right).  Inactive species are pinned at zero.  Results land in the
    u arrays; b1..b3 are scratch of the same shape.
    """
    idx2 = 1.0 / (dx * dx)

    def lap(u):
        out = np.empty_like(u)
        out[1:-1] = u[:-2] - 2.0 * u[1:-1] + u[2:]
        out[0] = 2.0 * (u[1] - u[0])
        out[-1] = 2.0 * (u[-2] - u[-1])
        out *= idx2
        return out

    cur = [u1, u2, u3]
    buf = [b1, b2, b3]
    for _ in range(steps):
        c1, c2, c3 = cur
        if act1:
            buf[0][:] = c1 + dt * (
                d1 * lap(c1) + r1 * c1 * (1.0 - c1 - a12 * c2 - a13 * c3)
            )
        if act2:
            buf[1][:] = c2 + dt * (
                lap(c2) + c2 * (1.0 - a21 * c1 - c2 - a23 * c3)
            )
        if act3:
            buf[2][:] = c3 + dt * (
                d3 * lap(c3) + r3 * c3 * (1.0 - a31 * c1 - a32 * c2 - c3)
            )
        for i, act in enumerate((act1, act2, act3)):
            if act:
                cur[i], buf[i] = buf[i], cur[i]
    for res, dst in zip(cur, (u1, u2, u3)):
        if res is not dst:
            dst[:] = res
