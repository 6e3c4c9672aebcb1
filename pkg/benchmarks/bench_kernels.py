"""Compare the compiled kernels against the pure-numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py

Both backends are imported directly, so the timings are unaffected by
TERRACE_FORCE_NUMPY.  The correctness column reports the sup difference
between the two results for identical inputs.
"""

import time

import numpy as np

from terrace import _kernels_np
from terrace.hj import piecewise_rate, single_rate_profile
from terrace.model import INFINITE

try:
    from terrace import _kernels
except ImportError:
    _kernels = None


def time_call(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def hj_inputs(n=4096, steps=400):
    rate = piecewise_rate((1.3, 2.0), (0.66, 0.99, 1.1))
    s = np.linspace(0.0, 4.2, n)
    v = single_rate_profile(s, 0.6, 1.1, INFINITE)
    rates = rate(s)
    ds = float(s[1] - s[0])
    dtau = 0.45 * ds / (2.0 * 0.6 * (s[-1] / 1.2) + s[-1])
    return v, rates, ds, 0.6, dtau, steps


def run_hj(mod, args):
    v, rates, ds, d, dtau, steps = args
    work = v.copy()
    buf = np.empty_like(work)
    mod.hj_march(work, buf, rates, ds, d, dtau, steps)
    return work


def euler_inputs(n=8000, steps=2000):
    x = np.linspace(0.0, 800.0, n + 2)
    dx = float(x[1] - x[0])
    u1 = np.where(x <= 10.0, 1.0, 0.0)
    u2 = u1.copy()
    u3 = u1.copy()
    dt = min(0.9 * dx * dx / (2.0 * 1.0), 0.1 / 1.1)
    return u1, u2, u3, dt, dx, steps


def run_euler(mod, args):
    u1, u2, u3, dt, dx, steps = args
    a = (u1.copy(), u2.copy(), u3.copy())
    b = tuple(np.empty_like(u) for u in a)
    mod.euler_march(a[0], a[1], a[2], b[0], b[1], b[2],
                    1.0, 0.6, 1.08, 1.1, 1.2, 1.1, 0.01, 1.1, 0.1, 0.4,
                    dt, dx, steps, True, True, True)
    return a


def main():
    print(f"{'kernel':<14}{'numpy':>12}{'compiled':>12}"
          f"{'speedup':>10}{'sup diff':>12}")

    args = hj_inputs()
    t_np = time_call(lambda: run_hj(_kernels_np, args))
    ref = run_hj(_kernels_np, args)
    if _kernels is not None:
        t_cy = time_call(lambda: run_hj(_kernels, args))
        got = run_hj(_kernels, args)
        diff = float(np.max(np.abs(got - ref)))
        print(f"{'hj_march':<14}{t_np:>12.4f}{t_cy:>12.4f}"
              f"{t_np / t_cy:>9.1f}x{diff:>12.2e}")
    else:
        print(f"{'hj_march':<14}{t_np:>12.4f}{'n/a':>12}{'':>10}{'':>12}")

    args = euler_inputs()
    t_np = time_call(lambda: run_euler(_kernels_np, args), repeat=3)
    ref = run_euler(_kernels_np, args)
    if _kernels is not None:
        t_cy = time_call(lambda: run_euler(_kernels, args), repeat=3)
        got = run_euler(_kernels, args)
        diff = max(float(np.max(np.abs(g - r))) for g, r in zip(got, ref))
        print(f"{'euler_march':<14}{t_np:>12.4f}{t_cy:>12.4f}"
              f"{t_np / t_cy:>9.1f}x{diff:>12.2e}")
    else:
        print(f"{'euler_march':<14}{t_np:>12.4f}{'n/a':>12}{'':>10}{'':>12}")

    if _kernels is None:
        print("\ncompiled extension not available; showing fallback only")


if __name__ == "__main__":
    main()
