"""Kernel backend selection.

Prefers the compiled extension, falls back to the numpy kernels when the
extension is missing (source checkout without a build).  Set the environment
variable TERRACE_FORCE_NUMPY to any non-empty value to force the fallback;
useful for benchmarking and for debugging kernel discrepancies.
"""

import os

if os.environ.get("TERRACE_FORCE_NUMPY"):
    from . import _kernels_np as _impl
    COMPILED = False
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        COMPILED = True
    except ImportError:
        from . import _kernels_np as _impl
        COMPILED = False

hj_march = _impl.hj_march
euler_march = _impl.euler_march


def backend_name():
    return "compiled" if COMPILED else "numpy"
