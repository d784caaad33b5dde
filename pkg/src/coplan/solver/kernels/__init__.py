"""Hot simplex kernels with two interchangeable backends.

The numba backend JIT-compiles the per-pivot loops; the numpy backend is a
vectorized pure-numpy fallback.  Selection order:

  1. env var ``COPLAN_KERNELS`` set to ``numba`` or ``numpy``;
  2. otherwise numba when importable, numpy when not.

``BACKEND`` records which one is active.  ``benchmarks/bench_kernels.py``
compares the two.
"""

import os

_requested = os.environ.get("COPLAN_KERNELS", "").strip().lower()

if _requested not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"COPLAN_KERNELS must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    from coplan.solver.kernels import numpy_impl as _impl

    BACKEND = "numpy"
else:
    try:
        from coplan.solver.kernels import numba_impl as _impl

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        from coplan.solver.kernels import numpy_impl as _impl

        BACKEND = "numpy"

eliminate = _impl.eliminate
ratio_test = _impl.ratio_test
choose_entering = _impl.choose_entering

__all__ = ["BACKEND", "eliminate", "ratio_test", "choose_entering"]
