"""Backend dispatch for the numeric inner loops.

The default backend compiles the loops with numba.  Setting the
environment variable ``HOPFMS_DISABLE_NUMBA=1`` (before first import)
selects the pure-numpy fallback; ``benchmarks/bench_kernels.py`` compares
the two.
"""

import os

_flag = os.environ.get("HOPFMS_DISABLE_NUMBA", "0").strip().lower()
USE_NUMBA = _flag not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from hopfms._kernels_nb import (  # noqa: F401
            field_eval_batch,
            integrate_phi_batch,
            integrate_phi_dense,
            min_pair_ratio,
            min_segment_clearance,
        )
        BACKEND = "numba"
    except ImportError:
        USE_NUMBA = False

if not USE_NUMBA:
    from hopfms._kernels_np import (  # noqa: F401
        field_eval_batch,
        integrate_phi_batch,
        integrate_phi_dense,
        min_pair_ratio,
        min_segment_clearance,
    )
    BACKEND = "numpy"
