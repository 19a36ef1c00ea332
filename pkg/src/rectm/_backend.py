"""Backend dispatch for the hot inner loops.

The numba-compiled loops are used by default. Set ``RECTM_BACKEND=numpy``
to force the pure-numpy fallback (numba merely missing also falls back,
with a warning). ``rectm._backend.BACKEND`` reports which one is active.
"""

from __future__ import annotations

import os
import warnings

_requested = os.environ.get("RECTM_BACKEND", "").strip().lower()

if _requested in ("numpy", "python"):
    from . import _loops_numpy as loops

    BACKEND = "numpy"
elif _requested in ("", "numba"):
    try:
        from . import _loops_numba as loops  # type: ignore[no-redef]

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        warnings.warn("numba unavailable; falling back to the pure-numpy loops")
        from . import _loops_numpy as loops  # type: ignore[no-redef]

        BACKEND = "numpy"
else:
    raise RuntimeError(f"RECTM_BACKEND={_requested!r} not recognized (use 'numba' or 'numpy')")

KID_BIQUADRATIC = loops.KID_BIQUADRATIC
KID_UNIFORM = loops.KID_UNIFORM
STATUS_OK = loops.STATUS_OK
STATUS_NO_CONVERGENCE = loops.STATUS_NO_CONVERGENCE

weights_radial = loops.weights_radial
psi_sum = loops.psi_sum
split_sums = loops.split_sums
expectile_root = loops.expectile_root
cv_score = loops.cv_score
