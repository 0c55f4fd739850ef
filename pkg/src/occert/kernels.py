"""Kernel backend selection.

The compiled extension (``_kernels_cy``) is preferred; the numpy module
(``_kernels_py``) is the behavioural reference and the fallback.  Set
``OCCERT_FORCE_PY=1`` to force the fallback, e.g. for parity tests and
benchmarks.
"""

from __future__ import annotations

import os

from ._kernels_py import PAIRS  # noqa: F401  (basis order is backend-independent)

if os.environ.get("OCCERT_FORCE_PY"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

ricci_star_matrix = _impl.ricci_star_matrix
refute_value = _impl.refute_value
refute_value_and_grad = _impl.refute_value_and_grad
quad_value = _impl.quad_value
quad_value_and_grads = _impl.quad_value_and_grads
