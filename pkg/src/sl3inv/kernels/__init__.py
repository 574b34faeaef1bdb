"""Hot numeric kernels with a jit backend and a pure-numpy fallback.

The jit-compiled backend is used when numba imports successfully unless
the environment variable ``SL3INV_NUMBA`` is set to ``0``/``false``/
``off``.  ``BACKEND`` records which implementation is active; both
backends are importable directly for the agreement tests and the
benchmark in ``benchmarks/bench_kernels.py``.
"""

from __future__ import annotations

import os

from . import _numpy

_FLAG = os.environ.get("SL3INV_NUMBA", "1").strip().lower()
_WANT_NUMBA = _FLAG not in ("0", "false", "off", "no")

if _WANT_NUMBA:
    # The platform TBB here predates what numba requires; pick a layer
    # that always works unless the user chose one explicitly.
    os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
    try:
        from . import _numba as _impl

        BACKEND = "numba"
    except ImportError:
        _impl = _numpy
        BACKEND = "numpy"
else:
    _impl = _numpy
    BACKEND = "numpy"

rotation_from_euler = _impl.rotation_from_euler
euler_from_rotation = _impl.euler_from_rotation
iwasawa = _impl.iwasawa
mat_exp = _impl.mat_exp
chart_embed = _impl.chart_embed
chart_coords = _impl.chart_coords
xi = _impl.xi
xi_d1 = _impl.xi_d1
xi_d2 = _impl.xi_d2

numpy_backend = _numpy

__all__ = [
    "BACKEND",
    "rotation_from_euler",
    "euler_from_rotation",
    "iwasawa",
    "mat_exp",
    "chart_embed",
    "chart_coords",
    "xi",
    "xi_d1",
    "xi_d2",
    "numpy_backend",
]
