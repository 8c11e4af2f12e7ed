"""Kernel backend selection.

The two hot loops (the delayed Runge-Kutta integrator and the delayed
discrete recursion) exist twice: a compiled Cython extension
(``_speedups``) and a pure-NumPy fallback (``_reference``).  At import
time the compiled version is preferred; setting the environment variable
``DACDELAY_PURE_PYTHON`` to any non-empty value forces the fallback.
``BACKEND`` records which one is active (``"compiled"`` or
``"reference"``).
"""

from __future__ import annotations

import os

from . import _reference

if os.environ.get("DACDELAY_PURE_PYTHON"):
    _impl = _reference
    BACKEND = "reference"
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _reference
        BACKEND = "reference"

ct_delay_rk4 = _impl.ct_delay_rk4
dt_delay_iterate = _impl.dt_delay_iterate

__all__ = ["BACKEND", "ct_delay_rk4", "dt_delay_iterate", "_reference"]
