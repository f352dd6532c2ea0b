"""Backend selection: compiled core when available, numpy fallback otherwise.

Set FRACTW_PURE_PYTHON=1 to force the fallback (used by the benchmark and by
the backend-parity tests).
"""

from __future__ import annotations

import os

from . import _core_py

if os.environ.get("FRACTW_PURE_PYTHON"):
    core = _core_py
else:
    try:
        from . import _core as core  # type: ignore[no-redef]
    except ImportError:
        core = _core_py

march = core.march
BACKEND = core.BACKEND
STATUS_DONE = _core_py.STATUS_DONE
STATUS_BLOWDOWN = _core_py.STATUS_BLOWDOWN
STATUS_NONFINITE = _core_py.STATUS_NONFINITE
