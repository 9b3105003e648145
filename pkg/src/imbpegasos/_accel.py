"""Backend selection for the hot loops.

Set ``PEGASOS_DISABLE_NUMBA=1`` to force the pure-numpy path. The numba path is
also skipped when numba cannot be imported.
"""
from __future__ import annotations

import os

_FALSY = {"", "0", "false", "no", "off"}

try:
    import numba
except ImportError:  # pragma: no cover - numba ships with the dev environment
    numba = None

HAVE_NUMBA = numba is not None
NUMBA_DISABLED = os.environ.get("PEGASOS_DISABLE_NUMBA", "").strip().lower() not in _FALSY
USE_NUMBA = HAVE_NUMBA and not NUMBA_DISABLED


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
