"""Kernel backend selection.

Prefers the compiled extension, falls back to pure Python when it is not
built. ``AEROTAG_KERNEL=pure`` (or ``cython``) forces a backend, which the
benchmark and the parity tests use.
"""

from __future__ import annotations

import os

_forced = os.environ.get("AEROTAG_KERNEL", "").strip().lower()

if _forced == "pure":
    from aerotag.kernels import _pure as _backend
elif _forced == "cython":
    from aerotag.kernels import _core as _backend  # type: ignore[no-redef]
else:
    try:
        from aerotag.kernels import _core as _backend  # type: ignore[no-redef]
    except ImportError:
        from aerotag.kernels import _pure as _backend  # type: ignore[no-redef]

BACKEND = _backend.BACKEND_NAME

geodetic_to_ecef = _backend.geodetic_to_ecef
ecef_to_geodetic = _backend.ecef_to_geodetic
enu_to_ecef = _backend.enu_to_ecef
ecef_to_enu = _backend.ecef_to_enu
