"""Kernel backend selection: compiled extension when built, pure numpy
otherwise. GRAYMET_BACKEND=pure|compiled forces the choice."""

from __future__ import annotations

import os

from . import _ricci_py

_forced = os.environ.get("GRAYMET_BACKEND", "").strip().lower()

if _forced == "pure":
    kernel = _ricci_py
elif _forced == "compiled":
    from . import _ricci_cy as kernel  # noqa: F401  (raises if not built)
else:
    try:
        from . import _ricci_cy as kernel  # type: ignore[no-redef]
    except ImportError:
        kernel = _ricci_py

BACKEND = kernel.BACKEND_NAME
ricci_core = kernel.ricci_core
christoffel_core = kernel.christoffel_core
metric_components = kernel.metric_components
