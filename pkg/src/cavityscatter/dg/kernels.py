"""Kernel dispatch: compiled Cython extension when built, NumPy fallback
otherwise.  Set CAVITYSCATTER_PURE=1 to force the fallback."""

from __future__ import annotations

import os

from . import _stiffness_py

_FORCE_PURE = os.environ.get("CAVITYSCATTER_PURE", "") not in ("", "0")

try:
    from . import _stiffness as _compiled
except ImportError:
    _compiled = None

HAS_COMPILED = _compiled is not None
USING_COMPILED = HAS_COMPILED and not _FORCE_PURE


def backend_name():
    return "compiled" if USING_COMPILED else "numpy"


if USING_COMPILED:
    apply_volume_block = _compiled.apply_volume_block
else:
    apply_volume_block = _stiffness_py.apply_volume_block

lumped_mass_block = _stiffness_py.lumped_mass_block
