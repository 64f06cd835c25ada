"""Kernel backend selection.

Imports the compiled extension when available, otherwise falls back to the
pure-Python implementations. Set PERCRENORM_BACKEND=python to force the
fallback (useful for cross-checking; outputs are identical either way).
"""

from __future__ import annotations

import os

from . import _kernels_py

_forced = os.environ.get("PERCRENORM_BACKEND", "").strip().lower()

if _forced == "python":
    _impl = _kernels_py
elif _forced in ("", "compiled"):
    try:
        from . import _ckern as _impl  # type: ignore[no-redef]
    except ImportError:
        if _forced == "compiled":
            raise ImportError(
                "PERCRENORM_BACKEND=compiled but the _ckern extension is not built"
            )
        _impl = _kernels_py
else:
    raise ImportError(f"unknown PERCRENORM_BACKEND value {_forced!r}")

BACKEND: str = _impl.BACKEND
label_min = _impl.label_min
bond_sweep = _impl.bond_sweep
renorm_trial = _impl.renorm_trial
