"""Kernel backend selection.

The compiled extension is preferred when importable; otherwise the NumPy
fallback is used.  SCHEDOPT_BACKEND=pure|compiled forces a choice (forcing
"compiled" raises if the extension was not built).
"""

from __future__ import annotations

import os

from . import pure as _pure

try:
    from . import _core as _compiled
except ImportError:
    _compiled = None

_forced = os.environ.get("SCHEDOPT_BACKEND")
if _forced == "pure":
    _impl = _pure
elif _forced == "compiled":
    if _compiled is None:
        raise ImportError("SCHEDOPT_BACKEND=compiled but the extension is not built")
    _impl = _compiled
elif _forced:
    raise ImportError(f"unknown SCHEDOPT_BACKEND value: {_forced!r}")
else:
    _impl = _compiled if _compiled is not None else _pure

BACKEND = _impl.NAME
HAVE_COMPILED = _compiled is not None

pgamma_fixed_point = _impl.pgamma_fixed_point
simulate_trials = _impl.simulate_trials


def get_backend(name: str):
    """Return a specific backend module; used by the benchmark script."""
    if name == "pure":
        return _pure
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled backend not available")
        return _compiled
    raise ValueError(f"unknown backend: {name!r}")
