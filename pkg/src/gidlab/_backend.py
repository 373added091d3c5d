"""Kernel backend selection.

The compiled Cython extension is used when importable; otherwise, or when
``GIDLAB_PURE_PYTHON`` is set to a non-empty value, the numpy fallback is.
"""
import os

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _fallback}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled

if os.environ.get("GIDLAB_PURE_PYTHON") or _compiled is None:
    kernels = _fallback
else:
    kernels = _compiled


def available():
    return sorted(_BACKENDS)


def current():
    return kernels.NAME


def set_backend(name):
    """Switch the module-wide kernel backend; returns the previous name."""
    global kernels
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available; have {available()}")
    previous = kernels.NAME
    kernels = _BACKENDS[name]
    return previous
