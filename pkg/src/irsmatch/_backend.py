"""Kernel backend selection.

The compiled extension is preferred; the numpy fallback is used when it is
missing or when ``IRSMATCH_BACKEND=python`` is set in the environment.
"""
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

kernels = _pykernels
name = "python"


def available():
    return sorted(_BACKENDS)


def set_backend(backend):
    """Switch the active kernel module (``"cython"`` or ``"python"``)."""
    global kernels, name
    if backend not in _BACKENDS:
        raise ValueError(f"backend {backend!r} not available; have {available()}")
    kernels = _BACKENDS[backend]
    name = backend


_requested = os.environ.get("IRSMATCH_BACKEND", "").strip().lower()
if _requested:
    set_backend(_requested)
elif _ckernels is not None:
    set_backend("cython")
