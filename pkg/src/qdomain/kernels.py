"""Backend selection for the numeric kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy implementation in ``_kernels_py`` is used.  Setting the environment
variable ``QDOMAIN_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _kernels_py

BACKENDS = {"python": _kernels_py}

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None
else:
    BACKENDS["cython"] = _ckernels

if os.environ.get("QDOMAIN_PURE_PYTHON", "") not in ("", "0") or _ckernels is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

_impl = BACKENDS[BACKEND]


def use_backend(name):
    """Switch the active backend (``"python"`` or ``"cython"``); returns the previous one."""
    global _impl, BACKEND
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}")
    previous = BACKEND
    _impl = BACKENDS[name]
    BACKEND = name
    return previous


def conj(x, y, lo, hi, kind, top=1.0):
    return _impl.conj(x, y, lo, hi, kind, top)


def residuum(x, y, lo, hi, kind, top=1.0):
    return _impl.residuum(x, y, lo, hi, kind, top)


def compose_max(A, B, lo, hi, kind, top=1.0):
    return _impl.compose_max(A, B, lo, hi, kind, top)


def residuum_meet(A, B, lo, hi, kind, top=1.0):
    return _impl.residuum_meet(A, B, lo, hi, kind, top)


def approach_violations(delta, lo, hi, kind, top=1.0):
    return _impl.approach_violations(delta, lo, hi, kind, top)
