"""Select the SGD sweep implementation at import time.

The compiled kernel is used when it was built; set ``MKFLATS_PURE_PYTHON=1``
to force the NumPy fallback.
"""

import os

import numpy as np

from . import _pykernels

if os.environ.get("MKFLATS_PURE_PYTHON"):
    _ckernels = None
else:
    try:
        from . import _ckernels
    except ImportError:
        _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"


def get_sweep(backend=None):
    """Return the ``sgd_sweep`` callable for ``backend`` ('cython', 'python' or None for the default)."""
    backend = backend or BACKEND
    if backend == "python":
        return _pykernels.sgd_sweep
    if backend == "cython":
        if _ckernels is None:
            raise ImportError("the compiled kernel is not available; rebuild the package")
        return _ckernels.sgd_sweep
    raise ValueError(f"unknown backend {backend!r}")


def sgd_sweep(X, order, bases, dt, sing_floor, rank_tol=1e-10, backend=None):
    """Normalize argument layouts and dispatch to the selected kernel."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    order = np.ascontiguousarray(order, dtype=np.intp)
    if not (bases.flags.c_contiguous and bases.dtype == np.float64):
        raise TypeError("bases must be a C-contiguous float64 array")
    return get_sweep(backend)(X, order, bases, float(dt), float(sing_floor), float(rank_tol))
