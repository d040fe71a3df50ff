"""Numerical laboratory for composition and Toeplitz operators on the unit ball."""

from __future__ import annotations

import os

__version__ = "0.1.0"

# BALLOP_THREADS caps BLAS/OpenMP threads; it has to be set before numpy loads.
_threads = os.environ.get("BALLOP_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)
