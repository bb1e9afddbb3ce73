"""Kernel dispatch: compiled extension when built, numpy fallback otherwise.

Set ``LORA_CS_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and the parity tests).
"""
from __future__ import annotations

import os

from . import _fallback

BACKEND = "python"

if os.environ.get("LORA_CS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
else:
    _impl = _fallback

splitmix64 = _impl.splitmix64
bernoulli_signs = _impl.bernoulli_signs
omp = _impl.omp

__all__ = ["BACKEND", "bernoulli_signs", "omp", "splitmix64"]
