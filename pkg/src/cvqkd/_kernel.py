"""Select the compiled kernel when available, else the numpy fallback."""
from __future__ import annotations

import os

if os.environ.get("CVQKD_PURE_PYTHON"):
    from . import _pykernel as impl
    BACKEND = "python"
else:
    try:
        from . import _ckernel as impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _pykernel as impl
        BACKEND = "python"

fill_uniform = impl.fill_uniform
fill_normal = impl.fill_normal
fill_bits = impl.fill_bits
tally = impl.tally
mix = impl.mix

__all__ = ["BACKEND", "fill_uniform", "fill_normal", "fill_bits", "tally", "mix"]
