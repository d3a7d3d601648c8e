"""Alignment kernel backends.

The hot loop (running-max DP over one video span) ships as a Cython
extension with a vectorized numpy fallback. Both implement the identical
arithmetic in the identical order, so scores and paths agree bit-for-bit;
selection happens once at import.
"""

from __future__ import annotations

from ._dante_py import align_events as _align_py

try:
    from ._dante_cy import align_events as _align_cy

    align_events = _align_cy
    BACKEND = "cython"
except ImportError:
    _align_cy = None
    align_events = _align_py
    BACKEND = "python"


def available_backends() -> dict:
    """Backend name -> kernel callable, for benchmarks and parity tests."""
    out = {"python": _align_py}
    if _align_cy is not None:
        out["cython"] = _align_cy
    return out
