"""Numpy implementation of the per-video alignment recurrence.

Semantics (shared with the compiled kernel):

    dp[0, t] = s[0, t]
    dp[i, 0] = -inf                        # no room for i earlier events
    dp[i, t] = s[i, t] + rm(i, t) - lam*t  # t >= 1
    rm(i, t) = max_{tau < t} (dp[i-1, tau] + lam*tau)

``rm`` is a prefix maximum, updated strictly (">"), so on ties the earliest
tau wins; the final cell is the first maximum of dp[n-1], so on ties the
smallest end index wins. Returned path indexes are span-local (0-based).

The reported op count is one per dp cell (n*L), the quantity that must
scale linearly for the running-max formulation to be doing its job.
"""

from __future__ import annotations

import numpy as np


def align_events(s: np.ndarray, lam: float) -> tuple[float, np.ndarray, int]:
    n, length = s.shape
    idx = np.arange(length, dtype=np.float64)
    dp_prev = s[0].astype(np.float64, copy=True)
    prev_arg = np.empty((n - 1, length), dtype=np.int64) if n > 1 else None
    ops = length

    for i in range(1, n):
        gains = dp_prev + lam * idx
        prefix_max = np.maximum.accumulate(gains)
        # positions where the prefix max strictly increased = earliest argmax
        shifted = np.empty(length, dtype=np.float64)
        shifted[0] = -np.inf
        shifted[1:] = prefix_max[:-1]
        strict = gains > shifted
        prefix_arg = np.maximum.accumulate(np.where(strict, np.arange(length), -1))

        dp_cur = np.empty(length, dtype=np.float64)
        dp_cur[0] = -np.inf
        dp_cur[1:] = s[i, 1:] + prefix_max[:-1] - lam * idx[1:]
        prev_arg[i - 1, 0] = -1
        prev_arg[i - 1, 1:] = prefix_arg[:-1]
        dp_prev = dp_cur
        ops += length

    end = int(np.argmax(dp_prev))  # first occurrence on ties
    score = float(dp_prev[end])
    path = np.empty(n, dtype=np.int64)
    path[n - 1] = end
    for i in range(n - 2, -1, -1):
        end = int(prev_arg[i, end])
        path[i] = end
    return score, path, ops
