# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled per-video alignment kernel.

Same recurrence, tie rules, and operation order as the numpy fallback in
_dante_py.py; results (score, path, ops) are bit-identical. See that module
for the written-out semantics.
"""

import numpy as np

from libc.math cimport INFINITY


def align_events(double[:, ::1] s, double lam):
    cdef Py_ssize_t n = s.shape[0]
    cdef Py_ssize_t length = s.shape[1]
    cdef Py_ssize_t i, t, end
    cdef double running_max, cand, best
    cdef Py_ssize_t running_arg
    cdef long long ops = 0

    dp_prev_arr = np.empty(length, dtype=np.float64)
    dp_cur_arr = np.empty(length, dtype=np.float64)
    cdef double[::1] dp_prev = dp_prev_arr
    cdef double[::1] dp_cur = dp_cur_arr
    cdef double[::1] tmp

    prev_arg_arr = np.empty((n - 1 if n > 1 else 0, length), dtype=np.int64)
    cdef long long[:, ::1] prev_arg = prev_arg_arr
    path_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] path = path_arr

    for t in range(length):
        dp_prev[t] = s[0, t]
    ops += length

    for i in range(1, n):
        running_max = -INFINITY
        running_arg = -1
        dp_cur[0] = -INFINITY
        prev_arg[i - 1, 0] = -1
        for t in range(1, length):
            cand = dp_prev[t - 1] + lam * (t - 1)
            if cand > running_max:  # strict: earliest tau wins ties
                running_max = cand
                running_arg = t - 1
            dp_cur[t] = s[i, t] + running_max - lam * t
            prev_arg[i - 1, t] = running_arg
        ops += length
        tmp = dp_prev
        dp_prev = dp_cur
        dp_cur = tmp

    best = dp_prev[0]
    end = 0
    for t in range(1, length):
        if dp_prev[t] > best:  # strict: smallest end index wins ties
            best = dp_prev[t]
            end = t

    path[n - 1] = end
    for i in range(n - 2, -1, -1):
        end = prev_arg[i, end]
        path[i] = end
    return float(best), path_arr, int(ops)
