# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled maximin-share search over int64 values.

Same search order and pruning as ``_mms_py.mms_int``; callers guarantee the
total value fits comfortably in a signed 64-bit integer.
"""
from libc.stdlib cimport malloc, free

ctypedef long long i64


cdef struct State:
    int m
    int n
    i64 *values
    i64 *suffix
    i64 *sums
    i64 best
    i64 cap
    bint done


cdef void rec(State *s, int k, int opened) noexcept nogil:
    cdef int b, limit, empty
    cdef i64 lo, v
    if s.done:
        return
    if k == s.m:
        lo = s.sums[0]
        for b in range(1, s.n):
            if s.sums[b] < lo:
                lo = s.sums[b]
        if lo > s.best:
            s.best = lo
            if lo >= s.cap:
                s.done = True
        return
    empty = s.n - opened
    if s.m - k < empty:
        return
    if empty:
        if s.suffix[k] < (s.best + 1) * empty:
            return
    else:
        lo = s.sums[0]
        for b in range(1, s.n):
            if s.sums[b] < lo:
                lo = s.sums[b]
        if lo + s.suffix[k] <= s.best:
            return
    v = s.values[k]
    limit = opened + 1 if empty else s.n
    for b in range(limit):
        s.sums[b] += v
        rec(s, k + 1, opened + 1 if b == opened else opened)
        s.sums[b] -= v
        if s.done:
            return


def mms_int(values, int n):
    """Best achievable minimum bundle sum; ``values`` sorted descending."""
    cdef int m = len(values)
    cdef int k
    cdef State s
    if n <= 0:
        raise ValueError("n must be positive")
    if m < n:
        return 0
    s.m = m
    s.n = n
    s.values = <i64 *> malloc(m * sizeof(i64))
    s.suffix = <i64 *> malloc((m + 1) * sizeof(i64))
    s.sums = <i64 *> malloc(n * sizeof(i64))
    if s.values == NULL or s.suffix == NULL or s.sums == NULL:
        free(s.values)
        free(s.suffix)
        free(s.sums)
        raise MemoryError()
    try:
        for k in range(m):
            s.values[k] = values[k]
        s.suffix[m] = 0
        for k in range(m - 1, -1, -1):
            s.suffix[k] = s.suffix[k + 1] + s.values[k]
        for k in range(n):
            s.sums[k] = 0
        s.best = 0
        s.cap = s.suffix[0] // n
        s.done = False
        with nogil:
            rec(&s, 0, 0)
        return s.best
    finally:
        free(s.values)
        free(s.suffix)
        free(s.sums)
