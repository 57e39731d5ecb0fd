# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernel: scatter-max path extraction from particle stacks.

Scans contributions in (stack, particle, offset) order with strict
``>`` replacement, so the winner at each lag is the first particle in
(stack, particle) order attaining the maximum.  Exact float ties against
the current best are counted as a diagnostic.
"""


def scatter_max_path(double[:, :, ::1] contrib, long long[::1] tvals,
                     long long offset_lo, double[::1] path,
                     long long[::1] winner, long long start_id):
    """Fold particle contributions into the running max path in place.

    The contribution ``contrib[s, i, d]`` applies at output index
    ``tvals[s] + offset_lo + d``; out-of-range indices are skipped.
    ``winner`` receives ``start_id + s * N + i``.  Returns the tie count.
    """
    cdef Py_ssize_t S = contrib.shape[0]
    cdef Py_ssize_t N = contrib.shape[1]
    cdef Py_ssize_t W = contrib.shape[2]
    cdef Py_ssize_t n = path.shape[0]
    cdef Py_ssize_t s, i, d
    cdef long long base, lag, ties = 0
    cdef double c
    for s in range(S):
        base = tvals[s] + offset_lo
        for i in range(N):
            for d in range(W):
                lag = base + d
                if lag < 0 or lag >= n:
                    continue
                c = contrib[s, i, d]
                if c > path[lag]:
                    path[lag] = c
                    winner[lag] = start_id + s * N + i
                elif c == path[lag] and c > 0.0:
                    ties += 1
    return ties
