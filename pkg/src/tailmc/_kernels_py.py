"""Pure numpy twin of the compiled scatter-max kernel.

Produces the same path and winners as ``_kernels.scatter_max_path`` for
any input without exact float ties: per stack it reduces over particles
with ``argmax`` (first maximum, i.e. the smallest particle index), then
scatters offsets in descending order so that, with strictly increasing
stack positions, the earliest stack wins ties at a lag.  Tie counts are
a diagnostic and may differ from the compiled kernel in degenerate
equal-value inputs.
"""

from __future__ import annotations

import numpy as np


def scatter_max_path(contrib: np.ndarray, tvals: np.ndarray, offset_lo: int,
                     path: np.ndarray, winner: np.ndarray, start_id: int) -> int:
    """Fold particle contributions into the running max path in place."""
    S, N, W = contrib.shape
    n = path.shape[0]
    tvals = np.asarray(tvals, dtype=np.int64)
    if S > 1 and np.any(np.diff(tvals) <= 0):
        raise ValueError("stack positions must be strictly increasing")
    m = contrib.max(axis=1)
    ai = contrib.argmax(axis=1)
    ties = 0
    # within-stack exact ties at the stack maximum
    pos = m > 0.0
    if pos.any():
        ties += int((contrib == m[:, None, :]).sum(axis=1)[pos].sum() - pos.sum())
    sidx = np.arange(S, dtype=np.int64)
    for d in range(W - 1, -1, -1):
        lags = tvals + offset_lo + d
        ok = (lags >= 0) & (lags < n)
        if not ok.any():
            continue
        lag = lags[ok]
        cand = m[ok, d]
        cur = path[lag]
        ties += int(np.count_nonzero((cand == cur) & (cand > 0.0)))
        upd = cand > cur
        if upd.any():
            target = lag[upd]
            path[target] = cand[upd]
            winner[target] = start_id + sidx[ok][upd] * N + ai[ok, d][upd]
    return ties
