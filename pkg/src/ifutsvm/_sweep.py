"""Inner sweep of the box-QP coordinate ascent, JIT-compiled when numba is available."""

from __future__ import annotations

import numpy as np

DIAG_FLOOR = 1e-12


def _cyclic_sweep(Q, c, upper, z, q):
    """One cyclic pass of exact per-coordinate maximization with clipping.

    z and q (= Q @ z, maintained incrementally) are updated in place; returns
    the largest coordinate movement of the pass.
    """
    k = z.shape[0]
    max_move = 0.0
    for i in range(k):
        denom = Q[i, i]
        if denom < DIAG_FLOOR:
            denom = DIAG_FLOOR
        zi = (c[i] - q[i] + Q[i, i] * z[i]) / denom
        if zi < 0.0:
            zi = 0.0
        elif zi > upper[i]:
            zi = upper[i]
        delta = zi - z[i]
        if delta != 0.0:
            z[i] = zi
            for j in range(k):
                q[j] += delta * Q[j, i]
            if abs(delta) > max_move:
                max_move = abs(delta)
    return max_move


try:  # pragma: no cover - exercised implicitly by every solver call
    import numba

    cyclic_sweep = numba.njit(cache=True, fastmath=False)(_cyclic_sweep)
except ImportError:  # pragma: no cover
    cyclic_sweep = _cyclic_sweep
