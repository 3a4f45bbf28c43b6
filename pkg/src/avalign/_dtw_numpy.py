"""Pure numpy fallback for the compiled accumulation kernel.

Sweeps anti-diagonals ``i + j = d`` so each step is one vectorized update.
Performs the same floating-point operations as the compiled loop, so both
produce bit-identical tables.
"""

import numpy as np


def accumulate(w, lo, hi):
    n, m = w.shape
    # padded table: cell (i, j) lives at Dp[i + 1, j + 1]; row/col 0 are +inf sentinels
    Dp = np.full((n + 1, m + 1), np.inf)
    back = np.full((n, m), -1, dtype=np.int8)
    lo = np.asarray(lo)
    hi = np.asarray(hi)
    Dp[1, 1] = w[0, 0]
    for d in range(1, n + m - 1):
        i = np.arange(max(0, d - m + 1), min(n - 1, d) + 1)
        j = d - i
        keep = (j >= lo[i]) & (j <= hi[i])
        i, j = i[keep], j[keep]
        if i.size == 0:
            continue
        best = Dp[i, j].copy()
        code = np.zeros(i.size, dtype=np.int8)
        diag_ok = (i > 0) & (j > 0)
        best[~diag_ok] = np.inf
        code[~diag_ok] = -1
        left = Dp[i + 1, j]
        take = left < best
        best[take] = left[take]
        code[take] = 1
        up = Dp[i, j + 1]
        take = up < best
        best[take] = up[take]
        code[take] = 2
        reach = np.isfinite(best)
        i, j = i[reach], j[reach]
        Dp[i + 1, j + 1] = best[reach] + w[i, j]
        back[i, j] = code[reach]
    return Dp[1:, 1:].copy(), back
