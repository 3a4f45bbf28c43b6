"""Reference implementations shared by the tests.

They deliberately avoid the package's sweep: shortest paths come from
edge-list relaxation to a fixed point, weights from explicit cell loops.
"""

import numpy as np

from avalign.align import _naive_weights


def lattice_edges(finite):
    n, m = finite.shape
    src, dst = [], []
    for i in range(n):
        for j in range(m):
            if not finite[i, j]:
                continue
            for di, dj in ((1, 1), (0, 1), (1, 0)):
                a, b = i + di, j + dj
                if a < n and b < m and finite[a, b]:
                    src.append(i * m + j)
                    dst.append(a * m + b)
    return np.array(src, dtype=np.intp), np.array(dst, dtype=np.intp)


def relaxation_cost(values, delay_bias=False, delay_axis="reference", seed=0):
    """Optimal path cost by Bellman-Ford relaxation over a shuffled edge list.

    Every candidate is ``dist[u] + w[v]``, a left-to-right running sum along
    the path, so the fixed point is the exact minimum of the sequential path
    sums in floating point.
    """
    c = np.asarray(values, dtype=np.float64)
    n, m = c.shape
    w = _naive_weights(c, delay_bias, delay_axis).ravel()
    src, dst = lattice_edges(np.isfinite(c))
    order = np.random.default_rng(seed).permutation(len(src))
    src, dst = src[order], dst[order]
    dist = np.full(n * m, np.inf)
    dist[0] = w[0]
    for _ in range(n + m):
        new = dist.copy()
        np.minimum.at(new, dst, dist[src] + w[dst])
        if np.array_equal(new, dist):
            break
        dist = new
    return dist[n * m - 1]
