"""Monotone minimum-cost alignment through a (banded) cost matrix.

A path runs from (0, 0) to (N-1, M-1) with steps (1, 1), (0, 1) and (1, 0)
and costs the sum of the node weights it visits, start node included.
Equal-cost paths are resolved by preferring, walking back from the end,
the diagonal step, then (0, 1), then (1, 0).

The lattice is a DAG, so the label-setting order Dijkstra would discover is
a row-major sweep; ``dijkstra_align`` runs that sweep, which stays exact when
z-normalized costs go negative. ``method="heap"`` runs the textbook
priority-queue search and is restricted to non-negative weights.

The sweep uses the compiled kernel when available. Set ``AVALIGN_BACKEND=numpy``
to force the numpy fallback.
"""

from __future__ import annotations

import heapq
import json
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _dtw_numpy
from .cost import BandError, CostMatrix, band_connects

try:
    from . import _dtw_kernel
except ImportError:  # pragma: no cover - exercised only without a compiler
    _dtw_kernel = None

KERNELS = {"numpy": _dtw_numpy.accumulate}
if _dtw_kernel is not None:
    KERNELS["cython"] = _dtw_kernel.accumulate

BACKEND = os.environ.get("AVALIGN_BACKEND") or ("cython" if "cython" in KERNELS else "numpy")
if BACKEND not in KERNELS:
    raise ImportError(f"AVALIGN_BACKEND={BACKEND!r} is not available; have {sorted(KERNELS)}")

# step codes shared with the kernels
DIAG, RIGHT, DOWN = 0, 1, 2
_STEP = {DIAG: (1, 1), RIGHT: (0, 1), DOWN: (1, 0)}

BRUTE_FORCE_LIMIT = 24


class AlignmentError(RuntimeError):
    """No admissible path exists."""


@dataclass(frozen=True)
class AlignmentPath:
    pairs: np.ndarray  # L x 2 integer (row, col)
    total_cost: float

    def __len__(self):
        return len(self.pairs)

    def to_json(self) -> str:
        return json.dumps({"pairs": self.pairs.tolist(), "total_cost": float(self.total_cost)})

    @classmethod
    def from_json(cls, text: str) -> "AlignmentPath":
        data = json.loads(text)
        return cls(np.asarray(data["pairs"], dtype=np.intp).reshape(-1, 2), float(data["total_cost"]))


@dataclass(frozen=True)
class WarpFunction:
    """Source time (seconds) for each reference sample ``k * ref_step``."""

    source_times: np.ndarray
    ref_step: float

    def __post_init__(self):
        t = np.asarray(self.source_times, dtype=np.float64)
        if t.ndim != 1 or t.size == 0 or not np.all(np.isfinite(t)):
            raise ValueError("source_times must be a non-empty finite 1-D array")
        if not self.ref_step > 0:
            raise ValueError("ref_step must be positive")
        t.setflags(write=False)
        object.__setattr__(self, "source_times", t)
        object.__setattr__(self, "ref_step", float(self.ref_step))

    def __len__(self):
        return self.source_times.size

    @property
    def ref_times(self) -> np.ndarray:
        return np.arange(len(self)) * self.ref_step

    @property
    def duration(self) -> float:
        """Length of the reference domain covered."""
        return (len(self) - 1) * self.ref_step

    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(self.source_times) >= 0))

    def to_dict(self) -> dict:
        return {"ref_step": self.ref_step, "source_times": self.source_times.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "WarpFunction":
        data = json.loads(text)
        return cls(np.asarray(data["source_times"], dtype=np.float64), data["ref_step"])

    @classmethod
    def identity(cls, n: int, step: float) -> "WarpFunction":
        return cls(np.arange(n) * step, step)


def node_weights(values: np.ndarray, delay_bias: bool = False, axis: str = "reference") -> np.ndarray:
    """Per-node weights, optionally blended with the two preceding frames.

    With ``delay_bias`` each weight becomes ``0.5*C[k] + 0.25*C[k-1] + 0.25*C[k-2]``
    along ``axis``: "reference" blends reference frames j-1, j-2 within row i,
    which favours paths where the audio trails the picture; "unaligned" blends
    rows i-1, i-2 within column j, which favours the opposite. Missing
    predecessors at the border or outside the band are dropped and the
    remaining coefficients rescaled to sum 1 (k=0: 1; k=1: 2/3, 1/3).
    """
    c = np.asarray(values, dtype=np.float64)
    if not delay_bias:
        return c
    if axis == "reference":
        return node_weights(c.T, True, "unaligned").T
    if axis != "unaligned":
        raise ValueError("axis must be 'reference' or 'unaligned'")

    w = c.copy()
    n = c.shape[0]
    cur = c[2:]
    p1 = c[1:-1]
    p2 = c[:-2]
    if n >= 2:
        r1 = (2.0 / 3.0) * c[1] + (1.0 / 3.0) * c[0]
        w[1] = np.where(np.isfinite(c[0]), r1, c[1])
    if n >= 3:
        full = 0.5 * cur + 0.25 * p1 + 0.25 * p2
        two = (2.0 / 3.0) * cur + (1.0 / 3.0) * p1
        w[2:] = np.where(
            np.isfinite(p1) & np.isfinite(p2), full, np.where(np.isfinite(p1), two, cur)
        )
    return w


def _backtrack(back: np.ndarray, n: int, m: int) -> np.ndarray:
    i, j = n - 1, m - 1
    pairs = [(i, j)]
    while (i, j) != (0, 0):
        di, dj = _STEP[int(back[i, j])]
        i, j = i - di, j - dj
        pairs.append((i, j))
    return np.asarray(pairs[::-1], dtype=np.intp)


def _check_band(c: CostMatrix):
    lo, hi = c.limits()
    if not band_connects(lo, hi, c.shape[1]):
        raise BandError(f"band radius {c.band_radius} does not connect the corners of {c.shape}")
    return lo, hi


def accumulated_cost(c: CostMatrix, delay_bias: bool = False, *, delay_axis: str = "reference",
                     backend: str | None = None):
    """Cumulative cost table and back-pointer codes for ``c``."""
    lo, hi = _check_band(c)
    w = np.ascontiguousarray(node_weights(c.values, delay_bias, delay_axis))
    kernel = KERNELS[backend or BACKEND]
    return kernel(w, np.ascontiguousarray(lo, dtype=np.intp), np.ascontiguousarray(hi, dtype=np.intp))


def dijkstra_align(
    c: CostMatrix,
    delay_bias: bool = False,
    *,
    delay_axis: str = "reference",
    method: str = "sweep",
    backend: str | None = None,
) -> AlignmentPath:
    """Minimum-cost monotone corner-to-corner path through ``c``."""
    if method == "heap":
        return _heap_dijkstra(c, delay_bias, delay_axis)
    if method != "sweep":
        raise ValueError("method must be 'sweep' or 'heap'")
    n, m = c.shape
    D, back = accumulated_cost(c, delay_bias, delay_axis=delay_axis, backend=backend)
    if not np.isfinite(D[n - 1, m - 1]):
        raise AlignmentError("end corner is unreachable")
    return AlignmentPath(_backtrack(back, n, m), float(D[n - 1, m - 1]))


def _heap_dijkstra(c: CostMatrix, delay_bias: bool, delay_axis: str) -> AlignmentPath:
    _check_band(c)
    w = node_weights(c.values, delay_bias, delay_axis)
    finite = np.isfinite(w)
    if np.any(w[finite] < 0):
        raise ValueError("heap Dijkstra needs non-negative weights; use method='sweep'")
    n, m = w.shape
    dist = {(0, 0): w[0, 0]}
    prev = {}
    done = set()
    heap = [(w[0, 0], 0, 0)]
    while heap:
        d, i, j = heapq.heappop(heap)
        if (i, j) in done:
            continue
        done.add((i, j))
        if (i, j) == (n - 1, m - 1):
            break
        for di, dj in ((1, 1), (0, 1), (1, 0)):
            a, b = i + di, j + dj
            if a < n and b < m and finite[a, b]:
                nd = d + w[a, b]
                if nd < dist.get((a, b), np.inf):
                    dist[(a, b)] = nd
                    prev[(a, b)] = (i, j)
                    heapq.heappush(heap, (nd, a, b))
    if (n - 1, m - 1) not in done:
        raise AlignmentError("end corner is unreachable")
    node = (n - 1, m - 1)
    pairs = [node]
    while node != (0, 0):
        node = prev[node]
        pairs.append(node)
    return AlignmentPath(np.asarray(pairs[::-1], dtype=np.intp), float(dist[(n - 1, m - 1)]))


# -- exhaustive oracle ---------------------------------------------------------

def _naive_weights(values, delay_bias, axis):
    """Delay-biased weights, written cell by cell and kept apart from ``node_weights``."""
    c = np.asarray(values, dtype=np.float64)
    if axis == "reference":
        return _naive_weights(c.T, delay_bias, "unaligned").T
    n, m = c.shape
    w = np.array(c)
    if not delay_bias:
        return w
    for i in range(n):
        for j in range(m):
            if not np.isfinite(c[i, j]):
                continue
            has1 = i >= 1 and np.isfinite(c[i - 1, j])
            has2 = has1 and i >= 2 and np.isfinite(c[i - 2, j])
            if has2:
                w[i, j] = 0.5 * c[i, j] + 0.25 * c[i - 1, j] + 0.25 * c[i - 2, j]
            elif has1:
                w[i, j] = (2.0 / 3.0) * c[i, j] + (1.0 / 3.0) * c[i - 1, j]
    return w


def _paths(finite: np.ndarray):
    """Every in-band monotone corner path, as tuples of flat indices."""
    n, m = finite.shape
    suffixes = {}
    for i in range(n - 1, -1, -1):
        for j in range(m - 1, -1, -1):
            if not finite[i, j]:
                continue
            here = (i * m + j,)
            if (i, j) == (n - 1, m - 1):
                suffixes[i, j] = [here]
                continue
            tails = []
            for di, dj in ((1, 0), (0, 1), (1, 1)):
                tails += suffixes.get((i + di, j + dj), [])
            suffixes[i, j] = [here + t for t in tails]
    return suffixes.get((0, 0), [])


@lru_cache(maxsize=256)
def _path_table(finite_bytes: bytes, n: int, m: int):
    finite = np.frombuffer(finite_bytes, dtype=bool).reshape(n, m)
    paths = _paths(finite)
    length = n + m - 1
    idx = np.full((len(paths), length), n * m, dtype=np.intp)  # n*m indexes a 0.0 pad
    for p, flat in enumerate(paths):
        idx[p, : len(flat)] = flat
    idx.setflags(write=False)
    return idx


def _backward_key(flat: np.ndarray, m: int):
    cells = [divmod(int(f), m) for f in flat]
    codes = []
    for (i0, j0), (i1, j1) in zip(cells, cells[1:]):
        codes.append({(1, 1): DIAG, (0, 1): RIGHT, (1, 0): DOWN}[(i1 - i0, j1 - j0)])
    return tuple(reversed(codes))


def brute_force_align(c: CostMatrix, delay_bias: bool = False, *, delay_axis: str = "reference") -> AlignmentPath:
    """Exact optimum by enumerating every monotone path (small inputs only).

    Path costs are accumulated start to end, the same order the sweep uses,
    so optimal costs agree bit for bit.
    """
    n, m = c.shape
    if n + m > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to N + M <= {BRUTE_FORCE_LIMIT}, got {n} + {m}")
    finite = np.isfinite(c.values)
    if not finite[0, 0] or not finite[n - 1, m - 1]:
        raise BandError("corners are outside the band")
    w = _naive_weights(c.values, delay_bias, delay_axis)
    idx = _path_table(finite.tobytes(), n, m)
    if len(idx) == 0:
        raise BandError("no in-band path joins the corners")

    flat_w = np.append(w.ravel(), 0.0)
    acc = flat_w[idx[:, 0]]
    for k in range(1, idx.shape[1]):
        acc = acc + flat_w[idx[:, k]]
    best = acc.min()
    tied = np.flatnonzero(acc == best)
    chosen = min(tied, key=lambda p: _backward_key(idx[p][idx[p] < n * m], m))
    flat = idx[chosen][idx[chosen] < n * m]
    pairs = np.stack([flat // m, flat % m], axis=1).astype(np.intp)
    return AlignmentPath(pairs, float(best))


def path_cost(c: CostMatrix, pairs, delay_bias: bool = False, *, delay_axis: str = "reference") -> float:
    w = node_weights(c.values, delay_bias, delay_axis)
    total = 0.0
    for i, j in np.asarray(pairs):
        total = total + w[i, j]
    return float(total)


# -- baselines and conversion ---------------------------------------------------

def global_offset(c: CostMatrix) -> int:
    """Best constant shift ``k``: minimizes the mean of ``C[i, i + k]``.

    Searches ``|k| <= band_radius`` (every shift for an unbanded matrix). Ties go
    to the smaller ``|k|``, then the negative shift.
    """
    n, m = c.shape
    radius = c.band_radius
    k_max = int(np.floor(radius)) if radius is not None else max(n, m) - 1
    best = None
    for k in range(-k_max, k_max + 1):
        i = np.arange(max(0, -k), min(n, m - k))
        if i.size == 0:
            continue
        vals = c.values[i, i + k]
        vals = vals[np.isfinite(vals)]
        if vals.size == 0:
            continue
        key = (vals.mean(), abs(k), k)
        if best is None or key < best:
            best = key
    if best is None:
        raise AlignmentError("no valid diagonal within the search range")
    return best[2]


def offset_warp(k: int, n_ref: int, row_step: float, col_step: float, n_rows: int) -> WarpFunction:
    """Warp of the constant shift where row ``i`` matches column ``i + k``."""
    rows = np.clip(np.arange(n_ref) - k, 0, n_rows - 1)
    return WarpFunction(rows * row_step, col_step)


def path_to_warp(path: AlignmentPath, row_step: float, col_step: float) -> WarpFunction:
    """Mean matched row time for every reference column."""
    pairs = np.asarray(path.pairs)
    m = int(pairs[:, 1].max()) + 1
    sums = np.bincount(pairs[:, 1], weights=pairs[:, 0].astype(np.float64), minlength=m)
    counts = np.bincount(pairs[:, 1], minlength=m)
    return WarpFunction(sums / counts * row_step, col_step)
