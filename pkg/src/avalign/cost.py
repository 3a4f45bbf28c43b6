"""Pairwise matching costs between an unaligned sequence (rows) and a reference (columns).

Absent (out-of-band) cells are stored as ``+inf``; lower values are better
matches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .signal_io import EmbeddingSequence

METRICS = ("euclidean", "neg_cosine", "neg_dot")
MIN_BAND_RADIUS = 25


class BandError(ValueError):
    """The band does not connect (0, 0) to (N-1, M-1)."""


def default_band_radius(n: int, m: int) -> int:
    return max(MIN_BAND_RADIUS, math.ceil(0.15 * max(n, m)))


def band_limits(n: int, m: int, radius: Optional[float]):
    """Per-row inclusive column range ``(lo, hi)`` of the band.

    A cell is in band iff ``|j - i * (m - 1) / max(n - 1, 1)| <= radius``.
    Rows with an empty range get ``lo > hi``.
    """
    if radius is None:
        return np.zeros(n, dtype=np.intp), np.full(n, m - 1, dtype=np.intp)
    slope = (m - 1) / max(n - 1, 1)
    centre = np.arange(n) * slope
    # the small epsilon keeps exact boundary cells in band despite rounding in i * slope
    lo = np.ceil(centre - radius - 1e-9).astype(np.intp)
    hi = np.floor(centre + radius + 1e-9).astype(np.intp)
    return np.clip(lo, 0, m - 1), np.clip(hi, -1, m - 1)


def band_mask(n: int, m: int, radius: Optional[float]) -> np.ndarray:
    lo, hi = band_limits(n, m, radius)
    j = np.arange(m)
    return (j[None, :] >= lo[:, None]) & (j[None, :] <= hi[:, None])


def band_connects(lo: np.ndarray, hi: np.ndarray, m: int) -> bool:
    """True if a monotone unit-step path joins the corners inside the band."""
    if len(lo) == 0 or lo[0] != 0 or hi[0] < 0:
        return False
    start = 0  # leftmost reachable column in the current row
    for i in range(1, len(lo)):
        start = max(lo[i], start)
        if start > hi[i - 1] + 1 or start > hi[i]:
            return False
    return bool(hi[-1] == m - 1)


@dataclass(frozen=True)
class CostMatrix:
    values: np.ndarray
    band_radius: Optional[float] = None
    row_step: float = 0.040
    col_step: float = 0.040

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or 0 in values.shape:
            raise ValueError("cost matrix must be a non-empty 2-D array")
        mask = band_mask(*values.shape, self.band_radius)
        if not np.all(np.isfinite(values[mask])):
            raise ValueError("in-band costs must be finite")
        values = np.where(mask, values, np.inf)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def shape(self):
        return self.values.shape

    @property
    def mask(self) -> np.ndarray:
        return band_mask(*self.values.shape, self.band_radius)

    def limits(self):
        return band_limits(*self.values.shape, self.band_radius)

    def with_values(self, values) -> "CostMatrix":
        return CostMatrix(values, self.band_radius, self.row_step, self.col_step)


def _pair_costs(a: np.ndarray, b: np.ndarray, metric: str) -> np.ndarray:
    """Costs of paired rows ``a[k]`` vs ``b[k]``."""
    if metric == "euclidean":
        return np.sqrt(np.sum((a - b) ** 2, axis=1))
    dots = np.sum(a * b, axis=1)
    if metric == "neg_dot":
        return -dots
    norms = np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
    return -np.divide(dots, norms, out=np.zeros_like(dots), where=norms > 0)


def pairwise_cost(
    unaligned: EmbeddingSequence,
    reference: EmbeddingSequence,
    metric: str = "euclidean",
    band_radius: Optional[float] = None,
) -> CostMatrix:
    """Cost of matching every unaligned frame to every reference frame.

    Only in-band cells are evaluated when ``band_radius`` is given.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")
    if unaligned.dim != reference.dim:
        raise ValueError(
            f"embedding dimension mismatch: {unaligned.dim} (unaligned) vs {reference.dim} (reference)"
        )
    a = np.asarray(unaligned.vectors, dtype=np.float64)
    b = np.asarray(reference.vectors, dtype=np.float64)
    n, m = len(a), len(b)
    lo, hi = band_limits(n, m, band_radius)
    if not band_connects(lo, hi, m):
        raise BandError(f"band radius {band_radius} does not connect the corners of a {n}x{m} matrix")

    values = np.full((n, m), np.inf)
    for i in range(n):
        cols = slice(lo[i], hi[i] + 1)
        bi = b[cols]
        values[i, cols] = _pair_costs(np.broadcast_to(a[i], bi.shape), bi, metric)
    return CostMatrix(values, band_radius, unaligned.frame_step, reference.frame_step)


def normalize(c: CostMatrix) -> CostMatrix:
    """Z-score the present cells; a constant matrix maps to zeros."""
    mask = c.mask
    present = c.values[mask]
    if present.size < 2:
        raise ValueError("normalization needs at least two present cells")
    std = present.std()
    out = np.full(c.shape, np.inf)
    out[mask] = 0.0 if std == 0 else (present - present.mean()) / std
    return c.with_values(out)


def combine_min(matrices: Sequence[CostMatrix]) -> CostMatrix:
    """Elementwise minimum of the z-normalized inputs."""
    if not matrices:
        raise ValueError("combine_min needs at least one matrix")
    first = matrices[0]
    for c in matrices[1:]:
        if c.shape != first.shape or c.band_radius != first.band_radius:
            raise ValueError(f"cannot combine matrices of shape/band {c.shape}/{c.band_radius} "
                             f"and {first.shape}/{first.band_radius}")
    stacked = np.stack([normalize(c).values for c in matrices])
    return first.with_values(stacked.min(axis=0))


def shift_nonnegative(c: CostMatrix) -> CostMatrix:
    """Subtract the smallest present cost so every weight is >= 0.

    Path costs sum node weights over paths of different lengths, so this shift
    does change the optimum: it restores the usual preference for diagonal
    steps that negative (z-scored) costs would otherwise reverse.
    """
    mask = c.mask
    return c.with_values(np.where(mask, c.values - c.values[mask].min(), np.inf))


def to_gray(values: np.ndarray, path=None) -> np.ndarray:
    """8-bit image with lower cost darker; absent cells and path cells are 255."""
    finite = np.isfinite(values)
    img = np.full(values.shape, 255, dtype=np.uint8)
    if finite.any():
        lo, hi = values[finite].min(), values[finite].max()
        scaled = np.zeros(values.shape) if hi == lo else (values - lo) / (hi - lo)
        img[finite] = np.round(255.0 * scaled[finite]).astype(np.uint8)
    if path is not None:
        pairs = np.asarray(path)
        img[pairs[:, 0], pairs[:, 1]] = 255
    return img


def dump_pgm(values: np.ndarray, path, overlay=None) -> None:
    """Write a binary (P5) PGM of a cost or cumulative-cost matrix.

    Rows of the image are matrix rows (unaligned frames). ``overlay`` is an
    optional sequence of ``(i, j)`` cells drawn at full intensity.
    """
    img = to_gray(np.asarray(values, dtype=np.float64), overlay)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_pgm(path) -> np.ndarray:
    data = open(path, "rb").read()
    fields, pos = [], 0
    while len(fields) < 4:
        while data[pos : pos + 1].isspace():
            pos += 1
        end = pos
        while end < len(data) and not data[end : end + 1].isspace():
            end += 1
        fields.append(data[pos:end])
        pos = end
    if fields[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    w, h, maxval = (int(f) for f in fields[1:])
    if maxval != 255:
        raise ValueError(f"{path}: only 8-bit PGM supported")
    # exactly one whitespace byte separates the header from the raster
    raster = data[pos + 1 : pos + 1 + w * h]
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w)
