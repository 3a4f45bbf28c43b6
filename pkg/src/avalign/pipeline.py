"""End-to-end alignment: features -> cost -> shortest path -> smoothing -> synthesis."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .align import AlignmentPath, WarpFunction, accumulated_cost, dijkstra_align, path_to_warp
from .cost import (
    CostMatrix,
    combine_min,
    default_band_radius,
    pairwise_cost,
    shift_nonnegative,
)
from .signal_io import AudioClip, EmbeddingSequence
from .smooth import SmoothingConfig, adaptive_smooth, resample_warp
from .vocoder import FRAME_STEP, phase_vocoder

log = logging.getLogger(__name__)

Band = Union[None, float, str]  # None = full matrix, "auto" = default radius


@dataclass(frozen=True)
class AlignmentResult:
    cost: CostMatrix
    path: AlignmentPath
    raw_warp: WarpFunction
    warp: WarpFunction


def _trim(pairs):
    """Cut every pair to the shortest unaligned/reference length among them."""
    n = min(len(u) for u, _ in pairs)
    m = min(len(r) for _, r in pairs)
    if any(len(u) != n or len(r) != m for u, r in pairs):
        log.warning("trimming feature streams to %d unaligned x %d reference frames", n, m)
    return [
        (EmbeddingSequence(u.vectors[:n], u.frame_step, u.modality),
         EmbeddingSequence(r.vectors[:m], r.frame_step, r.modality))
        for u, r in pairs
    ]


def build_cost(
    pairs: Sequence[Tuple[EmbeddingSequence, EmbeddingSequence]],
    metric: str = "euclidean",
    band: Band = "auto",
) -> CostMatrix:
    """Combined cost for up to four (unaligned, reference) feature pairs.

    Each pair's matrix is z-normalized, the matrices are merged by elementwise
    minimum and the result is shifted to be non-negative.
    """
    if not pairs:
        raise ValueError("need at least one (unaligned, reference) pair")
    if len(pairs) > 4:
        raise ValueError("at most four modality pairs can be combined")
    steps = {(u.frame_step, r.frame_step) for u, r in pairs}
    if len(steps) > 1:
        raise ValueError(f"feature streams use different frame steps: {sorted(steps)}")
    pairs = _trim(pairs)
    n, m = len(pairs[0][0]), len(pairs[0][1])
    radius = default_band_radius(n, m) if band == "auto" else band
    matrices = [pairwise_cost(u, r, metric, radius) for u, r in pairs]
    return shift_nonnegative(combine_min(matrices))


def align_cost(
    cost: CostMatrix,
    delay_bias: bool = False,
    smoothing: Optional[SmoothingConfig] = SmoothingConfig(),
    delay_axis: str = "reference",
) -> AlignmentResult:
    path = dijkstra_align(cost, delay_bias, delay_axis=delay_axis)
    raw = path_to_warp(path, cost.row_step, cost.col_step)
    warp = adaptive_smooth(raw, smoothing) if smoothing is not None else raw
    return AlignmentResult(cost, path, raw, warp)


def align(
    pairs: Sequence[Tuple[EmbeddingSequence, EmbeddingSequence]],
    metric: str = "euclidean",
    band: Band = "auto",
    delay_bias: bool = False,
    smoothing: Optional[SmoothingConfig] = SmoothingConfig(),
    delay_axis: str = "reference",
) -> AlignmentResult:
    return align_cost(build_cost(pairs, metric, band), delay_bias, smoothing, delay_axis)


def synthesize(unaligned: AudioClip, warp: WarpFunction, slack: float = 0.04) -> AudioClip:
    """Render the unaligned audio on the reference timeline.

    Source times up to ``slack`` seconds past either end of the clip (feature
    streams that run a frame longer than the audio) are clamped; anything
    further is left for the vocoder to reject.
    """
    w = resample_warp(warp, FRAME_STEP)
    s = w.source_times
    inside = (s >= -slack) & (s <= unaligned.duration + slack)
    s = np.where(inside, np.clip(s, 0.0, unaligned.duration), s)
    return phase_vocoder(unaligned, WarpFunction(s, w.ref_step))


def accumulated_for_dump(cost: CostMatrix, delay_bias: bool = False, delay_axis: str = "reference",
                         cumulative: bool = True):
    """Matrix to visualize (cumulative or raw cost) plus the optimal path."""
    path = dijkstra_align(cost, delay_bias, delay_axis=delay_axis)
    if not cumulative:
        return cost.values, path
    D, _ = accumulated_cost(cost, delay_bias, delay_axis=delay_axis)
    return D, path
