"""Ground-truth warps from MFCC alignment and the audio-visual asynchrony metric.

Offsets are ``estimated - ground_truth`` source times at each reference frame.
A positive offset means the output plays, at that instant, material the
ground truth places later, so the audio leads the picture. Frames leading by
more than ``lead_max`` or lagging by more than ``lag_max`` count as errors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .align import WarpFunction, dijkstra_align, path_to_warp
from .cost import pairwise_cost
from .features import MfccConfig, mfcc
from .signal_io import AudioClip
from .smooth import resample_warp

LEAD_MAX = 0.045
LAG_MAX = 0.125


@dataclass(frozen=True)
class AsynchronyReport:
    offsets: np.ndarray
    pct_outside: float
    lead_pct: float
    lag_pct: float
    lead_max: float = LEAD_MAX
    lag_max: float = LAG_MAX

    @property
    def n_frames(self) -> int:
        return len(self.offsets)

    def to_dict(self) -> dict:
        return {
            "pct_outside": self.pct_outside,
            "lead_pct": self.lead_pct,
            "lag_pct": self.lag_pct,
            "n_frames": self.n_frames,
            "thresholds": {"lead_max": self.lead_max, "lag_max": self.lag_max},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def ground_truth_warp(
    ref_audio: AudioClip, unaligned_audio: AudioClip, cfg: MfccConfig = MfccConfig()
) -> WarpFunction:
    """Full-band MFCC alignment of ``unaligned_audio`` onto ``ref_audio``."""
    if ref_audio.sample_rate != unaligned_audio.sample_rate:
        raise ValueError("clips must share a sample rate")
    ref = mfcc(ref_audio, cfg)
    src = mfcc(unaligned_audio, cfg)
    path = dijkstra_align(pairwise_cost(src, ref, "euclidean"), delay_bias=False)
    return path_to_warp(path, src.frame_step, ref.frame_step)


def asynchrony_error(
    estimated: WarpFunction,
    ground_truth: WarpFunction,
    lead_max: float = LEAD_MAX,
    lag_max: float = LAG_MAX,
) -> AsynchronyReport:
    """Percentage of reference frames outside the ``[-lag_max, +lead_max]`` window.

    Both warps are brought to the coarser of their two grids and compared over
    the span they share.
    """
    if not (lead_max > 0 and lag_max > 0):
        raise ValueError("thresholds must be positive")
    step = max(estimated.ref_step, ground_truth.ref_step)
    est = resample_warp(estimated, step).source_times
    gt = resample_warp(ground_truth, step).source_times
    n = min(len(est), len(gt))
    if n == 0:
        raise ValueError("warps share no reference frames")
    offsets = est[:n] - gt[:n]
    lead = int(np.count_nonzero(offsets > lead_max))
    lag = int(np.count_nonzero(offsets < -lag_max))
    return AsynchronyReport(
        offsets,
        100.0 * (lead + lag) / n,
        100.0 * lead / n,
        100.0 * lag / n,
        lead_max,
        lag_max,
    )
