"""Phase-vocoder time-scale modification along a warp function.

Frames are centred: the signal is zero-padded by half a window on each side,
so STFT frame ``t`` is centred on sample ``t * hop`` of the original clip and
a source time ``s`` maps to fractional frame ``s * sample_rate / hop``. Output
frame ``k`` is centred on output sample ``k * hop`` and takes its content from
the source position given by warp sample ``k``.
"""

from __future__ import annotations

import numpy as np

from .align import WarpFunction
from .features import HOP, N_FFT, Spectrogram, istft, stft
from .signal_io import WORKING_RATE, AudioClip
from .smooth import resample_warp

FRAME_STEP = HOP / WORKING_RATE  # 16 ms


class SynthesisError(ValueError):
    """The warp or clip cannot be synthesized."""


def _principal(phase):
    return np.mod(phase + np.pi, 2.0 * np.pi) - np.pi


def phase_vocoder(clip: AudioClip, warp: WarpFunction) -> AudioClip:
    """Render ``clip`` so that reference time ``t`` plays source time ``warp(t)``.

    Warps on another grid are first resampled to the 16 ms frame step.
    """
    if clip.sample_rate != WORKING_RATE:
        raise SynthesisError(f"clip must be at {WORKING_RATE} Hz, got {clip.sample_rate}")
    warp = resample_warp(warp, FRAME_STEP)
    s = warp.source_times
    tol = 0.5 / clip.sample_rate
    if s.min() < -tol or s.max() > clip.duration + tol:
        raise SynthesisError(
            f"warp spans [{s.min():.3f}, {s.max():.3f}] s, clip lasts {clip.duration:.3f} s"
        )

    pad = N_FFT // 2
    padded = AudioClip(np.pad(clip.samples, pad), clip.sample_rate)
    spec = stft(padded, N_FFT, HOP)
    X = spec.frames
    n_src = X.shape[0]
    if n_src < 2:
        raise SynthesisError("clip too short for the phase vocoder")
    mag = np.abs(X)
    phase = np.angle(X)

    # per-bin phase advance between consecutive source frames
    expected = 2.0 * np.pi * np.arange(X.shape[1]) * HOP / N_FFT
    advance = expected + _principal(np.diff(phase, axis=0) - expected)

    pos = np.clip(s * clip.sample_rate / HOP, 0.0, n_src - 1)
    base = np.minimum(np.floor(pos).astype(np.intp), n_src - 2)
    frac = (pos - base)[:, None]
    out_mag = (1.0 - frac) * mag[base] + frac * mag[base + 1]

    # output hop equals source hop, so measured advances carry over unscaled
    out_phase = np.empty_like(out_mag)
    out_phase[0] = phase[int(round(pos[0]))]
    if len(pos) > 1:
        out_phase[1:] = out_phase[0] + np.cumsum(advance[base[:-1]], axis=0)

    frames = out_mag * np.exp(1j * out_phase)
    y = istft(Spectrogram(frames, N_FFT, HOP, "hann", clip.sample_rate)).samples
    n_out = (len(s) - 1) * HOP + 1
    return AudioClip(y[pad : pad + n_out], clip.sample_rate)


def constant_warp(duration: float, rate: float) -> WarpFunction:
    """Warp ``s(t) = rate * t`` covering a source of ``duration`` seconds."""
    if not rate > 0:
        raise ValueError("rate must be positive")
    n = int(np.floor(duration / rate / FRAME_STEP + 1e-9)) + 1
    return WarpFunction(rate * np.arange(n) * FRAME_STEP, FRAME_STEP)


def speed(clip: AudioClip, rate: float) -> AudioClip:
    """Play ``clip`` ``rate`` times faster without changing pitch."""
    return phase_vocoder(clip, constant_warp(clip.duration, rate))
