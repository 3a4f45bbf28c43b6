"""Signal degradations and synthetic warps for robustness experiments.

All randomness comes from :class:`avalign.rng.SplitMix64`, so outputs are pure
functions of (input, parameters, seed).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .align import WarpFunction
from .rng import SplitMix64
from .signal_io import AudioClip, EmbeddingSequence, read_wav
from .vocoder import phase_vocoder

KINDS = ("noise", "silence", "occlusion", "warp")
NOISE_SOURCES = ("white", "pink")


def power(x: np.ndarray) -> float:
    return float(np.mean(np.square(x)))


def snr_db(signal: np.ndarray, noise: np.ndarray) -> float:
    return 10.0 * np.log10(power(signal) / power(noise))


def white_noise(n: int, seed: int, sample_rate: int = 16000) -> AudioClip:
    x = SplitMix64(seed).normal(n)
    return AudioClip(x / np.max(np.abs(x)), sample_rate)


def pink_noise(n: int, seed: int, sample_rate: int = 16000) -> AudioClip:
    """1/f noise by spectral shaping of white noise."""
    spec = np.fft.rfft(SplitMix64(seed).normal(n))
    f = np.arange(spec.size, dtype=np.float64)
    f[0] = 1.0
    x = np.fft.irfft(spec / np.sqrt(f), n)
    return AudioClip(x / np.max(np.abs(x)), sample_rate)


def mix_noise(clip: AudioClip, noise: AudioClip, snr: float) -> AudioClip:
    """Add ``noise`` scaled so the mixture has the requested SNR in dB.

    Short noise is tiled. The result is not renormalized and may exceed [-1, 1].
    """
    x = clip.samples
    reps = -(-len(x) // len(noise))
    n = np.tile(noise.samples, reps)[: len(x)]
    p_clip, p_noise = power(x), power(n)
    if p_clip == 0 or p_noise == 0:
        raise ValueError("SNR undefined for a silent clip or silent noise")
    gain = np.sqrt(p_clip / (p_noise * 10.0 ** (snr / 10.0)))
    return AudioClip(x + gain * n, clip.sample_rate)


def random_silence(clip: AudioClip, duration: float = 1.0, seed: int = 0) -> AudioClip:
    """Zero a contiguous stretch of ``duration`` seconds at a seeded random start."""
    n = int(round(duration * clip.sample_rate))
    if n > len(clip):
        raise ValueError(f"silence of {duration} s exceeds clip of {clip.duration} s")
    start = SplitMix64(seed).integer(0, len(clip) - n)
    out = np.array(clip.samples)
    out[start : start + n] = 0.0
    return AudioClip(out, clip.sample_rate)


def occlude_embeddings(seq: EmbeddingSequence, duration: float = 1.0, seed: int = 0) -> EmbeddingSequence:
    """Replace ``duration`` seconds of frames with the sequence mean (stand-in for a blacked-out picture)."""
    n = int(round(duration / seq.frame_step))
    if n > len(seq):
        raise ValueError(f"occlusion of {duration} s exceeds sequence of {seq.duration} s")
    start = SplitMix64(seed).integer(0, len(seq) - n)
    out = np.array(seq.vectors)
    out[start : start + n] = seq.vectors.mean(axis=0)
    return EmbeddingSequence(out, seq.frame_step, seq.modality)


def apply_warp_audio(clip: AudioClip, warp: WarpFunction) -> AudioClip:
    return phase_vocoder(clip, warp)


def apply_warp_embeddings(seq: EmbeddingSequence, warp: WarpFunction) -> EmbeddingSequence:
    """Nearest-frame resampling: output frame ``k`` is source frame ``round(warp(k * step) / step)``."""
    step = seq.frame_step
    n_out = int(np.floor(warp.duration / step + 1e-9)) + 1
    src = np.interp(np.arange(n_out) * step, warp.ref_times, warp.source_times)
    idx = np.round(src / step).astype(np.intp)
    if idx.min() < 0 or idx.max() > len(seq) - 1:
        raise ValueError("warp reaches outside the embedding sequence")
    return EmbeddingSequence(seq.vectors[idx], step, seq.modality)


def sinusoidal_warp(duration: float, amplitude: float = 0.15, period: float = 4.0,
                    step: float = 0.016) -> WarpFunction:
    """``s(t) = t + amplitude * sin(2 pi t / period)``, clipped to ``[0, duration]``.

    Monotone whenever ``2 pi amplitude / period < 1``.
    """
    t = np.arange(int(np.floor(duration / step + 1e-9)) + 1) * step
    s = np.clip(t + amplitude * np.sin(2.0 * np.pi * t / period), 0.0, duration)
    return WarpFunction(s, step)


def invert_warp(warp: WarpFunction, step: Optional[float] = None) -> WarpFunction:
    """Inverse of a strictly increasing warp, sampled on ``step`` (default: same grid)."""
    step = step or warp.ref_step
    s = warp.source_times
    if np.any(np.diff(s) <= 0):
        raise ValueError("only strictly increasing warps can be inverted")
    n = int(np.floor((s[-1] - s[0]) / step + 1e-9)) + 1
    u = s[0] + np.arange(n) * step
    return WarpFunction(np.interp(u, s, warp.ref_times), step)


@dataclass(frozen=True)
class DegradeSpec:
    kind: str
    snr_db: float = 0.0
    duration: float = 1.0
    seed: int = 0
    noise: str = "white"  # "white", "pink" or a WAV path
    warp: Optional[WarpFunction] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown degradation {self.kind!r}; choose from {KINDS}")
        if self.kind == "warp" and self.warp is None:
            raise ValueError("warp degradation needs a warp")
        if self.duration <= 0:
            raise ValueError("duration must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "DegradeSpec":
        data = dict(data)
        if isinstance(data.get("warp"), dict):
            w = data["warp"]
            data["warp"] = WarpFunction(np.asarray(w["source_times"], dtype=np.float64), w["ref_step"])
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "DegradeSpec":
        return cls.from_dict(json.loads(text))


def noise_clip(spec: DegradeSpec, n: int, sample_rate: int) -> AudioClip:
    if spec.noise == "white":
        return white_noise(n, spec.seed, sample_rate)
    if spec.noise == "pink":
        return pink_noise(n, spec.seed, sample_rate)
    return read_wav(spec.noise, sample_rate)
