"""STFT, inverse STFT and MFCC features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.fft import dct

from .signal_io import AudioClip, EmbeddingSequence

N_FFT = 512
HOP = 256
LOG_FLOOR = 1e-10


def hann(n: int) -> np.ndarray:
    """Periodic Hann window (sums to a constant at 50% overlap)."""
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


@dataclass(frozen=True)
class Spectrogram:
    frames: np.ndarray  # T x (n_fft // 2 + 1), complex
    n_fft: int = N_FFT
    hop: int = HOP
    window: str = "hann"
    sample_rate: int = 16000

    def __post_init__(self):
        if self.frames.ndim != 2 or self.frames.shape[1] != self.n_fft // 2 + 1:
            raise ValueError("spectrogram must have n_fft // 2 + 1 bins per frame")

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]


def frame_count(length: int, win: int, hop: int) -> int:
    return (length - win) // hop + 1


def _frames(x: np.ndarray, win: int, hop: int) -> np.ndarray:
    if len(x) < win:
        raise ValueError(f"signal of {len(x)} samples is shorter than one window ({win})")
    return sliding_window_view(x, win)[::hop]


def stft(clip: AudioClip, n_fft: int = N_FFT, hop: int = HOP) -> Spectrogram:
    """Hann-windowed STFT; frame ``t`` covers samples ``[t*hop, t*hop + n_fft)``."""
    frames = _frames(clip.samples, n_fft, hop) * hann(n_fft)
    return Spectrogram(np.fft.rfft(frames, axis=1), n_fft, hop, "hann", clip.sample_rate)


def istft(spec: Spectrogram) -> AudioClip:
    """Weighted overlap-add with squared-window normalization.

    Output length is ``hop * (T - 1) + n_fft``. Samples covered by no window
    energy (the very first one) are left at zero.
    """
    n_fft, hop = spec.n_fft, spec.hop
    win = hann(n_fft)
    frames = np.fft.irfft(spec.frames, n=n_fft, axis=1) * win
    length = hop * (spec.n_frames - 1) + n_fft
    out = np.zeros(length)
    norm = np.zeros(length)
    w2 = win * win
    for t, frame in enumerate(frames):
        out[t * hop : t * hop + n_fft] += frame
        norm[t * hop : t * hop + n_fft] += w2
    nz = norm > 1e-10
    out[nz] /= norm[nz]
    return AudioClip(out, spec.sample_rate)


@dataclass(frozen=True)
class MfccConfig:
    n_coeffs: int = 13
    n_mels: int = 40
    win_length: float = 0.025
    hop: float = 0.010
    pre_emphasis: float = 0.97
    f_min: float = 0.0
    f_max: float = 8000.0

    def __post_init__(self):
        if not 1 <= self.n_coeffs <= self.n_mels:
            raise ValueError("need 1 <= n_coeffs <= n_mels")
        if not 0 < self.hop <= self.win_length:
            raise ValueError("need 0 < hop <= win_length")

    @classmethod
    def at_hop(cls, hop: float, **kw) -> "MfccConfig":
        """Config with the given hop, widening the window if the hop exceeds it."""
        return cls(hop=hop, win_length=max(cls.win_length, hop), **kw)


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, n_fft: int, sample_rate: int, f_min: float, f_max: float):
    """Triangular filters on the HTK mel scale, shape ``(n_mels, n_fft // 2 + 1)``."""
    edges = mel_to_hz(np.linspace(hz_to_mel(f_min), hz_to_mel(f_max), n_mels + 2))
    freqs = np.arange(n_fft // 2 + 1) * sample_rate / n_fft
    lower = (freqs[None, :] - edges[:-2, None]) / (edges[1:-1] - edges[:-2])[:, None]
    upper = (edges[2:, None] - freqs[None, :]) / (edges[2:] - edges[1:-1])[:, None]
    return np.maximum(0.0, np.minimum(lower, upper))


def mfcc(clip: AudioClip, config: MfccConfig = MfccConfig()) -> EmbeddingSequence:
    sr = clip.sample_rate
    win = int(round(config.win_length * sr))
    hop = int(round(config.hop * sr))
    n_fft = 1 << (win - 1).bit_length()

    x = clip.samples
    if config.pre_emphasis:
        x = np.append(x[:1], x[1:] - config.pre_emphasis * x[:-1])
    frames = _frames(x, win, hop) * hann(win)
    power = np.abs(np.fft.rfft(frames, n=n_fft, axis=1)) ** 2 / n_fft

    fbank = mel_filterbank(config.n_mels, n_fft, sr, config.f_min, min(config.f_max, sr / 2))
    log_mel = np.log(np.maximum(power @ fbank.T, LOG_FLOOR))
    coeffs = dct(log_mel, type=2, axis=1, norm="ortho")[:, : config.n_coeffs]
    return EmbeddingSequence(coeffs, hop / sr, "audio")
