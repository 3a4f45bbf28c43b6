"""Speech-like test material.

``speech_like`` strings together syllable-sized segments: voiced ones are
harmonic stacks on a gliding pitch shaped by random formant peaks, unvoiced
ones are formant-shaped noise, separated by short pauses. The result has the
time-varying spectral envelope MFCC alignment needs, without shipping any
recordings.
"""

import numpy as np

from .rng import SplitMix64
from .signal_io import WORKING_RATE, AudioClip


def _formant_gain(freqs, formants, bandwidth):
    g = np.zeros_like(freqs)
    for f in formants:
        g += np.exp(-0.5 * ((freqs - f) / bandwidth) ** 2)
    return g


def _envelope(n):
    ramp = min(n // 4, int(0.02 * WORKING_RATE))
    env = np.ones(n)
    if ramp:
        r = 0.5 - 0.5 * np.cos(np.pi * np.arange(ramp) / ramp)
        env[:ramp] = r
        env[n - ramp :] = r[::-1]
    return env


def speech_like(duration: float, seed: int = 0, sample_rate: int = WORKING_RATE) -> AudioClip:
    rng = SplitMix64(seed)
    total = int(round(duration * sample_rate))
    out = np.zeros(total)
    pos = 0
    while pos < total:
        u = rng.uniform(8)
        if u[0] < 0.2:
            pos += int((0.05 + 0.2 * u[1]) * sample_rate)  # pause
            continue
        n = min(int((0.08 + 0.22 * u[1]) * sample_rate), total - pos)
        formants = (300 + 600 * u[2], 900 + 1600 * u[3], 2300 + 1200 * u[4])
        t = np.arange(n) / sample_rate
        if u[5] < 0.75:
            f0 = 100 + 120 * u[6]
            glide = f0 * (1.0 + 0.15 * (u[7] - 0.5) * t / max(t[-1], 1e-9))
            phase = 2 * np.pi * np.cumsum(glide) / sample_rate
            k = np.arange(1, int(4000 // f0) + 1)
            amps = _formant_gain(k * f0, formants, 120.0)
            seg = (amps[:, None] * np.sin(k[:, None] * phase[None, :])).sum(axis=0)
        else:
            spec = np.fft.rfft(rng.normal(n))
            freqs = np.fft.rfftfreq(n, 1.0 / sample_rate)
            seg = np.fft.irfft(spec * _formant_gain(freqs, formants + (5000.0,), 400.0), n)
        peak = np.max(np.abs(seg))
        if peak > 0:
            out[pos : pos + n] += (0.3 + 0.5 * u[0]) * seg / peak * _envelope(n)
        pos += n
    out += 1e-3 * rng.normal(total)
    return AudioClip(np.clip(out, -1.0, 1.0), sample_rate)
