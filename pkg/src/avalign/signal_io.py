"""Audio and embedding containers plus their file formats.

WAV input accepts RIFF/WAVE with PCM16 or IEEE float32 samples. Everything read is mixed down to mono and resampled
to ``WORKING_RATE``. WAV output is always mono PCM16.

Embeddings use the little-endian AVEM container::

    b"AVEM" | u32 version=1 | u32 N | u32 D | f64 frame_step | u8 modality
    followed by N*D float32 values, row-major

with modality 0 = audio, 1 = video.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass
from math import gcd
from pathlib import Path

import numpy as np
from scipy.io import wavfile
from scipy.signal import firwin, resample_poly

WORKING_RATE = 16000
VIDEO_FRAME_STEP = 0.040

AVEM_MAGIC = b"AVEM"
AVEM_VERSION = 1
_AVEM_HEADER = struct.Struct("<4sIIIdB")
MODALITIES = ("audio", "video")

# Kaiser-windowed sinc, taps per polyphase branch
RESAMPLE_TAPS_PER_PHASE = 16
RESAMPLE_KAISER_BETA = 8.0


class WavFormatError(ValueError):
    """Raised for malformed or unsupported WAV files."""


class EmbeddingFormatError(ValueError):
    """Raised for malformed AVEM files."""


@dataclass(frozen=True)
class AudioClip:
    samples: np.ndarray
    sample_rate: int = WORKING_RATE

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("AudioClip samples must be one-dimensional")
        if not np.all(np.isfinite(samples)):
            raise ValueError("AudioClip samples must be finite")
        if int(self.sample_rate) <= 0:
            raise ValueError("sample_rate must be positive")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate


@dataclass(frozen=True)
class EmbeddingSequence:
    vectors: np.ndarray
    frame_step: float = VIDEO_FRAME_STEP
    modality: str = "video"

    def __post_init__(self):
        vectors = np.asarray(self.vectors)
        if vectors.dtype.kind != "f":
            vectors = vectors.astype(np.float64)
        if vectors.ndim != 2 or vectors.shape[0] < 1 or vectors.shape[1] < 1:
            raise ValueError("embedding vectors must be a non-empty N x D array")
        if not np.all(np.isfinite(vectors)):
            raise ValueError("embedding values must be finite")
        if not self.frame_step > 0:
            raise ValueError("frame_step must be positive")
        if self.modality not in MODALITIES:
            raise ValueError(f"modality must be one of {MODALITIES}")
        vectors.setflags(write=False)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "frame_step", float(self.frame_step))

    def __len__(self):
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def duration(self) -> float:
        return len(self) * self.frame_step


def read_wav(path, target_rate: int = WORKING_RATE) -> AudioClip:
    """Read a PCM16/float32 WAV file as a mono clip at ``target_rate``."""
    with open(path, "rb") as fh:
        head = fh.read(12)
    if len(head) < 12 or head[:4] != b"RIFF" or head[8:12] != b"WAVE":
        raise WavFormatError(f"{path}: not a RIFF/WAVE file")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", wavfile.WavFileWarning)  # unknown chunks are skipped
            rate, raw = wavfile.read(path)
    except Exception as exc:  # scipy reports some malformed files with non-ValueError errors
        raise WavFormatError(f"{path}: malformed WAV ({exc})") from None

    if raw.dtype == np.int16:
        samples = raw.astype(np.float64) / 32768.0
    elif raw.dtype == np.float32:
        samples = raw.astype(np.float64)
    else:
        raise WavFormatError(f"{path}: unsupported encoding ({raw.dtype}); need PCM16 or float32")
    if samples.shape[0] == 0:
        raise WavFormatError(f"{path}: zero-length audio")
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    if not np.all(np.isfinite(samples)):
        raise WavFormatError(f"{path}: non-finite samples")
    return resample(AudioClip(samples, rate), target_rate)


def write_wav(clip: AudioClip, path) -> None:
    """Write ``clip`` as mono PCM16, clamping to the representable range."""
    pcm = np.clip(np.round(clip.samples * 32768.0), -32768, 32767).astype("<i2")
    wavfile.write(path, clip.sample_rate, pcm)


def read_embeddings(path) -> EmbeddingSequence:
    data = Path(path).read_bytes()
    if len(data) < _AVEM_HEADER.size:
        raise EmbeddingFormatError(f"{path}: file shorter than AVEM header")
    magic, version, n, d, step, modality = _AVEM_HEADER.unpack_from(data)
    if magic != AVEM_MAGIC:
        raise EmbeddingFormatError(f"{path}: bad magic {magic!r}")
    if version != AVEM_VERSION:
        raise EmbeddingFormatError(f"{path}: unsupported AVEM version {version}")
    if modality >= len(MODALITIES):
        raise EmbeddingFormatError(f"{path}: unknown modality code {modality}")
    payload = data[_AVEM_HEADER.size :]
    if len(payload) != 4 * n * d:
        raise EmbeddingFormatError(
            f"{path}: truncated payload ({len(payload)} bytes, header says {4 * n * d})"
        )
    vectors = np.frombuffer(payload, dtype="<f4").reshape(n, d)
    if not np.all(np.isfinite(vectors)):
        raise EmbeddingFormatError(f"{path}: non-finite values")
    try:
        return EmbeddingSequence(vectors.astype(np.float32), step, MODALITIES[modality])
    except ValueError as exc:
        raise EmbeddingFormatError(f"{path}: {exc}") from None


def write_embeddings(seq: EmbeddingSequence, path) -> None:
    n, d = seq.vectors.shape
    header = _AVEM_HEADER.pack(
        AVEM_MAGIC, AVEM_VERSION, n, d, seq.frame_step, MODALITIES.index(seq.modality)
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(seq.vectors, dtype="<f4").tobytes())


def is_avem(path) -> bool:
    with open(path, "rb") as fh:
        return fh.read(4) == AVEM_MAGIC


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """Band-limited rational resampling with a Kaiser-windowed sinc filter."""
    target_rate = int(target_rate)
    if target_rate <= 0:
        raise ValueError("target_rate must be positive")
    if target_rate == clip.sample_rate:
        return clip
    g = gcd(target_rate, clip.sample_rate)
    up, down = target_rate // g, clip.sample_rate // g
    factor = max(up, down)
    taps = RESAMPLE_TAPS_PER_PHASE * factor + 1
    h = firwin(taps, 1.0 / factor, window=("kaiser", RESAMPLE_KAISER_BETA))  # resample_poly applies the gain of up
    out = resample_poly(clip.samples, up, down, window=h)
    n_out = int(round(len(clip) * target_rate / clip.sample_rate))
    return AudioClip(out[:n_out], target_rate)
