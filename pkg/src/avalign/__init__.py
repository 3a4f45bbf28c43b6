"""Dynamic alignment of re-recorded speech to reference lip movements."""

from .align import (
    BACKEND,
    AlignmentPath,
    WarpFunction,
    brute_force_align,
    dijkstra_align,
    global_offset,
    path_to_warp,
)
from .cost import CostMatrix, combine_min, normalize, pairwise_cost
from .evaluation import AsynchronyReport, asynchrony_error, ground_truth_warp
from .features import MfccConfig, Spectrogram, istft, mfcc, stft
from .signal_io import (
    AudioClip,
    EmbeddingSequence,
    read_embeddings,
    read_wav,
    resample,
    write_embeddings,
    write_wav,
)
from .smooth import SmoothingConfig, adaptive_smooth, gaussian_smooth, laplacian_smooth, resample_warp
from .vocoder import phase_vocoder, speed

__version__ = "0.1.0"
