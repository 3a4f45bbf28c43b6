"""Warp smoothing under a maximum-deviation bound, and warp resampling."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .align import WarpFunction


def _default_sigmas():
    return tuple(0.5 * 1.5**k for k in range(13))


@dataclass(frozen=True)
class SmoothingConfig:
    lambda_max: float = 0.04  # seconds; keep below the 45 ms lead tolerance
    laplacian_alpha: float = 0.5
    laplacian_iters: int = 2
    sigma_grid: tuple = field(default_factory=_default_sigmas)  # in reference frames

    def __post_init__(self):
        if not self.lambda_max > 0:
            raise ValueError("lambda_max must be positive")
        if not 0 < self.laplacian_alpha <= 1:
            raise ValueError("laplacian_alpha must lie in (0, 1]")


def laplacian_smooth(w: WarpFunction, alpha: float = 0.5, iters: int = 2) -> WarpFunction:
    """Jacobi relaxation ``x_k += alpha * (x_{k-1} - 2 x_k + x_{k+1}) / 2``; endpoints fixed."""
    x = np.array(w.source_times)
    if x.size < 3:
        return w
    for _ in range(iters):
        x[1:-1] += alpha * (x[:-2] - 2.0 * x[1:-1] + x[2:]) / 2.0
    return WarpFunction(x, w.ref_step)


def gaussian_kernel(sigma: float) -> np.ndarray:
    radius = int(np.ceil(3.0 * sigma))
    t = np.arange(-radius, radius + 1)
    k = np.exp(-0.5 * (t / sigma) ** 2)
    return k / k.sum()


def gaussian_smooth(w: WarpFunction, sigma: float) -> WarpFunction:
    """Truncated Gaussian (radius 3 sigma) with endpoints pinned.

    The signal is extended by odd reflection about each endpoint, so straight
    segments pass through unchanged all the way to the ends.
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    x = w.source_times
    if sigma == 0 or x.size < 3:
        return w
    k = gaussian_kernel(sigma)
    r = len(k) // 2
    padded = x
    # odd reflection covers at most n - 1 samples per pass; repeat for wide kernels
    while padded.size < x.size + 2 * r:
        padded = np.pad(padded, min(r, padded.size - 1), mode="reflect", reflect_type="odd")
    extra = (padded.size - x.size) // 2
    padded = padded[extra - r : extra + x.size + r]
    y = np.convolve(padded, k, mode="valid")
    y[0], y[-1] = x[0], x[-1]
    return WarpFunction(y, w.ref_step)


def _project_monotone(y: np.ndarray, first: float, last: float) -> np.ndarray:
    """Running maximum, capped at the last endpoint."""
    return np.minimum(np.maximum.accumulate(np.maximum(y, first)), last)


def adaptive_smooth(w: WarpFunction, cfg: SmoothingConfig = SmoothingConfig()) -> WarpFunction:
    """Smooth as much as possible while staying within ``cfg.lambda_max`` of ``w``.

    Laplacian relaxation first (skipped if it alone breaks the bound), then the
    widest Gaussian from ``cfg.sigma_grid`` that keeps the bound, then a
    monotone projection. For a non-decreasing input the result is
    non-decreasing, keeps both endpoints, and never moves by more than
    ``lambda_max``.
    """
    orig = w.source_times
    lam = cfg.lambda_max

    base = laplacian_smooth(w, cfg.laplacian_alpha, cfg.laplacian_iters)
    if np.max(np.abs(base.source_times - orig)) > lam:
        base = w

    out = base.source_times
    for sigma in sorted(cfg.sigma_grid, reverse=True):
        y = gaussian_smooth(base, sigma).source_times
        if np.max(np.abs(y - orig)) <= lam:
            out = y
            break
    return WarpFunction(_project_monotone(out, orig[0], orig[-1]), w.ref_step)


def resample_warp(w: WarpFunction, target_step: float) -> WarpFunction:
    """Linear interpolation of ``w`` onto a grid of ``target_step`` over the same span."""
    if not target_step > 0:
        raise ValueError("target_step must be positive")
    if np.isclose(target_step, w.ref_step, rtol=0, atol=1e-12):
        return w
    n = int(np.floor(w.duration / target_step + 1e-9)) + 1
    t = np.arange(n) * target_step
    return WarpFunction(np.interp(t, w.ref_times, w.source_times), target_step)
