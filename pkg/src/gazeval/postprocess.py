"""Adaptive centre-bias post-processing for saliency volumes."""
from __future__ import annotations

import math

import numpy as np

from .volume import SaliencyVolume


def _gaussian_patch_frame(
    px: int,
    py: int,
    sigma: float,
    radius: float,
    width: int,
    height: int,
) -> np.ndarray:
    frame = np.zeros((height, width), dtype=np.float64)
    x0 = max(int(math.ceil(px - radius)), 0)
    x1 = min(int(math.floor(px + radius)), width - 1)
    y0 = max(int(math.ceil(py - radius)), 0)
    y1 = min(int(math.floor(py + radius)), height - 1)
    gx = np.exp(-0.5 * ((np.arange(x0, x1 + 1) - px) / sigma) ** 2)
    gy = np.exp(-0.5 * ((np.arange(y0, y1 + 1) - py) / sigma) ** 2)
    frame[y0 : y1 + 1, x0 : x1 + 1] = np.multiply.outer(gy, gx)
    return frame


def gravity_centre_bias(
    vol: SaliencyVolume,
    pixels_per_degree: float,
    bias_weight: float = 0.4,
    sigma_deg: float = 3.0,
    truncation_radius_sigmas: float = 3.0,
) -> SaliencyVolume:
    """Blend each frame with a Gaussian at its own centre of mass.

    Per frame: the saliency centre of mass is rounded to a pixel (half up,
    clamped), a truncated peak-1 Gaussian of ``sigma_deg`` degrees is placed
    there, rescaled to span [0, frame max], and mixed as
    ``(1 - bias_weight) * frame + bias_weight * bias``. All-zero frames pass
    through unchanged. Arithmetic and output are float64 so the pointwise
    bounds ``out >= (1 - bias_weight) * frame`` and ``out <= frame max`` hold
    exactly.
    """
    if pixels_per_degree <= 0:
        raise ValueError("pixels_per_degree must be positive")
    if not 0.0 <= bias_weight <= 1.0:
        raise ValueError("bias_weight must lie in [0, 1]")
    if sigma_deg <= 0 or truncation_radius_sigmas <= 0:
        raise ValueError("sigma_deg and truncation_radius_sigmas must be positive")
    sigma = sigma_deg * pixels_per_degree
    radius = sigma * truncation_radius_sigmas
    height, width = vol.height, vol.width
    xs = np.arange(width, dtype=np.float64)
    ys = np.arange(height, dtype=np.float64)
    out = np.empty(vol.data.shape, dtype=np.float64)
    for f in range(vol.frames):
        frame = vol.data[f].astype(np.float64)
        peak = float(frame.max())
        if peak == 0.0:
            out[f] = frame
            continue
        total = float(frame.sum())
        com_x = float((frame.sum(axis=0) * xs).sum()) / total
        com_y = float((frame.sum(axis=1) * ys).sum()) / total
        px = min(max(int(math.floor(com_x + 0.5)), 0), width - 1)
        py = min(max(int(math.floor(com_y + 0.5)), 0), height - 1)
        bias = _gaussian_patch_frame(px, py, sigma, radius, width, height)
        lo = float(bias.min())
        span = 1.0 - lo  # the peak pixel is exactly 1
        if span > 0.0:
            bias = (bias - lo) * (peak / span)
        else:
            bias = np.full_like(bias, peak)
        mixed = (1.0 - bias_weight) * frame + bias_weight * bias
        # guard the convex upper bound against float overshoot
        np.minimum(mixed, peak, out=mixed)
        out[f] = mixed
    return SaliencyVolume(out, clip_id=vol.clip_id)
