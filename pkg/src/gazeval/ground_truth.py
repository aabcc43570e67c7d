"""Spatio-temporal Gaussian ground-truth volumes.

Each attended location contributes an unnormalized peak-1 Gaussian: sigma of
1 degree of visual angle in x and y, 1/3 s in time, truncated per axis at 3
sigma. Contributions from all locations and observers sum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import ndimage

from .errors import EmptyLocations
from .gaze import AttendedLocationSet
from .volume import SaliencyVolume


def degrees_to_pixels(degrees: float, pixels_per_degree: float) -> float:
    if pixels_per_degree <= 0:
        raise ValueError("pixels_per_degree must be positive")
    return degrees * pixels_per_degree


@dataclass(frozen=True)
class GtParams:
    """Geometry of the ground-truth Gaussians.

    ``pixels_per_degree`` ties visual angle to the pixel grid and must come
    from the dataset's viewing setup; there is no sensible default.
    """

    pixels_per_degree: float
    fps: float
    sigma_space_deg: float = 1.0
    sigma_time_s: float = 1.0 / 3.0
    truncation_radius_sigmas: float = 3.0

    def __post_init__(self) -> None:
        for name in (
            "pixels_per_degree",
            "fps",
            "sigma_space_deg",
            "sigma_time_s",
            "truncation_radius_sigmas",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def sigma_space_px(self) -> float:
        return degrees_to_pixels(self.sigma_space_deg, self.pixels_per_degree)

    @property
    def sigma_time_frames(self) -> float:
        return self.sigma_time_s * self.fps


def _axis_profile(centre: float, sigma: float, radius: float, size: int):
    """Gaussian samples on the integer grid within ``radius`` of ``centre``."""
    lo = max(int(math.ceil(centre - radius)), 0)
    hi = min(int(math.floor(centre + radius)), size - 1)
    if hi < lo:
        return None, 0
    offsets = np.arange(lo, hi + 1, dtype=np.float64) - centre
    return np.exp(-0.5 * (offsets / sigma) ** 2), lo


def temporal_kernel(params: GtParams) -> np.ndarray:
    """Peak-1 Gaussian over integer frame offsets, truncated at the radius."""
    radius = int(math.floor(params.sigma_time_frames * params.truncation_radius_sigmas))
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    return np.exp(-0.5 * (offsets / params.sigma_time_frames) ** 2)


def accumulate_gaussians(
    points: Sequence[tuple[float, float, int]],
    params: GtParams,
    width: int,
    height: int,
    frames: int,
) -> SaliencyVolume:
    """Sum truncated peak-1 Gaussians at (x, y, frame) points.

    Spatial profiles are stamped exactly at each (possibly fractional)
    centre; the temporal profile is shared across points because frame
    indices are integers, so it is applied once as a 1-d correlation along
    the frame axis. float32 accumulator, float64 kernel arithmetic.
    """
    if width < 1 or height < 1 or frames < 1:
        raise ValueError("volume dimensions must be >= 1")
    if not points:
        raise EmptyLocations("no points to build a volume from")
    sigma = params.sigma_space_px
    radius = sigma * params.truncation_radius_sigmas
    acc = np.zeros((frames, height, width), dtype=np.float32)
    for x, y, frame in points:
        frame = int(frame)
        if not 0 <= frame < frames:
            raise ValueError(f"frame {frame} outside [0, {frames - 1}]")
        gx, x0 = _axis_profile(float(x), sigma, radius, width)
        gy, y0 = _axis_profile(float(y), sigma, radius, height)
        if gx is None or gy is None:
            continue
        acc[frame, y0 : y0 + gy.size, x0 : x0 + gx.size] += np.multiply.outer(gy, gx)
    kernel = temporal_kernel(params)
    if kernel.size > 1:
        acc = ndimage.correlate1d(acc, kernel, axis=0, mode="constant", cval=0.0)
    return SaliencyVolume(acc)


def build_gt_volume(
    locs: AttendedLocationSet,
    params: GtParams,
    width: int,
    height: int,
    frames: int,
) -> SaliencyVolume:
    """Ground-truth volume for one clip: summed Gaussians at its locations."""
    if not locs.locations:
        raise EmptyLocations(
            f"clip {locs.clip_id!r}: no {locs.condition.value} locations"
        )
    points = [(l.x, l.y, l.frame) for l in locs.locations]
    vol = accumulate_gaussians(points, params, width, height, frames)
    vol.clip_id = locs.clip_id
    return vol
