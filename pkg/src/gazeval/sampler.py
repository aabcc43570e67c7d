"""Training-data sampling: balanced location draws and subvolume extraction.

Positives come from attended locations, negatives from anywhere else on the
voxel grid; around each drawn location a small video block is cut out, with
mirror padding where the block sticks out of the clip.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from PIL import Image

from .errors import (
    EmptyClip,
    EmptyLocations,
    InconsistentFrameSize,
    NegativeSamplingExhausted,
)
from .gaze import AttendedLocationSet
from .volume import list_frame_images

Voxel = tuple[int, int, int]  # (x, y, frame)


@dataclass(frozen=True)
class SubvolumeSpec:
    """Block geometry around a centre voxel (x, y, frame)."""

    centre: Voxel
    width_px: int = 128
    height_px: int = 128
    frames: int = 15

    def __post_init__(self) -> None:
        if self.width_px < 1 or self.height_px < 1 or self.frames < 1:
            raise ValueError("subvolume dimensions must be >= 1")


def dedup_pool_voxels(
    pool: AttendedLocationSet, width: int, height: int
) -> list[Voxel]:
    """Unique (x, y, frame) voxels of the pool, first occurrence order."""
    fs, ys, xs = pool.voxel_arrays(width, height)
    return list(dict.fromkeys(zip(xs.tolist(), ys.tolist(), fs.tolist())))


def draw_matched_negatives(
    pool_voxels: Sequence[Voxel],
    width: int,
    height: int,
    frames: int,
    n: int,
    rng: np.random.Generator,
) -> list[Voxel]:
    """Uniform voxels that avoid every voxel in the positive pool.

    Rejection sampling on the flat C-order (frame, y, x) grid: rounds of
    ``rng.integers(0, n_voxels, size=max(2 * missing, 64))`` until ``n``
    survivors accumulate. Raises NegativeSamplingExhausted once
    ``max(10000, 200 * n)`` candidates have been drawn without filling up.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    n_voxels = width * height * frames
    blocked = {
        (int(f) * height + int(y)) * width + int(x) for x, y, f in pool_voxels
    }
    budget = max(10_000, 200 * n)
    drawn = 0
    out: list[Voxel] = []
    while len(out) < n:
        if drawn >= budget:
            raise NegativeSamplingExhausted(
                f"{len(out)}/{n} negatives after {drawn} candidate draws"
            )
        batch = min(max(2 * (n - len(out)), 64), budget - drawn)
        cand = rng.integers(0, n_voxels, size=batch)
        drawn += batch
        for flat in cand.tolist():
            if flat in blocked:
                continue
            f, rest = divmod(flat, height * width)
            y, x = divmod(rest, width)
            out.append((x, y, f))
            if len(out) == n:
                break
    return out


def sample_training_locations(
    pool: AttendedLocationSet,
    width: int,
    height: int,
    frames: int,
    n_total: int,
    seed: int,
) -> tuple[list[Voxel], list[Voxel]]:
    """Draw n_total/2 positive and n_total/2 negative voxels for one clip.

    Positives come uniformly from the deduplicated voxel grid of the pool,
    without replacement when it is large enough (one ``choice`` call on
    ``default_rng(seed)``); negatives continue on the same generator via
    ``draw_matched_negatives`` and avoid the *entire* pool, drawn or not.
    """
    if n_total < 2 or n_total % 2:
        raise ValueError("n_total must be a positive even number")
    if not pool.locations:
        raise EmptyLocations(f"clip {pool.clip_id!r}: empty positive pool")
    n_half = n_total // 2
    voxels = dedup_pool_voxels(pool, width, height)
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(voxels), size=n_half, replace=len(voxels) < n_half)
    positives = [voxels[i] for i in idx]
    negatives = draw_matched_negatives(voxels, width, height, frames, n_half, rng)
    return positives, negatives


def reflect_index(i: int, n: int) -> int:
    """Mirror an out-of-range index back into [0, n) without repeating edges.

    The reflection has period 2n - 2 (..., 2, 1, 0, 1, 2, ..., n-1, n-2, ...),
    matching numpy's ``pad(mode="reflect")``.
    """
    if n == 1:
        return 0
    period = 2 * n - 2
    j = i % period
    return j if j < n else period - j


def _reflect_range(start: int, count: int, n: int) -> np.ndarray:
    return np.array([reflect_index(i, n) for i in range(start, start + count)])


def extract_subvolume(frames_dir: str | Path, spec: SubvolumeSpec) -> np.ndarray:
    """Cut a (frames, height, width[, 3]) uint8 block around spec.centre.

    Frames are the numbered images in ``frames_dir`` (RGB kept as RGB,
    anything else converted to grayscale). Out-of-range coordinates mirror
    back into the clip on all three axes.
    """
    paths = list_frame_images(frames_dir)
    n_frames = len(paths)
    if n_frames < 1:
        raise EmptyClip(f"{frames_dir}: no frames")
    cx, cy, cf = spec.centre
    frame_idx = _reflect_range(cf - spec.frames // 2, spec.frames, n_frames)

    cache: dict[int, np.ndarray] = {}
    first_shape: tuple | None = None
    for fi in sorted(set(frame_idx.tolist())):
        img = Image.open(paths[fi])
        if img.mode not in ("L", "RGB"):
            img = img.convert("RGB" if "A" in img.mode or img.mode == "P" else "L")
        arr = np.asarray(img, dtype=np.uint8)
        if first_shape is None:
            first_shape = arr.shape
        elif arr.shape != first_shape:
            raise InconsistentFrameSize(
                f"{paths[fi]}: frame is {arr.shape}, previous frames were {first_shape}"
            )
        cache[fi] = arr

    height, width = first_shape[:2]
    ys = _reflect_range(cy - spec.height_px // 2, spec.height_px, height)
    xs = _reflect_range(cx - spec.width_px // 2, spec.width_px, width)
    out_shape = (spec.frames, spec.height_px, spec.width_px) + first_shape[2:]
    out = np.empty(out_shape, dtype=np.uint8)
    for k, fi in enumerate(frame_idx.tolist()):
        out[k] = cache[fi][np.ix_(ys, xs)]
    return out
