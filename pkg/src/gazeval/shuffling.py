"""Shuffled negatives: other clips' attended locations, temporally rescaled.

Shuffled AUC penalizes dataset-wide biases (centre bias above all) by scoring
the prediction against locations people attended in *other* clips. Donor
frame indices are rescaled to the target clip's length; spatial coordinates
transfer as-is (clips share the evaluation frame size).
"""
from __future__ import annotations

import hashlib
from typing import Mapping, Sequence

import numpy as np

from .errors import NoDonorClips
from .gaze import AttendedLocation, AttendedLocationSet


def derive_seed(master_seed: int, *parts: object) -> int:
    """Stable 64-bit child seed from a master seed and context parts.

    sha256 over the decimal master seed and the stringified parts;
    reproducible across processes and platforms (unlike ``hash()``).
    """
    h = hashlib.sha256()
    h.update(str(int(master_seed)).encode("utf-8"))
    for part in parts:
        h.update(b"\x1f")
        h.update(str(part).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "little")


def temporal_rescale_locations(
    locs: AttendedLocationSet,
    src_frames: int,
    dst_frames: int,
) -> AttendedLocationSet:
    """Map frame indices onto a clip of different length.

    frame -> floor(frame * dst_frames / src_frames), clamped. Integer
    arithmetic, so the floor is exact. Coordinates are untouched.
    """
    if src_frames < 1 or dst_frames < 1:
        raise ValueError("frame counts must be >= 1")
    rescaled = [
        AttendedLocation(
            l.observer_id,
            l.x,
            l.y,
            min(l.frame * dst_frames // src_frames, dst_frames - 1),
        )
        for l in locs.locations
    ]
    return AttendedLocationSet(locs.clip_id, locs.condition, rescaled)


def shuffled_location_pool(
    target_clip: str,
    all_sets: Sequence[AttendedLocationSet],
    frames_by_clip: Mapping[str, int],
    dst_frames: int,
) -> list[tuple[float, float, int]]:
    """Donor locations from every other clip, rescaled to the target length."""
    pool: list[tuple[float, float, int]] = []
    for locs in all_sets:
        if locs.clip_id == target_clip or not locs.locations:
            continue
        if locs.clip_id not in frames_by_clip:
            raise ValueError(f"no frame count for donor clip {locs.clip_id!r}")
        rescaled = temporal_rescale_locations(
            locs, frames_by_clip[locs.clip_id], dst_frames
        )
        pool.extend((l.x, l.y, l.frame) for l in rescaled.locations)
    if not pool:
        raise NoDonorClips(
            f"clip {target_clip!r}: no other clip has locations to donate"
        )
    return pool


def sample_shuffled_negatives(
    target_clip: str,
    all_sets: Sequence[AttendedLocationSet],
    frames_by_clip: Mapping[str, int],
    dst_frames: int,
    n: int,
    seed: int,
    per_clip_uniform: bool = False,
) -> list[tuple[float, float, int]]:
    """Draw ``n`` negatives (with replacement) from the donor pool.

    Default weighting is per-location (clips donate in proportion to how many
    locations they have); ``per_clip_uniform`` first picks a donor clip
    uniformly, then a location within it. RNG contract: one
    ``numpy.random.default_rng(seed)``; the pooled variant makes a single
    ``integers(0, len(pool), size=n)`` call, the per-clip variant one
    ``integers(0, n_clips, size=n)`` call followed by one
    ``integers(0, len(clip_pool))`` call per draw.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if not per_clip_uniform:
        pool = shuffled_location_pool(target_clip, all_sets, frames_by_clip, dst_frames)
        idx = rng.integers(0, len(pool), size=n)
        return [pool[i] for i in idx]

    donors = [s for s in all_sets if s.clip_id != target_clip and s.locations]
    if not donors:
        raise NoDonorClips(
            f"clip {target_clip!r}: no other clip has locations to donate"
        )
    pools = [
        [
            (l.x, l.y, l.frame)
            for l in temporal_rescale_locations(
                s, frames_by_clip[s.clip_id], dst_frames
            ).locations
        ]
        for s in donors
    ]
    clip_idx = rng.integers(0, len(pools), size=n)
    out = []
    for ci in clip_idx:
        pool = pools[ci]
        out.append(pool[int(rng.integers(0, len(pool)))])
    return out
