"""Reference predictors that anchor the metric scale.

Chance and Centre know nothing about the data; Permutation knows the dataset
but not the clip; One Human and Infinite Humans bound what a model of the
average observer can reach from below and above.
"""
from __future__ import annotations

import warnings
from typing import Callable, Mapping, Sequence, TypeVar

import numpy as np

from .errors import EmptyConditionSetWarning, NoDonorClips, TooFewObservers
from .gaze import (
    AttendedLocationSet,
    Condition,
    GazeRecording,
    condition_locations,
)
from .ground_truth import GtParams, build_gt_volume
from .shuffling import temporal_rescale_locations
from .volume import SaliencyVolume

T = TypeVar("T")


def chance_map(width: int, height: int, frames: int, seed: int = 0) -> SaliencyVolume:
    """Uniform random noise: one ``random((frames, height, width), dtype=float32)``
    call on ``numpy.random.default_rng(seed)``."""
    rng = np.random.default_rng(seed)
    return SaliencyVolume(rng.random((frames, height, width), dtype=np.float32))


def centre_map(width: int, height: int, frames: int) -> SaliencyVolume:
    """Static anisotropic centre Gaussian, sigma = (width/4, height/4).

    Peak 1 at the frame centre ((width-1)/2, (height-1)/2); no truncation.
    """
    gx = np.exp(-0.5 * ((np.arange(width) - (width - 1) / 2.0) / (width / 4.0)) ** 2)
    gy = np.exp(-0.5 * ((np.arange(height) - (height - 1) / 2.0) / (height / 4.0)) ** 2)
    frame = np.multiply.outer(gy, gx).astype(np.float32)
    return SaliencyVolume(np.broadcast_to(frame, (frames, height, width)).copy())


def permutation_map(
    target_clip: str,
    all_sets: Sequence[AttendedLocationSet],
    frames_by_clip: Mapping[str, int],
    params: GtParams,
    width: int,
    height: int,
    frames: int,
    seed: int = 0,
) -> SaliencyVolume:
    """Ground-truth volume of a random *other* clip, temporally rescaled.

    Donors are the non-empty location sets of other clips, sorted by clip id;
    one ``integers(0, n_donors)`` call on ``default_rng(seed)`` picks one.
    """
    donors = sorted(
        (s for s in all_sets if s.clip_id != target_clip and s.locations),
        key=lambda s: s.clip_id,
    )
    if not donors:
        raise NoDonorClips(
            f"clip {target_clip!r}: no other clip has locations to donate"
        )
    rng = np.random.default_rng(seed)
    pick = donors[int(rng.integers(0, len(donors)))]
    rescaled = temporal_rescale_locations(pick, frames_by_clip[pick.clip_id], frames)
    vol = build_gt_volume(rescaled, params, width, height, frames)
    vol.clip_id = target_clip
    return vol


def _usable_observer_sets(
    recordings: Sequence[GazeRecording],
    condition: Condition,
    fps: float,
    frames: int,
    width: int,
    height: int,
    min_confidence: float,
) -> dict[str, AttendedLocationSet]:
    by_observer: dict[str, list[GazeRecording]] = {}
    for rec in recordings:
        by_observer.setdefault(rec.observer_id, []).append(rec)
    if len(by_observer) < 2:
        raise TooFewObservers(
            f"human baselines need >= 2 observers, got {len(by_observer)}"
        )
    usable: dict[str, AttendedLocationSet] = {}
    for obs in sorted(by_observer):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", EmptyConditionSetWarning)
            locs = condition_locations(
                by_observer[obs], condition, fps, frames, width, height, min_confidence
            )
        if locs.locations:
            usable[obs] = locs
        else:
            warnings.warn(
                f"observer {obs!r}: no {condition.value} locations, skipped",
                EmptyConditionSetWarning,
                stacklevel=3,
            )
    if len(usable) < 2:
        raise TooFewObservers(
            f"human baselines need >= 2 observers with {condition.value} locations,"
            f" got {len(usable)}"
        )
    return usable


def _pooled(sets: Sequence[AttendedLocationSet]) -> AttendedLocationSet:
    first = sets[0]
    pooled: list = []
    for s in sets:
        pooled.extend(s.locations)
    return AttendedLocationSet(first.clip_id, first.condition, pooled)


def one_human_scores(
    recordings: Sequence[GazeRecording],
    condition: Condition,
    params: GtParams,
    width: int,
    height: int,
    frames: int,
    fps: float,
    evaluate: Callable[[SaliencyVolume, AttendedLocationSet], T],
    min_confidence: float = 0.0,
) -> list[tuple[str, T]]:
    """Each observer's own map, scored against everyone else pooled.

    Returns (observer_id, evaluate result) pairs in sorted observer order;
    the mean over observers is the reported baseline. Observers without
    locations are skipped with a warning.
    """
    usable = _usable_observer_sets(
        recordings, condition, fps, frames, width, height, min_confidence
    )
    out: list[tuple[str, T]] = []
    for obs, own in usable.items():
        pred = build_gt_volume(own, params, width, height, frames)
        others = _pooled([s for o, s in usable.items() if o != obs])
        out.append((obs, evaluate(pred, others)))
    return out


def infinite_humans_scores(
    recordings: Sequence[GazeRecording],
    condition: Condition,
    params: GtParams,
    width: int,
    height: int,
    frames: int,
    fps: float,
    evaluate: Callable[[SaliencyVolume, AttendedLocationSet], T],
    min_confidence: float = 0.0,
) -> list[tuple[str, T]]:
    """Leave-one-out pooled map, scored against the held-out observer.

    Upper-bounds what predicting the average observer can achieve.
    """
    usable = _usable_observer_sets(
        recordings, condition, fps, frames, width, height, min_confidence
    )
    out: list[tuple[str, T]] = []
    for obs, own in usable.items():
        others = _pooled([s for o, s in usable.items() if o != obs])
        pred = build_gt_volume(others, params, width, height, frames)
        out.append((obs, evaluate(pred, own)))
    return out
