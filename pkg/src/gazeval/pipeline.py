"""Per-clip evaluation assembly shared by the CLI commands.

Builds everything a metric battery needs for one clip (locations in
evaluation coordinates, ground-truth volume, shuffled negatives, information
gain baseline), runs the battery, and aggregates per-clip scores to dataset
level. Randomness is derived per (clip, condition, purpose) from the master
seed, so negatives are identical across models being compared.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import metrics
from .aggregate import ClipScore, regular_mean, weighted_mean
from .config import EvalConfig
from .dataset import ClipInfo, load_recordings
from .errors import (
    EmptyConditionSetWarning,
    GazevalError,
    NoDonorClips,
)
from .gaze import (
    AttendedLocationSet,
    Condition,
    GazeRecording,
    condition_locations,
    scale_locations,
)
from .ground_truth import accumulate_gaussians, build_gt_volume
from .metrics import Metric, MetricScore
from .shuffling import derive_seed, temporal_rescale_locations
from .volume import SaliencyVolume


@dataclass
class ClipEvalInputs:
    """Everything needed to score one prediction volume for one clip."""

    info: ClipInfo
    condition: Condition
    eval_width: int
    eval_height: int
    locs: AttendedLocationSet
    gt_vol: SaliencyVolume
    sp_locs: AttendedLocationSet
    fix_locs: AttendedLocationSet
    shuffled_points: list[tuple[float, float, int]] = field(default_factory=list)
    ig_baseline: SaliencyVolume | None = None
    donor_note: str = ""


def load_all_recordings(
    dataset_dir, manifest: Mapping[str, ClipInfo]
) -> dict[str, list[GazeRecording]]:
    return {clip_id: load_recordings(dataset_dir, clip_id) for clip_id in manifest}


def condition_sets(
    recordings: Mapping[str, list[GazeRecording]],
    manifest: Mapping[str, ClipInfo],
    condition: Condition,
    config: EvalConfig,
) -> dict[str, AttendedLocationSet]:
    """Per-clip location sets in native coordinates (empty set, no warning,
    for clips without recordings)."""
    sets: dict[str, AttendedLocationSet] = {}
    for clip_id, info in manifest.items():
        recs = recordings.get(clip_id, [])
        if not recs:
            sets[clip_id] = AttendedLocationSet(clip_id, condition, [])
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", EmptyConditionSetWarning)
            sets[clip_id] = condition_locations(
                recs,
                condition,
                info.fps,
                info.frames,
                info.width,
                info.height,
                config.min_confidence,
            )
    return sets


def eval_dims(info: ClipInfo, config: EvalConfig) -> tuple[int, int]:
    if config.eval_width is not None and config.eval_height is not None:
        return config.eval_width, config.eval_height
    return info.width, info.height


def _scaled(
    locs: AttendedLocationSet, info: ClipInfo, width: int, height: int
) -> AttendedLocationSet:
    if (info.width, info.height) == (width, height):
        return locs
    return scale_locations(
        locs, width / info.width, height / info.height, width, height
    )


def donor_pool(
    target_clip: str,
    native_sets: Mapping[str, AttendedLocationSet],
    manifest: Mapping[str, ClipInfo],
    eval_width: int,
    eval_height: int,
    dst_frames: int,
) -> list[tuple[float, float, int]]:
    """Other clips' locations mapped into the target's evaluation grid.

    Donors are taken in sorted clip order; each donor's coordinates are
    scaled from its native frame into the target's evaluation frame and its
    frame indices rescaled to the target length.
    """
    pool: list[tuple[float, float, int]] = []
    for clip_id in sorted(native_sets):
        if clip_id == target_clip or not native_sets[clip_id].locations:
            continue
        info = manifest[clip_id]
        scaled = _scaled(native_sets[clip_id], info, eval_width, eval_height)
        rescaled = temporal_rescale_locations(scaled, info.frames, dst_frames)
        pool.extend((l.x, l.y, l.frame) for l in rescaled.locations)
    return pool


def build_clip_inputs(
    clip_id: str,
    condition: Condition,
    manifest: Mapping[str, ClipInfo],
    native_sets: Mapping[str, AttendedLocationSet],
    native_sp: Mapping[str, AttendedLocationSet],
    native_fix: Mapping[str, AttendedLocationSet],
    config: EvalConfig,
) -> ClipEvalInputs:
    """Assemble metric inputs for one clip (prediction-independent)."""
    info = manifest[clip_id]
    width, height = eval_dims(info, config)
    locs = _scaled(native_sets[clip_id], info, width, height)
    gt_vol = build_gt_volume(
        locs, config.gt_params(info.fps), width, height, info.frames
    )
    inputs = ClipEvalInputs(
        info=info,
        condition=condition,
        eval_width=width,
        eval_height=height,
        locs=locs,
        gt_vol=gt_vol,
        sp_locs=_scaled(native_sp[clip_id], info, width, height),
        fix_locs=_scaled(native_fix[clip_id], info, width, height),
    )
    pool = donor_pool(clip_id, native_sets, manifest, width, height, info.frames)
    if not pool:
        inputs.donor_note = "no other clip has locations to donate"
        return inputs
    n = len(locs.locations)
    rng = np.random.default_rng(derive_seed(config.seed, clip_id, condition.value, "sauc"))
    idx = rng.integers(0, len(pool), size=n)
    inputs.shuffled_points = [pool[i] for i in idx]
    rng = np.random.default_rng(derive_seed(config.seed, clip_id, condition.value, "ig"))
    idx = rng.integers(0, len(pool), size=n)
    inputs.ig_baseline = accumulate_gaussians(
        [pool[i] for i in idx],
        config.gt_params(info.fps),
        width,
        height,
        info.frames,
    )
    return inputs


def metric_battery(
    pred: SaliencyVolume,
    inputs: ClipEvalInputs,
    config: EvalConfig,
    locs: AttendedLocationSet | None = None,
    gt_vol: SaliencyVolume | None = None,
) -> tuple[dict[str, MetricScore], dict[str, str]]:
    """All ten metrics for one prediction; failures become skip reasons.

    ``locs``/``gt_vol`` default to the clip's pooled set; the human baselines
    pass observer-specific ones. Seeds derive from (master seed, clip,
    condition, metric), never from the model, so every model faces identical
    negative draws.
    """
    locs = inputs.locs if locs is None else locs
    gt_vol = inputs.gt_vol if gt_vol is None else gt_vol
    clip_id = inputs.info.clip_id
    cond = inputs.condition.value
    n_pos = len(locs)
    scores: dict[str, MetricScore] = {}
    skipped: dict[str, str] = {}

    def run(metric: Metric, fn, *args, **kwargs):
        try:
            scores[metric.value] = fn(*args, **kwargs)
        except GazevalError as e:
            skipped[metric.value] = str(e)

    borji_seed = derive_seed(config.seed, clip_id, cond, "borji")
    run(Metric.AUC_JUDD, metrics.auc_judd, pred, locs)
    run(Metric.AUC_BORJI, metrics.auc_borji, pred, locs, config.n_splits, borji_seed)
    run(
        Metric.BAL_ACC,
        metrics.balanced_accuracy,
        pred,
        locs,
        config.n_splits,
        borji_seed,
    )
    run(Metric.NSS, metrics.nss, pred, locs)
    run(Metric.SIM, metrics.sim, pred, gt_vol, n_pos)
    run(Metric.CC, metrics.cc, pred, gt_vol, n_pos)
    run(Metric.KLD, metrics.kld, pred, gt_vol, config.epsilon, n_pos)

    observers = ",".join(sorted({l.observer_id for l in locs.locations}))
    if inputs.shuffled_points:
        # sauc resamples internally when the negative count differs (it does
        # for the human baselines, whose positives are observer subsets)
        sauc_seed = derive_seed(config.seed, clip_id, cond, "sauc-resample", observers)
        run(Metric.SAUC, metrics.sauc, pred, locs, inputs.shuffled_points, sauc_seed)
    else:
        skipped[Metric.SAUC.value] = inputs.donor_note or "no shuffled negatives"
    if inputs.ig_baseline is not None:
        run(Metric.IG, metrics.info_gain, pred, locs, inputs.ig_baseline, config.epsilon)
    else:
        skipped[Metric.IG.value] = inputs.donor_note or "no donor baseline"

    if inputs.sp_locs.locations and inputs.fix_locs.locations:
        run(
            Metric.XAUC,
            metrics.xauc,
            pred,
            inputs.sp_locs,
            inputs.fix_locs,
            derive_seed(config.seed, clip_id, "xauc"),
        )
    else:
        skipped[Metric.XAUC.value] = "needs both sp and fix locations"
    return scores, skipped


def dump_negative_values(
    pred: SaliencyVolume,
    inputs: ClipEvalInputs,
    config: EvalConfig,
) -> dict[str, np.ndarray]:
    """Score arrays for the averaging experiment: positives, one uniform
    negative set, and the shuffled negative set (when donors exist).

    The uniform set draws |pos| flat voxel indices with
    ``default_rng(derive_seed(seed, clip, condition, "dump"))``.
    """
    locs = inputs.locs
    if not locs.locations:
        return {}
    fs, ys, xs = locs.voxel_arrays(pred.width, pred.height)
    pos = pred.data[fs, ys, xs].astype(np.float32)
    rng = np.random.default_rng(
        derive_seed(config.seed, inputs.info.clip_id, inputs.condition.value, "dump")
    )
    flat = rng.integers(0, pred.frames * pred.height * pred.width, size=pos.size)
    out = {"pos": pos, "neg_uniform": pred.data.reshape(-1)[flat].astype(np.float32)}
    if inputs.shuffled_points:
        sf, sy, sx = metrics._voxelize_points(
            inputs.shuffled_points, pred.width, pred.height
        )
        sf = np.minimum(sf, pred.frames - 1)
        out["neg_shuffled"] = pred.data[sf, sy, sx].astype(np.float32)
    return out


def summarize(
    clip_scores: Mapping[str, Mapping[str, MetricScore]],
) -> dict[str, dict[str, float | int]]:
    """Dataset-level aggregation of per-clip metric scores.

    For each metric: regular mean over clips plus the positive-count
    weighted mean, with the clip and weight totals used.
    """
    by_metric: dict[str, list[ClipScore]] = {}
    for clip_id in sorted(clip_scores):
        for name, score in clip_scores[clip_id].items():
            by_metric.setdefault(name, []).append(
                ClipScore(clip_id, score.metric, score.value, score.n_positives)
            )
    summary: dict[str, dict[str, float | int]] = {}
    for name in sorted(by_metric):
        scores = by_metric[name]
        entry: dict[str, float | int] = {
            "n_clips": len(scores),
            "total_weight": sum(s.weight for s in scores),
            "regular_mean": regular_mean(scores),
        }
        try:
            entry["weighted_mean"] = weighted_mean(scores)
        except GazevalError:
            entry["weighted_mean"] = entry["regular_mean"]
        summary[name] = entry
    return summary
