"""Saliency evaluation metrics.

Conventions shared by every metric here:

* AUC-family metrics (AUC-Judd, AUC-Borji, shuffled AUC, balanced accuracy,
  cross-AUC) read the prediction at the voxel nearest to each location
  (round half up, clamped to the frame). NSS and information gain sample
  bilinearly instead, matching ``volume.sample_value``.
* AUC values are exact pair-counting probabilities,
  P(pos > neg) + 0.5 P(pos = neg), computed from integer win/tie counts.
  Swapping the positive and negative sets gives exact float complements:
  the two calls always sum to exactly 1.0.
* Distribution metrics (SIM, CC, KLD, IG) do their arithmetic in float64,
  normalizing per frame where a distribution is required.
* Randomized metrics document their draw contract so an independent
  implementation can replicate them from the seed alone.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import (
    AllZero,
    EmptyScoreSet,
    FrameOutOfRange,
    ShapeMismatch,
    ZeroVariance,
)
from .gaze import AttendedLocationSet
from .volume import SaliencyVolume, sample_values


class Metric(Enum):
    AUC_JUDD = "auc_judd"
    AUC_BORJI = "auc_borji"
    SAUC = "sauc"
    NSS = "nss"
    SIM = "sim"
    CC = "cc"
    KLD = "kld"
    IG = "ig"
    BAL_ACC = "bal_acc"
    XAUC = "xauc"


# every other metric improves upward
LOWER_IS_BETTER = frozenset({Metric.KLD})


@dataclass(frozen=True)
class MetricScore:
    metric: Metric
    value: float
    n_positives: int


# --- exact pair-counting AUC core ---


def _doubled_wins(pos: np.ndarray, neg: np.ndarray) -> int:
    """2 * #{pos > neg} + #{pos == neg} as an exact python int.

    Sorts the smaller side and streams the larger side through searchsorted
    in chunks, so a hundred-million-score side never needs sorting.
    """
    if pos.size <= neg.size:
        small, large, small_is_pos = np.sort(pos), neg, True
    else:
        small, large, small_is_pos = np.sort(neg), pos, False
    m = small.size
    u2 = 0
    chunk = 1 << 24
    for start in range(0, large.size, chunk):
        part = large[start : start + chunk]
        right = np.searchsorted(small, part, side="right")
        left = np.searchsorted(small, part, side="left")
        sum_right = int(right.sum(dtype=np.int64))
        sum_left = int(left.sum(dtype=np.int64))
        ties = sum_right - sum_left
        if small_is_pos:
            # for each negative v: #pos > v = m - right(v)
            u2 += 2 * (m * part.size - sum_right) + ties
        else:
            # for each positive p: #neg < p = left(p)
            u2 += 2 * sum_left + ties
    return u2


def _exact_auc(u2: int, n_pos: int, n_neg: int) -> float:
    """Rounded u2 / (2 n_pos n_neg), built so complements sum to exactly 1."""
    d2 = 2 * n_pos * n_neg
    if 2 * u2 <= d2:
        return u2 / d2
    return 1.0 - (d2 - u2) / d2


def roc_auc_from_scores(pos_scores, neg_scores) -> float:
    """Exact probability that a positive outranks a negative (ties half)."""
    pos = np.asarray(pos_scores).ravel()
    neg = np.asarray(neg_scores).ravel()
    if pos.size == 0 or neg.size == 0:
        raise EmptyScoreSet("need at least one positive and one negative score")
    common = np.result_type(pos.dtype, neg.dtype)
    pos = pos.astype(common, copy=False)
    neg = neg.astype(common, copy=False)
    return _exact_auc(_doubled_wins(pos, neg), pos.size, neg.size)


# --- location plumbing ---


def _positive_values(pred: SaliencyVolume, locs: AttendedLocationSet) -> tuple:
    if not locs.locations:
        raise EmptyScoreSet(f"clip {locs.clip_id!r}: no positive locations")
    fs, ys, xs = locs.voxel_arrays(pred.width, pred.height)
    if fs.min() < 0 or fs.max() >= pred.frames:
        raise FrameOutOfRange(
            f"clip {locs.clip_id!r}: location frame outside [0, {pred.frames - 1}]"
        )
    return pred.data[fs, ys, xs], fs, ys, xs


def _voxelize_points(
    points: Sequence[tuple[float, float, int]],
    width: int,
    height: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    xs = np.array([p[0] for p in points], dtype=np.float64)
    ys = np.array([p[1] for p in points], dtype=np.float64)
    fs = np.array([int(p[2]) for p in points], dtype=np.int64)
    xi = np.clip(np.floor(xs + 0.5).astype(np.int64), 0, width - 1)
    yi = np.clip(np.floor(ys + 0.5).astype(np.int64), 0, height - 1)
    return fs, yi, xi


def _frame_sums(data: np.ndarray) -> np.ndarray:
    return data.reshape(data.shape[0], -1).sum(axis=1, dtype=np.float64)


# --- AUC family ---


def auc_judd(pred: SaliencyVolume, locs: AttendedLocationSet) -> MetricScore:
    """AUC with negatives = every unattended voxel of frames holding a positive."""
    pos, fs, ys, xs = _positive_values(pred, locs)
    frames_used = np.unique(fs)
    sub = pred.data[frames_used]
    keep = np.ones(sub.shape, dtype=bool)
    keep[np.searchsorted(frames_used, fs), ys, xs] = False
    neg = sub[keep]
    if neg.size == 0:
        raise EmptyScoreSet(
            f"clip {locs.clip_id!r}: every voxel of the positive frames is attended"
        )
    value = _exact_auc(_doubled_wins(pos, neg), pos.size, neg.size)
    return MetricScore(Metric.AUC_JUDD, value, pos.size)


def _borji_negative_values(
    pred: SaliencyVolume, n_pos: int, n_splits: int, seed: int
) -> np.ndarray:
    """(n_splits, n_pos) prediction values at uniform random voxels.

    RNG contract: a single ``integers(0, frames*height*width,
    size=(n_splits, n_pos))`` call on ``numpy.random.default_rng(seed)``;
    flat indices address the volume in C order (frame, y, x).
    """
    rng = np.random.default_rng(seed)
    n_voxels = pred.frames * pred.height * pred.width
    draws = rng.integers(0, n_voxels, size=(n_splits, n_pos))
    return pred.data.reshape(-1)[draws]


def auc_borji(
    pred: SaliencyVolume,
    locs: AttendedLocationSet,
    n_splits: int = 100,
    seed: int = 0,
) -> MetricScore:
    """Mean AUC over splits against uniformly drawn voxel negatives."""
    if n_splits < 1:
        raise ValueError("n_splits must be >= 1")
    pos, _, _, _ = _positive_values(pred, locs)
    negs = _borji_negative_values(pred, pos.size, n_splits, seed)
    pos_sorted = np.sort(pos)
    n = pos.size
    right = np.searchsorted(pos_sorted, negs.ravel(), side="right").reshape(negs.shape)
    left = np.searchsorted(pos_sorted, negs.ravel(), side="left").reshape(negs.shape)
    sum_right = right.sum(axis=1, dtype=np.int64)
    ties = sum_right - left.sum(axis=1, dtype=np.int64)
    aucs = [
        _exact_auc(int(2 * (n * n - sr) + t), n, n)
        for sr, t in zip(sum_right, ties)
    ]
    return MetricScore(Metric.AUC_BORJI, float(np.mean(aucs)), n)


def balanced_accuracy(
    pred: SaliencyVolume,
    locs: AttendedLocationSet,
    n_splits: int = 100,
    seed: int = 0,
) -> MetricScore:
    """Mean balanced accuracy at the equal-error threshold, over Borji splits.

    Shares the AUC-Borji draw contract, so the same seed scores the same
    negative sets. Predicted-positive means score >= threshold; candidates
    are the distinct observed scores; the threshold minimizes |TPR - TNR|,
    ties resolved toward the lower threshold. The gap is compared as an
    integer count difference, so ties are exact rather than at the mercy
    of float rounding.
    """
    if n_splits < 1:
        raise ValueError("n_splits must be >= 1")
    pos, _, _, _ = _positive_values(pred, locs)
    negs = _borji_negative_values(pred, pos.size, n_splits, seed)
    pos_sorted = np.sort(pos)
    n = pos.size
    accs = np.empty(n_splits, dtype=np.float64)
    for s in range(n_splits):
        neg_sorted = np.sort(negs[s])
        cand = np.unique(np.concatenate([pos_sorted, neg_sorted]))
        true_pos = n - np.searchsorted(pos_sorted, cand, side="left")
        true_neg = np.searchsorted(neg_sorted, cand, side="left")
        i = int(np.argmin(np.abs(true_pos - true_neg)))
        accs[s] = 0.5 * (int(true_pos[i]) + int(true_neg[i])) / n
    return MetricScore(Metric.BAL_ACC, float(accs.mean()), n)


def sauc(
    pred: SaliencyVolume,
    locs: AttendedLocationSet,
    shuffled_points: Sequence[tuple[float, float, int]],
    seed: int = 0,
) -> MetricScore:
    """AUC against negatives attended in other clips (centre-bias resistant).

    ``shuffled_points`` normally holds exactly one negative per positive; a
    surplus is subsampled without replacement, a deficit resampled with
    replacement (one ``default_rng(seed).choice`` call either way).
    """
    pos, _, _, _ = _positive_values(pred, locs)
    if not shuffled_points:
        raise EmptyScoreSet(f"clip {locs.clip_id!r}: no shuffled negatives")
    fs, ys, xs = _voxelize_points(shuffled_points, pred.width, pred.height)
    fs = np.minimum(fs, pred.frames - 1)
    neg = pred.data[fs, ys, xs]
    if neg.size != pos.size:
        rng = np.random.default_rng(seed)
        idx = rng.choice(neg.size, size=pos.size, replace=neg.size < pos.size)
        neg = neg[idx]
    value = _exact_auc(_doubled_wins(pos, neg), pos.size, neg.size)
    return MetricScore(Metric.SAUC, value, pos.size)


def xauc(
    pred: SaliencyVolume,
    sp_locs: AttendedLocationSet,
    fix_locs: AttendedLocationSet,
    seed: int = 0,
) -> MetricScore:
    """AUC of pursuit locations against same-clip fixation negatives.

    Negatives are |SP| fixation locations, drawn without replacement when
    enough exist (one ``default_rng(seed).choice`` call). 0.5 means the
    prediction cannot tell pursuit from fixation; values v and 1 - v describe
    the same separability from opposite sides, and swapping the arguments
    returns the exact complement when the sets are equally large.
    """
    if sp_locs.clip_id != fix_locs.clip_id:
        raise ValueError(
            f"cross-AUC needs one clip, got {sp_locs.clip_id!r} and {fix_locs.clip_id!r}"
        )
    pos, _, _, _ = _positive_values(pred, sp_locs)
    fix_vals, _, _, _ = _positive_values(pred, fix_locs)
    if fix_vals.size != pos.size:
        rng = np.random.default_rng(seed)
        idx = rng.choice(fix_vals.size, size=pos.size, replace=fix_vals.size < pos.size)
        neg = fix_vals[idx]
    else:
        neg = np.sort(fix_vals)  # equal sizes: use the full set, order-free
    value = _exact_auc(_doubled_wins(pos, neg), pos.size, neg.size)
    return MetricScore(Metric.XAUC, value, pos.size)


# --- value metrics at locations ---


def nss(pred: SaliencyVolume, locs: AttendedLocationSet) -> MetricScore:
    """Mean per-frame z-score of the prediction at the attended locations.

    Frames are z-scored with their own population statistics; constant
    frames (zero std) contribute 0. Values are read bilinearly.
    """
    if not locs.locations:
        raise EmptyScoreSet(f"clip {locs.clip_id!r}: no positive locations")
    xs, ys, fs = locs.point_arrays()
    vals = sample_values(pred, xs, ys, fs)
    n_frames = pred.frames
    means = np.empty(n_frames, dtype=np.float64)
    stds = np.empty(n_frames, dtype=np.float64)
    flat = pred.data.reshape(n_frames, -1)
    for f in range(n_frames):
        row = flat[f]
        m = row.mean(dtype=np.float64)
        means[f] = m
        stds[f] = np.sqrt(np.mean(np.square(row - m, dtype=np.float64), dtype=np.float64))
    frame_std = stds[fs]
    z = np.zeros(vals.shape, dtype=np.float64)
    nz = frame_std > 0.0
    z[nz] = (vals[nz] - means[fs][nz]) / frame_std[nz]
    return MetricScore(Metric.NSS, float(z.mean()), len(locs))


def info_gain(
    pred: SaliencyVolume,
    locs: AttendedLocationSet,
    baseline: SaliencyVolume,
    eps: float = 1e-12,
) -> MetricScore:
    """Mean log2 probability gain of the prediction over a baseline.

    Both volumes are normalized per frame to probability distributions;
    values at locations are read bilinearly (a bilinear sample divided by
    the frame sum equals the sample of the normalized frame). Frames with
    zero mass yield probability 0 and are caught by ``eps``.
    """
    if pred.data.shape != baseline.data.shape:
        raise ShapeMismatch(
            f"prediction {pred.data.shape} vs baseline {baseline.data.shape}"
        )
    if not locs.locations:
        raise EmptyScoreSet(f"clip {locs.clip_id!r}: no positive locations")
    xs, ys, fs = locs.point_arrays()
    p_sums = _frame_sums(pred.data)[fs]
    b_sums = _frame_sums(baseline.data)[fs]
    p = sample_values(pred, xs, ys, fs) / np.where(p_sums > 0.0, p_sums, 1.0)
    p[p_sums == 0.0] = 0.0
    b = sample_values(baseline, xs, ys, fs) / np.where(b_sums > 0.0, b_sums, 1.0)
    b[b_sums == 0.0] = 0.0
    gain = np.log2(p + eps) - np.log2(b + eps)
    return MetricScore(Metric.IG, float(gain.mean()), len(locs))


# --- distribution metrics against a ground-truth volume ---


def _check_same_shape(pred: SaliencyVolume, gt: SaliencyVolume) -> None:
    if pred.data.shape != gt.data.shape:
        raise ShapeMismatch(f"prediction {pred.data.shape} vs gt {gt.data.shape}")


def sim(pred: SaliencyVolume, gt: SaliencyVolume, n_positives: int = 0) -> MetricScore:
    """Histogram intersection of per-frame distributions, averaged.

    Frames without ground-truth mass are skipped; a zero prediction frame
    against a ground-truth frame with mass contributes 0.
    """
    _check_same_shape(pred, gt)
    p_sums = _frame_sums(pred.data)
    g_sums = _frame_sums(gt.data)
    total = 0.0
    counted = 0
    for f in range(gt.frames):
        if g_sums[f] == 0.0:
            continue
        counted += 1
        if p_sums[f] == 0.0:
            continue
        pf = pred.data[f].astype(np.float64) / p_sums[f]
        gf = gt.data[f].astype(np.float64) / g_sums[f]
        total += float(np.minimum(pf, gf).sum())
    if counted == 0:
        raise AllZero(f"clip {gt.clip_id!r}: ground truth has no mass in any frame")
    return MetricScore(Metric.SIM, total / counted, n_positives)


def cc(pred: SaliencyVolume, gt: SaliencyVolume, n_positives: int = 0) -> MetricScore:
    """Pearson correlation over all voxels of the two volumes."""
    _check_same_shape(pred, gt)
    p = pred.data
    g = gt.data
    if float(p.min()) == float(p.max()) or float(g.min()) == float(g.max()):
        raise ZeroVariance("correlation needs non-constant volumes")
    mp = float(p.mean(dtype=np.float64))
    mg = float(g.mean(dtype=np.float64))
    spp = sgg = spg = 0.0
    for f in range(p.shape[0]):
        dp = p[f].astype(np.float64) - mp
        dg = g[f].astype(np.float64) - mg
        spp += float((dp * dp).sum())
        sgg += float((dg * dg).sum())
        spg += float((dp * dg).sum())
    value = spg / np.sqrt(spp * sgg)
    return MetricScore(Metric.CC, float(np.clip(value, -1.0, 1.0)), n_positives)


def kld(
    pred: SaliencyVolume,
    gt: SaliencyVolume,
    eps: float = 1e-12,
    n_positives: int = 0,
) -> MetricScore:
    """Per-frame KL divergence of ground truth from prediction, averaged.

    Natural log; per frame sum(gt * log(gt / (pred + eps) + eps)) on the
    frame-normalized distributions. Frames without ground-truth mass are
    skipped; a zero prediction frame is treated as all-eps (large but finite
    divergence). Lower is better.
    """
    _check_same_shape(pred, gt)
    p_sums = _frame_sums(pred.data)
    g_sums = _frame_sums(gt.data)
    total = 0.0
    counted = 0
    for f in range(gt.frames):
        if g_sums[f] == 0.0:
            continue
        counted += 1
        gf = gt.data[f].astype(np.float64) / g_sums[f]
        if p_sums[f] > 0.0:
            pf = pred.data[f].astype(np.float64) / p_sums[f]
        else:
            pf = np.zeros_like(gf)
        total += float(np.sum(gf * np.log(gf / (pf + eps) + eps)))
    if counted == 0:
        raise AllZero(f"clip {gt.clip_id!r}: ground truth has no mass in any frame")
    return MetricScore(Metric.KLD, total / counted, n_positives)
