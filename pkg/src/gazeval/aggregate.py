"""Dataset-level score aggregation and the averaging-scheme experiment.

Clips contribute wildly different numbers of positives (a clip with heavy
pursuit may hold a hundred times the locations of a quiet one), so the
dataset mean comes in two flavours: the regular mean over clips and the mean
weighted by positive counts. The subset experiment quantifies which one
tracks the pooled all-positives score better.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from .errors import (
    EmptySample,
    EmptyScoreSet,
    InconsistentMetricSets,
    TooFewClips,
    ZeroTotalWeight,
)
from .metrics import LOWER_IS_BETTER, Metric, roc_auc_from_scores


@dataclass(frozen=True)
class ClipScore:
    clip_id: str
    metric: Metric
    value: float
    weight: int

    def __post_init__(self) -> None:
        if self.weight < 0:
            raise ValueError("weight must be >= 0")
        if not math.isfinite(self.value):
            raise ValueError("value must be finite")


def weighted_mean(scores: Sequence[ClipScore]) -> float:
    """Mean of clip values weighted by their positive counts."""
    if not scores:
        raise ZeroTotalWeight("no scores to average")
    total = sum(s.weight for s in scores)
    if total == 0:
        raise ZeroTotalWeight("all clip weights are zero")
    return float(sum(s.value * s.weight for s in scores) / total)


def regular_mean(scores: Sequence[ClipScore]) -> float:
    if not scores:
        raise ZeroTotalWeight("no scores to average")
    return float(sum(s.value for s in scores) / len(scores))


def pooled_perfect_auc(
    score_sets: Sequence[tuple[np.ndarray, np.ndarray]],
) -> float:
    """One AUC over all clips' positives and negatives merged.

    The reference an averaging scheme is judged against: with every pair
    visible at once there is nothing left to weight.
    """
    pos = [np.asarray(p).ravel() for p, _ in score_sets]
    neg = [np.asarray(n).ravel() for _, n in score_sets]
    pos = [p for p in pos if p.size]
    neg = [n for n in neg if n.size]
    if not pos or not neg:
        raise EmptyScoreSet("pooled AUC needs at least one positive and one negative")
    return roc_auc_from_scores(np.concatenate(pos), np.concatenate(neg))


@dataclass
class ExperimentResult:
    """Absolute errors of both averaging schemes against the pooled AUC."""

    regular_errors: np.ndarray
    weighted_errors: np.ndarray
    subset_sizes: np.ndarray

    @property
    def mean_regular(self) -> float:
        return float(self.regular_errors.mean())

    @property
    def mean_weighted(self) -> float:
        return float(self.weighted_errors.mean())

    @property
    def sd_regular(self) -> float:
        return float(self.regular_errors.std())

    @property
    def sd_weighted(self) -> float:
        return float(self.weighted_errors.std())


def subset_experiment(
    per_clip: Sequence[tuple[ClipScore, np.ndarray, np.ndarray]],
    n_repeats: int = 100,
    seed: int = 0,
) -> ExperimentResult:
    """Compare averaging schemes on random clip subsets.

    ``per_clip`` holds (clip score, positive scores, negative scores) per
    clip. For every subset size in [2, n_clips - 1], ``n_repeats`` subsets
    are drawn without replacement (one ``choice`` call each on a single
    ``default_rng(seed)``); each contributes |regular mean - pooled AUC| and
    |weighted mean - pooled AUC|.
    """
    n = len(per_clip)
    if n < 3:
        raise TooFewClips(
            f"subset experiment needs >= 3 clips for a non-trivial subset, got {n}"
        )
    if n_repeats < 1:
        raise ValueError("n_repeats must be >= 1")
    rng = np.random.default_rng(seed)
    regular_errors = []
    weighted_errors = []
    sizes = []
    for k in range(2, n):
        for _ in range(n_repeats):
            idx = rng.choice(n, size=k, replace=False)
            chosen = [per_clip[i] for i in idx]
            scores = [c[0] for c in chosen]
            perfect = pooled_perfect_auc([(p, ng) for _, p, ng in chosen])
            regular_errors.append(abs(regular_mean(scores) - perfect))
            weighted_errors.append(abs(weighted_mean(scores) - perfect))
            sizes.append(k)
    return ExperimentResult(
        np.array(regular_errors),
        np.array(weighted_errors),
        np.array(sizes, dtype=np.int64),
    )


def ks_test_one_sided(a, b) -> tuple[float, float]:
    """One-sided two-sample KS test of "distribution a sits above b".

    D+ = sup_x(F_a(x) - F_b(x)); p = exp(-2 D+^2 m n / (m + n)). A small p
    rejects the hypothesis that samples from ``a`` are stochastically >=
    samples from ``b`` (i.e. supports ``a`` being smaller).
    """
    a = np.sort(np.asarray(a, dtype=np.float64).ravel())
    b = np.sort(np.asarray(b, dtype=np.float64).ravel())
    if a.size == 0 or b.size == 0:
        raise EmptySample("both samples must be non-empty")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    d_plus = float(max(np.max(fa - fb), 0.0))
    m, n = a.size, b.size
    p = math.exp(-2.0 * d_plus * d_plus * m * n / (m + n))
    return d_plus, min(max(p, 0.0), 1.0)


def rank_table(
    model_scores: Mapping[str, Mapping[str, float]],
    metric_directions: Mapping[str, str] | None = None,
) -> dict[str, float]:
    """Mean rank per model across metrics (1 = best, ties share the average).

    Metric keys are the metric name strings; directions default to the
    package registry (only KLD ranks upward with smaller values). Cross-AUC
    is excluded: distance from 0.5 is diagnostic there, not a quality axis.
    """
    if not model_scores:
        raise InconsistentMetricSets("no models to rank")
    if metric_directions is None:
        metric_directions = {
            m.value: ("lower_better" if m in LOWER_IS_BETTER else "higher_better")
            for m in Metric
        }
    models = sorted(model_scores)
    metric_sets = {frozenset(model_scores[m]) for m in models}
    if len(metric_sets) != 1:
        raise InconsistentMetricSets(
            "models report different metric sets: "
            + ", ".join(sorted(str(sorted(s)) for s in metric_sets))
        )
    metrics = sorted(metric_sets.pop() - {Metric.XAUC.value})
    if not metrics:
        raise InconsistentMetricSets("no rankable metrics")
    ranks = np.zeros(len(models), dtype=np.float64)
    for name in metrics:
        direction = metric_directions.get(name, "higher_better")
        if direction not in ("higher_better", "lower_better"):
            raise ValueError(f"bad direction {direction!r} for metric {name!r}")
        values = np.array([model_scores[m][name] for m in models], dtype=np.float64)
        if direction == "higher_better":
            values = -values
        ranks += stats.rankdata(values, method="average")
    ranks /= len(metrics)
    return {m: float(r) for m, r in zip(models, ranks)}
