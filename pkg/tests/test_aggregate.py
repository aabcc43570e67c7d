import math

import numpy as np
import pytest

from gazeval.aggregate import (
    ClipScore,
    ExperimentResult,
    ks_test_one_sided,
    pooled_perfect_auc,
    rank_table,
    regular_mean,
    subset_experiment,
    weighted_mean,
)
from gazeval.errors import (
    EmptySample,
    EmptyScoreSet,
    InconsistentMetricSets,
    TooFewClips,
    ZeroTotalWeight,
)
from gazeval.metrics import Metric

import oracles


def cs(clip_id, value, weight, metric=Metric.AUC_JUDD):
    return ClipScore(clip_id, metric, value, weight)


class TestMeans:
    def test_weighted(self):
        scores = [cs("a", 0.8, 3), cs("b", 0.4, 1)]
        assert weighted_mean(scores) == pytest.approx(0.7, abs=1e-12)

    def test_regular(self):
        scores = [cs("a", 0.8, 3), cs("b", 0.4, 1)]
        assert regular_mean(scores) == pytest.approx(0.6, abs=1e-12)

    def test_zero_weights(self):
        with pytest.raises(ZeroTotalWeight):
            weighted_mean([cs("a", 0.8, 0)])

    def test_empty(self):
        with pytest.raises(ZeroTotalWeight):
            weighted_mean([])
        with pytest.raises(ZeroTotalWeight):
            regular_mean([])

    def test_clip_score_validation(self):
        with pytest.raises(ValueError):
            ClipScore("a", Metric.NSS, 1.0, -1)
        with pytest.raises(ValueError):
            ClipScore("a", Metric.NSS, float("nan"), 1)


class TestPooledAuc:
    def test_matches_oracle(self):
        rng = np.random.default_rng(70)
        sets = [
            (rng.normal(1, 1, size=rng.integers(1, 20)), rng.normal(0, 1, size=rng.integers(1, 20)))
            for _ in range(5)
        ]
        got = pooled_perfect_auc(sets)
        want = oracles.pair_auc(
            np.concatenate([p for p, _ in sets]), np.concatenate([n for _, n in sets])
        )
        assert got == pytest.approx(want, abs=1e-12)

    def test_empty_arrays_filtered(self):
        sets = [(np.array([2.0]), np.array([])), (np.array([]), np.array([1.0]))]
        assert pooled_perfect_auc(sets) == 1.0

    def test_all_empty(self):
        with pytest.raises(EmptyScoreSet):
            pooled_perfect_auc([(np.array([]), np.array([]))])


class TestSubsetExperiment:
    def per_clip(self, n, seed=0):
        rng = np.random.default_rng(seed)
        out = []
        for i in range(n):
            n_pos = int(rng.integers(3, 30))
            pos = rng.normal(1.0, 1.0, size=n_pos)
            neg = rng.normal(0.0, 1.0, size=n_pos)
            from gazeval.metrics import roc_auc_from_scores

            value = roc_auc_from_scores(pos, neg)
            out.append((cs(f"c{i}", value, n_pos), pos, neg))
        return out

    def test_shapes_and_sizes(self):
        res = subset_experiment(self.per_clip(6), n_repeats=7, seed=1)
        assert res.regular_errors.shape == (4 * 7,)
        assert res.weighted_errors.shape == (4 * 7,)
        assert sorted(set(res.subset_sizes.tolist())) == [2, 3, 4, 5]
        assert np.all(res.regular_errors >= 0)

    def test_deterministic(self):
        a = subset_experiment(self.per_clip(5), n_repeats=4, seed=9)
        b = subset_experiment(self.per_clip(5), n_repeats=4, seed=9)
        assert np.array_equal(a.regular_errors, b.regular_errors)
        assert np.array_equal(a.weighted_errors, b.weighted_errors)

    def test_identical_clips_have_zero_error(self):
        pos = np.array([1.0, 2.0])
        neg = np.array([0.0, 0.5])
        clips = [(cs(f"c{i}", 1.0, 2), pos, neg) for i in range(4)]
        res = subset_experiment(clips, n_repeats=3, seed=0)
        assert np.all(res.regular_errors == 0.0)
        assert np.all(res.weighted_errors == 0.0)

    def test_too_few_clips(self):
        with pytest.raises(TooFewClips):
            subset_experiment(self.per_clip(2), n_repeats=3)

    def test_result_summaries(self):
        res = ExperimentResult(
            np.array([0.1, 0.3]), np.array([0.2, 0.2]), np.array([2, 2])
        )
        assert res.mean_regular == pytest.approx(0.2)
        assert res.mean_weighted == pytest.approx(0.2)
        assert res.sd_regular == pytest.approx(0.1)
        assert res.sd_weighted == 0.0


class TestKsTest:
    def test_fully_separated(self):
        d, p = ks_test_one_sided([1.0, 2.0, 3.0], [4.0, 5.0, 6.0])
        assert d == 1.0
        assert p == pytest.approx(math.exp(-3.0), rel=1e-12)

    def test_other_direction_is_null(self):
        d, p = ks_test_one_sided([4.0, 5.0, 6.0], [1.0, 2.0, 3.0])
        assert d == 0.0
        assert p == 1.0

    def test_matches_oracle(self):
        rng = np.random.default_rng(71)
        for _ in range(20):
            a = rng.integers(0, 8, size=rng.integers(1, 25)) / 4.0
            b = rng.integers(0, 8, size=rng.integers(1, 25)) / 4.0
            got_d, got_p = ks_test_one_sided(a, b)
            want_d, want_p = oracles.ks_one_sided(a, b)
            assert got_d == pytest.approx(want_d, abs=1e-12)
            assert got_p == pytest.approx(want_p, rel=1e-12)

    def test_empty(self):
        with pytest.raises(EmptySample):
            ks_test_one_sided([], [1.0])


class TestRankTable:
    def test_basic_ordering(self):
        scores = {
            "good": {"auc_judd": 0.9, "nss": 2.0},
            "bad": {"auc_judd": 0.6, "nss": 0.5},
        }
        ranks = rank_table(scores)
        assert ranks == {"good": 1.0, "bad": 2.0}

    def test_ties_share_average(self):
        scores = {
            "a": {"auc_judd": 0.9},
            "b": {"auc_judd": 0.9},
            "c": {"auc_judd": 0.1},
        }
        ranks = rank_table(scores)
        assert ranks["a"] == 1.5 and ranks["b"] == 1.5 and ranks["c"] == 3.0

    def test_kld_ranks_lower_better(self):
        scores = {
            "a": {"kld": 0.5},
            "b": {"kld": 2.0},
        }
        ranks = rank_table(scores)
        assert ranks == {"a": 1.0, "b": 2.0}

    def test_xauc_ignored(self):
        scores = {
            "a": {"auc_judd": 0.9, "xauc": 0.1},
            "b": {"auc_judd": 0.6, "xauc": 0.99},
        }
        ranks = rank_table(scores)
        assert ranks == {"a": 1.0, "b": 2.0}

    def test_only_xauc_is_unrankable(self):
        with pytest.raises(InconsistentMetricSets):
            rank_table({"a": {"xauc": 0.5}, "b": {"xauc": 0.6}})

    def test_inconsistent_sets(self):
        with pytest.raises(InconsistentMetricSets):
            rank_table({"a": {"nss": 1.0}, "b": {"cc": 0.5}})

    def test_custom_direction(self):
        scores = {"a": {"time_s": 1.0}, "b": {"time_s": 5.0}}
        ranks = rank_table(scores, metric_directions={"time_s": "lower_better"})
        assert ranks == {"a": 1.0, "b": 2.0}

    def test_bad_direction(self):
        with pytest.raises(ValueError):
            rank_table({"a": {"m": 1.0}}, metric_directions={"m": "sideways"})

    def test_matches_oracle(self):
        rng = np.random.default_rng(72)
        for _ in range(10):
            models = [f"m{i}" for i in range(int(rng.integers(2, 6)))]
            per_metric = {}
            scores = {m: {} for m in models}
            for name in ("auc_judd", "nss", "kld"):
                vals = rng.integers(0, 4, size=len(models)) / 4.0
                for m, v in zip(models, vals):
                    scores[m][name] = float(v)
                per_metric[name] = {m: float(v) for m, v in zip(models, vals)}
            got = rank_table(scores)
            want_total = {m: 0.0 for m in models}
            for name, vals in per_metric.items():
                o = oracles.average_ranks(vals, lower_better=(name == "kld"))
                for m in models:
                    want_total[m] += o[m]
            for m in models:
                assert got[m] == pytest.approx(want_total[m] / 3.0, abs=1e-12)

    def test_empty(self):
        with pytest.raises(InconsistentMetricSets):
            rank_table({})
