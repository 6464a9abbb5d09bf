import numpy as np
import pytest

from fakegraph.metrics import (
    EvalReport,
    UndefinedMetricError,
    acc,
    auc,
    eer,
    video_level_aggregate,
)
from oracles import eer_scan_reference, pairwise_auc_reference


class TestVideoLevelAggregate:
    def test_singleton(self):
        assert video_level_aggregate([0.2]) == 0.2

    def test_mean(self):
        assert video_level_aggregate([0.0, 1.0]) == 0.5

    def test_matches_naive_mean(self):
        rng = np.random.default_rng(0)
        scores = rng.random(32)
        assert video_level_aggregate(scores) == pytest.approx(
            sum(scores) / len(scores), abs=1e-15
        )

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            video_level_aggregate([])


class TestAuc:
    def test_perfect_separation(self):
        assert auc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0

    def test_all_ties(self):
        assert auc([0.5, 0.5, 0.5, 0.5], [0, 1, 0, 1]) == 0.5

    def test_matches_pairwise_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            n = int(rng.integers(2, 21))
            labels = rng.integers(0, 2, size=n)
            if labels.sum() in (0, n):
                continue
            scores = np.round(rng.random(n), 2)  # rounding forces ties
            assert auc(scores, labels) == pairwise_auc_reference(scores, labels)

    def test_invariant_under_monotone_transform(self):
        rng = np.random.default_rng(2)
        scores = rng.random(20)
        labels = rng.integers(0, 2, size=20)
        labels[0], labels[1] = 0, 1
        assert auc(scores, labels) == pytest.approx(
            auc(np.exp(3 * scores), labels), abs=1e-12
        )

    def test_complement_identity_without_ties(self):
        rng = np.random.default_rng(3)
        scores = rng.permutation(20) / 20.0
        labels = rng.integers(0, 2, size=20)
        labels[0], labels[1] = 0, 1
        assert auc(scores, labels) + auc(-scores, labels) == pytest.approx(1.0)

    def test_single_class_rejected(self):
        with pytest.raises(UndefinedMetricError):
            auc([0.1, 0.9], [1, 1])


class TestAcc:
    def test_perfect(self):
        assert acc([0, 1, 0, 1], [0, 1, 0, 1]) == 1.0

    def test_inverted(self):
        labels = [0, 1, 1, 0]
        scores = [1 - l for l in labels]
        assert acc(scores, labels) == 0.0

    def test_threshold_is_inclusive(self):
        assert acc([0.5], [1]) == 1.0
        assert acc([0.5], [0]) == 0.0


class TestEer:
    def test_perfect_classifier(self):
        value, _ = eer([0.0, 0.0, 1.0, 1.0], [0, 0, 1, 1])
        assert value == 0.0

    def test_matches_scan_oracle(self):
        rng = np.random.default_rng(4)
        for _ in range(60):
            n = int(rng.integers(2, 31))
            labels = rng.integers(0, 2, size=n)
            if labels.sum() in (0, n):
                continue
            scores = np.round(rng.random(n), 2)
            got, _ = eer(scores, labels)
            expected, _ = eer_scan_reference(scores, labels)
            assert abs(got - expected) < 1e-9

    def test_threshold_balances_rates(self):
        rng = np.random.default_rng(5)
        scores = rng.random(40)
        labels = (scores + rng.normal(0, 0.3, 40) > 0.5).astype(int)
        labels[:2] = [0, 1]
        value, threshold = eer(scores, labels)
        far = np.mean(scores[labels == 0] >= threshold)
        frr = np.mean(scores[labels == 1] < threshold)
        assert value == pytest.approx((far + frr) / 2, abs=1e-12)

    def test_single_class_rejected(self):
        with pytest.raises(UndefinedMetricError):
            eer([0.3, 0.4], [0, 0])


class TestEvalReport:
    def test_round_trip(self):
        report = EvalReport.from_scores(
            ["a", "b", "c", "d"], [0.1, 0.9, 0.4, 0.7], [0, 1, 0, 1]
        )
        clone = EvalReport.from_json(report.to_json())
        assert clone == report

    def test_metrics_in_range(self):
        rng = np.random.default_rng(6)
        scores = rng.random(30)
        labels = rng.integers(0, 2, size=30)
        labels[:2] = [0, 1]
        report = EvalReport.from_scores([str(i) for i in range(30)], scores, labels)
        for value in (report.acc, report.auc, report.eer):
            assert 0.0 <= value <= 1.0

    def test_deterministic_serialization(self):
        report = EvalReport.from_scores(["x", "y"], [0.2, 0.8], [0, 1])
        assert report.to_json() == report.to_json()
        assert report.to_json().index('"acc"') < report.to_json().index('"auc"')
