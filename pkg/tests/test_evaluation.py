import numpy as np
import pytest

from attentiv.errors import ParameterError, StratificationError
from attentiv.evaluation import (ConfusionMatrix, confusion,
                                 correlation_matrix, cross_validate, metrics,
                                 roc_curve, stratified_kfold)
from attentiv.features import FeatureMatrix
from tests.conftest import separable_blobs


def mann_whitney_auc(labels, scores):
    """Brute-force pairwise ranking probability, half credit for ties."""
    pos = [s for l, s in zip(labels, scores) if l == 1]
    neg = [s for l, s in zip(labels, scores) if l == 0]
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0
               for p in pos for n in neg)
    return wins / (len(pos) * len(neg))


class TestConfusion:
    def test_perfect_prediction(self):
        cm = confusion([1, 1, 0, 0], [1, 1, 0, 0])
        assert (cm.tp, cm.tn, cm.fp, cm.fn) == (2, 2, 0, 0)

    def test_total_inversion(self):
        cm = confusion([1, 0], [0, 1])
        assert (cm.fn, cm.fp) == (1, 1)

    def test_hand_tally(self):
        cm = confusion([1, 1, 1, 0], [1, 0, 1, 0])
        assert (cm.tp, cm.fn, cm.tn, cm.fp) == (2, 1, 1, 0)

    def test_length_mismatch(self):
        with pytest.raises(ParameterError):
            confusion([1, 0], [1])


class TestMetrics:
    def test_hand_arithmetic(self):
        report = metrics(ConfusionMatrix(tp=3, fp=1, tn=5, fn=1))
        m1 = report.per_class[1]
        assert m1.precision == pytest.approx(0.75)
        assert m1.recall == pytest.approx(0.75)
        assert m1.f1 == pytest.approx(0.75)
        assert report.accuracy == pytest.approx(0.8)

    def test_perfect_matrix(self):
        report = metrics(ConfusionMatrix(tp=4, fp=0, tn=6, fn=0))
        assert report.accuracy == 1.0
        for cls in (0, 1):
            m = report.per_class[cls]
            assert (m.precision, m.recall, m.f1) == (1.0, 1.0, 1.0)

    def test_zero_over_zero_flagged(self):
        report = metrics(ConfusionMatrix(tp=0, fp=0, tn=5, fn=2))
        assert report.per_class[1].precision == 0.0
        assert report.per_class[1].degenerate

    def test_empty_matrix_rejected(self):
        with pytest.raises(ParameterError):
            metrics(ConfusionMatrix(0, 0, 0, 0))

    def test_identities_on_random_matrices(self):
        rng = np.random.default_rng(29)
        for _ in range(1000):
            tp, fp, tn, fn = rng.integers(0, 40, size=4)
            if tp + fp + tn + fn == 0:
                continue
            cm = ConfusionMatrix(int(tp), int(fp), int(tn), int(fn))
            report = metrics(cm)
            # independent arithmetic straight from the definitions
            assert report.accuracy == (tp + tn) / cm.total
            assert report.accuracy == pytest.approx(
                1 - (fp + fn) / cm.total, abs=1e-14)
            expect_p1 = tp / (tp + fp) if tp + fp else 0.0
            expect_r1 = tp / (tp + fn) if tp + fn else 0.0
            assert report.per_class[1].precision == pytest.approx(expect_p1)
            assert report.per_class[1].recall == pytest.approx(expect_r1)
            # swapping the positive class transposes the matrix
            swapped = metrics(cm.swapped())
            assert swapped.per_class[1] == report.per_class[0]


class TestRocCurve:
    def test_perfect_ranking(self):
        roc = roc_curve([0, 0, 1, 1], [0.1, 0.2, 0.8, 0.9])
        assert roc.auc == 1.0
        assert roc.points[0] == (0.0, 0.0)
        assert roc.points[-1] == (1.0, 1.0)

    def test_constant_scores_are_uninformative(self):
        roc = roc_curve([0, 1, 0, 1], [0.5, 0.5, 0.5, 0.5])
        assert roc.auc == 0.5
        assert roc.points == [(0.0, 0.0), (1.0, 1.0)]

    def test_hand_enumerated_thresholds(self):
        roc = roc_curve([1, 0, 1, 0], [0.9, 0.8, 0.4, 0.1])
        assert (0.0, 0.5) in roc.points
        assert (0.5, 0.5) in roc.points
        assert roc.auc == pytest.approx(0.75)

    def test_single_class_rejected(self):
        with pytest.raises(ParameterError):
            roc_curve([1, 1], [0.2, 0.3])

    def test_matches_mann_whitney_brute_force(self):
        rng = np.random.default_rng(31)
        trials = 0
        while trials < 200:
            n = rng.integers(2, 13)
            labels = rng.integers(0, 2, size=n)
            if labels.min() == labels.max():
                continue
            # coarse score grid to provoke ties
            scores = rng.integers(0, 5, size=n) / 4
            roc = roc_curve(labels, scores)
            assert roc.auc == pytest.approx(
                mann_whitney_auc(labels, scores), abs=1e-12)
            trials += 1

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(37)
        labels = rng.integers(0, 2, size=30)
        labels[:2] = [0, 1]
        scores = rng.normal(size=30)
        base = roc_curve(labels, scores)
        for transform in (lambda s: 2 * s + 1, np.exp,
                          lambda s: s ** 3):
            other = roc_curve(labels, transform(scores))
            assert other.points == base.points
            assert other.auc == pytest.approx(base.auc, abs=1e-12)

    def test_sweep_is_monotone(self):
        rng = np.random.default_rng(41)
        labels = rng.integers(0, 2, size=50)
        labels[:2] = [0, 1]
        roc = roc_curve(labels, rng.normal(size=50))
        fprs = [p[0] for p in roc.points]
        tprs = [p[1] for p in roc.points]
        assert all(a <= b for a, b in zip(fprs, fprs[1:]))
        assert all(a <= b for a, b in zip(tprs, tprs[1:]))


class TestCorrelationMatrix:
    def test_self_correlation(self):
        x = np.arange(5, dtype=float)
        m = FeatureMatrix(np.column_stack([x, x]), ("a", "b"))
        corr, degenerate = correlation_matrix(m)
        assert corr[0, 1] == pytest.approx(1.0)
        assert not degenerate

    def test_perfect_anticorrelation(self):
        x = np.arange(5, dtype=float)
        m = FeatureMatrix(np.column_stack([x, -x]), ("a", "b"))
        corr, _ = correlation_matrix(m)
        assert corr[0, 1] == pytest.approx(-1.0)

    def test_hand_computed_pearson(self):
        m = FeatureMatrix(np.array([[1, 1], [2, 2], [3, 4]], dtype=float),
                          ("x", "y"))
        corr, _ = correlation_matrix(m)
        assert corr[0, 1] == pytest.approx(0.9820, abs=1e-4)

    def test_constant_column_flagged(self):
        m = FeatureMatrix(np.array([[1, 5], [2, 5], [3, 5]], dtype=float),
                          ("x", "y"))
        corr, degenerate = correlation_matrix(m)
        assert degenerate
        assert corr[0, 1] == 0.0
        assert corr[1, 0] == 0.0
        assert corr[0, 0] == 1.0

    def test_too_few_rows(self):
        m = FeatureMatrix(np.array([[1.0, 2.0]]), ("a", "b"))
        with pytest.raises(ParameterError):
            correlation_matrix(m)


class TestStratifiedKfold:
    def test_exact_divisibility(self):
        labels = [0, 1] * 5
        folds = stratified_kfold(labels, k=5, seed=0)
        for fold in folds:
            arr = np.array(labels)[fold]
            assert np.sum(arr == 0) == 1
            assert np.sum(arr == 1) == 1

    def test_proportional_allocation_eight_four(self):
        labels = [0] * 8 + [1] * 4
        folds = stratified_kfold(labels, k=4, seed=3)
        for fold in folds:
            arr = np.array(labels)[fold]
            assert np.sum(arr == 0) == 2
            assert np.sum(arr == 1) == 1

    def test_partition_property(self):
        rng = np.random.default_rng(43)
        for trial in range(10):
            n = int(rng.integers(20, 60))
            labels = rng.integers(0, 2, size=n)
            labels[:6] = [0, 0, 0, 1, 1, 1]
            k = int(rng.integers(2, 4))
            folds = stratified_kfold(labels, k=k, seed=trial)
            joined = np.concatenate(folds)
            assert sorted(joined.tolist()) == list(range(n))

    def test_class_smaller_than_k_rejected(self):
        with pytest.raises(StratificationError):
            stratified_kfold([0] * 10 + [1] * 2, k=3)

    def test_deterministic(self):
        labels = [0, 1] * 10
        a = stratified_kfold(labels, k=4, seed=9)
        b = stratified_kfold(labels, k=4, seed=9)
        for fa, fb in zip(a, b):
            np.testing.assert_array_equal(fa, fb)


class TestCrossValidate:
    def test_separable_fixture_is_perfect(self):
        m = separable_blobs(n_per_class=25, d=2, margin=1.0, seed=23)
        for algorithm in ("svm", "nb"):
            result = cross_validate(m, algorithm, k=5, seed=1)
            assert result.mean_accuracy == 1.0

    def test_random_labels_score_near_majority_rate(self):
        rng = np.random.default_rng(47)
        means = []
        for seed in range(10):
            x = rng.normal(size=(120, 3))
            labels = np.array([0, 1] * 60)
            m = FeatureMatrix(x, ("a", "b", "c"), labels)
            result = cross_validate(m, "nb", k=5, seed=seed)
            means.append(result.mean_accuracy)
        assert abs(np.mean(means) - 0.5) < 0.10

    def test_leave_one_out_error_contract(self):
        m = separable_blobs(n_per_class=10, d=2, seed=3)
        with pytest.raises(StratificationError):
            cross_validate(m, "nb", k=m.n, seed=0)
        # valid when k equals the smaller class size
        result = cross_validate(m, "nb", k=10, seed=0)
        assert len(result.fold_accuracies) == 10

    def test_fold_index_in_propagated_errors(self):
        m = separable_blobs(n_per_class=10, d=2, seed=3)
        with pytest.raises(ParameterError, match="fold 0"):
            cross_validate(m, "rf", k=5, seed=0, n_trees=0)
