import numpy as np
import pytest

from attentiv.classifiers import predict, train_nb
from attentiv.errors import TrainingError
from attentiv.features import FeatureMatrix


def one_d(values, labels):
    return FeatureMatrix(np.array(values, dtype=float).reshape(-1, 1),
                         ("x",), np.array(labels))


SYMMETRIC = one_d([-1, -3, 1, 3], [0, 0, 1, 1])


def hand_score(x, mu0, var0, mu1, var1, prior0=0.5, prior1=0.5):
    """Independent log-posterior difference for a single 1-D point."""
    def log_post(mu, var, prior):
        return (np.log(prior) - 0.5 * np.log(2 * np.pi * var)
                - (x - mu) ** 2 / (2 * var))
    return log_post(mu1, var1, prior1) - log_post(mu0, var0, prior0)


class TestTrainNb:
    def test_symmetric_tie_resolves_to_zero(self):
        model = train_nb(SYMMETRIC)
        pred = predict(model, one_d([0], [0]))[0]
        assert pred.score == pytest.approx(0.0, abs=1e-12)
        assert pred.label == 0

    def test_hand_computed_posterior_at_two(self):
        model = train_nb(SYMMETRIC)
        # pooled variance of [-1,-3,1,3] is 5, so the floor is 5e-9;
        # each class has mean +-2 and population variance 1
        var = 1 + 5e-9
        expected = hand_score(2.0, -2, var, 2, var)
        pred = predict(model, one_d([2], [0]))[0]
        assert pred.score == pytest.approx(expected, rel=1e-9)
        assert pred.label == 1

    def test_priors_from_frequencies(self):
        model = train_nb(one_d([0, 1, 2, 10], [0, 0, 0, 1]))
        assert model.priors.tolist() == [0.75, 0.25]
        assert model.priors.sum() == 1.0

    def test_single_class_rejected(self):
        with pytest.raises(TrainingError):
            train_nb(one_d([1, 2, 3], [1, 1, 1]))

    def test_variance_floor_positive(self):
        model = train_nb(one_d([5, 5, 5, 6], [0, 0, 1, 1]))
        assert model.epsilon > 0
        assert np.all(model.variances >= model.epsilon)


class TestNbProperties:
    def test_mirrored_data_negates_scores(self):
        rng = np.random.default_rng(21)
        x = rng.normal(size=(30, 3))
        labels = rng.integers(0, 2, size=30)
        labels[:2] = [0, 1]
        m = FeatureMatrix(x, ("a", "b", "c"), labels)
        mirrored = FeatureMatrix(-x, ("a", "b", "c"), 1 - labels)
        straight = train_nb(m)
        flipped = train_nb(mirrored)
        probe = rng.normal(size=(10, 3))
        s1 = straight.decision_scores(probe)
        s2 = flipped.decision_scores(-probe)
        np.testing.assert_allclose(s2, -s1, atol=1e-9)

    def test_boundary_at_density_crossing(self):
        # unequal class variances give a quadratic crossing equation
        model = train_nb(one_d([-3, -1, 1, 2, 3, 4], [0, 0, 0, 1, 1, 1]))
        (mu0, mu1) = model.means[:, 0]
        (v0, v1) = model.variances[:, 0]
        # solve log N(x|mu0,v0) = log N(x|mu1,v1) analytically
        a = 1 / (2 * v0) - 1 / (2 * v1)
        b = mu1 / v1 - mu0 / v0
        c = (mu0 ** 2 / (2 * v0) - mu1 ** 2 / (2 * v1)
             + 0.5 * np.log(v0 / v1))
        roots = np.roots([a, b, c]) if abs(a) > 1e-15 else [-c / b]
        for root in np.real(roots):
            score = model.decision_scores(np.array([[root]]))[0]
            assert abs(score) < 1e-6
