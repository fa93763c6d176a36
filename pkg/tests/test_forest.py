import numpy as np
import pytest

from attentiv.classifiers import predict, train_rf
from attentiv.classifiers.forest import (LEAF, bootstrap_indices, gini,
                                         grow_tree, tree_rngs)
from attentiv.errors import ParameterError
from attentiv.features import FeatureMatrix
from tests.conftest import separable_blobs


class TestTreeGrowth:
    def test_pure_node_becomes_leaf(self):
        x = np.array([[0.0], [1.0], [2.0]])
        y = np.array([1, 1, 1])
        tree = grow_tree(x, y, np.random.default_rng(0))
        assert len(tree) == 1
        assert tree[0].feature == LEAF
        assert tree[0].counts == (0, 3)
        assert gini(tree[0].counts) == 0.0

    def test_hand_enumerated_best_split(self):
        # four points on one axis, classes 0,0,1,1: every cut enumerated
        # by hand puts the best threshold between 1 and 2 with a full
        # impurity drop of 0.5
        x = np.array([[0.0], [1.0], [2.0], [3.0]])
        y = np.array([0, 0, 1, 1])
        assert gini((2, 2)) == 0.5
        tree = grow_tree(x, y, np.random.default_rng(0), max_features="all")
        root = tree[0]
        assert root.feature == 0
        assert 1.0 < root.threshold < 2.0
        left, right = tree[root.left], tree[root.right]
        assert left.counts == (2, 0)
        assert right.counts == (0, 2)

    def test_children_indices_exceed_parent(self):
        m = separable_blobs(n_per_class=30, d=4, seed=3)
        tree = grow_tree(m.rows, m.labels, np.random.default_rng(5))
        for pos, node in enumerate(tree):
            if node.feature != LEAF:
                assert node.left > pos
                assert node.right > pos


class TestTrainRf:
    def test_same_seed_bit_identical(self, separable_fixture):
        a = train_rf(separable_fixture, n_trees=10, seed=42)
        b = train_rf(separable_fixture, n_trees=10, seed=42)
        assert a.trees == b.trees

    def test_training_accuracy_on_separable_fixture(self, separable_fixture):
        model = train_rf(separable_fixture, n_trees=25, seed=0)
        preds = predict(model, separable_fixture)
        assert [p.label for p in preds] == separable_fixture.labels.tolist()

    def test_single_tree_equals_forest_of_one(self, separable_fixture):
        forest = train_rf(separable_fixture, n_trees=1, seed=5,
                          max_features="all")
        rng = tree_rngs(5, 1)[0]
        picks = bootstrap_indices(rng, separable_fixture.n)
        tree = grow_tree(separable_fixture.rows[picks],
                         separable_fixture.labels[picks], rng,
                         max_features="all")
        assert forest.trees[0] == tree

    def test_tree_count_validated(self, separable_fixture):
        with pytest.raises(ParameterError):
            train_rf(separable_fixture, n_trees=0)

    def test_scores_are_vote_fractions(self, separable_fixture):
        model = train_rf(separable_fixture, n_trees=10, seed=1)
        scores = model.decision_scores(separable_fixture.rows)
        votes = scores * 10
        np.testing.assert_allclose(votes, np.round(votes), atol=1e-12)
