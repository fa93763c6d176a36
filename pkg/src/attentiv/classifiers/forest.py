"""Random forest of Gini-impurity decision trees on bootstrap resamples.

Trees are stored as flat node arrays; children always sit at higher indices
than their parent, so the arrays are acyclic by construction and cheap to
serialize.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ParameterError, TrainingError
from ..features import FeatureMatrix
from .base import BaseModel

DEFAULT_TREES = 100
MIN_SAMPLES_SPLIT = 2

LEAF = -1


@dataclass(frozen=True)
class TreeNode:
    feature: int            # LEAF for terminal nodes
    threshold: float
    left: int               # node indices, LEAF when terminal
    right: int
    counts: tuple[int, int]  # class 0 / class 1 sample counts


def gini(counts) -> float:
    total = counts[0] + counts[1]
    if total == 0:
        return 0.0
    p0 = counts[0] / total
    p1 = counts[1] / total
    return 1.0 - p0 * p0 - p1 * p1


def _best_split(x, y, feature_order):
    """Scan candidate thresholds per feature; returns the largest impurity
    drop, breaking ties toward the earliest feature and lowest threshold."""
    n = len(y)
    parent = gini((np.sum(y == 0), np.sum(y == 1)))
    best = None  # (decrease, feature, threshold)
    for f in feature_order:
        values = x[:, f]
        order = np.argsort(values, kind="stable")
        v = values[order]
        ones = np.cumsum(y[order])          # class-1 count left of each cut
        boundaries = np.nonzero(np.diff(v))[0]  # cut after position k
        if boundaries.size == 0:
            continue
        k = boundaries + 1
        left_ones = ones[boundaries]
        left_zeros = k - left_ones
        right_ones = ones[-1] - left_ones
        right_zeros = (n - k) - right_ones
        gini_l = 1 - (left_zeros / k) ** 2 - (left_ones / k) ** 2
        gini_r = (1 - (right_zeros / (n - k)) ** 2
                  - (right_ones / (n - k)) ** 2)
        decrease = parent - (k / n) * gini_l - ((n - k) / n) * gini_r
        pick = int(np.argmax(decrease))
        if decrease[pick] > 1e-15 and (best is None
                                       or decrease[pick] > best[0] + 1e-15):
            threshold = (v[boundaries[pick]] + v[boundaries[pick] + 1]) / 2
            best = (float(decrease[pick]), int(f), float(threshold))
    return best


def grow_tree(x, y, rng, max_features="sqrt") -> list[TreeNode]:
    """Grow one unpruned tree; splitting stops at purity or when no
    candidate reduces impurity."""
    d = x.shape[1]
    if max_features == "sqrt":
        m = max(1, int(np.sqrt(d)))
    elif max_features == "all":
        m = d
    else:
        m = int(max_features)
        if not 1 <= m <= d:
            raise ParameterError(f"max_features {m} outside [1, {d}]")

    nodes: list[list] = []
    stack = [(np.arange(len(y)), None, None)]
    while stack:
        idx, parent, side = stack.pop()
        pos = len(nodes)
        if parent is not None:
            nodes[parent][2 if side == "left" else 3] = pos
        sub_y = y[idx]
        counts = (int(np.sum(sub_y == 0)), int(np.sum(sub_y == 1)))
        split = None
        if counts[0] and counts[1] and len(idx) >= MIN_SAMPLES_SPLIT:
            feature_order = rng.permutation(d)[:m]
            split = _best_split(x[idx], sub_y, feature_order)
        if split is None:
            nodes.append([LEAF, 0.0, LEAF, LEAF, counts])
            continue
        _, feature, threshold = split
        nodes.append([feature, threshold, LEAF, LEAF, counts])
        goes_left = x[idx, feature] <= threshold
        # right pushed first so the left subtree is laid out immediately
        # after its parent
        stack.append((idx[~goes_left], pos, "right"))
        stack.append((idx[goes_left], pos, "left"))
    return [TreeNode(f, t, l, r, c) for f, t, l, r, c in nodes]


class _TreeArrays:
    """Column layout of one tree for vectorized routing."""

    def __init__(self, tree: list[TreeNode]):
        self.feature = np.array([n.feature for n in tree])
        self.threshold = np.array([n.threshold for n in tree])
        self.left = np.array([n.left for n in tree])
        self.right = np.array([n.right for n in tree])
        # leaf vote: majority class, ties to 0
        self.vote = np.array([int(n.counts[1] > n.counts[0]) for n in tree])

    def votes(self, rows: np.ndarray) -> np.ndarray:
        pos = np.zeros(len(rows), dtype=int)
        internal = self.feature[pos] != LEAF
        while internal.any():
            p = pos[internal]
            vals = rows[internal, self.feature[p]]
            pos[internal] = np.where(vals <= self.threshold[p],
                                     self.left[p], self.right[p])
            internal = self.feature[pos] != LEAF
        return self.vote[pos]


@dataclass
class RandomForestModel(BaseModel):
    trees: list[list[TreeNode]] = field(default_factory=list)
    seed: int = 0
    max_features: str = "sqrt"
    feature_names: tuple[str, ...] = ()
    algorithm: str = "rf"
    threshold: float = 0.5

    def __post_init__(self):
        self._arrays = [_TreeArrays(t) for t in self.trees]

    def decision_scores(self, rows: np.ndarray) -> np.ndarray:
        """Fraction of trees voting class 1."""
        rows = np.atleast_2d(rows)
        votes = np.zeros(len(rows))
        for arrays in self._arrays:
            votes += arrays.votes(rows)
        return votes / len(self.trees)


def bootstrap_indices(rng, n: int) -> np.ndarray:
    return rng.integers(0, n, size=n)


def tree_rngs(seed: int, n_trees: int):
    """One independent, reproducible generator per tree."""
    return [np.random.default_rng(s)
            for s in np.random.SeedSequence(seed).spawn(n_trees)]


def train_rf(matrix: FeatureMatrix, n_trees: int = DEFAULT_TREES,
             seed: int = 0, max_features: str = "sqrt") -> RandomForestModel:
    """Train n_trees trees, each on its own bootstrap resample."""
    if n_trees < 1:
        raise ParameterError(f"tree count must be >= 1, got {n_trees}")
    if matrix.labels is None:
        raise TrainingError("matrix has no labels")
    if matrix.n < 2:
        raise TrainingError("need at least two rows")
    trees = []
    for rng in tree_rngs(seed, n_trees):
        picks = bootstrap_indices(rng, matrix.n)
        trees.append(grow_tree(matrix.rows[picks], matrix.labels[picks],
                               rng, max_features))
    return RandomForestModel(trees=trees, seed=seed,
                             max_features=max_features,
                             feature_names=matrix.feature_names)
