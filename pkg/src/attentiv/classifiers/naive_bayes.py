"""Gaussian naive Bayes trained by per-class moment matching."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import TrainingError
from ..features import FeatureMatrix
from .base import BaseModel

VARIANCE_FLOOR_SCALE = 1e-9


@dataclass
class NaiveBayesModel(BaseModel):
    priors: np.ndarray = field(default=None)       # class frequencies, sum 1
    means: np.ndarray = field(default=None)        # 2 x d
    variances: np.ndarray = field(default=None)    # 2 x d, floored
    epsilon: float = 0.0
    feature_names: tuple[str, ...] = ()
    algorithm: str = "nb"
    threshold: float = 0.0

    def decision_scores(self, rows: np.ndarray) -> np.ndarray:
        """Log-posterior difference, class 1 minus class 0."""
        rows = np.atleast_2d(rows)
        posts = []
        for c in (0, 1):
            var = self.variances[c]
            log_like = (-0.5 * np.log(2 * np.pi * var)
                        - (rows - self.means[c]) ** 2 / (2 * var)).sum(axis=1)
            posts.append(np.log(self.priors[c]) + log_like)
        return posts[1] - posts[0]


def train_nb(matrix: FeatureMatrix) -> NaiveBayesModel:
    """Fit per-class Gaussians with a variance floor.

    The floor is a tiny multiple of the largest pooled column variance so
    constant features never divide by zero. Variances use the population
    definition.
    """
    if matrix.labels is None:
        raise TrainingError("matrix has no labels")
    if matrix.n < 2:
        raise TrainingError("need at least two rows")
    classes = np.unique(matrix.labels)
    if len(classes) < 2:
        raise TrainingError(f"only class {classes[0]} present in the data")

    pooled_var = matrix.rows.var(axis=0).max()
    epsilon = VARIANCE_FLOOR_SCALE * pooled_var if pooled_var > 0 else 1e-12

    priors = np.empty(2)
    means = np.empty((2, matrix.d))
    variances = np.empty((2, matrix.d))
    for c in (0, 1):
        part = matrix.rows[matrix.labels == c]
        priors[c] = len(part) / matrix.n
        means[c] = part.mean(axis=0)
        variances[c] = part.var(axis=0) + epsilon
    return NaiveBayesModel(priors=priors, means=means, variances=variances,
                           epsilon=epsilon,
                           feature_names=matrix.feature_names)
