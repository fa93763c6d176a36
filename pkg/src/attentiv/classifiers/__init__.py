"""The four classification models compared by the evaluation suite."""

from ..errors import ParameterError
from ..features import FeatureMatrix
from .base import BaseModel, Prediction, predict
from .ensemble import EnsembleModel, train_ensemble
from .forest import RandomForestModel, TreeNode, train_rf
from .naive_bayes import NaiveBayesModel, train_nb
from .svm import SvmModel, train_svm

ALGORITHMS = ("svm", "nb", "rf", "ensemble")


def train(algorithm: str, matrix: FeatureMatrix, seed: int = 0, *,
          c: float = 1.0, n_trees: int = 100, bags: int = 3,
          ensemble_algorithms=("svm", "nb", "rf")) -> BaseModel:
    """Train any of the supported algorithms with one call signature."""
    if algorithm == "svm":
        return train_svm(matrix, c=c, seed=seed)
    if algorithm == "nb":
        return train_nb(matrix)
    if algorithm == "rf":
        return train_rf(matrix, n_trees=n_trees, seed=seed)
    if algorithm == "ensemble":
        return train_ensemble(matrix, bags=bags, seed=seed,
                              algorithms=tuple(ensemble_algorithms),
                              c=c, n_trees=n_trees)
    raise ParameterError(f"unknown algorithm {algorithm!r}; "
                         f"choose from {ALGORITHMS}")


__all__ = [
    "ALGORITHMS", "BaseModel", "EnsembleModel", "NaiveBayesModel",
    "Prediction", "RandomForestModel", "SvmModel", "TreeNode",
    "predict", "train", "train_ensemble", "train_nb", "train_rf",
    "train_svm",
]
