"""Shared prediction types and the common predict entry point."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SchemaError
from ..features import FeatureMatrix


@dataclass(frozen=True)
class Prediction:
    """Binary decision plus a confidence score (higher favors class 1).

    Ties at the decision threshold resolve to label 0 ("learned").
    """

    label: int
    score: float


class BaseModel:
    """Minimal interface every trained model implements."""

    algorithm: str = ""
    feature_names: tuple[str, ...] = ()
    threshold: float = 0.0

    def decision_scores(self, rows: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict(self, matrix: FeatureMatrix) -> list[Prediction]:
        return predict(self, matrix)


def predict(model: BaseModel, matrix: FeatureMatrix) -> list[Prediction]:
    """Score every row; label 1 requires the score to exceed the threshold."""
    if matrix.feature_names != tuple(model.feature_names):
        raise SchemaError(
            f"matrix columns {matrix.feature_names} do not match model "
            f"columns {tuple(model.feature_names)}"
        )
    if matrix.n == 0:
        return []
    scores = model.decision_scores(matrix.rows)
    return [Prediction(label=int(s > model.threshold), score=float(s))
            for s in scores]
