"""Standard scaling and feature-matrix assembly for the classifiers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError, ParameterError, SchemaError

LABEL_COLUMNS = ("predefined_label", "user_label")


@dataclass
class FeatureMatrix:
    """Numeric n x d matrix with named columns and optional binary labels."""

    rows: np.ndarray
    feature_names: tuple[str, ...]
    labels: np.ndarray | None = None

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.ndim != 2:
            raise ParameterError("rows must be a 2-D matrix")
        if self.rows.shape[1] != len(self.feature_names):
            raise SchemaError(
                f"{self.rows.shape[1]} columns but "
                f"{len(self.feature_names)} feature names"
            )
        self.feature_names = tuple(self.feature_names)
        if not np.all(np.isfinite(self.rows)):
            r, c = np.argwhere(~np.isfinite(self.rows))[0]
            raise DataError(
                f"non-finite value at row {r}, column {self.feature_names[c]}"
            )
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)
            if self.labels.shape != (self.rows.shape[0],):
                raise ParameterError("labels length must match row count")
            if not np.all(np.isin(self.labels, (0, 1))):
                raise ParameterError("labels must be 0 or 1")

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]

    def take(self, indices) -> "FeatureMatrix":
        labels = None if self.labels is None else self.labels[indices]
        return FeatureMatrix(self.rows[indices], self.feature_names, labels)


@dataclass(frozen=True)
class ScalerParams:
    """Per-column mean and population standard deviation."""

    means: np.ndarray
    stds: np.ndarray
    feature_names: tuple[str, ...]


def fit_scaler(matrix: FeatureMatrix) -> ScalerParams:
    """Column means and population standard deviations (divide by n)."""
    if matrix.n < 1:
        raise ParameterError("cannot fit a scaler on an empty matrix")
    means = matrix.rows.mean(axis=0)
    stds = matrix.rows.std(axis=0)  # ddof=0, population definition
    return ScalerParams(means=means, stds=stds,
                        feature_names=matrix.feature_names)


def apply_scaler(matrix: FeatureMatrix, params: ScalerParams) -> FeatureMatrix:
    """Center and scale each column; zero-variance columns map to zeros."""
    if matrix.feature_names != params.feature_names:
        raise SchemaError(
            f"matrix columns {matrix.feature_names} do not match scaler "
            f"columns {params.feature_names}"
        )
    safe = np.where(params.stds == 0, 1.0, params.stds)
    scaled = (matrix.rows - params.means) / safe
    scaled[:, params.stds == 0] = 0.0
    return FeatureMatrix(scaled, matrix.feature_names, matrix.labels)


def inverse_scaler(matrix: FeatureMatrix, params: ScalerParams) -> FeatureMatrix:
    """Undo apply_scaler for nonzero-variance columns."""
    if matrix.feature_names != params.feature_names:
        raise SchemaError("matrix columns do not match scaler columns")
    restored = matrix.rows * params.stds + params.means
    return FeatureMatrix(restored, matrix.feature_names, matrix.labels)


def build_matrix(dataset, feature_selection: Sequence[str] | None = None,
                 target: str = "predefined") -> FeatureMatrix:
    """Project a dataset onto selected columns and attach a label vector.

    The default selection is every non-label column, in schema order.
    target chooses between the experimenter-set label ("predefined") and
    the label binarized from the subject's own rating ("user").
    """
    if target not in ("predefined", "user"):
        raise ParameterError(f"target must be predefined or user, got {target}")
    label_column = "predefined_label" if target == "predefined" else "user_label"
    if label_column not in dataset.schema:
        raise SchemaError(f"dataset has no column {label_column}")

    if feature_selection is None:
        feature_selection = [c for c in dataset.schema
                             if c not in LABEL_COLUMNS]
    unknown = [c for c in feature_selection if c not in dataset.schema]
    if unknown:
        raise SchemaError(f"unknown columns {unknown}")

    cols = [dataset.schema.index(c) for c in feature_selection]
    labels = dataset.rows[:, dataset.schema.index(label_column)]
    return FeatureMatrix(dataset.rows[:, cols], tuple(feature_selection),
                         labels.astype(int))
