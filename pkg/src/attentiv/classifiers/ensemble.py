"""Bagged heterogeneous ensemble: several members per base algorithm,
each trained on its own bootstrap resample, aggregated by majority vote."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import TrainingError
from ..features import FeatureMatrix
from .base import BaseModel
from .forest import train_rf
from .naive_bayes import train_nb
from .svm import train_svm

DEFAULT_BAGS = 3
DEFAULT_ALGORITHMS = ("svm", "nb", "rf")


def normalized_score(algorithm: str, score: float) -> float:
    """Map a raw decision score onto [0, 1] so members are comparable.

    Margins and log-odds go through a logistic squash; forest vote
    fractions already live on [0, 1].
    """
    if algorithm in ("rf", "ensemble"):
        return float(score)
    return float(1.0 / (1.0 + np.exp(-np.clip(score, -500, 500))))


@dataclass
class EnsembleModel(BaseModel):
    members: list = field(default_factory=list)  # (algorithm id, model)
    seed: int = 0
    feature_names: tuple[str, ...] = ()
    algorithm: str = "ensemble"
    threshold: float = 0.5

    def __post_init__(self):
        if len(self.members) < 3:
            raise TrainingError(
                f"ensemble needs at least 3 members, got {len(self.members)}"
            )

    def decision_scores(self, rows: np.ndarray) -> np.ndarray:
        """Fraction of members voting class 1."""
        rows = np.atleast_2d(rows)
        votes = np.zeros(len(rows))
        for _, member in self.members:
            votes += (member.decision_scores(rows)
                      > member.threshold).astype(float)
        return votes / len(self.members)

    def mean_normalized_scores(self, rows: np.ndarray) -> np.ndarray:
        rows = np.atleast_2d(rows)
        total = np.zeros(len(rows))
        for algo, member in self.members:
            raw = member.decision_scores(rows)
            total += [normalized_score(algo, s) for s in raw]
        return total / len(self.members)

    def predict(self, matrix: FeatureMatrix):
        from .base import predict as base_predict
        preds = base_predict(self, matrix)
        # an even member count can split the vote; break the tie by the
        # stronger mean normalized score, and failing that choose 0
        if len(self.members) % 2 == 0:
            ties = [i for i, p in enumerate(preds) if p.score == 0.5]
            if ties:
                from .base import Prediction
                means = self.mean_normalized_scores(matrix.rows[ties])
                for i, mean in zip(ties, means):
                    label = int(mean > 0.5)
                    preds[i] = Prediction(label=label, score=preds[i].score)
        return preds


_TRAINERS = {
    "svm": lambda m, seed, hyper: train_svm(
        m, c=hyper.get("c", 1.0), seed=seed),
    "nb": lambda m, seed, hyper: train_nb(m),
    "rf": lambda m, seed, hyper: train_rf(
        m, n_trees=hyper.get("n_trees", 100), seed=seed),
}


def train_ensemble(matrix: FeatureMatrix, bags: int = DEFAULT_BAGS,
                   seed: int = 0,
                   algorithms: tuple[str, ...] = DEFAULT_ALGORITHMS,
                   **hyper) -> EnsembleModel:
    """Train bags members per algorithm on independent bootstrap resamples.

    A member whose resample cannot be trained (for example single-class)
    is skipped, but at least two algorithms must keep a member or training
    fails outright.
    """
    if matrix.labels is None:
        raise TrainingError("matrix has no labels")
    if len(np.unique(matrix.labels)) < 2:
        raise TrainingError("both classes must be present")
    if bags < 1:
        raise TrainingError(f"bags must be >= 1, got {bags}")

    seeds = np.random.SeedSequence(seed).spawn(len(algorithms) * bags)
    members = []
    alive = set()
    failures = []
    for a, algo in enumerate(algorithms):
        if algo not in _TRAINERS:
            raise TrainingError(f"unknown base algorithm {algo!r}")
        for b in range(bags):
            member_seq = seeds[a * bags + b]
            rng = np.random.default_rng(member_seq)
            picks = rng.integers(0, matrix.n, size=matrix.n)
            train_seed = int(member_seq.generate_state(1)[0])
            try:
                model = _TRAINERS[algo](matrix.take(picks), train_seed, hyper)
            except TrainingError as exc:
                failures.append(f"{algo}[{b}]: {exc}")
                continue
            members.append((algo, model))
            alive.add(algo)

    # the two-algorithm floor guards against degradation, not against a
    # deliberate single-algorithm configuration
    if len(alive) < min(2, len(algorithms)) or len(members) < 3:
        raise TrainingError(
            "too few ensemble members survived training: "
            + "; ".join(failures)
        )
    return EnsembleModel(members=members, seed=seed,
                         feature_names=matrix.feature_names)
