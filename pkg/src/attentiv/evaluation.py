"""Confusion metrics, ROC/AUC, correlation matrix, and cross-validation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classifiers import predict, train
from .errors import ParameterError, StratificationError
from .features import FeatureMatrix, apply_scaler, fit_scaler


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with class 1 ("not learned") as the positive class."""

    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def swapped(self) -> "ConfusionMatrix":
        """The same tallies viewed with class 0 as positive."""
        return ConfusionMatrix(tp=self.tn, fp=self.fn, tn=self.tp,
                               fn=self.fp)


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    degenerate: bool = False


@dataclass(frozen=True)
class MetricsReport:
    """Accuracy plus per-class precision/recall/f1, both class views."""

    accuracy: float
    per_class: dict = field(default_factory=dict)  # {0: ClassMetrics, 1: ...}

    @property
    def degenerate(self) -> bool:
        return any(m.degenerate for m in self.per_class.values())


@dataclass(frozen=True)
class RocCurve:
    points: list          # (fpr, tpr) per threshold, sweep order
    thresholds: list
    auc: float


def _as_binary(values, name):
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise ParameterError(f"{name} must be one-dimensional")
    if arr.size and not np.all(np.isin(arr, (0, 1))):
        raise ParameterError(f"{name} must contain only 0 and 1")
    return arr.astype(int)


def confusion(labels, predictions) -> ConfusionMatrix:
    """Tally binary outcomes; class 1 counts as positive."""
    truth = _as_binary(labels, "labels")
    pred = _as_binary(predictions, "predictions")
    if len(truth) != len(pred):
        raise ParameterError(
            f"length mismatch: {len(truth)} labels, {len(pred)} predictions"
        )
    return ConfusionMatrix(
        tp=int(np.sum((truth == 1) & (pred == 1))),
        fp=int(np.sum((truth == 0) & (pred == 1))),
        tn=int(np.sum((truth == 0) & (pred == 0))),
        fn=int(np.sum((truth == 1) & (pred == 0))),
    )


def _safe_ratio(num, den):
    """0/0 maps to 0 with a degeneracy marker instead of NaN."""
    if den == 0:
        return 0.0, True
    return num / den, False


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Precision, recall, f1 per class and overall accuracy."""
    if cm.total == 0:
        raise ParameterError("empty confusion matrix")
    per_class = {}
    for cls, view in ((1, cm), (0, cm.swapped())):
        precision, p_deg = _safe_ratio(view.tp, view.tp + view.fp)
        recall, r_deg = _safe_ratio(view.tp, view.tp + view.fn)
        f1, f_deg = _safe_ratio(2 * precision * recall, precision + recall)
        per_class[cls] = ClassMetrics(precision=precision, recall=recall,
                                      f1=f1,
                                      degenerate=p_deg or r_deg or f_deg)
    accuracy = (cm.tp + cm.tn) / cm.total
    return MetricsReport(accuracy=accuracy, per_class=per_class)


def roc_curve(labels, scores) -> RocCurve:
    """Sweep unique score thresholds from +inf down; trapezoidal area.

    Tied scores move between sides of the threshold as a block.
    """
    truth = _as_binary(labels, "labels")
    scores = np.asarray(scores, dtype=float)
    if len(truth) != len(scores):
        raise ParameterError("labels and scores differ in length")
    pos = int(np.sum(truth == 1))
    neg = int(np.sum(truth == 0))
    if pos == 0 or neg == 0:
        raise ParameterError("both classes must be present for a ROC sweep")

    thresholds = [np.inf] + sorted(set(scores.tolist()), reverse=True)
    points = []
    for threshold in thresholds:
        predicted = scores >= threshold
        tpr = np.sum(predicted & (truth == 1)) / pos
        fpr = np.sum(predicted & (truth == 0)) / neg
        points.append((float(fpr), float(tpr)))

    auc = 0.0
    for (fpr0, tpr0), (fpr1, tpr1) in zip(points, points[1:]):
        auc += (fpr1 - fpr0) * (tpr0 + tpr1) / 2
    return RocCurve(points=points, thresholds=thresholds, auc=float(auc))


def correlation_matrix(matrix: FeatureMatrix):
    """Pearson correlations between all column pairs.

    Constant columns produce zero off-diagonal entries; the second return
    value flags that degeneracy.
    """
    if matrix.n < 2:
        raise ParameterError("need at least two rows for correlations")
    x = matrix.rows
    centered = x - x.mean(axis=0)
    stds = x.std(axis=0)
    degenerate = bool(np.any(stds == 0))
    safe = np.where(stds == 0, 1.0, stds)
    normalized = centered / safe
    corr = normalized.T @ normalized / matrix.n
    corr[stds == 0, :] = 0.0
    corr[:, stds == 0] = 0.0
    np.fill_diagonal(corr, 1.0)
    return corr, degenerate


def stratified_kfold(labels, k: int, seed: int = 0) -> list[np.ndarray]:
    """Split indices into k folds preserving class proportions within one.

    Each class's indices are shuffled by the seed and dealt round-robin.
    """
    truth = _as_binary(labels, "labels")
    if k < 2:
        raise ParameterError(f"fold count must be >= 2, got {k}")
    rng = np.random.default_rng(seed)
    folds = [[] for _ in range(k)]
    for cls in (0, 1):
        members = np.nonzero(truth == cls)[0]
        if len(members) < k:
            raise StratificationError(
                f"class {cls} has {len(members)} members, fewer than "
                f"{k} folds"
            )
        for i, idx in enumerate(rng.permutation(members)):
            folds[i % k].append(int(idx))
    return [np.array(sorted(f)) for f in folds]


def stratified_split(labels, test_fraction: float = 0.2,
                     seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Seeded train/test row split preserving class proportions."""
    truth = _as_binary(labels, "labels")
    if not 0 < test_fraction < 1:
        raise ParameterError("test fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    test = []
    for cls in (0, 1):
        members = np.nonzero(truth == cls)[0]
        if len(members) < 2:
            raise StratificationError(
                f"class {cls} has {len(members)} members; cannot split"
            )
        take = max(1, int(round(test_fraction * len(members))))
        if take >= len(members):
            take = len(members) - 1
        test.extend(rng.permutation(members)[:take].tolist())
    test = np.array(sorted(test))
    train = np.setdiff1d(np.arange(len(truth)), test)
    return train, test


def subject_split(subject_ids, test_fraction: float = 0.2,
                  seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Hold out whole subjects until the test side reaches the fraction."""
    subjects = np.asarray(subject_ids)
    unique = np.unique(subjects)
    if len(unique) < 2:
        raise ParameterError("need at least two subjects to split by subject")
    rng = np.random.default_rng(seed)
    goal = test_fraction * len(subjects)
    test_subjects = []
    covered = 0
    for subject in rng.permutation(unique):
        if covered >= goal or len(test_subjects) == len(unique) - 1:
            break
        test_subjects.append(subject)
        covered += int(np.sum(subjects == subject))
    mask = np.isin(subjects, test_subjects)
    return np.nonzero(~mask)[0], np.nonzero(mask)[0]


@dataclass(frozen=True)
class CrossValResult:
    fold_reports: list
    fold_accuracies: list
    mean_accuracy: float
    std_accuracy: float


def cross_validate(matrix: FeatureMatrix, algorithm: str, k: int = 10,
                   seed: int = 0, **hyper) -> CrossValResult:
    """Per-fold train/evaluate with the scaler fit on the train split only."""
    if matrix.labels is None:
        raise ParameterError("matrix has no labels")
    folds = stratified_kfold(matrix.labels, k, seed)
    fold_seeds = np.random.SeedSequence(seed).spawn(k)
    reports = []
    accuracies = []
    for fold_index, (held_out, fold_seq) in enumerate(zip(folds, fold_seeds)):
        train_idx = np.setdiff1d(np.arange(matrix.n), held_out)
        train_split = matrix.take(train_idx)
        test_split = matrix.take(held_out)
        scaler = fit_scaler(train_split)
        try:
            model = train(algorithm, apply_scaler(train_split, scaler),
                          seed=int(fold_seq.generate_state(1)[0]), **hyper)
        except Exception as exc:
            exc.args = (f"fold {fold_index}: {exc}",)
            raise
        preds = predict(model, apply_scaler(test_split, scaler))
        cm = confusion(test_split.labels, [p.label for p in preds])
        report = metrics(cm)
        reports.append(report)
        accuracies.append(report.accuracy)
    return CrossValResult(
        fold_reports=reports,
        fold_accuracies=accuracies,
        mean_accuracy=float(np.mean(accuracies)),
        std_accuracy=float(np.std(accuracies)),
    )
