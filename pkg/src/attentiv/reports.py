"""Report writers: delimited machine-readable files, aligned human tables,
and matplotlib figures rendered alongside them."""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .dsp import BAND_FEATURES
from .evaluation import ConfusionMatrix, CrossValResult, MetricsReport, RocCurve


def _ensure_dir(out_dir) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def metrics_payload(report: MetricsReport, cm: ConfusionMatrix,
                    algorithm: str) -> dict:
    return {
        "algorithm": algorithm,
        "accuracy": report.accuracy,
        "per_class": {
            str(cls): {
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "degenerate": m.degenerate,
            }
            for cls, m in sorted(report.per_class.items())
        },
        "confusion": {"tp": cm.tp, "fp": cm.fp, "tn": cm.tn, "fn": cm.fn},
    }


def metrics_table(report: MetricsReport, algorithm: str) -> str:
    """Aligned table, one row per model, per-class metric columns."""
    header = (f"{'algorithm':<12}{'accuracy':>10}"
              f"{'prec c0':>10}{'prec c1':>10}"
              f"{'recall c0':>11}{'recall c1':>11}"
              f"{'f1 c0':>9}{'f1 c1':>9}")
    c0 = report.per_class[0]
    c1 = report.per_class[1]
    row = (f"{algorithm:<12}{report.accuracy:>10.4f}"
           f"{c0.precision:>10.2f}{c1.precision:>10.2f}"
           f"{c0.recall:>11.2f}{c1.recall:>11.2f}"
           f"{c0.f1:>9.2f}{c1.f1:>9.2f}")
    return header + "\n" + row + "\n"


def write_metrics(report: MetricsReport, cm: ConfusionMatrix,
                  algorithm: str, out_dir, stem: str = "metrics",
                  figures: bool = True) -> dict:
    out_dir = _ensure_dir(out_dir)
    payload = metrics_payload(report, cm, algorithm)
    (out_dir / f"{stem}.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n")
    (out_dir / f"{stem}.txt").write_text(metrics_table(report, algorithm))
    if figures:
        confusion_figure(cm, algorithm, out_dir / f"{stem}_confusion.png")
    return payload


def confusion_figure(cm: ConfusionMatrix, algorithm: str, path) -> None:
    grid = np.array([[cm.tn, cm.fp], [cm.fn, cm.tp]])
    fig, ax = plt.subplots(figsize=(4, 3.5))
    ax.imshow(grid, cmap="Blues")
    for (i, j), value in np.ndenumerate(grid):
        color = "white" if value > grid.max() / 2 else "black"
        ax.text(j, i, str(value), ha="center", va="center", color=color)
    ax.set_xticks([0, 1], ["predicted 0", "predicted 1"])
    ax.set_yticks([0, 1], ["actual 0", "actual 1"])
    ax.set_title(f"confusion matrix ({algorithm})")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def write_roc(roc: RocCurve, algorithm: str, out_dir, stem: str = "roc",
              figures: bool = True) -> None:
    out_dir = _ensure_dir(out_dir)
    lines = ["fpr,tpr,threshold"]
    for (fpr, tpr), threshold in zip(roc.points, roc.thresholds):
        t = "inf" if np.isinf(threshold) else repr(float(threshold))
        lines.append(f"{fpr!r},{tpr!r},{t}")
    lines.append(f"# auc={roc.auc!r}")
    (out_dir / f"{stem}.csv").write_text("\n".join(lines) + "\n")
    if figures:
        fig, ax = plt.subplots(figsize=(4.5, 4))
        ax.plot([0, 1], [0, 1], "--", color="grey", label="random (0.5)")
        ax.plot([p[0] for p in roc.points], [p[1] for p in roc.points],
                marker=".", label=f"{algorithm} (auc={roc.auc:.3f})")
        ax.set_xlabel("false positive rate")
        ax.set_ylabel("true positive rate")
        ax.legend(loc="lower right")
        fig.tight_layout()
        fig.savefig(out_dir / f"{stem}.png")
        plt.close(fig)


def write_crossval(result: CrossValResult, algorithm: str, k: int, out_dir,
                   stem: str = "crossval", figures: bool = True) -> dict:
    out_dir = _ensure_dir(out_dir)
    payload = {
        "algorithm": algorithm,
        "k": k,
        "fold_accuracies": result.fold_accuracies,
        "mean_accuracy": result.mean_accuracy,
        "std_accuracy": result.std_accuracy,
    }
    (out_dir / f"{stem}.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n")
    lines = ["fold,accuracy"]
    lines += [f"{i},{acc!r}" for i, acc in enumerate(result.fold_accuracies)]
    lines.append(f"mean,{result.mean_accuracy!r}")
    lines.append(f"std,{result.std_accuracy!r}")
    (out_dir / f"{stem}.csv").write_text("\n".join(lines) + "\n")
    if figures:
        fig, ax = plt.subplots(figsize=(5, 3.2))
        ax.bar(range(len(result.fold_accuracies)), result.fold_accuracies,
               color="steelblue")
        ax.axhline(result.mean_accuracy, color="darkred", linestyle="--",
                   label=f"mean {result.mean_accuracy:.4f}")
        ax.set_xlabel("fold")
        ax.set_ylabel("accuracy")
        ax.set_ylim(0, 1.05)
        ax.set_title(f"{k}-fold cross-validation ({algorithm})")
        ax.legend(loc="lower right")
        fig.tight_layout()
        fig.savefig(out_dir / f"{stem}.png")
        plt.close(fig)
    return payload


def write_correlation(corr: np.ndarray, names, out_dir,
                      stem: str = "correlation",
                      figures: bool = True) -> None:
    out_dir = _ensure_dir(out_dir)
    lines = ["," + ",".join(names)]
    for name, row in zip(names, corr):
        lines.append(name + "," + ",".join(repr(float(v)) for v in row))
    (out_dir / f"{stem}.csv").write_text("\n".join(lines) + "\n")
    if figures:
        size = max(4.0, 0.45 * len(names) + 1.5)
        fig, ax = plt.subplots(figsize=(size, size * 0.9))
        image = ax.imshow(corr, cmap="coolwarm", vmin=-1, vmax=1)
        ax.set_xticks(range(len(names)), names, rotation=90, fontsize=7)
        ax.set_yticks(range(len(names)), names, fontsize=7)
        fig.colorbar(image, ax=ax, shrink=0.8)
        ax.set_title("feature correlations")
        fig.tight_layout()
        fig.savefig(out_dir / f"{stem}.png")
        plt.close(fig)


def write_feature_rows(rows, path, figures: bool = True) -> None:
    """Band-energy rows from extraction: CSV plus a traces figure."""
    path = Path(path)
    lines = ["window_start,channel," + ",".join(BAND_FEATURES)]
    for window, bands in rows:
        values = ",".join(repr(float(getattr(bands, n)))
                          for n in BAND_FEATURES)
        lines.append(f"{window.start_timestamp},{window.channel},{values}")
    path.write_text("\n".join(lines) + "\n")
    if figures and rows:
        fig, ax = plt.subplots(figsize=(6, 3.2))
        ticks = [w.start_timestamp / 128.0 for w, _ in rows]
        for name in BAND_FEATURES:
            ax.plot(ticks, [getattr(b, name) for _, b in rows],
                    label=name.replace("e_", ""))
        ax.set_xlabel("time (s)")
        ax.set_ylabel("band energy")
        ax.legend(loc="upper right", fontsize=7, ncol=5)
        fig.tight_layout()
        fig.savefig(path.with_name(path.stem + "_bands.png"))
        plt.close(fig)
