"""Real-time EEG attention classification toolkit.

Raw scalp samples go through a deterministic band-energy pipeline into
from-scratch classifiers (linear SVM, Gaussian naive Bayes, random
forest, bagged ensemble), with a full evaluation suite and a live
session service speaking the wire protocol in protocol.md.
"""

from .classifiers import predict, train
from .dataset import Dataset, load_dataset
from .dsp import BandEnergies, RawSample, extract_features
from .evaluation import (confusion, correlation_matrix, cross_validate,
                         metrics, roc_curve, stratified_kfold)
from .features import FeatureMatrix, apply_scaler, build_matrix, fit_scaler
from .model_file import load_model, save_model
from .stream import SessionEngine

__version__ = "0.1.0"

__all__ = [
    "BandEnergies", "Dataset", "FeatureMatrix", "RawSample",
    "SessionEngine", "apply_scaler", "build_matrix", "confusion",
    "correlation_matrix", "cross_validate", "extract_features",
    "fit_scaler", "load_dataset", "load_model", "metrics", "predict",
    "roc_curve", "save_model", "stratified_kfold", "train",
]
