"""Versioned, checksummed model persistence.

Files are structured text so they diff cleanly and survive hand
inspection: a magic/version line, two self-describing header lines
(algorithm and feature names readable without parsing the body), a JSON
parameter block, and a whole-file checksum on the last line. Floats
round-trip bit-exactly through the JSON layer, so a loaded model predicts
identically to the saved one.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .classifiers import (BaseModel, EnsembleModel, NaiveBayesModel,
                          RandomForestModel, SvmModel, TreeNode)
from .errors import ChecksumError, ModelFileError, TruncatedFileError, VersionError
from .features import ScalerParams
from .util import clock

MAGIC = "attentiv-model"
VERSION = 1


def _jsonify(value):
    if isinstance(value, np.ndarray):
        return [_jsonify(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonify(v) for k, v in value.items()}
    return value


def _encode_trees(trees):
    return [[[n.feature, n.threshold, n.left, n.right, list(n.counts)]
             for n in tree] for tree in trees]


def _decode_trees(payload):
    return [[TreeNode(int(f), float(t), int(l), int(r),
                      (int(c[0]), int(c[1])))
             for f, t, l, r, c in tree] for tree in payload]


def _encode_model(model: BaseModel) -> dict:
    if isinstance(model, NaiveBayesModel):
        return {
            "priors": _jsonify(model.priors),
            "means": _jsonify(model.means),
            "variances": _jsonify(model.variances),
            "epsilon": float(model.epsilon),
        }
    if isinstance(model, SvmModel):
        return {
            "weights": _jsonify(model.weights),
            "bias": float(model.bias),
            "c": float(model.c),
            "tol": float(model.tol),
            "converged": bool(model.converged),
            "sweeps": int(model.sweeps),
        }
    if isinstance(model, RandomForestModel):
        return {
            "trees": _encode_trees(model.trees),
            "seed": int(model.seed),
            "max_features": model.max_features,
        }
    if isinstance(model, EnsembleModel):
        return {
            "seed": int(model.seed),
            "members": [
                {"algorithm": algo, "params": _encode_model(member)}
                for algo, member in model.members
            ],
        }
    raise ModelFileError(f"cannot serialize {type(model).__name__}")


def _decode_model(algorithm: str, params: dict,
                  feature_names: tuple[str, ...]) -> BaseModel:
    if algorithm == "nb":
        return NaiveBayesModel(
            priors=np.array(params["priors"]),
            means=np.array(params["means"]),
            variances=np.array(params["variances"]),
            epsilon=params["epsilon"],
            feature_names=feature_names,
        )
    if algorithm == "svm":
        return SvmModel(
            weights=np.array(params["weights"]),
            bias=params["bias"], c=params["c"], tol=params["tol"],
            converged=params["converged"], sweeps=params["sweeps"],
            feature_names=feature_names,
        )
    if algorithm == "rf":
        return RandomForestModel(
            trees=_decode_trees(params["trees"]), seed=params["seed"],
            max_features=params["max_features"],
            feature_names=feature_names,
        )
    if algorithm == "ensemble":
        members = [
            (m["algorithm"],
             _decode_model(m["algorithm"], m["params"], feature_names))
            for m in params["members"]
        ]
        return EnsembleModel(members=members, seed=params["seed"],
                             feature_names=feature_names)
    raise ModelFileError(f"unknown algorithm id {algorithm!r}")


def save_model(model: BaseModel, scaler: ScalerParams, path,
               metadata: dict | None = None) -> None:
    """Write model plus scaler; the last line checksums everything above."""
    if tuple(scaler.feature_names) != tuple(model.feature_names):
        raise ModelFileError("scaler and model disagree on feature names")
    body = {
        "format_version": VERSION,
        "algorithm": model.algorithm,
        "feature_names": list(model.feature_names),
        "scaler": {
            "means": _jsonify(scaler.means),
            "stds": _jsonify(scaler.stds),
        },
        "params": _encode_model(model),
        "metadata": {
            "created": float(clock()),
            **_jsonify(metadata or {}),
        },
    }
    head = (
        f"{MAGIC} v{VERSION}\n"
        f"algorithm: {model.algorithm}\n"
        f"features: {','.join(model.feature_names)}\n"
    )
    text = head + json.dumps(body, indent=2, sort_keys=True) + "\n"
    digest = hashlib.sha256(text.encode()).hexdigest()
    Path(path).write_text(text + f"checksum: sha256:{digest}\n")


def read_header(path) -> tuple[str, tuple[str, ...]]:
    """Algorithm id and feature names without touching the parameter block."""
    try:
        fh = open(path)
    except OSError as exc:
        raise ModelFileError(f"cannot read {path}: {exc}") from None
    with fh:
        magic = fh.readline()
        _check_version(magic, path)
        algorithm = fh.readline().strip()
        features = fh.readline().strip()
    if not algorithm.startswith("algorithm: ") or \
            not features.startswith("features: "):
        raise TruncatedFileError(f"{path}: header lines missing")
    names = tuple(features[len("features: "):].split(","))
    return algorithm[len("algorithm: "):], names


def _check_version(line: str, path) -> None:
    line = line.strip()
    if not line.startswith(MAGIC):
        raise ModelFileError(f"{path} is not a model file")
    if line != f"{MAGIC} v{VERSION}":
        raise VersionError(
            f"{path} declares {line.split(' ', 1)[1]!r}, "
            f"this build reads v{VERSION}"
        )


def load_model(path) -> tuple[BaseModel, ScalerParams]:
    """Verify the checksum, then rebuild the model and its scaler."""
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise ModelFileError(f"cannot read {path}: {exc}") from None
    lines = raw.splitlines(keepends=True)
    if not lines:
        raise TruncatedFileError(f"{path} is empty")
    _check_version(lines[0], path)
    last = lines[-1].strip()
    if not last.startswith("checksum: sha256:"):
        raise TruncatedFileError(f"{path} ends without a checksum line")
    declared = last[len("checksum: sha256:"):]
    content = "".join(lines[:-1])
    actual = hashlib.sha256(content.encode()).hexdigest()
    if actual != declared:
        raise ChecksumError(
            f"{path} checksum mismatch: file says {declared[:12]}..., "
            f"content hashes to {actual[:12]}..."
        )
    try:
        body = json.loads(content[content.index("\n{"):])
    except (ValueError, json.JSONDecodeError) as exc:
        raise ModelFileError(
            f"{path}: parameter block unreadable: {exc}"
        ) from None
    if body.get("format_version") != VERSION:
        raise VersionError(
            f"{path} body declares version {body.get('format_version')}"
        )
    names = tuple(body["feature_names"])
    scaler = ScalerParams(
        means=np.array(body["scaler"]["means"]),
        stds=np.array(body["scaler"]["stds"]),
        feature_names=names,
    )
    model = _decode_model(body["algorithm"], body["params"], names)
    return model, scaler
