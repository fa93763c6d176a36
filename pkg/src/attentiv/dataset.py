"""Dataset ingestion: CSV parsing, schema checks, rating binarization."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError, SchemaError

# Column layout of a recorded study file. Band columns appear split in two
# sub-ranges each; a reduced schema can be passed as an override.
DEFAULT_SCHEMA = (
    "subject_id", "video_id", "attention", "meditation", "raw",
    "delta", "theta", "alpha1", "alpha2", "beta1", "beta2",
    "gamma1", "gamma2", "predefined_label", "user_label",
)

LABEL_COLUMNS = ("predefined_label", "user_label")

# Self-assessed confusion is rated 1..10; ratings at or above this value
# binarize to 1 ("not learned").
CONFUSION_THRESHOLD = 6


@dataclass
class Dataset:
    """Parsed rows with an ordered schema; label columns are binary."""

    schema: list[str]
    rows: np.ndarray

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    def column(self, name: str) -> np.ndarray:
        if name not in self.schema:
            raise SchemaError(f"dataset has no column {name}")
        return self.rows[:, self.schema.index(name)]


def binarize_ratings(values: np.ndarray,
                     threshold: int = CONFUSION_THRESHOLD) -> np.ndarray:
    """Map 1..10 confusion ratings to binary labels; binary input passes through."""
    values = np.asarray(values, dtype=float)
    if np.all(np.isin(values, (0.0, 1.0))):
        return values.copy()
    return (values >= threshold).astype(float)


def load_dataset(path, schema: Sequence[str] | None = None,
                 confusion_threshold: int = CONFUSION_THRESHOLD) -> Dataset:
    """Read a comma-delimited file with a mandatory header row.

    The header must contain every expected column (default or override);
    extra file columns are an error. Label columns are binarized: values
    already in {0, 1} pass through, otherwise ratings at or above the
    threshold become 1.
    """
    expected = list(schema) if schema is not None else list(DEFAULT_SCHEMA)
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path} is empty") from None
        header = [h.strip() for h in header]
        missing = [c for c in expected if c not in header]
        if missing:
            raise SchemaError(f"{path} header is missing column "
                              f"{missing[0]!r}")
        extra = [c for c in header if c not in expected]
        if extra:
            raise SchemaError(f"{path} has unexpected column {extra[0]!r}")

        order = [header.index(c) for c in expected]
        rows = []
        for lineno, record in enumerate(reader, start=2):
            if not record or all(cell.strip() == "" for cell in record):
                continue
            if len(record) != len(header):
                raise DataError(
                    f"{path} line {lineno}: expected {len(header)} fields, "
                    f"got {len(record)}"
                )
            parsed = []
            for name, col in zip(expected, order):
                cell = record[col].strip()
                try:
                    value = float(cell)
                except ValueError:
                    raise DataError(
                        f"{path} line {lineno}, column {name!r}: "
                        f"non-numeric value {cell!r}"
                    ) from None
                if not math.isfinite(value):
                    raise DataError(
                        f"{path} line {lineno}, column {name!r}: "
                        f"non-finite value"
                    )
                parsed.append(value)
            rows.append(parsed)

    if not rows:
        raise DataError(f"{path} has a header but no data rows")

    matrix = np.array(rows, dtype=float)
    for name in expected:
        if name in LABEL_COLUMNS:
            idx = expected.index(name)
            matrix[:, idx] = binarize_ratings(matrix[:, idx],
                                              confusion_threshold)
    return Dataset(schema=expected, rows=matrix)


RAW_HEADER = ("timestamp", "channel", "value")


def load_raw_samples(path) -> list[tuple[int, int, float]]:
    """Read a raw sample file: CSV with a timestamp,channel,value header."""
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path} is empty") from None
        if header != list(RAW_HEADER):
            raise SchemaError(
                f"{path} header must be {','.join(RAW_HEADER)}, "
                f"got {','.join(header)}"
            )
        samples = []
        for lineno, record in enumerate(reader, start=2):
            if not record or all(cell.strip() == "" for cell in record):
                continue
            try:
                tick = int(float(record[0]))
                channel = int(float(record[1]))
                value = float(record[2])
            except (ValueError, IndexError):
                raise DataError(
                    f"{path} line {lineno}: malformed sample row"
                ) from None
            if not math.isfinite(value):
                raise DataError(f"{path} line {lineno}: non-finite value")
            samples.append((tick, channel, value))
    if not samples:
        raise DataError(f"{path} has a header but no samples")
    return samples
