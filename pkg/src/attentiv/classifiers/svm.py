"""Soft-margin linear SVM trained by sequential minimal optimization.

The dual is optimized pairwise. Each step picks the point with the worst
optimality violation and pairs it with the largest error gap, falling back
to a seeded random order when that partner cannot move; a sweep is one
round of such steps. Training stops when no point violates the conditions
beyond the tolerance, or after a sweep cap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import TrainingError
from ..features import FeatureMatrix
from .base import BaseModel

DEFAULT_C = 1.0
DEFAULT_TOL = 1e-3
MAX_SWEEPS = 1000
MIN_STEP = 1e-12


@dataclass
class SvmModel(BaseModel):
    weights: np.ndarray = field(default=None)
    bias: float = 0.0
    c: float = DEFAULT_C
    tol: float = DEFAULT_TOL
    feature_names: tuple[str, ...] = ()
    converged: bool = True
    sweeps: int = 0
    # training diagnostics, not persisted
    alphas: np.ndarray | None = None
    algorithm: str = "svm"
    threshold: float = 0.0

    def decision_scores(self, rows: np.ndarray) -> np.ndarray:
        # elementwise form rather than a matmul: the per-row reduction is
        # then identical whether rows arrive one at a time or batched
        rows = np.atleast_2d(rows)
        return (rows * self.weights).sum(axis=1) + self.bias


class _Smo:
    def __init__(self, x, y, c, tol, rng):
        self.x = x
        self.y = y
        self.c = c
        self.tol = tol
        self.rng = rng
        n, d = x.shape
        self.alphas = np.zeros(n)
        self.w = np.zeros(d)
        self.b = 0.0
        self.f = np.zeros(n)  # decision values, kept in sync with w and b

    def margins(self):
        return self.y * self.f

    def kkt_violations(self):
        """Boolean mask of points breaking their optimality condition."""
        yf = self.margins()
        low = (self.alphas < self.c - MIN_STEP) & (yf < 1 - self.tol)
        high = (self.alphas > MIN_STEP) & (yf > 1 + self.tol)
        return low | high

    def most_violating(self) -> int:
        """Index with the largest optimality gap, or -1 when none remain."""
        yf = self.margins()
        low = (self.alphas < self.c - MIN_STEP) & (yf < 1 - self.tol)
        high = (self.alphas > MIN_STEP) & (yf > 1 + self.tol)
        gap = np.where(low, (1 - self.tol) - yf,
                       np.where(high, yf - (1 + self.tol), -np.inf))
        i = int(np.argmax(gap))
        return i if gap[i] > 0 else -1

    def try_pair(self, i, j):
        """One pairwise update; returns True when alphas actually moved."""
        if i == j:
            return False
        x, y, alphas = self.x, self.y, self.alphas
        e_i = self.f[i] - y[i]
        e_j = self.f[j] - y[j]
        if y[i] != y[j]:
            lo = max(0.0, alphas[j] - alphas[i])
            hi = min(self.c, self.c + alphas[j] - alphas[i])
        else:
            lo = max(0.0, alphas[i] + alphas[j] - self.c)
            hi = min(self.c, alphas[i] + alphas[j])
        if hi - lo < MIN_STEP:
            return False
        k_ii = x[i] @ x[i]
        k_jj = x[j] @ x[j]
        k_ij = x[i] @ x[j]
        eta = 2 * k_ij - k_ii - k_jj
        if eta >= 0:
            return False
        a_j = np.clip(alphas[j] - y[j] * (e_i - e_j) / eta, lo, hi)
        delta_j = a_j - alphas[j]
        if abs(delta_j) < MIN_STEP:
            return False
        delta_i = -y[i] * y[j] * delta_j
        a_i = alphas[i] + delta_i

        b1 = (self.b - e_i - y[i] * delta_i * k_ii - y[j] * delta_j * k_ij)
        b2 = (self.b - e_j - y[i] * delta_i * k_ij - y[j] * delta_j * k_jj)
        if MIN_STEP < a_i < self.c - MIN_STEP:
            self.b = b1
        elif MIN_STEP < a_j < self.c - MIN_STEP:
            self.b = b2
        else:
            self.b = (b1 + b2) / 2

        alphas[i] = a_i
        alphas[j] = a_j
        self.w += y[i] * delta_i * x[i] + y[j] * delta_j * x[j]
        self.f = self.x @ self.w + self.b
        return True

    def step(self, i):
        errors = self.f - self.y
        gaps = np.abs(errors[i] - errors)
        gaps[i] = -1
        if self.try_pair(i, int(np.argmax(gaps))):
            return True
        for j in self.rng.permutation(len(self.y)):
            if self.try_pair(i, int(j)):
                return True
        return False

    def solve(self, max_sweeps):
        n = len(self.y)
        for sweep in range(1, max_sweeps + 1):
            for _ in range(n):
                i = self.most_violating()
                if i < 0:
                    return True, sweep
                if self.step(i):
                    continue
                # the worst violator is stuck; move any other violator
                moved = False
                for k in np.nonzero(self.kkt_violations())[0]:
                    if int(k) != i and self.step(int(k)):
                        moved = True
                        break
                if not moved:
                    return False, sweep
        return not self.kkt_violations().any(), max_sweeps


def train_svm(matrix: FeatureMatrix, c: float = DEFAULT_C,
              tol: float = DEFAULT_TOL, max_sweeps: int = MAX_SWEEPS,
              seed: int = 0) -> SvmModel:
    """Train on a pre-scaled matrix; labels map to -1/+1 internally.

    Non-convergence within the sweep cap flags the model instead of
    raising.
    """
    if matrix.labels is None:
        raise TrainingError("matrix has no labels")
    if c <= 0:
        raise TrainingError(f"penalty must be positive, got {c}")
    classes = np.unique(matrix.labels)
    if len(classes) < 2:
        raise TrainingError(f"only class {classes[0]} present in the data")

    y = np.where(matrix.labels == 1, 1.0, -1.0)
    smo = _Smo(matrix.rows, y, c, tol, np.random.default_rng(seed))
    converged, sweeps = smo.solve(max_sweeps)
    return SvmModel(weights=smo.w.copy(), bias=float(smo.b), c=c, tol=tol,
                    feature_names=matrix.feature_names, converged=converged,
                    sweeps=sweeps, alphas=smo.alphas.copy())
