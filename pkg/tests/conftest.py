import numpy as np
import pytest

from attentiv.classifiers import train_svm
from attentiv.dataset import DEFAULT_SCHEMA, load_dataset
from attentiv.dsp import BAND_FEATURES, FS
from attentiv.features import FeatureMatrix, apply_scaler, fit_scaler

# Raw user_label ratings on the 1..10 confusion scale, one per row.
TINY_RATINGS = [1, 6, 10, 3, 7]


def write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def tiny_dataset_csv(tmp_path):
    """Five well-formed rows in the default schema, raw 1..10 user ratings."""
    rng = np.random.default_rng(42)
    rows = []
    for i, rating in enumerate(TINY_RATINGS):
        row = [i % 2, i, 50 + i, 40 + i, *np.round(rng.normal(10, 2, 9), 3),
               i % 2, rating]
        rows.append(row)
    return write_csv(tmp_path / "tiny.csv", DEFAULT_SCHEMA, rows)


@pytest.fixture
def tiny_dataset(tiny_dataset_csv):
    return load_dataset(tiny_dataset_csv)


def separable_blobs(n_per_class=20, d=2, margin=1.0, seed=0, spread=0.25):
    """Two Gaussian blobs with a guaranteed gap along the first axis."""
    rng = np.random.default_rng(seed)
    half = margin / 2 + 3 * spread
    a = rng.normal(0, spread, size=(n_per_class, d))
    a[:, 0] = -half - np.abs(a[:, 0])
    b = rng.normal(0, spread, size=(n_per_class, d))
    b[:, 0] = half + np.abs(b[:, 0])
    rows = np.vstack([a, b])
    labels = np.array([0] * n_per_class + [1] * n_per_class)
    order = rng.permutation(len(rows))
    names = tuple(f"f{i}" for i in range(d))
    return FeatureMatrix(rows[order], names, labels[order])


@pytest.fixture
def separable_fixture():
    return separable_blobs()


def band_training_matrix(n_per_class=40, seed=0):
    """Synthetic band-energy rows: alpha-heavy class 0, beta-heavy class 1."""
    rng = np.random.default_rng(seed)
    rows = []
    labels = []
    for cls in (0, 1):
        base = np.abs(rng.normal(2, 0.5, size=(n_per_class, 5)))
        hot = 2 if cls == 0 else 3   # e_alpha or e_beta column
        base[:, hot] += rng.normal(35, 4, size=n_per_class)
        rows.append(np.abs(base))
        labels += [cls] * n_per_class
    return FeatureMatrix(np.vstack(rows), BAND_FEATURES, np.array(labels))


@pytest.fixture(scope="session")
def band_model():
    """A linear model over the five live band-energy features."""
    matrix = band_training_matrix()
    scaler = fit_scaler(matrix)
    model = train_svm(apply_scaler(matrix, scaler), seed=1)
    assert model.converged
    return model, scaler


def labeled_csv(path, n_per_class=30, seed=0, separation=8.0):
    """Default-schema dataset whose band columns separate the classes."""
    rng = np.random.default_rng(seed)
    rows = []
    for cls in (0, 1):
        for i in range(n_per_class):
            alpha = rng.normal(20 - separation * cls, 1.0)
            beta = rng.normal(10 + separation * cls, 1.0)
            row = [
                (i % 3) + 1, i % 5, round(rng.normal(50, 10), 3),
                round(rng.normal(50, 10), 3), round(rng.normal(0, 5), 3),
                round(rng.normal(5, 1), 3), round(rng.normal(5, 1), 3),
                round(alpha, 3), round(alpha + rng.normal(0, 0.5), 3),
                round(beta, 3), round(beta + rng.normal(0, 0.5), 3),
                round(rng.normal(3, 1), 3), round(rng.normal(3, 1), 3),
                cls, int(rng.integers(1, 11)),
            ]
            rows.append(row)
    rng.shuffle(rows)
    return write_csv(path, DEFAULT_SCHEMA, rows)


def raw_wave(seconds, freq_hz=10.0, amplitude=150.0, noise=10.0, seed=0,
             channel=0, start_tick=0):
    """(timestamp, channel, value) rows of a noisy sinusoid at 128 Hz."""
    rng = np.random.default_rng(seed)
    n = int(seconds * FS)
    t = np.arange(n)
    values = (amplitude * np.sin(2 * np.pi * freq_hz * t / FS)
              + rng.normal(0, noise, size=n))
    values = np.clip(values, -32000, 32000)
    return [(start_tick + int(i), channel, float(v))
            for i, v in zip(t, values)]
