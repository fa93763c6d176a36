"""Deterministic signal path from raw EEG samples to per-band energies.

Pipeline: 50 Hz low-pass FIR -> fixed-length windows -> power spectrum
(one-sided, 0.5 Hz bins) -> band energy sums for delta/theta/alpha/beta/gamma.
Everything here is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ParameterError, StreamOrderError

FS = 128                 # sampling rate, Hz
WINDOW_LEN = 128         # samples per analysis window (1 s)
DEFAULT_CUTOFF_HZ = 50.0
FILTER_TAPS = 65         # odd, linear phase, group delay = 32 samples
SAMPLE_MIN = -32768      # 16-bit amplitude range
SAMPLE_MAX = 32767

# Live feature order, lowest band first. Models served against live streams
# are trained on these column names.
BAND_FEATURES = ("e_delta", "e_theta", "e_alpha", "e_beta", "e_gamma")


@dataclass(frozen=True)
class RawSample:
    """One sensor reading: tick count (1/128 s), amplitude, channel id."""

    timestamp: int
    value: float
    channel: int = 0

    def __post_init__(self):
        if not SAMPLE_MIN <= self.value <= SAMPLE_MAX:
            raise ParameterError(
                f"sample value {self.value} outside 16-bit range "
                f"[{SAMPLE_MIN}, {SAMPLE_MAX}]"
            )


@dataclass(frozen=True)
class SignalWindow:
    """A fixed-length block of (filtered) amplitudes starting at a tick."""

    samples: np.ndarray
    start_timestamp: int = 0
    channel: int = 0

    def __post_init__(self):
        n = len(self.samples)
        if n == 0 or n & (n - 1):
            raise ParameterError(f"window length {n} is not a power of two")


@dataclass(frozen=True)
class PowerSpectrum:
    """One-sided power values; bins[k] is the power at k * bin_hz."""

    bins: np.ndarray
    bin_hz: float

    @property
    def nyquist_hz(self) -> float:
        return (len(self.bins) - 1) * self.bin_hz


@dataclass(frozen=True)
class BandEnergies:
    """Summed spectral power per named EEG band, one analysis window."""

    e_delta: float
    e_theta: float
    e_alpha: float
    e_beta: float
    e_gamma: float

    def as_vector(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in BAND_FEATURES])


@dataclass(frozen=True)
class Band:
    name: str
    low_hz: float
    high_hz: float

    def __post_init__(self):
        if not 0 < self.low_hz <= self.high_hz:
            raise ParameterError(
                f"band {self.name}: need 0 < low <= high, got "
                f"[{self.low_hz}, {self.high_hz}]"
            )


# Band limits are inclusive on both edges; the gaps (3-4, 7-8, 13-14,
# 30-31 Hz) are intentional.
DEFAULT_BANDS = (
    Band("delta", 0.5, 3.0),
    Band("theta", 4.0, 7.0),
    Band("alpha", 8.0, 13.0),
    Band("beta", 14.0, 30.0),
    Band("gamma", 31.0, 50.0),
)


def design_lowpass(cutoff_hz: float = DEFAULT_CUTOFF_HZ, fs: int = FS,
                   n_taps: int = FILTER_TAPS) -> np.ndarray:
    """Hamming-windowed-sinc low-pass FIR taps, normalized to unit DC gain."""
    if not 0 < cutoff_hz < fs / 2:
        raise ParameterError(
            f"cutoff {cutoff_hz} Hz must lie in (0, {fs / 2}) Hz"
        )
    if n_taps % 2 == 0 or n_taps < 3:
        raise ParameterError(f"tap count {n_taps} must be odd and >= 3")
    mid = n_taps // 2
    k = np.arange(n_taps) - mid
    taps = 2 * cutoff_hz / fs * np.sinc(2 * cutoff_hz / fs * k)
    taps *= np.hamming(n_taps)
    return taps / taps.sum()


def _amplitudes(stream) -> np.ndarray:
    """Accept RawSamples (timestamps checked) or a bare numeric sequence."""
    items = list(stream)
    if items and isinstance(items[0], RawSample):
        ts = np.array([s.timestamp for s in items])
        bad = np.nonzero(np.diff(ts) <= 0)[0]
        if bad.size:
            raise StreamOrderError(
                f"timestamp at position {bad[0] + 1} does not increase"
            )
        return np.array([s.value for s in items], dtype=float)
    return np.asarray(items, dtype=float)


def lowpass_filter(stream, cutoff_hz: float = DEFAULT_CUTOFF_HZ,
                   fs: int = FS, n_taps: int = FILTER_TAPS) -> np.ndarray:
    """Filter a stream, output time-aligned with the input.

    The input is zero-padded by half the tap count on both sides so the
    output has the same length and no group delay.
    """
    taps = design_lowpass(cutoff_hz, fs, n_taps)
    values = _amplitudes(stream)
    if values.size == 0:
        return values
    pad = n_taps // 2
    padded = np.concatenate([np.zeros(pad), values, np.zeros(pad)])
    return np.convolve(padded, taps, mode="valid")


def window_stream(values, w: int = WINDOW_LEN, hop: int | None = None,
                  timestamps: Sequence[int] | None = None,
                  channel: int = 0) -> list[SignalWindow]:
    """Cut a sample stream into windows of w samples every hop samples.

    A trailing block shorter than w is discarded. Window start timestamps
    come from the parallel timestamps sequence when given, else from the
    sample index.
    """
    if w < 1 or w & (w - 1):
        raise ParameterError(f"window length {w} is not a power of two")
    hop = w if hop is None else hop
    if not 1 <= hop <= w:
        raise ParameterError(f"hop {hop} must be in [1, {w}]")
    values = np.asarray(values, dtype=float)
    windows = []
    for start in range(0, len(values) - w + 1, hop):
        tick = int(timestamps[start]) if timestamps is not None else start
        windows.append(SignalWindow(values[start:start + w], tick, channel))
    return windows


def fft(x) -> np.ndarray:
    """Iterative radix-2 transform; input length must be a power of two."""
    a = np.asarray(x, dtype=complex)
    n = a.size
    if n == 0 or n & (n - 1):
        raise ParameterError(f"transform length {n} is not a power of two")
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=int)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    a = a[rev]
    half = 1
    while half < n:
        twiddle = np.exp(-2j * np.pi * np.arange(half) / (2 * half))
        a = a.reshape(-1, 2 * half)
        even = a[:, :half]
        odd = a[:, half:] * twiddle
        a = np.concatenate([even + odd, even - odd], axis=1).reshape(-1)
        half *= 2
    return a


def compute_psd(window, fs: int = FS) -> PowerSpectrum:
    """One-sided power spectrum of a window, zero-padded to twice its length.

    With 128-sample windows this is a 256-point transform and 0.5 Hz bins.
    P(n) = |F(n)|^2 / N for n = 0..N/2; no factor-2 symmetry correction.
    """
    samples = window.samples if isinstance(window, SignalWindow) else window
    samples = np.asarray(samples, dtype=float)
    w = samples.size
    if w == 0 or w & (w - 1):
        raise ParameterError(f"window length {w} is not a power of two")
    n = 2 * w
    padded = np.concatenate([samples, np.zeros(w)])
    spectrum = fft(padded)[: n // 2 + 1]
    bins = (spectrum.real ** 2 + spectrum.imag ** 2) / n
    return PowerSpectrum(bins=bins, bin_hz=fs / n)


def band_energies(psd: PowerSpectrum,
                  bands: Iterable[Band] = DEFAULT_BANDS) -> BandEnergies:
    """Sum PSD bins whose center frequency falls inside each band.

    Bounds are inclusive; the DC bin never contributes.
    """
    bands = tuple(bands)
    names = {b.name for b in bands}
    missing = {b.name for b in DEFAULT_BANDS} - names
    if missing:
        raise ParameterError(f"band table missing {sorted(missing)}")
    freqs = np.arange(len(psd.bins)) * psd.bin_hz
    values = {}
    for band in bands:
        if band.high_hz > psd.nyquist_hz:
            raise ParameterError(
                f"band {band.name} exceeds Nyquist {psd.nyquist_hz} Hz"
            )
        mask = (freqs >= band.low_hz) & (freqs <= band.high_hz)
        mask[0] = False
        values[band.name] = float(psd.bins[mask].sum())
    return BandEnergies(
        e_delta=values["delta"], e_theta=values["theta"],
        e_alpha=values["alpha"], e_beta=values["beta"],
        e_gamma=values["gamma"],
    )


def extract_features(raw: Sequence[RawSample],
                     cutoff_hz: float = DEFAULT_CUTOFF_HZ,
                     w: int = WINDOW_LEN, hop: int | None = None,
                     bands: Iterable[Band] = DEFAULT_BANDS,
                     fs: int = FS) -> list[BandEnergies]:
    """Full pipeline: filter, window, spectrum, band sums.

    Returns one BandEnergies per complete window; fewer than w samples
    yields an empty list rather than an error.
    """
    energies = [be for _, be in extract_feature_rows(
        raw, cutoff_hz=cutoff_hz, w=w, hop=hop, bands=bands, fs=fs)]
    return energies


def extract_feature_rows(raw: Sequence[RawSample],
                         cutoff_hz: float = DEFAULT_CUTOFF_HZ,
                         w: int = WINDOW_LEN, hop: int | None = None,
                         bands: Iterable[Band] = DEFAULT_BANDS,
                         fs: int = FS) -> list[tuple[SignalWindow, BandEnergies]]:
    """Like extract_features but keeps each window's start tick and channel."""
    raw = list(raw)
    if len(raw) < w:
        return []
    channels = {s.channel for s in raw}
    if len(channels) > 1:
        raise ParameterError(
            f"stream mixes channels {sorted(channels)}; filter one at a time"
        )
    filtered = lowpass_filter(raw, cutoff_hz, fs)
    timestamps = [s.timestamp for s in raw]
    windows = window_stream(filtered, w, hop, timestamps, raw[0].channel)
    return [(win, band_energies(compute_psd(win, fs), bands))
            for win in windows]
