"""Live session engine: buffers raw samples, runs the per-window pipeline,
and manages the recording lifecycle including the trim rule.

Windows tile the session stream by index (one window every `w` samples).
A window is scored as soon as its filter lookahead has arrived, so the
streamed numbers are bit-identical to running the batch pipeline over the
same samples. Samples beyond the stream end count as zeros, exactly like
the batch filter's edge padding; those trailing windows are flushed when
the session closes.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass

import numpy as np

from .. import dsp
from ..errors import (NotFoundError, ParameterError, SchemaError, StateError,
                      StreamOrderError, ValidationError)
from ..features import FeatureMatrix, apply_scaler

PHASES = ("acclimating", "recording", "resting", "rating", "closed")
DEFAULT_CAPACITY = 1280          # ten seconds of samples
DEFAULT_ACCLIMATION_S = 120
TRIM_SECONDS = 30

_session_ids = itertools.count(1)


@dataclass
class WirePrediction:
    session_id: str
    window_start: int            # tick of the window's first sample
    bands: dsp.BandEnergies
    label: int
    score: float
    model_id: str
    scoring: bool                # False while acclimating
    dropped: int = 0             # cumulative overflow drops at emit time
    excluded: bool = False       # set at close when the trim rule applies


class _Session:
    def __init__(self, session_id, metadata, model_id, model, scaler,
                 acclimation_s, engine):
        self.id = session_id
        self.metadata = metadata
        self.model_id = model_id
        self.model = model
        self.scaler = scaler
        self.acclimation_ticks = acclimation_s * engine.fs
        self.engine = engine
        self.phase = "acclimating"
        self.lock = threading.RLock()

        self.base_tick = None        # tick of the first ingested sample
        self.last_tick = None
        self.total = 0               # samples ingested over the session
        self.buffer_start = 0        # session index of tail[0]
        self.tail_values: list[float] = []
        self.tail_ticks: list[int] = []
        self.next_window = 0         # session index of the next window
        self.dropped = 0
        self.predictions: list[WirePrediction] = []
        self.self_rating = None
        self.observer_ratings: list[int] = []


class SessionEngine:
    """Serves any number of live sessions against registered models."""

    def __init__(self, fs: int = dsp.FS, w: int = dsp.WINDOW_LEN,
                 cutoff_hz: float = dsp.DEFAULT_CUTOFF_HZ,
                 n_taps: int = dsp.FILTER_TAPS,
                 capacity: int = DEFAULT_CAPACITY):
        if capacity < 1:
            raise ParameterError("capacity must be positive")
        self.fs = fs
        self.w = w
        self.capacity = capacity
        self.lookback = n_taps // 2
        self.taps = dsp.design_lowpass(cutoff_hz, fs, n_taps)
        self._models = {}
        self._sessions = {}
        self._lock = threading.RLock()

    # -- registry -----------------------------------------------------

    def register_model(self, model_id: str, model, scaler) -> None:
        unknown = [n for n in model.feature_names
                   if n not in dsp.BAND_FEATURES]
        if unknown:
            raise SchemaError(
                f"model {model_id!r} uses non-band features {unknown}; "
                f"live sessions provide {list(dsp.BAND_FEATURES)}"
            )
        with self._lock:
            self._models[model_id] = (model, scaler)

    def model_ids(self):
        with self._lock:
            return sorted(self._models)

    def _session(self, session_id) -> _Session:
        with self._lock:
            if session_id not in self._sessions:
                raise NotFoundError(f"no session {session_id!r}")
            return self._sessions[session_id]

    # -- lifecycle ----------------------------------------------------

    def open_session(self, metadata: dict, model_id: str,
                     acclimation_s: int = DEFAULT_ACCLIMATION_S) -> str:
        for key in ("subject_id", "material_id"):
            if not str(metadata.get(key, "")).strip():
                raise ValidationError(f"metadata is missing {key}")
        if acclimation_s < 0:
            raise ValidationError("acclimation must be >= 0 seconds")
        with self._lock:
            if model_id not in self._models:
                raise NotFoundError(f"no model {model_id!r} registered")
            model, scaler = self._models[model_id]
            session_id = f"s{next(_session_ids):06d}"
            self._sessions[session_id] = _Session(
                session_id, dict(metadata), model_id, model, scaler,
                acclimation_s, self)
        return session_id

    def phase(self, session_id) -> str:
        return self._session(session_id).phase

    def drop_count(self, session_id) -> int:
        return self._session(session_id).dropped

    def begin_rest(self, session_id) -> None:
        s = self._session(session_id)
        with s.lock:
            if s.phase != "recording":
                raise StateError(f"cannot rest from phase {s.phase}")
            s.phase = "resting"

    def resume_recording(self, session_id) -> None:
        s = self._session(session_id)
        with s.lock:
            if s.phase != "resting":
                raise StateError(f"cannot resume from phase {s.phase}")
            s.phase = "recording"

    def rate(self, session_id, self_rating=None,
             observer_ratings=None) -> None:
        s = self._session(session_id)
        with s.lock:
            if s.phase not in ("recording", "rating"):
                raise StateError(f"cannot rate in phase {s.phase}")
            if self_rating is not None:
                s.self_rating = _check_rating(self_rating, "self rating")
            if observer_ratings is not None:
                s.observer_ratings = [
                    _check_rating(r, "observer rating")
                    for r in observer_ratings
                ]
            s.phase = "rating"

    # -- ingestion ----------------------------------------------------

    def ingest_samples(self, session_id, batch) -> int:
        """Append a timestamp-ordered batch and score completed windows.

        The batch is atomic: one out-of-order timestamp rejects all of it.
        Returns the number of samples accepted.
        """
        s = self._session(session_id)
        with s.lock:
            if s.phase not in ("acclimating", "recording"):
                raise StateError(
                    f"session {session_id} cannot ingest in phase {s.phase}"
                )
            ticks, values = _validate_batch(batch, s.last_tick)
            if not ticks:
                return 0
            if s.base_tick is None:
                s.base_tick = ticks[0]
            for tick, value in zip(ticks, values):
                s.tail_ticks.append(tick)
                s.tail_values.append(value)
                s.total += 1
                s.last_tick = tick
                if (s.phase == "acclimating"
                        and tick >= s.base_tick + s.acclimation_ticks):
                    s.phase = "recording"
                self._process(s)
            return len(ticks)

    def _recording_start_tick(self, s) -> int:
        return s.base_tick + s.acclimation_ticks

    def _process(self, s, flush: bool = False) -> None:
        """Score every window whose data (and lookahead) has arrived."""
        look = self.lookback
        while True:
            needed = s.next_window + self.w + (0 if flush else look)
            if s.total < needed or s.total < s.next_window + self.w:
                break
            self._emit_window(s, flush)
        self._trim(s)
        self._enforce_capacity(s)

    def _emit_window(self, s, flush) -> None:
        look = self.lookback
        lo = s.next_window - look
        hi = s.next_window + self.w + look
        segment = np.zeros(hi - lo)
        start = max(lo, s.buffer_start)
        stop = min(hi, s.total)
        piece = s.tail_values[start - s.buffer_start:stop - s.buffer_start]
        segment[start - lo:stop - lo] = piece
        filtered = np.convolve(segment, self.taps, mode="valid")

        window_tick = s.tail_ticks[s.next_window - s.buffer_start]
        bands = dsp.band_energies(dsp.compute_psd(filtered, self.fs))
        row = np.array([[getattr(bands, n) for n in s.model.feature_names]])
        matrix = FeatureMatrix(row, s.model.feature_names)
        pred = s.model.predict(apply_scaler(matrix, s.scaler))[0]
        scoring = window_tick >= self._recording_start_tick(s)
        s.predictions.append(WirePrediction(
            session_id=s.id, window_start=int(window_tick), bands=bands,
            label=pred.label, score=pred.score, model_id=s.model_id,
            scoring=bool(scoring), dropped=s.dropped,
        ))
        s.next_window += self.w

    def _trim(self, s) -> None:
        keep_from = max(0, s.next_window - self.lookback)
        if keep_from > s.buffer_start:
            cut = keep_from - s.buffer_start
            del s.tail_values[:cut]
            del s.tail_ticks[:cut]
            s.buffer_start = keep_from

    def _enforce_capacity(self, s) -> None:
        over = len(s.tail_values) - self.capacity
        if over <= 0:
            return
        del s.tail_values[:over]
        del s.tail_ticks[:over]
        s.buffer_start += over
        s.dropped += over
        # windows that lost their support are skipped entirely
        earliest = s.buffer_start + self.lookback
        if s.next_window < earliest:
            s.next_window = -(-earliest // self.w) * self.w

    # -- reads ----------------------------------------------------------

    def poll_predictions(self, session_id, after: int | None = None):
        s = self._session(session_id)
        with s.lock:
            preds = list(s.predictions)
        if after is None:
            return preds
        return [p for p in preds if p.window_start > after]

    def buffered_samples(self, session_id) -> int:
        s = self._session(session_id)
        with s.lock:
            return len(s.tail_values)

    # -- close ----------------------------------------------------------

    def close_session(self, session_id, self_rating,
                      observer_ratings=(), trim: bool = False) -> dict:
        s = self._session(session_id)
        with s.lock:
            if s.phase not in ("recording", "rating"):
                raise StateError(
                    f"cannot close session in phase {s.phase}"
                )
            rating = _check_rating(self_rating, "self rating")
            observers = [_check_rating(r, "observer rating")
                         for r in observer_ratings]
            self._process(s, flush=True)

            rec_start = self._recording_start_tick(s)
            rec_end = (s.last_tick + 1) if s.last_tick is not None else rec_start
            margin = TRIM_SECONDS * self.fs
            for p in s.predictions:
                if not p.scoring:
                    p.excluded = True
                elif trim and not (rec_start + margin <= p.window_start
                                   < rec_end - margin):
                    p.excluded = True

            included = [p for p in s.predictions
                        if p.scoring and not p.excluded]
            votes_one = sum(p.label for p in included)
            summary = {
                "session_id": s.id,
                "included_windows": len(included),
                "excluded_windows": sum(p.excluded for p in s.predictions),
                "nonscoring_windows": sum(not p.scoring
                                          for p in s.predictions),
                "total_windows": len(s.predictions),
                "mean_score": (float(np.mean([p.score for p in included]))
                               if included else None),
                "majority_label": (int(votes_one * 2 > len(included))
                                   if included else None),
                "self_rating": rating,
                "observer_ratings": observers,
                "dropped_samples": s.dropped,
                "trim": bool(trim),
            }
            s.self_rating = rating
            s.observer_ratings = observers
            s.phase = "closed"
            return summary


def _check_rating(value, what) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ValidationError(f"{what} must be an integer, got {value!r}")
    if not 1 <= value <= 10:
        raise ValidationError(f"{what} {value} outside [1, 10]")
    return int(value)


def _validate_batch(batch, last_tick):
    ticks = []
    values = []
    previous = last_tick
    for index, item in enumerate(batch):
        if isinstance(item, dsp.RawSample):
            tick, value = item.timestamp, item.value
        else:
            tick, value = int(item[0]), float(item[1] if len(item) == 2
                                              else item[2])
        if not dsp.SAMPLE_MIN <= value <= dsp.SAMPLE_MAX:
            raise ParameterError(
                f"sample value at index {index} outside 16-bit range"
            )
        if previous is not None and tick <= previous:
            raise StreamOrderError(
                f"timestamp regression at index {index}: "
                f"{tick} after {previous}"
            )
        previous = tick
        ticks.append(int(tick))
        values.append(float(value))
    return ticks, values
