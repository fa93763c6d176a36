"""Client helpers for the session service: a small protocol wrapper plus
the replay routine that streams a recorded file as simulated live input."""

from __future__ import annotations

import json
import queue
import socket
import threading
import time

from ..errors import NetworkError
from .session import DEFAULT_ACCLIMATION_S

DEFAULT_BATCH = 16


class ServiceClient:
    """One connection; writes messages, reads pushes on a background thread."""

    def __init__(self, host: str, port: int, timeout: float = 30.0):
        self.timeout = timeout
        try:
            self._sock = socket.create_connection((host, port), timeout)
        except OSError as exc:
            raise NetworkError(
                f"cannot connect to {host}:{port}: {exc}"
            ) from None
        self._file = self._sock.makefile("rwb")
        self.predictions: list[dict] = []
        self._inbox: queue.Queue = queue.Queue()
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    def _read_loop(self):
        try:
            for raw in self._file:
                message = json.loads(raw)
                if message.get("type") == "prediction":
                    self.predictions.append(message)
                else:
                    self._inbox.put(message)
        except (OSError, ValueError):
            pass
        self._inbox.put(None)  # connection closed sentinel

    def send(self, message: dict) -> None:
        try:
            self._file.write((json.dumps(message) + "\n").encode())
            self._file.flush()
        except OSError as exc:
            raise NetworkError(f"connection lost: {exc}") from None

    def wait_for(self, kind: str) -> dict:
        """Block until a non-prediction message of the given type arrives."""
        deadline = time.monotonic() + self.timeout
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise NetworkError(f"timed out waiting for {kind!r}")
            try:
                message = self._inbox.get(timeout=remaining)
            except queue.Empty:
                raise NetworkError(f"timed out waiting for {kind!r}") from None
            if message is None:
                raise NetworkError("connection closed by the service")
            if message.get("type") == "error":
                raise NetworkError(
                    f"service error {message.get('error')}: "
                    f"{message.get('message')}"
                )
            if message.get("type") == kind:
                return message

    def open(self, subject_id, material_id, model_id,
             acclimation_s: int = DEFAULT_ACCLIMATION_S) -> dict:
        self.send({"type": "open", "subject_id": subject_id,
                   "material_id": material_id, "model_id": model_id,
                   "acclimation_s": acclimation_s})
        return self.wait_for("open_ack")

    def attach(self, session_id, cursor=None) -> dict:
        self.send({"type": "open", "session_id": session_id,
                   "cursor": cursor})
        return self.wait_for("open_ack")

    def close_session(self, session_id, self_rating, observer_ratings=(),
                      trim=False) -> dict:
        self.send({"type": "close", "session_id": session_id,
                   "self_rating": self_rating,
                   "observer_ratings": list(observer_ratings),
                   "trim": trim})
        return self.wait_for("summary")

    def shutdown(self):
        try:
            self._sock.close()
        except OSError:
            pass


def replay(samples, host: str, port: int, model_id: str,
           subject_id="replay", material_id="file",
           rate: float = 1.0, batch_size: int = DEFAULT_BATCH,
           trim: bool = False, self_rating: int = 5,
           observer_ratings=(), acclimation_s: int = 0,
           batch_sizes=None) -> tuple[dict, list[dict]]:
    """Stream (timestamp, channel, value) rows at rate x 128 Hz pacing.

    Returns the closing summary and every prediction pushed along the way.
    batch_sizes overrides the fixed batch length with an explicit
    partition, which is how the batch-invariance contract is exercised.
    """
    client = ServiceClient(host, port)
    try:
        ack = client.open(subject_id, material_id, model_id, acclimation_s)
        session_id = ack["session_id"]
        offset = 0
        sizes = iter(batch_sizes) if batch_sizes is not None else None
        while offset < len(samples):
            size = next(sizes, batch_size) if sizes else batch_size
            size = max(1, int(size))
            batch = samples[offset:offset + size]
            offset += len(batch)
            client.send({"type": "samples", "session_id": session_id,
                         "samples": [list(row) for row in batch]})
            if rate > 0:
                time.sleep(len(batch) / (128.0 * rate))
        summary = client.close_session(session_id, self_rating,
                                       observer_ratings, trim)
        # pushes are asynchronous; the summary message is ordered after
        # every prediction on this connection, so the list is complete
        return summary, list(client.predictions)
    finally:
        client.shutdown()
