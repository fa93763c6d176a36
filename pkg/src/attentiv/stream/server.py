"""Line-delimited JSON session service over TCP.

One connection carries any number of newline-terminated JSON messages;
every message has a `type` field. The exact field layout is documented in
protocol.md at the repository root. Predictions are pushed to every
connection subscribed to the session as soon as ingestion produces them.
"""

from __future__ import annotations

import json
import socketserver
import threading

from .. import dsp
from ..errors import AttentivError, ValidationError
from .session import DEFAULT_ACCLIMATION_S, SessionEngine, WirePrediction


def prediction_message(p: WirePrediction) -> dict:
    return {
        "type": "prediction",
        "session_id": p.session_id,
        "window_start": p.window_start,
        "bands": {name: getattr(p.bands, name)
                  for name in dsp.BAND_FEATURES},
        "label": p.label,
        "score": p.score,
        "model_id": p.model_id,
        "scoring": p.scoring,
        "dropped": p.dropped,
    }


class _Handler(socketserver.StreamRequestHandler):
    def setup(self):
        super().setup()
        self.write_lock = threading.Lock()
        self.cursors: dict[str, int | None] = {}

    def send(self, message: dict) -> None:
        data = (json.dumps(message) + "\n").encode()
        with self.write_lock:
            self.wfile.write(data)
            self.wfile.flush()

    def send_error(self, exc: Exception, session_id=None) -> None:
        message = {
            "type": "error",
            "error": type(exc).__name__,
            "message": str(exc),
        }
        if session_id:
            message["session_id"] = session_id
        self.send(message)

    def handle(self):
        for raw in self.rfile:
            raw = raw.strip()
            if not raw:
                continue
            try:
                message = json.loads(raw)
            except json.JSONDecodeError as exc:
                self.send_error(exc)
                continue
            try:
                self.dispatch(message)
            except AttentivError as exc:
                self.send_error(exc, message.get("session_id"))
            except (KeyError, TypeError, ValueError) as exc:
                # malformed but parseable input never kills the connection
                self.send_error(
                    ValidationError(f"malformed message: {exc!r}"),
                    message.get("session_id"))

    def finish(self):
        self.server.unsubscribe(self)
        super().finish()

    def dispatch(self, message: dict) -> None:
        kind = message.get("type")
        engine = self.server.engine
        if kind == "open":
            self.handle_open(message)
        elif kind == "samples":
            session_id = message["session_id"]
            engine.ingest_samples(session_id, message["samples"])
            self.server.push_session(session_id)
        elif kind == "rate":
            engine.rate(message["session_id"],
                        message.get("self_rating"),
                        message.get("observer_ratings"))
        elif kind == "close":
            session_id = message["session_id"]
            summary = engine.close_session(
                session_id,
                message.get("self_rating"),
                message.get("observer_ratings", []),
                bool(message.get("trim", False)),
            )
            self.server.push_session(session_id)
            self.server.push_summary(session_id, summary)
        else:
            self.send_error(
                AttentivError(f"unknown message type {kind!r}"))

    def handle_open(self, message: dict) -> None:
        engine = self.server.engine
        existing = message.get("session_id")
        if existing:
            # reattach to a live session and resume from the cursor
            phase = engine.phase(existing)
            cursor = message.get("cursor")
            self.cursors[existing] = (int(cursor) if cursor is not None
                                      else None)
            self.server.subscribe(existing, self)
            self.send({"type": "open_ack", "session_id": existing,
                       "phase": phase, "resumed": True})
            self.server.push_session(existing)
            return
        session_id = engine.open_session(
            {"subject_id": message.get("subject_id"),
             "material_id": message.get("material_id")},
            message.get("model_id"),
            int(message.get("acclimation_s", DEFAULT_ACCLIMATION_S)),
        )
        self.cursors[session_id] = None
        self.server.subscribe(session_id, self)
        self.send({"type": "open_ack", "session_id": session_id,
                   "phase": engine.phase(session_id), "resumed": False})


class SessionServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address, engine: SessionEngine):
        super().__init__(address, _Handler)
        self.engine = engine
        self._subscribers: dict[str, list[_Handler]] = {}
        self._push_locks: dict[str, threading.Lock] = {}
        self._subscribe_lock = threading.Lock()

    @property
    def port(self) -> int:
        return self.server_address[1]

    def subscribe(self, session_id: str, handler: _Handler) -> None:
        with self._subscribe_lock:
            handlers = self._subscribers.setdefault(session_id, [])
            if handler not in handlers:
                handlers.append(handler)

    def unsubscribe(self, handler: _Handler) -> None:
        with self._subscribe_lock:
            for handlers in self._subscribers.values():
                if handler in handlers:
                    handlers.remove(handler)

    def _handlers(self, session_id):
        with self._subscribe_lock:
            return list(self._subscribers.get(session_id, ()))

    def push_session(self, session_id: str) -> None:
        """Send every not-yet-delivered prediction to each subscriber."""
        with self._subscribe_lock:
            lock = self._push_locks.setdefault(session_id, threading.Lock())
        with lock:
            for handler in self._handlers(session_id):
                cursor = handler.cursors.get(session_id)
                fresh = self.engine.poll_predictions(session_id, cursor)
                for p in fresh:
                    try:
                        handler.send(prediction_message(p))
                    except OSError:
                        self.unsubscribe(handler)
                        break
                    handler.cursors[session_id] = p.window_start

    def push_summary(self, session_id: str, summary: dict) -> None:
        for handler in self._handlers(session_id):
            try:
                handler.send({"type": "summary", **summary})
            except OSError:
                self.unsubscribe(handler)


def serve_forever(engine: SessionEngine, host: str = "127.0.0.1",
                  port: int = 7128) -> SessionServer:
    """Start the service on a background thread; returns the live server."""
    server = SessionServer((host, port), engine)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server
