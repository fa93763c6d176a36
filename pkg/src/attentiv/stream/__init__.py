from .session import SessionEngine, WirePrediction

__all__ = ["SessionEngine", "WirePrediction"]
