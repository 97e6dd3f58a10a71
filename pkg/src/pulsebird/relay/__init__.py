"""Telemetry relay: websocket service streaming authoritative game state."""

from . import protocol
from .client import FrameView, Link, PlayResult, play_session
from .server import RelayServer, RelaySession

__all__ = [
    "protocol",
    "RelayServer",
    "RelaySession",
    "Link",
    "FrameView",
    "PlayResult",
    "play_session",
]
