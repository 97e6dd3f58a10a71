"""Wire protocol of the telemetry relay.

Frames are single JSON objects (UTF-8, no embedded newlines) carried as
websocket text messages.  Every frame has ``v`` (protocol version),
``type``, and — once a connection is bound to a session — ``session_id``
and a per-sender ``seq`` that must increase monotonically; frames with a
stale ``seq`` are dropped.

Client -> server: ``open_session``, ``join``, ``hr``, ``input``,
``questionnaire``.  Server -> client: ``session_start``, ``joined``,
``ack``, ``error``, ``state``, ``session_status``, ``session_end``.

Visibility rules are enforced when building ``state`` frames: ``score``
appears only when the level shows it, ``threshold`` only when the level
is heart-rate adaptive (so a level-1 client can never learn either).
The machine-readable schema ships in docs/wire-protocol.schema.json.
"""

from __future__ import annotations

import json
from typing import Any

from ..engine import GameState, LevelSpec

__all__ = [
    "PROTOCOL_VERSION",
    "ROLE_PLAYER",
    "ROLE_SENSOR",
    "ROLE_OBSERVER",
    "ROLES",
    "ProtocolError",
    "encode",
    "decode",
    "state_frame",
    "session_start_frame",
    "joined_frame",
    "ack_frame",
    "error_frame",
    "status_frame",
    "session_end_frame",
]

PROTOCOL_VERSION = 1

ROLE_PLAYER = "player"
ROLE_SENSOR = "sensor"
ROLE_OBSERVER = "observer"
ROLES = (ROLE_PLAYER, ROLE_SENSOR, ROLE_OBSERVER)

CLIENT_TYPES = ("open_session", "join", "hr", "input", "questionnaire")


class ProtocolError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


def encode(frame: dict) -> str:
    return json.dumps(frame, separators=(",", ":"))


def decode(raw: str | bytes) -> dict:
    try:
        frame = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ProtocolError("bad_json", str(e)) from e
    if not isinstance(frame, dict):
        raise ProtocolError("bad_frame", "frame must be a JSON object")
    if frame.get("v") != PROTOCOL_VERSION:
        raise ProtocolError("bad_version", f"unsupported protocol version {frame.get('v')!r}")
    ftype = frame.get("type")
    if ftype not in CLIENT_TYPES:
        raise ProtocolError("unknown_type", f"unknown message type {ftype!r}")
    return frame


def _base(ftype: str, session_id: str | None, seq: int) -> dict[str, Any]:
    frame: dict[str, Any] = {"v": PROTOCOL_VERSION, "type": ftype, "seq": seq}
    if session_id is not None:
        frame["session_id"] = session_id
    return frame


def state_frame(
    session_id: str,
    seq: int,
    state: GameState,
    level: LevelSpec,
    threshold_bpm: float | None,
) -> dict:
    frame = _base("state", session_id, seq)
    frame.update(
        tick=state.tick,
        bird_x=state.bird_x,
        bird_y=state.bird_y,
        bird_vy=state.bird_vy,
        multiplier=state.speed_multiplier,
        phase=state.phase.value,
        pillars=[
            {
                "index": p.index,
                "x": p.x,
                "gap_center_y": p.gap_center_y,
                "gap_height": p.gap_height,
                "nominal_speed": p.nominal_speed,
            }
            for p in state.pillars
        ],
    )
    if level.show_score:
        frame["score"] = state.score
    if level.hr_adaptive and threshold_bpm is not None:
        frame["threshold"] = threshold_bpm
    return frame


def session_start_frame(session_id: str, seq: int, level: LevelSpec, seed: int, config) -> dict:
    frame = _base("session_start", session_id, seq)
    frame.update(
        level=level.to_dict(),
        seed=seed,
        config_digest=config.digest(),
        config=config.to_dict(),
    )
    return frame


def joined_frame(session_id: str, seq: int, role: str, level: LevelSpec, config) -> dict:
    frame = _base("joined", session_id, seq)
    frame.update(role=role, level=level.to_dict(), config=config.to_dict())
    return frame


def ack_frame(session_id: str | None, seq: int, of_seq: int, status: str, detail: str | None = None) -> dict:
    frame = _base("ack", session_id, seq)
    frame.update(of_seq=of_seq, status=status)
    if detail:
        frame["detail"] = detail
    return frame


def error_frame(session_id: str | None, seq: int, code: str, message: str) -> dict:
    frame = _base("error", session_id, seq)
    frame.update(code=code, message=message)
    return frame


def status_frame(
    session_id: str,
    seq: int,
    phase: str,
    baseline_collected: int | None = None,
    baseline_needed: int | None = None,
    threshold_bpm: float | None = None,
) -> dict:
    frame = _base("session_status", session_id, seq)
    frame.update(phase=phase)
    if baseline_collected is not None:
        frame["baseline_collected"] = baseline_collected
        frame["baseline_needed"] = baseline_needed
    if threshold_bpm is not None:
        frame["threshold"] = threshold_bpm
    return frame


def session_end_frame(session_id: str, seq: int, reason: str, duration_s: float, final_score: int) -> dict:
    frame = _base("session_end", session_id, seq)
    frame.update(reason=reason, duration_s=duration_s, final_score=final_score)
    return frame
