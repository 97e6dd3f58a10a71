"""Append-only session logs and bit-exact replay.

Storage format: one JSON object per line.  The first line is a header
carrying everything needed to re-simulate (config, level, seed, pivot,
hash interval); every following line is an event ``{type, t, kind,
payload}`` ordered by (tick, arrival).  Lines are canonical JSON (sorted
keys, compact separators), so serialize -> parse -> serialize is
byte-identical.

Event kinds:

- ``input``      a tap applied at tick t (absence of an event means no tap)
- ``hr``         a heart-rate sample applied at tick t (t=0: baseline phase)
- ``adapt``      a threshold crossing and the multiplier it commanded
- ``state_hash`` 64-bit state digest after tick t, hex-encoded
- ``end``        termination: reason, duration, final score; always last

A ``state_hash`` event is written every ``hash_interval`` ticks plus one
at the end.  Heart-rate events are logged at the tick they were applied
to the controller, not at sensor time, so replay needs no clock model;
the sensor timestamp rides along in the payload.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Sequence

from .engine import GameConfig, GameState, LevelSpec

logger = logging.getLogger(__name__)

__all__ = [
    "FORMAT_NAME",
    "KIND_INPUT",
    "KIND_HR",
    "KIND_ADAPT",
    "KIND_STATE_HASH",
    "KIND_END",
    "DEFAULT_HASH_INTERVAL",
    "RecordError",
    "ReplayDivergence",
    "RecordEvent",
    "SessionRecord",
    "RecordWriter",
    "load_record",
    "serialize_record",
    "replay",
    "ReplayResult",
    "select_stressor_window",
    "list_records",
]

FORMAT_NAME = "pulsebird-session-v1"

KIND_INPUT = "input"
KIND_HR = "hr"
KIND_ADAPT = "adapt"
KIND_STATE_HASH = "state_hash"
KIND_END = "end"

_KINDS = {KIND_INPUT, KIND_HR, KIND_ADAPT, KIND_STATE_HASH, KIND_END}

DEFAULT_HASH_INTERVAL = 60


class RecordError(ValueError):
    """Malformed or inconsistent session log."""


class ReplayDivergence(RuntimeError):
    """Replay produced a different world than the log asserts."""

    def __init__(self, tick: int, expected, actual, detail: str = "state hash mismatch"):
        super().__init__(
            f"replay diverged at tick {tick}: {detail} (expected {expected!r}, got {actual!r})"
        )
        self.tick = tick
        self.expected = expected
        self.actual = actual


def _dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def hash_to_hex(h: int) -> str:
    return f"{h:016x}"


def hex_to_hash(s: str) -> int:
    return int(s, 16)


@dataclass(frozen=True)
class RecordEvent:
    t: int
    kind: str
    payload: dict

    def to_line_obj(self) -> dict:
        return {"type": "event", "t": self.t, "kind": self.kind, "payload": self.payload}


@dataclass
class SessionRecord:
    """Parsed session log: header fields plus the ordered event list."""

    session_id: str
    level: LevelSpec
    config: GameConfig
    seed: int
    pivot: float = 5.0
    exit_margin: float = 0.0
    hash_interval: int = DEFAULT_HASH_INTERVAL
    events: list[RecordEvent] = field(default_factory=list)

    @property
    def finalized(self) -> bool:
        return bool(self.events) and self.events[-1].kind == KIND_END

    @property
    def outcome(self) -> str | None:
        return self.events[-1].payload["reason"] if self.finalized else None

    @property
    def duration_s(self) -> float | None:
        return self.events[-1].payload["duration_s"] if self.finalized else None

    @property
    def final_score(self) -> int | None:
        return self.events[-1].payload["final_score"] if self.finalized else None

    def header_obj(self) -> dict:
        return {
            "type": "header",
            "format": FORMAT_NAME,
            "session_id": self.session_id,
            "level": self.level.to_dict(),
            "config": self.config.to_dict(),
            "seed": self.seed,
            "pivot": self.pivot,
            "exit_margin": self.exit_margin,
            "hash_interval": self.hash_interval,
        }

    def hr_samples(self, gameplay_only: bool = True) -> list[float]:
        """bpm values in log order; gameplay_only drops the baseline window."""
        return [
            e.payload["bpm"]
            for e in self.events
            if e.kind == KIND_HR and (not gameplay_only or e.t >= 1)
        ]

    def baseline_bpm(self) -> float | None:
        """Recompute the baseline exactly as the live controller did."""
        if not self.level.hr_adaptive:
            return None
        window = [e.payload["bpm"] for e in self.events if e.kind == KIND_HR and e.t == 0]
        if len(window) < 5:
            return None
        return sum(window[:5]) / 5.0

    def hash_trace(self) -> list[tuple[int, int]]:
        return [
            (e.t, hex_to_hash(e.payload["hash"]))
            for e in self.events
            if e.kind == KIND_STATE_HASH
        ]


class RecordWriter:
    """Single-writer append log; every event is flushed before the append
    returns.  ``fsync=True`` additionally forces the OS buffer to disk per
    event (slower; for when the log must survive power loss).  ``path=None``
    accumulates the record in memory only."""

    def __init__(self, path: str | Path | None, record: SessionRecord, fsync: bool = False) -> None:
        self.path = Path(path) if path is not None else None
        self.record = record
        self.fsync = fsync
        self._ended = False
        self._fh: IO[str] | None = (
            open(self.path, "w", encoding="utf-8") if self.path is not None else None
        )
        self._write_line(record.header_obj())

    def _write_line(self, obj: dict) -> None:
        if self._fh is None:
            return
        self._fh.write(_dumps(obj) + "\n")
        self._fh.flush()
        if self.fsync:
            os.fsync(self._fh.fileno())

    def append(self, t: int, kind: str, payload: dict) -> RecordEvent:
        if self._ended:
            raise RecordError("append after end: the session log is finalized")
        if kind not in _KINDS:
            raise RecordError(f"unknown event kind {kind!r}")
        event = RecordEvent(t=t, kind=kind, payload=payload)
        self.record.events.append(event)
        self._write_line(event.to_line_obj())
        if kind == KIND_END:
            self._ended = True
        return event

    def close(self) -> None:
        if self._fh is not None and not self._fh.closed:
            self._fh.close()

    def __enter__(self) -> "RecordWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def load_record(path: str | Path, allow_partial: bool = False) -> SessionRecord:
    """Parse a session log.

    ``allow_partial`` tolerates a truncated final line (crash mid-write)
    and an absent end event; the record then replays up to the last
    complete event.
    """
    path = Path(path)
    record: SessionRecord | None = None
    last_t = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.endswith("\n"):
                if allow_partial:
                    logger.warning("%s: truncated final line ignored", path)
                    break
                raise RecordError(f"{path}:{lineno}: truncated line")
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                if allow_partial and lineno > 1:
                    logger.warning("%s:%d: unparsable final line ignored (%s)", path, lineno, e)
                    break
                raise RecordError(f"{path}:{lineno}: invalid JSON: {e}") from e
            if lineno == 1:
                if obj.get("type") != "header" or obj.get("format") != FORMAT_NAME:
                    raise RecordError(f"{path}: not a {FORMAT_NAME} log")
                record = SessionRecord(
                    session_id=obj["session_id"],
                    level=LevelSpec.from_dict(obj["level"]),
                    config=GameConfig.from_dict(obj["config"]),
                    seed=obj["seed"],
                    pivot=obj.get("pivot", 5.0),
                    exit_margin=obj.get("exit_margin", 0.0),
                    hash_interval=obj.get("hash_interval", DEFAULT_HASH_INTERVAL),
                )
                continue
            if record is None:
                raise RecordError(f"{path}: missing header")
            if obj.get("type") != "event":
                raise RecordError(f"{path}:{lineno}: expected an event line")
            kind = obj["kind"]
            if kind not in _KINDS:
                raise RecordError(f"{path}:{lineno}: unknown event kind {kind!r}")
            t = obj["t"]
            if t < last_t:
                raise RecordError(f"{path}:{lineno}: event tick {t} precedes {last_t}")
            if record.finalized:
                raise RecordError(f"{path}:{lineno}: event after end")
            last_t = t
            record.events.append(RecordEvent(t=t, kind=kind, payload=obj["payload"]))
    if record is None:
        raise RecordError(f"{path}: empty file")
    if not record.finalized and not allow_partial:
        raise RecordError(f"{path}: record not finalized (no end event)")
    return record


def serialize_record(record: SessionRecord) -> str:
    """Exact file content for a record; the round-trip identity."""
    lines = [_dumps(record.header_obj())]
    lines.extend(_dumps(e.to_line_obj()) for e in record.events)
    return "\n".join(lines) + "\n"


@dataclass
class ReplayResult:
    final_state: GameState
    hash_trace: list[tuple[int, int]]
    ticks: int


def replay(record: SessionRecord, strict_end: bool = True) -> ReplayResult:
    """Re-simulate a record and check every logged state hash.

    Raises ``ReplayDivergence`` naming the first divergent tick when a
    recomputed hash (or the final reason/score) differs from the log.
    """
    # imported here: session drives the engine, records must not depend on it at import
    from .session import GameSession

    session = GameSession(
        config=record.config,
        level=record.level,
        seed=record.seed,
        session_id=record.session_id,
        writer=None,
        hash_interval=record.hash_interval,
        pivot=record.pivot,
        exit_margin=record.exit_margin,
    )
    trace: list[tuple[int, int]] = []

    # pre-gameplay events (t == 0) are baseline/pre-start heart rate
    i = 0
    events = record.events
    n = len(events)
    while i < n and events[i].t == 0:
        e = events[i]
        if e.kind == KIND_HR:
            session.offer_hr(e.payload["bpm"], e.payload["ts"], e.payload.get("source", "replay"))
        i += 1

    end_event: RecordEvent | None = events[-1] if record.finalized else None
    while i < n:
        t = events[i].t
        flap = False
        hr_batch: list[RecordEvent] = []
        checks: list[RecordEvent] = []
        while i < n and events[i].t == t:
            e = events[i]
            if e.kind == KIND_HR:
                hr_batch.append(e)
            elif e.kind == KIND_INPUT:
                flap = flap or bool(e.payload.get("flap", False))
            elif e.kind == KIND_STATE_HASH:
                checks.append(e)
            i += 1
        # catch up through unlogged ticks (no tap, no samples)
        while session.tick + 1 < t and not session.ended:
            session.step(False)
        if session.ended and t > session.tick:
            raise ReplayDivergence(t, "running", "ended", detail="session ended early in replay")
        # samples logged at t apply right before the step that produces tick t
        for e in hr_batch:
            session.offer_hr(e.payload["bpm"], e.payload["ts"], e.payload.get("source", "replay"))
        if session.tick < t:
            session.step(flap)
        for e in checks:
            expected = hex_to_hash(e.payload["hash"])
            actual = session.hash()
            trace.append((e.t, actual))
            if actual != expected:
                raise ReplayDivergence(e.t, hash_to_hex(expected), hash_to_hex(actual))

    # ticks with no events at all after the last logged one cannot exist:
    # the final tick always logs state_hash + end
    if end_event is not None and strict_end:
        final = session.state()
        reason = final.reason.value if final.reason else None
        if reason != end_event.payload["reason"] or final.score != end_event.payload["final_score"]:
            raise ReplayDivergence(
                end_event.t,
                (end_event.payload["reason"], end_event.payload["final_score"]),
                (reason, final.score),
                detail="final outcome mismatch",
            )
    return ReplayResult(final_state=session.state(), hash_trace=trace, ticks=session.tick)


STRESSOR_POLICY_SESSIONS_2_3 = "sessions-2-3"
STRESSOR_POLICY_ALL_AFTER_FIRST = "all-after-first"


def select_stressor_window(
    records: Sequence[SessionRecord],
    policy: str = STRESSOR_POLICY_SESSIONS_2_3,
) -> list[float]:
    """Gameplay HR samples for reactivity analysis.

    The first session is always discarded (learner bias); the default
    policy concatenates sessions 2 and 3, played back to back, into one
    stressor window.  Order within and across sessions is preserved.
    """
    if len(records) < 3:
        raise ValueError(f"insufficient sessions: need >= 3, have {len(records)}")
    level_ids = {r.level.level_id for r in records}
    if len(level_ids) != 1:
        raise ValueError(f"records span multiple levels: {sorted(level_ids)}")
    if policy == STRESSOR_POLICY_SESSIONS_2_3:
        chosen = records[1:3]
    elif policy == STRESSOR_POLICY_ALL_AFTER_FIRST:
        chosen = records[1:]
    else:
        raise ValueError(f"unknown stressor policy {policy!r}")
    window: list[float] = []
    for r in chosen:
        samples = r.hr_samples(gameplay_only=True)
        if not samples:
            logger.warning("session %s contributed no gameplay HR samples", r.session_id)
        window.extend(samples)
    return window


def list_records(directory: str | Path) -> list[SessionRecord]:
    """Load every *.jsonl session log in a directory, sorted by filename."""
    directory = Path(directory)
    out = []
    for p in sorted(directory.glob("*.jsonl")):
        try:
            out.append(load_record(p, allow_partial=True))
        except RecordError as e:
            logger.warning("skipping %s: %s", p, e)
    return out
