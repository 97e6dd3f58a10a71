"""Immutable world snapshots and their canonical serialization.

The coordinate system is screen-style: x grows rightward, y grows
downward along the numeric axis, so gravity adds to ``bird_vy`` and a
flap sets it to ``-flap_impulse``.  Termination reasons are named after
the numeric boundary that was crossed: ``OUT_BOTTOM`` for ``y < 0`` and
``OUT_TOP`` for ``y > world_height``.

Canonical serialization (the contract behind ``state_hash``) is a fixed,
little-endian byte layout — see ``canonical_state_bytes`` and
docs/state-serialization.md.  The digest is the first 8 bytes of BLAKE2b
over those bytes, interpreted as a little-endian unsigned integer.  The
layout is versioned by the leading magic and is fixed for the lifetime of
this repository.
"""

from __future__ import annotations

import enum
import hashlib
import struct
from dataclasses import dataclass, field, replace

from .config import GameConfig, LevelSpec

__all__ = [
    "Phase",
    "EndReason",
    "Pillar",
    "GameState",
    "TickInput",
    "canonical_state_bytes",
    "state_hash",
    "SERIALIZATION_MAGIC",
]

SERIALIZATION_MAGIC = b"PBS1"

_U64_MASK = (1 << 64) - 1


class Phase(enum.Enum):
    READY = "ready"
    RUNNING = "running"
    ENDED = "ended"


class EndReason(enum.Enum):
    SUCCESS = "success"
    OUT_LEFT = "out_left"
    OUT_TOP = "out_top"
    OUT_BOTTOM = "out_bottom"


_PHASE_CODE = {Phase.READY: 0, Phase.RUNNING: 1, Phase.ENDED: 2}
_REASON_CODE = {
    None: 0,
    EndReason.SUCCESS: 1,
    EndReason.OUT_LEFT: 2,
    EndReason.OUT_TOP: 3,
    EndReason.OUT_BOTTOM: 4,
}


@dataclass(frozen=True)
class TickInput:
    """Player input for a single tick: did a tap land during it."""

    flap: bool = False


@dataclass(frozen=True)
class Pillar:
    """One inverted pillar pair, identified by its spawn order.

    ``scored`` and ``min_clearance`` are engine bookkeeping: ``scored``
    guarantees each pillar increments the score exactly once, and
    ``min_clearance`` tracks the tightest vertical margin observed while
    the bird was inside the pillar's span (used for near-miss events).
    """

    index: int
    x: float               # left edge
    gap_center_y: float
    gap_height: float
    nominal_speed: float
    scored: bool = False
    min_clearance: float = float("inf")


@dataclass(frozen=True)
class GameState:
    """Complete deterministic world snapshot.

    A value object: stepping never mutates, it returns a new state.  The
    embedded config and level make ``step`` a pure function of its
    arguments.  ``next_pillar_index`` and ``last_spawn_x`` are spawn
    bookkeeping that must survive a snapshot/restore round trip for the
    evolution to stay bit-exact.
    """

    config: GameConfig
    level: LevelSpec
    tick: int
    elapsed: float
    bird_x: float
    bird_y: float
    bird_vy: float
    pillars: tuple[Pillar, ...]
    score: int
    speed_multiplier: float
    phase: Phase
    reason: EndReason | None
    rng_seed: int
    next_pillar_index: int
    last_spawn_x: float
    was_overlapping: bool = field(default=False)

    def with_multiplier(self, m: float) -> "GameState":
        return replace(self, speed_multiplier=m)

    @property
    def ended(self) -> bool:
        return self.phase is Phase.ENDED


def canonical_state_bytes(state: GameState) -> bytes:
    """Field-ordered, fixed-precision serialization of a state.

    Doubles are serialized as their exact IEEE-754 bit patterns, so two
    states hash equal iff every covered field is bit-identical.  Covered
    fields are exactly those that influence future world evolution; the
    session-static config/level and the event-only bookkeeping
    (``min_clearance``, ``was_overlapping``) are excluded.
    """
    parts = [SERIALIZATION_MAGIC]
    parts.append(
        struct.pack(
            "<QddddQdBBQQd",
            state.tick,
            state.elapsed,
            state.bird_x,
            state.bird_y,
            state.bird_vy,
            state.score,
            state.speed_multiplier,
            _PHASE_CODE[state.phase],
            _REASON_CODE[state.reason],
            state.rng_seed & _U64_MASK,
            state.next_pillar_index,
            state.last_spawn_x,
        )
    )
    parts.append(struct.pack("<I", len(state.pillars)))
    for p in state.pillars:
        parts.append(
            struct.pack(
                "<QddddB",
                p.index,
                p.x,
                p.gap_center_y,
                p.gap_height,
                p.nominal_speed,
                1 if p.scored else 0,
            )
        )
    return b"".join(parts)


def state_hash(state: GameState) -> int:
    """Stable 64-bit digest of the canonical serialization."""
    digest = hashlib.blake2b(canonical_state_bytes(state), digest_size=8).digest()
    return int.from_bytes(digest, "little")
