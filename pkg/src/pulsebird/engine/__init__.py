"""Deterministic fixed-timestep simulation of the tap-to-fly pillar game.

Two interchangeable tick kernels implement the world update: a compiled
extension (``pulsebird.engine._simcore``, built from Cython) and a pure
Python twin (``simcore_py``).  The compiled one is selected at import
when available; set ``PULSEBIRD_PURE=1`` to force the Python backend.
Both produce bit-identical state evolutions — ``benchmarks/`` compares
their throughput and the parity tests assert the equivalence.

The module-level functions are pure: they take a ``GameState`` value and
return a new one.  Long-running hosts (the relay, the headless runner)
keep a mutable core via ``make_core``/``core_state`` instead of paying
snapshot cost every tick.
"""

from __future__ import annotations

import os

from .config import ConfigError, GameConfig, LevelSpec, pillar_gap_height, pillar_nominal_speed
from .simcore_py import EV_COLLISION_START, EV_ENDED, EV_NEAR_MISS, EV_SPAWNED, PySimCore
from .state import (
    EndReason,
    GameState,
    Phase,
    Pillar,
    TickInput,
    canonical_state_bytes,
    state_hash,
)

__all__ = [
    "GameConfig",
    "LevelSpec",
    "ConfigError",
    "GameState",
    "Pillar",
    "Phase",
    "EndReason",
    "TickInput",
    "init_session",
    "step",
    "set_speed_multiplier",
    "state_hash",
    "canonical_state_bytes",
    "pillar_nominal_speed",
    "pillar_gap_height",
    "make_core",
    "core_state",
    "kernel_backend",
    "EV_COLLISION_START",
    "EV_NEAR_MISS",
    "EV_SPAWNED",
    "EV_ENDED",
    "SPEED_MULTIPLIERS",
]

#: the only multipliers the difficulty controller may set: nominal speed,
#: and nominal reduced by 30%
SPEED_MULTIPLIERS = (1.0, 0.7)

if os.environ.get("PULSEBIRD_PURE"):
    _KERNEL = PySimCore
else:
    try:
        from . import _simcore

        _KERNEL = _simcore.SimCore
    except ImportError:  # extension not built; fall back to the interpreter
        _KERNEL = PySimCore


def kernel_backend() -> str:
    """Name of the active tick kernel: "cython" or "python"."""
    return "cython" if _KERNEL is not PySimCore else "python"


_PHASES = (Phase.READY, Phase.RUNNING, Phase.ENDED)
_REASONS = (None, EndReason.SUCCESS, EndReason.OUT_LEFT, EndReason.OUT_TOP, EndReason.OUT_BOTTOM)
_REASON_CODES = {r: i for i, r in enumerate(_REASONS)}


def _config_values(config: GameConfig) -> tuple:
    return (
        config.world_width,
        config.world_height,
        config.bird_home_x,
        config.gravity,
        config.flap_impulse,
        config.pillar_width,
        config.initial_gap,
        config.gap_increment_fraction,
        config.initial_pillar_speed,
        config.speed_growth_factor,
        config.speed_cap,
        config.gap_cap,
        config.pushback_speed,
        config.pillar_spacing,
        config.tick_rate,
    )


def _level_values(level: LevelSpec) -> tuple:
    target = level.target_score if level.target_score is not None else -1
    return (level.level_id, level.show_score, level.hr_adaptive, target)


def make_core(config: GameConfig, level: LevelSpec, seed: int):
    """Fresh mutable kernel core positioned at the Ready state."""
    return _KERNEL(_config_values(config), _level_values(level), seed)


def core_state(core, config: GameConfig, level: LevelSpec, seed: int) -> GameState:
    """Immutable snapshot of a kernel core."""
    (
        tick,
        bird_x,
        bird_y,
        bird_vy,
        score,
        multiplier,
        phase,
        reason,
        next_index,
        last_spawn_x,
        was_overlapping,
        pillars,
    ) = core.snapshot()
    return GameState(
        config=config,
        level=level,
        tick=tick,
        elapsed=float(tick) * config.dt,
        bird_x=bird_x,
        bird_y=bird_y,
        bird_vy=bird_vy,
        pillars=tuple(
            Pillar(
                index=p[0],
                x=p[1],
                gap_center_y=p[2],
                gap_height=p[3],
                nominal_speed=p[4],
                scored=bool(p[5]),
                min_clearance=p[6],
            )
            for p in pillars
        ),
        score=score,
        speed_multiplier=multiplier,
        phase=_PHASES[phase],
        reason=_REASONS[reason],
        rng_seed=seed & 0xFFFFFFFFFFFFFFFF,
        next_pillar_index=next_index,
        last_spawn_x=last_spawn_x,
        was_overlapping=bool(was_overlapping),
    )


def _state_snapshot(state: GameState) -> tuple:
    return (
        state.tick,
        state.bird_x,
        state.bird_y,
        state.bird_vy,
        state.score,
        state.speed_multiplier,
        _PHASES.index(state.phase),
        _REASON_CODES[state.reason],
        state.next_pillar_index,
        state.last_spawn_x,
        1 if state.was_overlapping else 0,
        tuple(
            (p.index, p.x, p.gap_center_y, p.gap_height, p.nominal_speed,
             1 if p.scored else 0, p.min_clearance)
            for p in state.pillars
        ),
    )


def _core_from_state(state: GameState):
    core = make_core(state.config, state.level, state.rng_seed)
    core.load(_state_snapshot(state))
    return core


def init_session(config: GameConfig, level: LevelSpec, seed: int) -> GameState:
    """Initial Ready-phase state: bird at home, first pillar at the right edge.

    Pure: identical arguments yield identical states (and hashes).
    Config invariants are enforced by ``GameConfig`` itself; they are
    re-checked here so dict-built configs cannot sneak past.
    """
    if not isinstance(config, GameConfig):
        raise ConfigError(f"config must be a GameConfig, got {type(config).__name__}")
    if not isinstance(level, LevelSpec):
        raise ConfigError(f"level must be a LevelSpec, got {type(level).__name__}")
    core = make_core(config, level, seed)
    return core_state(core, config, level, seed)


def step(state: GameState, tick_input: TickInput = TickInput(), dt: float | None = None) -> GameState:
    """Advance the world by exactly one fixed timestep.

    ``dt`` may be omitted or must equal ``1/tick_rate`` exactly; anything
    else is rejected to keep replays bit-exact.  Stepping an ended state
    is a no-op returning the same state.
    """
    if dt is not None and dt != state.config.dt:
        raise ValueError(
            f"dt must be exactly 1/tick_rate = {state.config.dt!r}, got {dt!r}"
        )
    if state.phase is Phase.ENDED:
        return state
    core = _core_from_state(state)
    core.tick(tick_input.flap)
    return core_state(core, state.config, state.level, state.rng_seed)


def set_speed_multiplier(state: GameState, m: float) -> GameState:
    """Set the difficulty multiplier; takes effect from the next step.

    Only the two sanctioned values are accepted.  Setting the value the
    state already has is a no-op by construction (never compounds).
    """
    if m not in SPEED_MULTIPLIERS:
        raise ValueError(f"speed multiplier must be one of {SPEED_MULTIPLIERS}, got {m!r}")
    if state.phase is Phase.ENDED:
        raise ValueError("cannot set speed multiplier on an ended session")
    return state.with_multiplier(float(m))
