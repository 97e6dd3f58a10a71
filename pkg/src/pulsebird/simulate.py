"""Synthetic heart rate and bot pilots for fully headless sessions.

The stress model is a first-order relaxation toward a resting baseline
with impulse jumps on gameplay events and optional gaussian noise: the
simplest dynamics under which stressful play raises HR and calm play
lets it settle.  Parameters are configuration, not physiology.

The bot is a proportional tap policy: flap whenever the ballistic
prediction of the bird's position ``reaction_delay`` ticks ahead falls
below the target line (the next gap center, offset by an aim-noise draw
made once per pillar).  Skill below 1 adds attention lapses and wider
aim noise.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass
from pathlib import Path

from . import records
from .adaptation import BPM_MAX, BPM_MIN
from .engine import (
    EV_COLLISION_START,
    EV_NEAR_MISS,
    GameConfig,
    LevelSpec,
)
from .session import GameSession

logger = logging.getLogger(__name__)

__all__ = [
    "StressModel",
    "ScriptedProfile",
    "BotPilot",
    "hr_step",
    "ConstantHr",
    "ScriptedHr",
    "StressHr",
    "PilotRuntime",
    "pilot_decide",
    "run_headless",
]

# skill < 1 widens aim noise and introduces attention lapses: blinks during
# which the current decision freezes for a random stretch of ticks
BOT_LAPSE_RATE = 1.5        # lapses per second at skill 0
BOT_LAPSE_MAX_TICKS = 90    # additional lapse length at skill 0
BOT_NOISE_COEF = 0.10       # extra aim sd at skill 0, fraction of world height


@dataclass(frozen=True)
class StressModel:
    """First-order HR dynamics with event-driven jumps."""

    baseline_bpm: float = 72.0
    decay_rate: float = 0.08        # 1/s pull toward baseline
    collision_jump: float = 6.0     # bpm per pillar hit
    near_miss_jump: float = 2.5     # bpm per tight pass
    noise_sd: float = 0.0           # bpm per sqrt(second)
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.decay_rate <= 0:
            raise ValueError(f"decay_rate must be > 0, got {self.decay_rate}")
        if self.collision_jump < 0 or self.near_miss_jump < 0 or self.noise_sd < 0:
            raise ValueError("jumps and noise_sd must be >= 0")


def hr_step(
    model: StressModel,
    current_bpm: float,
    collisions: int,
    near_misses: int,
    dt: float,
    rng: random.Random | None = None,
) -> float:
    """One update of the stress dynamics over dt seconds, clamped to the
    plausibility window."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    bpm = current_bpm + model.decay_rate * (model.baseline_bpm - current_bpm) * dt
    bpm += collisions * model.collision_jump + near_misses * model.near_miss_jump
    if rng is not None and model.noise_sd > 0:
        bpm += rng.gauss(0.0, model.noise_sd * math.sqrt(dt))
    if bpm < BPM_MIN:
        bpm = BPM_MIN
    elif bpm > BPM_MAX:
        bpm = BPM_MAX
    return bpm


@dataclass(frozen=True)
class ScriptedProfile:
    """Step-function HR trace: bpm holds from each time until the next."""

    points: tuple[tuple[float, float], ...]  # (from_s, bpm), strictly increasing

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError("profile needs at least one point")
        if self.points[0][0] != 0:
            raise ValueError(f"profile must start at t=0, got {self.points[0][0]}")
        for (a, _), (b, _) in zip(self.points, self.points[1:]):
            if b <= a:
                raise ValueError(f"profile times must be strictly increasing ({a} -> {b})")

    def bpm_at(self, t: float) -> float:
        value = self.points[0][1]
        for from_s, bpm in self.points:
            if from_s <= t:
                value = bpm
            else:
                break
        return value

    @classmethod
    def from_json(cls, data: list[dict]) -> "ScriptedProfile":
        return cls(tuple((float(p["from_s"]), float(p["bpm"])) for p in data))

    def to_json(self) -> list[dict]:
        return [{"from_s": t, "bpm": bpm} for t, bpm in self.points]


@dataclass(frozen=True)
class BotPilot:
    """Tap policy parameters; skill=1 with zero noise and delay clears
    every pillar in open play."""

    skill: float = 1.0
    reaction_delay: int = 0         # ticks of lookahead in the prediction
    aim_noise_sd: float = 0.0       # length units around the gap center
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.skill <= 1.0:
            raise ValueError(f"skill must be in [0, 1], got {self.skill}")
        if self.reaction_delay < 0:
            raise ValueError(f"reaction_delay must be >= 0, got {self.reaction_delay}")
        if self.aim_noise_sd < 0:
            raise ValueError(f"aim_noise_sd must be >= 0, got {self.aim_noise_sd}")


# -- heart-rate sources ----------------------------------------------------
# each exposes sample(t, dt, collisions, near_misses) -> bpm


class ConstantHr:
    def __init__(self, bpm: float) -> None:
        self.bpm = float(bpm)

    def sample(self, t: float, dt: float, collisions: int, near_misses: int) -> float:
        return self.bpm


class ScriptedHr:
    def __init__(self, profile: ScriptedProfile) -> None:
        self.profile = profile

    def sample(self, t: float, dt: float, collisions: int, near_misses: int) -> float:
        return self.profile.bpm_at(t)


class StressHr:
    """Stateful wrapper integrating a StressModel between samples."""

    def __init__(self, model: StressModel, start_bpm: float | None = None) -> None:
        self.model = model
        self.bpm = float(start_bpm if start_bpm is not None else model.baseline_bpm)
        self.rng = random.Random(model.rng_seed)

    def sample(self, t: float, dt: float, collisions: int, near_misses: int) -> float:
        self.bpm = hr_step(self.model, self.bpm, collisions, near_misses, dt, self.rng)
        return self.bpm


# -- pilot -------------------------------------------------------------------


class PilotRuntime:
    """Per-session bot state: rng stream, per-pillar aim, lapse window."""

    def __init__(self, bot: BotPilot, config: GameConfig) -> None:
        self.bot = bot
        self.config = config
        self.rng = random.Random(bot.rng_seed)
        self.lapse_hazard = BOT_LAPSE_RATE * (1.0 - bot.skill) * config.dt
        self.aim_sd = bot.aim_noise_sd + BOT_NOISE_COEF * (1.0 - bot.skill) * config.world_height
        self.aim_offset = 0.0
        self.target_index: int | None = None
        self.lapse_ticks = 0
        self.lapse_decision = False

    def decide(self, core) -> bool:
        return pilot_decide(self, core)


def pilot_decide(pilot: PilotRuntime, core) -> bool:
    """Flap when the predicted position falls below the target line."""
    cfg = pilot.config
    gap = core.nearest_gap()
    if gap is None:
        target = cfg.world_height * 0.5
    else:
        index, _x, center, _height, _speed = gap
        if index != pilot.target_index:
            pilot.target_index = index
            pilot.aim_offset = pilot.rng.gauss(0.0, pilot.aim_sd) if pilot.aim_sd > 0 else 0.0
        target = center + pilot.aim_offset

    h = pilot.bot.reaction_delay * cfg.dt
    y_pred = core.bird_y + core.bird_vy * h + 0.5 * cfg.gravity * h * h
    decision = y_pred > target

    # attention blink: the current decision freezes for a stretch of ticks
    if pilot.lapse_ticks > 0:
        pilot.lapse_ticks -= 1
        return pilot.lapse_decision
    if pilot.lapse_hazard > 0 and pilot.rng.random() < pilot.lapse_hazard:
        span = 4 + int(BOT_LAPSE_MAX_TICKS * (1.0 - pilot.bot.skill))
        pilot.lapse_ticks = pilot.rng.randint(4, max(5, span))
        pilot.lapse_decision = decision if pilot.rng.random() < 0.5 else False
        return pilot.lapse_decision
    return decision


# -- headless runner -----------------------------------------------------------


def run_headless(
    level: LevelSpec,
    config: GameConfig,
    bot: BotPilot,
    hr_source,
    seed: int,
    out_dir: str | Path | None = None,
    sample_rate_hz: float = 1.0,
    max_duration_s: float = 600.0,
    pivot: float = 5.0,
    hash_interval: int = records.DEFAULT_HASH_INTERVAL,
    fsync: bool = False,
) -> tuple[records.SessionRecord, Path | None]:
    """Drive a full session without the network layer.

    Contracts are identical to a relay-hosted session: baseline first on
    adaptive levels, samples applied before the tick they precede, the
    same event log layout.  Deterministic: same arguments, same record.
    """
    if sample_rate_hz < 0.5:
        raise ValueError(f"sample_rate_hz must be >= 0.5, got {sample_rate_hz}")
    session_id = f"sim-l{level.level_id}-seed{seed}"
    record = records.SessionRecord(
        session_id=session_id,
        level=level,
        config=config,
        seed=int(seed) & 0xFFFFFFFFFFFFFFFF,
        pivot=pivot,
        hash_interval=hash_interval,
    )
    path = Path(out_dir) / f"{session_id}.jsonl" if out_dir is not None else None
    writer = records.RecordWriter(path, record, fsync=fsync)
    session = GameSession(
        config=config,
        level=level,
        seed=seed,
        session_id=session_id,
        writer=writer,
        hash_interval=hash_interval,
        pivot=pivot,
    )
    pilot = PilotRuntime(bot, config)
    sample_period = 1.0 / sample_rate_hz
    dt = config.dt

    try:
        # baseline phase: sensor cadence starts at the session epoch
        k = 0
        while not session.baseline_ready:
            t_s = k * sample_period
            bpm = hr_source.sample(t_s, sample_period, 0, 0)
            session.offer_hr(bpm, round(t_s * 1000.0))
            k += 1
            if k > 200:
                raise RuntimeError("baseline never completed: HR source implausible?")
        t_start = k * sample_period
        next_sample_t = t_start

        pending_collisions = 0
        pending_near_misses = 0
        max_ticks = int(max_duration_s * config.tick_rate)
        while not session.ended:
            t = session.tick + 1  # the tick this iteration produces
            sim_time = t_start + t * dt
            while next_sample_t < sim_time:
                bpm = hr_source.sample(
                    next_sample_t, sample_period, pending_collisions, pending_near_misses
                )
                pending_collisions = 0
                pending_near_misses = 0
                session.offer_hr(bpm, round(next_sample_t * 1000.0))
                next_sample_t += sample_period
            flap = pilot.decide(session.core)
            events = session.step(flap)
            if events & EV_COLLISION_START:
                pending_collisions += 1
            if events & EV_NEAR_MISS:
                pending_near_misses += 1
            if t >= max_ticks:
                raise RuntimeError(
                    f"session exceeded {max_duration_s}s of simulated time without ending"
                )
    finally:
        writer.close()
    return record, path
