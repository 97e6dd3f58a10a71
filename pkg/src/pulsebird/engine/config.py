"""World configuration and level definitions.

``GameConfig`` holds every physical constant of the simulation; all of it
is plain data so a config can be hashed, logged in a session header, and
rebuilt bit-for-bit for replay.  ``LevelSpec`` captures the per-level
feature flags: whether the HUD shows a score, whether heart-rate
adaptation drives the speed multiplier, and an optional target score that
ends the session with a win.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass

__all__ = [
    "GameConfig",
    "LevelSpec",
    "ConfigError",
    "pillar_nominal_speed",
    "pillar_gap_height",
]


class ConfigError(ValueError):
    """Raised when a configuration violates one of its invariants."""


@dataclass(frozen=True)
class GameConfig:
    """Physical constants of the world, in abstract length units and seconds.

    Defaults are calibrated so that a perfect pilot crosses pillar 30 in
    roughly one minute of simulated time with the difficulty progression
    active (see the calibration tests).
    """

    world_width: float = 480.0
    world_height: float = 640.0
    bird_home_x: float = 120.0
    gravity: float = 1300.0            # downward acceleration, units/s^2
    flap_impulse: float = 380.0        # upward speed set on tap, units/s
    pillar_width: float = 70.0
    initial_gap: float = 160.0
    gap_increment_fraction: float = 0.20   # additive, per pillar, of the initial gap
    initial_pillar_speed: float = 80.0
    speed_growth_factor: float = 1.10      # compounding, per pillar
    speed_cap: float = 200.0
    gap_cap: float = 320.0
    pushback_speed: float = 140.0      # leftward drag while touching a pillar body
    pillar_spacing: float = 320.0      # horizontal distance between spawns
    tick_rate: int = 60                # fixed-timestep rate, Hz

    def __post_init__(self) -> None:
        positive = {
            "world_width": self.world_width,
            "world_height": self.world_height,
            "bird_home_x": self.bird_home_x,
            "gravity": self.gravity,
            "flap_impulse": self.flap_impulse,
            "pillar_width": self.pillar_width,
            "initial_gap": self.initial_gap,
            "initial_pillar_speed": self.initial_pillar_speed,
            "speed_cap": self.speed_cap,
            "gap_cap": self.gap_cap,
            "pushback_speed": self.pushback_speed,
            "pillar_spacing": self.pillar_spacing,
            "tick_rate": self.tick_rate,
        }
        for name, value in positive.items():
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be strictly positive, got {value!r}")
        if self.gap_increment_fraction < 0:
            raise ConfigError(
                f"gap_increment_fraction must be >= 0, got {self.gap_increment_fraction}"
            )
        if self.speed_growth_factor < 1:
            raise ConfigError(
                f"speed_growth_factor must be >= 1, got {self.speed_growth_factor}"
            )
        if self.initial_pillar_speed > self.speed_cap:
            raise ConfigError(
                "speed_cap violated: initial_pillar_speed "
                f"{self.initial_pillar_speed} exceeds speed_cap {self.speed_cap}"
            )
        if self.initial_gap > self.gap_cap:
            raise ConfigError(
                f"gap_cap violated: initial_gap {self.initial_gap} exceeds gap_cap {self.gap_cap}"
            )
        if self.gap_cap > self.world_height:
            raise ConfigError(
                f"world_height violated: gap_cap {self.gap_cap} exceeds "
                f"world_height {self.world_height}"
            )

    @property
    def dt(self) -> float:
        """Fixed timestep in seconds; the only dt ``step`` accepts."""
        return 1.0 / self.tick_rate

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "GameConfig":
        return cls(**d)

    def digest(self) -> str:
        """Hex digest identifying this config, stable across processes."""
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.blake2b(payload.encode("utf-8"), digest_size=8).hexdigest()


def pillar_nominal_speed(config: GameConfig, index: int) -> float:
    """Speed of the pillar spawned `index`-th: compounding growth, capped."""
    speed = config.initial_pillar_speed * config.speed_growth_factor ** index
    if speed > config.speed_cap:
        speed = config.speed_cap
    return speed


def pillar_gap_height(config: GameConfig, index: int) -> float:
    """Gap of the pillar spawned `index`-th: additive growth, capped."""
    gap = config.initial_gap * (1.0 + config.gap_increment_fraction * index)
    if gap > config.gap_cap:
        gap = config.gap_cap
    return gap


@dataclass(frozen=True)
class LevelSpec:
    """Feature flags for one of the three levels.

    Level 1 is the control condition: bare gameplay, no score HUD, no
    heart-rate control.  Level 2 adds the score readout and the HR-driven
    speed reduction.  Level 3 keeps both and adds a target score that ends
    the session as a win.
    """

    level_id: int
    show_score: bool
    hr_adaptive: bool
    target_score: int | None = None

    _CANONICAL = {
        1: (False, False, False),
        2: (True, True, False),
        3: (True, True, True),
    }

    def __post_init__(self) -> None:
        if self.level_id not in self._CANONICAL:
            raise ConfigError(f"level_id must be 1, 2 or 3, got {self.level_id!r}")
        show, adaptive, has_target = self._CANONICAL[self.level_id]
        if (self.show_score, self.hr_adaptive) != (show, adaptive):
            raise ConfigError(
                f"level {self.level_id} requires show_score={show}, hr_adaptive={adaptive}"
            )
        if has_target:
            if self.target_score is None or self.target_score <= 0:
                raise ConfigError(
                    f"level {self.level_id} requires a positive target_score"
                )
        elif self.target_score is not None:
            raise ConfigError(f"level {self.level_id} does not take a target_score")

    @classmethod
    def level(cls, level_id: int, target_score: int = 30) -> "LevelSpec":
        """Canonical spec for a level number; level 3 defaults to target 30."""
        if level_id == 1:
            return cls(1, show_score=False, hr_adaptive=False)
        if level_id == 2:
            return cls(2, show_score=True, hr_adaptive=True)
        if level_id == 3:
            return cls(3, show_score=True, hr_adaptive=True, target_score=target_score)
        raise ConfigError(f"level_id must be 1, 2 or 3, got {level_id!r}")

    def to_dict(self) -> dict:
        return {
            "level_id": self.level_id,
            "show_score": self.show_score,
            "hr_adaptive": self.hr_adaptive,
            "target_score": self.target_score,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LevelSpec":
        return cls(
            level_id=d["level_id"],
            show_score=d["show_score"],
            hr_adaptive=d["hr_adaptive"],
            target_score=d.get("target_score"),
        )
