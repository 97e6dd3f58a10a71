"""One live game: kernel core + HR controller + event log, in lockstep.

Every host (network relay, headless runner, replayer) drives the world
through this class so the application order is identical everywhere:
heart-rate samples are folded into the controller right before the step
they precede, speed commands apply immediately, and events are logged at
the tick of the state they first influence.

Tick timeline: the core starts at tick 0 (Ready).  Baseline-phase samples
are logged at t=0.  The first step produces tick 1.  A sample applied
between steps is logged at ``current tick + 1``.
"""

from __future__ import annotations

import logging

from . import records
from .adaptation import (
    AdaptationState,
    BaselineCollector,
    BaselineIncompleteError,
    HrSample,
    SpeedCommand,
    is_plausible,
    new_adaptation_state,
    on_hr_sample,
)
from .engine import (
    SPEED_MULTIPLIERS,
    GameConfig,
    GameState,
    LevelSpec,
    core_state,
    make_core,
    state_hash,
)

logger = logging.getLogger(__name__)

__all__ = ["GameSession"]

# offer_hr outcomes
HR_BASELINE = "baseline"
HR_APPLIED = "applied"
HR_LOGGED = "logged"
HR_DROPPED_IMPLAUSIBLE = "dropped-implausible"
HR_DROPPED_STALE = "dropped-stale"
HR_DROPPED_ENDED = "dropped-ended"


class GameSession:
    """Authoritative state of a single session."""

    def __init__(
        self,
        config: GameConfig,
        level: LevelSpec,
        seed: int,
        session_id: str,
        writer: records.RecordWriter | None = None,
        hash_interval: int = records.DEFAULT_HASH_INTERVAL,
        pivot: float = 5.0,
        exit_margin: float = 0.0,
    ) -> None:
        self.config = config
        self.level = level
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.session_id = session_id
        self.writer = writer
        self.hash_interval = hash_interval
        self.pivot = pivot
        self.exit_margin = exit_margin

        self.core = make_core(config, level, self.seed)
        self.collector = BaselineCollector() if level.hr_adaptive else None
        self.adapt: AdaptationState | None = None
        self.applied_flaps = 0

    # -- status ----------------------------------------------------------

    @property
    def tick(self) -> int:
        return self.core.tick_no

    @property
    def ended(self) -> bool:
        return self.core.phase == 2

    @property
    def baseline_ready(self) -> bool:
        """True once gameplay may start (non-adaptive levels: immediately)."""
        return self.collector is None or self.adapt is not None

    @property
    def threshold_bpm(self) -> float | None:
        return self.adapt.threshold_bpm if self.adapt else None

    @property
    def baseline_bpm(self) -> float | None:
        return self.adapt.baseline_bpm if self.adapt else None

    @property
    def multiplier(self) -> float:
        return self.core.multiplier

    @property
    def score(self) -> int:
        return self.core.score

    # -- heart rate --------------------------------------------------------

    def offer_hr(self, bpm: float, timestamp_ms: int, source_id: str = "default") -> str:
        """Feed one sensor reading; returns what happened to it.

        Implausible readings are dropped before they can touch the
        baseline or the controller.  Readings on non-adaptive levels are
        logged (for analysis) but never change the game.
        """
        if self.ended:
            return HR_DROPPED_ENDED
        if not is_plausible(bpm):
            return HR_DROPPED_IMPLAUSIBLE

        if self.collector is not None and not self.collector.complete:
            self.collector.offer(bpm)
            self._log_hr(0, bpm, timestamp_ms, source_id)
            if self.collector.complete:
                self.adapt = new_adaptation_state(
                    self.collector.baseline(), self.pivot, self.exit_margin
                )
                logger.info(
                    "session %s baseline %.2f bpm, threshold %.2f bpm",
                    self.session_id,
                    self.adapt.baseline_bpm,
                    self.adapt.threshold_bpm,
                )
            return HR_BASELINE

        t = self.tick + 1
        if not self.level.hr_adaptive:
            self._log_hr(t if self.tick > 0 else 0, bpm, timestamp_ms, source_id)
            return HR_LOGGED

        assert self.adapt is not None
        sample = HrSample(timestamp_ms=timestamp_ms, bpm=bpm, source_id=source_id)
        a2, cmd = on_hr_sample(self.adapt, sample, self.level, tick=t)
        if a2 is self.adapt:  # unchanged object: the stale-sample path
            return HR_DROPPED_STALE
        self.adapt = a2
        self._log_hr(t, bpm, timestamp_ms, source_id)
        if cmd is not None:
            self._apply_command(cmd, t)
        return HR_APPLIED

    def _apply_command(self, cmd: SpeedCommand, t: int) -> None:
        if cmd.multiplier not in SPEED_MULTIPLIERS:
            raise ValueError(f"illegal speed command {cmd.multiplier!r}")
        self.core.set_multiplier(cmd.multiplier)
        last = self.adapt.events[-1]
        self._log(
            t,
            records.KIND_ADAPT,
            {"kind": last.kind, "bpm": last.bpm, "multiplier": cmd.multiplier},
        )

    # -- stepping ----------------------------------------------------------

    def step(self, flap: bool) -> int:
        """Advance one tick; logs the tap, periodic hashes, and the end."""
        if self.ended:
            return 0
        if not self.baseline_ready:
            raise BaselineIncompleteError(
                "session start blocked: baseline incomplete "
                f"({len(self.collector.values)}/{self.collector.needed} samples)"
            )
        t = self.tick + 1
        if flap:
            self._log(t, records.KIND_INPUT, {"flap": True})
            self.applied_flaps += 1
        events = self.core.tick(flap)
        if self.hash_interval > 0 and t % self.hash_interval == 0:
            self._log_hash(t)
        if self.ended:
            # the end always carries its own hash, even on a periodic tick
            self._log_hash(t)
            state = self.state()
            self._log(
                t,
                records.KIND_END,
                {
                    "reason": state.reason.value,
                    "duration_s": state.elapsed,
                    "final_score": state.score,
                },
            )
        return events

    # -- snapshots ----------------------------------------------------------

    def state(self) -> GameState:
        return core_state(self.core, self.config, self.level, self.seed)

    def hash(self) -> int:
        return state_hash(self.state())

    # -- logging ----------------------------------------------------------

    def _log(self, t: int, kind: str, payload: dict) -> None:
        if self.writer is not None:
            self.writer.append(t, kind, payload)

    def _log_hr(self, t: int, bpm: float, ts: int, source: str) -> None:
        self._log(t, records.KIND_HR, {"bpm": float(bpm), "ts": int(ts), "source": source})

    def _log_hash(self, t: int) -> None:
        self._log(t, records.KIND_STATE_HASH, {"hash": records.hash_to_hex(self.hash())})
