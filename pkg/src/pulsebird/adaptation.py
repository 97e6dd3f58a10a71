"""Heart-rate difficulty controller.

Baseline is the mean of the first five plausible samples taken before
gameplay; threshold is baseline plus a pivot (default +5 bpm).  While the
latest accepted sample is strictly above the threshold the game runs at
70% of nominal pillar speed; at or below it (minus an optional exit
margin) the speed is restored.  The reduction is level-triggered, so it
never compounds: the multiplier is a pure function of the breach state.

Everything here is a pure state transition; the owning game loop applies
the returned commands serially.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Sequence

from .engine import LevelSpec

logger = logging.getLogger(__name__)

__all__ = [
    "BPM_MIN",
    "BPM_MAX",
    "DEFAULT_PIVOT",
    "BASELINE_SAMPLE_COUNT",
    "REDUCED_MULTIPLIER",
    "HrSample",
    "AdaptEvent",
    "SpeedCommand",
    "AdaptationState",
    "BaselineCollector",
    "BaselineIncompleteError",
    "is_plausible",
    "compute_baseline",
    "make_threshold",
    "new_adaptation_state",
    "on_hr_sample",
]

# physiological plausibility gate, inclusive
BPM_MIN = 25.0
BPM_MAX = 250.0

DEFAULT_PIVOT = 5.0
BASELINE_SAMPLE_COUNT = 5

#: pillar speed while the heart rate is above threshold: nominal minus 30%
REDUCED_MULTIPLIER = 0.7

BREACH_ENTER = "breach_enter"
BREACH_EXIT = "breach_exit"


class BaselineIncompleteError(ValueError):
    """Session start was attempted before the baseline window filled."""


def is_plausible(bpm: float) -> bool:
    return BPM_MIN <= bpm <= BPM_MAX


@dataclass(frozen=True)
class HrSample:
    """One heart-rate reading, timestamped on the session clock."""

    timestamp_ms: int
    bpm: float
    source_id: str = "default"


@dataclass(frozen=True)
class AdaptEvent:
    """A threshold crossing: enter when HR goes strictly above, exit on return."""

    tick: int
    kind: str  # BREACH_ENTER | BREACH_EXIT
    bpm: float


@dataclass(frozen=True)
class SpeedCommand:
    """Instruction to the game core; multiplier is 0.7 or 1.0."""

    multiplier: float


def compute_baseline(samples: Sequence[HrSample | float]) -> float:
    """Mean bpm of exactly five plausible pre-gameplay samples."""
    values = [s.bpm if isinstance(s, HrSample) else float(s) for s in samples]
    if len(values) != BASELINE_SAMPLE_COUNT:
        raise BaselineIncompleteError(
            f"baseline incomplete: need {BASELINE_SAMPLE_COUNT} samples, have {len(values)}"
        )
    for v in values:
        if not is_plausible(v):
            raise ValueError(f"bpm {v} outside plausibility window [{BPM_MIN}, {BPM_MAX}]")
    return sum(values) / BASELINE_SAMPLE_COUNT


def make_threshold(baseline: float, pivot: float = DEFAULT_PIVOT) -> float:
    """Threshold above which the difficulty is reduced: baseline + pivot."""
    if not is_plausible(baseline):
        raise ValueError(f"baseline {baseline} outside plausibility window [{BPM_MIN}, {BPM_MAX}]")
    return baseline + pivot


class BaselineCollector:
    """Gathers the pre-gameplay baseline window.

    Implausible samples are rejected and do not count toward the window;
    the next plausible sample fills the slot.
    """

    def __init__(self, needed: int = BASELINE_SAMPLE_COUNT) -> None:
        self.needed = needed
        self.values: list[float] = []

    def offer(self, bpm: float) -> bool:
        """Returns True when the sample was accepted into the window."""
        if self.complete or not is_plausible(bpm):
            return False
        self.values.append(float(bpm))
        return True

    @property
    def complete(self) -> bool:
        return len(self.values) >= self.needed

    def baseline(self) -> float:
        if not self.complete:
            raise BaselineIncompleteError(
                f"baseline incomplete: need {self.needed} samples, have {len(self.values)}"
            )
        return compute_baseline(self.values[: self.needed])


@dataclass(frozen=True)
class AdaptationState:
    """Controller state between samples.

    ``threshold_bpm`` is always exactly ``baseline_bpm + pivot``;
    ``above_threshold`` reflects the last accepted sample.  ``exit_margin``
    is an optional hysteresis band (0 by default: exit at bpm <= threshold).
    """

    baseline_bpm: float
    pivot: float = DEFAULT_PIVOT
    threshold_bpm: float = 0.0
    above_threshold: bool = False
    breach_count: int = 0
    events: tuple[AdaptEvent, ...] = ()
    last_timestamp_ms: int | None = None
    exit_margin: float = 0.0

    def __post_init__(self) -> None:
        expected = self.baseline_bpm + self.pivot
        if self.threshold_bpm != expected:
            raise ValueError(
                f"threshold_bpm must equal baseline + pivot = {expected}, got {self.threshold_bpm}"
            )


def new_adaptation_state(
    baseline: float, pivot: float = DEFAULT_PIVOT, exit_margin: float = 0.0
) -> AdaptationState:
    return AdaptationState(
        baseline_bpm=baseline,
        pivot=pivot,
        threshold_bpm=make_threshold(baseline, pivot),
        exit_margin=exit_margin,
    )


def on_hr_sample(
    a: AdaptationState,
    s: HrSample,
    level: LevelSpec,
    tick: int = 0,
) -> tuple[AdaptationState, SpeedCommand | None]:
    """Fold one sample into the controller.

    Non-adaptive levels ignore heart rate entirely.  "Goes over" is
    strict: a sample equal to the threshold does not trigger.  Samples
    older than the last accepted one are discarded with a warning.
    ``tick`` stamps any breach event with the game tick it takes effect.
    """
    if not level.hr_adaptive:
        return a, None
    if a.last_timestamp_ms is not None and s.timestamp_ms < a.last_timestamp_ms:
        logger.warning(
            "discarding stale HR sample: ts %d < last accepted %d (source=%s)",
            s.timestamp_ms,
            a.last_timestamp_ms,
            s.source_id,
        )
        return a, None
    if not is_plausible(s.bpm):
        logger.warning("discarding implausible HR sample: %.1f bpm", s.bpm)
        return a, None

    if s.bpm > a.threshold_bpm and not a.above_threshold:
        event = AdaptEvent(tick=tick, kind=BREACH_ENTER, bpm=s.bpm)
        a2 = replace(
            a,
            above_threshold=True,
            breach_count=a.breach_count + 1,
            events=a.events + (event,),
            last_timestamp_ms=s.timestamp_ms,
        )
        return a2, SpeedCommand(REDUCED_MULTIPLIER)
    if s.bpm <= a.threshold_bpm - a.exit_margin and a.above_threshold:
        event = AdaptEvent(tick=tick, kind=BREACH_EXIT, bpm=s.bpm)
        a2 = replace(
            a,
            above_threshold=False,
            events=a.events + (event,),
            last_timestamp_ms=s.timestamp_ms,
        )
        return a2, SpeedCommand(1.0)
    return replace(a, last_timestamp_ms=s.timestamp_ms), None
