"""Questionnaire scoring and cardiac reactivity.

Two self-report instruments are scored: a 2x10-item affect schedule on a
1..5 scale (summed per subscale) and a player-experience inventory of 10
constructs x 3 items on a -3..3 agreement scale (averaged per construct).
The inventory ingests 30 or 33 items: items outside the construct map
(e.g. an enjoyment scale) are kept on the response but not scored.

Cardiac reactivity is the mean heart rate over a stressor window minus a
resting baseline; negative values are meaningful (heart rate can drop
below baseline during play).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

__all__ = [
    "PANAS_ITEMS_PER_SCALE",
    "PANAS_MIN",
    "PANAS_MAX",
    "PXI_CONSTRUCTS",
    "PXI_ITEMS_PER_CONSTRUCT",
    "PXI_MIN",
    "PXI_MAX",
    "PanasResponse",
    "PxiItem",
    "PxiResponse",
    "CrResult",
    "score_panas",
    "score_pxi",
    "cardiac_reactivity",
]

PANAS_ITEMS_PER_SCALE = 10
PANAS_MIN = 1
PANAS_MAX = 5

PXI_ITEMS_PER_CONSTRUCT = 3
PXI_MIN = -3
PXI_MAX = 3

# functional consequences first, then psychosocial
PXI_CONSTRUCTS = (
    "Ease of Control",
    "Challenge",
    "Progress Feedback",
    "Goals and Rules",
    "Audio-visual Appeal",
    "Meaning",
    "Immersion",
    "Mastery",
    "Curiosity",
    "Autonomy",
)


@dataclass(frozen=True)
class PanasResponse:
    """Two 10-item scales; every item an integer in [1, 5]."""

    positive_items: tuple[int, ...]
    negative_items: tuple[int, ...]

    def __post_init__(self) -> None:
        for name, items in (("positive", self.positive_items), ("negative", self.negative_items)):
            if len(items) != PANAS_ITEMS_PER_SCALE:
                raise ValueError(
                    f"{name} scale needs exactly {PANAS_ITEMS_PER_SCALE} items, got {len(items)}"
                )
            for i, v in enumerate(items, start=1):
                if not isinstance(v, int) or isinstance(v, bool) or not PANAS_MIN <= v <= PANAS_MAX:
                    raise ValueError(
                        f"{name} item {i} must be an integer in "
                        f"[{PANAS_MIN}, {PANAS_MAX}], got {v!r}"
                    )


def score_panas(r: PanasResponse) -> tuple[int, int]:
    """(positive affect, negative affect): plain sums, each in 10..50."""
    return sum(r.positive_items), sum(r.negative_items)


@dataclass(frozen=True)
class PxiItem:
    construct: str
    value: int

    def __post_init__(self) -> None:
        if not isinstance(self.value, int) or isinstance(self.value, bool):
            raise ValueError(f"item value must be an integer, got {self.value!r}")
        if not PXI_MIN <= self.value <= PXI_MAX:
            raise ValueError(
                f"item value for {self.construct!r} must be in "
                f"[{PXI_MIN}, {PXI_MAX}], got {self.value}"
            )


@dataclass(frozen=True)
class PxiResponse:
    """Inventory response: 3 items per known construct, extras tolerated."""

    items: tuple[PxiItem, ...]

    def __post_init__(self) -> None:
        counts: dict[str, int] = {}
        for item in self.items:
            counts[item.construct] = counts.get(item.construct, 0) + 1
        for construct in PXI_CONSTRUCTS:
            have = counts.get(construct, 0)
            if have != PXI_ITEMS_PER_CONSTRUCT:
                raise ValueError(
                    f"construct {construct!r} needs exactly "
                    f"{PXI_ITEMS_PER_CONSTRUCT} items, got {have}"
                )

    @property
    def extra_items(self) -> tuple[PxiItem, ...]:
        """Items outside the scored construct map (stored, unscored)."""
        return tuple(i for i in self.items if i.construct not in PXI_CONSTRUCTS)


def score_pxi(r: PxiResponse) -> dict[str, float]:
    """Per-construct arithmetic mean over its three items."""
    sums = {c: 0.0 for c in PXI_CONSTRUCTS}
    for item in r.items:
        if item.construct in sums:
            sums[item.construct] += item.value
    return {c: sums[c] / PXI_ITEMS_PER_CONSTRUCT for c in PXI_CONSTRUCTS}


@dataclass(frozen=True)
class CrResult:
    baseline_bpm: float
    stressor_mean_bpm: float
    reactivity_bpm: float

    def to_dict(self) -> dict:
        return {
            "baseline_bpm": self.baseline_bpm,
            "stressor_mean_bpm": self.stressor_mean_bpm,
            "reactivity_bpm": self.reactivity_bpm,
        }


def cardiac_reactivity(baseline: float, stressor_samples: Sequence[float]) -> CrResult:
    """Mean stressor heart rate minus baseline."""
    if not stressor_samples:
        raise ValueError("stressor window is empty: no heart-rate samples")
    mean = sum(stressor_samples) / len(stressor_samples)
    return CrResult(
        baseline_bpm=float(baseline),
        stressor_mean_bpm=mean,
        reactivity_bpm=mean - float(baseline),
    )
