"""Latin-square counterbalancing of condition order across participants.

A cyclic k x k Latin square has row r = (r, r+1, ..., r+k-1) mod k; each
condition occupies each serial position exactly once per block of k
participants.  Cycling rows across n participants keeps per-position
counts within one of each other (floor(n/k) or ceil(n/k)).
"""

from __future__ import annotations

from typing import Sequence

__all__ = ["latin_square_orders", "position_counts"]


def latin_square_orders(k: int, n: int, labels: Sequence | None = None) -> list[list]:
    """Condition orderings for n participants over k conditions.

    Labels default to condition numbers 1..k.
    """
    if k < 2:
        raise ValueError(f"need at least 2 conditions, got {k}")
    if n < 1:
        raise ValueError(f"need at least 1 participant, got {n}")
    if labels is None:
        labels = list(range(1, k + 1))
    elif len(labels) != k:
        raise ValueError(f"got {len(labels)} labels for {k} conditions")
    return [[labels[(p + j) % k] for j in range(k)] for p in range(n)]


def position_counts(orders: Sequence[Sequence]) -> dict:
    """How often each condition lands in each serial position."""
    counts: dict = {}
    for order in orders:
        for pos, condition in enumerate(order):
            counts.setdefault(condition, {})
            counts[condition][pos] = counts[condition].get(pos, 0) + 1
    return counts
