"""Stateless gap placement.

Each pillar's gap position is a pure function of (session seed, pillar
index), so stepping needs no evolving RNG state and any snapshot can be
resumed bit-exactly.  The draw is the splitmix64 output stream: output i
is the finalizer applied to ``seed + (i+1) * GOLDEN`` (mod 2^64), mapped
to [0, 1) by taking the top 53 bits.

The compiled kernel carries a C copy of this function; the two must stay
arithmetically identical (integer ops mod 2^64, one exact float multiply).
"""

from __future__ import annotations

__all__ = ["gap_unit", "splitmix64_mix"]

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_TO_UNIT = 2.0 ** -53


def splitmix64_mix(z: int) -> int:
    """splitmix64 finalizer over one 64-bit word."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def gap_unit(seed: int, index: int) -> float:
    """Deterministic draw in [0, 1) for pillar `index` of session `seed`."""
    z = (seed + (index + 1) * _GOLDEN) & _MASK
    return (splitmix64_mix(z) >> 11) * _TO_UNIT
