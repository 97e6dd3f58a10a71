"""One-way repeated-measures ANOVA.

Within-subject design: n subjects each measured under k conditions.
Sphericity is assumed; no Greenhouse-Geisser correction is applied (the
study design this serves reports plain RM-ANOVA).

Sum-of-squares decomposition, all relative to the grand mean:

    SS_condition = n * sum_j (cond_mean_j - grand)^2
    SS_subject   = k * sum_i (subj_mean_i - grand)^2
    SS_total     = sum_ij (x_ij - grand)^2
    SS_error     = SS_total - SS_condition - SS_subject

    F = (SS_condition / (k-1)) / (SS_error / ((n-1)(k-1)))

Degenerate inputs are flagged rather than silently propagated: zero
condition variance yields F=0, p=1 ("constant-conditions"); zero error
variance with real condition variance yields p=0 ("degenerate-variance").
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .fdist import f_sf

__all__ = ["AnovaResult", "rm_anova"]

# SS magnitudes at or below this fraction of SS_total are floating-point zero
_REL_ZERO = 1e-14

FLAG_CONSTANT = "constant-conditions"
FLAG_DEGENERATE = "degenerate-variance"


@dataclass(frozen=True)
class AnovaResult:
    f_stat: float
    df_condition: int
    df_error: int
    p_value: float
    condition_means: tuple[float, ...]
    grand_mean: float
    ss_condition: float
    ss_subject: float
    ss_error: float
    ss_total: float
    flags: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "f_stat": self.f_stat,
            "df_condition": self.df_condition,
            "df_error": self.df_error,
            "p_value": self.p_value,
            "condition_means": list(self.condition_means),
            "grand_mean": self.grand_mean,
            "ss_condition": self.ss_condition,
            "ss_subject": self.ss_subject,
            "ss_error": self.ss_error,
            "ss_total": self.ss_total,
            "flags": list(self.flags),
        }


def rm_anova(data: Sequence[Sequence[float]]) -> AnovaResult:
    """Run the ANOVA on an n-subjects x k-conditions matrix.

    Requires n >= 2, k >= 2 and a complete matrix (no missing cells).
    """
    n = len(data)
    if n < 2:
        raise ValueError(f"need at least 2 subjects, got {n}")
    k = len(data[0])
    if k < 2:
        raise ValueError(f"need at least 2 conditions, got {k}")
    rows: list[list[float]] = []
    for i, row in enumerate(data):
        if len(row) != k:
            raise ValueError(f"subject {i} has {len(row)} cells, expected {k} (missing data?)")
        values = [float(v) for v in row]
        for j, v in enumerate(values):
            if not math.isfinite(v):
                raise ValueError(f"cell ({i}, {j}) is not finite: {v}")
        rows.append(values)

    nk = n * k
    grand = sum(sum(r) for r in rows) / nk
    cond_means = [sum(rows[i][j] for i in range(n)) / n for j in range(k)]
    subj_means = [sum(r) / k for r in rows]

    ss_condition = n * sum((m - grand) ** 2 for m in cond_means)
    ss_subject = k * sum((m - grand) ** 2 for m in subj_means)
    ss_total = sum((v - grand) ** 2 for r in rows for v in r)
    ss_error = ss_total - ss_condition - ss_subject

    df1 = k - 1
    df2 = (n - 1) * (k - 1)

    zero = _REL_ZERO * max(ss_total, 1.0)
    flags: list[str] = []
    if ss_condition <= zero:
        # no between-condition variance at all: F defined as 0
        flags.append(FLAG_CONSTANT)
        f_stat = 0.0
        p = 1.0
    elif ss_error <= zero:
        # perfect separation: report the limit rather than dividing by ~0
        flags.append(FLAG_DEGENERATE)
        f_stat = math.inf
        p = 0.0
    else:
        f_stat = (ss_condition / df1) / (ss_error / df2)
        p = f_sf(f_stat, df1, df2)

    return AnovaResult(
        f_stat=f_stat,
        df_condition=df1,
        df_error=df2,
        p_value=p,
        condition_means=tuple(cond_means),
        grand_mean=grand,
        ss_condition=ss_condition,
        ss_subject=ss_subject,
        ss_error=max(ss_error, 0.0),
        ss_total=ss_total,
        flags=tuple(flags),
    )
