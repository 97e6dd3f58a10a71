"""Tick-kernel throughput measurement shared by the CLI and benchmarks/.

Workload: a bang-bang pilot holding the bird near the next gap on the
default config, restarting a fresh level-1 world whenever one ends, so
the measured loop exercises spawn, scoring, collision, and recycle paths
rather than an idle fall.
"""

from __future__ import annotations

import time

from .engine import GameConfig, LevelSpec, _config_values, _level_values
from .engine.simcore_py import PySimCore

__all__ = ["run_kernel_benchmark"]


def _drive(kernel_cls, ticks: int) -> float:
    config = GameConfig()
    cv, lv = _config_values(config), _level_values(LevelSpec.level(1))
    core = kernel_cls(cv, lv, 1)
    t0 = time.perf_counter()
    for i in range(ticks):
        if core.phase == 2:
            core = kernel_cls(cv, lv, i)
        gap = core.nearest_gap()
        target = gap[2] if gap is not None else config.world_height * 0.5
        core.tick(core.bird_y > target)
    return ticks / (time.perf_counter() - t0)


def run_kernel_benchmark(ticks: int = 200_000) -> list[dict]:
    """Measure each available backend; compiled first when present."""
    results = []
    try:
        from .engine._simcore import SimCore

        results.append(
            {"backend": "cython", "ticks": ticks, "ticks_per_second": _drive(SimCore, ticks)}
        )
    except ImportError:
        pass
    py_ticks = max(ticks // 4, 10_000)  # the interpreter needs a smaller bite
    results.append(
        {"backend": "python", "ticks": py_ticks, "ticks_per_second": _drive(PySimCore, py_ticks)}
    )
    return results
