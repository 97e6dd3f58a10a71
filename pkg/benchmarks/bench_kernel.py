#!/usr/bin/env python3
"""Compare compiled vs pure-Python tick kernel throughput.

Usage: python benchmarks/bench_kernel.py [ticks]
"""

import sys

from pulsebird.benchmark import run_kernel_benchmark
from pulsebird.engine import kernel_backend


def main() -> None:
    ticks = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    results = run_kernel_benchmark(ticks)
    print(f"active backend: {kernel_backend()}")
    for r in results:
        print(f"{r['backend']:<8} {r['ticks_per_second']:>12,.0f} ticks/s ({r['ticks']} ticks)")
    if len(results) == 2:
        print(f"speedup: {results[0]['ticks_per_second'] / results[1]['ticks_per_second']:.1f}x")


if __name__ == "__main__":
    main()
