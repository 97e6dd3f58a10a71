"""pulsebird: heart-rate-adaptive arcade game platform.

Server-authoritative tap-to-fly game with heart-rate-driven difficulty,
deterministic session recording/replay, synthetic HR and bot players for
headless testing, and an experiment analysis toolchain.
"""

__version__ = "0.1.0"
