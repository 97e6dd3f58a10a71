import pytest

from pulsebird.engine import GameConfig, LevelSpec


@pytest.fixture
def config() -> GameConfig:
    return GameConfig()


@pytest.fixture
def level1() -> LevelSpec:
    return LevelSpec.level(1)


@pytest.fixture
def level2() -> LevelSpec:
    return LevelSpec.level(2)


@pytest.fixture
def level3() -> LevelSpec:
    return LevelSpec.level(3)


@pytest.fixture
def becalmed_config() -> GameConfig:
    """A world where the bird survives for minutes without input: feeble
    gravity, near-total gap coverage, crawling pillars.  Used by tests
    that need a session to stay alive while something else is measured."""
    return GameConfig(
        gravity=0.2,
        flap_impulse=5.0,
        initial_gap=600.0,
        gap_cap=620.0,
        initial_pillar_speed=40.0,
        speed_cap=100.0,
        pushback_speed=1.0,
    )
