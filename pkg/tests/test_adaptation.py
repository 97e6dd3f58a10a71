import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pulsebird.adaptation import (
    BREACH_ENTER,
    BREACH_EXIT,
    BaselineCollector,
    BaselineIncompleteError,
    HrSample,
    compute_baseline,
    is_plausible,
    make_threshold,
    new_adaptation_state,
    on_hr_sample,
)
from pulsebird.engine import LevelSpec

L1 = LevelSpec.level(1)
L2 = LevelSpec.level(2)


class TestBaseline:
    def test_mean_of_five(self):
        assert compute_baseline([72, 74, 73, 75, 76]) == 74.0

    def test_constant_input(self):
        assert compute_baseline([70, 70, 70, 70, 70]) == 70.0

    def test_needs_exactly_five(self):
        with pytest.raises(BaselineIncompleteError, match="baseline incomplete"):
            compute_baseline([70, 71, 72])
        with pytest.raises(BaselineIncompleteError):
            compute_baseline([70] * 6)

    def test_collector_gates_implausible_samples(self):
        collector = BaselineCollector()
        for bpm in [60, 300, 65, 70, 62]:
            collector.offer(bpm)
        assert not collector.complete  # 300 did not count
        collector.offer(63)
        assert collector.complete
        assert collector.baseline() == 64.0

    def test_collector_incomplete_blocks(self):
        collector = BaselineCollector()
        collector.offer(70)
        with pytest.raises(BaselineIncompleteError):
            collector.baseline()

    @pytest.mark.parametrize("bpm,ok", [(25, True), (250, True), (24.9, False), (250.1, False)])
    def test_plausibility_window_inclusive(self, bpm, ok):
        assert is_plausible(bpm) is ok


class TestThreshold:
    def test_pivot_rule(self):
        assert make_threshold(74.0, 5) == 79.0

    def test_zero_pivot(self):
        assert make_threshold(74.0, 0) == 74.0

    def test_default_pivot_is_five(self):
        assert make_threshold(100.0) == 105.0

    def test_baseline_must_be_plausible(self):
        with pytest.raises(ValueError):
            make_threshold(300.0)

    def test_state_invariant_enforced(self):
        a = new_adaptation_state(74.0)
        assert a.threshold_bpm == 79.0
        from pulsebird.adaptation import AdaptationState

        with pytest.raises(ValueError, match="baseline \\+ pivot"):
            AdaptationState(baseline_bpm=74.0, pivot=5.0, threshold_bpm=80.0)


def sample(bpm, ts=0, source="s"):
    return HrSample(timestamp_ms=ts, bpm=bpm, source_id=source)


class TestOnHrSample:
    def test_breach_enter_emits_reduction(self):
        a = new_adaptation_state(74.0)
        a2, cmd = on_hr_sample(a, sample(80.0), L2, tick=10)
        assert cmd is not None and cmd.multiplier == 0.7
        assert a2.above_threshold
        assert a2.breach_count == 1
        assert a2.events[-1].kind == BREACH_ENTER
        assert a2.events[-1].tick == 10

    def test_equal_to_threshold_does_not_trigger(self):
        a = new_adaptation_state(74.0)
        a2, cmd = on_hr_sample(a, sample(79.0), L2)
        assert cmd is None
        assert not a2.above_threshold

    def test_return_below_restores(self):
        a = new_adaptation_state(74.0)
        a, _ = on_hr_sample(a, sample(80.0, ts=1), L2)
        a2, cmd = on_hr_sample(a, sample(76.0, ts=2), L2)
        assert cmd is not None and cmd.multiplier == 1.0
        assert not a2.above_threshold
        assert a2.events[-1].kind == BREACH_EXIT

    def test_no_change_no_command(self):
        a = new_adaptation_state(74.0)
        a, cmd1 = on_hr_sample(a, sample(80.0, ts=1), L2)
        _, cmd2 = on_hr_sample(a, sample(85.0, ts=2), L2)
        assert cmd1 is not None and cmd2 is None

    def test_non_adaptive_level_unchanged(self):
        a = new_adaptation_state(74.0)
        a2, cmd = on_hr_sample(a, sample(120.0), L1)
        assert a2 is a
        assert cmd is None

    def test_stale_timestamp_discarded(self, caplog):
        a = new_adaptation_state(74.0)
        a, _ = on_hr_sample(a, sample(80.0, ts=100), L2)
        with caplog.at_level("WARNING"):
            a2, cmd = on_hr_sample(a, sample(70.0, ts=50), L2)
        assert a2 is a and cmd is None
        assert "stale" in caplog.text

    def test_equal_timestamp_accepted(self):
        a = new_adaptation_state(74.0)
        a, _ = on_hr_sample(a, sample(70.0, ts=100), L2)
        a2, _ = on_hr_sample(a, sample(71.0, ts=100), L2)
        assert a2.last_timestamp_ms == 100

    def test_exit_margin_hysteresis(self):
        a = new_adaptation_state(74.0, exit_margin=2.0)
        a, _ = on_hr_sample(a, sample(80.0, ts=1), L2)
        a, cmd = on_hr_sample(a, sample(78.0, ts=2), L2)  # <= 79 but > 77
        assert cmd is None and a.above_threshold
        a, cmd = on_hr_sample(a, sample(77.0, ts=3), L2)
        assert cmd is not None and cmd.multiplier == 1.0


@settings(max_examples=200, deadline=None)
@given(
    st.lists(
        st.floats(min_value=30.0, max_value=200.0, allow_nan=False),
        min_size=1,
        max_size=60,
    )
)
def test_events_strictly_alternate_and_count_matches(bpms):
    """Breach events alternate enter/exit starting with enter, breach_count
    counts enters, and above_threshold always reflects the last sample."""
    a = new_adaptation_state(74.0)
    for i, bpm in enumerate(bpms):
        a, cmd = on_hr_sample(a, sample(bpm, ts=i), L2, tick=i)
        assert a.above_threshold == (bpm > a.threshold_bpm)
        if cmd is not None:
            assert cmd.multiplier == (0.7 if a.above_threshold else 1.0)
    kinds = [e.kind for e in a.events]
    for i, kind in enumerate(kinds):
        assert kind == (BREACH_ENTER if i % 2 == 0 else BREACH_EXIT)
    assert a.breach_count == sum(1 for k in kinds if k == BREACH_ENTER)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(min_value=30.0, max_value=200.0, allow_nan=False), min_size=1, max_size=40)
)
def test_multiplier_is_pure_function_of_breach_state(bpms):
    """Replaying commands onto a multiplier always lands on 0.7 iff above
    threshold; reduction never compounds."""
    a = new_adaptation_state(74.0)
    multiplier = 1.0
    low_water = 1.0
    for i, bpm in enumerate(bpms):
        a, cmd = on_hr_sample(a, sample(bpm, ts=i), L2)
        if cmd is not None:
            multiplier = cmd.multiplier
        low_water = min(low_water, multiplier)
        assert multiplier == (0.7 if a.above_threshold else 1.0)
    assert low_water >= 0.7
