import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pulsebird.analysis import (
    PXI_CONSTRUCTS,
    PanasResponse,
    PxiItem,
    PxiResponse,
    betainc_reg,
    cardiac_reactivity,
    f_sf,
    latin_square_orders,
    position_counts,
    rm_anova,
    score_panas,
    score_pxi,
)

# ---------------------------------------------------------------------------
# independent oracle: two-pass sum-of-squares computation, written plainly
# and kept free of any shared code with the implementation under test
# ---------------------------------------------------------------------------


def brute_force_rm_anova(matrix):
    n = len(matrix)
    k = len(matrix[0])
    total = 0.0
    for row in matrix:
        for v in row:
            total += v
    grand = total / (n * k)

    ss_cond = 0.0
    for j in range(k):
        s = 0.0
        for i in range(n):
            s += matrix[i][j]
        ss_cond += (s / n - grand) ** 2
    ss_cond *= n

    ss_subj = 0.0
    for i in range(n):
        s = 0.0
        for j in range(k):
            s += matrix[i][j]
        ss_subj += (s / k - grand) ** 2
    ss_subj *= k

    ss_total = 0.0
    for row in matrix:
        for v in row:
            ss_total += (v - grand) ** 2

    ss_err = ss_total - ss_cond - ss_subj
    df1 = k - 1
    df2 = (n - 1) * df1
    f = (ss_cond / df1) / (ss_err / df2)
    return f, ss_cond, ss_subj, ss_err, ss_total


class TestPanas:
    def test_scale_minimum(self):
        r = PanasResponse((1,) * 10, (1,) * 10)
        assert score_panas(r) == (10, 10)

    def test_scale_maximum(self):
        r = PanasResponse((5,) * 10, (5,) * 10)
        assert score_panas(r) == (50, 50)

    def test_sums(self):
        r = PanasResponse((3,) * 10, (2,) * 10)
        assert score_panas(r) == (30, 20)

    def test_wrong_count_names_scale(self):
        with pytest.raises(ValueError, match="positive scale needs exactly 10"):
            PanasResponse((3,) * 9, (2,) * 10)

    def test_out_of_range_names_item(self):
        with pytest.raises(ValueError, match="negative item 4"):
            PanasResponse((3,) * 10, (2, 2, 2, 6, 2, 2, 2, 2, 2, 2))

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(1, 5), min_size=10, max_size=10), st.randoms())
    def test_permutation_invariance(self, items, rng):
        shuffled = list(items)
        rng.shuffle(shuffled)
        a = score_panas(PanasResponse(tuple(items), tuple(reversed(items))))
        b = score_panas(PanasResponse(tuple(shuffled), tuple(reversed(items))))
        assert a == b


def pxi_items(values_by_construct):
    items = []
    for construct, values in values_by_construct.items():
        items.extend(PxiItem(construct, v) for v in values)
    return tuple(items)


def full_pxi(fill=0, overrides=None):
    values = {c: (fill, fill, fill) for c in PXI_CONSTRUCTS}
    values.update(overrides or {})
    return PxiResponse(pxi_items(values))


class TestPxi:
    def test_all_neutral(self):
        scores = score_pxi(full_pxi(0))
        assert all(v == 0.0 for v in scores.values())

    def test_construct_maximum(self):
        scores = score_pxi(full_pxi(0, {"Mastery": (3, 3, 3)}))
        assert scores["Mastery"] == 3.0

    def test_symmetric_mean(self):
        scores = score_pxi(full_pxi(0, {"Challenge": (-3, 0, 3)}))
        assert scores["Challenge"] == 0.0

    def test_missing_construct_rejected(self):
        values = {c: (0, 0, 0) for c in PXI_CONSTRUCTS if c != "Curiosity"}
        with pytest.raises(ValueError, match="Curiosity"):
            PxiResponse(pxi_items(values))

    def test_wrong_item_count_rejected(self):
        values = {c: (0, 0, 0) for c in PXI_CONSTRUCTS}
        values["Meaning"] = (0, 0)
        with pytest.raises(ValueError, match="Meaning"):
            PxiResponse(pxi_items(values))

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError, match="Immersion"):
            full_pxi(0, {"Immersion": (0, 0, 4)})

    def test_thirty_three_items_tolerated_but_unscored(self):
        items = pxi_items({c: (1, 1, 1) for c in PXI_CONSTRUCTS})
        items += (PxiItem("Enjoyment", 3), PxiItem("Enjoyment", 2), PxiItem("Enjoyment", 3))
        r = PxiResponse(items)
        assert len(r.items) == 33
        assert len(r.extra_items) == 3
        scores = score_pxi(r)
        assert set(scores) == set(PXI_CONSTRUCTS)  # enjoyment stored, not scored

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(-3, 3), min_size=3, max_size=3), st.randoms())
    def test_within_construct_permutation_invariance(self, triple, rng):
        shuffled = list(triple)
        rng.shuffle(shuffled)
        a = score_pxi(full_pxi(0, {"Autonomy": tuple(triple)}))
        b = score_pxi(full_pxi(0, {"Autonomy": tuple(shuffled)}))
        assert a == b


class TestCardiacReactivity:
    def test_null_reactivity(self):
        assert cardiac_reactivity(74.0, [74.0, 74.0, 74.0]).reactivity_bpm == 0.0

    def test_positive(self):
        assert cardiac_reactivity(74.0, [84.0] * 5).reactivity_bpm == 10.0

    def test_negative_permitted(self):
        assert cardiac_reactivity(74.0, [70.0, 72.0, 74.0]).reactivity_bpm == -2.0

    def test_empty_window_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            cardiac_reactivity(74.0, [])

    @settings(max_examples=100, deadline=None)
    @given(
        st.floats(30, 200),
        st.lists(st.floats(30, 200), min_size=1, max_size=30),
        st.floats(-50, 50),
    )
    def test_translation_equivariance(self, baseline, samples, c):
        base = cardiac_reactivity(baseline, samples).reactivity_bpm
        shifted = cardiac_reactivity(baseline + c, [s + c for s in samples]).reactivity_bpm
        assert shifted == pytest.approx(base, abs=1e-9)


class TestRmAnova:
    # fixture matrix with oracle values frozen from an exact-rational
    # two-pass computation plus high-resolution quadrature of the F density
    FIXTURE = [
        [31, 27, 34],
        [25, 26, 30],
        [29, 28, 28],
        [23, 27, 29],
    ]
    FIXTURE_F = 2.8324022346368714  # 507/179
    FIXTURE_P = 0.13608847928559172

    def test_fixture_matches_independent_oracle(self):
        r = rm_anova(self.FIXTURE)
        assert r.f_stat == pytest.approx(self.FIXTURE_F, rel=1e-6)
        assert r.p_value == pytest.approx(self.FIXTURE_P, rel=1e-6)
        assert r.df_condition == 2
        assert r.df_error == 6
        assert r.condition_means == pytest.approx((27.0, 27.0, 30.25))

    def test_random_matrices_match_brute_force(self):
        rng = random.Random(31337)
        for _ in range(200):
            n = rng.randint(2, 10)
            k = rng.randint(2, 5)
            matrix = [[rng.uniform(-50, 50) for _ in range(k)] for _ in range(n)]
            want_f, ssc, sss, sse, sst = brute_force_rm_anova(matrix)
            r = rm_anova(matrix)
            assert r.f_stat == pytest.approx(want_f, rel=1e-6)
            assert r.ss_condition + r.ss_subject + r.ss_error == pytest.approx(
                r.ss_total, rel=1e-9
            )
            assert r.ss_condition == pytest.approx(ssc, rel=1e-9, abs=1e-9)

    def test_rows_constant_gives_f_zero_p_one(self):
        r = rm_anova([[4, 4, 4], [9, 9, 9], [2, 2, 2]])
        assert (r.f_stat, r.p_value) == (0.0, 1.0)
        assert "constant-conditions" in r.flags

    def test_all_constant_gives_f_zero_p_one(self):
        r = rm_anova([[5, 5], [5, 5]])
        assert (r.f_stat, r.p_value) == (0.0, 1.0)

    def test_zero_error_variance_flags_degenerate(self):
        # perfectly consistent condition effect across subjects
        r = rm_anova([[1, 2, 3], [11, 12, 13], [21, 22, 23]])
        assert r.p_value == 0.0
        assert math.isinf(r.f_stat)
        assert "degenerate-variance" in r.flags

    def test_scale_invariance(self):
        base = rm_anova(self.FIXTURE)
        for c in (0.001, 3.7, 1000.0):
            scaled = rm_anova([[v * c for v in row] for row in self.FIXTURE])
            assert scaled.f_stat == pytest.approx(base.f_stat, rel=1e-9)
            assert scaled.p_value == pytest.approx(base.p_value, rel=1e-9)

    def test_shape_validation(self):
        with pytest.raises(ValueError, match="2 subjects"):
            rm_anova([[1, 2]])
        with pytest.raises(ValueError, match="2 conditions"):
            rm_anova([[1], [2]])
        with pytest.raises(ValueError, match="missing"):
            rm_anova([[1, 2, 3], [1, 2]])
        with pytest.raises(ValueError, match="finite"):
            rm_anova([[1, 2], [float("nan"), 3]])


class TestFDistribution:
    def test_p_of_zero_is_one(self):
        assert f_sf(0.0, 2, 48) == 1.0

    def test_p_strictly_decreasing_in_f(self):
        ps = [f_sf(f, 2, 48) for f in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0]]
        for a, b in zip(ps, ps[1:]):
            assert b < a
        assert all(0.0 <= p <= 1.0 for p in ps)

    def test_closed_form_for_two_numerator_dof(self):
        # for df1=2 the survival function reduces to (1 + 2f/d2)^(-d2/2)
        for f in (0.5, 2.85, 3.87, 4.491, 10.0):
            closed = (1.0 + 2.0 * f / 48.0) ** (-24.0)
            assert f_sf(f, 2, 48) == pytest.approx(closed, rel=1e-10)

    def test_betainc_against_scipy(self):
        scipy_special = pytest.importorskip("scipy.special")
        rng = random.Random(0)
        for _ in range(500):
            a = rng.uniform(0.3, 60)
            b = rng.uniform(0.3, 60)
            x = rng.random()
            assert betainc_reg(a, b, x) == pytest.approx(
                float(scipy_special.betainc(a, b, x)), abs=1e-11
            )

    def test_f_sf_against_scipy(self):
        scipy_stats = pytest.importorskip("scipy.stats")
        rng = random.Random(1)
        for _ in range(200):
            d1 = rng.randint(1, 20)
            d2 = rng.randint(2, 120)
            f = rng.uniform(0.0, 30.0)
            assert f_sf(f, d1, d2) == pytest.approx(
                float(scipy_stats.f.sf(f, d1, d2)), rel=1e-9, abs=1e-12
            )

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            f_sf(-1.0, 2, 48)
        with pytest.raises(ValueError):
            f_sf(1.0, 0, 48)
        with pytest.raises(ValueError):
            betainc_reg(1.0, 1.0, 1.5)


class TestLatinSquare:
    def test_k3_n3_perfect_balance(self):
        orders = latin_square_orders(3, 3)
        assert orders == [[1, 2, 3], [2, 3, 1], [3, 1, 2]]
        counts = position_counts(orders)
        assert all(c == 1 for per in counts.values() for c in per.values())

    def test_k2_n4_alternates(self):
        assert latin_square_orders(2, 4, labels=["A", "B"]) == [
            ["A", "B"], ["B", "A"], ["A", "B"], ["B", "A"],
        ]

    def test_k3_n25_counts_within_one(self):
        counts = position_counts(latin_square_orders(3, 25))
        flat = [c for per in counts.values() for c in per.values()]
        assert set(flat) <= {8, 9}
        assert sum(flat) == 75

    def test_every_order_is_a_permutation(self):
        for k in (2, 3, 4, 7):
            for order in latin_square_orders(k, 3 * k + 1):
                assert sorted(order) == list(range(1, k + 1))

    def test_validation(self):
        with pytest.raises(ValueError):
            latin_square_orders(1, 5)
        with pytest.raises(ValueError):
            latin_square_orders(3, 0)
        with pytest.raises(ValueError):
            latin_square_orders(3, 5, labels=["a"])
