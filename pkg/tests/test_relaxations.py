import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from didbounds import (
    DonorPanel,
    PanelDataset,
    discordancy_report,
    mills_alpha,
    rr_relative_magnitude_sb1,
    rr_smoothness_sb1,
    sc_bounds,
)
from didbounds.errors import EmptyDonorPool, MissingPeriod, NegativeM

A1, A0 = mills_alpha(1.0)
GAP = A1 - A0
SB0, SBM1 = GAP, 3 * GAP  # the dip design's two pre-period biases


def donor_panel(thetas, gaps, treated_post=10.0, treated_pre=5.0):
    """Donor series chosen so donor j has post contrast thetas[j] and
    baseline gap gaps[j]."""
    donors = {
        f"d{j}": {0: treated_pre - gaps[j], 1: treated_post - thetas[j]}
        for j in range(len(thetas))
    }
    return DonorPanel(treated={0: treated_pre, 1: treated_post},
                      donors=donors, pre_periods=(0,), post_period=1)


class TestScBounds:
    def test_three_donor_arithmetic(self):
        dp = donor_panel(thetas=[5.0, 6.0, 7.0], gaps=[1.0, 2.0, 3.0])
        iv = sc_bounds(dp)
        assert (iv.lower, iv.upper) == (2.0, 6.0)

    def test_identical_donors_single_donor_bounds(self):
        dp = donor_panel(thetas=[4.0, 4.0, 4.0], gaps=[1.5, 1.5, 1.5])
        iv = sc_bounds(dp)
        single = sc_bounds(donor_panel(thetas=[4.0], gaps=[1.5]))
        assert (iv.lower, iv.upper) == (single.lower, single.upper)
        assert iv.width == pytest.approx(0.0)

    def test_relabeling_invariance(self):
        dp1 = donor_panel(thetas=[1.0, 3.0], gaps=[0.5, -0.5])
        dp2 = donor_panel(thetas=[3.0, 1.0], gaps=[-0.5, 0.5])
        a, b = sc_bounds(dp1), sc_bounds(dp2)
        assert (a.lower, a.upper) == (b.lower, b.upper)

    def test_adding_donor_never_shrinks(self):
        rng = np.random.default_rng(0)
        for _ in range(30):
            k = int(rng.integers(1, 6))
            thetas = list(rng.normal(size=k) * 3)
            gaps = list(rng.normal(size=k))
            base = sc_bounds(donor_panel(thetas, gaps))
            grown = sc_bounds(donor_panel(thetas + [float(rng.normal() * 3)],
                                          gaps + [float(rng.normal())]))
            assert grown.lower <= base.lower + 1e-12
            assert grown.upper >= base.upper - 1e-12

    def test_factor_design_covers_truth(self):
        # two donors with convex weights (0.5, 0.5) generating the
        # treated counterfactual; bounds must cover the true effect
        rng = np.random.default_rng(1)
        n = 100_000
        att = 2.0
        U = rng.standard_normal(n)
        D = (U >= 1.0).astype(int)
        donor_a = 1.0 + 0.8 * U + rng.standard_normal(n) * 0.3
        donor_b = -0.5 + 1.2 * U + rng.standard_normal(n) * 0.3
        y1_0 = 0.5 * donor_a + 0.5 * donor_b
        y1 = y1_0 + att * D
        y0 = 0.25 + 1.0 * U + rng.standard_normal(n) * 0.3
        rows_treated = D == 1
        treated = {
            0: float(y0[rows_treated].mean()),
            1: float(y1[rows_treated].mean()),
        }
        donors = {
            "a": {0: float((1.0 + 0.8 * U + 0.3 * rng.standard_normal(n))[~rows_treated].mean()),
                  1: float(donor_a[~rows_treated].mean())},
            "b": {0: float((-0.5 + 1.2 * U + 0.3 * rng.standard_normal(n))[~rows_treated].mean()),
                  1: float(donor_b[~rows_treated].mean())},
        }
        dp = DonorPanel(treated=treated, donors=donors, pre_periods=(0,),
                        post_period=1)
        iv = sc_bounds(dp)
        assert iv.lower - 0.05 <= att <= iv.upper + 0.05

    def test_from_panel_aggregation(self):
        ds = PanelDataset(
            unit=["t", "t", "a", "a", "b", "b"],
            period=[0, 1] * 3,
            outcome=[5.0, 10.0, 4.0, 5.0, 3.0, 3.0],
            treated=[1, 1, 0, 0, 0, 0],
            treatment_scheme="donor_pool",
        )
        dp = DonorPanel.from_panel(ds)
        assert dp.treated == {0: 5.0, 1: 10.0}
        assert dp.donors["a"] == {0: 4.0, 1: 5.0}
        iv = sc_bounds(dp)
        # thetas {a: 5, b: 7}; gaps {a: 1, b: 2}
        assert (iv.lower, iv.upper) == (3.0, 6.0)

    def test_errors(self):
        dp = donor_panel(thetas=[1.0], gaps=[0.0])
        with pytest.raises(MissingPeriod):
            sc_bounds(dp, info_periods=[-1])
        with pytest.raises(EmptyDonorPool):
            DonorPanel(treated={0: 1.0, 1: 2.0}, donors={},
                       pre_periods=(0,), post_period=1)
        with pytest.raises(MissingPeriod):
            DonorPanel(treated={1: 2.0}, donors={"a": {0: 1.0, 1: 1.0}},
                       pre_periods=(0,), post_period=1)


class TestRrSmoothness:
    def test_zero_m_point_continuation(self):
        rr = rr_smoothness_sb1(SBM1, SB0, 0.0)
        assert rr.lower == rr.upper == pytest.approx(2 * SB0 - SBM1)
        assert rr.lower == pytest.approx(-1.813, abs=5e-4)

    def test_equal_biases_zero_m_is_pt_point(self):
        rr = rr_smoothness_sb1(1.4, 1.4, 0.0)
        assert rr.lower == rr.upper == pytest.approx(1.4)

    def test_width_exactly_2m(self):
        for m in (0.0, 0.7, 7.251):
            rr = rr_smoothness_sb1(SBM1, SB0, m)
            assert rr.width == pytest.approx(2 * m, abs=1e-12)

    def test_tightness_crossover_at_2x_gap(self):
        # the hull is strictly tighter once M exceeds twice
        # the observed change, never tighter below it
        change = abs(SB0 - SBM1)
        hull_width = change
        for m in (2 * change + 0.01, 3 * change):
            assert rr_smoothness_sb1(SBM1, SB0, m).width > hull_width
        m = 2 * change
        rr = rr_smoothness_sb1(SBM1, SB0, m)
        assert rr.width == pytest.approx(2 * m)
        # at the crossover the restriction interval contains the hull
        assert rr.lower <= min(SB0, SBM1)
        assert rr.upper >= max(SB0, SBM1)

    def test_negative_m(self):
        with pytest.raises(NegativeM):
            rr_smoothness_sb1(1.0, 2.0, -0.1)


class TestRrRelativeMagnitude:
    def test_zero_mbar_is_baseline_point(self):
        rr = rr_relative_magnitude_sb1(SBM1, SB0, 0.0)
        assert rr.lower == rr.upper == pytest.approx(SB0)

    def test_unit_mbar_from_dip_constants(self):
        rr = rr_relative_magnitude_sb1(SBM1, SB0, 1.0)
        assert rr.lower == pytest.approx(-1.813, abs=5e-4)
        assert rr.upper == pytest.approx(5.438, abs=5e-4)

    def test_width_formula(self):
        for mbar in (0.0, 0.5, 2.0):
            rr = rr_relative_magnitude_sb1(SBM1, SB0, mbar)
            assert rr.width == pytest.approx(2 * mbar * abs(SBM1 - SB0),
                                             abs=1e-12)

    def test_hull_strictly_inside_for_mbar_above_one(self):
        lo, hi = min(SB0, SBM1), max(SB0, SBM1)
        for mbar in (1.01, 2.0, 10.0):
            rr = rr_relative_magnitude_sb1(SBM1, SB0, mbar)
            assert rr.lower < lo and hi < rr.upper

    def test_negative_mbar(self):
        with pytest.raises(NegativeM):
            rr_relative_magnitude_sb1(1.0, 2.0, -1e-9)


class TestDiscordancy:
    def test_smoothness_empty_below_observed_change(self):
        ours = (min(SB0, SBM1), max(SB0, SBM1))
        rr = rr_smoothness_sb1(SBM1, SB0, 1.0)  # 1 < |gap change| = 3.625
        report = discordancy_report(ours, rr)
        assert not report.overlap
        assert report.intersection is None
        assert "should not be used" in report.warning

    def test_smoothness_overlap_above_threshold(self):
        ours = (min(SB0, SBM1), max(SB0, SBM1))
        rr = rr_smoothness_sb1(SBM1, SB0, abs(SB0 - SBM1) + 0.01)
        report = discordancy_report(ours, rr)
        assert report.overlap
        assert report.warning is None

    def test_relative_magnitude_always_overlaps(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            sbm1, sb0 = rng.normal(size=2) * 10
            mbar = float(rng.uniform(0, 5))
            ours = (min(sbm1, sb0), max(sbm1, sb0))
            rr = rr_relative_magnitude_sb1(sbm1, sb0, mbar)
            assert discordancy_report(ours, rr).overlap

    def test_identical_intervals(self):
        rr = rr_relative_magnitude_sb1(3.0, 1.0, 1.0)  # [-1, 3]
        report = discordancy_report((-1.0, 3.0), rr)
        assert report.overlap
        assert report.intersection == (-1.0, 3.0)


# ---------------------------------------------------------------------------
# flag algebra over randomized inputs
# ---------------------------------------------------------------------------

finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(finite, finite, st.floats(0, 1e6, allow_nan=False))
@settings(max_examples=200, deadline=None)
def test_smoothness_discordant_iff_m_below_change(sbm1, sb0, m):
    change = abs(sb0 - sbm1)
    scale = max(1.0, abs(sb0), abs(sbm1), m)
    if abs(m - change) <= 1e-9 * scale:
        return  # the touching boundary is rounding-order dependent
    ours = (min(sbm1, sb0), max(sbm1, sb0))
    report = discordancy_report(ours, rr_smoothness_sb1(sbm1, sb0, m))
    assert report.overlap == (m >= change)


@given(finite, finite, st.floats(0, 1e6, allow_nan=False))
@settings(max_examples=200, deadline=None)
def test_relative_magnitude_never_discordant(sbm1, sb0, mbar):
    ours = (min(sbm1, sb0), max(sbm1, sb0))
    report = discordancy_report(
        ours, rr_relative_magnitude_sb1(sbm1, sb0, mbar)
    )
    assert report.overlap


@given(finite, finite)
@settings(max_examples=100, deadline=None)
def test_equal_biases_all_sets_collapse_to_point(sb0, _unused):
    rr_sd = rr_smoothness_sb1(sb0, sb0, 0.0)
    rr_rm = rr_relative_magnitude_sb1(sb0, sb0, 0.0)
    assert rr_sd.lower == rr_sd.upper == sb0
    assert rr_rm.lower == rr_rm.upper == sb0
