import numpy as np
import pytest

from didbounds import (
    BootstrapPlan,
    DgpSpec,
    InformationSet,
    PanelDataset,
    bootstrap_estimates,
    gdid_bounds,
    gdid_confidence_bounds,
    simulate,
    theta_ols,
    union_confidence_bounds,
)
from didbounds.bounds import bias_set
from didbounds.errors import (
    EmptyCell,
    InsufficientReplicates,
    TooManyFailedReplicates,
)

from conftest import make_panel


def iid_panel(n=500, seed=0):
    rng = np.random.default_rng(seed)
    y = rng.normal(size=n)
    return PanelDataset(unit=np.arange(n), period=np.zeros(n, int),
                        outcome=y, treated=np.ones(n, int), post_period=0), y


class TestBootstrapEstimates:
    def test_deterministic_given_plan(self, small_panel):
        plan = BootstrapPlan(replicates=25, seed=99)
        est = lambda d: [theta_ols(d)]
        a = bootstrap_estimates(small_panel, est, plan)
        b = bootstrap_estimates(small_panel, est, plan)
        assert np.array_equal(a.estimates, b.estimates)

    def test_different_seeds_differ(self, small_panel):
        est = lambda d: [theta_ols(d)]
        a = bootstrap_estimates(small_panel, est,
                                BootstrapPlan(replicates=10, seed=1))
        b = bootstrap_estimates(small_panel, est,
                                BootstrapPlan(replicates=10, seed=2))
        assert not np.array_equal(a.estimates, b.estimates)

    def test_sd_matches_closed_form(self):
        ds, y = iid_panel(n=500, seed=3)
        plan = BootstrapPlan(replicates=2000, seed=11)
        res = bootstrap_estimates(ds, lambda d: [d.outcome.mean()], plan)
        boot_sd = res.estimates[:, 0].std(ddof=1)
        want = y.std(ddof=1) / np.sqrt(len(y))
        assert boot_sd == pytest.approx(want, rel=0.15)

    def test_tiny_treated_group_reports_failures(self):
        # 2 treated units in 40: many resamples lose them both
        ds = make_panel(n_units=40, treated_share=0.05, seed=7)
        plan = BootstrapPlan(replicates=60, seed=5)
        with pytest.raises(TooManyFailedReplicates):
            bootstrap_estimates(ds, lambda d: [theta_ols(d)], plan)

    def test_moderate_failures_counted(self):
        ds = make_panel(n_units=40, treated_share=0.1, seed=8)
        plan = BootstrapPlan(replicates=60, seed=6)
        res = bootstrap_estimates(ds, lambda d: [theta_ols(d)], plan,
                                  max_failure_share=0.9)
        assert res.n_failed + res.n_success == plan.replicates
        assert all(name == "EmptyCell" for _, name in res.failures)

    def test_row_level_mode(self):
        ds, y = iid_panel(n=200, seed=4)
        plan = BootstrapPlan(replicates=50, seed=12, resample_level="row")
        res = bootstrap_estimates(ds, lambda d: [d.outcome.mean()], plan)
        assert res.n_success == 50

    def test_plan_validation(self):
        with pytest.raises(ValueError):
            BootstrapPlan(replicates=1, seed=0)
        with pytest.raises(ValueError):
            BootstrapPlan(replicates=10, seed=0, ci_level=1.5)
        with pytest.raises(ValueError):
            BootstrapPlan(replicates=10, seed=0, resample_level="block")


class TestUnionConfidenceBounds:
    def test_hull_of_fixed_intervals(self):
        # replicate vectors whose percentiles reproduce given CIs
        def reps(lo, hi):
            return np.linspace(lo, hi, 1001)  # 2.5%/97.5% interior

        per = {
            "a": (2.0, reps(1.0, 3.0)),
            "b": (3.5, reps(2.0, 5.0)),
            "c": (1.2, reps(0.0, 2.5)),
        }
        cb = union_confidence_bounds(per, level=0.95)
        # elementwise CIs are the 2.5/97.5 percentiles of each grid
        assert cb.lower == pytest.approx(0.0625, abs=1e-9)
        assert cb.upper == pytest.approx(4.925, abs=1e-9)
        assert cb.lower == min(lo for lo, _ in cb.per_element_cis.values())
        assert cb.upper == max(hi for _, hi in cb.per_element_cis.values())

    def test_single_element_is_its_ci(self):
        reps = np.linspace(0.0, 1.0, 101)
        cb = union_confidence_bounds({"only": (0.5, reps)}, level=0.9)
        lo, hi = cb.per_element_cis["only"]
        assert (cb.lower, cb.upper) == (lo, hi)

    def test_insufficient_replicates(self):
        with pytest.raises(InsufficientReplicates):
            union_confidence_bounds({"a": (0.0, np.array([1.0]))})
        with pytest.raises(InsufficientReplicates):
            union_confidence_bounds({})

    def test_raising_level_never_shrinks(self):
        rng = np.random.default_rng(9)
        per = {k: (0.0, rng.normal(size=400)) for k in "abc"}
        narrow = union_confidence_bounds(per, level=0.80)
        wide = union_confidence_bounds(per, level=0.99)
        assert wide.lower <= narrow.lower
        assert wide.upper >= narrow.upper


class TestGdidConfidenceBounds:
    def test_contains_point_interval(self):
        spec = DgpSpec(family="ashenfelter", n=1500, seed=21)
        ds = simulate(spec)
        info = InformationSet.from_periods(ds)
        plan = BootstrapPlan(replicates=500, seed=3)
        interval, cb, res = gdid_confidence_bounds(ds, info, plan)
        point = gdid_bounds(theta_ols(ds), bias_set(ds, info))
        assert interval.lower == pytest.approx(point.lower, abs=1e-12)
        assert interval.upper == pytest.approx(point.upper, abs=1e-12)
        assert cb.lower <= point.lower
        assert cb.upper >= point.upper
        assert res.n_failed == 0

    def test_deterministic(self):
        spec = DgpSpec(family="ashenfelter", n=800, seed=22)
        ds = simulate(spec)
        info = InformationSet.from_periods(ds)
        plan = BootstrapPlan(replicates=120, seed=5)
        _, cb1, _ = gdid_confidence_bounds(ds, info, plan)
        _, cb2, _ = gdid_confidence_bounds(ds, info, plan)
        assert (cb1.lower, cb1.upper) == (cb2.lower, cb2.upper)
        assert cb1.per_element_cis == cb2.per_element_cis
