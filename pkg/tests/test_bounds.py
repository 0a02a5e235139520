import numpy as np
import pytest

from didbounds import (
    DgpSpec,
    DrSpec,
    InformationSet,
    PanelDataset,
    analytic_truth,
    bias_set,
    gdid_bounds,
    gdid_bounds_covariates,
    mills_alpha,
    simulate,
    standard_did,
    tau_dr,
    tau_dr_fit,
    theta_ols,
)
from didbounds.errors import EmptyCell, NoTreatedUnits
from didbounds.selection import BiasSet

from conftest import make_panel

A1, A0 = mills_alpha(1.0)
GAP = A1 - A0


def saturated_panel(n=600, levels=3, seed=0, effect_by_level=(1.0, 2.0, 4.0)):
    """Discrete-X cross section at periods {0, 1} with both groups per cell."""
    rng = np.random.default_rng(seed)
    x = rng.integers(0, levels, size=n)
    p = 0.3 + 0.1 * x  # treated share rises with x
    d = (rng.uniform(size=n) < p).astype(int)
    y1 = 0.5 * x + rng.normal(size=n) + d * np.array(effect_by_level)[x]
    y0 = 0.2 * x + rng.normal(size=n)
    # one-hot encode all but the first level: linear fit saturates the cells
    X = np.column_stack([(x == lv).astype(float) for lv in range(1, levels)])
    names = tuple(f"x_{lv}" for lv in range(1, levels))
    return PanelDataset(
        unit=np.concatenate([np.arange(n), np.arange(n)]),
        period=np.concatenate([np.zeros(n, int), np.ones(n, int)]),
        outcome=np.concatenate([y0, y1]),
        treated=np.concatenate([d, d]),
        covariates=np.vstack([X, X]),
        covariate_names=names,
        post_period=1,
    ), x, d, y1


def brute_force_att_aggregate(x, d, y1):
    """Sum over levels of the in-cell mean contrast, weighted by the
    treated covariate distribution."""
    total = 0.0
    n1 = d.sum()
    for lv in np.unique(x):
        cell = x == lv
        theta_x = y1[cell & (d == 1)].mean() - y1[cell & (d == 0)].mean()
        total += theta_x * (cell & (d == 1)).sum() / n1
    return total


class TestThetaOls:
    def test_identical_groups_zero(self):
        ds = PanelDataset(unit=range(4), period=[1] * 4,
                          outcome=[3.0, 4.0, 3.0, 4.0],
                          treated=[1, 1, 0, 0], post_period=1)
        assert theta_ols(ds) == pytest.approx(0.0, abs=1e-12)

    def test_dip_design_value(self):
        # population contrast is 3*gap + theta
        spec = DgpSpec(family="ashenfelter", n=400_000, seed=31)
        ds = simulate(spec)
        assert 3 * GAP + 9.0 == pytest.approx(14.438, abs=5e-4)
        assert theta_ols(ds) == pytest.approx(3 * GAP + 9.0, abs=0.05)

    def test_empty_cell(self):
        ds = make_panel(n_units=6, treated_share=1.0)
        with pytest.raises(EmptyCell):
            theta_ols(ds)


class TestGdidBounds:
    def test_dip_design_identified_set(self):
        b = BiasSet.from_values({-2: 7 * GAP, -1: 3 * GAP, 0: GAP})
        iv = gdid_bounds(3 * GAP + 9.0, b)
        assert iv.lower == pytest.approx(9.0 - 4 * GAP, abs=1e-12)
        assert iv.upper == pytest.approx(9.0 + 2 * GAP, abs=1e-12)
        assert iv.lower == pytest.approx(1.749, abs=5e-4)
        assert iv.upper == pytest.approx(12.625, abs=5e-4)

    def test_degenerate_set_gives_standard_did(self):
        ds = make_panel(n_units=200, periods=(-1, 0, 1), sb_slope=0.0,
                        seed=2)
        info = InformationSet.from_periods(ds, [0])
        iv = gdid_bounds(theta_ols(ds), bias_set(ds, info))
        assert iv.width == pytest.approx(0.0, abs=1e-12)
        assert iv.lower == pytest.approx(standard_did(ds), abs=1e-12)

    def test_multi_period_point_values(self):
        truth = analytic_truth(DgpSpec(family="multi_pt_violated", n=1,
                                       seed=0))
        lo, hi = truth.identified_set[1]
        assert lo == pytest.approx(0.33, abs=5e-3)
        assert hi == pytest.approx(3.99, abs=5e-3)
        assert lo < truth.att[1] == 2.5 < hi

    def test_interval_requires_order(self):
        from didbounds import IdentifiedInterval

        with pytest.raises(ValueError):
            IdentifiedInterval(lower=1.0, upper=0.0)


class TestStandardDid:
    def test_dip_design_upward_bias(self):
        spec = DgpSpec(family="ashenfelter", n=400_000, seed=33)
        ds = simulate(spec)
        assert standard_did(ds) == pytest.approx(9.0 + 2 * GAP, abs=0.05)

    def test_equal_trends_recovers_effect(self):
        ds = make_panel(n_units=4000, periods=(0, 1), sb_slope=0.0,
                        effect=1.5, seed=4)
        assert standard_did(ds) == pytest.approx(1.5, abs=0.15)

    def test_zero_effect_design(self):
        ds = make_panel(n_units=4000, periods=(0, 1), sb_slope=0.0,
                        effect=0.0, seed=5)
        assert standard_did(ds) == pytest.approx(0.0, abs=0.15)


class TestTauDr:
    def test_no_covariates_collapses_to_theta_ols(self, small_panel):
        spec = DrSpec(ps_spec="known_constant", or_spec="known_constant")
        assert tau_dr(small_panel, spec=spec) == pytest.approx(
            theta_ols(small_panel), abs=1e-12
        )

    def test_saturated_equals_cell_aggregation(self):
        ds, x, d, y1 = saturated_panel()
        spec = DrSpec(ps_spec="logit", or_spec="linear", logit_tol=1e-12)
        got = tau_dr(ds, spec=spec)
        want = brute_force_att_aggregate(x, d, y1)
        assert got == pytest.approx(want, abs=1e-10)

    def test_doubly_robust_each_side(self):
        spec = DgpSpec(family="dr_logit_quadratic", n=60_000, seed=11)
        ds = simulate(spec)
        tau = analytic_truth(spec).att[1]
        ps_ok = tau_dr(ds, spec=DrSpec(ps_spec="logit", or_spec="linear"))
        or_ok = tau_dr(ds, spec=DrSpec(ps_spec="known_constant",
                                       or_spec="quadratic"))
        both_wrong = tau_dr(ds, spec=DrSpec(ps_spec="known_constant",
                                            or_spec="linear"))
        assert ps_ok == pytest.approx(tau, abs=0.1)
        assert or_ok == pytest.approx(tau, abs=0.1)
        assert abs(both_wrong - tau) > 0.3

    def test_no_treated_raises(self):
        ds = make_panel(n_units=6, treated_share=0.0)
        with pytest.raises(NoTreatedUnits):
            tau_dr(ds)

    def test_all_treated_raises_empty_control(self):
        ds = make_panel(n_units=6, treated_share=1.0)
        with pytest.raises(EmptyCell):
            tau_dr(ds)

    def test_clipping_reported(self):
        # a huge covariate coefficient saturates some propensities
        rng = np.random.default_rng(6)
        n = 400
        x = rng.normal(size=n) * 8.0
        d = (x + 0.2 * rng.normal(size=n) > 0).astype(int)
        d[:6] = 1 - d[:6]  # break perfect separation
        ds = PanelDataset(
            unit=np.concatenate([np.arange(n)] * 2),
            period=np.concatenate([np.zeros(n, int), np.ones(n, int)]),
            outcome=rng.normal(size=2 * n),
            treated=np.concatenate([d, d]),
            covariates=np.concatenate([x, x])[:, None],
            covariate_names=("x",),
            post_period=1,
        )
        with pytest.warns(RuntimeWarning, match="clipped"):
            res = tau_dr_fit(ds, spec=DrSpec(clip=0.05))
        assert 0 < res.n_clipped < res.n_rows


class TestTranslationEquivariance:
    # shifts common to both groups cancel in every contrast; the
    # informative equivariance is under shifts to the treated group
    def test_treated_post_shift_moves_everything_by_c(self):
        ds = make_panel(n_units=300, periods=(-1, 0, 1), sb_slope=0.3,
                        seed=9, covariates=lambda rng, u, t: (rng.normal(),))
        c = 5.0
        shifted_outcome = ds.outcome + c * (ds.period == 1) * ds.treated
        shifted = PanelDataset(
            unit=ds.unit_codes, period=ds.period, outcome=shifted_outcome,
            treated=ds.treated, covariates=ds.covariates,
            covariate_names=tuple(ds.covariate_names), post_period=1,
        )
        info_args = ([-1, 0],)
        info0 = InformationSet.from_periods(ds, *info_args)
        info1 = InformationSet.from_periods(shifted, *info_args)
        assert theta_ols(shifted) == pytest.approx(theta_ols(ds) + c,
                                                   abs=1e-10)
        assert tau_dr(shifted) == pytest.approx(tau_dr(ds) + c, abs=1e-10)
        iv0 = gdid_bounds(theta_ols(ds), bias_set(ds, info0))
        iv1 = gdid_bounds(theta_ols(shifted), bias_set(shifted, info1))
        assert iv1.lower == pytest.approx(iv0.lower + c, abs=1e-10)
        assert iv1.upper == pytest.approx(iv0.upper + c, abs=1e-10)

    def test_common_post_shift_cancels(self):
        ds = make_panel(n_units=300, periods=(-1, 0, 1), sb_slope=0.3,
                        seed=9)
        shifted = PanelDataset(
            unit=ds.unit_codes, period=ds.period,
            outcome=ds.outcome + 5.0 * (ds.period == 1),
            treated=ds.treated, post_period=1,
        )
        assert theta_ols(shifted) == pytest.approx(theta_ols(ds), abs=1e-10)

    def test_treated_baseline_shift_moves_only_bias_set(self):
        ds = make_panel(n_units=300, periods=(-1, 0, 1), sb_slope=0.3,
                        seed=10)
        c = 3.0
        shifted_outcome = ds.outcome + c * (ds.period != 1) * ds.treated
        shifted = PanelDataset(
            unit=ds.unit_codes, period=ds.period, outcome=shifted_outcome,
            treated=ds.treated, post_period=1,
        )
        assert theta_ols(shifted) == pytest.approx(theta_ols(ds), abs=1e-10)
        b0 = bias_set(ds, InformationSet.from_periods(ds))
        b1 = bias_set(shifted, InformationSet.from_periods(shifted))
        assert b1.lower == pytest.approx(b0.lower + c, abs=1e-10)
        assert b1.upper == pytest.approx(b0.upper + c, abs=1e-10)


class TestGdidBoundsCovariates:
    def test_reduces_without_covariates(self):
        ds = make_panel(n_units=300, periods=(-1, 0, 1), sb_slope=0.4,
                        seed=12)
        info = InformationSet.from_periods(ds)
        via_cov = gdid_bounds_covariates(ds, info)
        direct = gdid_bounds(theta_ols(ds), bias_set(ds, info))
        assert via_cov.lower == pytest.approx(direct.lower, abs=1e-12)
        assert via_cov.upper == pytest.approx(direct.upper, abs=1e-12)

    def test_saturated_matches_cell_oracle(self):
        ds, x, d, y1 = saturated_panel(seed=13)
        info = InformationSet.from_periods(ds, [0])
        spec = DrSpec(logit_tol=1e-12)
        iv = gdid_bounds_covariates(ds, info, spec)
        center = brute_force_att_aggregate(x, d, y1)
        b = bias_set(ds, info)
        assert iv.lower == pytest.approx(center - b.upper, abs=1e-10)
        assert iv.upper == pytest.approx(center - b.lower, abs=1e-10)
        assert iv.point_estimand_label == "tau_dr"

    def test_covariate_level_information_set(self):
        ds, x, d, y1 = saturated_panel(seed=14)
        info = InformationSet.from_covariate(ds, "x_1", period=0)
        iv = gdid_bounds_covariates(ds, info, DrSpec())
        assert iv.lower <= iv.upper


class TestContainment:
    def test_standard_did_always_inside(self):
        # acceptance-style invariant at small scale
        rng = np.random.default_rng(15)
        for trial in range(25):
            ds = make_panel(
                n_units=30 + int(rng.integers(0, 40)),
                periods=(-2, -1, 0, 1),
                sb_slope=float(rng.normal()),
                effect=float(rng.normal()),
                seed=int(rng.integers(0, 2**31)),
            )
            info = InformationSet.from_periods(ds)
            iv = gdid_bounds(theta_ols(ds), bias_set(ds, info))
            assert iv.contains(standard_did(ds), tol=1e-12)

    def test_coverage_of_true_att_on_hull_stable_design(self):
        # bias-set stability holds by construction: the estimated
        # interval should cover the true effect in nearly every run
        hits = 0
        for rep in range(50):
            spec = DgpSpec(family="ashenfelter", n=100_000, seed=1000 + rep)
            ds = simulate(spec)
            info = InformationSet.from_periods(ds)
            iv = gdid_bounds(theta_ols(ds), bias_set(ds, info))
            hits += iv.contains(9.0)
        assert hits >= 48
