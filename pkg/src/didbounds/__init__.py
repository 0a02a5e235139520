"""Robust difference-in-differences bounds for panel data.

The post-period treated/control contrast equals the ATT plus a
selection bias. Rather than assuming the post bias equals the baseline
one (parallel trends), this package bounds it by the convex hull of
selection biases observed across a baseline information set (pre
periods, discrete covariate levels, or data sources), yielding an
identified interval for the ATT that always contains the standard DID
point estimate. On top of that sit doubly-robust estimation with
covariates, loss-minimizing point summaries, bootstrap union confidence
bounds, multi-period/staggered extensions, donor-pool bounds, and
simulators with closed-form truth oracles.
"""

from .bootstrap import (
    BootstrapPlan,
    BootstrapResult,
    ConfidenceBounds,
    bootstrap_estimates,
    gdid_confidence_bounds,
    percentile_ci,
    union_confidence_bounds,
)
from .bounds import (
    DrSpec,
    IdentifiedInterval,
    TauDrResult,
    gdid_bounds,
    gdid_bounds_covariates,
    standard_did,
    tau_dr,
    tau_dr_fit,
    theta_ols,
)
from .dgp import (
    AnalyticTruth,
    DgpSpec,
    McReport,
    analytic_truth,
    mills_alpha,
    monte_carlo,
    sample_selection_bias,
    simulate,
    simulate_with_counterfactuals,
)
from .errors import DidBoundsError
from .multiperiod import (
    GroupCode,
    PathAssignment,
    TreatmentPath,
    TwfeResult,
    att_bounds_t,
    att_union_ci,
    classify_paths,
    default_period_weights,
    ever_treated_att_bounds,
    tau_dr_staggered,
    theta_dim_t,
    twfe_bootstrap_se,
    twfe_fit,
    twfe_union_ci,
    weighted_att_bounds,
)
from .panel import (
    CONTROL,
    TREATED,
    GroupFilter,
    InfoElement,
    InformationSet,
    Observation,
    OverlapReport,
    PanelDataset,
    SchemaConfig,
    cell_mean,
    load_panel,
    overlap_check,
)
from .policy import (
    LossKind,
    PoEstimate,
    forecast_sb1,
    optimal_sb1,
    po_gdid,
    post_period_midpoint,
    robust_po_hull,
)
from .regression import (
    DesignMatrix,
    LinearFit,
    LogitFit,
    fit_logit,
    fit_ols,
    predict_probability,
    quadratic_expansion,
)
from .relaxations import (
    DiscordancyReport,
    DonorPanel,
    RrInterval,
    discordancy_report,
    rr_relative_magnitude_sb1,
    rr_smoothness_sb1,
    sc_bounds,
)
from .selection import (
    BiasSet,
    bias_set,
    bias_variation_set,
    sb_series,
    selection_bias_at,
)

__version__ = "0.1.0"
