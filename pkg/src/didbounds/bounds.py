"""Identification engine: post-period contrasts, ATT bounds, doubly-robust estimand.

The post-period treated/control mean difference equals the ATT plus a
selection bias. Subtracting the convex hull of baseline selection
biases yields an identified interval for the ATT; subtracting the
baseline bias alone recovers the standard difference-in-differences
point estimand, which always lies inside the interval.

With post-period covariates, the aggregated conditional contrast is
estimated by a doubly-robust combination of a propensity model and an
outcome-regression model; it is consistent when either model is
correct.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AllPropensitiesClipped, EmptyCell, NoTreatedUnits
from .panel import CONTROL, TREATED, GroupFilter, InformationSet, PanelDataset
from .regression import (
    DesignMatrix,
    LinearFit,
    LogitFit,
    fit_logit,
    fit_ols,
    predict_probability,
    quadratic_expansion,
)
from .selection import BiasSet, bias_set

__all__ = [
    "IdentifiedInterval",
    "DrSpec",
    "TauDrResult",
    "theta_ols",
    "standard_did",
    "gdid_bounds",
    "tau_dr",
    "tau_dr_fit",
    "gdid_bounds_covariates",
]


@dataclass(frozen=True)
class IdentifiedInterval:
    """A [lower, upper] bound pair for the ATT with provenance."""

    lower: float
    upper: float
    point_estimand_label: str = ""
    bias: BiasSet | None = None

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError(
                f"interval lower {self.lower} exceeds upper {self.upper}"
            )

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= value <= self.upper + tol

    def as_tuple(self) -> tuple[float, float]:
        return (self.lower, self.upper)


@dataclass(frozen=True)
class DrSpec:
    """Model choices for the doubly-robust estimand.

    ``ps_spec``: ``"logit"`` or ``"known_constant"`` (the sample treated
    share). ``or_spec``: ``"linear"``, ``"quadratic"`` (covariates,
    squares, pairwise interactions), or ``"known_constant"`` (the
    control mean). ``clip`` guards the 1-P denominator.
    """

    ps_spec: str = "logit"
    or_spec: str = "linear"
    clip: float = 1e-6
    logit_tol: float = 1e-8
    logit_max_iter: int = 100

    def __post_init__(self) -> None:
        if self.ps_spec not in ("logit", "known_constant"):
            raise ValueError(f"unknown propensity spec {self.ps_spec!r}")
        if self.or_spec not in ("linear", "quadratic", "known_constant"):
            raise ValueError(f"unknown outcome spec {self.or_spec!r}")
        if not 0.0 < self.clip < 0.5:
            raise ValueError("clip must lie in (0, 0.5)")


CONSTANT_DR = DrSpec(ps_spec="known_constant", or_spec="known_constant")


# =============================================================================
# point estimands
# =============================================================================

def theta_ols(ds: PanelDataset, post_period: int | None = None) -> float:
    """Treated-minus-control mean outcome in the post period."""
    if post_period is None:
        post_period = ds.post_period
    return ds.cell_mean(post_period, TREATED) - ds.cell_mean(post_period, CONTROL)


def _baseline_period(ds: PanelDataset, post_period: int) -> int:
    pre = [p for p in ds.periods if p < post_period]
    if not pre:
        raise EmptyCell(post_period - 1, TREATED)
    return pre[-1]


def standard_did(
    ds: PanelDataset,
    post_period: int | None = None,
    baseline_period: int | None = None,
) -> float:
    """Standard DID point estimand: post contrast minus the baseline bias."""
    if post_period is None:
        post_period = ds.post_period
    if baseline_period is None:
        baseline_period = _baseline_period(ds, post_period)
    sb0 = (ds.cell_mean(baseline_period, TREATED)
           - ds.cell_mean(baseline_period, CONTROL))
    return theta_ols(ds, post_period) - sb0


def gdid_bounds(theta: float, bias: BiasSet,
                label: str = "theta_ols") -> IdentifiedInterval:
    """ATT interval: post contrast minus the bias hull.

    A degenerate hull (all baseline biases equal) collapses the interval
    to the standard DID point.
    """
    return IdentifiedInterval(
        lower=float(theta - bias.upper),
        upper=float(theta - bias.lower),
        point_estimand_label=label,
        bias=bias,
    )


# =============================================================================
# doubly-robust estimand
# =============================================================================

@dataclass(frozen=True)
class TauDrResult:
    """Doubly-robust estimate with its fitted nuisance models."""

    value: float
    n_rows: int
    n_treated: int
    n_clipped: int
    spec: DrSpec
    propensity: LogitFit | float
    outcome_model: LinearFit | float


def _outcome_design(X: np.ndarray, names, or_spec: str) -> DesignMatrix:
    if or_spec == "quadratic":
        Xq, labels = quadratic_expansion(X, names)
        return DesignMatrix.with_intercept(Xq, labels)
    return DesignMatrix.with_intercept(X, names)


def tau_dr_fit(
    ds: PanelDataset,
    post_period: int | None = None,
    spec: DrSpec = DrSpec(),
) -> TauDrResult:
    """Fit the doubly-robust estimand on the post-period cross-section.

    The propensity is fit on all post-period rows (treatment on
    covariates), the outcome regression on post-period control rows
    only. Rows whose fitted propensity leaves ``[clip, 1-clip]`` are
    clipped but retained; the count is reported. If every propensity is
    clipped the overlap has failed and :class:`AllPropensitiesClipped`
    is raised.
    """
    if post_period is None:
        post_period = ds.post_period
    rows = ds.rows_at(int(post_period))
    if rows.size == 0:
        raise EmptyCell(post_period, GroupFilter())
    d = ds.treated[rows].astype(np.float64)
    y = ds.outcome[rows]
    n1 = int(d.sum())
    if n1 == 0:
        raise NoTreatedUnits(f"no treated rows at period {post_period}")
    if n1 == len(d):
        raise EmptyCell(post_period, CONTROL)
    X = ds.covariates[rows]
    has_x = X.shape[1] > 0

    # propensity model
    n_clipped = 0
    if spec.ps_spec == "logit" and has_x:
        design = DesignMatrix.with_intercept(X, ds.covariate_names)
        ps_fit = fit_logit(design, d, tol=spec.logit_tol,
                           max_iter=spec.logit_max_iter)
        p_raw = predict_probability(ps_fit, design, clip=0.0)
        n_clipped = int(((p_raw < spec.clip) | (p_raw > 1 - spec.clip)).sum())
        if n_clipped == len(d):
            raise AllPropensitiesClipped(
                f"all {len(d)} propensities outside"
                f" [{spec.clip}, {1 - spec.clip}]"
            )
        if n_clipped:
            warnings.warn(
                f"{n_clipped} propensities clipped to"
                f" [{spec.clip}, {1 - spec.clip}]",
                RuntimeWarning,
                stacklevel=2,
            )
        p = np.clip(p_raw, spec.clip, 1 - spec.clip)
        propensity: LogitFit | float = ps_fit
    else:
        p = np.full(len(d), d.mean())
        propensity = float(d.mean())

    # outcome regression on controls
    control = d == 0
    if spec.or_spec == "known_constant" or not has_x:
        mu0 = np.full(len(d), y[control].mean())
        outcome_model: LinearFit | float = float(y[control].mean())
    else:
        design_all = _outcome_design(X, ds.covariate_names, spec.or_spec)
        design_ctrl = DesignMatrix(design_all.values[control],
                                   design_all.column_labels)
        or_fit = fit_ols(design_ctrl, y[control])
        mu0 = or_fit.predict(design_all)
        outcome_model = or_fit

    value = float(np.mean((d - p) / (1.0 - p) * (y - mu0)) / d.mean())
    return TauDrResult(
        value=value,
        n_rows=len(d),
        n_treated=n1,
        n_clipped=n_clipped,
        spec=spec,
        propensity=propensity,
        outcome_model=outcome_model,
    )


def tau_dr(
    ds: PanelDataset,
    post_period: int | None = None,
    spec: DrSpec = DrSpec(),
) -> float:
    """Doubly-robust estimate of the covariate-aggregated post contrast.

    With no covariates (or constant specs) this collapses exactly to
    :func:`theta_ols`.
    """
    return tau_dr_fit(ds, post_period, spec).value


def gdid_bounds_covariates(
    ds: PanelDataset,
    info: InformationSet,
    spec: DrSpec | None = None,
    post_period: int | None = None,
) -> IdentifiedInterval:
    """ATT interval centered on the doubly-robust estimand.

    The bias hull is built from `info` (pre-treatment periods or
    discrete baseline covariate levels); the interval is the
    doubly-robust contrast minus that hull. Without covariates this
    reduces to :func:`gdid_bounds` around :func:`theta_ols`.
    """
    if spec is None:
        spec = DrSpec()
    bias = bias_set(ds, info)
    if ds.covariates.shape[1] == 0:
        center = theta_ols(ds, post_period)
        label = "theta_ols"
    else:
        center = tau_dr(ds, post_period, spec)
        label = "tau_dr"
    return gdid_bounds(center, bias, label=label)
