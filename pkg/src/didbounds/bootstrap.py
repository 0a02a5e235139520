"""Bootstrap replicates and union (convex-hull) confidence bounds.

Units are resampled with replacement, keeping all periods of a drawn
unit together: within-unit dependence makes row-level resampling
invalid for panels (a row-level mode exists for pure cross-sections).
Per-element percentile intervals are combined by taking the hull
[min of lower bounds, max of upper bounds]; by the union argument its
coverage of the identified set is at least the nominal level, possibly
conservatively so. The min/max themselves are never bootstrapped:
their limiting distributions are not Gaussian and the plain bootstrap
is inconsistent for them; only the per-element estimands are.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .bounds import DrSpec, IdentifiedInterval, tau_dr, theta_ols
from .errors import (
    DidBoundsError,
    InsufficientReplicates,
    TooManyFailedReplicates,
)
from .panel import InformationSet, PanelDataset
from .selection import bias_set

__all__ = [
    "BootstrapPlan",
    "BootstrapResult",
    "ConfidenceBounds",
    "bootstrap_estimates",
    "union_confidence_bounds",
    "percentile_ci",
    "gdid_confidence_bounds",
]


@dataclass(frozen=True)
class BootstrapPlan:
    """Replicate count, seed, resampling level, and CI level."""

    replicates: int
    seed: int
    resample_level: str = "unit"
    ci_level: float = 0.95

    def __post_init__(self) -> None:
        if self.replicates < 2:
            raise ValueError("need at least 2 bootstrap replicates")
        if self.resample_level not in ("unit", "row"):
            raise ValueError("resample_level must be 'unit' or 'row'")
        if not 0.0 < self.ci_level < 1.0:
            raise ValueError("ci_level must lie in (0, 1)")


@dataclass
class BootstrapResult:
    """Successful replicate estimates plus failure accounting."""

    estimates: np.ndarray  # (n_success, n_estimands)
    n_planned: int
    n_failed: int
    failures: list[tuple[int, str]] = field(default_factory=list)

    @property
    def n_success(self) -> int:
        return self.estimates.shape[0]


@dataclass(frozen=True)
class ConfidenceBounds:
    """Union confidence bounds: hull of per-element confidence intervals."""

    lower: float
    upper: float
    per_element_cis: dict
    level: float

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= value <= self.upper + tol


def _replicate_rng(seed: int, b: int) -> np.random.Generator:
    # per-replicate stream keyed on (seed, index): deterministic under
    # any execution order
    return np.random.default_rng([seed, b])


def bootstrap_estimates(
    ds: PanelDataset,
    estimator: Callable[[PanelDataset], np.ndarray],
    plan: BootstrapPlan,
    max_failure_share: float = 0.2,
) -> BootstrapResult:
    """Run the estimator on `plan.replicates` resampled datasets.

    The estimator maps a dataset to a vector of estimands. Replicates
    where it raises a :class:`DidBoundsError` (an emptied cell, a
    separated logit, ...) are recorded as failed and excluded; more than
    `max_failure_share` failures raises
    :class:`TooManyFailedReplicates`, signaling cells too fragile to
    bootstrap.
    """
    rows: list[np.ndarray] = []
    failures: list[tuple[int, str]] = []
    n_clusters = ds.n_units if plan.resample_level == "unit" else ds.n_obs
    for b in range(plan.replicates):
        rng = _replicate_rng(plan.seed, b)
        draw = rng.integers(0, n_clusters, size=n_clusters)
        if plan.resample_level == "unit":
            resampled = ds.resample_units(draw)
        else:
            resampled = _resample_rows(ds, draw)
        try:
            est = np.atleast_1d(np.asarray(estimator(resampled), dtype=float))
        except DidBoundsError as exc:
            failures.append((b, type(exc).__name__))
            continue
        rows.append(est)
    n_failed = len(failures)
    if n_failed > max_failure_share * plan.replicates:
        raise TooManyFailedReplicates(
            f"{n_failed}/{plan.replicates} bootstrap replicates failed"
            f" ({failures[0][1]} first); cells are too fragile"
        )
    estimates = (np.vstack(rows) if rows
                 else np.empty((0, 0), dtype=float))
    return BootstrapResult(
        estimates=estimates,
        n_planned=plan.replicates,
        n_failed=n_failed,
        failures=failures,
    )


def _resample_rows(ds: PanelDataset, draw: np.ndarray) -> PanelDataset:
    # pure cross-section resampling: each drawn row becomes its own unit
    return PanelDataset(
        unit=np.arange(len(draw)),
        period=ds.period[draw],
        outcome=ds.outcome[draw],
        treated=ds.treated[draw],
        covariates=ds.covariates[draw] if ds.covariates.size else None,
        covariate_names=tuple(ds.covariate_names),
        treatment_scheme=ds.treatment_scheme,
        post_period=ds.post_period,
        validate=False,
    )


def percentile_ci(replicates: np.ndarray, level: float) -> tuple[float, float]:
    """Equal-tailed percentile interval from bootstrap replicates."""
    replicates = np.asarray(replicates, dtype=float)
    if replicates.size < 2:
        raise InsufficientReplicates(
            f"need at least 2 replicates, got {replicates.size}"
        )
    alpha = 1.0 - level
    lo, hi = np.percentile(replicates, [100 * alpha / 2, 100 * (1 - alpha / 2)])
    return float(lo), float(hi)


def union_confidence_bounds(
    per_element: Mapping[object, tuple[float, np.ndarray]],
    level: float = 0.95,
) -> ConfidenceBounds:
    """Hull of per-element percentile confidence intervals.

    `per_element` maps each information element to its point estimate
    and bootstrap replicates. The bounds are
    [min over elements of CI lower, max over elements of CI upper].
    """
    if not per_element:
        raise InsufficientReplicates("no per-element estimates supplied")
    cis: dict = {}
    for label, (_, reps) in per_element.items():
        cis[label] = percentile_ci(reps, level)
    return ConfidenceBounds(
        lower=float(min(lo for lo, _ in cis.values())),
        upper=float(max(hi for _, hi in cis.values())),
        per_element_cis=cis,
        level=level,
    )


# =============================================================================
# high-level driver
# =============================================================================

def per_element_estimates(
    ds: PanelDataset,
    info: InformationSet,
    spec: DrSpec | None = None,
    post_period: int | None = None,
) -> np.ndarray:
    """Vector of per-element DID estimands: center minus each element's bias.

    The center is the doubly-robust contrast when covariates are present
    and a spec is given, otherwise the plain post-period mean
    difference.
    """
    bias = bias_set(ds, info)
    if spec is not None and ds.covariates.shape[1] > 0:
        center = tau_dr(ds, post_period, spec)
    else:
        center = theta_ols(ds, post_period)
    return np.array([center - bias.per_element[el.label]
                     for el in info.elements])


def gdid_confidence_bounds(
    ds: PanelDataset,
    info: InformationSet,
    plan: BootstrapPlan,
    spec: DrSpec | None = None,
    post_period: int | None = None,
) -> tuple[IdentifiedInterval, ConfidenceBounds, BootstrapResult]:
    """Point interval plus union confidence bounds for the ATT.

    Bootstraps the per-element DID estimands jointly (one resample feeds
    every element) and returns the point-estimate interval, the union
    confidence bounds, and the replicate matrix with failure counts.
    """
    point = np.asarray(per_element_estimates(ds, info, spec, post_period))
    result = bootstrap_estimates(
        ds, lambda d: per_element_estimates(d, info, spec, post_period), plan
    )
    per_el = {
        el.label: (float(point[j]), result.estimates[:, j])
        for j, el in enumerate(info.elements)
    }
    cb = union_confidence_bounds(per_el, plan.ci_level)
    interval = IdentifiedInterval(
        lower=float(point.min()),
        upper=float(point.max()),
        point_estimand_label="tau_dr" if (spec is not None and
                                          ds.covariates.shape[1] > 0)
        else "theta_ols",
        bias=bias_set(ds, info),
    )
    return interval, cb, result
