"""Policy-oriented point estimands: loss-minimizing bias choices and forecasts.

Instead of reporting the full ATT interval, a decision maker may pick a
single post-period selection bias minimizing a loss over the baseline
bias distribution: the weighted median (absolute loss), the weighted
mean (squared loss), or the hull midpoint (worst-case loss). The
resulting point estimates are labeled non-causal in every output. The
hull of these choices over all possible weightings reproduces the
identified interval.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .bounds import IdentifiedInterval, gdid_bounds
from .errors import DegenerateDesign
from .regression import DesignMatrix, fit_ols
from .selection import BiasSet

__all__ = ["LossKind", "PoEstimate", "optimal_sb1", "po_gdid",
           "robust_po_hull", "forecast_sb1", "post_period_midpoint"]


class LossKind(str, Enum):
    L1 = "l1"
    L2 = "l2"
    LINF = "linf"

    @classmethod
    def parse(cls, value) -> "LossKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"unknown loss {value!r}; expected one of l1, l2, linf"
            ) from None


@dataclass(frozen=True)
class PoEstimate:
    """Loss-minimizing point estimate. Not guaranteed causal.

    ``causal`` is always False: the estimate equals the ATT only under
    assumptions beyond the bias set; downstream output must carry the
    flag rather than rely on prose.
    """

    loss: LossKind
    sb1_choice: float
    estimate: float
    causal: bool = False


def _weighted_median(values: np.ndarray, weights: np.ndarray) -> float:
    """Weighted median; an even mass split returns the midpoint of the
    two straddling order statistics (deterministic, symmetric)."""
    order = np.argsort(values, kind="stable")
    v = values[order]
    w = weights[order] / weights.sum()
    cum = np.cumsum(w)
    k = int(np.searchsorted(cum, 0.5 - 1e-12))
    if abs(cum[k] - 0.5) <= 1e-12 and k + 1 < len(v):
        return float(0.5 * (v[k] + v[k + 1]))
    return float(v[k])


def optimal_sb1(bias: BiasSet, loss: LossKind | str) -> float:
    """Loss-minimizing choice of the post-period selection bias.

    Absolute loss gives the weighted median of the per-element biases,
    squared loss the weighted mean, worst-case loss the hull midpoint.
    For a singleton set all three return the baseline bias itself (the
    parallel-trends reduction).
    """
    loss = LossKind.parse(loss)
    values = np.array(list(bias.per_element.values()), dtype=float)
    weights = np.array(
        [bias.weights.get(k, 1.0) for k in bias.per_element], dtype=float
    )
    if loss is LossKind.L1:
        return _weighted_median(values, weights)
    if loss is LossKind.L2:
        return float(np.average(values, weights=weights))
    return float(0.5 * (bias.lower + bias.upper))


def po_gdid(theta: float, bias: BiasSet, loss: LossKind | str) -> PoEstimate:
    """Point estimate: post contrast minus the loss-minimizing bias."""
    loss = LossKind.parse(loss)
    sb1 = optimal_sb1(bias, loss)
    return PoEstimate(loss=loss, sb1_choice=sb1, estimate=float(theta - sb1))


def robust_po_hull(theta: float, bias: BiasSet) -> IdentifiedInterval:
    """Hull of the loss-minimizing estimates over all bias weightings.

    Each loss minimizer is a weighted location statistic of the
    per-element biases, so over all weight distributions it sweeps the
    full hull; the resulting ATT interval coincides with
    :func:`didbounds.bounds.gdid_bounds`.
    """
    return gdid_bounds(theta, bias, label="robust_po_hull")


def forecast_sb1(
    series,
    target_period: float,
    degree: int = 1,
) -> float:
    """Extrapolate the selection-bias path to a target period.

    Fits a polynomial of the given degree (default linear) to ordered
    ``(period, bias)`` pairs by least squares and evaluates it at
    ``target_period``. Intended for information sets whose biases show a
    clear trend, where the hull assumption itself is suspect.
    """
    pairs = [(float(t), float(v)) for t, v in series]
    t = np.array([p[0] for p in pairs])
    v = np.array([p[1] for p in pairs])
    if len(np.unique(t)) < 2:
        raise DegenerateDesign(
            "forecast requires at least two distinct periods"
        )
    if not 1 <= degree <= len(pairs) - 1:
        raise ValueError(
            f"degree must be between 1 and {len(pairs) - 1}, got {degree}"
        )
    # center periods before powering: keeps the design well-conditioned
    # and leaves the fitted values unchanged
    t0 = t.mean()
    cols = np.column_stack([(t - t0) ** k for k in range(degree + 1)])
    design = DesignMatrix(cols, tuple(f"t^{k}" for k in range(degree + 1)))
    fit = fit_ols(design, v)
    powers = np.array([(float(target_period) - t0) ** k
                       for k in range(degree + 1)])
    return float(powers @ fit.coefficients)


def post_period_midpoint(periods, first_treatment_period: int) -> float:
    """Midpoint of the post-treatment periods (default forecast target)."""
    post = [p for p in periods if p >= first_treatment_period]
    if not post:
        raise DegenerateDesign("no post-treatment periods")
    return float((min(post) + max(post)) / 2.0)
