"""Donor-pool bounds and trend-restriction comparisons.

Donor-pool bounds treat every donor series as a potential control for
the treated series: the ATT lies between the worst and best donor
contrast after subtracting the hull of all donor-by-period baseline
gaps, whatever the (unknown, convex) donor weights are.

The comparison operations reproduce the post-period bias sets implied
by two trend restrictions on exactly two pre-treatment periods
{-1, 0}: a second-difference smoothness cap M, and a relative-magnitude
cap on the post violation versus the observed pre violation. A
discordancy report intersects either set with the hull-based one and
warns when a smoothness cap small enough to contradict the observed
data was chosen.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import IdentifiedInterval
from .errors import EmptyDonorPool, MissingPeriod, NegativeM
from .panel import TREATED, PanelDataset
from .selection import BiasSet

__all__ = [
    "DonorPanel",
    "RrInterval",
    "DiscordancyReport",
    "sc_bounds",
    "rr_smoothness_sb1",
    "rr_relative_magnitude_sb1",
    "discordancy_report",
]


# =============================================================================
# donor-pool bounds
# =============================================================================

@dataclass(frozen=True)
class DonorPanel:
    """Per-period mean outcome series for one treated group and donors.

    ``treated`` and each entry of ``donors`` map period -> mean outcome;
    all series must cover the pre-treatment periods and the post period.
    """

    treated: dict[int, float]
    donors: dict[object, dict[int, float]]
    pre_periods: tuple[int, ...]
    post_period: int

    def __post_init__(self) -> None:
        if not self.donors:
            raise EmptyDonorPool("donor pool has no members")
        object.__setattr__(self, "pre_periods",
                           tuple(int(p) for p in self.pre_periods))
        needed = set(self.pre_periods) | {self.post_period}
        for p in needed:
            if p not in self.treated:
                raise MissingPeriod(f"treated series lacks period {p}")
        for j, series in self.donors.items():
            for p in needed:
                if p not in series:
                    raise MissingPeriod(f"donor {j!r} lacks period {p}")

    @classmethod
    def from_panel(cls, ds: PanelDataset,
                   post_period: int | None = None) -> "DonorPanel":
        """Aggregate a donor_pool-scheme panel into per-period means.

        Treated rows form the treated series; each untreated unit is one
        donor series.
        """
        if ds.treatment_scheme != "donor_pool":
            raise ValueError("donor bounds require the donor_pool scheme")
        if post_period is None:
            post_period = max(ds.periods)
        pre = tuple(p for p in ds.periods if p < post_period)
        treated = {
            p: ds.cell_mean(p, TREATED) for p in (*pre, post_period)
        }
        donors: dict[object, dict[int, float]] = {}
        control_mask = ds.treated == 0
        for code in np.flatnonzero(
            np.bincount(ds.unit_codes, weights=control_mask,
                        minlength=ds.n_units) > 0
        ):
            label = ds.unit_labels[code]
            series: dict[int, float] = {}
            unit_rows = np.flatnonzero(ds.unit_codes == code)
            by_period = {int(p): float(v) for p, v in
                         zip(ds.period[unit_rows], ds.outcome[unit_rows])}
            for p in (*pre, post_period):
                if p not in by_period:
                    raise MissingPeriod(f"donor {label!r} lacks period {p}")
                series[p] = by_period[p]
            donors[label] = series
        return cls(treated=treated, donors=donors, pre_periods=pre,
                   post_period=int(post_period))


def sc_bounds(
    dp: DonorPanel,
    info_periods: list[int] | None = None,
) -> IdentifiedInterval:
    """Worst-case ATT bounds over the donor pool.

    With unknown convex donor weights, the post contrast against any
    single donor brackets the aggregate contrast; subtracting the hull
    of all donor-by-period baseline gaps gives
    [min_j theta_j - max_{j,p} gap, max_j theta_j - min_{j,p} gap].
    Adding a donor can only widen the interval.
    """
    if info_periods is None:
        info_periods = list(dp.pre_periods)
    info_periods = [int(p) for p in info_periods]
    for p in info_periods:
        if p not in dp.pre_periods:
            raise MissingPeriod(f"period {p} is not a pre-treatment period")
    if not dp.donors:
        raise EmptyDonorPool("donor pool has no members")

    thetas = {
        j: dp.treated[dp.post_period] - series[dp.post_period]
        for j, series in dp.donors.items()
    }
    gaps = {
        (j, p): dp.treated[p] - series[p]
        for j, series in dp.donors.items()
        for p in info_periods
    }
    values = list(gaps.values())
    bias = BiasSet(
        per_element=gaps,
        lower=float(min(values)),
        upper=float(max(values)),
        kind="level",
        weights={k: 1.0 / len(gaps) for k in gaps},
    )
    return IdentifiedInterval(
        lower=float(min(thetas.values()) - bias.upper),
        upper=float(max(thetas.values()) - bias.lower),
        point_estimand_label="donor theta_ols",
        bias=bias,
    )


# =============================================================================
# trend-restriction comparisons (two pre-periods {-1, 0})
# =============================================================================

@dataclass(frozen=True)
class RrInterval:
    """Post-period bias set implied by a trend restriction."""

    restriction: str  # "smoothness" | "relative_magnitude"
    parameter: float  # M or Mbar
    lower: float
    upper: float

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def as_tuple(self) -> tuple[float, float]:
        return (self.lower, self.upper)


def rr_smoothness_sb1(sb_m1: float, sb_0: float, M: float) -> RrInterval:
    """Bias set under a slope-change cap of M between consecutive periods.

    Linear continuation of the observed pre-trend, give or take M:
    [2*SB_0 - SB_{-1} - M, 2*SB_0 - SB_{-1} + M]. Width is exactly 2M.
    """
    if M < 0:
        raise NegativeM(f"smoothness parameter must be >= 0, got {M}")
    center = 2.0 * sb_0 - sb_m1
    return RrInterval(
        restriction="smoothness", parameter=float(M),
        lower=float(center - M), upper=float(center + M),
    )


def rr_relative_magnitude_sb1(sb_m1: float, sb_0: float,
                              m_bar: float) -> RrInterval:
    """Bias set capping the post violation at Mbar times the pre violation.

    [SB_0 - Mbar*|SB_{-1} - SB_0|, SB_0 + Mbar*|SB_{-1} - SB_0|].
    Width is exactly 2*Mbar*|SB_{-1} - SB_0|.
    """
    if m_bar < 0:
        raise NegativeM(f"relative-magnitude parameter must be >= 0, got {m_bar}")
    spread = m_bar * abs(sb_m1 - sb_0)
    return RrInterval(
        restriction="relative_magnitude", parameter=float(m_bar),
        lower=float(sb_0 - spread), upper=float(sb_0 + spread),
    )


@dataclass(frozen=True)
class DiscordancyReport:
    """Intersection of the hull-based and restriction-based bias sets."""

    overlap: bool
    intersection: tuple[float, float] | None
    ours: tuple[float, float]
    rr: RrInterval
    warning: str | None = None


def discordancy_report(
    ours: tuple[float, float], rr: RrInterval
) -> DiscordancyReport:
    """Intersect the hull-based bias set with a restriction-based one.

    Under the smoothness restriction the two sets are disjoint exactly
    when M is smaller than the observed bias change |SB_0 - SB_{-1}|;
    the report then warns against such values of M. Relative-magnitude
    sets always overlap the hull (they contain SB_0).
    """
    lo = max(ours[0], rr.lower)
    hi = min(ours[1], rr.upper)
    if lo <= hi:
        return DiscordancyReport(
            overlap=True, intersection=(float(lo), float(hi)),
            ours=(float(ours[0]), float(ours[1])), rr=rr,
        )
    warning = None
    if rr.restriction == "smoothness":
        # hull width equals |SB_0 - SB_{-1}| when built from {-1, 0}
        observed_change = ours[1] - ours[0]
        warning = (
            f"empty intersection: smoothness cap M={rr.parameter:g} is"
            f" below the observed bias change {observed_change:g};"
            " smoothness restrictions with M below that change contradict"
            " the data and should not be used"
        )
    return DiscordancyReport(
        overlap=False, intersection=None,
        ours=(float(ours[0]), float(ours[1])), rr=rr, warning=warning,
    )
