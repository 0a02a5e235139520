"""Baseline selection biases and their convex hulls.

The selection bias at an information element is the difference in mean
baseline outcomes between the treatment and control groups within that
element's cell. The convex hull of these per-element biases is the set
the bounds in :mod:`didbounds.bounds` subtract from the post-period
contrast. A variation-set variant bounds the post-period bias by the
baseline bias plus the hull of observed period-to-period bias changes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EmptyCell, NeedsAtLeastTwoPeriods
from .panel import CONTROL, TREATED, GroupFilter, InformationSet, PanelDataset

__all__ = ["BiasSet", "selection_bias_at", "bias_set", "bias_variation_set",
           "sb_series"]


@dataclass(frozen=True)
class BiasSet:
    """Per-element selection biases and their convex hull.

    ``kind="level"`` holds biases themselves: ``lower``/``upper`` are the
    exact min/max over ``per_element``. ``kind="variation"`` holds
    period-to-period bias changes; ``lower``/``upper`` are then the
    implied bounds on the post-period bias (baseline bias plus the hull
    of the changes).
    """

    per_element: dict
    lower: float
    upper: float
    kind: str = "level"
    weights: dict = field(default_factory=dict)
    baseline: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("level", "variation"):
            raise ValueError(f"unknown bias set kind {self.kind!r}")
        if not self.per_element:
            raise ValueError("bias set must be nonempty")
        if self.lower > self.upper:
            raise ValueError("bias set lower bound exceeds upper bound")
        if self.kind == "level":
            values = list(self.per_element.values())
            if self.lower != min(values) or self.upper != max(values):
                raise ValueError("level hull must equal min/max of elements")

    @classmethod
    def from_values(cls, per_element: dict, weights: dict | None = None) -> "BiasSet":
        """Level set from a label -> bias mapping (uniform weights by default)."""
        values = list(per_element.values())
        if weights is None:
            weights = {k: 1.0 / len(per_element) for k in per_element}
        return cls(
            per_element=dict(per_element),
            lower=float(min(values)),
            upper=float(max(values)),
            kind="level",
            weights=dict(weights),
        )

    @property
    def degenerate(self) -> bool:
        """True when all biases coincide (the parallel-trends case)."""
        return self.lower == self.upper

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _element_cells(
    ds: PanelDataset,
    info: InformationSet,
    label,
    treated: GroupFilter,
    control: GroupFilter,
) -> tuple[int, GroupFilter, GroupFilter]:
    """Resolve the (period, treated-cell, control-cell) for one element."""
    if info.kind == "pre_periods":
        return int(label), treated, control
    # covariate-style kinds condition both cells on the element level
    period = info.period
    if period is None:
        pre = ds.pre_periods
        period = pre[-1] if pre else ds.periods[0]
    constraint = ((info.covariate, label),)
    t = GroupFilter(treated=treated.treated, where=treated.where + constraint)
    c = GroupFilter(treated=control.treated, where=control.where + constraint)
    return int(period), t, c


def selection_bias_at(
    ds: PanelDataset,
    info: InformationSet,
    element,
    treated: GroupFilter = TREATED,
    control: GroupFilter = CONTROL,
) -> float:
    """Selection bias at one information element.

    For ``pre_periods`` elements this is the treated-minus-control mean
    outcome at that pre-treatment period; for covariate-style elements
    it is the same contrast within the covariate cell at the baseline
    period. Raises :class:`EmptyCell` when either side is empty.
    """
    label = getattr(element, "label", element)
    period, t, c = _element_cells(ds, info, label, treated, control)
    return ds.cell_mean(period, t) - ds.cell_mean(period, c)


def bias_set(
    ds: PanelDataset,
    info: InformationSet,
    treated: GroupFilter = TREATED,
    control: GroupFilter = CONTROL,
) -> BiasSet:
    """Per-element selection biases with their convex-hull endpoints."""
    per_element: dict = {}
    weights: dict = {}
    for el in info.elements:
        try:
            per_element[el.label] = selection_bias_at(ds, info, el, treated,
                                                      control)
        except EmptyCell as exc:
            raise EmptyCell(exc.period, exc.group) from None
        weights[el.label] = el.weight
    values = list(per_element.values())
    return BiasSet(
        per_element=per_element,
        lower=float(min(values)),
        upper=float(max(values)),
        kind="level",
        weights=weights,
    )


def sb_series(
    ds: PanelDataset,
    info: InformationSet,
    treated: GroupFilter = TREATED,
    control: GroupFilter = CONTROL,
) -> list[tuple[float, float]]:
    """Ordered (period, selection bias) pairs for a pre-period set."""
    if info.kind != "pre_periods":
        raise ValueError("sb_series requires a pre-period information set")
    pairs = [
        (float(el.label), selection_bias_at(ds, info, el, treated, control))
        for el in info.elements
    ]
    return sorted(pairs)


def bias_variation_set(
    ds: PanelDataset,
    info: InformationSet,
    treated: GroupFilter = TREATED,
    control: GroupFilter = CONTROL,
) -> BiasSet:
    """Hull of period-to-period bias changes, shifted to bound the post bias.

    Requires a ``pre_periods`` information set whose labels are at least
    two consecutive integers. The returned set stores the changes
    ``SB_t - SB_{t-1}`` per later period t, and ``lower``/``upper`` give
    the implied post-period bias bounds ``SB_base + [min, max]`` of the
    changes, where ``SB_base`` is the bias at the latest pre period.
    """
    if info.kind != "pre_periods":
        raise NeedsAtLeastTwoPeriods(
            "bias variation sets require a pre-period information set"
        )
    labels = sorted(int(el.label) for el in info.elements)
    if len(labels) < 2:
        raise NeedsAtLeastTwoPeriods(
            f"need at least two pre-treatment periods, got {len(labels)}"
        )
    if labels != list(range(labels[0], labels[-1] + 1)):
        raise NeedsAtLeastTwoPeriods(
            f"pre-treatment periods must be consecutive, got {labels}"
        )
    sb = {
        t: selection_bias_at(ds, info, t, treated, control) for t in labels
    }
    deltas = {t: sb[t] - sb[t - 1] for t in labels[1:]}
    base = sb[labels[-1]]
    values = list(deltas.values())
    return BiasSet(
        per_element=deltas,
        lower=float(base + min(values)),
        upper=float(base + max(values)),
        kind="variation",
        weights={t: 1.0 / len(deltas) for t in deltas},
        baseline=float(base),
    )
