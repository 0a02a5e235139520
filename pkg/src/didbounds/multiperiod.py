"""Multi-period treatment designs: paths, per-period ATT bounds, TWFE.

Units are classified by their realized treatment path over the
treatment periods. Per-period difference-in-means contrasts between two
path groups, minus the hull of baseline selection biases between the
same groups, bound the path-specific ATT in each period. Under
staggered adoption the same contrasts are the interaction coefficients
of a fully saturated two-way fixed effects regression, which gives a
convenient route to per-baseline confidence intervals; their hull over
baseline choices is the union confidence bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .bootstrap import (
    BootstrapPlan,
    ConfidenceBounds,
    bootstrap_estimates,
    union_confidence_bounds,
)
from .bounds import DrSpec, IdentifiedInterval
from .errors import (
    CollinearDesign,
    EmptyCell,
    TreatmentReversalInStaggeredMode,
    UnbalancedPanel,
    WeightSumInvalid,
)
from .panel import InformationSet, PanelDataset
from .regression import (
    DesignMatrix,
    fit_logit,
    fit_ols,
    predict_probability,
    quadratic_expansion,
)
from .selection import BiasSet

__all__ = [
    "TreatmentPath",
    "GroupCode",
    "PathAssignment",
    "TwfeResult",
    "UnionCiResult",
    "classify_paths",
    "theta_dim_t",
    "att_bounds_t",
    "twfe_fit",
    "twfe_bootstrap_se",
    "twfe_union_ci",
    "att_union_ci",
    "weighted_att_bounds",
    "default_period_weights",
    "ever_treated_att_bounds",
    "tau_dr_staggered",
]


# =============================================================================
# paths and groups
# =============================================================================

@dataclass(frozen=True)
class TreatmentPath:
    """Realized 0/1 treatment vector over the treatment periods.

    The pre-treatment status is untreated by construction and not
    stored. Staggered designs realize only the monotone non-decreasing
    paths (never treated, plus one path per adoption period).
    """

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("path entries must be 0/1")
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))

    @property
    def is_monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.bits, self.bits[1:]))

    @property
    def ever_treated(self) -> bool:
        return any(self.bits)

    def __len__(self) -> int:
        return len(self.bits)


@dataclass(frozen=True)
class GroupCode:
    """Staggered adoption group: g = 0 never treated, g = k first
    treated at the k-th treatment period."""

    g: int
    path: TreatmentPath
    first_treated: int | None  # period label, None for never treated


@dataclass
class PathAssignment:
    """Result of classifying units into treatment paths."""

    treatment_periods: list[int]
    paths: list[TreatmentPath]            # distinct realized paths
    unit_path_index: np.ndarray           # per unit code, index into paths
    unit_labels: np.ndarray
    staggered: bool
    group_codes: list[GroupCode] | None = None   # aligned with paths if staggered
    unit_group: np.ndarray | None = None         # per unit code, g index

    def path_of(self, unit_label) -> TreatmentPath:
        code = int(np.flatnonzero(self.unit_labels == unit_label)[0])
        return self.paths[self.unit_path_index[code]]

    def unit_mask(self, paths: TreatmentPath | tuple | Iterable) -> np.ndarray:
        """Boolean mask over unit codes whose path is in `paths`."""
        wanted = _normalize_paths(paths, len(self.treatment_periods))
        idx = [i for i, p in enumerate(self.paths) if p in wanted]
        return np.isin(self.unit_path_index, idx)

    def group_mask(self, g: int) -> np.ndarray:
        if self.unit_group is None:
            raise TreatmentReversalInStaggeredMode(
                "group codes require a staggered design"
            )
        return self.unit_group == g

    def never_treated_path(self) -> TreatmentPath:
        return TreatmentPath(tuple(0 for _ in self.treatment_periods))

    def paths_with_status(self, t: int, treated: bool) -> list[TreatmentPath]:
        """Realized paths whose status at period t matches `treated`."""
        j = self.treatment_periods.index(int(t))
        return [p for p in self.paths if bool(p.bits[j]) == treated]

    def group_for(self, g: int) -> GroupCode:
        if self.group_codes is None:
            raise TreatmentReversalInStaggeredMode(
                "group codes require a staggered design"
            )
        for code in self.group_codes:
            if code.g == g:
                return code
        raise EmptyCell(None, f"group g={g}")


def _normalize_paths(paths, width: int) -> set[TreatmentPath]:
    if isinstance(paths, TreatmentPath):
        return {paths}
    if isinstance(paths, tuple) and all(isinstance(b, int) for b in paths):
        return {TreatmentPath(paths)}
    out = set()
    for p in paths:
        out |= _normalize_paths(p, width)
    return out


def classify_paths(
    ds: PanelDataset,
    treatment_periods: list[int] | None = None,
    assert_staggered: bool = False,
) -> PathAssignment:
    """Assign each unit its realized treatment path.

    Treatment periods default to every period in which some unit is
    treated. Each unit must be observed at every treatment period.
    The staggered flag is set when all realized paths are monotone;
    asserting staggeredness turns a 1->0 reversal into an error.
    """
    if ds.treatment_scheme != "multi_period_paths":
        raise ValueError(
            "path classification requires the multi_period_paths scheme"
        )
    if treatment_periods is None:
        # every period from the first treatment onward, so interior
        # all-untreated periods still show up in the paths
        cut = ds.first_treatment_period
        treatment_periods = [p for p in ds.periods if p >= cut]
        if not treatment_periods:
            treatment_periods = [int(ds.periods[-1])]
    treatment_periods = sorted(int(p) for p in treatment_periods)

    n_units = ds.n_units
    width = len(treatment_periods)
    D = np.full((n_units, width), -1, dtype=np.int8)
    for j, p in enumerate(treatment_periods):
        rows = ds.rows_at(p)
        D[ds.unit_codes[rows], j] = ds.treated[rows]
    missing = np.argwhere(D < 0)
    if missing.size:
        u, j = missing[0]
        raise UnbalancedPanel(
            f"unit {ds.unit_labels[u]!r} not observed at treatment period"
            f" {treatment_periods[j]}"
        )

    if width <= 62:
        # paths are 0/1 vectors: a base-2 key makes the unique cheap
        key = D.astype(np.int64) @ (np.int64(1) << np.arange(width,
                                                             dtype=np.int64))
        unique_keys, inverse = np.unique(key, return_inverse=True)
        unique_rows = ((unique_keys[:, None] >> np.arange(width)) & 1)
    else:
        unique_rows, inverse = np.unique(D, axis=0, return_inverse=True)
    paths = [TreatmentPath(tuple(int(b) for b in row)) for row in unique_rows]
    monotone = all(p.is_monotone for p in paths)
    if assert_staggered and not monotone:
        bad = next(p for p in paths if not p.is_monotone)
        u = int(np.flatnonzero(inverse == paths.index(bad))[0])
        raise TreatmentReversalInStaggeredMode(
            f"unit {ds.unit_labels[u]!r} follows non-monotone path"
            f" {bad.bits}"
        )

    group_codes = None
    unit_group = None
    if monotone:
        group_codes = []
        path_group = np.empty(len(paths), dtype=np.int64)
        for i, p in enumerate(paths):
            if p.ever_treated:
                first = p.bits.index(1)
                g = first + 1
                label = treatment_periods[first]
            else:
                g, label = 0, None
            path_group[i] = g
            group_codes.append(GroupCode(g=g, path=p, first_treated=label))
        unit_group = path_group[inverse]

    return PathAssignment(
        treatment_periods=treatment_periods,
        paths=paths,
        unit_path_index=inverse,
        unit_labels=ds.unit_labels,
        staggered=monotone,
        group_codes=group_codes,
        unit_group=unit_group,
    )


# =============================================================================
# per-period estimands and bounds
# =============================================================================

def _group_period_mean(
    ds: PanelDataset, unit_mask: np.ndarray, period: int, what: str
) -> float:
    rows = ds.rows_at(int(period))
    rows = rows[unit_mask[ds.unit_codes[rows]]]
    if rows.size == 0:
        raise EmptyCell(period, what)
    return float(ds.outcome[rows].mean())


def theta_dim_t(
    ds: PanelDataset,
    path_to,
    path_from,
    t: int,
    assignment: PathAssignment | None = None,
) -> float:
    """Difference in mean outcomes at period t between two path groups.

    Each side may be a single path or a collection of paths (e.g. all
    paths currently treated at t, for designs where the outcome depends
    only on the current status).
    """
    if assignment is None:
        assignment = classify_paths(ds)
    to_mask = assignment.unit_mask(path_to)
    from_mask = assignment.unit_mask(path_from)
    return (
        _group_period_mean(ds, to_mask, t, f"path {path_to}")
        - _group_period_mean(ds, from_mask, t, f"path {path_from}")
    )


def att_bounds_t(
    ds: PanelDataset,
    path_to,
    path_from,
    t: int,
    info: InformationSet,
    assignment: PathAssignment | None = None,
) -> IdentifiedInterval:
    """ATT bounds at period t for the path_from -> path_to contrast.

    The bias hull is built from baseline selection biases between the
    same two path groups at each pre-treatment period in `info`.
    """
    if assignment is None:
        assignment = classify_paths(ds)
    if info.kind != "pre_periods":
        raise ValueError("multi-period bounds require a pre-period set")
    cut = min(assignment.treatment_periods)
    to_mask = assignment.unit_mask(path_to)
    from_mask = assignment.unit_mask(path_from)
    per_element: dict = {}
    weights: dict = {}
    for el in info.elements:
        p = int(el.label)
        if p >= cut:
            raise ValueError(
                f"information period {p} is not before the first treatment"
                f" period {cut}"
            )
        per_element[p] = (
            _group_period_mean(ds, to_mask, p, f"path {path_to}")
            - _group_period_mean(ds, from_mask, p, f"path {path_from}")
        )
        weights[p] = el.weight
    values = list(per_element.values())
    bias = BiasSet(
        per_element=per_element,
        lower=float(min(values)),
        upper=float(max(values)),
        kind="level",
        weights=weights,
    )
    theta = theta_dim_t(ds, path_to, path_from, t, assignment)
    return IdentifiedInterval(
        lower=float(theta - bias.upper),
        upper=float(theta - bias.lower),
        point_estimand_label="theta_dim",
        bias=bias,
    )


# =============================================================================
# two-way fixed effects regression (staggered designs)
# =============================================================================

@dataclass
class TwfeResult:
    """Coefficients of the saturated group-by-period regression.

    ``theta[(g, s)]`` is the interaction coefficient for adoption group
    g at treatment period s: on a balanced panel it equals the
    double difference
    (mean Y_s | g) - (mean Y_s | never) - [(mean Y_base | g) - (mean Y_base | never)].
    """

    beta: float
    gamma: dict[int, float]
    delta: dict[int, float]
    theta: dict[tuple[int, int], float]
    baseline_period: int
    treatment_periods: list[int]
    groups: list[GroupCode]
    n_units: int
    theta_se: dict[tuple[int, int], float] | None = None


def twfe_fit(
    ds: PanelDataset,
    baseline_period: int,
    treatment_periods: list[int] | None = None,
    assignment: PathAssignment | None = None,
) -> TwfeResult:
    """Fit the fully saturated two-way fixed effects regression.

    Rows at the baseline period plus all treatment periods enter an OLS
    with group dummies, period dummies, and their interactions. The
    panel must be balanced over the included periods and adoption must
    be staggered.
    """
    if assignment is None:
        assignment = classify_paths(ds, treatment_periods,
                                    assert_staggered=True)
    elif not assignment.staggered:
        raise TreatmentReversalInStaggeredMode(
            "TWFE requires staggered adoption"
        )
    tps = assignment.treatment_periods
    baseline_period = int(baseline_period)
    if baseline_period >= min(tps):
        raise ValueError(
            f"baseline period {baseline_period} must precede the first"
            f" treatment period {min(tps)}"
        )
    included = [baseline_period] + list(tps)

    codes = ds.unit_codes
    row_sets = [ds.rows_at(p) for p in included]
    n_units = ds.n_units
    for p, rows in zip(included, row_sets):
        if rows.size != n_units:
            raise UnbalancedPanel(
                f"period {p} has {rows.size} rows for {n_units} units"
            )
    rows = np.concatenate(row_sets)
    period = ds.period[rows]
    y = ds.outcome[rows]
    group = assignment.unit_group[codes[rows]]

    gs = sorted({c.g for c in assignment.group_codes if c.g != 0})
    if not gs or 0 not in {c.g for c in assignment.group_codes}:
        raise EmptyCell(baseline_period, "never-treated group")
    cols = [np.ones(len(rows))]
    labels = ["const"]
    for g in gs:
        cols.append((group == g).astype(float))
        labels.append(f"group_{g}")
    for s in tps:
        cols.append((period == s).astype(float))
        labels.append(f"period_{s}")
    for s in tps:
        for g in gs:
            cols.append(((group == g) & (period == s)).astype(float))
            labels.append(f"group_{g}:period_{s}")
    design = DesignMatrix(np.column_stack(cols), tuple(labels))
    fit = fit_ols(design, y)
    if fit.rank_deficient:
        raise CollinearDesign(
            "saturated group-by-period design is rank deficient"
        )
    coef = dict(zip(labels, fit.coefficients))
    return TwfeResult(
        beta=float(coef["const"]),
        gamma={g: float(coef[f"group_{g}"]) for g in gs},
        delta={s: float(coef[f"period_{s}"]) for s in tps},
        theta={(g, s): float(coef[f"group_{g}:period_{s}"])
               for g in gs for s in tps},
        baseline_period=baseline_period,
        treatment_periods=list(tps),
        groups=list(assignment.group_codes),
        n_units=n_units,
    )


def twfe_bootstrap_se(
    ds: PanelDataset,
    baseline_period: int,
    plan: BootstrapPlan,
    treatment_periods: list[int] | None = None,
) -> TwfeResult:
    """TWFE fit with bootstrap standard errors on the interaction terms.

    Unit-level resampling; the returned result carries ``theta_se`` for
    every (group, period) coefficient.
    """
    fit = twfe_fit(ds, baseline_period, treatment_periods)
    keys = sorted(fit.theta)

    def all_thetas(d: PanelDataset) -> np.ndarray:
        rep = twfe_fit(d, baseline_period, treatment_periods)
        missing = [k for k in keys if k not in rep.theta]
        if missing:
            raise EmptyCell(missing[0][1], f"group g={missing[0][0]}")
        return np.array([rep.theta[k] for k in keys])

    boot = bootstrap_estimates(ds, all_thetas, plan)
    se = boot.estimates.std(axis=0, ddof=1)
    fit.theta_se = {k: float(se[j]) for j, k in enumerate(keys)}
    return fit


@dataclass
class UnionCiResult:
    """Union confidence bounds with the per-baseline point estimates."""

    point_interval: IdentifiedInterval
    bounds: ConfidenceBounds
    points: dict
    n_failed: int


def twfe_union_ci(
    ds: PanelDataset,
    info: InformationSet,
    g: int,
    s: int,
    plan: BootstrapPlan,
    treatment_periods: list[int] | None = None,
) -> UnionCiResult:
    """Union CI for the group-g period-s effect over baseline choices.

    Runs one TWFE fit per information period (that period as baseline,
    plus all treatment periods), bootstraps the interaction coefficient
    jointly across baselines, and returns the hull of the per-baseline
    percentile intervals.
    """
    if info.kind != "pre_periods":
        raise ValueError("TWFE union CIs require a pre-period set")
    baselines = sorted(int(el.label) for el in info.elements)
    s = int(s)

    def per_baseline(d: PanelDataset) -> np.ndarray:
        assignment = classify_paths(d, treatment_periods,
                                    assert_staggered=True)
        out = []
        for b in baselines:
            fit = twfe_fit(d, b, assignment=assignment)
            if (g, s) not in fit.theta:
                # a resample can drop an entire adoption group
                raise EmptyCell(s, f"group g={g}")
            out.append(fit.theta[(g, s)])
        return np.array(out)

    points = per_baseline(ds)
    result = bootstrap_estimates(ds, per_baseline, plan)
    per_el = {b: (float(points[j]), result.estimates[:, j])
              for j, b in enumerate(baselines)}
    cb = union_confidence_bounds(per_el, plan.ci_level)
    interval = IdentifiedInterval(
        lower=float(points.min()),
        upper=float(points.max()),
        point_estimand_label=f"twfe theta[g={g}, s={s}]",
    )
    return UnionCiResult(
        point_interval=interval,
        bounds=cb,
        points={b: float(points[j]) for j, b in enumerate(baselines)},
        n_failed=result.n_failed,
    )


def att_union_ci(
    ds: PanelDataset,
    path_to,
    path_from,
    t: int,
    info: InformationSet,
    plan: BootstrapPlan,
) -> UnionCiResult:
    """Union CI for the per-period path contrast via difference in means.

    The per-element estimands are the period-t contrast minus each
    information period's baseline bias, bootstrapped jointly at the unit
    level. Works for staggered and non-staggered designs alike.
    """
    baselines = sorted(int(el.label) for el in info.elements)

    def per_element(d: PanelDataset) -> np.ndarray:
        assignment = classify_paths(d)
        to_mask = assignment.unit_mask(path_to)
        from_mask = assignment.unit_mask(path_from)
        theta = (
            _group_period_mean(d, to_mask, t, f"path {path_to}")
            - _group_period_mean(d, from_mask, t, f"path {path_from}")
        )
        return np.array([
            theta
            - (_group_period_mean(d, to_mask, b, f"path {path_to}")
               - _group_period_mean(d, from_mask, b, f"path {path_from}"))
            for b in baselines
        ])

    points = per_element(ds)
    result = bootstrap_estimates(ds, per_element, plan)
    per_el = {b: (float(points[j]), result.estimates[:, j])
              for j, b in enumerate(baselines)}
    cb = union_confidence_bounds(per_el, plan.ci_level)
    interval = IdentifiedInterval(
        lower=float(points.min()),
        upper=float(points.max()),
        point_estimand_label="theta_dim",
    )
    return UnionCiResult(
        point_interval=interval,
        bounds=cb,
        points={b: float(points[j]) for j, b in enumerate(baselines)},
        n_failed=result.n_failed,
    )


# =============================================================================
# aggregation
# =============================================================================

def weighted_att_bounds(
    per_t: Mapping[int, IdentifiedInterval],
    weights: Mapping[int, float],
) -> IdentifiedInterval:
    """Weighted average of per-period intervals (endpointwise).

    Weights must be nonnegative and sum to one over the same periods.
    """
    if set(per_t) != set(weights):
        raise WeightSumInvalid("weights must cover exactly the periods given")
    w = np.array([weights[t] for t in per_t], dtype=float)
    if (w < 0).any() or abs(w.sum() - 1.0) > 1e-9:
        raise WeightSumInvalid(
            f"weights must be nonnegative and sum to 1, got sum {w.sum()!r}"
        )
    lower = sum(weights[t] * per_t[t].lower for t in per_t)
    upper = sum(weights[t] * per_t[t].upper for t in per_t)
    return IdentifiedInterval(
        lower=float(lower), upper=float(upper),
        point_estimand_label="weighted theta_dim",
    )


def default_period_weights(
    ds: PanelDataset, periods: Iterable[int]
) -> dict[int, float]:
    """Treated-group cardinality shares: w_t = n_t / sum n_t."""
    counts = {}
    for t in periods:
        rows = ds.rows_at(int(t))
        counts[int(t)] = int((ds.treated[rows] == 1).sum())
    total = sum(counts.values())
    if total == 0:
        raise WeightSumInvalid("no treated observations in the given periods")
    return {t: c / total for t, c in counts.items()}


def ever_treated_att_bounds(
    ds: PanelDataset,
    info: InformationSet,
    periods: list[int] | None = None,
    assignment: PathAssignment | None = None,
) -> tuple[IdentifiedInterval, dict[int, IdentifiedInterval]]:
    """Aggregate ATT bounds for ever-treated units.

    Per period, averages the never-treated-contrast intervals over the
    realized treated paths with sample-share weights; periods are then
    combined with treated-count weights.
    """
    if assignment is None:
        assignment = classify_paths(ds)
    if periods is None:
        periods = list(assignment.treatment_periods)
    zero = assignment.never_treated_path()
    treated_paths = [p for p in assignment.paths if p.ever_treated]
    if not treated_paths:
        raise EmptyCell(periods[0], "ever-treated units")
    shares = np.array([
        float(assignment.unit_mask(p).sum()) for p in treated_paths
    ])
    shares = shares / shares.sum()
    per_t: dict[int, IdentifiedInterval] = {}
    for t in periods:
        lo = up = 0.0
        for p, share in zip(treated_paths, shares):
            iv = att_bounds_t(ds, p, zero, t, info, assignment)
            lo += share * iv.lower
            up += share * iv.upper
        per_t[int(t)] = IdentifiedInterval(
            lower=float(lo), upper=float(up),
            point_estimand_label="theta_dim",
        )
    weights = default_period_weights(ds, periods)
    return weighted_att_bounds(per_t, weights), per_t


# =============================================================================
# doubly-robust estimand for staggered adoption with covariates
# =============================================================================

def _stacked_unit_covariates(
    ds: PanelDataset, periods: list[int]
) -> tuple[np.ndarray, list[str]]:
    """Per-unit covariate vector: covariates at each period, concatenated."""
    k = len(ds.covariate_names)
    n_units = ds.n_units
    X = np.full((n_units, k * len(periods)), np.nan)
    names: list[str] = []
    for j, p in enumerate(periods):
        rows = ds.rows_at(int(p))
        X[ds.unit_codes[rows], j * k:(j + 1) * k] = ds.covariates[rows]
        names += [f"{name}@{p}" for name in ds.covariate_names]
    if np.isnan(X).any():
        u = int(np.argwhere(np.isnan(X))[0, 0])
        raise UnbalancedPanel(
            f"unit {ds.unit_labels[u]!r} lacks covariates at some"
            " treatment period"
        )
    return X, names


def tau_dr_staggered(
    ds: PanelDataset,
    g: int,
    t: int,
    spec: DrSpec = DrSpec(),
    assignment: PathAssignment | None = None,
) -> float:
    """Doubly-robust period-t effect for adoption group g vs never treated.

    Group propensities are one-vs-rest logits on the per-period
    covariates, renormalized so they sum to one; the outcome model is
    fit on never-treated units. Consistent when either the propensities
    or the outcome model is correct. Without covariates this collapses
    exactly to the difference in means between group g and the
    never-treated group at period t.
    """
    if assignment is None:
        assignment = classify_paths(ds, assert_staggered=True)
    elif not assignment.staggered:
        raise TreatmentReversalInStaggeredMode(
            "group propensities require staggered adoption"
        )
    t = int(t)
    dg = assignment.group_mask(g).astype(float)
    d0 = assignment.group_mask(0).astype(float)
    if dg.sum() == 0:
        raise EmptyCell(t, f"group g={g}")
    if d0.sum() == 0:
        raise EmptyCell(t, "never-treated group")

    rows_t = ds.rows_at(t)
    if rows_t.size != ds.n_units:
        raise UnbalancedPanel(
            f"period {t} has {rows_t.size} rows for {ds.n_units} units"
        )
    y = np.empty(ds.n_units)
    y[ds.unit_codes[rows_t]] = ds.outcome[rows_t]

    has_x = len(ds.covariate_names) > 0
    if has_x and spec.ps_spec == "logit":
        X, names = _stacked_unit_covariates(ds, assignment.treatment_periods)
        design = DesignMatrix.with_intercept(X, names)
        present = sorted({c.g for c in assignment.group_codes})
        raw = np.empty((ds.n_units, len(present)))
        for j, grp in enumerate(present):
            member = assignment.group_mask(grp).astype(float)
            fit = fit_logit(design, member, tol=spec.logit_tol,
                            max_iter=spec.logit_max_iter)
            raw[:, j] = predict_probability(fit, design, clip=spec.clip)
        probs = raw / raw.sum(axis=1, keepdims=True)
        pg = probs[:, present.index(g)]
        p0 = np.maximum(probs[:, present.index(0)], spec.clip)
        ratio = pg / p0
    else:
        ratio = np.full(ds.n_units, dg.mean() / d0.mean())

    if has_x and spec.or_spec != "known_constant":
        X, names = _stacked_unit_covariates(ds, assignment.treatment_periods)
        if spec.or_spec == "quadratic":
            X, names = quadratic_expansion(X, names)
        design = DesignMatrix.with_intercept(X, names)
        ctrl = d0 == 1.0
        or_fit = fit_ols(
            DesignMatrix(design.values[ctrl], design.column_labels), y[ctrl]
        )
        mu0 = or_fit.predict(design)
    else:
        mu0 = np.full(ds.n_units, y[d0 == 1.0].mean())

    value = np.mean((dg - ratio * d0) * (y - mu0)) / dg.mean()
    return float(value)
