"""Long-format panel data: validated container, cell-mean queries, overlap checks.

A :class:`PanelDataset` holds observations ``(unit, period, outcome,
treatment, covariates)`` in column arrays. All estimators in this package
consume cells of the form ``(period, group)`` through
:func:`cell_mean`; the container is immutable after construction, so
every query is safe to evaluate concurrently (and across bootstrap
replicates).

Three treatment schemes are supported:

``binary_single_post``
    One post-treatment period, treatment is a 0/1 indicator constant
    within unit.
``multi_period_paths``
    One treatment value per (unit, period); the earliest period is
    untreated for every unit.
``donor_pool``
    One treated unit/series plus donor series; treatment flags the
    treated unit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import (
    DuplicateUnitPeriod,
    EmptyCell,
    EmptyDataset,
    MissingColumn,
    NonNumericOutcome,
)

SCHEMES = ("binary_single_post", "multi_period_paths", "donor_pool")

__all__ = [
    "SchemaConfig",
    "Observation",
    "GroupFilter",
    "PanelDataset",
    "InfoElement",
    "InformationSet",
    "OverlapReport",
    "load_panel",
    "cell_mean",
    "overlap_check",
]


# =============================================================================
# Schema and row types
# =============================================================================

@dataclass(frozen=True)
class SchemaConfig:
    """Column mapping for CSV ingestion.

    Parameters
    ----------
    unit, period, outcome, treatment : str
        Column names in the input file.
    covariates : tuple of str
        Covariate columns, possibly empty.
    scheme : str
        One of ``binary_single_post`` (default), ``multi_period_paths``,
        ``donor_pool``.
    post_period : int, optional
        The post-treatment period under ``binary_single_post``.
        Defaults to the largest period in the data.
    """

    unit: str = "unit"
    period: str = "period"
    outcome: str = "outcome"
    treatment: str = "treatment"
    covariates: tuple[str, ...] = ()
    scheme: str = "binary_single_post"
    post_period: int | None = None

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown treatment scheme {self.scheme!r}")
        object.__setattr__(self, "covariates", tuple(self.covariates))

    @classmethod
    def from_json(cls, path: str | Path) -> "SchemaConfig":
        """Load a column mapping from a JSON file."""
        with open(path) as fh:
            raw = json.load(fh)
        known = {"unit", "period", "outcome", "treatment", "covariates",
                 "scheme", "post_period"}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown schema keys: {sorted(unknown)}")
        return cls(**raw)


@dataclass(frozen=True)
class Observation:
    """A single (unit, period) record."""

    unit_id: object
    period: int
    outcome: float
    treated: int
    covariates: tuple[float, ...] = ()


@dataclass(frozen=True)
class GroupFilter:
    """Row filter used by cell queries.

    ``treated`` selects on the treatment indicator (``None`` keeps both
    groups); ``where`` holds covariate equality constraints as
    ``(column, value)`` pairs.
    """

    treated: int | None = None
    where: tuple[tuple[str, float], ...] = ()

    def __str__(self) -> str:  # used in EmptyCell messages
        parts = []
        if self.treated is not None:
            parts.append(f"D={self.treated}")
        parts += [f"{k}={v}" for k, v in self.where]
        return "{" + ", ".join(parts) + "}" if parts else "{all}"


TREATED = GroupFilter(treated=1)
CONTROL = GroupFilter(treated=0)


# =============================================================================
# PanelDataset
# =============================================================================

class PanelDataset:
    """Validated long-format panel, stored as column arrays.

    Construct via :func:`load_panel`, :meth:`from_frame`, or
    :meth:`from_observations`. Instances are immutable; mutating the
    underlying arrays is not supported.

    Attributes
    ----------
    periods : list of int
        Sorted distinct period labels.
    treatment_scheme : str
        One of the supported schemes.
    covariate_names : list of str
    post_period : int or None
        Flagged post period (``binary_single_post`` only).
    """

    def __init__(
        self,
        unit: np.ndarray,
        period: np.ndarray,
        outcome: np.ndarray,
        treated: np.ndarray,
        covariates: np.ndarray | None = None,
        covariate_names: tuple[str, ...] = (),
        treatment_scheme: str = "binary_single_post",
        post_period: int | None = None,
        validate: bool = True,
    ) -> None:
        n = len(outcome)
        self._unit = np.asarray(unit)
        self._period = np.asarray(period, dtype=np.int64)
        self._outcome = np.asarray(outcome, dtype=np.float64)
        self._treated = np.asarray(treated, dtype=np.int64)
        k = len(covariate_names)
        if covariates is None:
            covariates = np.empty((n, 0), dtype=np.float64)
        self._X = np.asarray(covariates, dtype=np.float64).reshape(n, k)
        self.covariate_names = list(covariate_names)
        self.treatment_scheme = treatment_scheme
        self.periods = [int(p) for p in np.unique(self._period)]
        if treatment_scheme == "binary_single_post":
            post_period = int(post_period if post_period is not None
                              else max(self.periods, default=0))
        self.post_period = post_period
        # unit codes give O(1) cluster resampling
        self._unit_labels, self._unit_codes = np.unique(self._unit,
                                                        return_inverse=True)
        self._period_rows: dict[int, np.ndarray] = {}
        self._unit_rows: np.ndarray | None = None
        if validate:
            self._validate()

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------

    @classmethod
    def from_frame(cls, df: pd.DataFrame, schema: SchemaConfig) -> "PanelDataset":
        """Build and validate a dataset from a DataFrame under `schema`."""
        if len(df) == 0:
            raise EmptyDataset("input has no rows")
        for col in (schema.unit, schema.period, schema.outcome,
                    schema.treatment, *schema.covariates):
            if col not in df.columns:
                raise MissingColumn(f"column {col!r} not found in input")
        period = _numeric_column(df[schema.period], schema.period, integral=True)
        outcome = _numeric_column(df[schema.outcome], schema.outcome)
        treated = _numeric_column(df[schema.treatment], schema.treatment,
                                  integral=True)
        cov_cols = [_numeric_column(df[c], c) for c in schema.covariates]
        X = np.column_stack(cov_cols) if cov_cols else None
        return cls(
            unit=df[schema.unit].to_numpy(),
            period=period,
            outcome=outcome,
            treated=treated,
            covariates=X,
            covariate_names=tuple(schema.covariates),
            treatment_scheme=schema.scheme,
            post_period=schema.post_period,
        )

    @classmethod
    def from_observations(
        cls,
        rows: list[Observation],
        covariate_names: tuple[str, ...] = (),
        treatment_scheme: str = "binary_single_post",
        post_period: int | None = None,
    ) -> "PanelDataset":
        """Build a dataset from a list of :class:`Observation` records."""
        if not rows:
            raise EmptyDataset("no observations")
        X = np.array([r.covariates for r in rows], dtype=np.float64)
        return cls(
            unit=np.array([r.unit_id for r in rows]),
            period=np.array([r.period for r in rows]),
            outcome=np.array([r.outcome for r in rows]),
            treated=np.array([r.treated for r in rows]),
            covariates=X if covariate_names else None,
            covariate_names=covariate_names,
            treatment_scheme=treatment_scheme,
            post_period=post_period,
        )

    # ------------------------------------------------------------------
    # validation
    # ------------------------------------------------------------------

    def _validate(self) -> None:
        if len(self._outcome) == 0:
            raise EmptyDataset("no observations")
        if not np.all(np.isfinite(self._outcome)):
            i = int(np.flatnonzero(~np.isfinite(self._outcome))[0])
            raise NonNumericOutcome(f"outcome is not finite at row {i}")
        if self._X.size and not np.all(np.isfinite(self._X)):
            r, c = np.argwhere(~np.isfinite(self._X))[0]
            raise NonNumericOutcome(
                f"covariate {self.covariate_names[c]!r} is missing or"
                f" non-finite at row {int(r)}"
            )
        # duplicate (unit, period) detection via a combined integer key
        nper = len(self.periods)
        pcode = np.searchsorted(np.asarray(self.periods), self._period)
        key = self._unit_codes.astype(np.int64) * nper + pcode
        if len(np.unique(key)) != len(key):
            order = np.argsort(key, kind="stable")
            dup = order[np.flatnonzero(np.diff(key[order]) == 0)[0] + 1]
            raise DuplicateUnitPeriod(
                f"duplicate (unit, period) = ({self._unit[dup]!r},"
                f" {int(self._period[dup])}) at row {int(dup)}"
            )
        bad = ~np.isin(self._treated, (0, 1))
        if self.treatment_scheme in ("binary_single_post", "donor_pool",
                                     "multi_period_paths") and bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise NonNumericOutcome(
                f"treatment must be 0/1, got {self._treated[i]} at row {i}"
            )
        if self.treatment_scheme in ("binary_single_post", "donor_pool"):
            # treatment constant within unit: per-unit sum must be 0 or count
            per_unit = np.bincount(self._unit_codes, minlength=self.n_units)
            per_unit_treated = np.bincount(
                self._unit_codes, weights=self._treated,
                minlength=self.n_units,
            )
            varies = (per_unit_treated != 0) & (per_unit_treated != per_unit)
            if varies.any():
                code = int(np.flatnonzero(varies)[0])
                raise NonNumericOutcome(
                    f"treatment varies within unit"
                    f" {self._unit_labels[code]!r}; scheme"
                    f" {self.treatment_scheme!r} requires it constant"
                )
        if self.treatment_scheme == "binary_single_post":
            if self.post_period not in self.periods:
                raise NonNumericOutcome(
                    f"post period {self.post_period} not present in data"
                )
        if self.treatment_scheme == "multi_period_paths":
            first = self.periods[0]
            at0 = self._treated[self._period == first]
            if at0.any():
                raise NonNumericOutcome(
                    f"treatment must be 0 for all units at the earliest"
                    f" period {first}"
                )

    # ------------------------------------------------------------------
    # basic queries
    # ------------------------------------------------------------------

    @property
    def n_obs(self) -> int:
        return len(self._outcome)

    @property
    def n_units(self) -> int:
        return len(self._unit_labels)

    @property
    def unit_labels(self) -> np.ndarray:
        return self._unit_labels

    @property
    def outcome(self) -> np.ndarray:
        return self._outcome

    @property
    def treated(self) -> np.ndarray:
        return self._treated

    @property
    def period(self) -> np.ndarray:
        return self._period

    @property
    def unit_codes(self) -> np.ndarray:
        return self._unit_codes

    @property
    def covariates(self) -> np.ndarray:
        return self._X

    @property
    def rows(self) -> list[Observation]:
        """Materialize all records (intended for small datasets/tests)."""
        return [
            Observation(
                unit_id=self._unit[i],
                period=int(self._period[i]),
                outcome=float(self._outcome[i]),
                treated=int(self._treated[i]),
                covariates=tuple(self._X[i]),
            )
            for i in range(self.n_obs)
        ]

    @property
    def first_treatment_period(self) -> int:
        """Earliest period in which any row is treated."""
        if self.treatment_scheme == "binary_single_post":
            return int(self.post_period)
        treated_periods = self._period[self._treated == 1]
        if treated_periods.size == 0:
            return int(self.periods[-1]) + 1
        return int(treated_periods.min())

    @property
    def pre_periods(self) -> list[int]:
        """Periods strictly before the first treatment period."""
        cut = self.first_treatment_period
        return [p for p in self.periods if p < cut]

    def rows_at(self, period: int) -> np.ndarray:
        """Row indices observed in `period` (cached)."""
        p = int(period)
        idx = self._period_rows.get(p)
        if idx is None:
            idx = np.flatnonzero(self._period == p)
            self._period_rows[p] = idx
        return idx

    def group_mask(self, group: GroupFilter) -> np.ndarray:
        """Boolean mask over all rows matching a :class:`GroupFilter`."""
        mask = np.ones(self.n_obs, dtype=bool)
        if group.treated is not None:
            mask &= self._treated == group.treated
        for name, value in group.where:
            try:
                j = self.covariate_names.index(name)
            except ValueError:
                raise MissingColumn(f"covariate {name!r} not in dataset")
            mask &= self._X[:, j] == value
        return mask

    def cell_indices(self, period: int, group: GroupFilter) -> np.ndarray:
        rows = self.rows_at(period)
        mask = self.group_mask(group)
        return rows[mask[rows]]

    def cell_mean(self, period: int, group: GroupFilter) -> float:
        """Arithmetic mean of the outcome in the (period, group) cell."""
        if int(period) not in self._period_rows and int(period) not in self.periods:
            raise EmptyCell(period, group)
        idx = self.cell_indices(period, group)
        if idx.size == 0:
            raise EmptyCell(period, group)
        return float(self._outcome[idx].mean())

    # ------------------------------------------------------------------
    # cluster resampling (bootstrap support)
    # ------------------------------------------------------------------

    def _unit_row_table(self) -> np.ndarray:
        # rows sorted by (unit, period); ragged units fall back to object rows
        if self._unit_rows is None:
            order = np.lexsort((self._period, self._unit_codes))
            counts = np.bincount(self._unit_codes, minlength=self.n_units)
            if counts.min() == counts.max():
                self._unit_rows = order.reshape(self.n_units, counts[0])
            else:
                splits = np.cumsum(counts)[:-1]
                self._unit_rows = np.array(
                    np.split(order, splits), dtype=object
                )
        return self._unit_rows

    def resample_units(self, unit_draw: np.ndarray) -> "PanelDataset":
        """New dataset built from drawn unit codes (with replacement).

        Drawn units are relabeled 0..m-1 so a unit drawn twice counts as
        two distinct clusters. Validation is skipped: the source dataset
        already passed it and relabeling preserves every invariant.
        """
        table = self._unit_row_table()
        if table.dtype == object:
            rows = np.concatenate([table[u] for u in unit_draw])
            new_units = np.concatenate(
                [np.full(len(table[u]), i) for i, u in enumerate(unit_draw)]
            )
        else:
            rows = table[unit_draw].ravel()
            width = table.shape[1]
            new_units = np.repeat(np.arange(len(unit_draw)), width)
        return PanelDataset(
            unit=new_units,
            period=self._period[rows],
            outcome=self._outcome[rows],
            treated=self._treated[rows],
            covariates=self._X[rows] if self._X.size else None,
            covariate_names=tuple(self.covariate_names),
            treatment_scheme=self.treatment_scheme,
            post_period=self.post_period,
            validate=False,
        )

    # ------------------------------------------------------------------
    # serialization
    # ------------------------------------------------------------------

    def to_frame(self) -> pd.DataFrame:
        data = {
            "unit": self._unit,
            "period": self._period,
            "outcome": self._outcome,
            "treatment": self._treated,
        }
        for j, name in enumerate(self.covariate_names):
            data[name] = self._X[:, j]
        return pd.DataFrame(data)

    def to_csv(self, path: str | Path) -> None:
        """Write the canonical CSV schema (unit, period, outcome, treatment, ...).

        Floats are written with shortest round-trip precision so that
        load(serialize(ds)) reproduces the rows exactly.
        """
        self.to_frame().to_csv(path, index=False,
                               float_format=lambda v: repr(float(v)))

    def default_schema(self) -> SchemaConfig:
        """Schema that reads back the output of :meth:`to_csv`."""
        return SchemaConfig(
            covariates=tuple(self.covariate_names),
            scheme=self.treatment_scheme,
            post_period=self.post_period
            if self.treatment_scheme == "binary_single_post" else None,
        )

    def __repr__(self) -> str:
        return (
            f"PanelDataset(n_obs={self.n_obs}, n_units={self.n_units},"
            f" periods={self.periods}, scheme={self.treatment_scheme!r})"
        )


def _numeric_column(col: pd.Series, name: str, integral: bool = False) -> np.ndarray:
    values = pd.to_numeric(col, errors="coerce")
    bad = values.isna()
    if bad.any():
        i = int(np.flatnonzero(bad.to_numpy())[0])
        raise NonNumericOutcome(
            f"column {name!r} has a missing or non-numeric value at row {i}"
        )
    out = values.to_numpy()
    if integral:
        rounded = np.rint(out)
        if not np.allclose(out, rounded, atol=0, rtol=0):
            i = int(np.flatnonzero(out != rounded)[0])
            raise NonNumericOutcome(
                f"column {name!r} must be integer, got {out[i]} at row {i}"
            )
        return rounded.astype(np.int64)
    return out.astype(np.float64)


def load_panel(path: str | Path, schema: SchemaConfig) -> PanelDataset:
    """Load and validate a long-format CSV under a column mapping.

    Parameters
    ----------
    path : path to a CSV file with a header row.
    schema : SchemaConfig
        Column mapping; see :class:`SchemaConfig`.

    Raises
    ------
    MissingColumn, NonNumericOutcome, DuplicateUnitPeriod, EmptyDataset
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    df = pd.read_csv(path, float_precision="round_trip")
    return PanelDataset.from_frame(df, schema)


def cell_mean(ds: PanelDataset, period: int, group: GroupFilter) -> float:
    """Mean outcome in the (period, group) cell. Raises :class:`EmptyCell`."""
    return ds.cell_mean(period, group)


# =============================================================================
# Information sets
# =============================================================================

@dataclass(frozen=True)
class InfoElement:
    """One element of a baseline information set."""

    label: object
    weight: float
    n_obs: int


@dataclass(frozen=True)
class InformationSet:
    """Finite, labeled baseline information set with observation weights.

    ``kind`` is one of ``pre_periods`` (labels are period indices),
    ``discrete_covariate`` (labels are covariate levels; ``covariate``
    names the column and ``period`` fixes the baseline period the levels
    are read at), or ``data_source`` (labels are source codes stored in
    a covariate column). One kind per information set; mixing kinds in a
    single hull is not supported.
    """

    elements: tuple[InfoElement, ...]
    kind: str
    covariate: str | None = None
    period: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("pre_periods", "discrete_covariate", "data_source"):
            raise ValueError(f"unknown information kind {self.kind!r}")
        if not self.elements:
            raise ValueError("information set must be nonempty")
        labels = [e.label for e in self.elements]
        if len(set(labels)) != len(labels):
            raise ValueError("information element labels must be distinct")
        total = sum(e.weight for e in self.elements)
        if any(e.weight < 0 for e in self.elements) or abs(total - 1.0) > 1e-12:
            raise ValueError("element weights must be nonnegative and sum to 1")

    @property
    def labels(self) -> list:
        return [e.label for e in self.elements]

    @property
    def weights(self) -> np.ndarray:
        return np.array([e.weight for e in self.elements], dtype=float)

    @classmethod
    def from_periods(
        cls, ds: PanelDataset, periods: list[int] | None = None
    ) -> "InformationSet":
        """Pre-treatment-period information set, weighted by observation counts.

        Labels must lie strictly before the first treatment period.
        """
        if periods is None:
            periods = ds.pre_periods
        periods = [int(p) for p in periods]
        cut = ds.first_treatment_period
        for p in periods:
            if p >= cut:
                raise ValueError(
                    f"period {p} is not strictly before the first treatment"
                    f" period {cut}"
                )
            if p not in ds.periods:
                raise MissingPeriodLabel(p)
        counts = [int(ds.rows_at(p).size) for p in periods]
        total = sum(counts)
        elements = tuple(
            InfoElement(label=p, weight=c / total, n_obs=c)
            for p, c in sorted(zip(periods, counts))
        )
        return cls(elements=elements, kind="pre_periods")

    @classmethod
    def from_covariate(
        cls,
        ds: PanelDataset,
        column: str,
        levels: list[float] | None = None,
        period: int | None = None,
        kind: str = "discrete_covariate",
    ) -> "InformationSet":
        """Information set over levels of a discrete baseline covariate.

        Continuous covariates must be binned by the caller into discrete
        levels first. ``period`` defaults to the baseline period (the
        last pre-treatment period).
        """
        if column not in ds.covariate_names:
            raise MissingColumn(f"covariate {column!r} not in dataset")
        if period is None:
            pre = ds.pre_periods
            if not pre:
                raise ValueError("dataset has no pre-treatment period")
            period = pre[-1]
        j = ds.covariate_names.index(column)
        rows = ds.rows_at(int(period))
        values = ds.covariates[rows, j]
        if levels is None:
            levels = [float(v) for v in np.unique(values)]
        counts = [int((values == lv).sum()) for lv in levels]
        total = sum(counts)
        if total == 0:
            raise EmptyDataset(
                f"no observations of {column!r} at period {period}"
            )
        elements = tuple(
            InfoElement(label=lv, weight=c / total, n_obs=c)
            for lv, c in zip(levels, counts)
        )
        return cls(elements=elements, kind=kind, covariate=column,
                   period=int(period))


class MissingPeriodLabel(ValueError):
    def __init__(self, period) -> None:
        super().__init__(f"period {period} not present in dataset")


# =============================================================================
# Overlap diagnostics
# =============================================================================

@dataclass
class OverlapReport:
    """Report-only overlap diagnostics for one period.

    ``mode`` is ``"strata"`` when covariates are discrete enough to
    tabulate, ``"propensity"`` when a logit fit summarizes overlap, and
    ``"counts"`` with no covariates. ``violations`` lists human-readable
    flags; ``ok`` is True when none were raised.
    """

    period: int
    mode: str
    n_treated: int
    n_control: int
    strata: list[tuple[tuple, int, int]] = field(default_factory=list)
    propensity_min: float | None = None
    propensity_max: float | None = None
    epsilon: float = 0.01
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def overlap_check(
    ds: PanelDataset,
    period: int,
    epsilon: float = 0.01,
    max_discrete_levels: int = 20,
) -> OverlapReport:
    """Check common support of treatment and control at one period.

    Discrete covariates (at most `max_discrete_levels` distinct joint
    values) are tabulated per stratum; otherwise a logit propensity is
    fitted and its extrema compared against ``[epsilon, 1-epsilon]``.
    Report-only: never raises on violations.
    """
    rows = ds.rows_at(int(period))
    if rows.size == 0:
        report = OverlapReport(period=int(period), mode="counts",
                               n_treated=0, n_control=0, epsilon=epsilon)
        report.violations.append(f"no observations at period {period}")
        return report
    d = ds.treated[rows]
    n1, n0 = int((d == 1).sum()), int((d == 0).sum())
    report = OverlapReport(period=int(period), mode="counts", n_treated=n1,
                           n_control=n0, epsilon=epsilon)
    if n1 == 0:
        report.violations.append("no treated observations")
    if n0 == 0:
        report.violations.append("no control observations")
    X = ds.covariates[rows]
    if X.shape[1] == 0 or not report.ok:
        return report

    joint = np.unique(X, axis=0)
    if len(joint) <= max_discrete_levels:
        report.mode = "strata"
        for value in joint:
            in_stratum = np.all(X == value, axis=1)
            s1 = int((d[in_stratum] == 1).sum())
            s0 = int((d[in_stratum] == 0).sum())
            report.strata.append((tuple(float(v) for v in value), s1, s0))
            if s1 == 0 or s0 == 0:
                side = "treated" if s1 == 0 else "control"
                report.violations.append(
                    f"stratum {tuple(np.round(value, 6))} has zero {side}"
                    " observations"
                )
        return report

    # continuous covariates: summarize with a fitted propensity
    from .regression import DesignMatrix, fit_logit, predict_probability

    report.mode = "propensity"
    design = DesignMatrix.with_intercept(X, ds.covariate_names)
    try:
        fit = fit_logit(design, d.astype(float))
    except Exception as exc:  # separation itself is an overlap red flag
        report.violations.append(f"propensity fit failed: {exc}")
        return report
    p = predict_probability(fit, design, clip=0.0)
    report.propensity_min = float(p.min())
    report.propensity_max = float(p.max())
    if report.propensity_min < epsilon:
        report.violations.append(
            f"fitted propensity {report.propensity_min:.3g} below"
            f" epsilon={epsilon}"
        )
    if report.propensity_max > 1 - epsilon:
        report.violations.append(
            f"fitted propensity {report.propensity_max:.3g} above"
            f" 1-epsilon={1 - epsilon}"
        )
    return report
