"""Exception hierarchy for didbounds.

Every data or identification failure raises a subclass of
:class:`DidBoundsError`, so callers (and the CLI) can distinguish
"the data cannot support this estimand" from programming errors.
"""

from __future__ import annotations


class DidBoundsError(Exception):
    """Base class for all didbounds data/identification errors."""


# ---------------------------------------------------------------------------
# panel ingestion / validation
# ---------------------------------------------------------------------------

class MissingColumn(DidBoundsError):
    """A column named in the schema is absent from the input file."""


class NonNumericOutcome(DidBoundsError):
    """The outcome (or period) column contains non-numeric values."""


class DuplicateUnitPeriod(DidBoundsError):
    """The same (unit, period) pair appears more than once."""


class EmptyDataset(DidBoundsError):
    """The input contains no observations."""


class EmptyCell(DidBoundsError):
    """A required (period, group) cell has no observations.

    Signals identification failure: no treated or no control units in
    a cell every estimator needs.
    """

    def __init__(self, period, group) -> None:
        self.period = period
        self.group = group
        super().__init__(f"empty cell at period={period!r}, group={group!r}")


# ---------------------------------------------------------------------------
# regression primitives
# ---------------------------------------------------------------------------

class DimensionMismatch(DidBoundsError):
    """Design matrix and response/coefficient dimensions disagree."""


class SeparationDetected(DidBoundsError):
    """Logistic regression coefficients diverge: perfectly separated data."""


class SingleClass(DidBoundsError):
    """Logistic response contains only one class."""


# ---------------------------------------------------------------------------
# doubly robust estimand
# ---------------------------------------------------------------------------

class NoTreatedUnits(DidBoundsError):
    """No treated rows in the estimation period."""


class AllPropensitiesClipped(DidBoundsError):
    """Every fitted propensity hit the clipping bound: overlap failure."""


# ---------------------------------------------------------------------------
# selection bias / policy estimands
# ---------------------------------------------------------------------------

class NeedsAtLeastTwoPeriods(DidBoundsError):
    """Bias variation sets require >= 2 consecutive pre-treatment periods."""


class DegenerateDesign(DidBoundsError):
    """Forecast regression has no variation in the predictor."""


# ---------------------------------------------------------------------------
# bootstrap
# ---------------------------------------------------------------------------

class TooManyFailedReplicates(DidBoundsError):
    """More than the tolerated share of bootstrap replicates failed."""


class InsufficientReplicates(DidBoundsError):
    """Fewer than two successful replicates for a per-element CI."""


# ---------------------------------------------------------------------------
# multi-period designs
# ---------------------------------------------------------------------------

class TreatmentReversalInStaggeredMode(DidBoundsError):
    """A unit switches treatment 1 -> 0 although staggered adoption was asserted."""


class UnbalancedPanel(DidBoundsError):
    """An operation requiring a balanced panel saw missing (unit, period) rows."""


class CollinearDesign(DidBoundsError):
    """The regression design is rank deficient where full rank is required."""


class WeightSumInvalid(DidBoundsError):
    """Aggregation weights are negative or do not sum to one."""


# ---------------------------------------------------------------------------
# donor-pool bounds
# ---------------------------------------------------------------------------

class EmptyDonorPool(DidBoundsError):
    """The donor pool has no members."""


class MissingPeriod(DidBoundsError):
    """A donor or the treated series lacks a required period."""


# ---------------------------------------------------------------------------
# trend-restriction comparisons
# ---------------------------------------------------------------------------

class NegativeM(DidBoundsError):
    """Sensitivity parameter must be nonnegative."""


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------

class InvalidSpec(DidBoundsError):
    """Simulation design is unknown or its parameters are incomplete."""
