"""Regression primitives: least squares and IRLS logistic regression.

These back the doubly-robust estimand (propensity and outcome models)
and the saturated fixed-effects regression. Fits are plain immutable
values; everything here is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SeparationDetected, SingleClass

__all__ = [
    "DesignMatrix",
    "LinearFit",
    "LogitFit",
    "fit_ols",
    "fit_logit",
    "predict_probability",
    "quadratic_expansion",
]


@dataclass(frozen=True)
class DesignMatrix:
    """Row-major design with labeled columns; entries must be finite."""

    values: np.ndarray
    column_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise DimensionMismatch("design must be 2-dimensional")
        if values.shape[1] != len(self.column_labels):
            raise DimensionMismatch(
                f"{values.shape[1]} columns vs"
                f" {len(self.column_labels)} labels"
            )
        if not np.all(np.isfinite(values)):
            raise DimensionMismatch("design entries must be finite")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "column_labels", tuple(self.column_labels))

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    @classmethod
    def with_intercept(cls, X: np.ndarray, names) -> "DesignMatrix":
        """Prepend a constant column to raw covariates."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        ones = np.ones((X.shape[0], 1))
        return cls(np.hstack([ones, X]), ("const", *names))


@dataclass(frozen=True)
class LinearFit:
    coefficients: np.ndarray
    residual_variance: float
    rank_deficient: bool
    column_labels: tuple[str, ...] = ()

    def predict(self, design: DesignMatrix) -> np.ndarray:
        if design.n_cols != len(self.coefficients):
            raise DimensionMismatch(
                f"design has {design.n_cols} columns, fit has"
                f" {len(self.coefficients)} coefficients"
            )
        return design.values @ self.coefficients


@dataclass(frozen=True)
class LogitFit:
    coefficients: np.ndarray
    converged: bool
    iterations: int
    log_likelihood: float
    column_labels: tuple[str, ...] = ()


def fit_ols(X: DesignMatrix, y: np.ndarray) -> LinearFit:
    """Least squares fit of y on X.

    Solved via SVD (rank revealing); when the numerical rank is below
    the column count the minimum-norm solution is returned and
    ``rank_deficient`` is set.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or len(y) != X.n_rows:
        raise DimensionMismatch(
            f"response length {y.shape} does not match {X.n_rows} rows"
        )
    if X.n_rows < X.n_cols:
        raise DimensionMismatch(
            f"cannot fit {X.n_cols} coefficients on {X.n_rows} rows"
        )
    beta, _, rank, _ = np.linalg.lstsq(X.values, y, rcond=None)
    resid = y - X.values @ beta
    dof = max(X.n_rows - rank, 1)
    return LinearFit(
        coefficients=beta,
        residual_variance=float(resid @ resid / dof),
        rank_deficient=bool(rank < X.n_cols),
        column_labels=X.column_labels,
    )


def _log_likelihood(eta: np.ndarray, y: np.ndarray) -> float:
    # log L = sum y*eta - log(1+exp(eta)), computed stably
    return float(y @ eta - np.logaddexp(0.0, eta).sum())


def fit_logit(
    X: DesignMatrix,
    y: np.ndarray,
    tol: float = 1e-8,
    max_iter: int = 100,
) -> LogitFit:
    """Logistic regression of a 0/1 response via IRLS (Newton steps).

    Convergence is declared on the max-norm of the score X'(y - p).
    Near-singular weighted normal equations fall back to a 1e-10 ridge.
    Diverging coefficients with every observation fitted at its own
    class raise :class:`SeparationDetected`.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1 or len(y) != X.n_rows:
        raise DimensionMismatch("response length does not match design rows")
    if not np.isin(y, (0.0, 1.0)).all():
        raise DimensionMismatch("logit response must be 0/1")
    if y.min() == y.max():
        raise SingleClass(f"response is constant at {y[0]:g}")

    A = X.values
    beta = np.zeros(X.n_cols)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        eta = A @ beta
        p = 1.0 / (1.0 + np.exp(-np.clip(eta, -700, 700)))
        score = A.T @ (y - p)
        if np.max(np.abs(score)) < tol:
            converged = True
            break
        margins = np.where(y == 1, eta, -eta)
        if np.min(margins) > 12.0 or np.max(np.abs(beta)) > 1e6:
            # every point already on its own side with huge margin:
            # the likelihood has no interior maximum
            raise SeparationDetected(
                "coefficients diverging; data are perfectly separated"
            )
        w = p * (1.0 - p)
        H = A.T @ (A * w[:, None])
        try:
            step = np.linalg.solve(H, score)
        except np.linalg.LinAlgError:
            step = np.linalg.solve(H + 1e-10 * np.eye(X.n_cols), score)
        beta = beta + step
    eta = A @ beta
    return LogitFit(
        coefficients=beta,
        converged=converged,
        iterations=it,
        log_likelihood=_log_likelihood(eta, y),
        column_labels=X.column_labels,
    )


def predict_probability(
    fit: LogitFit, X: DesignMatrix, clip: float = 1e-6
) -> np.ndarray:
    """Inverse-logit of the linear index, clamped to [clip, 1-clip]."""
    if X.n_cols != len(fit.coefficients):
        raise DimensionMismatch(
            f"design has {X.n_cols} columns, fit has"
            f" {len(fit.coefficients)} coefficients"
        )
    eta = X.values @ fit.coefficients
    p = 1.0 / (1.0 + np.exp(-np.clip(eta, -700, 700)))
    if clip > 0:
        p = np.clip(p, clip, 1.0 - clip)
    return p


def quadratic_expansion(X: np.ndarray, names) -> tuple[np.ndarray, list[str]]:
    """All covariates, their squares, and pairwise interactions.

    This is the "quadratic" outcome specification: columns are ordered
    as the original covariates, then x_j^2, then x_j*x_k for j < k.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    names = list(names)
    cols = [X[:, j] for j in range(X.shape[1])]
    labels = list(names)
    for j in range(X.shape[1]):
        cols.append(X[:, j] ** 2)
        labels.append(f"{names[j]}^2")
    for j in range(X.shape[1]):
        for k in range(j + 1, X.shape[1]):
            cols.append(X[:, j] * X[:, k])
            labels.append(f"{names[j]}*{names[k]}")
    return np.column_stack(cols), labels
