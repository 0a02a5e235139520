"""Parametric simulators with closed-form truth oracles.

Every family generates a :class:`~didbounds.panel.PanelDataset` from a
seeded generator and carries its own selection-bias path, true ATT, and
identified set in closed form (truncated-normal means drive most of
them). The oracles let estimator output be checked against exact truth
rather than against another estimate.

Families
--------
``spurious_pt``
    Nonlinear common factor whose loading is equal at t = -1, 0, 1:
    bias equality holds although the group trends are curved.
``ashenfelter``
    Pre-program dip: loading 1+|t|+t^2, biases fall into the baseline
    then rebound; bias equality fails but the post bias stays inside
    the pre-period hull.
``covariate_static``, ``covariate_timevarying``
    Uniform covariate scaling the factor loading; conditional biases
    move over time but stay inside the baseline conditional hull.
``multi_pt_holds``, ``multi_pt_violated``, ``staggered_mc``
    Multi-period designs: bias equality holding each period; an
    AR-correlated latent path breaking it while the extended hull
    assumption holds; and a staggered adoption design for the saturated
    two-way FE regression.
``factor_structure``
    Additive two-factor selection with an even time loading: the
    sufficient condition for hull stability.
``bias_variation_linear``, ``bias_variation_sawtooth``, ``bias_variation_cosine``
    Bias paths where the level hull fails (linear, sawtooth) or holds
    (cosine) while the bias-variation hull holds.
``dr_logit_quadratic``
    Logit selection on a covariate with a quadratic outcome: exercises
    the doubly-robust property (either nuisance model may be wrong).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping

import numpy as np
from scipy.linalg import cholesky, toeplitz
from scipy.special import expit, ndtr

from .errors import DidBoundsError, InvalidSpec
from .panel import PanelDataset

__all__ = [
    "DgpSpec",
    "AnalyticTruth",
    "McReport",
    "McTarget",
    "mills_alpha",
    "simulate",
    "simulate_with_counterfactuals",
    "analytic_truth",
    "monte_carlo",
    "FAMILY_DEFAULTS",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _phi(x: float) -> float:
    return math.exp(-0.5 * x * x) / _SQRT_2PI


def mills_alpha(threshold: float) -> tuple[float, float]:
    """Means of a standard normal truncated at `threshold`.

    Returns ``(a1, a0)`` with ``a1 = E[Z | Z >= c] = phi(c)/(1-Phi(c))``
    and ``a0 = E[Z | Z < c] = -phi(c)/Phi(c)``. Accurate to better than
    1e-12 (double-precision normal cdf).
    """
    c = float(threshold)
    p = _phi(c)
    upper = float(ndtr(-c))   # P(Z >= c)
    lower = float(ndtr(c))    # P(Z < c)
    return p / upper, -p / lower


def _mills_gap(threshold: float) -> float:
    """a1(c) - a0(c) = phi(c) / ((1-Phi(c)) * Phi(c))."""
    a1, a0 = mills_alpha(threshold)
    return a1 - a0


# =============================================================================
# spec and truth containers
# =============================================================================

@dataclass(frozen=True)
class DgpSpec:
    """A simulation design: family, parameters, sample size, seed."""

    family: str
    n: int
    seed: int
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.family not in FAMILY_DEFAULTS:
            raise InvalidSpec(
                f"unknown family {self.family!r}; known:"
                f" {sorted(FAMILY_DEFAULTS)}"
            )
        if self.n < 1:
            raise InvalidSpec(f"n must be >= 1, got {self.n}")
        unknown = set(self.params) - set(FAMILY_DEFAULTS[self.family])
        if unknown:
            raise InvalidSpec(
                f"unknown parameters for {self.family!r}: {sorted(unknown)}"
            )

    def resolved(self) -> dict:
        out = dict(FAMILY_DEFAULTS[self.family])
        out.update(self.params)
        return out

    def to_json(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            json.dump(
                {"family": self.family, "n": self.n, "seed": self.seed,
                 "params": self.params},
                fh, indent=2,
            )

    @classmethod
    def from_json(cls, path: str | Path) -> "DgpSpec":
        with open(path) as fh:
            raw = json.load(fh)
        try:
            return cls(family=raw["family"], n=int(raw["n"]),
                       seed=int(raw["seed"]), params=raw.get("params", {}))
        except KeyError as exc:
            raise InvalidSpec(f"spec file missing key {exc}") from None


@dataclass(frozen=True)
class AnalyticTruth:
    """Closed-form truth for one design.

    ``sb`` maps period -> selection bias (including post periods);
    ``att`` and ``theta_ols`` map post periods to the true effect and
    the population mean contrast; ``identified_set`` gives the interval
    implied by the family's default information set (``info_periods``).
    ``extra`` carries family-specific values (conditional hulls,
    variation hulls, per-baseline biases, group effects).
    """

    sb: dict
    att: dict
    theta_ols: dict
    identified_set: dict
    pt_holds: bool
    info_periods: tuple[int, ...] = ()
    extra: dict = field(default_factory=dict)


# =============================================================================
# family implementations
# =============================================================================
# Each simulator returns (frame dict for PanelDataset, y0 row array);
# rows are unit-major (all periods of a unit contiguous).

def _panel_from_matrix(
    Y: np.ndarray,
    D: np.ndarray,
    periods: list[int],
    scheme: str,
    Y0: np.ndarray,
    X: np.ndarray | None = None,
    covariate_names: tuple[str, ...] = (),
    post_period: int | None = None,
) -> tuple[PanelDataset, np.ndarray]:
    n, P = Y.shape
    unit = np.repeat(np.arange(n), P)
    period = np.tile(np.asarray(periods, dtype=np.int64), n)
    ds = PanelDataset(
        unit=unit,
        period=period,
        outcome=Y.ravel(),
        treated=D.ravel(),
        covariates=X.reshape(n * P, -1) if X is not None else None,
        covariate_names=covariate_names,
        treatment_scheme=scheme,
        post_period=post_period,
    )
    return ds, Y0.ravel()


def _factor_threshold_family(
    rng: np.random.Generator, n: int, params: dict,
    periods: list[int], loading: Callable[[int], float],
    drift: Callable[[int], float] = lambda t: 0.0,
):
    """Common scaffold: Y_t = drift(t) + loading(t)*U + theta*D*t*(t>=0)."""
    theta = params["theta"]
    c = params.get("threshold", 1.0)
    U = rng.standard_normal(n)
    D = (U >= c).astype(np.int64)
    P = len(periods)
    Y0 = np.empty((n, P))
    Y = np.empty((n, P))
    for j, t in enumerate(periods):
        Y0[:, j] = drift(t) + loading(t) * U
        effect = theta * D * t * (t >= 0)
        Y[:, j] = Y0[:, j] + effect
    Dmat = np.tile(D[:, None], (1, P))
    return Y, Dmat, Y0


def _sim_spurious_pt(rng, n, params):
    periods = [-1, 0, 1]
    Y, D, Y0 = _factor_threshold_family(
        rng, n, params, periods,
        loading=lambda t: 1.0 - 2.0 * abs(t) + 2.0 * t * t,
        drift=lambda t: 2.0 * t,
    )
    return _panel_from_matrix(Y, D, periods, "binary_single_post", Y0,
                              post_period=1)


def _truth_spurious_pt(params):
    gap = _mills_gap(params.get("threshold", 1.0))
    theta = params["theta"]
    sb = {t: (1.0 - 2.0 * abs(t) + 2.0 * t * t) * gap for t in (-1, 0, 1)}
    return AnalyticTruth(
        sb=sb,
        att={1: theta},
        theta_ols={1: sb[1] + theta},
        identified_set={1: (theta, theta)},
        pt_holds=True,
        info_periods=(-1, 0),
    )


def _sim_ashenfelter(rng, n, params):
    periods = [-2, -1, 0, 1]
    Y, D, Y0 = _factor_threshold_family(
        rng, n, params, periods,
        loading=lambda t: 1.0 + abs(t) + t * t,
    )
    return _panel_from_matrix(Y, D, periods, "binary_single_post", Y0,
                              post_period=1)


def _truth_ashenfelter(params):
    gap = _mills_gap(params.get("threshold", 1.0))
    theta = params["theta"]
    sb = {t: (1.0 + abs(t) + t * t) * gap for t in (-2, -1, 0, 1)}
    return AnalyticTruth(
        sb=sb,
        att={1: theta},
        theta_ols={1: sb[1] + theta},
        identified_set={1: (theta - 4.0 * gap, theta + 2.0 * gap)},
        pt_holds=False,
        info_periods=(-2, -1, 0),
        extra={"standard_did": theta + 2.0 * gap},
    )


def _sim_covariate_static(rng, n, params):
    periods = [0, 1]
    theta = params["theta"]
    U = rng.standard_normal(n)
    X = rng.uniform(0.0, 1.0, size=n)
    D = (U >= 1.0).astype(np.int64)
    P = len(periods)
    Y0 = np.empty((n, P))
    Y = np.empty((n, P))
    for j, t in enumerate(periods):
        Y0[:, j] = (1.0 + 0.5 ** t * X) * U
        Y[:, j] = Y0[:, j] + theta * X * D * t * (t >= 0)
    Dmat = np.tile(D[:, None], (1, P))
    Xmat = np.tile(X[:, None], (1, P))[..., None]
    return _panel_from_matrix(Y, Dmat, periods, "binary_single_post", Y0,
                              X=Xmat, covariate_names=("x",), post_period=1)


def _truth_covariate_static(params):
    gap = _mills_gap(1.0)
    theta = params["theta"]
    # X ~ U[0,1] both periods; conditional biases (1 + 0.5^t x) * gap
    integrated = 1.25 * gap + 0.5 * theta
    return AnalyticTruth(
        sb={0: 1.5 * gap, 1: 1.25 * gap},
        att={1: 0.5 * theta},
        theta_ols={1: integrated},
        identified_set={1: (0.5 * theta - 0.75 * gap,
                            0.5 * theta + 0.25 * gap)},
        pt_holds=False,
        info_periods=(0,),
        extra={"conditional_hull": (gap, 2.0 * gap),
               "integrated_theta": integrated},
    )


def _sim_covariate_timevarying(rng, n, params):
    periods = [0, 1]
    theta = params["theta"]
    U = rng.standard_normal(n)
    D = (U >= 1.0).astype(np.int64)
    P = len(periods)
    Y0 = np.empty((n, P))
    Y = np.empty((n, P))
    Xmat = np.empty((n, P, 1))
    for j, t in enumerate(periods):
        X = rng.uniform(0.0, 1.0 / (1.0 + t * t), size=n)
        Xmat[:, j, 0] = X
        Y0[:, j] = (1.0 + X) * U
        Y[:, j] = Y0[:, j] + theta * X * D * t * (t >= 0)
    Dmat = np.tile(D[:, None], (1, P))
    return _panel_from_matrix(Y, Dmat, periods, "binary_single_post", Y0,
                              X=Xmat, covariate_names=("x",), post_period=1)


def _truth_covariate_timevarying(params):
    gap = _mills_gap(1.0)
    theta = params["theta"]
    integrated = 1.25 * gap + 0.25 * theta
    return AnalyticTruth(
        sb={0: 1.5 * gap, 1: 1.25 * gap},
        att={1: 0.25 * theta},
        theta_ols={1: integrated},
        identified_set={1: (0.25 * theta - 0.75 * gap,
                            0.25 * theta + 0.25 * gap)},
        pt_holds=False,
        info_periods=(0,),
        extra={"conditional_hull": (gap, 2.0 * gap),
               "integrated_theta": integrated},
    )


def _sim_multi_pt_holds(rng, n, params):
    T = int(params["T"])
    periods = list(range(T + 1))
    U = rng.uniform(0.0, 2.0, size=n)
    P = len(periods)
    Y0 = np.empty((n, P))
    Y = np.empty((n, P))
    D = np.zeros((n, P), dtype=np.int64)
    for j, t in enumerate(periods):
        eps = rng.normal(loc=t * t, scale=1.0, size=n)
        Y0[:, j] = U + eps
        if t >= 1:
            D[:, j] = (U >= 2.0 - t / T).astype(np.int64)
        theta_t = rng.uniform(0.0, 1.0 + t * t, size=n)
        Y[:, j] = Y0[:, j] + theta_t * D[:, j]
    return _panel_from_matrix(Y, D, periods, "multi_period_paths", Y0)


def _truth_multi_pt_holds(params):
    T = int(params["T"])
    # U ~ U[0,2]: the treated/control mean gap in U is 1 at any interior
    # threshold, so every per-period bias (and baseline bias) equals 1
    sb = {t: 1.0 for t in range(1, T + 1)}
    att = {t: (1.0 + t * t) / 2.0 for t in range(1, T + 1)}
    return AnalyticTruth(
        sb=sb,
        att=att,
        theta_ols={t: att[t] + 1.0 for t in att},
        identified_set={t: (att[t], att[t]) for t in att},
        pt_holds=True,
        info_periods=(0,),
    )


def _sim_multi_pt_violated(rng, n, params):
    rho = params["rho"]
    T = int(params["T"])
    periods = [-3, -2, -1, 0, 1, 2]
    P = len(periods)
    Sigma = toeplitz(rho ** np.arange(P))
    L = cholesky(Sigma, lower=True)
    U = 2.0 + rng.standard_normal((n, P)) @ L.T
    Y0 = np.empty((n, P))
    Y = np.empty((n, P))
    D = np.zeros((n, P), dtype=np.int64)
    for j, t in enumerate(periods):
        Y0[:, j] = (abs(t) - 1.0) * U[:, j]
        if t >= 1:
            D[:, j] = (U[:, j] >= 2.0 - t / T).astype(np.int64)
        theta_t = rng.uniform(0.0, 4.0 + t * t, size=n)
        Y[:, j] = Y0[:, j] + theta_t * D[:, j]
    return _panel_from_matrix(Y, D, periods, "multi_period_paths", Y0)


def _truth_multi_pt_violated(params):
    rho = params["rho"]
    T = int(params["T"])
    pre = (-3, -2, -1, 0)
    sb = {}
    baseline_sb = {}
    theta_dim = {}
    att = {}
    identified = {}
    for t in (1, 2):
        m_t = _mills_gap(-t / T)
        sb[t] = (abs(t) - 1.0) * m_t
        att[t] = (4.0 + t * t) / 2.0
        theta_dim[t] = att[t] + sb[t]
        for i0 in pre:
            baseline_sb[(t, i0)] = rho ** (t - i0) * (abs(i0) - 1.0) * m_t
        values = [baseline_sb[(t, i0)] for i0 in pre]
        identified[t] = (theta_dim[t] - max(values),
                         theta_dim[t] - min(values))
    return AnalyticTruth(
        sb=sb,
        att=att,
        theta_ols=theta_dim,
        identified_set=identified,
        pt_holds=False,
        info_periods=pre,
        extra={"baseline_sb": baseline_sb},
    )


def _sim_staggered_mc(rng, n, params):
    T = int(params["T"])
    periods = list(range(T + 1))
    U = rng.uniform(0.0, 2.0, size=n)
    adopt = np.zeros((n, T), dtype=np.int64)
    for s in range(1, T + 1):
        adopt[:, s - 1] = (U >= 2.0 - s / T).astype(np.int64)
    theta_s = np.column_stack([
        rng.uniform(0.0, 1.0 + s * s, size=n) for s in range(1, T + 1)
    ])
    bump = (theta_s * adopt).sum(axis=1)
    P = len(periods)
    Y0 = np.empty((n, P))
    Y = np.empty((n, P))
    D = np.zeros((n, P), dtype=np.int64)
    for j, t in enumerate(periods):
        eps = rng.normal(loc=t * t, scale=1.0, size=n)
        Y0[:, j] = U + eps
        if t >= 1:
            D[:, j] = adopt[:, t - 1]
            Y[:, j] = Y0[:, j] + bump
        else:
            Y[:, j] = Y0[:, j]
    return _panel_from_matrix(Y, D, periods, "multi_period_paths", Y0)


def _truth_staggered_mc(params):
    T = int(params["T"])
    # group g adopts at period g and carries sum_{s>=g} theta_s from
    # period 1 on; effects are flat in the observation period
    group_effect = {
        g: sum((1.0 + s * s) / 2.0 for s in range(g, T + 1))
        for g in range(1, T + 1)
    }
    theta_gs = {(g, s): group_effect[g]
                for g in range(1, T + 1) for s in range(1, T + 1)}
    att = {t: group_effect[1] for t in range(1, T + 1)}
    return AnalyticTruth(
        sb={t: 1.0 for t in range(1, T + 1)},
        att=att,
        theta_ols={},
        identified_set={},
        pt_holds=True,
        info_periods=(0,),
        extra={"theta_gs": theta_gs, "group_effect": group_effect},
    )


def _sim_factor_structure(rng, n, params):
    periods = [-2, -1, 0, 1]
    theta = params["theta"]
    eta_sd = params["eta_sd"]
    U = rng.standard_normal(n)
    V = rng.standard_normal(n)
    D = (U + V >= 1.0).astype(np.int64)
    P = len(periods)
    Y0 = np.empty((n, P))
    Y = np.empty((n, P))
    for j, t in enumerate(periods):
        eta = rng.normal(0.0, eta_sd, size=n)
        Y0[:, j] = (1.0 + t * t) * U + V + eta
        Y[:, j] = Y0[:, j] + theta * D * t * (t >= 0)
    Dmat = np.tile(D[:, None], (1, P))
    return _panel_from_matrix(Y, Dmat, periods, "binary_single_post", Y0,
                              post_period=1)


def _truth_factor_structure(params):
    theta = params["theta"]
    # D = 1{U+V >= 1}: each factor's treated/control mean gap is the
    # truncated-normal gap of (U+V)/sqrt(2) at 1/sqrt(2), divided by sqrt(2)
    a = _mills_gap(1.0 / math.sqrt(2.0)) / math.sqrt(2.0)
    sb = {t: (2.0 + t * t) * a for t in (-2, -1, 0, 1)}
    return AnalyticTruth(
        sb=sb,
        att={1: theta},
        theta_ols={1: sb[1] + theta},
        identified_set={1: (theta - 3.0 * a, theta + a)},
        pt_holds=False,
        info_periods=(-2, -1, 0),
    )


def _bias_variation_family(loading, drift, periods):
    def sim(rng, n, params):
        Y, D, Y0 = _factor_threshold_family(
            rng, n, params, periods, loading=loading, drift=drift,
        )
        return _panel_from_matrix(Y, D, periods, "binary_single_post", Y0,
                                  post_period=max(periods))

    def truth(params):
        gap = _mills_gap(params.get("threshold", 1.0))
        theta = params["theta"]
        sb = {t: loading(t) * gap for t in periods}
        pre = [t for t in periods if t < 1]
        values = [sb[t] for t in pre]
        theta_pop = sb[1] + theta
        deltas = [sb[t] - sb[t - 1] for t in pre[1:]]
        variation_hull = (sb[0] + min(deltas), sb[0] + max(deltas))
        return AnalyticTruth(
            sb=sb,
            att={1: theta},
            theta_ols={1: theta_pop},
            identified_set={1: (theta_pop - max(values),
                                theta_pop - min(values))},
            pt_holds=False,
            info_periods=tuple(pre),
            extra={
                "variation_hull": variation_hull,
                "variation_att_interval": (theta_pop - variation_hull[1],
                                           theta_pop - variation_hull[0]),
                "level_hull": (min(values), max(values)),
            },
        )

    return sim, truth


_sim_bv_linear, _truth_bv_linear = _bias_variation_family(
    loading=lambda t: float(t), drift=lambda t: 0.0, periods=[-2, -1, 0, 1],
)
_sim_bv_sawtooth, _truth_bv_sawtooth = _bias_variation_family(
    loading=lambda t: 0.75 * (-1.0) ** t - (t - 2.0),
    drift=lambda t: 0.0, periods=[-2, -1, 0, 1],
)
_sim_bv_cosine, _truth_bv_cosine = _bias_variation_family(
    loading=lambda t: math.cos(math.pi * t),
    drift=lambda t: 2.0 * t, periods=[-4, -3, -2, -1, 0, 1],
)


def _sim_dr_logit_quadratic(rng, n, params):
    periods = [0, 1]
    b0, b1 = params["ps_intercept"], params["ps_slope"]
    q0, q1, q2 = params["q0"], params["q1"], params["q2"]
    tau, sd = params["tau"], params["noise_sd"]
    X = rng.standard_normal(n)
    D = (rng.uniform(size=n) < expit(b0 + b1 * X)).astype(np.int64)
    Y0 = np.empty((n, 2))
    Y = np.empty((n, 2))
    Y0[:, 0] = q0 + q1 * X + rng.normal(0.0, sd, size=n)
    Y0[:, 1] = q0 + q1 * X + q2 * X * X + rng.normal(0.0, sd, size=n)
    Y[:, 0] = Y0[:, 0]
    Y[:, 1] = Y0[:, 1] + tau * D
    Dmat = np.tile(D[:, None], (1, 2))
    Xmat = np.tile(X[:, None], (1, 2))[..., None]
    return _panel_from_matrix(Y, Dmat, periods, "binary_single_post", Y0,
                              X=Xmat, covariate_names=("x",), post_period=1)


def _truth_dr_logit_quadratic(params):
    b0, b1 = params["ps_intercept"], params["ps_slope"]
    q1 = params["q1"]
    tau = params["tau"]
    # conditional contrast is constant at tau, so the covariate-averaged
    # contrast is tau as well; the baseline bias comes from Gauss-Hermite
    # integration of x against the logit weight
    nodes, weights = np.polynomial.hermite.hermgauss(96)
    x = math.sqrt(2.0) * nodes
    w = weights / math.sqrt(math.pi)
    p = expit(b0 + b1 * x)
    pbar = float(w @ p)
    ex_treated = float(w @ (x * p)) / pbar
    ex_control = float(w @ (x * (1.0 - p))) / (1.0 - pbar)
    sb0 = q1 * (ex_treated - ex_control)
    return AnalyticTruth(
        sb={0: sb0},
        att={1: tau},
        theta_ols={},
        identified_set={},
        pt_holds=False,
        info_periods=(0,),
        extra={"integrated_theta": tau, "treated_share": pbar},
    )


FAMILY_DEFAULTS: dict[str, dict] = {
    "spurious_pt": {"theta": 2.0, "threshold": 1.0},
    "ashenfelter": {"theta": 9.0, "threshold": 1.0},
    "covariate_static": {"theta": 2.0},
    "covariate_timevarying": {"theta": 2.0},
    "multi_pt_holds": {"T": 2},
    "multi_pt_violated": {"rho": 0.9, "T": 2},
    "staggered_mc": {"T": 3},
    "factor_structure": {"theta": 5.0, "eta_sd": 0.5},
    "bias_variation_linear": {"theta": 5.0, "threshold": 1.0},
    "bias_variation_sawtooth": {"theta": 5.0, "threshold": 1.0},
    "bias_variation_cosine": {"theta": 5.0, "threshold": 1.0},
    "dr_logit_quadratic": {
        "ps_intercept": -0.25, "ps_slope": 1.0,
        "q0": 1.0, "q1": 1.0, "q2": 1.0, "tau": 2.0, "noise_sd": 1.0,
    },
}

_SIMULATORS = {
    "spurious_pt": _sim_spurious_pt,
    "ashenfelter": _sim_ashenfelter,
    "covariate_static": _sim_covariate_static,
    "covariate_timevarying": _sim_covariate_timevarying,
    "multi_pt_holds": _sim_multi_pt_holds,
    "multi_pt_violated": _sim_multi_pt_violated,
    "staggered_mc": _sim_staggered_mc,
    "factor_structure": _sim_factor_structure,
    "bias_variation_linear": _sim_bv_linear,
    "bias_variation_sawtooth": _sim_bv_sawtooth,
    "bias_variation_cosine": _sim_bv_cosine,
    "dr_logit_quadratic": _sim_dr_logit_quadratic,
}

_TRUTHS = {
    "spurious_pt": _truth_spurious_pt,
    "ashenfelter": _truth_ashenfelter,
    "covariate_static": _truth_covariate_static,
    "covariate_timevarying": _truth_covariate_timevarying,
    "multi_pt_holds": _truth_multi_pt_holds,
    "multi_pt_violated": _truth_multi_pt_violated,
    "staggered_mc": _truth_staggered_mc,
    "factor_structure": _truth_factor_structure,
    "bias_variation_linear": _truth_bv_linear,
    "bias_variation_sawtooth": _truth_bv_sawtooth,
    "bias_variation_cosine": _truth_bv_cosine,
    "dr_logit_quadratic": _truth_dr_logit_quadratic,
}


# =============================================================================
# public operations
# =============================================================================

def simulate(spec: DgpSpec) -> PanelDataset:
    """Generate one dataset; identical specs give identical datasets."""
    return simulate_with_counterfactuals(spec)[0]


def simulate_with_counterfactuals(
    spec: DgpSpec,
) -> tuple[PanelDataset, np.ndarray]:
    """Generate a dataset plus the untreated potential outcome per row.

    The second value aligns with the dataset rows and holds the outcome
    each row would have shown on the never-treated path; it backs
    oracle checks of post-period selection biases that observed data
    cannot reveal.
    """
    rng = np.random.default_rng(spec.seed)
    ds, y0 = _SIMULATORS[spec.family](rng, spec.n, spec.resolved())
    return ds, y0


def analytic_truth(spec: DgpSpec) -> AnalyticTruth:
    """Exact truth values for the design (closed forms, no simulation)."""
    return _TRUTHS[spec.family](spec.resolved())


def sample_selection_bias(
    ds: PanelDataset, y0: np.ndarray, period: int,
    treated_mask: np.ndarray | None = None,
) -> float:
    """Sample selection bias at `period` from counterfactual outcomes.

    Uses the untreated potential outcome emitted by
    :func:`simulate_with_counterfactuals`, so it works at post periods
    where the observed outcome is treated.
    """
    rows = ds.rows_at(int(period))
    d = ds.treated[rows] if treated_mask is None \
        else treated_mask[ds.unit_codes[rows]]
    vals = y0[rows]
    return float(vals[d == 1].mean() - vals[d == 0].mean())


# =============================================================================
# Monte Carlo runner
# =============================================================================

@dataclass(frozen=True)
class McTarget:
    """Summary for one scalar target across replications."""

    mean: float
    bias: float | None
    abs_bias: float | None
    rmse: float | None
    n: int


@dataclass
class McReport:
    """Per-target Monte Carlo summaries plus failure accounting."""

    targets: dict[str, McTarget]
    coverage: dict[str, float]
    n_reps: int
    n_failed: int
    estimates: dict[str, np.ndarray] = field(default_factory=dict)


def _rep_seed(seed: int, rep: int) -> int:
    return int(np.random.SeedSequence((seed, rep)).generate_state(1)[0])


def monte_carlo(
    spec: DgpSpec,
    estimator: Callable[[PanelDataset], Mapping[str, object]],
    reps: int,
    seed: int,
    truth: Mapping[str, float] | None = None,
) -> McReport:
    """Run the estimator on `reps` independent simulated datasets.

    The estimator maps a dataset to named targets; scalar targets are
    summarized by mean/bias/|bias|/RMSE against `truth`, interval
    targets (2-tuples) by their coverage of the true value. Per-rep
    seeds derive deterministically from (seed, rep); failed replications
    (identification errors) are excluded and counted.
    """
    if reps < 1:
        raise InvalidSpec("reps must be >= 1")
    scalar: dict[str, list[float]] = {}
    intervals: dict[str, list[tuple[float, float]]] = {}
    n_failed = 0
    for rep in range(reps):
        rep_spec = replace(spec, seed=_rep_seed(seed, rep))
        ds = simulate(rep_spec)
        try:
            out = estimator(ds)
        except DidBoundsError:
            n_failed += 1
            continue
        for name, value in out.items():
            if isinstance(value, tuple):
                intervals.setdefault(name, []).append(
                    (float(value[0]), float(value[1]))
                )
            else:
                scalar.setdefault(name, []).append(float(value))

    targets: dict[str, McTarget] = {}
    estimates: dict[str, np.ndarray] = {}
    for name, vals in scalar.items():
        arr = np.asarray(vals)
        estimates[name] = arr
        true = None if truth is None else truth.get(name)
        err = None if true is None else arr - true
        targets[name] = McTarget(
            mean=float(arr.mean()),
            bias=None if err is None else float(err.mean()),
            abs_bias=None if err is None else float(np.abs(err).mean()),
            rmse=None if err is None else float(np.sqrt((err ** 2).mean())),
            n=len(arr),
        )
    coverage: dict[str, float] = {}
    for name, ivs in intervals.items():
        true = None if truth is None else truth.get(name)
        if true is None:
            continue
        hits = sum(1 for lo, hi in ivs if lo <= true <= hi)
        coverage[name] = hits / len(ivs)
    return McReport(
        targets=targets,
        coverage=coverage,
        n_reps=reps,
        n_failed=n_failed,
        estimates=estimates,
    )
