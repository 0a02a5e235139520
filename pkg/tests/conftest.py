import numpy as np
import pytest

from didbounds import Observation, PanelDataset


def make_panel(
    n_units=40,
    periods=(-1, 0, 1),
    treated_share=0.5,
    seed=0,
    sb_slope=0.0,
    effect=1.0,
    covariates=None,
):
    """Small synthetic binary_single_post panel for unit tests.

    ``sb_slope`` tilts the treated group's untreated mean by period,
    creating period-varying selection biases.
    """
    rng = np.random.default_rng(seed)
    n1 = int(round(n_units * treated_share))
    d = np.array([1] * n1 + [0] * (n_units - n1))
    rows = []
    for unit in range(n_units):
        for t in periods:
            y = rng.normal() + d[unit] * sb_slope * t
            if t == max(periods):
                y += effect * d[unit]
            cov = ()
            if covariates is not None:
                cov = tuple(covariates(rng, unit, t))
            rows.append(Observation(unit_id=unit, period=t, outcome=float(y),
                                    treated=int(d[unit]), covariates=cov))
    names = ()
    if covariates is not None:
        names = tuple(f"x{j}" for j in range(len(rows[0].covariates)))
    return PanelDataset.from_observations(
        rows, covariate_names=names, post_period=max(periods),
    )


@pytest.fixture
def small_panel():
    return make_panel()
