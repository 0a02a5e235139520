"""Command-line interface: estimate on CSVs, emit JSON results and plot data.

Every command writes a single JSON document (stdout or ``--output``)
with a versioned ``schema_version`` field; numbers are serialized with
full precision so they re-parse to exactly the values the library
returned. ``--series-csv`` additionally writes a tidy per-period table
(period, lower, upper, ci_lower, ci_upper) ready for plotting.

Exit codes: 0 success, 1 data/identification error (the error class
name is printed, never a stack trace), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bootstrap import BootstrapPlan, bootstrap_estimates, gdid_confidence_bounds, percentile_ci
from .bounds import DrSpec, IdentifiedInterval, gdid_bounds, standard_did, tau_dr, theta_ols
from .dgp import DgpSpec, analytic_truth, monte_carlo, simulate
from .errors import DidBoundsError
from .multiperiod import (
    att_bounds_t,
    att_union_ci,
    classify_paths,
    twfe_fit,
    twfe_union_ci,
)
from .panel import InformationSet, PanelDataset, SchemaConfig, load_panel
from .policy import LossKind, forecast_sb1, po_gdid, post_period_midpoint
from .relaxations import (
    DonorPanel,
    discordancy_report,
    rr_relative_magnitude_sb1,
    rr_smoothness_sb1,
    sc_bounds,
)
from .selection import bias_set, sb_series

SCHEMA_VERSION = 1

# flags whose values may start with '-' (negative periods); they are
# glued into --flag=value form so the parser does not read them as options
_NEGATIVE_VALUE_FLAGS = (
    "--info-periods", "--post-period", "--target", "--sb0", "--sbm1",
    "--periods", "--baseline", "--M", "--Mbar",
)


def _glue_negative_values(argv: list[str]) -> list[str]:
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _NEGATIVE_VALUE_FLAGS and i + 1 < len(argv) \
                and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value]
    return value


def _emit(document: dict, output: str | None) -> None:
    document = {"schema_version": SCHEMA_VERSION, **document}
    text = json.dumps(_jsonable(document), indent=2, allow_nan=False)
    if output:
        Path(output).write_text(text + "\n")
    else:
        print(text)


def _write_series_csv(path: str, rows: list[dict]) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["period", "lower", "upper", "ci_lower", "ci_upper"]
        )
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if row.get(k) is None else repr(float(row[k])))
                             if k != "period" else row[k] for k in writer.fieldnames})


def _load(args) -> PanelDataset:
    schema = (SchemaConfig.from_json(args.schema) if args.schema
              else SchemaConfig())
    if getattr(args, "post_period", None) is not None \
            and schema.scheme == "binary_single_post":
        schema = SchemaConfig(
            unit=schema.unit, period=schema.period, outcome=schema.outcome,
            treatment=schema.treatment, covariates=schema.covariates,
            scheme=schema.scheme, post_period=args.post_period,
        )
    return load_panel(args.input, schema)


def _info_set(ds: PanelDataset, args) -> InformationSet:
    if getattr(args, "info_covariate", None):
        levels = None
        if getattr(args, "info_levels", None):
            levels = [float(x) for x in args.info_levels.split(",")]
        return InformationSet.from_covariate(ds, args.info_covariate, levels)
    periods = None
    if getattr(args, "info_periods", None):
        periods = [int(x) for x in args.info_periods.split(",")]
    return InformationSet.from_periods(ds, periods)


def _plan(args) -> BootstrapPlan | None:
    if not getattr(args, "bootstrap", None):
        return None
    if args.seed is None:
        raise DidBoundsError(
            "MissingSeed: --seed is required with --bootstrap"
        )
    return BootstrapPlan(replicates=args.bootstrap, seed=args.seed,
                         ci_level=args.ci_level)


def _dr_spec(args) -> DrSpec | None:
    choice = getattr(args, "dr", "linear")
    if choice == "none":
        return None
    or_spec = {"linear": "linear", "quadratic": "quadratic",
               "constant": "known_constant"}[choice]
    ps = "known_constant" if choice == "constant" else "logit"
    return DrSpec(ps_spec=ps, or_spec=or_spec, clip=args.clip)


# =============================================================================
# subcommands
# =============================================================================

def _cmd_validate(args) -> int:
    ds = _load(args)
    _emit({
        "command": "validate",
        "results": {
            "valid": True,
            "n_obs": ds.n_obs,
            "n_units": ds.n_units,
            "periods": ds.periods,
            "scheme": ds.treatment_scheme,
            "covariates": ds.covariate_names,
            "post_period": ds.post_period,
        },
    }, args.output)
    return 0


def _cmd_bounds(args) -> int:
    ds = _load(args)
    info = _info_set(ds, args)
    spec = _dr_spec(args)
    bias = bias_set(ds, info)
    th = theta_ols(ds)
    if spec is not None and ds.covariates.shape[1] > 0:
        center = tau_dr(ds, spec=spec)
        center_label = "tau_dr"
    else:
        center, center_label = th, "theta_ols"
    interval = gdid_bounds(center, bias, label=center_label)
    results = {
        "theta_ols": th,
        "tau_dr": center,
        "center": center_label,
        "standard_did": standard_did(ds),
        "sb_per_element": dict(bias.per_element),
        "delta_sb0": {"lower": bias.lower, "upper": bias.upper},
        "gdid_bounds": {"lower": interval.lower, "upper": interval.upper},
        "ci": None,
        "bootstrap": None,
    }
    series_rows = [
        {"period": label, "lower": center - sb, "upper": center - sb,
         "ci_lower": None, "ci_upper": None}
        for label, sb in bias.per_element.items()
    ]
    plan = _plan(args)
    if plan is not None:
        _, cb, boot = gdid_confidence_bounds(ds, info, plan, spec)
        results["ci"] = {"lower": cb.lower, "upper": cb.upper,
                         "per_element": {str(k): list(v)
                                         for k, v in cb.per_element_cis.items()}}
        results["bootstrap"] = {"replicates": plan.replicates,
                                "seed": plan.seed,
                                "failures": boot.n_failed,
                                "level": plan.ci_level}
        for row in series_rows:
            lo, hi = cb.per_element_cis[row["period"]]
            row["ci_lower"], row["ci_upper"] = lo, hi
    if args.series_csv:
        _write_series_csv(args.series_csv, series_rows)
    _emit({"command": "bounds", "seed": args.seed, "results": results},
          args.output)
    return 0


def _cmd_po(args) -> int:
    ds = _load(args)
    info = _info_set(ds, args)
    spec = _dr_spec(args)
    bias = bias_set(ds, info)
    if spec is not None and ds.covariates.shape[1] > 0:
        center = tau_dr(ds, spec=spec)
    else:
        center = theta_ols(ds)
    losses = ([LossKind.parse(args.loss)] if args.loss
              else [LossKind.L1, LossKind.L2, LossKind.LINF])
    estimates = {
        loss.value: po_gdid(center, bias, loss) for loss in losses
    }
    results = {
        "tau_dr": center,
        "delta_sb0": {"lower": bias.lower, "upper": bias.upper},
        "estimates": {
            k: {"estimate": e.estimate, "sb1_choice": e.sb1_choice,
                "causal": e.causal, "ci": None}
            for k, e in estimates.items()
        },
    }
    plan = _plan(args)
    if plan is not None:
        def po_vector(d: PanelDataset) -> np.ndarray:
            b = bias_set(d, info)
            c = (tau_dr(d, spec=spec)
                 if spec is not None and d.covariates.shape[1] > 0
                 else theta_ols(d))
            return np.array([po_gdid(c, b, loss).estimate for loss in losses])

        boot = bootstrap_estimates(ds, po_vector, plan)
        for j, loss in enumerate(losses):
            lo, hi = percentile_ci(boot.estimates[:, j], plan.ci_level)
            results["estimates"][loss.value]["ci"] = {"lower": lo, "upper": hi}
        results["bootstrap"] = {"replicates": plan.replicates,
                                "seed": plan.seed, "failures": boot.n_failed,
                                "level": plan.ci_level}
    _emit({"command": "po", "seed": args.seed, "results": results},
          args.output)
    return 0


def _cmd_forecast(args) -> int:
    ds = _load(args)
    info = _info_set(ds, args)
    spec = _dr_spec(args)
    series = sb_series(ds, info)
    target = (args.target if args.target is not None
              else post_period_midpoint(ds.periods, ds.first_treatment_period))
    sb1_hat = forecast_sb1(series, target, degree=args.degree)
    if spec is not None and ds.covariates.shape[1] > 0:
        center = tau_dr(ds, spec=spec)
    else:
        center = theta_ols(ds)
    results = {
        "tau_dr": center,
        "sb1_forecast": sb1_hat,
        "estimate": center - sb1_hat,
        "degree": args.degree,
        "target_period": target,
        "series": [{"period": t, "sb": v} for t, v in series],
        "ci": None,
    }
    plan = _plan(args)
    if plan is not None:
        def forecast_stat(d: PanelDataset) -> np.ndarray:
            s = sb_series(d, info)
            c = (tau_dr(d, spec=spec)
                 if spec is not None and d.covariates.shape[1] > 0
                 else theta_ols(d))
            return np.array([c - forecast_sb1(s, target, degree=args.degree)])

        boot = bootstrap_estimates(ds, forecast_stat, plan)
        lo, hi = percentile_ci(boot.estimates[:, 0], plan.ci_level)
        results["ci"] = {"lower": lo, "upper": hi}
        results["bootstrap"] = {"replicates": plan.replicates,
                                "seed": plan.seed, "failures": boot.n_failed,
                                "level": plan.ci_level}
    _emit({"command": "forecast", "seed": args.seed, "results": results},
          args.output)
    return 0


def _resolve_group(assignment, requested: int) -> int:
    """Accept either a group index or an adoption-period label."""
    codes = assignment.group_codes or []
    if any(c.g == requested and c.g != 0 for c in codes):
        return requested
    for c in codes:
        if c.first_treated == requested:
            return c.g
    known = sorted((c.g, c.first_treated) for c in codes if c.g != 0)
    raise DidBoundsError(
        f"EmptyCell: no adoption group {requested}; known (index, first"
        f" treated) pairs: {known}"
    )


def _cmd_event_study(args) -> int:
    ds = _load(args)
    info = _info_set(ds, args)
    assignment = classify_paths(ds)
    if args.periods:
        periods = [int(x) for x in args.periods.split(",")]
    else:
        periods = assignment.treatment_periods
    plan = _plan(args)
    per_period = {}
    series_rows = []
    group = None
    if args.twfe:
        if args.group is None:
            raise DidBoundsError("MissingGroup: --twfe requires --group")
        group = _resolve_group(assignment, args.group)
    for t in periods:
        if args.twfe:
            if plan is not None:
                res = twfe_union_ci(ds, info, group, t, plan)
                iv, cb = res.point_interval, res.bounds
            else:
                points = []
                for el in info.elements:
                    fit = twfe_fit(ds, int(el.label))
                    if (group, t) not in fit.theta:
                        raise DidBoundsError(
                            f"EmptyCell: no adoption group g={group}"
                        )
                    points.append(fit.theta[(group, t)])
                iv = IdentifiedInterval(
                    lower=min(points), upper=max(points),
                    point_estimand_label=f"twfe theta[g={group}]",
                )
                cb = None
        else:
            to_paths = assignment.paths_with_status(t, True)
            from_paths = assignment.paths_with_status(t, False)
            if plan is not None:
                res = att_union_ci(ds, to_paths, from_paths, t, info, plan)
                iv, cb = res.point_interval, res.bounds
            else:
                iv = att_bounds_t(ds, to_paths, from_paths, t, info,
                                  assignment)
                cb = None
        entry = {"interval": {"lower": iv.lower, "upper": iv.upper},
                 "ci": None}
        row = {"period": t, "lower": iv.lower, "upper": iv.upper,
               "ci_lower": None, "ci_upper": None}
        if cb is not None:
            entry["ci"] = {"lower": cb.lower, "upper": cb.upper}
            row["ci_lower"], row["ci_upper"] = cb.lower, cb.upper
        per_period[str(t)] = entry
        series_rows.append(row)
    if args.series_csv:
        _write_series_csv(args.series_csv, series_rows)
    results = {"per_period": per_period,
               "treatment_periods": assignment.treatment_periods,
               "staggered": assignment.staggered}
    if assignment.group_codes is not None:
        results["groups"] = {str(c.g): c.first_treated
                             for c in assignment.group_codes}
    if group is not None:
        results["group"] = group
    if plan is not None:
        results["bootstrap"] = {"replicates": plan.replicates,
                                "seed": plan.seed, "level": plan.ci_level}
    _emit({"command": "event-study", "seed": args.seed, "results": results},
          args.output)
    return 0


def _cmd_sc_bounds(args) -> int:
    ds = _load(args)
    dp = DonorPanel.from_panel(ds, post_period=getattr(args, "post_period",
                                                       None))
    info_periods = None
    if args.info_periods:
        info_periods = [int(x) for x in args.info_periods.split(",")]
    interval = sc_bounds(dp, info_periods)
    _emit({
        "command": "sc-bounds",
        "results": {
            "interval": {"lower": interval.lower, "upper": interval.upper},
            "n_donors": len(dp.donors),
            "pre_periods": list(dp.pre_periods),
            "post_period": dp.post_period,
            "gap_hull": {"lower": interval.bias.lower,
                         "upper": interval.bias.upper},
        },
    }, args.output)
    return 0


def _cmd_compare_rr(args) -> int:
    if args.sb0 is not None and args.sbm1 is not None:
        sb0, sbm1 = args.sb0, args.sbm1
    elif args.input:
        ds = _load(args)
        info = _info_set(ds, args)
        series = dict(sb_series(ds, info))
        pre = sorted(series)
        if len(pre) < 2:
            raise DidBoundsError(
                "NeedsAtLeastTwoPeriods: compare-rr needs two pre-periods"
            )
        sbm1, sb0 = series[pre[-2]], series[pre[-1]]
    else:
        raise DidBoundsError(
            "MissingInput: provide --sb0/--sbm1 or --input with two"
            " pre-periods"
        )
    ours = (min(sbm1, sb0), max(sbm1, sb0))
    if args.M is not None:
        rr = rr_smoothness_sb1(sbm1, sb0, args.M)
    else:
        rr = rr_relative_magnitude_sb1(sbm1, sb0, args.Mbar)
    report = discordancy_report(ours, rr)
    _emit({
        "command": "compare-rr",
        "results": {
            "sb0": sb0,
            "sb_minus1": sbm1,
            "hull": {"lower": ours[0], "upper": ours[1]},
            "restriction": rr.restriction,
            "parameter": rr.parameter,
            "rr_interval": {"lower": rr.lower, "upper": rr.upper},
            "overlap": report.overlap,
            "intersection": (None if report.intersection is None
                             else {"lower": report.intersection[0],
                                   "upper": report.intersection[1]}),
            "warning": report.warning,
        },
    }, args.output)
    return 0


def _parse_params(pairs: list[str]) -> dict:
    params = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise DidBoundsError(f"InvalidSpec: bad --param {pair!r}")
        key, value = pair.split("=", 1)
        params[key] = float(value)
    return params


def _cmd_simulate(args) -> int:
    if args.seed is None:
        raise DidBoundsError("MissingSeed: --seed is required for simulate")
    if args.spec_json:
        spec = DgpSpec.from_json(args.spec_json)
    else:
        spec = DgpSpec(family=args.family, n=args.n, seed=args.seed,
                       params=_parse_params(args.param))
    ds = simulate(spec)
    ds.to_csv(args.data_out)
    _emit({
        "command": "simulate",
        "seed": spec.seed,
        "results": {
            "family": spec.family,
            "n": spec.n,
            "params": spec.resolved(),
            "rows": ds.n_obs,
            "periods": ds.periods,
            "csv": str(args.data_out),
        },
    }, args.output)
    return 0


def _cmd_mc(args) -> int:
    if args.seed is None:
        raise DidBoundsError("MissingSeed: --seed is required for mc")
    spec = DgpSpec(family=args.family, n=args.n, seed=args.seed,
                   params=_parse_params(args.param))
    truth = analytic_truth(spec)
    kind = args.estimator
    if kind == "auto":
        kind = "twfe" if "theta_gs" in truth.extra else "bounds"

    if kind == "twfe":
        targets_truth = {f"theta_{g}_{s}": v
                         for (g, s), v in truth.extra["theta_gs"].items()}

        def estimator(ds):
            fit = twfe_fit(ds, baseline_period=0)
            return {f"theta_{g}_{s}": v for (g, s), v in fit.theta.items()}
    else:
        info_periods = list(truth.info_periods)
        post = max(truth.att) if truth.att else None
        targets_truth = {"att": truth.att.get(post)}
        if post in truth.theta_ols:
            targets_truth["theta_ols"] = truth.theta_ols[post]

        def estimator(ds):
            info = InformationSet.from_periods(ds, info_periods)
            bias = bias_set(ds, info)
            th = theta_ols(ds)
            iv = gdid_bounds(th, bias)
            return {"theta_ols": th, "att": (iv.lower, iv.upper),
                    "standard_did": standard_did(ds)}

    report = monte_carlo(spec, estimator, reps=args.reps, seed=args.seed,
                         truth=targets_truth)
    _emit({
        "command": "mc",
        "seed": args.seed,
        "results": {
            "family": spec.family,
            "n": spec.n,
            "reps": report.n_reps,
            "failed": report.n_failed,
            "estimator": kind,
            "targets": {
                name: {"mean": t.mean, "bias": t.bias,
                       "abs_bias": t.abs_bias, "rmse": t.rmse, "n": t.n}
                for name, t in report.targets.items()
            },
            "coverage": report.coverage,
            "truth": {k: v for k, v in targets_truth.items()
                      if v is not None},
        },
    }, args.output)
    return 0


# =============================================================================
# parser
# =============================================================================

def _add_io(p, schema=True):
    p.add_argument("--input", required=True, help="input CSV path")
    if schema:
        p.add_argument("--schema", help="JSON column-mapping file")
    p.add_argument("--output", help="write the JSON document here"
                                    " (default: stdout)")


def _add_info(p):
    p.add_argument("--info-periods",
                   help="comma-separated pre-treatment periods, e.g. -2,-1,0")
    p.add_argument("--info-covariate",
                   help="discrete baseline covariate column")
    p.add_argument("--info-levels",
                   help="comma-separated covariate levels (default: observed)")


def _add_estimation(p):
    p.add_argument("--dr", choices=["linear", "quadratic", "constant", "none"],
                   default="linear",
                   help="outcome-regression spec for the doubly-robust"
                        " estimand (default linear; none = plain means)")
    p.add_argument("--clip", type=float, default=1e-6,
                   help="propensity clipping bound")
    p.add_argument("--post-period", type=int, default=None)
    p.add_argument("--bootstrap", type=int, default=None, metavar="B",
                   help="bootstrap replicates for confidence bounds")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--ci-level", type=float, default=0.95)
    p.add_argument("--series-csv", help="tidy per-period CSV for plotting")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="didbounds",
        description="Robust difference-in-differences bounds toolkit",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="load and validate a panel CSV")
    _add_io(p)

    p = sub.add_parser("bounds", help="ATT interval from a bias-set hull")
    _add_io(p)
    _add_info(p)
    _add_estimation(p)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("po", help="loss-minimizing point estimates"
                                  " (flagged non-causal)")
    _add_io(p)
    _add_info(p)
    _add_estimation(p)
    p.add_argument("--loss", choices=["l1", "l2", "linf"],
                   help="report one loss (default: all three)")
    p.set_defaults(func=_cmd_po)

    p = sub.add_parser("forecast", help="extrapolate the bias trend and"
                                        " point-estimate the ATT")
    _add_io(p)
    _add_info(p)
    _add_estimation(p)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--target", type=float, default=None,
                   help="forecast period (default: post-period midpoint)")
    p.set_defaults(func=_cmd_forecast)

    p = sub.add_parser("event-study", help="per-period ATT intervals in"
                                           " multi-period designs")
    _add_io(p)
    _add_info(p)
    _add_estimation(p)
    p.add_argument("--periods", help="comma-separated treatment periods")
    p.add_argument("--twfe", action="store_true",
                   help="use the saturated two-way FE regression"
                        " (staggered designs)")
    p.add_argument("--group", type=int, default=None,
                   help="adoption group for --twfe: the group index or the"
                        " first treated period label")
    p.set_defaults(func=_cmd_event_study)

    p = sub.add_parser("sc-bounds", help="worst-case bounds over a donor pool")
    _add_io(p)
    p.add_argument("--info-periods")
    p.add_argument("--post-period", type=int, default=None)
    p.set_defaults(func=_cmd_sc_bounds)

    p = sub.add_parser("compare-rr", help="compare the hull with"
                                          " trend-restriction bias sets")
    p.add_argument("--input", help="optional CSV to compute the biases from")
    p.add_argument("--schema")
    p.add_argument("--info-periods")
    p.add_argument("--info-covariate")
    p.add_argument("--info-levels")
    p.add_argument("--sb0", type=float, default=None)
    p.add_argument("--sbm1", type=float, default=None)
    p.add_argument("--M", type=float, default=None,
                   help="smoothness cap on the slope change")
    p.add_argument("--Mbar", type=float, default=None,
                   help="relative-magnitude cap")
    p.add_argument("--post-period", type=int, default=None)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_compare_rr)

    p = sub.add_parser("simulate", help="generate a dataset from a known"
                                        " design")
    p.add_argument("--family", help="design family name")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.add_argument("--spec-json", help="load the full design from JSON")
    p.add_argument("--data-out", required=True, help="output CSV path")
    p.add_argument("--output")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("mc", help="Monte Carlo study on a known design")
    p.add_argument("--family", required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.add_argument("--estimator", choices=["auto", "twfe", "bounds"],
                   default="auto")
    p.add_argument("--output")
    p.set_defaults(func=_cmd_mc)

    return parser


def _apply_thread_env() -> None:
    # DIDBOUNDS_THREADS caps the BLAS pools behind the linear algebra;
    # estimation itself is deterministic regardless of the cap
    import os

    raw = os.environ.get("DIDBOUNDS_THREADS")
    if not raw:
        return
    try:
        limit = max(1, int(raw))
    except ValueError:
        raise DidBoundsError(
            f"InvalidThreadCount: DIDBOUNDS_THREADS={raw!r} is not an integer"
        )
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(limits=limit)
    except ImportError:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ[var] = str(limit)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(_glue_negative_values(argv))
    try:
        _apply_thread_env()
    except DidBoundsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.command == "validate":
        try:
            return _cmd_validate(args)
        except (DidBoundsError, FileNotFoundError, ValueError) as exc:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return 1
    if args.command == "compare-rr" and args.M is None and args.Mbar is None:
        parser.error("compare-rr requires --M or --Mbar")
    if args.command == "simulate" and not args.family and not args.spec_json:
        parser.error("simulate requires --family or --spec-json")
    try:
        return args.func(args)
    except (DidBoundsError, FileNotFoundError, ValueError) as exc:
        # data/identification problems: name the error, never a traceback
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
