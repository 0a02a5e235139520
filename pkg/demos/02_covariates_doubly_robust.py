"""Doubly-robust estimation of the covariate-aggregated contrast.

Treatment here follows a logit in a covariate and the control outcome is
quadratic in it. The doubly-robust estimand stays consistent when
either the propensity model or the outcome model is right; only when
both are wrong does it drift.
"""

import didbounds as db

spec = db.DgpSpec(family="dr_logit_quadratic", n=200_000, seed=2)
truth = db.analytic_truth(spec)
ds = db.simulate(spec)

combos = {
    "logit propensity + linear outcome  (ps right)":
        db.DrSpec(ps_spec="logit", or_spec="linear"),
    "constant propensity + quadratic outcome (or right)":
        db.DrSpec(ps_spec="known_constant", or_spec="quadratic"),
    "logit propensity + quadratic outcome (both right)":
        db.DrSpec(ps_spec="logit", or_spec="quadratic"),
    "constant propensity + linear outcome (both wrong)":
        db.DrSpec(ps_spec="known_constant", or_spec="linear"),
}

print(f"true covariate-aggregated effect: {truth.att[1]:.3f}\n")
for label, dr in combos.items():
    est = db.tau_dr(ds, spec=dr)
    print(f"  {label:<52} {est:7.3f}")

print("\noverlap diagnostics at the post period:")
rep = db.overlap_check(ds, 1)
print(f"  mode={rep.mode}, fitted propensity range"
      f" [{rep.propensity_min:.3f}, {rep.propensity_max:.3f}],"
      f" ok={rep.ok}")
if not rep.ok:
    # the logit tails genuinely thin out below the default 1% threshold;
    # the report flags it while the estimand clips and carries on
    for note in rep.violations:
        print(f"  flagged: {note}")
