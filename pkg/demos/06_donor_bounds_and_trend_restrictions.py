"""Donor-pool bounds and the comparison with trend-restriction bias sets.

With several candidate control series and unknown convex weights, the
ATT is bracketed by the worst and best donor contrasts net of the hull
of donor-by-period baseline gaps. Separately, the hull-based bias set is
intersected with the sets implied by smoothness and relative-magnitude
restrictions on the bias path: a smoothness cap below the observed bias
change contradicts the data (empty intersection), while
relative-magnitude sets always overlap.
"""

import didbounds as db

# --- donor-pool bounds ---------------------------------------------------
dp = db.DonorPanel(
    treated={-1: 4.8, 0: 5.0, 1: 10.0},
    donors={
        "region A": {-1: 3.9, 0: 4.0, 1: 5.0},
        "region B": {-1: 3.1, 0: 3.0, 1: 3.0},
        "region C": {-1: 4.4, 0: 4.5, 1: 6.0},
    },
    pre_periods=(-1, 0),
    post_period=1,
)
iv = db.sc_bounds(dp)
print("donor-pool bounds (weights of the true mixture never estimated):")
print(f"  ATT in [{iv.lower:.2f}, {iv.upper:.2f}]")
print(f"  baseline gap hull [{iv.bias.lower:.2f}, {iv.bias.upper:.2f}]"
      f" over {len(dp.donors)} donors x {len(dp.pre_periods)} pre-periods")

# --- trend-restriction comparison on two pre-periods --------------------
a1, a0 = db.mills_alpha(1.0)
sb0, sbm1 = a1 - a0, 3 * (a1 - a0)  # the dip design's biases at t=0, -1
ours = (min(sbm1, sb0), max(sbm1, sb0))
print(f"\nobserved biases: sb(-1)={sbm1:.3f}, sb(0)={sb0:.3f};"
      f" hull [{ours[0]:.3f}, {ours[1]:.3f}]")

for m in (1.0, 4.0, 8.0):
    rr = db.rr_smoothness_sb1(sbm1, sb0, m)
    rep = db.discordancy_report(ours, rr)
    status = ("empty intersection - do not use this M"
              if not rep.overlap else f"intersection {rep.intersection}")
    print(f"  smoothness M={m}: set [{rr.lower:.3f}, {rr.upper:.3f}];"
          f" {status}")

for mbar in (0.5, 1.0, 2.0):
    rr = db.rr_relative_magnitude_sb1(sbm1, sb0, mbar)
    rep = db.discordancy_report(ours, rr)
    print(f"  relative magnitude Mbar={mbar}: set"
          f" [{rr.lower:.3f}, {rr.upper:.3f}]; overlap={rep.overlap}")
