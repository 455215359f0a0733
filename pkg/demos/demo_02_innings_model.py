"""
The Bernoulli innings model
===========================

Every ball either scores r runs or takes a wicket (probability r/avg);
an innings of 11 identical players ends at 10 wickets or 300 balls.
The closed-form mean and spread are checked against a seeded
Monte-Carlo simulation of the same ball process.
"""

from pickxi.rating import (InningsModel, estimate_moments, innings_moments,
                           outcome_distribution, simulate_innings)

############################################################
# Closed-form moments for a typical profile: 0.8 runs per ball,
# 40 runs per dismissal.

model = InningsModel(r=0.8, avg=40.0)
moments = innings_moments(model)
print(f"r=0.8 avg=40: E(runs)={moments.e_runs:.2f} "
      f"sigma={moments.sigma_runs:.2f} p(all out)={moments.p_allout:.3f}")

############################################################
# The Monte-Carlo oracle agrees within sampling error.

mc = estimate_moments(model, trials=200_000, seed=42)
print(f"monte carlo:  mean={mc.mean:.2f} +- {mc.stderr:.2f} (std {mc.std:.2f})")
print(f"one simulated innings: {simulate_innings(model, seed=7):.0f} runs")

############################################################
# Boundary behaviour: no dismissals means exactly 300 r with zero
# spread; avg == r means all out on ball ten without scoring.

print("\nno-dismissal limit:", innings_moments(InningsModel(0.8, float("inf"))))
print("instant collapse:  ", innings_moments(InningsModel(0.8, 0.8)))

############################################################
# Expected runs grow with the average (more survival per run) and the
# outcome distribution always sums to one.

print("\n   avg   E(runs)   sigma   p(all out)")
for avg in (10, 20, 30, 50, 80, 120):
    m = innings_moments(InningsModel(0.8, float(avg)))
    print(f"  {avg:4d}   {m.e_runs:7.2f}  {m.sigma_runs:6.2f}   {m.p_allout:.4f}")

allout, notout = outcome_distribution(model)
print(f"\noutcome mass check: {allout.sum() + notout.sum():.12f}")
