"""
Quality-weighted player ratings
===============================

Head-to-head runs and dismissals are reweighted by the opposition's
career quality before feeding the innings model, producing a
standardized index next to the unweighted baseline, plus per-year
series with min-max normalization.
"""

from pickxi.config import DEFAULT_CONFIG
from pickxi.engine import Engine
from pickxi.rating import quality_weight
from pickxi.synthetic import build_world

############################################################
# Quality weights are opposition-relative ratios: runs against a
# stingier bowler count for more.

print("batsman (avg 50) vs bowler (avg 25):",
      quality_weight(50, 25, "batsman"))
print("the same pair from the bowler's side:",
      quality_weight(50, 25, "bowler"))

############################################################
# Career ratings on a synthetic corpus: quality index vs baseline.

world = build_world(seed=5, n_teams=4, rounds=6, tournament=False)
engine = Engine(world.snapshot)

print("\nplayer                    side      phi    baseline")
for team in world.teams[:2]:
    for spec in (team.by_role("batsman")[:2] + team.by_role("bowler")[:2]):
        side = "batting" if spec.role != "bowler" else "bowling"
        record = engine.rating_record(spec.player_id, side)
        if record.phi_player is None:
            continue
        print(f"{spec.player_id:24s} {side:8s} {record.phi_player:7.3f} "
              f"{record.baseline_rating:10.3f}")

############################################################
# Per-year series window the player's own deliveries; the opposition's
# career averages stay full-span. Values are min-max normalized for
# plotting, a single-season series mapping to 1.0.

subject = world.teams[0].by_role("batsman")[0].player_id
rows, phi_norm, base_norm = engine.rating_timeseries(subject, "batting")
print(f"\n{subject} by year:")
for row, pn, bn in zip(rows, phi_norm, base_norm):
    print(f"  {row.period}: phi={row.phi_player:7.3f} (norm {pn:.2f})   "
          f"baseline={row.baseline_rating:7.3f} (norm {bn:.2f})")
