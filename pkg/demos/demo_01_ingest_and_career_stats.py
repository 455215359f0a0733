"""
Ingesting ball-by-ball match files
==================================

Generates a small deterministic corpus in the real per-match JSON
layout, ingests it through the full parse -> registry -> snapshot path,
and queries career and head-to-head aggregates.
"""

import tempfile
from pathlib import Path

from pickxi.snapshot import Snapshot, ingest
from pickxi.synthetic import build_world, write_world

############################################################
# Build a 4-team world and materialize it as files on disk.

world = build_world(seed=5, n_teams=4, rounds=6, tournament=False)
workdir = Path(tempfile.mkdtemp(prefix="pickxi_demo_"))
paths = write_world(world, workdir)
print(f"wrote {len(world.files)} match files under {paths['matches']}")

############################################################
# Ingest and persist a snapshot, then reload it.

snapshot = ingest(paths["matches"], paths["roster"])
snapshot_path = workdir / "snapshot.bin"
snapshot.save(snapshot_path)
snapshot = Snapshot.load(snapshot_path)
print(f"snapshot: {snapshot.metadata['matches']} matches, "
      f"{snapshot.metadata['deliveries']} deliveries, "
      f"{snapshot.registry.n_batsmen} indexed batsmen, "
      f"{snapshot.registry.n_bowlers} indexed bowlers")

############################################################
# Career aggregates: batting runs exclude extras, bowling runs
# conceded include them, and zero-dismissal averages use the 0.5 floor.

opener = world.teams[0].by_role("batsman")[0].player_id
stats = snapshot.career_stats(opener)
print(f"\n{opener}: {stats.batting_runs} runs off {stats.balls_faced} balls, "
      f"{stats.dismissals} dismissals -> average {stats.c_batsman():.2f} "
      f"(rateable: {stats.batting_rateable})")

quick = world.teams[1].by_role("bowler")[0].player_id
bowl = snapshot.career_stats(quick)
print(f"{quick}: conceded {bowl.runs_conceded_incl_extras} "
      f"({bowl.extras_conceded} extras) for {bowl.wickets} wickets "
      f"-> average {bowl.c_bowler():.2f}")

############################################################
# Head-to-head totals back any matchup query, including date windows.

pair = snapshot.head_to_head(opener, quick)
print(f"\n{opener} vs {quick}: {pair.balls} balls, {pair.runs} runs, "
      f"{pair.outs} outs, {pair.extras} extras")
print("active years:", snapshot.active_years(opener))
