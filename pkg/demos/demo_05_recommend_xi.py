"""
Recommending an XI against an opposition
========================================

Opposition weaknesses (level-2 patterns) pull candidate players into a
bipartite matchup graph; candidates are ranked by the stability ratio
delta = mean edge weight / spread, and slots fill wicketkeepers first,
then batsmen, bowlers, and all-rounders. Lock/exclude steering supports
coach what-ifs.
"""

from pickxi.engine import Engine
from pickxi.recommend import Composition
from pickxi.synthetic import build_world

world = build_world(seed=5, n_teams=4, rounds=6, tournament=False)
engine = Engine(world.snapshot)
us, them = world.teams[0], world.teams[1]

############################################################
# Who are their bowlers weak against? (Any country's batsmen count.)

some_bowler = them.by_role("bowler")[0].player_id
print(f"{some_bowler} struggles against:",
      engine.weakness_list(some_bowler) or "nobody on record")

############################################################
# The matchup graph: direct edges carry the candidate's own pairwise
# index against the opponent; proxied edges transfer the value from
# the most similar weakness-list player.

graph = engine.build_bipartite(us.ids(), them.ids())
direct = sum(1 for e in graph.edges if e.basis == "direct")
print(f"\ngraph: {len(graph.edges)} edges "
      f"({direct} direct, {len(graph.edges) - direct} proxied)")
print(graph.to_dot()[:240], "...")

############################################################
# Full recommendation for a 4/4/1/1/1 composition.

composition = Composition(batsman=4, bowler=4, wicketkeeper=1,
                          batting_allrounder=1, bowling_allrounder=1)
rec = engine.recommend(us.ids(), them.ids(), composition)
print("\nrecommended XI:")
for player, role in rec.xi:
    print(f"  {player:24s} {role}")

ordering = rec.orderings["batsman"]
print("\nbatsman ordering (delta = mean/std of edge weights):")
for cand in ordering[:5]:
    delta = f"{cand.delta:.3f}" if cand.delta is not None else "  -  "
    print(f"  {cand.player_id:24s} delta={delta} edges={cand.edge_count}")

############################################################
# Coach what-if: drop a selected batsman and pin a spare; the engine
# re-solves under the same thresholds (echoed in the response).

victim = next(p for p, role in rec.xi if role == "batsman")
spare = next(p.player_id for p in us.by_role("batsman")
             if p.player_id not in rec.players())
steered = engine.recommend(us.ids(), them.ids(), composition,
                           locked=(spare,), excluded=(victim,))
print(f"\nafter excluding {victim} and locking {spare}:")
print("  in :", sorted(set(steered.players()) - set(rec.players())))
print("  out:", sorted(set(rec.players()) - set(steered.players())))
