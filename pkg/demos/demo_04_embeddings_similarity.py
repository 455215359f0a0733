"""
Matchup embeddings, similarity, and like-for-like replacement
=============================================================

Level 1 embeds a player as the vector of pairwise quality indices
against every opposite-role player; level 2 reduces it to a ternary
weak / not-weak / unknown dominance pattern. Cosine similarity over
shared support drives clustering and replacement search.
"""

import numpy as np

from pickxi.embedding import UNKNOWN, WEAK, similarity_l1, similarity_l2
from pickxi.engine import Engine
from pickxi.errors import UnrateableError
from pickxi.synthetic import build_world

world = build_world(seed=5, n_teams=4, rounds=6, tournament=False)
engine = Engine(world.snapshot)
team = world.teams[0]


def rateable_batsmen(specs):
    for spec in specs:
        try:
            engine.level2(spec.player_id, "batting")
        except UnrateableError:
            continue
        yield spec.player_id


############################################################
# Level-1: dense vector over bowler indices, zero where the pair never
# met the 12-legal-ball threshold.

opener, partner = list(rateable_batsmen(team.by_role("batsman")))[:2]
vec = engine.level1(opener, "batting")
defined = int(np.count_nonzero(vec.values))
print(f"{opener}: {defined} of {vec.values.size} bowler matchups defined")

############################################################
# Level-2: where did the pairwise index drop more than 25% below the
# career index?

pattern = engine.level2(opener, "batting")
bowlers = engine.snapshot.registry.bowlers_by_index()
weak_vs = [bowlers[i] for i in np.nonzero(pattern.values == WEAK)[0]]
unknown = int(np.sum(pattern.values == UNKNOWN))
print(f"weak against: {weak_vs or 'nobody'}; {unknown} matchups unknown")

############################################################
# Similarities: cosine over common nonzero support (level 1) and
# agreement over commonly-known entries (level 2).

l1_sim = similarity_l1(vec, engine.level1(partner, "batting"))
l2_sim = similarity_l2(pattern, engine.level2(partner, "batting"))
print(f"\n{opener} vs {partner}: level-1 cosine={l1_sim:.3f} "
      f"level-2 agreement={l2_sim:.3f}")

############################################################
# Agglomerative clustering groups batsmen with similar matchup
# patterns (deterministic ordering, average linkage).

assignment = engine.cluster_players("batting",
                                    ids=[p.player_id for t in world.teams
                                         for p in t.by_role("batsman")],
                                    n_clusters=4)
clusters: dict[int, list[str]] = {}
for pid, label in assignment.items():
    clusters.setdefault(label, []).append(pid)
print("\nclusters of batsmen:")
for label in sorted(clusters):
    print(f"  {label}: {', '.join(sorted(clusters[label]))}")

############################################################
# Like-for-like replacement: rank candidates by embedding similarity
# (level-2 agreement when level-1 cosine is undefined).

pool = [p.player_id for t in world.teams for p in t.by_role("batsman")
        if p.player_id != opener]
ranked = engine.replacements(opener, pool)
print(f"\nreplacements for {opener}:")
for cand in ranked[:5]:
    print(f"  {cand.player_id:24s} {cand.similarity:.3f} ({cand.basis})")
