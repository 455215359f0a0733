"""Composition constraints, delta ordering, selection, fixtures."""

import math

import numpy as np
import pytest

from pickxi.errors import ConstraintError, InfeasibleError, UnknownPlayerError
from pickxi.recommend import (BipartiteGraph, Composition, Edge,
                              RankedCandidate, delta_ordering,
                              lineup_similarity, parse_fixtures, select_team)
from pickxi.roster import (ROLE_BATSMAN, ROLE_BATTING_AR, ROLE_BOWLER,
                           ROLE_BOWLING_AR, ROLE_WICKETKEEPER, ROLES)


def test_composition_constraints():
    Composition(4, 4, 1, 1, 1).validate()
    with pytest.raises(ConstraintError) as err:
        Composition(4, 4, 0, 2, 1).validate()
    assert err.value.rule == "wicketkeeper-minimum"
    with pytest.raises(ConstraintError) as err:
        Composition(4, 3, 1, 1, 1).validate()
    assert err.value.rule == "total-eleven"
    with pytest.raises(ConstraintError) as err:
        Composition(6, 3, 1, 1, 0).validate()
    assert err.value.rule == "bowling-minimum"
    with pytest.raises(ConstraintError) as err:
        Composition(5, 4, 1, 0, 1).validate(squad_size=10)
    assert err.value.rule == "squad-size"
    # squad mode keeps the same structural rules at the wider size
    Composition(6, 5, 1, 1, 1).validate(squad_size=14)


def test_composition_parse():
    assert Composition.parse("5,4,1,0,1") == Composition(5, 4, 1, 0, 1)
    with pytest.raises(ConstraintError, match="5 comma-separated"):
        Composition.parse("5,4,1")
    with pytest.raises(ConstraintError):
        Composition.parse("a,b,c,d,e")


def graph_of(edges_per_candidate: dict[str, list[float]],
             roles=None) -> tuple[BipartiteGraph, dict, dict]:
    candidates = sorted(edges_per_candidate)
    edges = []
    for cand, weights in edges_per_candidate.items():
        for j, w in enumerate(weights):
            edges.append(Edge(cand, f"opp{j}", w, "direct"))
    graph = BipartiteGraph(candidates, [f"opp{j}" for j in range(5)], edges)
    roles = roles or {c: ROLE_BATSMAN for c in candidates}
    phi = {c: 1.0 for c in candidates}
    return graph, roles, phi


def test_delta_ordering_frozen_hand_values():
    """A {3,1} and B {10,2} with the sample-std convention."""
    graph, roles, phi = graph_of({"a": [3.0, 1.0], "b": [10.0, 2.0]})
    ranked = delta_ordering(graph, roles, phi)
    assert [c.player_id for c in ranked] == ["a", "b"]
    assert ranked[0].delta == pytest.approx(2 / math.sqrt(2))
    assert ranked[0].delta == pytest.approx(1.4142135623730951)
    assert ranked[1].delta == pytest.approx(6 / math.sqrt(32))
    assert ranked[1].delta == pytest.approx(1.0606601717798212)


def test_delta_zero_spread_falls_to_mean_segment():
    graph, roles, phi = graph_of({"flat": [4.0, 4.0], "varied": [3.0, 1.0]})
    ranked = delta_ordering(graph, roles, phi)
    flat = next(c for c in ranked if c.player_id == "flat")
    assert flat.segment == 1
    assert flat.delta is None
    assert flat.mean_weight == pytest.approx(4.0)
    varied = next(c for c in ranked if c.player_id == "varied")
    assert varied.segment == 0
    assert ranked.index(varied) < ranked.index(flat)


def test_delta_single_edge_and_edgeless_segments():
    graph, roles, phi = graph_of({"one": [5.0], "none": []})
    phi["none"] = 9.0
    ranked = delta_ordering(graph, roles, phi)
    assert [c.segment for c in ranked] == [1, 2]
    assert ranked[1].player_id == "none"
    assert ranked[1].career_phi == 9.0


def test_delta_ordering_permutation_invariant():
    spec = {"a": [3.0, 1.0], "b": [10.0, 2.0], "c": [4.0, 4.0], "d": []}
    graph, roles, phi = graph_of(spec)
    ranked = delta_ordering(graph, roles, phi)
    shuffled = BipartiteGraph(list(reversed(graph.candidates)),
                              graph.opposition, list(reversed(graph.edges)))
    again = delta_ordering(shuffled, roles, phi)
    assert [c.player_id for c in ranked] == [c.player_id for c in again]


def _orderings(pool_roles: dict[str, str]) -> dict:
    """Orderings with every candidate edgeless (career index 0)."""
    graph = BipartiteGraph(sorted(pool_roles), [], [])
    phi = {pid: 0.0 for pid in pool_roles}
    return {role: delta_ordering(graph, pool_roles, phi, (role,))
            for role in ROLES}


def pool_roles_of(bat=5, bowl=5, wk=2, bar=2, boar=2) -> dict[str, str]:
    roles = {}
    for prefix, count, role in (("bat", bat, ROLE_BATSMAN),
                                ("bowl", bowl, ROLE_BOWLER),
                                ("wk", wk, ROLE_WICKETKEEPER),
                                ("bar", bar, ROLE_BATTING_AR),
                                ("boar", boar, ROLE_BOWLING_AR)):
        for i in range(count):
            roles[f"{prefix}{i}"] = role
    return roles


def test_select_exact_pool_forced():
    roles = pool_roles_of(bat=4, bowl=4, wk=1, bar=1, boar=1)
    xi = select_team(_orderings(roles), Composition(4, 4, 1, 1, 1), roles)
    assert sorted(p for p, _ in xi) == sorted(roles)


def test_select_zero_wicketkeepers_rejected():
    roles = pool_roles_of()
    with pytest.raises(ConstraintError) as err:
        select_team(_orderings(roles), Composition(5, 4, 0, 1, 1), roles)
    assert err.value.rule == "wicketkeeper-minimum"


def test_select_batting_allrounder_overflow():
    # only 3 pure batsmen for 4 batsman slots; a batting all-rounder
    # fills the last one once the batsman ordering is exhausted
    roles = pool_roles_of(bat=3, bowl=4, wk=1, bar=2, boar=1)
    xi = select_team(_orderings(roles), Composition(4, 4, 1, 1, 1), roles)
    assigned = {pid: role for pid, role in xi}
    bar_as_batsman = [p for p, r in assigned.items()
                      if r == ROLE_BATSMAN and roles[p] == ROLE_BATTING_AR]
    assert len(bar_as_batsman) == 1
    assert sum(1 for r in assigned.values() if r == ROLE_BATSMAN) == 4
    assert sum(1 for r in assigned.values() if r == ROLE_BATTING_AR) == 1


def test_select_infeasible_names_slot():
    roles = pool_roles_of(bat=3, bowl=4, wk=1, bar=0, boar=1)
    with pytest.raises(InfeasibleError) as err:
        select_team(_orderings(roles), Composition(4, 4, 1, 1, 1), roles)
    assert err.value.slot == ROLE_BATSMAN


def test_select_locked_and_excluded():
    roles = pool_roles_of(bat=6, bowl=5, wk=2, bar=1, boar=1)
    orderings = _orderings(roles)
    comp = Composition(4, 4, 1, 1, 1)
    xi = select_team(orderings, comp, roles, locked=("bat5",),
                     excluded=("bat0",))
    players = [p for p, _ in xi]
    assert "bat5" in players
    assert "bat0" not in players
    assert dict(xi)["bat5"] == ROLE_BATSMAN
    with pytest.raises(ConstraintError) as err:
        select_team(orderings, comp, roles, locked=("bat1",),
                    excluded=("bat1",))
    assert err.value.rule == "lock-exclude-conflict"
    with pytest.raises(UnknownPlayerError):
        select_team(orderings, comp, roles, locked=("ghost",))


def test_select_locked_allrounder_falls_back_to_batsman_slot():
    roles = pool_roles_of(bat=5, bowl=4, wk=1, bar=2, boar=1)
    comp = Composition(4, 4, 1, 1, 1)
    orderings = _orderings(roles)
    # both all-rounders locked: one takes the AR slot, one a batsman slot
    xi = select_team(orderings, comp, roles, locked=("bar0", "bar1"))
    assigned = dict(xi)
    assert {assigned["bar0"], assigned["bar1"]} == {ROLE_BATTING_AR,
                                                    ROLE_BATSMAN}


def test_select_lock_infeasible_rule():
    roles = pool_roles_of(bat=5, bowl=4, wk=3, bar=1, boar=1)
    comp = Composition(4, 4, 1, 1, 1)
    with pytest.raises(ConstraintError) as err:
        select_team(_orderings(roles), comp, roles,
                    locked=("wk0", "wk1"))
    assert err.value.rule == "lock-infeasible"


def test_lineup_similarity_counts():
    xi = [f"p{i}" for i in range(11)]
    assert lineup_similarity(xi, xi) == 1.0
    other = [f"q{i}" for i in range(11)]
    assert lineup_similarity(xi, other) == 0.0
    mixed = xi[:9] + other[:2]
    assert lineup_similarity(xi, mixed) == pytest.approx(9 / 11)
    with pytest.raises(ValueError, match="11 players"):
        lineup_similarity(xi[:10], xi)
    with pytest.raises(ValueError, match="duplicates"):
        lineup_similarity(xi[:10] + ["p0"], other)


def test_parse_fixtures_and_validation():
    text = """{
      "matches": [
        {"id": "f1", "date": "2019-06-01", "winner": "A",
         "sides": [
           {"team": "A", "pool": ["a1", "a2"], "xi": ["a1"]},
           {"team": "B", "pool": ["b1"], "xi": ["b1"]}
         ]},
        {"id": "f2", "date": "2019-06-02", "abandoned": true,
         "sides": [
           {"team": "A", "pool": ["a1"], "xi": []},
           {"team": "B", "pool": ["b1"], "xi": []}
         ]}
      ]
    }"""
    fixtures = parse_fixtures(text)
    assert len(fixtures) == 2
    assert fixtures[0].winner == "A"
    assert fixtures[1].abandoned
    bad = text.replace('"winner": "A"', '"winner": "C"')
    with pytest.raises(ValueError, match="winner"):
        parse_fixtures(bad)


def test_randomized_selection_property():
    """Non-error outputs always satisfy the XI constraints; errors always
    name a rule or slot."""
    rng = np.random.default_rng(123)
    produced = errored = 0
    for _ in range(120):
        roles = pool_roles_of(bat=int(rng.integers(3, 9)),
                              bowl=int(rng.integers(3, 8)),
                              wk=int(rng.integers(1, 4)),
                              bar=int(rng.integers(0, 3)),
                              boar=int(rng.integers(0, 3)))
        counts = [int(rng.integers(3, 6)), int(rng.integers(3, 6)),
                  int(rng.choice([0, 1, 1, 1, 2])), int(rng.integers(0, 2))]
        counts.append(11 - sum(counts))
        comp = Composition(*counts)
        try:
            xi = select_team(_orderings(roles), comp, roles)
        except ConstraintError as exc:
            assert exc.rule
            errored += 1
        except InfeasibleError as exc:
            assert exc.slot in ROLES
            errored += 1
        except Exception as exc:  # negative trailing count
            assert isinstance(exc, ConstraintError)
        else:
            produced += 1
            players = [p for p, _ in xi]
            assigned = [r for _, r in xi]
            assert len(players) == 11 and len(set(players)) == 11
            assert assigned.count(ROLE_WICKETKEEPER) >= 1
            bowling_arm = sum(1 for r in assigned
                              if r in (ROLE_BOWLER, ROLE_BATTING_AR,
                                       ROLE_BOWLING_AR))
            assert bowling_arm >= 5
    assert produced > 5 and errored > 5


def test_dot_export_styles_and_determinism():
    graph = BipartiteGraph(
        ["c1", "c2"], ["o1"],
        [Edge("c1", "o1", 1.25, "direct"),
         Edge("c2", "o1", 0.75, "proxied", via="w9")])
    dot = graph.to_dot()
    assert dot == graph.to_dot()
    assert 'style=solid' in dot and 'style=dashed' in dot
    assert '"c_c1" -- "o_o1"' in dot
    assert "rankdir=LR" in dot
