"""Opposition-aware XI selection over the weakness graph.

Candidates link to opposition players through shared weakness patterns,
get scored by the stability ratio delta = mean edge weight / edge-weight
spread, and fill the coach-supplied role composition in a fixed order:
wicketkeepers, batsmen (batting all-rounders as overflow), bowlers
(bowling all-rounders as overflow), then the all-rounder slots.
"""

from __future__ import annotations

import datetime as dt
import json
import math
import statistics
from dataclasses import dataclass, field

from .config import DEFAULT_CONFIG, EngineConfig
from .errors import ConstraintError, InfeasibleError, UnknownPlayerError
from .roster import (ROLE_BATSMAN, ROLE_BATTING_AR, ROLE_BOWLER,
                     ROLE_BOWLING_AR, ROLE_WICKETKEEPER)

# Which side of the matchup graph each roster role plays on.
BATTING_SIDE_ROLES = (ROLE_BATSMAN, ROLE_WICKETKEEPER, ROLE_BATTING_AR)
BOWLING_SIDE_ROLES = (ROLE_BOWLER, ROLE_BOWLING_AR)


def graph_side(role: str) -> str:
    return "batting" if role in BATTING_SIDE_ROLES else "bowling"


@dataclass(frozen=True)
class Composition:
    """Role counts for the XI. Wicketkeeper >= 1 and at least five players
    who bowl (bowlers plus all-rounders); total must equal the squad size
    (11 unless squad mode widens it)."""

    batsman: int = 0
    bowler: int = 0
    wicketkeeper: int = 0
    batting_allrounder: int = 0
    bowling_allrounder: int = 0

    def total(self) -> int:
        return (self.batsman + self.bowler + self.wicketkeeper
                + self.batting_allrounder + self.bowling_allrounder)

    def count(self, role: str) -> int:
        return {
            ROLE_BATSMAN: self.batsman,
            ROLE_BOWLER: self.bowler,
            ROLE_WICKETKEEPER: self.wicketkeeper,
            ROLE_BATTING_AR: self.batting_allrounder,
            ROLE_BOWLING_AR: self.bowling_allrounder,
        }[role]

    def validate(self, squad_size: int = 11) -> None:
        if squad_size < 11:
            raise ConstraintError("squad-size", f"squad size {squad_size} < 11")
        if min(self.batsman, self.bowler, self.wicketkeeper,
               self.batting_allrounder, self.bowling_allrounder) < 0:
            raise ConstraintError("non-negative-counts", "negative role count")
        if self.total() != squad_size:
            raise ConstraintError(
                "total-eleven",
                f"composition must total {squad_size} players, got {self.total()}")
        if self.wicketkeeper < 1:
            raise ConstraintError("wicketkeeper-minimum",
                                  "at least one wicketkeeper is required")
        bowling_arm = self.bowler + self.batting_allrounder + self.bowling_allrounder
        if bowling_arm < 5:
            raise ConstraintError(
                "bowling-minimum",
                f"bowlers plus all-rounders must be >= 5, got {bowling_arm}")

    @classmethod
    def parse(cls, text: str) -> "Composition":
        """Parse 'B,BO,WK,BAR,BOAR' counts, e.g. '5,4,1,0,1'."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 5:
            raise ConstraintError("composition-format",
                                  "composition must be 5 comma-separated counts "
                                  "(batsman,bowler,wicketkeeper,batting-ar,bowling-ar)")
        try:
            counts = [int(p) for p in parts]
        except ValueError:
            raise ConstraintError("composition-format",
                                  f"non-integer composition {text!r}") from None
        return cls(*counts)


@dataclass(frozen=True)
class Edge:
    candidate: str
    opponent: str
    weight: float
    basis: str  # 'direct' or 'proxied'
    via: str | None = None  # weakness-list player carrying a proxied weight


@dataclass
class BipartiteGraph:
    """Candidates on the left, opposition on the right, weakness-backed
    weighted edges between opposite roles."""

    candidates: list[str]
    opposition: list[str]
    edges: list[Edge] = field(default_factory=list)

    def edges_of(self, candidate: str) -> list[Edge]:
        return [e for e in self.edges if e.candidate == candidate]

    def to_dot(self) -> str:
        """Graphviz rendering; proxied edges dashed, weights as labels."""
        lines = ["graph matchups {", "  rankdir=LR;",
                 '  node [shape=box, fontsize=10];']
        lines.append("  subgraph cluster_candidates {")
        lines.append('    label="candidates";')
        for c in self.candidates:
            lines.append(f'    "c_{c}" [label="{c}"];')
        lines.append("  }")
        lines.append("  subgraph cluster_opposition {")
        lines.append('    label="opposition";')
        for o in self.opposition:
            lines.append(f'    "o_{o}" [label="{o}"];')
        lines.append("  }")
        for e in sorted(self.edges, key=lambda e: (e.candidate, e.opponent)):
            style = "dashed" if e.basis == "proxied" else "solid"
            lines.append(f'  "c_{e.candidate}" -- "o_{e.opponent}" '
                         f'[label="{e.weight:.3f}", style={style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RankedCandidate:
    """Stability-ranked candidate; delta is defined only with >= 2 edges
    and nonzero spread, everyone else falls back to mean weight, and
    edgeless players trail ordered by career index."""

    player_id: str
    role: str
    delta: float | None
    edge_count: int
    mean_weight: float | None
    career_phi: float | None
    segment: int  # 0 delta-ranked, 1 mean-ranked, 2 edgeless


def delta_ordering(graph: BipartiteGraph, roles: dict[str, str],
                   career_phi: dict[str, float | None],
                   role_filter: tuple[str, ...] | None = None,
                   config: EngineConfig = DEFAULT_CONFIG) -> list[RankedCandidate]:
    """Total deterministic order over (filtered) candidates.

    Sample standard deviation (n-1 denominator) is the documented spread
    convention. Ties break by career index descending, then id.
    """
    ranked = []
    for pid in sorted(set(graph.candidates)):
        role = roles[pid]
        if role_filter is not None and role not in role_filter:
            continue
        weights = [e.weight for e in graph.edges_of(pid)]
        phi = career_phi.get(pid)
        if len(weights) >= config.delta_min_edges:
            spread = statistics.stdev(weights)
            if spread >= config.delta_sigma_floor:
                ranked.append(RankedCandidate(
                    pid, role, statistics.fmean(weights) / spread,
                    len(weights), statistics.fmean(weights), phi, 0))
                continue
        if weights:
            ranked.append(RankedCandidate(pid, role, None, len(weights),
                                          statistics.fmean(weights), phi, 1))
        else:
            ranked.append(RankedCandidate(pid, role, None, 0, None, phi, 2))

    def key(c: RankedCandidate):
        phi = c.career_phi if c.career_phi is not None else -math.inf
        primary = {0: c.delta, 1: c.mean_weight, 2: phi}[c.segment]
        return (c.segment, -(primary if primary is not None else -math.inf),
                -phi, c.player_id)

    ranked.sort(key=key)
    return ranked


@dataclass
class Recommendation:
    """Selected XI with the full diagnostic trail."""

    xi: list[tuple[str, str]]  # (player, assigned role) in selection order
    graph: BipartiteGraph
    orderings: dict[str, list[RankedCandidate]]
    config_echo: dict
    composition: Composition
    locked: tuple[str, ...] = ()
    excluded: tuple[str, ...] = ()

    def players(self) -> list[str]:
        return [p for p, _ in self.xi]

    def to_dict(self) -> dict:
        return {
            "xi": [{"player": p, "role": r} for p, r in self.xi],
            "composition": {
                "batsman": self.composition.batsman,
                "bowler": self.composition.bowler,
                "wicketkeeper": self.composition.wicketkeeper,
                "batting_allrounder": self.composition.batting_allrounder,
                "bowling_allrounder": self.composition.bowling_allrounder,
            },
            "locked": list(self.locked),
            "excluded": list(self.excluded),
            "edges": [{
                "candidate": e.candidate, "opponent": e.opponent,
                "weight": e.weight, "basis": e.basis, "via": e.via,
            } for e in sorted(self.graph.edges,
                              key=lambda e: (e.candidate, e.opponent))],
            "orderings": {
                role: [{
                    "player": c.player_id, "delta": c.delta,
                    "edge_count": c.edge_count, "mean_weight": c.mean_weight,
                    "career_phi": c.career_phi, "segment": c.segment,
                } for c in ranked]
                for role, ranked in sorted(self.orderings.items())
            },
            "config": self.config_echo,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


_SLOT_ORDER = (ROLE_WICKETKEEPER, ROLE_BATSMAN, ROLE_BOWLER,
               ROLE_BATTING_AR, ROLE_BOWLING_AR)
_OVERFLOW = {ROLE_BATSMAN: ROLE_BATTING_AR, ROLE_BOWLER: ROLE_BOWLING_AR}


def select_team(orderings: dict[str, list[RankedCandidate]],
                composition: Composition, roles: dict[str, str],
                locked: tuple[str, ...] = (), excluded: tuple[str, ...] = (),
                squad_size: int = 11) -> list[tuple[str, str]]:
    """Fill the composition from the per-role orderings.

    Wicketkeeper slots first, then batsmen (batting all-rounders once the
    batsman ordering runs dry), then bowlers (bowling all-rounders as
    overflow), then the all-rounder slots. Locked players consume their
    declared-role slots before anything else; excluded players are
    invisible. Each player fills at most one slot; an unfillable slot
    raises instead of returning a short or violating XI.
    """
    composition.validate(squad_size)
    locked = tuple(dict.fromkeys(locked))
    excluded_set = set(excluded)
    conflict = sorted(set(locked) & excluded_set)
    if conflict:
        raise ConstraintError("lock-exclude-conflict",
                              f"players both locked and excluded: {conflict}")
    remaining = {role: composition.count(role) for role in _SLOT_ORDER}
    chosen: dict[str, str] = {}

    for pid in locked:
        role = roles.get(pid)
        if role is None:
            raise UnknownPlayerError(f"locked player {pid!r} not in pool")
        slot = role
        if remaining[slot] <= 0 and role in (ROLE_BATTING_AR, ROLE_BOWLING_AR):
            fallback = ROLE_BATSMAN if role == ROLE_BATTING_AR else ROLE_BOWLER
            if remaining[fallback] > 0:
                slot = fallback
        if remaining[slot] <= 0:
            raise ConstraintError(
                "lock-infeasible",
                f"no remaining {slot} slot for locked player {pid!r}")
        remaining[slot] -= 1
        chosen[pid] = slot

    def take(slot_role: str, source_role: str) -> bool:
        for cand in orderings.get(source_role, []):
            pid = cand.player_id
            if pid in chosen or pid in excluded_set:
                continue
            chosen[pid] = slot_role
            return True
        return False

    for slot_role in _SLOT_ORDER:
        while remaining[slot_role] > 0:
            if take(slot_role, slot_role):
                remaining[slot_role] -= 1
                continue
            overflow = _OVERFLOW.get(slot_role)
            if overflow is not None and take(slot_role, overflow):
                remaining[slot_role] -= 1
                continue
            raise InfeasibleError(slot_role,
                                  f"pool cannot fill a {slot_role} slot")

    ordered = sorted(chosen.items(),
                     key=lambda kv: (_SLOT_ORDER.index(kv[1]), kv[0]))
    xi = [(pid, slot) for pid, slot in ordered]
    _assert_valid_xi(xi, squad_size)
    return xi


def _assert_valid_xi(xi: list[tuple[str, str]], squad_size: int) -> None:
    players = [p for p, _ in xi]
    assert len(players) == squad_size and len(set(players)) == squad_size
    by_role = {role: sum(1 for _, r in xi if r == role) for role in _SLOT_ORDER}
    assert by_role[ROLE_WICKETKEEPER] >= 1
    assert (by_role[ROLE_BOWLER] + by_role[ROLE_BATTING_AR]
            + by_role[ROLE_BOWLING_AR]) >= 5


def lineup_similarity(recommended: list[str], actual: list[str]) -> float:
    """Shared players over 11. Both lists must be 11 distinct ids."""
    for name, team in (("recommended", recommended), ("actual", actual)):
        if len(team) != 11:
            raise ValueError(f"{name} XI must list 11 players, got {len(team)}")
        if len(set(team)) != 11:
            raise ValueError(f"{name} XI contains duplicates")
    return len(set(recommended) & set(actual)) / 11.0


# -- fixtures ----------------------------------------------------------------


@dataclass(frozen=True)
class FixtureSide:
    team: str
    pool: tuple[str, ...]
    xi: tuple[str, ...]


@dataclass(frozen=True)
class Fixture:
    fixture_id: str
    date: dt.date
    sides: tuple[FixtureSide, FixtureSide]
    winner: str | None = None
    abandoned: bool = False


def parse_fixtures(text: str) -> list[Fixture]:
    """Fixtures file: JSON {"matches": [...]} as documented in the README.

    Each match carries a date, two sides with candidate pool and actual
    XI, and either a winner or an abandoned flag.
    """
    doc = json.loads(text)
    fixtures = []
    for i, m in enumerate(doc["matches"]):
        sides = []
        for s in m["sides"]:
            sides.append(FixtureSide(s["team"], tuple(s["pool"]), tuple(s["xi"])))
        if len(sides) != 2:
            raise ValueError(f"match {i}: exactly two sides required")
        abandoned = bool(m.get("abandoned", False))
        winner = m.get("winner")
        if not abandoned:
            if winner not in (sides[0].team, sides[1].team):
                raise ValueError(f"match {i}: winner must name one side")
        fixtures.append(Fixture(str(m.get("id", f"match{i + 1}")),
                                dt.date.fromisoformat(m["date"]),
                                (sides[0], sides[1]), winner, abandoned))
    return fixtures
