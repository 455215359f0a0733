"""Deterministic synthetic cricket world for demos and verification.

Generates a multi-team delivery history in real Cricsheet layouts (so
the full ingest path gets exercised), plus an optional 48-fixture
tournament whose actual XIs are engineered from the engine's own
recommendations with a known number of role-preserving swaps: winners
deviate from the recommended XI by ``winner_swaps`` players and losers
by ``loser_swaps``. Because recommendations are pure functions of the
pre-fixture corpus view, re-evaluating the tournament must reproduce
exactly (11 - swaps) / 11 lineup similarity per side; any leakage of
on-or-after-fixture deliveries breaks the equality.

Ball outcomes follow the same Bernoulli-style shape as the rating model:
per-ball dismissal and scoring odds scale with a latent batsman quality,
a latent bowler quality, and a batsman-archetype-vs-bowling-style
multiplier that plants transferable weakness patterns across teams.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_CONFIG, EngineConfig
from .cricsheet import (EXTRAS_BYE, EXTRAS_LEGBYE, EXTRAS_NOBALL, EXTRAS_NONE,
                        EXTRAS_WIDE, Delivery, MatchRecord)
from .engine import Engine, composition_of_xi
from .recommend import Composition, Fixture, FixtureSide
from .roster import (ROLE_BATSMAN, ROLE_BATTING_AR, ROLE_BOWLER,
                     ROLE_BOWLING_AR, ROLE_WICKETKEEPER, ROLES, parse_roster)
from .snapshot import MatchMeta, PlayerRegistry, Snapshot, build_registry, record_columns

TEAM_NAMES = ("Aldora", "Brivia", "Corvan", "Dremora", "Elvane",
              "Fenwick", "Galdor", "Harwen", "Istria", "Jorvik")

# Squad shape: 7 batsmen, 2 keepers, 6 bowlers, 1 batting all-rounder,
# 1 bowling all-rounder. Standard XI composition 4/4/1/1/1 leaves spare
# batsmen, bowlers, and a keeper for XI swaps.
_SQUAD_SHAPE = ((ROLE_BATSMAN, "bat", 7), (ROLE_WICKETKEEPER, "wk", 2),
                (ROLE_BOWLER, "bowl", 6), (ROLE_BATTING_AR, "bar", 1),
                (ROLE_BOWLING_AR, "boar", 1))
STANDARD_COMPOSITION = Composition(batsman=4, bowler=4, wicketkeeper=1,
                                   batting_allrounder=1, bowling_allrounder=1)

_BAT_QUALITY_BASE = {ROLE_BATSMAN: 1.0, ROLE_WICKETKEEPER: 0.92,
                     ROLE_BATTING_AR: 0.88, ROLE_BOWLING_AR: 0.72,
                     ROLE_BOWLER: 0.5}
_BOWL_QUALITY_BASE = {ROLE_BOWLER: 1.0, ROLE_BOWLING_AR: 0.9,
                      ROLE_BATTING_AR: 0.75}
# Archetype rows: scoring multiplier against bowling styles 0/1/2.
_ARCHETYPES = np.array([[1.25, 0.75, 1.0],
                        [0.75, 1.25, 1.0],
                        [1.0, 1.0, 1.0]])

_EXTRAS_JSON_KEY = {EXTRAS_WIDE: "wides", EXTRAS_NOBALL: "noballs",
                    EXTRAS_BYE: "byes", EXTRAS_LEGBYE: "legbyes"}


@dataclass(frozen=True)
class PlayerSpec:
    player_id: str
    name: str
    team: str
    role: str
    bat_quality: float
    bowl_quality: float
    bowl_style: int
    style_mult: tuple[float, float, float]


@dataclass
class TeamSpec:
    name: str
    players: list[PlayerSpec]

    def by_role(self, role: str) -> list[PlayerSpec]:
        return [p for p in self.players if p.role == role]

    def ids(self) -> list[str]:
        return sorted(p.player_id for p in self.players)


@dataclass
class SynthWorld:
    seed: int
    teams: list[TeamSpec]
    roster_text: str
    files: dict[str, str]
    records: list[MatchRecord]
    snapshot: Snapshot
    fixtures: list[Fixture] = field(default_factory=list)
    fixtures_text: str | None = None
    expected: dict = field(default_factory=dict)

    def player(self, player_id: str) -> PlayerSpec:
        for team in self.teams:
            for p in team.players:
                if p.player_id == player_id:
                    return p
        raise KeyError(player_id)

    def squad_of(self, team_name: str) -> TeamSpec:
        for team in self.teams:
            if team.name == team_name:
                return team
        raise KeyError(team_name)


def _make_teams(rng: np.random.Generator, n_teams: int) -> list[TeamSpec]:
    teams = []
    for t in range(n_teams):
        team_name = TEAM_NAMES[t]
        players = []
        archetype_cycle = 0
        style_cycle = 0
        for role, tag, count in _SQUAD_SHAPE:
            for i in range(1, count + 1):
                name = f"{team_name} {tag.capitalize()}{i}"
                pid = f"{team_name.lower()}_{tag}{i}"
                bat_q = _BAT_QUALITY_BASE[role] * float(np.exp(rng.normal(0, 0.18)))
                bowl_q = _BOWL_QUALITY_BASE.get(role, 0.4) * float(np.exp(rng.normal(0, 0.18)))
                arch = _ARCHETYPES[archetype_cycle % 3]
                archetype_cycle += 1
                mult = arch * np.exp(rng.normal(0, 0.1, size=3))
                style = style_cycle % 3
                if role in _BOWL_QUALITY_BASE:
                    style_cycle += 1
                players.append(PlayerSpec(pid, name, team_name, role,
                                          bat_q, bowl_q, style,
                                          tuple(float(m) for m in mult)))
        teams.append(TeamSpec(team_name, players))
    return teams


def roster_lines(teams: list[TeamSpec]) -> str:
    lines = ["# id,name,country,role,aliases"]
    for team in teams:
        for p in sorted(team.players, key=lambda p: p.player_id):
            lines.append(f"{p.player_id},{p.name},{p.team},{p.role},")
    return "\n".join(lines) + "\n"


# -- ball-by-ball simulation ---------------------------------------------------


def _run_pmf(strength: float) -> tuple[np.ndarray, np.ndarray]:
    s = min(max(strength, 0.25), 3.0)
    p4, p6 = 0.08 * s, 0.02 * s
    probs = np.array([0.28, 0.07, 0.01, p4, p6])
    p0 = max(1.0 - probs.sum(), 0.02)
    return np.array([0, 1, 2, 3, 4, 6]), np.concatenate([[p0], probs]) / (p0 + probs.sum())


def _batting_order(xi: list[PlayerSpec]) -> list[PlayerSpec]:
    buckets = {role: [] for role in ROLES}
    for p in xi:
        buckets[p.role].append(p)
    order = (buckets[ROLE_BATSMAN][:3] + buckets[ROLE_WICKETKEEPER]
             + buckets[ROLE_BATSMAN][3:] + buckets[ROLE_BATTING_AR]
             + buckets[ROLE_BOWLING_AR] + buckets[ROLE_BOWLER])
    return order


def _bowling_rotation(xi: list[PlayerSpec]) -> list[PlayerSpec]:
    capable = [p for p in xi if p.role in _BOWL_QUALITY_BASE]
    if len(capable) < 2:  # degenerate XI; let top batsmen roll the arm over
        capable = (capable + [p for p in xi if p.role not in _BOWL_QUALITY_BASE])[:2]
    return capable


def _play_innings(rng: np.random.Generator, match_id: str, innings_no: int,
                  batting: list[PlayerSpec], bowling: list[PlayerSpec]) -> list[Delivery]:
    order = _batting_order(batting)
    rotation = _bowling_rotation(bowling)
    deliveries: list[Delivery] = []
    striker, non_striker = order[0], order[1]
    next_in = 2
    wickets = 0
    for over in range(50):
        bowler = rotation[over % len(rotation)]
        legal = 0
        ball_no = 0
        while legal < 6:
            ball_no += 1
            runs_bat = 0
            extras = 0
            kind = EXTRAS_NONE
            out = False
            u = rng.random()
            if u < 0.025:
                kind, extras = EXTRAS_WIDE, 1
            else:
                if u < 0.031:
                    kind, extras = EXTRAS_NOBALL, 1
                elif u < 0.039:
                    kind, extras = EXTRAS_BYE, int(rng.integers(1, 3))
                elif u < 0.045:
                    kind, extras = EXTRAS_LEGBYE, 1
                if kind in (EXTRAS_NONE, EXTRAS_NOBALL):
                    beff = striker.bat_quality * striker.style_mult[bowler.bowl_style]
                    q = min(max(0.032 * bowler.bowl_quality / beff, 0.005), 0.2)
                    if kind == EXTRAS_NONE and rng.random() < q:
                        out = True
                    else:
                        values, probs = _run_pmf(beff / bowler.bowl_quality)
                        runs_bat = int(rng.choice(values, p=probs))
                if kind != EXTRAS_NOBALL:
                    legal += 1
            deliveries.append(Delivery(
                match_id=match_id, innings=innings_no, over=over,
                ball_in_over=ball_no, batsman_id=striker.player_id,
                non_striker_id=non_striker.player_id,
                bowler_id=bowler.player_id, runs_off_bat=runs_bat,
                extras=extras, extras_kind=kind, wicket=out,
                dismissed_id=striker.player_id if out else None))
            if out:
                wickets += 1
                if wickets == 10:
                    return deliveries
                striker = order[next_in]
                next_in += 1
            elif (runs_bat + (extras if kind in (EXTRAS_BYE, EXTRAS_LEGBYE) else 0)) % 2 == 1:
                striker, non_striker = non_striker, striker
        striker, non_striker = non_striker, striker
    return deliveries


def play_match(rng: np.random.Generator, match_id: str, date: dt.date,
               team_a: TeamSpec, xi_a: list[PlayerSpec],
               team_b: TeamSpec, xi_b: list[PlayerSpec],
               winner: str | None = None) -> MatchRecord:
    """Simulate a full two-innings match between the given XIs."""
    deliveries = _play_innings(rng, match_id, 1, xi_a, xi_b)
    deliveries += _play_innings(rng, match_id, 2, xi_b, xi_a)
    if winner is None:
        winner = team_a.name if rng.random() < 0.5 else team_b.name
    return MatchRecord(
        match_id=match_id, date=date, venue=f"{team_a.name} Oval",
        teams=(team_a.name, team_b.name),
        toss=f"{team_a.name} elected to bat",
        result=f"{winner} won",
        deliveries=deliveries,
        innings_teams=(team_a.name, team_b.name))


def render_cricsheet_json(record: MatchRecord, names: dict[str, str],
                          winner: str) -> str:
    """Serialize a MatchRecord in the Cricsheet JSON layout."""
    innings_out = []
    for innings_no in (1, 2):
        rows = [d for d in record.deliveries if d.innings == innings_no]
        if not rows:
            continue
        overs: dict[int, list] = {}
        for d in rows:
            entry = {
                "batter": names[d.batsman_id],
                "bowler": names[d.bowler_id],
                "non_striker": names[d.non_striker_id],
                "runs": {"batter": d.runs_off_bat, "extras": d.extras,
                         "total": d.runs_off_bat + d.extras},
            }
            if d.extras_kind != EXTRAS_NONE:
                entry["extras"] = {_EXTRAS_JSON_KEY[d.extras_kind]: d.extras}
            if d.wicket:
                entry["wickets"] = [{"player_out": names[d.dismissed_id],
                                     "kind": "bowled"}]
            overs.setdefault(d.over, []).append(entry)
        batting_team = record.teams[0] if innings_no == 1 else record.teams[1]
        innings_out.append({
            "team": batting_team,
            "overs": [{"over": o, "deliveries": overs[o]} for o in sorted(overs)],
        })
    doc = {
        "meta": {"data_version": "1.0.0", "revision": 1},
        "info": {
            "match_type": "ODI",
            "dates": [record.date.isoformat()],
            "teams": list(record.teams),
            "venue": record.venue,
            "toss": {"winner": record.teams[0], "decision": "bat"},
            "outcome": {"winner": winner},
        },
        "innings": innings_out,
    }
    return json.dumps(doc, indent=1, sort_keys=True)


# -- world assembly -------------------------------------------------------------


def _rotated_xi(rng: np.random.Generator, team: TeamSpec) -> list[PlayerSpec]:
    """History XI: 4 batsmen, 1 keeper, 4 bowlers, both all-rounders."""
    xi = []
    for role, take in ((ROLE_BATSMAN, 4), (ROLE_WICKETKEEPER, 1),
                       (ROLE_BOWLER, 4), (ROLE_BATTING_AR, 1),
                       (ROLE_BOWLING_AR, 1)):
        group = team.by_role(role)
        picks = rng.choice(len(group), size=take, replace=False)
        xi.extend(group[i] for i in sorted(picks))
    return xi


def _swap_xi(rng: np.random.Generator, xi: list[tuple[str, str]],
             team: TeamSpec, swaps: int) -> list[str]:
    """Replace exactly ``swaps`` distinct XI members with same-role squad
    spares, so the lineup distance to the input XI is exactly ``swaps``."""
    players = [pid for pid, _ in xi]
    spares = {role: sorted(p.player_id for p in team.by_role(role)
                           if p.player_id not in players)
              for role in {r for _, r in xi}}
    chosen: list[int] = []
    for _ in range(swaps):
        capacity = {role: len(ids) for role, ids in spares.items()}
        for i in chosen:
            capacity[xi[i][1]] -= 1
        open_slots = [i for i in range(len(xi))
                      if i not in chosen and capacity[xi[i][1]] > 0]
        if not open_slots:
            raise ValueError(f"squad cannot absorb {swaps} swaps")
        chosen.append(open_slots[int(rng.integers(len(open_slots)))])
    for i in sorted(chosen):
        role = xi[i][1]
        into = spares[role].pop(int(rng.integers(len(spares[role]))))
        players[i] = into
    return players


def build_world(seed: int = 7, n_teams: int = 10, rounds: int = 4,
                tournament: bool = True, winner_swaps: int = 2,
                loser_swaps: int = 3, abandoned: int = 3,
                config: EngineConfig = DEFAULT_CONFIG) -> SynthWorld:
    """Assemble the synthetic world; see the module docstring.

    The last two teams never meet before their tournament fixture, so
    that fixture's recommendations must lean entirely on proxied edges.
    """
    if tournament and n_teams < 4:
        raise ValueError("tournament needs at least 4 teams")
    master = np.random.SeedSequence(seed)
    rng_team, rng_hist, rng_tour = (np.random.default_rng(s)
                                    for s in master.spawn(3))
    teams = _make_teams(rng_team, n_teams)
    roster_text = roster_lines(teams)
    roster = parse_roster(roster_text)
    names = {p.player_id: p.name for t in teams for p in t.players}

    separated = {teams[-2].name, teams[-1].name} if n_teams >= 2 else set()
    pairs = [(a, b) for i, a in enumerate(teams) for b in teams[i + 1:]
             if {a.name, b.name} != separated]

    records: list[MatchRecord] = []
    date = dt.date(2015, 1, 5)
    for round_no in range(rounds):
        order = list(pairs)
        perm = rng_hist.permutation(len(order))
        for k in perm:
            team_a, team_b = order[int(k)]
            match_id = f"h{date.isoformat().replace('-', '')}_{team_a.name.lower()}_{team_b.name.lower()}"
            xi_a = _rotated_xi(rng_hist, team_a)
            xi_b = _rotated_xi(rng_hist, team_b)
            records.append(play_match(rng_hist, match_id, date, team_a, xi_a,
                                      team_b, xi_b))
            date += dt.timedelta(days=3)

    registry = build_registry(records, roster)
    ordinal = {pid: i for i, pid in enumerate(sorted(registry.players))}

    # Match ids sort chronologically and every tournament id sorts after
    # every history id, so the canonical match order is append-only and
    # per-match column blocks can be built exactly once.
    metas: list[MatchMeta] = []
    blocks: list[dict] = []

    def append_match(record: MatchRecord) -> None:
        assert not metas or record.match_id > metas[-1].match_id
        metas.append(MatchMeta(record.match_id, record.date, record.venue,
                               record.teams, record.toss, record.result,
                               record.innings_teams))
        blocks.append(record_columns(record, len(blocks), ordinal))

    for record in sorted(records, key=lambda r: r.match_id):
        append_match(record)

    def current_snapshot() -> Snapshot:
        return Snapshot.from_blocks(registry, list(metas), list(blocks))

    fixtures: list[Fixture] = []
    expected: dict = {}
    if tournament:
        tour_pairs = [(a, b) for i, a in enumerate(teams) for b in teams[i + 1:]]
        perm = rng_tour.permutation(len(tour_pairs))
        schedule = [tour_pairs[int(k)] for k in perm]
        schedule += [(teams[0], teams[3]), (teams[1], teams[2]),
                     (teams[0], teams[1])]
        n_rr = len(tour_pairs)
        eligible = [i for i in range(n_rr)
                    if {schedule[i][0].name, schedule[i][1].name} != separated]
        n_abandoned = min(abandoned, len(eligible))
        abandoned_slots = {eligible[(k + 1) * len(eligible) // (n_abandoned + 1)]
                           for k in range(n_abandoned)}
        date = dt.date(2019, 5, 30)
        expected["scored_sides"] = []
        for idx, (team_a, team_b) in enumerate(schedule):
            fixture_id = f"t{idx + 1:02d}_{team_a.name.lower()}_{team_b.name.lower()}"
            pool_a, pool_b = team_a.ids(), team_b.ids()
            if idx in abandoned_slots:
                fixtures.append(Fixture(fixture_id, date,
                                        (FixtureSide(team_a.name, tuple(pool_a), ()),
                                         FixtureSide(team_b.name, tuple(pool_b), ())),
                                        winner=None, abandoned=True))
                date += dt.timedelta(days=1)
                continue
            engine = Engine(current_snapshot(), config)
            winner = team_a.name if rng_tour.random() < 0.5 else team_b.name
            sides = []
            all_proxied = True
            for team, own_pool, other_pool in ((team_a, pool_a, pool_b),
                                               (team_b, pool_b, pool_a)):
                rec = engine.recommend(own_pool, other_pool, STANDARD_COMPOSITION)
                all_proxied &= bool(rec.graph.edges) and all(
                    e.basis == "proxied" for e in rec.graph.edges)
                swaps = winner_swaps if team.name == winner else loser_swaps
                xi = _swap_xi(rng_tour, rec.xi, team, swaps)
                assert composition_of_xi(engine.snapshot, tuple(xi)) == STANDARD_COMPOSITION
                sides.append((team, xi))
                expected["scored_sides"].append({
                    "fixture": fixture_id, "team": team.name,
                    "won": team.name == winner, "swaps": swaps,
                })
            if {team_a.name, team_b.name} == separated:
                expected["proxied_fixture"] = fixture_id
                expected["proxied_all_edges"] = all_proxied
            xi_specs = []
            for team, xi in sides:
                by_id = {p.player_id: p for p in team.players}
                xi_specs.append([by_id[pid] for pid in xi])
            match_id = f"t{date.isoformat().replace('-', '')}_{team_a.name.lower()}_{team_b.name.lower()}"
            played = play_match(rng_tour, match_id, date, team_a,
                                xi_specs[0], team_b, xi_specs[1], winner=winner)
            records.append(played)
            append_match(played)
            fixtures.append(Fixture(
                fixture_id, date,
                (FixtureSide(team_a.name, tuple(pool_a), tuple(sides[0][1])),
                 FixtureSide(team_b.name, tuple(pool_b), tuple(sides[1][1]))),
                winner=winner, abandoned=False))
            date += dt.timedelta(days=1)
        n_scored = len(schedule) - len(abandoned_slots)
        expected.update({
            "fixtures": len(schedule),
            "abandoned": len(abandoned_slots),
            "scored": n_scored,
            "winning_mean": (11 - winner_swaps) / 11,
            "losing_mean": (11 - loser_swaps) / 11,
        })

    files = {}
    for record in records:
        winner = record.result.removesuffix(" won")
        files[record.match_id + ".json"] = render_cricsheet_json(
            record, names, winner)

    fixtures_text = None
    if tournament:
        fixtures_text = json.dumps({
            "matches": [{
                "id": f.fixture_id,
                "date": f.date.isoformat(),
                "abandoned": f.abandoned,
                "winner": f.winner,
                "sides": [{"team": s.team, "pool": list(s.pool),
                           "xi": list(s.xi)} for s in f.sides],
            } for f in fixtures],
        }, indent=1, sort_keys=True)

    return SynthWorld(seed=seed, teams=teams, roster_text=roster_text,
                      files=files, records=records,
                      snapshot=current_snapshot(), fixtures=fixtures,
                      fixtures_text=fixtures_text, expected=expected)


def write_world(world: SynthWorld, directory) -> dict[str, str]:
    """Materialize roster, match files, and fixtures under ``directory``.

    Returns {"roster": path, "matches": dir, "fixtures": path or None}.
    """
    from pathlib import Path

    root = Path(directory)
    matches = root / "matches"
    matches.mkdir(parents=True, exist_ok=True)
    roster_path = root / "roster.csv"
    roster_path.write_text(world.roster_text, encoding="utf-8")
    for name, content in world.files.items():
        (matches / name).write_text(content, encoding="utf-8")
    fixtures_path = None
    if world.fixtures_text is not None:
        fixtures_path = root / "fixtures.json"
        fixtures_path.write_text(world.fixtures_text, encoding="utf-8")
    return {"roster": str(roster_path), "matches": str(matches),
            "fixtures": str(fixtures_path) if fixtures_path else None}
