"""Shared fixtures: hand-built micro corpora and seeded synthetic worlds."""

from __future__ import annotations

import datetime as dt
import warnings

import pytest

ACCEPTANCE_RESULTS: list[tuple[str, str, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in ACCEPTANCE_RESULTS:
        line = f"[{status}] {name}"
        if detail:
            line += f" — {detail}"
        terminalreporter.write_line(line)

from pickxi.cricsheet import EXTRAS_NONE, Delivery, MatchRecord
from pickxi.engine import Engine
from pickxi.roster import parse_roster
from pickxi.snapshot import Snapshot
from pickxi.synthetic import build_world


def make_record(match_id: str, date: dt.date, rows,
                teams=("Alpha", "Beta")) -> MatchRecord:
    """rows: (innings, over, ball, bat, bowl, runs, extras, kind, out_id)."""
    deliveries = []
    for row in rows:
        innings, over, ball, bat, bowl, runs, extras, kind, out_id = row
        deliveries.append(Delivery(
            match_id=match_id, innings=innings, over=over, ball_in_over=ball,
            batsman_id=bat, non_striker_id=bat + "_mate", bowler_id=bowl,
            runs_off_bat=runs, extras=extras, extras_kind=kind,
            wicket=out_id is not None, dismissed_id=out_id))
    return MatchRecord(match_id=match_id, date=date, venue="Test Ground",
                       teams=teams, toss="", result="", deliveries=deliveries)


def simple_balls(match_id, date, bat, bowl, balls, runs_total, outs,
                 innings=1, extras=0):
    """One batsman-vs-bowler spell: ``balls`` deliveries, the last ``outs``
    of them wickets, runs spread over the leading deliveries."""
    rows = []
    scoring = balls - outs
    base, rem = divmod(runs_total, scoring) if scoring else (0, 0)
    if base > 6:
        raise ValueError("runs per ball would exceed 6")
    for k in range(balls):
        over, ball = divmod(k, 6)
        if k < scoring:
            runs = base + (1 if k < rem else 0)
            rows.append((innings, over, ball + 1, bat, bowl, runs, 0,
                         EXTRAS_NONE, None))
        else:
            rows.append((innings, over, ball + 1, bat, bowl, 0, 0,
                         EXTRAS_NONE, bat))
    if extras:
        over, ball = divmod(balls, 6)
        rows.append((innings, over, ball + 1, bat, bowl, 0, extras, 3, None))
    return make_record(match_id, date, rows)


def roster_for(ids_roles: dict[str, str], country="Testland") -> str:
    lines = [f"{pid},{pid.replace('_', ' ').title()},{country},{role},"
             for pid, role in sorted(ids_roles.items())]
    return "\n".join(lines) + "\n"


def snapshot_from(records, roster_text) -> Snapshot:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return Snapshot.from_records(records, parse_roster(roster_text))


def uniform_corpus(n_batsmen=4, n_bowlers=4, balls=30, runs=24, outs=1):
    """Corpus where every career average is identical (extras-free).

    Every batsman faces every bowler with the same delivery pattern, so
    C_batsman = C_bowler = runs/outs for everyone and every quality
    weight collapses to 1.
    """
    batsmen = [f"bat{i}" for i in range(1, n_batsmen + 1)]
    bowlers = [f"bowl{j}" for j in range(1, n_bowlers + 1)]
    records = []
    day = dt.date(2015, 3, 1)
    for i, bat in enumerate(batsmen):
        for j, bowl in enumerate(bowlers):
            match_id = f"u{i}{j}"
            records.append(simple_balls(match_id, day, bat, bowl,
                                        balls, runs, outs))
            day += dt.timedelta(days=1)
    roles = {pid: "batsman" for pid in batsmen}
    roles.update({pid: "bowler" for pid in bowlers})
    roles.update({f"{pid}_mate": "batsman" for pid in batsmen})
    return snapshot_from(records, roster_for(roles))


@pytest.fixture(scope="session")
def small_world():
    return build_world(seed=5, n_teams=4, rounds=6, tournament=False)


@pytest.fixture(scope="session")
def small_engine(small_world):
    return Engine(small_world.snapshot)


@pytest.fixture(scope="session")
def tournament_world():
    return build_world(seed=7, n_teams=10, rounds=4, tournament=True)


@pytest.fixture(scope="session")
def world_on_disk(small_world, tmp_path_factory):
    """Materialized roster + match files + saved snapshot for CLI tests."""
    from pickxi.synthetic import write_world

    root = tmp_path_factory.mktemp("world")
    paths = write_world(small_world, root)
    snapshot_path = root / "snapshot.bin"
    small_world.snapshot.save(snapshot_path)
    paths["snapshot"] = str(snapshot_path)
    pool = root / "pool.txt"
    pool.write_text("\n".join(small_world.teams[0].ids()) + "\n")
    opposition = root / "opposition.txt"
    opposition.write_text("\n".join(small_world.teams[1].ids()) + "\n")
    paths["pool"] = str(pool)
    paths["opposition"] = str(opposition)
    return paths
