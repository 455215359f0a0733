"""Record console parity fixtures.

Runs the CLI against the seeded synthetic world for three scenarios and
captures, for each: the service request body, the service response (the
same engine the CLI uses), the XI printed by the CLI, and a follow-up
response after excluding one selected player. The frontend test suite
replays these files; regenerate with:

    python scripts/record_console_scenarios.py
"""

import contextlib
import io
import json
import warnings
from pathlib import Path

from pickxi.cli import run_cli
from pickxi.engine import Engine
from pickxi.recommend import Composition
from pickxi.synthetic import build_world, write_world

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"

COMPOSITION = {"batsman": 4, "bowler": 4, "wicketkeeper": 1,
               "batting_allrounder": 1, "bowling_allrounder": 1}


def cli_recommend(snapshot, pool_file, opp_file, locked=(), excluded=()):
    argv = ["recommend", "--snapshot", str(snapshot), "--pool", str(pool_file),
            "--opposition", str(opp_file), "--composition", "4,4,1,1,1"]
    for pid in locked:
        argv += ["--locked", pid]
    for pid in excluded:
        argv += ["--excluded", pid]
    buffer = io.StringIO()
    with contextlib.redirect_stdout(buffer):
        code = run_cli(argv)
    assert code == 0, f"cli failed: {code}"
    return json.loads(buffer.getvalue())


def main():
    warnings.simplefilter("ignore")
    world = build_world(seed=5, n_teams=4, rounds=6, tournament=False)
    workdir = FIXTURE_DIR / "_scratch"
    workdir.mkdir(parents=True, exist_ok=True)
    write_world(world, workdir)
    snapshot_path = workdir / "snapshot.bin"
    world.snapshot.save(snapshot_path)
    engine = Engine(world.snapshot)

    scenarios = [
        ("scenario_basic", world.teams[0], world.teams[1], (), ()),
        ("scenario_proxied", world.teams[2], world.teams[3], (), ()),
        ("scenario_steered", world.teams[1], world.teams[0],
         (world.teams[1].by_role("batsman")[5].player_id,), ()),
    ]
    for name, us, them, locked, excluded in scenarios:
        pool_file = workdir / f"{name}_pool.txt"
        pool_file.write_text("\n".join(us.ids()) + "\n")
        opp_file = workdir / f"{name}_opp.txt"
        opp_file.write_text("\n".join(them.ids()) + "\n")
        cli_payload = cli_recommend(snapshot_path, pool_file, opp_file,
                                    locked, excluded)
        request = {
            "pool": us.ids(), "opposition": them.ids(),
            "composition": dict(COMPOSITION),
            "locked": list(locked), "excluded": list(excluded),
            "overrides": {}, "squad_size": 11,
        }
        response = engine.recommend(us.ids(), them.ids(),
                                    Composition(**COMPOSITION),
                                    locked=tuple(locked),
                                    excluded=tuple(excluded)).to_dict()
        assert response == cli_payload, "service body must equal CLI output"
        victim = next(row["player"] for row in response["xi"]
                      if row["player"] not in locked)
        followup = engine.recommend(
            us.ids(), them.ids(), Composition(**COMPOSITION),
            locked=tuple(locked),
            excluded=tuple(excluded) + (victim,)).to_dict()
        fixture = {
            "name": name,
            "request": request,
            "response": response,
            "cli_xi": [row["player"] for row in cli_payload["xi"]],
            "followup_exclude": {"player": victim, "response": followup},
        }
        out = FIXTURE_DIR / f"{name}.json"
        out.write_text(json.dumps(fixture, indent=1, sort_keys=True) + "\n")
        print(f"wrote {out} ({len(response['xi'])} players, "
              f"{len(response['edges'])} edges)")

    for path in sorted(workdir.rglob("*")):
        if path.is_file():
            path.unlink()
    for path in sorted(workdir.rglob("*"), reverse=True):
        path.rmdir()
    workdir.rmdir()


if __name__ == "__main__":
    main()
