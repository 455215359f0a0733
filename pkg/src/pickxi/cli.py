"""Single command-line entry point over ingest, rating, embeddings,
recommendation, evaluation, and the HTTP service.

Exit codes: 0 success, 2 usage, 3 constraint violation, 4 unknown
player / unrateable, 5 infeasible pool, 6 data or format error,
7 internal. Failures print one machine-readable JSON object to stderr:
{"error": <class>, "message": ..., "rule"?: ..., "slot"?: ...}.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .config import DEFAULT_CONFIG, EngineConfig
from .engine import Engine, evaluate_tournament
from .errors import (ConstraintError, InfeasibleError, PickxiError,
                     SnapshotFormatError)
from .rating import InningsModel, estimate_moments
from .recommend import Composition, parse_fixtures
from .snapshot import Snapshot, ingest


def _read_player_file(path) -> list[str]:
    """Pool/opposition file: one player id per line, '#' comments."""
    ids = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                ids.append(line)
    return ids


def _load_config(args) -> EngineConfig:
    config = DEFAULT_CONFIG
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            config = config.override(**json.load(fh))
    for item in getattr(args, "set", None) or []:
        key, _, value = item.partition("=")
        if not _:
            raise ConstraintError("config-override", f"expected key=value, got {item!r}")
        current = getattr(config, key, None)
        if current is None:
            raise ConstraintError("config-override", f"unknown config key {key!r}")
        kind = type(current)
        config = config.override(**{key: kind(json.loads(value)) if kind is bool
                                    else kind(value)})
    return config


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)



def _load_snapshot(args) -> Snapshot:
    if not args.snapshot:
        raise SnapshotFormatError(
            "no snapshot given: pass --snapshot or set PICKXI_SNAPSHOT")
    return Snapshot.load(args.snapshot)

def _rating_rows(engine: Engine, player_id: str, by_year: bool):
    rows = []
    for side in ("batting", "bowling"):
        if by_year:
            try:
                series, _, _ = engine.rating_timeseries(player_id, side)
            except PickxiError:
                continue
            rows.extend(series)
        else:
            record = engine.rating_record(player_id, side)
            if record.phi_player is not None or record.baseline_rating is not None:
                rows.append(record)
    return rows


def _cmd_ingest(args) -> int:
    snapshot = ingest(args.input, args.roster, skip_invalid=args.skip_invalid)
    snapshot.save(args.out)
    print(json.dumps({
        "snapshot": args.out,
        "matches": snapshot.metadata.get("matches", 0),
        "deliveries": snapshot.metadata.get("deliveries", 0),
        "batsmen": snapshot.registry.n_batsmen,
        "bowlers": snapshot.registry.n_bowlers,
        "extras_kind_detail": snapshot.metadata.get("extras_kind_detail"),
    }, sort_keys=True))
    return 0


def _cmd_rate(args) -> int:
    engine = Engine(_load_snapshot(args), _load_config(args))
    if args.player:
        players = [args.player]
    else:
        players = sorted(engine.snapshot.registry.players)
    lines = ["player,role,period,phi_player,baseline,balls,outs"]
    for pid in players:
        for record in _rating_rows(engine, pid, args.by_year):
            phi = "" if record.phi_player is None else f"{record.phi_player:.6f}"
            base = "" if record.baseline_rating is None else f"{record.baseline_rating:.6f}"
            period = "" if record.period is None else str(record.period)
            lines.append(f"{record.player_id},{record.role},{period},"
                         f"{phi},{base},{record.balls},{record.outs}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_simulate(args) -> int:
    model = InningsModel(args.r, args.avg)
    result = estimate_moments(model, args.trials, args.seed)
    print(json.dumps({
        "r": args.r, "avg": args.avg, "trials": result.trials,
        "seed": args.seed, "mean": result.mean, "std": result.std,
        "stderr": result.stderr,
    }, sort_keys=True))
    return 0


_L2_NAMES = {0: "weak", 1: "not-weak", -1: "unknown"}


def _cmd_embed(args) -> int:
    engine = Engine(_load_snapshot(args), _load_config(args))
    registry = engine.snapshot.registry
    side = args.side
    players = [args.player] if args.player else engine.embeddable(side)
    opposite = (registry.bowlers_by_index() if side == "batting"
                else registry.batsmen_by_index())
    lines = ["player,side,index,opponent,value"]
    for pid in players:
        if args.level == 1:
            values = engine.level1(pid, side).values
            for i, value in enumerate(values):
                lines.append(f"{pid},{side},{i + 1},{opposite[i]},{value!r}")
        else:
            values = engine.level2(pid, side).values
            for i, value in enumerate(values):
                lines.append(f"{pid},{side},{i + 1},{opposite[i]},{_L2_NAMES[int(value)]}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_cluster(args) -> int:
    engine = Engine(_load_snapshot(args), _load_config(args))
    assignment = engine.cluster_players(args.side, n_clusters=args.k,
                                        cutoff=args.cutoff)
    lines = ["player,cluster"]
    lines.extend(f"{pid},{label}" for pid, label in sorted(assignment.items()))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_replace(args) -> int:
    engine = Engine(_load_snapshot(args), _load_config(args))
    pool = _read_player_file(args.pool)
    ranked = engine.replacements(args.player, pool)
    lines = ["candidate,similarity,basis"]
    lines.extend(f"{c.player_id},{c.similarity:.6f},{c.basis}" for c in ranked)
    if len(lines) == 1:
        print("no candidate has a defined similarity", file=sys.stderr)
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_recommend(args) -> int:
    engine = Engine(_load_snapshot(args), _load_config(args))
    pool = _read_player_file(args.pool)
    opposition = _read_player_file(args.opposition)
    composition = Composition.parse(args.composition)
    rec = engine.recommend(pool, opposition, composition,
                           locked=tuple(args.locked or ()),
                           excluded=tuple(args.excluded or ()),
                           squad_size=args.squad_size)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(rec.graph.to_dot())
    _emit(rec.to_json(), args.out)
    return 0


def _cmd_evaluate(args) -> int:
    snapshot = _load_snapshot(args)
    with open(args.fixtures, "r", encoding="utf-8") as fh:
        fixtures = parse_fixtures(fh.read())
    report = evaluate_tournament(snapshot, fixtures, _load_config(args))
    lines = ["fixture,date,team,result,similarity"]
    for s in report.scored:
        lines.append(f"{s.fixture_id},{s.date.isoformat()},{s.team},"
                     f"{'won' if s.won else 'lost'},{s.similarity:.6f}")
    table = "\n".join(lines) + "\n"
    _emit(table, args.out)
    print(json.dumps({
        "scored": len(report.scored) // 2,
        "abandoned": len(report.skipped),
        "winning_mean": report.winning_mean,
        "losing_mean": report.losing_mean,
    }, sort_keys=True))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    static = args.static
    if static is None and os.path.isdir("frontend/dist"):
        static = "frontend/dist"
    app = create_app(_load_snapshot(args), _load_config(args),
                     static_dir=static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pickxi",
        description="rate players, build matchup embeddings, pick an XI")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, snapshot=True):
        if snapshot:
            p.add_argument("--snapshot",
                           default=os.environ.get("PICKXI_SNAPSHOT"),
                           help="snapshot file (default: $PICKXI_SNAPSHOT)")
        p.add_argument("--config", help="JSON file of config overrides")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override one config value (repeatable)")
        p.add_argument("--out", help="write output here instead of stdout")

    p = sub.add_parser("ingest", help="parse match files into a snapshot")
    p.add_argument("--input", required=True, help="directory or zip of match files")
    p.add_argument("--roster", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--skip-invalid", action="store_true")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("rate", help="career or per-year ratings as CSV")
    common(p)
    p.add_argument("--player")
    p.add_argument("--by-year", action="store_true")
    p.set_defaults(func=_cmd_rate)

    p = sub.add_parser("simulate", help="Monte-Carlo innings moments")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--avg", type=float, required=True)
    p.add_argument("--trials", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("embed", help="export level-1/2 embeddings")
    common(p)
    p.add_argument("--level", type=int, choices=(1, 2), required=True)
    p.add_argument("--side", choices=("batting", "bowling"), default="batting")
    p.add_argument("--player")
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("cluster", help="agglomerative clustering of embeddings")
    common(p)
    p.add_argument("--side", choices=("batting", "bowling"), default="batting")
    p.add_argument("--cutoff", type=float)
    p.add_argument("--k", type=int)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("replace", help="like-for-like replacement ranking")
    common(p)
    p.add_argument("--player", required=True)
    p.add_argument("--pool", required=True)
    p.set_defaults(func=_cmd_replace)

    p = sub.add_parser("recommend", help="pick an XI against an opposition")
    common(p)
    p.add_argument("--pool", required=True)
    p.add_argument("--opposition", required=True)
    p.add_argument("--composition", required=True,
                   help="batsman,bowler,wicketkeeper,batting-ar,bowling-ar")
    p.add_argument("--locked", action="append")
    p.add_argument("--excluded", action="append")
    p.add_argument("--squad-size", type=int, default=11)
    p.add_argument("--dot", help="also export the matchup graph as DOT")
    p.set_defaults(func=_cmd_recommend)

    p = sub.add_parser("evaluate", help="score recommendations against fixtures")
    common(p)
    p.add_argument("--fixtures", required=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--snapshot", default=os.environ.get("PICKXI_SNAPSHOT"),
                   help="snapshot file (default: $PICKXI_SNAPSHOT)")
    p.add_argument("--config", help="JSON file of config overrides")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static",
                   help="directory of console assets (default: frontend/dist "
                        "when present)")
    p.set_defaults(func=_cmd_serve)

    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PickxiError as exc:
        payload = {"error": exc.error_class, "message": str(exc)}
        if isinstance(exc, ConstraintError):
            payload["rule"] = exc.rule
        if isinstance(exc, InfeasibleError):
            payload["slot"] = exc.slot
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": "input", "message": str(exc)},
                         sort_keys=True), file=sys.stderr)
        return 6


def main() -> None:
    sys.exit(run_cli())
