"""Immutable corpus snapshot: registry, raw deliveries, and aggregates.

The snapshot keeps every delivery in columnar numpy arrays so that any
aggregate (career totals, head-to-head totals) can be recomputed under a
date filter; precomputed full-history aggregates are cached on first use.
Loaded snapshots are never mutated, so they are safe to share across
threads and requests.

Container layout (format version 1), documented for the long haul:

    bytes 0..5    magic  b"PXSNAP"
    bytes 6..7    format version, little-endian u16
    bytes 8..15   header length H, little-endian u64
    H bytes       UTF-8 JSON header (sorted keys): registry, match table,
                  metadata, and a column manifest [{name,dtype,shape,nbytes}]
    per column    zlib-compressed little-endian C-order array bytes,
                  in manifest order, each prefixed by its u64 payload length
    last 32 bytes SHA-256 of everything before it

No timestamps are stored anywhere: ingesting the same inputs always
yields byte-identical files.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import struct
import warnings
import zipfile
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cricsheet import (EXTRAS_NOBALL, EXTRAS_WIDE, MatchRecord, parse_match)
from .errors import (SnapshotFormatError, SnapshotIntegrityError,
                     UnknownPlayerError)
from .roster import RosterEntry, alias_table, read_roster

FORMAT_VERSION = 1
_MAGIC = b"PXSNAP"

_COLUMNS = (
    ("match_ord", np.int32),
    ("date_ord", np.int32),
    ("innings", np.int8),
    ("over", np.int16),
    ("ball", np.int16),
    ("bat", np.int32),
    ("nonstriker", np.int32),
    ("bowl", np.int32),
    ("runs_bat", np.int16),
    ("extras", np.int16),
    ("extras_kind", np.int8),
    ("wicket", np.int8),
    ("dismissed", np.int32),
)


@dataclass(frozen=True)
class PlayerInfo:
    player_id: str
    name: str
    country: str = ""
    role: str | None = None


class PlayerRegistry:
    """Canonical player table plus 1-based batsman/bowler index assignments.

    Index assignment is lexicographic over canonical ids, so it is a
    deterministic bijection; players who never bat get no batsman index
    and players who never bowl get no bowler index.
    """

    def __init__(self, players: dict[str, PlayerInfo],
                 batsman_ids: list[str], bowler_ids: list[str],
                 aliases: dict[str, str] | None = None):
        self.players = dict(sorted(players.items()))
        self.batsman_index = {pid: i for i, pid in enumerate(sorted(batsman_ids), 1)}
        self.bowler_index = {pid: i for i, pid in enumerate(sorted(bowler_ids), 1)}
        self.aliases = dict(sorted((aliases or {}).items()))

    @property
    def n_batsmen(self) -> int:
        return len(self.batsman_index)

    @property
    def n_bowlers(self) -> int:
        return len(self.bowler_index)

    def require(self, player_id: str) -> PlayerInfo:
        try:
            return self.players[player_id]
        except KeyError:
            raise UnknownPlayerError(f"unknown player id {player_id!r}") from None

    def role_of(self, player_id: str) -> str | None:
        return self.require(player_id).role

    def batsmen_by_index(self) -> list[str]:
        return sorted(self.batsman_index, key=self.batsman_index.get)

    def bowlers_by_index(self) -> list[str]:
        return sorted(self.bowler_index, key=self.bowler_index.get)

    def to_dict(self) -> dict:
        return {
            "players": {pid: {"name": p.name, "country": p.country, "role": p.role}
                        for pid, p in self.players.items()},
            "batsmen": self.batsmen_by_index(),
            "bowlers": self.bowlers_by_index(),
            "aliases": self.aliases,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PlayerRegistry":
        players = {pid: PlayerInfo(pid, rec["name"], rec.get("country", ""),
                                   rec.get("role"))
                   for pid, rec in data["players"].items()}
        return cls(players, data["batsmen"], data["bowlers"],
                   data.get("aliases"))


def build_registry(records: list[MatchRecord],
                   roster: dict[str, RosterEntry]) -> PlayerRegistry:
    """Registry from observed appearances, with roles from the roster.

    Players present in deliveries but absent from the roster are kept
    with role=None and flagged with a warning; the recommender refuses
    them later, ingestion does not.
    """
    batsmen: set[str] = set()
    bowlers: set[str] = set()
    seen: set[str] = set()
    for record in records:
        for d in record.deliveries:
            batsmen.add(d.batsman_id)
            bowlers.add(d.bowler_id)
            seen.update((d.batsman_id, d.non_striker_id, d.bowler_id))
            if d.dismissed_id:
                seen.add(d.dismissed_id)
    players: dict[str, PlayerInfo] = {}
    for pid in sorted(seen | set(roster)):
        entry = roster.get(pid)
        if entry is None:
            players[pid] = PlayerInfo(pid, pid.replace("_", " ").title())
        else:
            players[pid] = PlayerInfo(pid, entry.name, entry.country, entry.role)
    unrostered = sorted(seen - set(roster))
    if unrostered:
        warnings.warn(f"{len(unrostered)} players have no roster role "
                      f"(first: {unrostered[:3]})", stacklevel=2)
    return PlayerRegistry(players, sorted(batsmen), sorted(bowlers),
                          aliases=alias_table(roster))


@dataclass(frozen=True)
class MatchMeta:
    match_id: str
    date: dt.date
    venue: str
    teams: tuple[str, str]
    toss: str
    result: str
    innings_teams: tuple[str, ...] = ()


def record_columns(record: MatchRecord, match_ord: int,
                   ordinal: dict[str, int]) -> dict[str, np.ndarray]:
    """One match's deliveries as canonical-order column arrays."""
    ds = sorted(record.deliveries,
                key=lambda d: (d.innings, d.over, d.ball_in_over))
    date_ord = record.date.toordinal()
    n = len(ds)
    out: dict[str, np.ndarray] = {}
    for name, dtype in _COLUMNS:
        out[name] = np.empty(n, dtype=dtype)
    for i, d in enumerate(ds):
        out["match_ord"][i] = match_ord
        out["date_ord"][i] = date_ord
        out["innings"][i] = d.innings
        out["over"][i] = d.over
        out["ball"][i] = d.ball_in_over
        out["bat"][i] = ordinal[d.batsman_id]
        out["nonstriker"][i] = ordinal[d.non_striker_id]
        out["bowl"][i] = ordinal[d.bowler_id]
        out["runs_bat"][i] = d.runs_off_bat
        out["extras"][i] = d.extras
        out["extras_kind"][i] = d.extras_kind
        out["wicket"][i] = int(d.wicket)
        out["dismissed"][i] = ordinal[d.dismissed_id] if d.dismissed_id else -1
    return out


@dataclass(frozen=True)
class CareerStats:
    """Career batting and bowling totals with floored averages."""

    player_id: str
    batting_runs: int = 0
    balls_faced: int = 0
    dismissals: int = 0
    runs_conceded_incl_extras: int = 0
    legal_balls_bowled: int = 0
    wickets: int = 0
    extras_conceded: int = 0
    batting_rateable: bool = False
    bowling_rateable: bool = False

    def c_batsman(self, floor: float = 0.5) -> float:
        return self.batting_runs / max(self.dismissals, floor)

    def c_bowler(self, floor: float = 0.5) -> float:
        return self.runs_conceded_incl_extras / max(self.wickets, floor)

    @property
    def runs_conceded_off_bat(self) -> int:
        return self.runs_conceded_incl_extras - self.extras_conceded


@dataclass(frozen=True)
class MatchupStats:
    """Head-to-head totals for one batsman/bowler pair.

    ``balls`` counts legal deliveries (wides and no-balls excluded);
    ``runs`` is off the bat; ``extras`` is everything the bowler conceded
    on top while this batsman was on strike.
    """

    batsman_id: str
    bowler_id: str
    balls: int = 0
    runs: int = 0
    outs: int = 0
    extras: int = 0


class Aggregates:
    """Career and matchup totals over one (optionally date-masked) view."""

    def __init__(self, snapshot: "Snapshot", mask: np.ndarray | None = None):
        cols = snapshot.columns
        n_players = len(snapshot.player_ids)
        if mask is None:
            mask = slice(None)
        bat = cols["bat"][mask]
        bowl = cols["bowl"][mask]
        runs_bat = cols["runs_bat"][mask].astype(np.int64)
        extras = cols["extras"][mask].astype(np.int64)
        kind = cols["extras_kind"][mask]
        wicket = cols["wicket"][mask].astype(bool)
        dismissed = cols["dismissed"][mask]

        legal = (kind != EXTRAS_WIDE) & (kind != EXTRAS_NOBALL)
        faced = kind != EXTRAS_WIDE

        def count(idx, weights=None):
            return np.bincount(idx, weights=weights, minlength=n_players).astype(np.int64)

        self.batting_runs = count(bat, runs_bat)
        self.balls_faced = count(bat[faced])
        out_ids = dismissed[wicket & (dismissed >= 0)]
        self.dismissals = count(out_ids)
        self.bowl_runs_off_bat = count(bowl, runs_bat)
        self.bowl_extras = count(bowl, extras)
        self.legal_balls = count(bowl[legal])
        self.wickets = count(bowl[wicket])

        # Matchup table keyed by batsman/bowler ordinal pair. Outs count
        # the striker being the dismissed player; bowler career wickets
        # still credit every dismissal on the delivery.
        pair_key = bat.astype(np.int64) * n_players + bowl.astype(np.int64)
        self._pair_ids, inverse = np.unique(pair_key, return_inverse=True)
        n_pairs = len(self._pair_ids)

        def pcount(sel=None, weights=None):
            idx = inverse if sel is None else inverse[sel]
            return np.bincount(idx, weights=weights, minlength=n_pairs).astype(np.int64)

        self.pair_balls = pcount(legal)
        self.pair_runs = pcount(weights=runs_bat)
        self.pair_outs = pcount(wicket & (dismissed == bat))
        self.pair_extras = pcount(weights=extras)
        self._pair_lookup = {int(k): i for i, k in enumerate(self._pair_ids)}
        self._n_players = n_players


class Snapshot:
    """Frozen corpus: registry + match table + delivery columns + metadata."""

    def __init__(self, registry: PlayerRegistry, matches: list[MatchMeta],
                 columns: dict[str, np.ndarray], metadata: dict | None = None):
        self.registry = registry
        self.matches = list(matches)
        self.columns = columns
        self.metadata = dict(metadata or {})
        self.player_ids = sorted(registry.players)
        self._ordinal = {pid: i for i, pid in enumerate(self.player_ids)}
        self._aggregates: dict[object, Aggregates] = {}
        for arr in columns.values():
            arr.setflags(write=False)

    # -- construction ----------------------------------------------------

    @classmethod
    def from_records(cls, records: list[MatchRecord],
                     roster: dict[str, RosterEntry],
                     metadata: dict | None = None) -> "Snapshot":
        registry = build_registry(records, roster)
        order = sorted(records, key=lambda r: r.match_id)
        ids = [r.match_id for r in order]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise SnapshotFormatError(f"duplicate match ids: {dupes[:3]}")
        matches = [MatchMeta(r.match_id, r.date, r.venue, r.teams, r.toss,
                             r.result, r.innings_teams) for r in order]
        ordinal = {pid: i for i, pid in enumerate(sorted(registry.players))}
        blocks = [record_columns(r, m, ordinal) for m, r in enumerate(order)]
        unattributed = sum(r.notes.get("unattributed_extras", 0) for r in order)
        meta = dict(metadata or {})
        meta.setdefault("extras_kind_detail",
                        "unattributed" if unattributed else "per-kind")
        return cls.from_blocks(registry, matches, blocks, meta)

    @classmethod
    def from_blocks(cls, registry: PlayerRegistry, matches: list[MatchMeta],
                    blocks: list[dict], metadata: dict | None = None) -> "Snapshot":
        """Assemble a snapshot from per-match column blocks (see
        record_columns). Blocks must be listed in match_id order with
        match_ord already set; prefixes of a block list give prefix
        snapshots with identical delivery ordering."""
        columns = {}
        for name, dtype in _COLUMNS:
            if blocks:
                columns[name] = np.concatenate([b[name] for b in blocks])
            else:
                columns[name] = np.array([], dtype=dtype)
        meta = dict(metadata or {})
        meta.setdefault("extras_kind_detail", "per-kind")
        meta["matches"] = len(matches)
        meta["deliveries"] = int(len(columns["match_ord"]))
        return cls(registry, matches, columns, meta)

    # -- aggregate queries -------------------------------------------------

    def aggregates(self, before: dt.date | None = None,
                   year: int | None = None) -> Aggregates:
        """Totals over deliveries, optionally strictly before a date or
        within one calendar year. Cached per filter."""
        key = (before, year)
        agg = self._aggregates.get(key)
        if agg is None:
            mask = None
            if before is not None or year is not None:
                dates = self.columns["date_ord"]
                mask = np.ones(len(dates), dtype=bool)
                if before is not None:
                    mask &= dates < before.toordinal()
                if year is not None:
                    lo = dt.date(year, 1, 1).toordinal()
                    hi = dt.date(year + 1, 1, 1).toordinal()
                    mask &= (dates >= lo) & (dates < hi)
            agg = Aggregates(self, mask)
            self._aggregates[key] = agg
        return agg

    def ordinal(self, player_id: str) -> int:
        self.registry.require(player_id)
        return self._ordinal[player_id]

    def career_stats(self, player_id: str, *, before: dt.date | None = None,
                     year: int | None = None,
                     min_career_balls: int = 300) -> CareerStats:
        """Career totals for one player under an optional date filter.

        Batting runs exclude extras; bowling runs conceded include them.
        Below the ball threshold the stats still come back, flagged
        not-rateable.
        """
        i = self.ordinal(player_id)
        a = self.aggregates(before=before, year=year)
        return CareerStats(
            player_id=player_id,
            batting_runs=int(a.batting_runs[i]),
            balls_faced=int(a.balls_faced[i]),
            dismissals=int(a.dismissals[i]),
            runs_conceded_incl_extras=int(a.bowl_runs_off_bat[i] + a.bowl_extras[i]),
            legal_balls_bowled=int(a.legal_balls[i]),
            wickets=int(a.wickets[i]),
            extras_conceded=int(a.bowl_extras[i]),
            batting_rateable=bool(a.balls_faced[i] >= min_career_balls),
            bowling_rateable=bool(a.legal_balls[i] >= min_career_balls),
        )

    def head_to_head(self, batsman_id: str, bowler_id: str, *,
                     before: dt.date | None = None,
                     year: int | None = None) -> MatchupStats:
        """Totals for one batsman/bowler pair; all-zero when they never met."""
        bi = self.ordinal(batsman_id)
        bo = self.ordinal(bowler_id)
        a = self.aggregates(before=before, year=year)
        idx = a._pair_lookup.get(bi * a._n_players + bo)
        if idx is None:
            return MatchupStats(batsman_id, bowler_id)
        return MatchupStats(
            batsman_id, bowler_id,
            balls=int(a.pair_balls[idx]), runs=int(a.pair_runs[idx]),
            outs=int(a.pair_outs[idx]), extras=int(a.pair_extras[idx]),
        )

    def matchups_of(self, player_id: str, side: str, *,
                    before: dt.date | None = None,
                    year: int | None = None) -> list[MatchupStats]:
        """All head-to-head rows where the player batted ('batting') or
        bowled ('bowling'), sorted by opponent id."""
        i = self.ordinal(player_id)
        a = self.aggregates(before=before, year=year)
        n = a._n_players
        bats = a._pair_ids // n
        bowls = a._pair_ids % n
        sel = np.nonzero(bats == i)[0] if side == "batting" else np.nonzero(bowls == i)[0]
        out = []
        for idx in sel:
            bi, bo = int(bats[idx]), int(bowls[idx])
            out.append(MatchupStats(
                self.player_ids[bi], self.player_ids[bo],
                balls=int(a.pair_balls[idx]), runs=int(a.pair_runs[idx]),
                outs=int(a.pair_outs[idx]), extras=int(a.pair_extras[idx]),
            ))
        out.sort(key=lambda m: (m.bowler_id, m.batsman_id) if side == "batting"
                 else (m.batsman_id, m.bowler_id))
        return out

    def active_years(self, player_id: str) -> list[int]:
        """Calendar years in which the player appears on any delivery."""
        i = self.ordinal(player_id)
        cols = self.columns
        sel = (cols["bat"] == i) | (cols["bowl"] == i) | (cols["nonstriker"] == i)
        years = {dt.date.fromordinal(int(o)).year for o in cols["date_ord"][sel]}
        return sorted(years)

    def team_players(self, team: str, *, since: dt.date | None = None,
                     before: dt.date | None = None) -> list[str]:
        """Players who appeared for ``team`` in the date window, using the
        per-innings batting-team attribution."""
        cols = self.columns
        ids = set()
        for match_ord, meta in enumerate(self.matches):
            if team not in meta.teams or not meta.innings_teams:
                continue
            if since is not None and meta.date < since:
                continue
            if before is not None and meta.date >= before:
                continue
            in_match = cols["match_ord"] == match_ord
            for k, batting in enumerate(meta.innings_teams, start=1):
                sel = in_match & (cols["innings"] == k)
                if batting == team:
                    ids.update(int(i) for i in cols["bat"][sel])
                    ids.update(int(i) for i in cols["nonstriker"][sel])
                else:
                    ids.update(int(i) for i in cols["bowl"][sel])
        return sorted(self.player_ids[i] for i in ids)

    # -- persistence -------------------------------------------------------

    def save(self, path) -> None:
        header = {
            "format_version": FORMAT_VERSION,
            "registry": self.registry.to_dict(),
            "matches": [{
                "id": m.match_id, "date": m.date.isoformat(), "venue": m.venue,
                "teams": list(m.teams), "toss": m.toss, "result": m.result,
                "innings_teams": list(m.innings_teams),
            } for m in self.matches],
            "metadata": self.metadata,
            "columns": [{
                "name": name,
                "dtype": str(self.columns[name].dtype),
                "shape": list(self.columns[name].shape),
            } for name, _ in _COLUMNS],
        }
        blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
        out = bytearray()
        out += _MAGIC
        out += struct.pack("<H", FORMAT_VERSION)
        out += struct.pack("<Q", len(blob))
        out += blob
        for name, _ in _COLUMNS:
            payload = zlib.compress(np.ascontiguousarray(self.columns[name]).tobytes(), 6)
            out += struct.pack("<Q", len(payload))
            out += payload
        out += hashlib.sha256(bytes(out)).digest()
        Path(path).write_bytes(bytes(out))

    @classmethod
    def load(cls, path) -> "Snapshot":
        raw = Path(path).read_bytes()
        if len(raw) < len(_MAGIC) + 2 + 8 + 32 or raw[:len(_MAGIC)] != _MAGIC:
            raise SnapshotFormatError("not a snapshot file")
        body, digest = raw[:-32], raw[-32:]
        if hashlib.sha256(body).digest() != digest:
            raise SnapshotIntegrityError("snapshot checksum mismatch")
        version = struct.unpack_from("<H", raw, len(_MAGIC))[0]
        if version != FORMAT_VERSION:
            raise SnapshotFormatError(
                f"snapshot format version {version} != supported {FORMAT_VERSION}")
        pos = len(_MAGIC) + 2
        (hlen,) = struct.unpack_from("<Q", raw, pos)
        pos += 8
        header = json.loads(raw[pos:pos + hlen].decode())
        pos += hlen
        columns = {}
        for spec in header["columns"]:
            (plen,) = struct.unpack_from("<Q", raw, pos)
            pos += 8
            data = zlib.decompress(raw[pos:pos + plen])
            pos += plen
            arr = np.frombuffer(data, dtype=np.dtype(spec["dtype"]))
            columns[spec["name"]] = arr.reshape(spec["shape"])
        registry = PlayerRegistry.from_dict(header["registry"])
        matches = [MatchMeta(m["id"], dt.date.fromisoformat(m["date"]),
                             m["venue"], tuple(m["teams"]), m["toss"],
                             m["result"], tuple(m.get("innings_teams", ())))
                   for m in header["matches"]]
        return cls(registry, matches, columns, header.get("metadata"))


def _iter_match_files(source):
    """Yield (name, text) for every match file in a directory or zip."""
    path = Path(source)
    if path.is_dir():
        names = sorted(p for p in path.iterdir()
                       if p.suffix.lower() in (".yaml", ".yml", ".json"))
        for p in names:
            yield p.stem, p.read_text(encoding="utf-8")
    elif zipfile.is_zipfile(path):
        with zipfile.ZipFile(path) as zf:
            for name in sorted(zf.namelist()):
                if name.lower().endswith((".yaml", ".yml", ".json")):
                    yield Path(name).stem, zf.read(name).decode("utf-8")
    else:
        raise SnapshotFormatError(f"{source} is neither a directory nor a zip")


def ingest(source, roster_path, *, skip_invalid: bool = False) -> Snapshot:
    """Parse every match file under ``source`` and build a snapshot.

    Aggregation is associative and commutative over matches, and match
    records are canonically ordered before freezing, so the result (and
    its serialized bytes) is independent of file enumeration order.
    ``skip_invalid`` downgrades per-file parse failures to warnings,
    recording the skipped names in the metadata.
    """
    roster = read_roster(roster_path)
    aliases = alias_table(roster)
    records = []
    skipped = []
    for name, text in _iter_match_files(source):
        try:
            records.append(parse_match(text, match_id=name, aliases=aliases))
        except Exception as exc:
            if not skip_invalid:
                raise
            skipped.append(name)
            warnings.warn(f"skipping {name}: {exc}", stacklevel=2)
    metadata = {"skipped_files": sorted(skipped)} if skipped else {}
    return Snapshot.from_records(records, roster, metadata)
