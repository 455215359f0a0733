"""Parse Cricsheet per-match ODI files into normalized match records.

Both Cricsheet layouts are handled: the classic YAML layout (innings as a
list of ``{"1st innings": {...}}`` mappings with ``"over.ball"`` delivery
keys) and the newer JSON layout (innings as ``{"team", "overs": [...]}``,
batter spelled ``batter``). The layout is auto-detected from the content.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import re
from dataclasses import dataclass, field

import yaml

from .errors import ParseError

EXTRAS_NONE = 0
EXTRAS_WIDE = 1
EXTRAS_NOBALL = 2
EXTRAS_BYE = 3
EXTRAS_LEGBYE = 4

EXTRAS_KIND_NAMES = {
    EXTRAS_NONE: "none",
    EXTRAS_WIDE: "wide",
    EXTRAS_NOBALL: "no-ball",
    EXTRAS_BYE: "bye",
    EXTRAS_LEGBYE: "leg-bye",
}

# Entries recorded under "wicket" that are not dismissals by law.
_NOT_OUT_KINDS = {"retired hurt", "retired not out"}

_SLUG_RE = re.compile(r"[^a-z0-9]+")


def slugify(name: str) -> str:
    """Canonical player identifier for a display name."""
    return _SLUG_RE.sub("_", name.strip().lower()).strip("_")


@dataclass(frozen=True)
class Delivery:
    """One ball of play, with players resolved to canonical identifiers."""

    match_id: str
    innings: int
    over: int
    ball_in_over: int
    batsman_id: str
    non_striker_id: str
    bowler_id: str
    runs_off_bat: int
    extras: int
    extras_kind: int
    wicket: bool
    dismissed_id: str | None = None

    @property
    def is_legal(self) -> bool:
        """Wides and no-balls do not count as legal balls bowled."""
        return self.extras_kind not in (EXTRAS_WIDE, EXTRAS_NOBALL)

    @property
    def faced(self) -> bool:
        """Wides are not balls faced by the striker."""
        return self.extras_kind != EXTRAS_WIDE


@dataclass
class MatchRecord:
    """One match's full ball-by-ball record plus fixture metadata."""

    match_id: str
    date: dt.date
    venue: str
    teams: tuple[str, str]
    toss: str
    result: str
    deliveries: list[Delivery] = field(default_factory=list)
    innings_teams: tuple[str, ...] = ()  # batting team per innings
    notes: dict = field(default_factory=dict)

    @property
    def wickets(self) -> int:
        return sum(1 for d in self.deliveries if d.wicket)


def _load_document(content):
    if isinstance(content, bytes):
        content = content.decode("utf-8")
    stripped = content.lstrip()
    if not stripped:
        raise ParseError("malformed document: empty input")
    try:
        if stripped.startswith("{"):
            return json.loads(content)
        return yaml.safe_load(content)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ParseError(f"malformed document: {exc}") from exc


def _as_date(value) -> dt.date:
    if isinstance(value, dt.datetime):
        return value.date()
    if isinstance(value, dt.date):
        return value
    try:
        return dt.date.fromisoformat(str(value))
    except ValueError as exc:
        raise ParseError(f"malformed document: bad date {value!r}") from exc


def _extras_kind(extras_detail: dict) -> int:
    # Wides and no-balls decide legality, so they win when a delivery
    # carries several extra kinds (e.g. byes off a no-ball). Penalty runs
    # fold into the bye bucket: legal ball, runs not off the bat.
    if not extras_detail:
        return EXTRAS_NONE
    if extras_detail.get("wides"):
        return EXTRAS_WIDE
    if extras_detail.get("noballs"):
        return EXTRAS_NOBALL
    if extras_detail.get("byes") or extras_detail.get("penalty"):
        return EXTRAS_BYE
    if extras_detail.get("legbyes"):
        return EXTRAS_LEGBYE
    return EXTRAS_NONE


class _AliasResolver:
    def __init__(self, aliases: dict[str, str] | None):
        self._aliases = aliases or {}

    def resolve(self, name: str) -> str:
        key = name.strip().lower()
        if key in self._aliases:
            return self._aliases[key]
        return slugify(name)


def _require(mapping: dict, key: str, context: str):
    if key not in mapping or mapping[key] is None:
        raise ParseError(f"missing mandatory field: {context} has no '{key}'")
    return mapping[key]


def _parse_delivery(raw: dict, match_id: str, innings_no: int, over: int,
                    ball: int, resolver: _AliasResolver,
                    notes: dict) -> Delivery:
    batter = raw.get("batter", raw.get("batsman"))
    if batter is None:
        raise ParseError("missing mandatory field: delivery has no 'batsman'")
    bowler = _require(raw, "bowler", "delivery")
    non_striker = raw.get("non_striker", batter)
    runs = _require(raw, "runs", "delivery")
    runs_off_bat = int(runs.get("batter", runs.get("batsman", 0)))
    extras = int(runs.get("extras", 0))
    detail = raw.get("extras") or {}
    kind = _extras_kind(detail)
    if extras > 0 and not detail:
        # No per-kind breakdown in this file: the unattributed branch.
        notes["unattributed_extras"] = notes.get("unattributed_extras", 0) + 1
    if runs_off_bat < 0 or extras < 0:
        raise ParseError("malformed document: negative runs")
    if runs_off_bat > 6:
        raise ParseError(
            f"malformed document: runs_off_bat {runs_off_bat} exceeds 6")
    dismissed = None
    wicket_entries = raw.get("wickets")
    if wicket_entries is None and "wicket" in raw:
        wicket_entries = raw["wicket"]
    if wicket_entries is not None and not isinstance(wicket_entries, list):
        wicket_entries = [wicket_entries]
    for entry in wicket_entries or []:
        if str(entry.get("kind", "")).lower() in _NOT_OUT_KINDS:
            continue
        dismissed = resolver.resolve(_require(entry, "player_out", "wicket"))
        break
    return Delivery(
        match_id=match_id,
        innings=innings_no,
        over=over,
        ball_in_over=ball,
        batsman_id=resolver.resolve(batter),
        non_striker_id=resolver.resolve(non_striker),
        bowler_id=resolver.resolve(bowler),
        runs_off_bat=runs_off_bat,
        extras=extras,
        extras_kind=kind,
        wicket=dismissed is not None,
        dismissed_id=dismissed,
    )


def _innings_tables(doc: dict):
    """Yield (innings_number, batting team, [(over, ball, raw), ...])."""
    innings = doc.get("innings")
    if innings is None:
        raise ParseError("missing mandatory field: document has no 'innings'")
    for number, entry in enumerate(innings, start=1):
        if "overs" in entry:  # JSON layout
            rows = []
            for over_block in entry.get("overs", []):
                over = int(over_block["over"])
                for ball, raw in enumerate(over_block.get("deliveries", []), 1):
                    rows.append((over, ball, raw))
            yield number, str(entry.get("team", "")), rows
        elif "deliveries" in entry:  # already unwrapped YAML innings
            yield number, str(entry.get("team", "")), list(_yaml_delivery_rows(entry))
        else:  # classic YAML: {"1st innings": {...}}
            for body in entry.values():
                yield number, str(body.get("team", "")), list(_yaml_delivery_rows(body))


def _yaml_delivery_rows(body: dict):
    for item in body.get("deliveries", []):
        for key, raw in item.items():
            over_s, _, ball_s = str(key).partition(".")
            yield int(over_s), int(ball_s or 1), raw


def parse_match(content, *, match_id: str | None = None,
                aliases: dict[str, str] | None = None) -> MatchRecord:
    """Parse one Cricsheet ODI file (YAML or JSON) into a MatchRecord.

    ``aliases`` maps lowercase display names to canonical ids; unmatched
    names are slugified. Non-ODI files and files missing a mandatory
    field are rejected with a ParseError stating the reason.
    """
    doc = _load_document(content)
    if not isinstance(doc, dict) or "info" not in doc:
        raise ParseError("missing mandatory field: document has no 'info'")
    info = doc["info"]
    match_type = str(info.get("match_type", "")).upper()
    if match_type != "ODI":
        raise ParseError(f"not an ODI match: match_type={match_type or 'absent'}")
    teams = info.get("teams") or []
    if len(teams) != 2:
        raise ParseError("missing mandatory field: info needs two 'teams'")
    dates = info.get("dates") or []
    if not dates:
        raise ParseError("missing mandatory field: info has no 'dates'")
    date = _as_date(dates[0])
    if match_id is None:
        digest = hashlib.sha1(
            (str(date) + "|" + "|".join(sorted(map(str, teams)))).encode()
        ).hexdigest()[:12]
        match_id = f"m{digest}"

    toss = info.get("toss") or {}
    toss_text = ""
    if toss:
        toss_text = f"{toss.get('winner', '?')} elected to {toss.get('decision', '?')}"
    outcome = info.get("outcome") or {}
    if "winner" in outcome:
        by = outcome.get("by") or {}
        margin = ", ".join(f"{v} {k}" for k, v in sorted(by.items()))
        result_text = f"{outcome['winner']} won" + (f" by {margin}" if margin else "")
    else:
        result_text = str(outcome.get("result", "unknown"))

    resolver = _AliasResolver(aliases)
    notes: dict = {}
    deliveries: list[Delivery] = []
    innings_teams: list[str] = []
    for innings_no, batting_team, rows in _innings_tables(doc):
        if innings_no > 2:
            # Super-over innings fall outside the two-innings ODI record.
            notes["extra_innings_dropped"] = notes.get("extra_innings_dropped", 0) + 1
            continue
        innings_teams.append(batting_team)
        wickets = 0
        for over, ball, raw in rows:
            d = _parse_delivery(raw, match_id, innings_no, over, ball,
                                resolver, notes)
            if d.wicket:
                wickets += 1
                if wickets > 10:
                    raise ParseError("malformed document: more than 10 wickets in an innings")
            deliveries.append(d)

    deliveries.sort(key=lambda d: (d.innings, d.over, d.ball_in_over))
    return MatchRecord(
        match_id=match_id,
        date=date,
        venue=str(info.get("venue", "")),
        teams=(str(teams[0]), str(teams[1])),
        toss=toss_text,
        result=result_text,
        deliveries=deliveries,
        innings_teams=tuple(innings_teams),
        notes=notes,
    )
