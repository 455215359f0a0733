"""Roster file: the user-supplied source of player roles and countries.

Ball-by-ball data never labels roles, so recommendation-time role
constraints depend on this file. Format: UTF-8 text, one player per line,

    id,name,country,role,alias1|alias2

Blank lines and ``#`` comments are ignored. ``role`` is one of
batsman / bowler / wicketkeeper / batting all-rounder / bowling
all-rounder (hyphen, underscore, and space variants accepted). The alias
column is optional and lists display-name spellings that should resolve
to this id.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import RosterError

ROLE_BATSMAN = "batsman"
ROLE_BOWLER = "bowler"
ROLE_WICKETKEEPER = "wicketkeeper"
ROLE_BATTING_AR = "batting all-rounder"
ROLE_BOWLING_AR = "bowling all-rounder"

ROLES = (ROLE_BATSMAN, ROLE_BOWLER, ROLE_WICKETKEEPER,
         ROLE_BATTING_AR, ROLE_BOWLING_AR)

_ROLE_ALIASES = {
    "batsman": ROLE_BATSMAN,
    "batter": ROLE_BATSMAN,
    "bowler": ROLE_BOWLER,
    "wicketkeeper": ROLE_WICKETKEEPER,
    "wicket keeper": ROLE_WICKETKEEPER,
    "keeper": ROLE_WICKETKEEPER,
    "batting all rounder": ROLE_BATTING_AR,
    "batting allrounder": ROLE_BATTING_AR,
    "bowling all rounder": ROLE_BOWLING_AR,
    "bowling allrounder": ROLE_BOWLING_AR,
}


def normalize_role(text: str) -> str:
    key = text.strip().lower().replace("-", " ").replace("_", " ")
    key = " ".join(key.split())
    if key not in _ROLE_ALIASES:
        raise RosterError(f"unknown role {text!r} (expected one of {ROLES})")
    return _ROLE_ALIASES[key]


@dataclass(frozen=True)
class RosterEntry:
    player_id: str
    name: str
    country: str
    role: str
    aliases: tuple[str, ...] = ()


def parse_roster(text: str) -> dict[str, RosterEntry]:
    """Parse roster text into {player_id: RosterEntry}; duplicate ids raise."""
    entries: dict[str, RosterEntry] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) < 4:
            raise RosterError(f"roster line {lineno}: expected id,name,country,role[,aliases]")
        player_id, name, country, role = parts[:4]
        aliases = tuple(a.strip() for a in parts[4].split("|") if a.strip()) if len(parts) > 4 else ()
        if not player_id:
            raise RosterError(f"roster line {lineno}: empty player id")
        if player_id in entries:
            raise RosterError(f"duplicate canonical identifier {player_id!r}")
        entries[player_id] = RosterEntry(player_id, name, country,
                                         normalize_role(role), aliases)
    return entries


def read_roster(path) -> dict[str, RosterEntry]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_roster(fh.read())


def alias_table(entries: dict[str, RosterEntry]) -> dict[str, str]:
    """Lowercase display-name -> canonical id map used during parsing."""
    table: dict[str, str] = {}
    for entry in entries.values():
        for name in (entry.name, *entry.aliases):
            key = name.strip().lower()
            other = table.get(key)
            if other is not None and other != entry.player_id:
                raise RosterError(
                    f"alias {name!r} maps to both {other!r} and {entry.player_id!r}")
            table[key] = entry.player_id
    return table
