"""Binds a frozen snapshot and a config into the full rating ->
embedding -> recommendation pipeline, with per-view caching.

An Engine is a pure function of (snapshot, config, cutoff date): every
query is reproducible and safe to run concurrently. Tournament
evaluation builds one engine per fixture date so no delivery on or after
the fixture leaks into that fixture's recommendations.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

from .config import DEFAULT_CONFIG, EngineConfig
from .embedding import (EmbeddingL1, EmbeddingL2, ReplacementCandidate,
                        build_level1, build_level2, cluster, like_for_like,
                        pairwise_phi, similarity_l1)
from .errors import ConstraintError, UnrateableError
from .rating import (MatchupRow, PERSPECTIVE_BATSMAN, PERSPECTIVE_BOWLER,
                     RatingRecord, normalize_series, quality_index,
                     weighted_profile)
from .recommend import (BipartiteGraph, Composition, Edge, Fixture,
                        RankedCandidate, Recommendation, delta_ordering,
                        graph_side, lineup_similarity, select_team)
from .roster import (ROLE_BATSMAN, ROLE_BATTING_AR, ROLE_BOWLER,
                     ROLE_BOWLING_AR, ROLE_WICKETKEEPER, ROLES)
from .snapshot import Snapshot

_SIDES = ("batting", "bowling")


class Engine:
    """Rating, embedding, and recommendation queries over one corpus view."""

    def __init__(self, snapshot: Snapshot, config: EngineConfig = DEFAULT_CONFIG,
                 cutoff: dt.date | None = None):
        self.snapshot = snapshot
        self.config = config
        self.cutoff = cutoff
        self._career: dict[str, object] = {}
        self._ratings: dict[tuple, RatingRecord | None] = {}
        self._l1: dict[tuple[str, str], EmbeddingL1] = {}
        self._l2: dict[tuple[str, str], EmbeddingL2 | None] = {}

    # -- career data -------------------------------------------------------

    def career(self, player_id: str):
        stats = self._career.get(player_id)
        if stats is None:
            stats = self.snapshot.career_stats(
                player_id, before=self.cutoff,
                min_career_balls=self.config.min_career_balls)
            self._career[player_id] = stats
        return stats

    def _average(self, player_id: str, perspective: str) -> float:
        stats = self.career(player_id)
        if perspective == PERSPECTIVE_BATSMAN:
            return stats.c_batsman(self.config.dismissal_floor)
        return stats.c_bowler(self.config.dismissal_floor)

    def _matchup_rows(self, player_id: str, side: str,
                      year: int | None = None) -> list[MatchupRow]:
        matchups = self.snapshot.matchups_of(player_id, side,
                                             before=self.cutoff, year=year)
        rows = []
        for m in matchups:
            opponent = m.bowler_id if side == "batting" else m.batsman_id
            rows.append(MatchupRow(opponent, m.balls, m.runs, m.outs, m.extras))
        return rows

    def _opponent_averages(self, rows: list[MatchupRow], side: str) -> dict[str, float]:
        perspective = (PERSPECTIVE_BOWLER if side == "batting"
                       else PERSPECTIVE_BATSMAN)
        return {row.opponent_id: self._average(row.opponent_id, perspective)
                for row in rows}

    # -- ratings -------------------------------------------------------------

    def rating(self, player_id: str, side: str, *, weighted: bool = True,
               year: int | None = None,
               enforce_rateable: bool = True) -> RatingRecord:
        """Career (or single-year) rating from the given side.

        Opponent career averages always span the engine's full view even
        when the player's own deliveries are windowed to one year, and
        matchup rows whose opponent has no scoring record carry no
        usable weight, so they are dropped.
        """
        key = (player_id, side, weighted, year, enforce_rateable)
        if key in self._ratings:
            record = self._ratings[key]
            if record is None:
                raise UnrateableError(f"{player_id}: not rateable ({side})")
            return record
        try:
            record = self._rating_uncached(player_id, side, weighted, year,
                                           enforce_rateable)
        except UnrateableError:
            self._ratings[key] = None
            raise
        self._ratings[key] = record
        return record

    def _rating_uncached(self, player_id, side, weighted, year,
                         enforce_rateable) -> RatingRecord:
        stats = self.career(player_id)
        if enforce_rateable and year is None:
            rateable = (stats.batting_rateable if side == "batting"
                        else stats.bowling_rateable)
            if not rateable:
                raise UnrateableError(
                    f"{player_id}: below {self.config.min_career_balls}-ball "
                    f"career threshold for {side}")
        rows = self._matchup_rows(player_id, side, year)
        averages = self._opponent_averages(rows, side)
        rows = [r for r in rows if averages[r.opponent_id] > 0]
        if not rows:
            raise UnrateableError(f"{player_id}: no rateable matchup data")
        perspective = (PERSPECTIVE_BATSMAN if side == "batting"
                       else PERSPECTIVE_BOWLER)
        own = self._average(player_id, perspective)
        profile = weighted_profile(player_id, perspective, rows, own, averages,
                                   self.config, weighted=weighted)
        record = quality_index(profile, self.config)
        return RatingRecord(player_id, side, record.phi_player, period=year,
                            balls=record.balls, outs=record.outs)

    def rating_record(self, player_id: str, side: str,
                      year: int | None = None) -> RatingRecord:
        """Quality index and baseline side by side (either may be None)."""
        phi = baseline = None
        balls = outs = 0
        try:
            weighted = self.rating(player_id, side, weighted=True, year=year)
            phi = weighted.phi_player
            balls, outs = weighted.balls, weighted.outs
        except UnrateableError:
            pass
        try:
            unweighted = self.rating(player_id, side, weighted=False,
                                     year=year)
            baseline = unweighted.phi_player
            balls, outs = unweighted.balls, unweighted.outs
        except UnrateableError:
            pass
        return RatingRecord(player_id, side, phi, baseline, year,
                            balls=balls, outs=outs)

    def career_phi(self, player_id: str, side: str) -> float | None:
        try:
            return self.rating(player_id, side, weighted=True).phi_player
        except UnrateableError:
            return None

    def rating_timeseries(self, player_id: str, side: str):
        """Per-year (year, phi, baseline) rows plus min-max normalized series.

        Yearly buckets window the player's own deliveries only; empty or
        unrateable years are skipped.
        """
        rows = []
        for year in self.snapshot.active_years(player_id):
            if self.cutoff is not None and dt.date(year, 1, 1) >= self.cutoff:
                continue
            record = self.rating_record(player_id, side, year=year)
            if record.phi_player is None and record.baseline_rating is None:
                continue
            rows.append(record)
        if not rows:
            raise UnrateableError(f"{player_id}: no rateable yearly bucket")
        phi_norm = normalize_series([r.phi_player for r in rows
                                     if r.phi_player is not None])
        base_norm = normalize_series([r.baseline_rating for r in rows
                                      if r.baseline_rating is not None])
        return rows, phi_norm, base_norm

    # -- embeddings ------------------------------------------------------------

    def _pairwise_entries(self, player_id: str, side: str) -> dict[int, float | None]:
        registry = self.snapshot.registry
        index = (registry.bowler_index if side == "batting"
                 else registry.batsman_index)
        perspective = (PERSPECTIVE_BATSMAN if side == "batting"
                       else PERSPECTIVE_BOWLER)
        own = self._average(player_id, perspective)
        entries: dict[int, float | None] = {}
        for row in self._matchup_rows(player_id, side):
            opp_index = index.get(row.opponent_id)
            if opp_index is None:
                continue
            opp_avg = self._average(
                row.opponent_id,
                PERSPECTIVE_BOWLER if side == "batting" else PERSPECTIVE_BATSMAN)
            if own <= 0 or opp_avg <= 0:
                entries[opp_index] = None
                continue
            entries[opp_index] = pairwise_phi(row, perspective, own, opp_avg,
                                              self.config)
        return entries

    def level1(self, player_id: str, side: str) -> EmbeddingL1:
        """Dense pairwise-index vector; all zeros if the player never
        qualified against anyone on that side."""
        key = (player_id, side)
        if key not in self._l1:
            registry = self.snapshot.registry
            registry.require(player_id)
            dim = (registry.n_bowlers if side == "batting"
                   else registry.n_batsmen)
            entries = self._pairwise_entries(player_id, side)
            self._l1[key] = build_level1(player_id, side, entries, dim)
        return self._l1[key]

    def level2(self, player_id: str, side: str) -> EmbeddingL2:
        key = (player_id, side)
        if key not in self._l2:
            career = self.career_phi(player_id, side)
            if career is None:
                self._l2[key] = None
            else:
                registry = self.snapshot.registry
                dim = (registry.n_bowlers if side == "batting"
                       else registry.n_batsmen)
                entries = self._pairwise_entries(player_id, side)
                self._l2[key] = build_level2(player_id, side, entries, career,
                                             dim, self.config)
        if self._l2[key] is None:
            raise UnrateableError(f"{player_id}: no career index for {side}")
        return self._l2[key]

    def pairwise(self, batsman_id: str, bowler_id: str,
                 perspective: str = PERSPECTIVE_BATSMAN) -> float | None:
        """Pairwise quality index for one head-to-head, None if undefined."""
        m = self.snapshot.head_to_head(batsman_id, bowler_id, before=self.cutoff)
        row = MatchupRow(bowler_id if perspective == PERSPECTIVE_BATSMAN
                         else batsman_id, m.balls, m.runs, m.outs, m.extras)
        own = self._average(
            batsman_id if perspective == PERSPECTIVE_BATSMAN else bowler_id,
            perspective)
        opp = self._average(
            bowler_id if perspective == PERSPECTIVE_BATSMAN else batsman_id,
            PERSPECTIVE_BOWLER if perspective == PERSPECTIVE_BATSMAN
            else PERSPECTIVE_BATSMAN)
        if own <= 0 or opp <= 0:
            return None
        return pairwise_phi(row, perspective, own, opp, self.config)

    def embeddable(self, side: str) -> list[str]:
        """Players holding an index on that side, canonical order."""
        registry = self.snapshot.registry
        index = (registry.batsman_index if side == "batting"
                 else registry.bowler_index)
        return sorted(index)

    def cluster_players(self, side: str, ids: list[str] | None = None, *,
                        n_clusters: int | None = None,
                        cutoff: float | None = None) -> dict[str, int]:
        pool = ids if ids is not None else self.embeddable(side)
        embeddings = {pid: self.level1(pid, side) for pid in pool}
        return cluster(embeddings, n_clusters=n_clusters, cutoff=cutoff,
                       config=self.config)

    def replacements(self, player_id: str, pool: list[str],
                     side: str | None = None) -> list[ReplacementCandidate]:
        """Like-for-like ranking of pool candidates for the given player."""
        role = self.snapshot.registry.role_of(player_id)
        if side is None:
            if role is None:
                raise ConstraintError("missing-role",
                                      f"{player_id!r} has no roster role")
            side = graph_side(role)
        ids = sorted(set(pool) | {player_id})
        l1 = {pid: self.level1(pid, side) for pid in ids}
        l2 = {}
        for pid in ids:
            try:
                l2[pid] = self.level2(pid, side)
            except UnrateableError:
                continue
        return like_for_like(player_id, sorted(set(pool)), l1, l2, self.config)

    # -- recommendation ---------------------------------------------------------

    def weakness_list(self, opponent_id: str, side: str | None = None) -> list[str]:
        """Players (all countries) the opponent's dominance pattern marks weak.

        ``side`` is the opponent's graph side; the returned players are of
        the opposite role. Unrateable opponents yield an empty list.
        """
        registry = self.snapshot.registry
        if side is None:
            role = registry.role_of(opponent_id)
            if role is None:
                raise ConstraintError("missing-role",
                                      f"{opponent_id!r} has no roster role")
            side = graph_side(role)
        try:
            pattern = self.level2(opponent_id, side)
        except UnrateableError:
            return []
        opposite = (registry.batsmen_by_index() if side == "bowling"
                    else registry.bowlers_by_index())
        return [opposite[i] for i in range(len(opposite))
                if pattern.values[i] == 0]

    def _require_role(self, player_id: str) -> str:
        role = self.snapshot.registry.role_of(player_id)
        if role is None:
            raise ConstraintError(
                "missing-role",
                f"{player_id!r} has no roster role; recommendation requires one")
        return role

    def build_bipartite(self, pool: list[str], opposition: list[str]) -> BipartiteGraph:
        """Weakness-backed candidate/opponent graph.

        A candidate links to an opponent when the candidate's level-1
        vector is similar (>= l1_threshold) to some player the opponent
        is weak against. Edge weight is the candidate's own pairwise
        index against the opponent when defined, otherwise the weight
        transfers from the most similar weakness-list player (proxied).
        Wicketkeepers and batting all-rounders count as batsmen; bowling
        all-rounders as bowlers.
        """
        if not pool:
            raise ConstraintError("empty-pool", "candidate pool is empty")
        if not opposition:
            raise ConstraintError("empty-opposition", "opposition list is empty")
        overlap = sorted(set(pool) & set(opposition))
        if overlap:
            raise ConstraintError("pool-opposition-overlap",
                                  f"players on both sides: {overlap}")
        pool = sorted(set(pool))
        opposition = sorted(set(opposition))
        for pid in (*pool, *opposition):
            self.snapshot.registry.require(pid)
            self._require_role(pid)
        edges = []
        for opp in opposition:
            opp_side = graph_side(self._require_role(opp))
            weak_against = self.weakness_list(opp, opp_side)
            if not weak_against:
                continue
            candidate_side = "batting" if opp_side == "bowling" else "bowling"
            weak_l1 = {w: self.level1(w, candidate_side) for w in weak_against}
            for cand in pool:
                if graph_side(self._require_role(cand)) != candidate_side:
                    continue
                cand_l1 = self.level1(cand, candidate_side)
                scored = []
                for w in weak_against:
                    sim = similarity_l1(cand_l1, weak_l1[w], self.config)
                    if sim is not None and sim >= self.config.l1_threshold:
                        scored.append((-sim, w))
                if not scored:
                    continue
                scored.sort()
                edge = self._edge_weight(cand, opp, candidate_side,
                                         [w for _, w in scored])
                if edge is not None:
                    edges.append(edge)
        return BipartiteGraph(pool, opposition, edges)

    def _edge_weight(self, cand: str, opp: str, candidate_side: str,
                     ranked_weak: list[str]) -> Edge | None:
        if candidate_side == "batting":
            direct = self.pairwise(cand, opp, PERSPECTIVE_BATSMAN)
        else:
            direct = self.pairwise(opp, cand, PERSPECTIVE_BOWLER)
        if direct is not None:
            return Edge(cand, opp, direct, "direct")
        for w in ranked_weak:
            if candidate_side == "batting":
                proxied = self.pairwise(w, opp, PERSPECTIVE_BATSMAN)
            else:
                proxied = self.pairwise(opp, w, PERSPECTIVE_BOWLER)
            if proxied is not None:
                return Edge(cand, opp, proxied, "proxied", via=w)
        return None

    def orderings(self, graph: BipartiteGraph) -> dict[str, list[RankedCandidate]]:
        roles = {pid: self._require_role(pid) for pid in graph.candidates}
        phi = {pid: self.career_phi(pid, graph_side(roles[pid]))
               for pid in graph.candidates}
        return {role: delta_ordering(graph, roles, phi, (role,), self.config)
                for role in ROLES}

    def recommend(self, pool: list[str], opposition: list[str],
                  composition: Composition, *, locked: tuple[str, ...] = (),
                  excluded: tuple[str, ...] = (),
                  squad_size: int = 11) -> Recommendation:
        """Weakness graph -> delta orderings -> constrained selection."""
        composition.validate(squad_size)
        pool_sorted = sorted(set(pool))
        missing_locks = sorted(set(locked) - set(pool_sorted))
        if missing_locks:
            raise ConstraintError("lock-not-in-pool",
                                  f"locked players not in pool: {missing_locks}")
        graph = self.build_bipartite(pool_sorted, opposition)
        orderings = self.orderings(graph)
        roles = {pid: self._require_role(pid) for pid in pool_sorted}
        xi = select_team(orderings, composition, roles, tuple(locked),
                         tuple(excluded), squad_size)
        echo = dict(self.config.to_dict())
        echo["squad_size"] = squad_size
        echo["cutoff"] = self.cutoff.isoformat() if self.cutoff else None
        return Recommendation(xi, graph, orderings, echo, composition,
                              tuple(locked), tuple(excluded))


# -- tournament evaluation ------------------------------------------------------


@dataclass(frozen=True)
class FixtureScore:
    fixture_id: str
    date: dt.date
    team: str
    won: bool
    similarity: float


@dataclass(frozen=True)
class TournamentReport:
    scored: list[FixtureScore]
    skipped: list[str]  # abandoned fixture ids

    @property
    def winning_mean(self) -> float:
        rows = [s.similarity for s in self.scored if s.won]
        return sum(rows) / len(rows) if rows else float("nan")

    @property
    def losing_mean(self) -> float:
        rows = [s.similarity for s in self.scored if not s.won]
        return sum(rows) / len(rows) if rows else float("nan")


def composition_of_xi(snapshot: Snapshot, xi: tuple[str, ...]) -> Composition:
    """Role counts of an actual XI, from roster roles."""
    counts = {role: 0 for role in ROLES}
    for pid in xi:
        role = snapshot.registry.role_of(pid)
        if role is None:
            raise ConstraintError("missing-role", f"{pid!r} has no roster role")
        counts[role] += 1
    return Composition(
        batsman=counts[ROLE_BATSMAN], bowler=counts[ROLE_BOWLER],
        wicketkeeper=counts[ROLE_WICKETKEEPER],
        batting_allrounder=counts[ROLE_BATTING_AR],
        bowling_allrounder=counts[ROLE_BOWLING_AR])


def evaluate_tournament(snapshot: Snapshot, fixtures: list[Fixture],
                        config: EngineConfig = DEFAULT_CONFIG) -> TournamentReport:
    """Recommend both XIs for every completed fixture and score lineup
    similarity against the actual XIs.

    Each side's composition mirrors the roles of its actual XI; the
    opposition input is the other side's candidate pool (the potential
    list the XI must be suited to face). Every fixture is evaluated on a
    view of the snapshot cut off strictly before the fixture date, and
    abandoned fixtures are skipped.
    """
    engines: dict[dt.date, Engine] = {}
    scored = []
    skipped = []
    for fixture in fixtures:
        if fixture.abandoned:
            skipped.append(fixture.fixture_id)
            continue
        engine = engines.get(fixture.date)
        if engine is None:
            engine = Engine(snapshot, config, cutoff=fixture.date)
            engines[fixture.date] = engine
        for me, other in (fixture.sides, fixture.sides[::-1]):
            composition = composition_of_xi(snapshot, me.xi)
            rec = engine.recommend(list(me.pool), list(other.pool), composition)
            similarity = lineup_similarity(rec.players(), list(me.xi))
            scored.append(FixtureScore(fixture.fixture_id, fixture.date,
                                       me.team, fixture.winner == me.team,
                                       similarity))
    return TournamentReport(scored, skipped)
