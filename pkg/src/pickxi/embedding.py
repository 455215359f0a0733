"""Two-level matchup embeddings, similarities, clustering, replacements.

Level 1 is a dense vector of pairwise quality indices against every
opposite-role player (0 where the pair never met the sample threshold).
Level 2 is the ternary dominance pattern derived from it: weak / not-weak
per opponent, unknown where there is no qualifying head-to-head sample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from .config import DEFAULT_CONFIG, EngineConfig
from .errors import UnrateableError
from .rating import (InningsModel, MatchupRow, PERSPECTIVE_BATSMAN,
                     PERSPECTIVE_BOWLER, innings_moments, quality_weight)

WEAK = 0
NOT_WEAK = 1
UNKNOWN = -1


@dataclass(frozen=True)
class EmbeddingL1:
    """Dense pairwise-index vector; entry i-1 faces opposite index i."""

    player_id: str
    role: str  # 'batting' or 'bowling' side
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)


@dataclass(frozen=True)
class EmbeddingL2:
    """Ternary dominance vector: WEAK=0, NOT_WEAK=1, UNKNOWN=-1."""

    player_id: str
    role: str
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    def binary(self) -> np.ndarray:
        """Binary view: unknown entries collapse into not-weak."""
        out = self.values.copy()
        out[out == UNKNOWN] = NOT_WEAK
        return out


def pairwise_phi(row: MatchupRow, perspective: str, own_average: float,
                 opponent_average: float,
                 config: EngineConfig = DEFAULT_CONFIG) -> float | None:
    """Quality index of one head-to-head pair, or None when undefined.

    Undefined when the pair met for fewer legal balls than the sample
    threshold, produced no runs, or leaves zero spread after flooring.
    The pair's r and avg get the pair's own quality weight, constant
    within the pair, so the floored average only shifts when the pair
    has no dismissal.
    """
    if row.balls < config.min_balls_pair:
        return None
    runs = row.runs + (row.extras if perspective == PERSPECTIVE_BOWLER else 0)
    if runs <= 0 or row.balls <= 0:
        return None
    if perspective == PERSPECTIVE_BATSMAN:
        w_run = quality_weight(own_average, opponent_average, perspective)
    else:
        w_run = quality_weight(opponent_average, own_average, perspective)
    w_out = w_run
    if perspective == PERSPECTIVE_BOWLER and config.invert_bowler_dismissal_weight:
        w_out = 1.0 / w_run
    phi_r = w_run * runs / row.balls
    phi_avg = w_run * runs / max(w_out * row.outs, config.dismissal_floor)
    moments = innings_moments(InningsModel(
        phi_r, phi_avg, config.balls_per_innings, config.wickets_per_innings))
    if moments.sigma_runs < config.sigma_floor:
        return None
    return (moments.e_runs - phi_avg) / moments.sigma_runs


def build_level1(player_id: str, role: str, entries: dict[int, float | None],
                 dimension: int) -> EmbeddingL1:
    """Assemble a level-1 vector from {opposite index (1-based): phi}."""
    values = np.zeros(dimension, dtype=np.float64)
    for index, phi in entries.items():
        if phi is not None:
            values[index - 1] = phi
    return EmbeddingL1(player_id, role, values)


def build_level2(player_id: str, role: str, entries: dict[int, float | None],
                 career_phi: float, dimension: int,
                 config: EngineConfig = DEFAULT_CONFIG) -> EmbeddingL2:
    """Ternary dominance pattern from pairwise indices vs the career index.

    Weak means the pairwise index dropped more than ``weakness_drop``
    (relative, sign-aware) below the career index; pairs without a
    qualifying sample stay unknown.
    """
    if career_phi is None:
        raise UnrateableError(f"{player_id}: career index undefined")
    if career_phi > 0:
        threshold = (1.0 - config.weakness_drop) * career_phi
    else:
        threshold = career_phi - config.weakness_drop * abs(career_phi)
    values = np.full(dimension, UNKNOWN, dtype=np.int8)
    for index, phi in entries.items():
        if phi is None:
            continue
        values[index - 1] = WEAK if phi < threshold else NOT_WEAK
    return EmbeddingL2(player_id, role, values)


def similarity_l1(a: EmbeddingL1, b: EmbeddingL1,
                  config: EngineConfig = DEFAULT_CONFIG) -> float | None:
    """Cosine similarity over indices nonzero in both vectors.

    Zeros encode absence of data, not performance, so they are excluded;
    below ``min_overlap`` common indices the similarity is undefined.
    """
    if a.role != b.role:
        raise ValueError(f"role mismatch: {a.role} vs {b.role}")
    common = (a.values != 0) & (b.values != 0)
    if int(common.sum()) < config.min_overlap:
        return None
    va = a.values[common]
    vb = b.values[common]
    denom = float(np.linalg.norm(va) * np.linalg.norm(vb))
    if denom == 0.0:
        return None
    return float(np.clip(np.dot(va, vb) / denom, -1.0, 1.0))


def similarity_l2(a: EmbeddingL2, b: EmbeddingL2) -> float | None:
    """Agreement fraction over indices known in both patterns."""
    if a.role != b.role:
        raise ValueError(f"role mismatch: {a.role} vs {b.role}")
    known = (a.values != UNKNOWN) & (b.values != UNKNOWN)
    total = int(known.sum())
    if total == 0:
        return None
    return float(np.sum(a.values[known] == b.values[known]) / total)


def cluster(embeddings: dict[str, EmbeddingL1], *,
            n_clusters: int | None = None, cutoff: float | None = None,
            config: EngineConfig = DEFAULT_CONFIG) -> dict[str, int]:
    """Deterministic agglomerative (average-linkage) clustering.

    Distance is 1 - similarity_l1; undefined similarities count as the
    maximum distance 2.0. Players are processed in canonical id order and
    cluster labels are renumbered by first member, so repeated runs are
    identical. Pass either ``n_clusters`` or a distance ``cutoff``
    (default: config.cluster_cutoff).
    """
    ids = sorted(embeddings)
    if n_clusters is not None and len(ids) < n_clusters:
        raise ValueError(f"need at least {n_clusters} embeddable players, have {len(ids)}")
    if len(ids) < 2:
        return {pid: 1 for pid in ids}
    n = len(ids)
    condensed = []
    for i in range(n):
        for j in range(i + 1, n):
            sim = similarity_l1(embeddings[ids[i]], embeddings[ids[j]], config)
            condensed.append(2.0 if sim is None else 1.0 - sim)
    tree = linkage(np.asarray(condensed), method="average")
    if n_clusters is not None:
        raw = fcluster(tree, t=n_clusters, criterion="maxclust")
    else:
        raw = fcluster(tree, t=config.cluster_cutoff if cutoff is None else cutoff,
                       criterion="distance")
    relabel: dict[int, int] = {}
    assignment: dict[str, int] = {}
    for pid, label in zip(ids, raw):
        if label not in relabel:
            relabel[label] = len(relabel) + 1
        assignment[pid] = relabel[label]
    return assignment


@dataclass(frozen=True)
class ReplacementCandidate:
    player_id: str
    similarity: float
    basis: str  # 'l1' or 'l2'


def like_for_like(player_id: str, pool: list[str],
                  l1: dict[str, EmbeddingL1], l2: dict[str, EmbeddingL2],
                  config: EngineConfig = DEFAULT_CONFIG) -> list[ReplacementCandidate]:
    """Rank replacement candidates by similarity to the given player.

    Scores use level-1 cosine similarity, falling back to the level-2
    agreement fraction when level-1 is undefined; candidates with neither
    defined are dropped. An empty pool is an error; an all-undefined pool
    yields an empty ranking (the caller surfaces the diagnostic).
    """
    if not pool:
        raise ValueError("empty candidate pool")
    target_l1 = l1.get(player_id)
    target_l2 = l2.get(player_id)
    ranked = []
    for cand in sorted(set(pool)):
        score = None
        basis = "l1"
        if target_l1 is not None and cand in l1:
            score = similarity_l1(target_l1, l1[cand], config)
        if score is None and target_l2 is not None and cand in l2:
            l2_score = similarity_l2(target_l2, l2[cand])
            if l2_score is not None:
                score, basis = l2_score, "l2"
        if score is not None:
            ranked.append(ReplacementCandidate(cand, score, basis))
    ranked.sort(key=lambda c: (-c.similarity, c.player_id))
    return ranked
