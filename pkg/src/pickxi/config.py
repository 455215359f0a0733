"""Tunable thresholds with documented defaults.

Every number the pipeline depends on lives here so that CLI flags,
service requests, and tests can override them and have the values
echoed back alongside results.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict, replace


@dataclass(frozen=True)
class EngineConfig:
    # Career sample-size gate: a player needs this many balls (faced for
    # batting, bowled for bowling) before career ratings are reported.
    min_career_balls: int = 300
    # Zero-dismissal records use avg = runs / max(outs, dismissal_floor)
    # so never-dismissed players keep a finite, rewarding average.
    dismissal_floor: float = 0.5
    # Ratings are standardized scores; below this spread the player is
    # flagged unrateable instead of dividing by ~0.
    sigma_floor: float = 1e-9
    # Head-to-head pairs need this many legal balls before a pairwise
    # rating (and hence an embedding entry) is defined.
    min_balls_pair: int = 12
    # Dominance entries: pairwise rating below (1 - weakness_drop) of the
    # career rating marks the pair as weak (sign-aware for negatives).
    weakness_drop: float = 0.25
    # Cosine similarity over commonly-defined embedding indices needs at
    # least this much overlap to mean anything.
    min_overlap: int = 3
    # Similarity at or above this links a candidate to an opponent
    # weakness when building the matchup graph.
    l1_threshold: float = 0.7
    # Default distance cutoff for agglomerative clustering; distances are
    # 1 - cosine similarity, so this mirrors l1_threshold.
    cluster_cutoff: float = 0.3
    # Candidates need at least two graph edges with nonzero spread for a
    # mean/std score; everyone else falls back to mean edge weight.
    delta_min_edges: int = 2
    delta_sigma_floor: float = 1e-9
    # The printed weight convention ties a bowler's dismissal weight to
    # C_bowler / C_batsman. Setting this flips the dismissal weight to
    # C_batsman / C_bowler (rewarding wickets of strong batsmen) for
    # sensitivity analysis. Off by default.
    invert_bowler_dismissal_weight: bool = False
    # ODI innings geometry.
    balls_per_innings: int = 300
    wickets_per_innings: int = 10

    def to_dict(self) -> dict:
        return asdict(self)

    def override(self, **kwargs) -> "EngineConfig":
        """Return a copy with the given fields replaced; unknown keys raise."""
        return replace(self, **kwargs)


DEFAULT_CONFIG = EngineConfig()
