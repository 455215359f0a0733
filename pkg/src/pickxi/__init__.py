"""Quality-weighted cricket ratings, matchup embeddings, and XI selection."""

from .config import DEFAULT_CONFIG, EngineConfig
from .cricsheet import Delivery, MatchRecord, parse_match
from .embedding import (EmbeddingL1, EmbeddingL2, cluster, like_for_like,
                        pairwise_phi, similarity_l1, similarity_l2)
from .engine import (Engine, TournamentReport, composition_of_xi,
                     evaluate_tournament)
from .errors import (ConstraintError, InfeasibleError, ParseError, PickxiError,
                     RosterError, SnapshotFormatError, SnapshotIntegrityError,
                     UnknownPlayerError, UnrateableError)
from .rating import (InningsModel, InningsMoments, MatchupRow, RatingRecord,
                     WeightedProfile, dismissal_probability, estimate_moments,
                     innings_moments, quality_index, quality_weight,
                     simulate_innings, weighted_profile)
from .recommend import (BipartiteGraph, Composition, Edge, Fixture,
                        RankedCandidate, Recommendation, delta_ordering,
                        lineup_similarity, parse_fixtures, select_team)
from .roster import RosterEntry, parse_roster, read_roster
from .snapshot import (CareerStats, MatchupStats, PlayerRegistry, Snapshot,
                       build_registry, ingest)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
