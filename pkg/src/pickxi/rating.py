"""Bernoulli innings model and the quality-weighted player index.

Every delivery is a Bernoulli trial: with probability r/avg the batsman
is dismissed, otherwise r runs are scored. An innings for a team of 11
replicas of one player ends at 10 wickets or 300 balls. The closed-form
expectation splits into the all-out part (10th wicket on ball b, runs
r*(b-10)) and the not-out part (w < 10 wickets over 300 balls, runs
r*(300-w)).

The second moment uses the squared run totals with the same outcome
probabilities, so sigma = sqrt(E[X^2] - E[X]^2) is a true standard
deviation; a Monte-Carlo simulator of the same ball process serves as an
independent check of both moments.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .config import DEFAULT_CONFIG, EngineConfig
from .errors import UnrateableError

PERSPECTIVE_BATSMAN = "batsman"
PERSPECTIVE_BOWLER = "bowler"


@dataclass(frozen=True)
class InningsModel:
    """Per-ball scoring rate and runs-per-dismissal average.

    ``r`` is runs per ball, ``avg`` runs per dismissal; the dismissal
    probability r/avg is clamped into [0, 1] (weighted or floored inputs
    can push it past 1; a diagnostic warning is emitted).
    """

    r: float
    avg: float
    balls_total: int = 300
    wickets_total: int = 10

    def __post_init__(self):
        if self.r <= 0 or self.avg <= 0:
            raise ValueError(f"r and avg must be positive, got r={self.r} avg={self.avg}")

    @property
    def clamped(self) -> bool:
        return self.r / self.avg > 1.0

    @property
    def dismissal_prob(self) -> float:
        return min(self.r / self.avg, 1.0)

    @property
    def survival_prob(self) -> float:
        return 1.0 - self.dismissal_prob


@dataclass(frozen=True)
class InningsMoments:
    e_runs: float
    e_runs2: float
    sigma_runs: float
    p_allout: float


def dismissal_probability(r: float, avg: float) -> float:
    """Per-ball dismissal probability r/avg, clamped to 1 with a warning."""
    if r <= 0 or avg <= 0:
        raise ValueError(f"r and avg must be positive, got r={r} avg={avg}")
    q = r / avg
    if q > 1.0:
        warnings.warn(f"dismissal probability r/avg = {q:.4g} clamped to 1.0",
                      stacklevel=2)
        return 1.0
    return q


def innings_moments(model: InningsModel) -> InningsMoments:
    """Closed-form innings mean, second moment, spread, and all-out mass.

    Outcome probabilities are evaluated in log space and summed with
    compensated summation, so extreme survival probabilities neither
    underflow nor lose the sum-to-one normalization.
    """
    q = model.dismissal_prob
    p = 1.0 - q
    r = model.r
    balls = model.balls_total
    wkts = model.wickets_total

    if q == 0.0:
        e = r * balls
        return InningsMoments(e, e * e, 0.0, 0.0)
    if q == 1.0:
        return InningsMoments(0.0, 0.0, 0.0, 1.0)

    logp = math.log(p)
    logq = math.log(q)

    # All out: 10th wicket on ball b, b in [wkts, balls]; in the first
    # b-1 balls exactly wkts-1 wickets fell.
    b = np.arange(wkts, balls + 1, dtype=np.float64)
    log_prob_allout = (gammaln(b) - gammaln(wkts) - gammaln(b - wkts + 1)
                       + (b - wkts) * logp + wkts * logq)
    prob_allout = np.exp(log_prob_allout)
    runs_allout = r * (b - wkts)

    # Not out: w wickets over the full allocation, w in [0, wkts-1].
    w = np.arange(0, wkts, dtype=np.float64)
    log_prob_notout = (gammaln(balls + 1) - gammaln(w + 1) - gammaln(balls - w + 1)
                       + (balls - w) * logp + w * logq)
    prob_notout = np.exp(log_prob_notout)
    runs_notout = r * (balls - w)

    p_allout = math.fsum(prob_allout)
    e_runs = math.fsum([*(prob_allout * runs_allout),
                        *(prob_notout * runs_notout)])
    e_runs2 = math.fsum([*(prob_allout * runs_allout ** 2),
                         *(prob_notout * runs_notout ** 2)])
    var = e_runs2 - e_runs * e_runs
    if var < -1e-9:
        raise ArithmeticError(f"negative variance {var} from moment sums")
    return InningsMoments(e_runs, e_runs2, math.sqrt(max(var, 0.0)),
                          min(p_allout, 1.0))


def outcome_distribution(model: InningsModel):
    """(all-out probabilities by ball, not-out probabilities by wickets).

    Exposed for normalization checks: the two arrays together sum to 1.
    """
    q = model.dismissal_prob
    p = 1.0 - q
    balls, wkts = model.balls_total, model.wickets_total
    b = np.arange(wkts, balls + 1, dtype=np.float64)
    w = np.arange(0, wkts, dtype=np.float64)
    if q == 0.0:
        allout = np.zeros_like(b)
        notout = np.zeros_like(w)
        notout[0] = 1.0
        return allout, notout
    if q == 1.0:
        allout = np.zeros_like(b)
        allout[0] = 1.0
        return allout, np.zeros_like(w)
    logp, logq = math.log(p), math.log(q)
    allout = np.exp(gammaln(b) - gammaln(wkts) - gammaln(b - wkts + 1)
                    + (b - wkts) * logp + wkts * logq)
    notout = np.exp(gammaln(balls + 1) - gammaln(w + 1) - gammaln(balls - w + 1)
                    + (balls - w) * logp + w * logq)
    return allout, notout


# -- Monte-Carlo oracle ------------------------------------------------------


def simulate_innings(model: InningsModel, seed: int) -> float:
    """One innings simulated ball by ball; returns total runs."""
    rng = np.random.default_rng(seed)
    q = model.dismissal_prob
    runs = 0.0
    wickets = 0
    for _ in range(model.balls_total):
        if wickets >= model.wickets_total:
            break
        if rng.random() < q:
            wickets += 1
        else:
            runs += model.r
    return runs


@dataclass(frozen=True)
class MonteCarloMoments:
    mean: float
    std: float
    stderr: float
    trials: int


def estimate_moments(model: InningsModel, trials: int, seed: int,
                     chunk: int = 1 << 18) -> MonteCarloMoments:
    """Ensemble mean/std/standard-error over simulated innings.

    Trials are partitioned into fixed-size chunks whose generators are
    spawned from the master seed, so the estimate is reproducible and
    independent of how partitions are scheduled. Each innings draws the
    ball number of every wicket via its geometric inter-wicket gap --
    the same per-ball Bernoulli process as simulate_innings, aggregated
    at wicket times (cross-checked against the literal per-ball loop in
    the test suite).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    q = model.dismissal_prob
    r = model.r
    balls, wkts = model.balls_total, model.wickets_total
    if q == 0.0:
        mean = r * balls
        return MonteCarloMoments(mean, 0.0, 0.0, trials)
    seeds = np.random.SeedSequence(seed).spawn((trials + chunk - 1) // chunk)
    total = 0.0
    total_sq = 0.0
    done = 0
    for part, child in enumerate(seeds):
        m = min(chunk, trials - part * chunk)
        rng = np.random.default_rng(child)
        gaps = rng.geometric(q, size=(m, wkts))  # balls up to & incl. each wicket
        fall = np.cumsum(gaps, axis=1)           # ball number of k-th wicket
        allout = fall[:, -1] <= balls
        scoring = np.where(allout, fall[:, -1] - wkts,
                           balls - np.sum(fall <= balls, axis=1))
        runs = r * scoring.astype(np.float64)
        total += float(runs.sum())
        total_sq += float((runs * runs).sum())
        done += m
    mean = total / done
    var = max(total_sq / done - mean * mean, 0.0)
    std = math.sqrt(var)
    if done > 1:  # unbiased scale-up for the ensemble spread
        std = math.sqrt(var * done / (done - 1))
    return MonteCarloMoments(mean, std, std / math.sqrt(done), done)


# -- quality weighting -------------------------------------------------------


def quality_weight(c_batsman: float, c_bowler: float, perspective: str) -> float:
    """Opposition-quality ratio: C_batsman/C_bowler from the batsman's
    perspective, its reciprocal from the bowler's."""
    if c_batsman <= 0 or c_bowler <= 0:
        raise ValueError("career averages must be positive, got "
                         f"c_batsman={c_batsman} c_bowler={c_bowler}")
    if perspective == PERSPECTIVE_BATSMAN:
        return c_batsman / c_bowler
    if perspective == PERSPECTIVE_BOWLER:
        return c_bowler / c_batsman
    raise ValueError(f"perspective must be 'batsman' or 'bowler', got {perspective!r}")


@dataclass(frozen=True)
class MatchupRow:
    """One opponent's head-to-head totals as seen from the rated player."""

    opponent_id: str
    balls: int
    runs: int
    outs: int
    extras: int = 0


@dataclass(frozen=True)
class WeightedProfile:
    """Quality-weighted runs per ball and runs per dismissal."""

    player_id: str
    perspective: str
    phi_r: float
    phi_avg: float
    balls: int
    outs: int
    opponents: int
    weighted: bool = True


def weighted_profile(player_id: str, perspective: str, rows: list[MatchupRow],
                     own_average: float, opponent_averages: dict[str, float],
                     config: EngineConfig = DEFAULT_CONFIG, *,
                     weighted: bool = True) -> WeightedProfile:
    """Blend head-to-head totals into a quality-weighted r and avg.

    phi_r  = sum_j w_j * runs_j / sum_j balls_j
    phi_avg = sum_j w_j * runs_j / max(sum_j w_j * outs_j, dismissal floor)

    For bowlers, runs include the extras conceded in each matchup. With
    ``weighted=False`` every weight is 1 and extras are dropped: the
    unweighted pure-quantity baseline pipeline.
    """
    if not rows:
        raise UnrateableError(f"{player_id}: no matchup data to rate")
    sum_balls = 0
    sum_outs = 0
    wruns = []
    wouts = []
    for row in rows:
        runs = row.runs
        if weighted and perspective == PERSPECTIVE_BOWLER:
            runs += row.extras
        if weighted:
            opp_avg = opponent_averages[row.opponent_id]
            if perspective == PERSPECTIVE_BATSMAN:
                w_run = quality_weight(own_average, opp_avg, perspective)
            else:
                w_run = quality_weight(opp_avg, own_average, perspective)
            w_out = w_run
            if (perspective == PERSPECTIVE_BOWLER
                    and config.invert_bowler_dismissal_weight):
                w_out = 1.0 / w_run
        else:
            w_run = w_out = 1.0
        sum_balls += row.balls
        sum_outs += row.outs
        wruns.append(w_run * runs)
        wouts.append(w_out * row.outs)
    total_wruns = math.fsum(wruns)
    total_wouts = math.fsum(wouts)
    if sum_balls <= 0 or total_wruns <= 0:
        raise UnrateableError(f"{player_id}: no scoring data to rate")
    phi_r = total_wruns / sum_balls
    phi_avg = total_wruns / max(total_wouts, config.dismissal_floor)
    return WeightedProfile(player_id, perspective, phi_r, phi_avg,
                           sum_balls, sum_outs, len(rows), weighted)


@dataclass(frozen=True)
class RatingRecord:
    """Standardized quality index plus the unweighted baseline."""

    player_id: str
    role: str
    phi_player: float | None
    baseline_rating: float | None = None
    period: int | None = None
    balls: int = 0
    outs: int = 0


def quality_index(profile: WeightedProfile,
                  config: EngineConfig = DEFAULT_CONFIG) -> RatingRecord:
    """(E[runs] - phi_avg) / sigma for the profile's innings model.

    Degenerate spreads (sigma below the floor) mark the player
    unrateable rather than dividing.
    """
    model = InningsModel(profile.phi_r, profile.phi_avg,
                         config.balls_per_innings, config.wickets_per_innings)
    moments = innings_moments(model)
    if moments.sigma_runs < config.sigma_floor:
        raise UnrateableError(
            f"{profile.player_id}: sigma {moments.sigma_runs:.3g} below floor")
    value = (moments.e_runs - profile.phi_avg) / moments.sigma_runs
    return RatingRecord(profile.player_id, profile.perspective, value,
                        balls=profile.balls, outs=profile.outs)


def normalize_series(values: list[float]) -> list[float]:
    """Min-max normalize to [0, 1]; a constant or single-point series maps to 1.0."""
    if not values:
        return []
    lo, hi = min(values), max(values)
    if hi - lo < 1e-300:
        return [1.0 for _ in values]
    return [(v - lo) / (hi - lo) for v in values]
