"""Read-only HTTP service over one immutable snapshot.

The service and the CLI call the same Engine, so identical inputs give
identical recommendations on both surfaces. Requests never mutate the
snapshot; thresholds can be overridden per request and are echoed back
in every recommendation response. Reloading a new snapshot requires a
process restart.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .config import DEFAULT_CONFIG, EngineConfig
from .engine import Engine
from .errors import (ConstraintError, InfeasibleError, PickxiError,
                     UnknownPlayerError, UnrateableError)
from .recommend import Composition

_L2_NAMES = {0: "weak", 1: "not-weak", -1: "unknown"}


class CompositionBody(BaseModel):
    batsman: int = 0
    bowler: int = 0
    wicketkeeper: int = 0
    batting_allrounder: int = 0
    bowling_allrounder: int = 0


class RecommendRequest(BaseModel):
    pool: list[str]
    opposition: list[str]
    composition: CompositionBody
    locked: list[str] = Field(default_factory=list)
    excluded: list[str] = Field(default_factory=list)
    overrides: dict = Field(default_factory=dict)
    squad_size: int = 11


def _http_error(exc: PickxiError) -> HTTPException:
    detail = {"error": exc.error_class, "message": str(exc)}
    if isinstance(exc, ConstraintError):
        detail["rule"] = exc.rule
        return HTTPException(status_code=422, detail=detail)
    if isinstance(exc, InfeasibleError):
        detail["slot"] = exc.slot
        return HTTPException(status_code=409, detail=detail)
    if isinstance(exc, (UnknownPlayerError, UnrateableError)):
        return HTTPException(status_code=404, detail=detail)
    return HTTPException(status_code=500, detail=detail)


def create_app(snapshot, config: EngineConfig = DEFAULT_CONFIG,
               static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="pickxi", version="0.1.0")
    engine = Engine(snapshot, config)

    @app.exception_handler(PickxiError)
    async def _pickxi_error(request, exc: PickxiError):
        http = _http_error(exc)
        return JSONResponse(status_code=http.status_code, content=http.detail)

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "players": len(snapshot.player_ids),
            "matches": snapshot.metadata.get("matches", 0),
            "format_version": 1,
        }

    @app.get("/players")
    def players():
        registry = snapshot.registry
        return [{
            "id": pid,
            "name": info.name,
            "country": info.country,
            "role": info.role,
            "batsman_index": registry.batsman_index.get(pid),
            "bowler_index": registry.bowler_index.get(pid),
        } for pid, info in sorted(registry.players.items())]

    @app.get("/players/{player_id}/rating")
    def rating(player_id: str, year: int | None = None,
               side: str = Query("batting", pattern="^(batting|bowling)$")):
        snapshot.registry.require(player_id)
        record = engine.rating_record(player_id, side, year=year)
        stats = engine.career(player_id)
        return {
            "player": player_id,
            "side": side,
            "period": year,
            "phi_player": record.phi_player,
            "baseline": record.baseline_rating,
            "batting_rateable": stats.batting_rateable,
            "bowling_rateable": stats.bowling_rateable,
        }

    @app.get("/players/{player_id}/embedding")
    def embedding(player_id: str, level: int = Query(1, ge=1, le=2),
                  side: str = Query("batting", pattern="^(batting|bowling)$")):
        snapshot.registry.require(player_id)
        registry = snapshot.registry
        opposite = (registry.bowlers_by_index() if side == "batting"
                    else registry.batsmen_by_index())
        if level == 1:
            values = engine.level1(player_id, side).values
            entries = [{"index": i + 1, "opponent": opposite[i],
                        "value": float(v)}
                       for i, v in enumerate(values)]
        else:
            values = engine.level2(player_id, side).values
            entries = [{"index": i + 1, "opponent": opposite[i],
                        "state": _L2_NAMES[int(v)]}
                       for i, v in enumerate(values)]
        return {"player": player_id, "side": side, "level": level,
                "entries": entries}

    @app.get("/matchups/{batsman_id}/{bowler_id}")
    def matchup(batsman_id: str, bowler_id: str):
        stats = snapshot.head_to_head(batsman_id, bowler_id)
        return {
            "batsman": batsman_id,
            "bowler": bowler_id,
            "balls": stats.balls,
            "runs": stats.runs,
            "outs": stats.outs,
            "extras": stats.extras,
            "pairwise_phi_batting": engine.pairwise(batsman_id, bowler_id,
                                                    "batsman"),
            "pairwise_phi_bowling": engine.pairwise(batsman_id, bowler_id,
                                                    "bowler"),
        }

    @app.post("/recommend")
    def recommend(request: RecommendRequest):
        request_engine = engine
        if request.overrides:
            try:
                overridden = config.override(**request.overrides)
            except TypeError as exc:
                raise ConstraintError("config-override", str(exc)) from exc
            request_engine = Engine(snapshot, overridden)
        body = request.composition
        composition = Composition(
            batsman=body.batsman, bowler=body.bowler,
            wicketkeeper=body.wicketkeeper,
            batting_allrounder=body.batting_allrounder,
            bowling_allrounder=body.bowling_allrounder)
        rec = request_engine.recommend(
            request.pool, request.opposition, composition,
            locked=tuple(request.locked), excluded=tuple(request.excluded),
            squad_size=request.squad_size)
        return rec.to_dict()

    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=static_dir, html=True),
                  name="console")

    return app
