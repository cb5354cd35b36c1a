"""HTTP reward service for external RL training loops.

Endpoints:
    POST /v1/reward   score a group of candidates against a reference
    GET  /v1/health   liveness probe with package version
    GET  /v1/config   effective default reward configuration

Reference concept vectors are cached by content hash (plus the config
fields that influence them) with LRU eviction, since they are
deterministic and the same reference recurs on every training step.
Error bodies are ``{"error": {"code": ..., "message": ...}}``.
"""

from __future__ import annotations

import threading
import time
from collections import OrderedDict
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .concepts import ConceptVector
from .grammar import Grammar, default_grammar, load_grammar_path
from .rewards import GroundTruthError, RewardConfig, score_candidates, text_seed


class RewardRequest(BaseModel):
    reference: str = Field(min_length=1)
    candidates: list[str] = Field(min_length=1)
    config: dict[str, Any] | None = None
    seed: int | None = None
    request_id: str | None = None


class RewardResponse(BaseModel):
    breakdowns: list[dict]
    advantages: list[float]
    reference_concepts: dict
    cache_hit: bool
    elapsed_ms: float
    request_id: str | None = None


class _ConceptCache:
    """Thread-safe LRU cache of reference concept vectors."""

    def __init__(self, max_entries: int = 256):
        self._max = max_entries
        self._lock = threading.Lock()
        self._entries: OrderedDict[tuple, ConceptVector] = OrderedDict()

    def get(self, key: tuple) -> ConceptVector | None:
        with self._lock:
            value = self._entries.get(key)
            if value is not None:
                self._entries.move_to_end(key)
            return value

    def put(self, key: tuple, value: ConceptVector) -> None:
        with self._lock:
            self._entries[key] = value
            self._entries.move_to_end(key)
            while len(self._entries) > self._max:
                self._entries.popitem(last=False)


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})


def create_app(
    grammar: Grammar | None = None,
    config: RewardConfig | None = None,
    cache_entries: int = 256,
) -> FastAPI:
    grammar = grammar if grammar is not None else default_grammar()
    defaults = config if config is not None else RewardConfig()
    cache = _ConceptCache(cache_entries)
    app = FastAPI(title="ludilite reward service", version=__version__)

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return _error(400, "validation-error", str(exc.errors()))

    @app.get("/v1/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.get("/v1/config")
    def effective_config() -> dict:
        return defaults.to_dict()

    @app.post("/v1/reward")
    def reward(request: RewardRequest):
        started = time.monotonic()
        try:
            cfg = defaults.with_overrides(request.config)
        except ValueError as e:
            return _error(400, "validation-error", str(e))
        cache_key = (
            text_seed(request.reference, request.seed),
            cfg.playouts_gt,
            cfg.max_turns,
            cfg.budget_secs,
            cfg.probe_seeds,
        )
        gt_concepts = cache.get(cache_key)
        cache_hit = gt_concepts is not None
        try:
            result = score_candidates(
                request.reference,
                request.candidates,
                grammar,
                cfg,
                salt=request.seed,
                gt_concepts=gt_concepts,
            )
        except GroundTruthError as e:
            return _error(422, "reference-not-functional", str(e))
        if not cache_hit:
            cache.put(cache_key, result.reference_concepts)
        return RewardResponse(
            breakdowns=[b.to_dict() for b in result.breakdowns],
            advantages=list(result.advantages),
            reference_concepts=result.reference_concepts.to_dict(),
            cache_hit=cache_hit,
            elapsed_ms=1000.0 * (time.monotonic() - started),
            request_id=request.request_id,
        )

    return app


def serve(
    host: str = "127.0.0.1",
    port: int = 8000,
    grammar_path: str | None = None,
    config: RewardConfig | None = None,
) -> None:
    """Run the reward service until interrupted.

    Startup problems (unreadable grammar, busy port) raise immediately.
    """
    import uvicorn

    grammar = load_grammar_path(grammar_path) if grammar_path else default_grammar()
    app = create_app(grammar, config)
    uvicorn.run(app, host=host, port=port, log_level="info")
