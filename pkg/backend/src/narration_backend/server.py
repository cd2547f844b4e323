"""HTTP serving of the t3/1 wire contract.

Two engines sit behind the same app: the stub (a deterministic canonical
echo of the payload, for integration tests) and a trained model artifact.
Long inputs are chunked at triple boundaries, generated per chunk, and the
chunk narratives joined with sentence spacing.

Contract:
  POST /narrate  {version: "t3/1", linearized, decoding{strategy,k,p,seed,max_tokens}}
    200 {version, narrative, model_id, token_count}
    400 {error: "invalid_request", detail}     503 {error: "model_unavailable"}
  GET /health    200 {status: "ok", model_id} once ready, else 503
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import WIRE_VERSION
from .linearize import MalformedRecord, chunk_linearized, parse_linearized
from .model import GenerationSettings, TrainedModel

_STRATEGIES = ("basic", "top_k", "top_p")

_DECODING_DEFAULTS = {"strategy": "top_p", "k": 50, "p": 0.92, "seed": 0,
                      "max_tokens": 256}


class StubEngine:
    """Echoes a canonical realization: 'head relation tail.' per triple."""

    model_id = "stub-echo-1"
    ready = True

    def generate(self, linearized: str, settings: GenerationSettings) -> str:
        triples = parse_linearized(linearized)
        return " ".join(f"{h} {r} {t}." for h, r, t in triples)


class ModelEngine:
    def __init__(self, artifact_dir):
        self.model = TrainedModel.load(artifact_dir)
        self.model_id = self.model.model_id
        self.ready = True

    def generate(self, linearized: str, settings: GenerationSettings) -> str:
        chunks = chunk_linearized(linearized, self.model.max_length)
        pieces = []
        for index, chunk in enumerate(chunks):
            chunk_settings = GenerationSettings(
                strategy=settings.strategy, k=settings.k, p=settings.p,
                seed=settings.seed + index, max_tokens=settings.max_tokens,
            )
            pieces.append(self.model.generate(chunk, chunk_settings))
        return " ".join(pieces)


class NotReadyEngine:
    """Placeholder while no model is loaded; everything answers 503."""

    model_id = None
    ready = False

    def generate(self, linearized, settings):  # pragma: no cover - guarded
        raise RuntimeError("engine not ready")


def _bad_request(detail: str) -> JSONResponse:
    return JSONResponse(status_code=400,
                        content={"error": "invalid_request", "detail": detail})


def _unavailable() -> JSONResponse:
    return JSONResponse(status_code=503, content={"error": "model_unavailable"})


def _parse_decoding(raw) -> GenerationSettings | str:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        return "decoding must be an object"
    merged = {**_DECODING_DEFAULTS, **raw}
    unknown = set(merged) - set(_DECODING_DEFAULTS)
    if unknown:
        return f"unknown decoding fields: {sorted(unknown)}"
    strategy = merged["strategy"]
    if strategy not in _STRATEGIES:
        return f"strategy must be one of {_STRATEGIES}"
    if not isinstance(merged["k"], int) or isinstance(merged["k"], bool) or merged["k"] < 1:
        return "k must be a positive integer"
    p = merged["p"]
    if not isinstance(p, (int, float)) or isinstance(p, bool) or not 0 < float(p) <= 1:
        return "p must be in (0, 1]"
    if not isinstance(merged["seed"], int) or isinstance(merged["seed"], bool):
        return "seed must be an integer"
    max_tokens = merged["max_tokens"]
    if not isinstance(max_tokens, int) or isinstance(max_tokens, bool) or max_tokens < 1:
        return "max_tokens must be a positive integer"
    return GenerationSettings(strategy=strategy, k=merged["k"], p=float(p),
                              seed=merged["seed"], max_tokens=max_tokens)


def create_app(engine) -> FastAPI:
    app = FastAPI(title="narration-backend", docs_url=None, redoc_url=None)

    @app.get("/health")
    def health():
        if not engine.ready:
            return _unavailable()
        return {"status": "ok", "model_id": engine.model_id}

    @app.post("/narrate")
    async def narrate(request: Request):
        if not engine.ready:
            return _unavailable()
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError:
            return _bad_request("request body is not valid JSON")
        if not isinstance(body, dict):
            return _bad_request("request body must be an object")
        if body.get("version") != WIRE_VERSION:
            return _bad_request(f"version must be {WIRE_VERSION!r}")
        linearized = body.get("linearized")
        if not isinstance(linearized, str) or not linearized.strip():
            return _bad_request("linearized must be a non-empty string")
        settings = _parse_decoding(body.get("decoding"))
        if isinstance(settings, str):
            return _bad_request(settings)
        try:
            text = engine.generate(linearized, settings)
        except MalformedRecord as exc:
            return _bad_request(f"linearized payload malformed: {exc}")
        return {
            "version": WIRE_VERSION,
            "narrative": text,
            "model_id": engine.model_id,
            "token_count": len(text.split()),
        }

    return app
