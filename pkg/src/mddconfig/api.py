"""HTTP facade: upload models, open interactive sessions, drive them.

The service is deliberately small: an in-memory store of compiled
artifacts, an in-memory store of sessions with a TTL, and JSON endpoints
that map one-to-one onto `Session` operations. Session snapshots are
already JSON-shaped and versioned, so responses embed them as-is.

Status codes: 400 for bad models, bad values or bad query parameters,
404 for unknown ids, 409 for operations a session's mode cannot answer
(and for full stores), 413 for oversized uploads, 422 for malformed
request shapes and blown resource limits.
"""

from __future__ import annotations

import secrets
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, Request
from pydantic import BaseModel, ConfigDict

from . import __version__
from .artifact import Artifact, compile_catalogue_doc, compile_model
from .bdd import DEFAULT_NODE_LIMIT
from .errors import LimitExceeded, ModelError, QueryError, TransitionError
from .kernels import backend_name
from .model import parse_catalogue, parse_model
from .session import Session

MAX_BODY_BYTES = 8 * 1024 * 1024
DEFAULT_TTL_S = 3600.0
MAX_MODELS = 64
MAX_SESSIONS = 256


@dataclass
class _StoredSession:
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_used: float = field(default_factory=time.monotonic)


class Store:
    """Models and sessions, in memory, with a session idle TTL."""

    def __init__(
        self,
        ttl_s: float = DEFAULT_TTL_S,
        max_models: int = MAX_MODELS,
        max_sessions: int = MAX_SESSIONS,
    ):
        self.ttl_s = ttl_s
        self.max_models = max_models
        self.max_sessions = max_sessions
        self.models: dict[str, Artifact] = {}
        self.sessions: dict[str, _StoredSession] = {}
        self._lock = threading.RLock()

    def _purge(self):
        now = time.monotonic()
        stale = [k for k, s in self.sessions.items() if now - s.last_used > self.ttl_s]
        for k in stale:
            del self.sessions[k]

    def add_model(self, artifact: Artifact) -> str:
        with self._lock:
            if len(self.models) >= self.max_models:
                raise HTTPException(409, "model store is full")
            mid = secrets.token_urlsafe(9)
            self.models[mid] = artifact
            return mid

    def get_model(self, mid: str) -> Artifact:
        with self._lock:
            art = self.models.get(mid)
        if art is None:
            raise HTTPException(404, "no such model")
        return art

    def add_session(self, session: Session) -> str:
        with self._lock:
            self._purge()
            if len(self.sessions) >= self.max_sessions:
                raise HTTPException(409, "session store is full")
            sid = secrets.token_urlsafe(9)
            self.sessions[sid] = _StoredSession(session=session)
            return sid

    def get_session(self, sid: str) -> _StoredSession:
        with self._lock:
            self._purge()
            stored = self.sessions.get(sid)
            if stored is None:
                raise HTTPException(404, "no such session")
            stored.last_used = time.monotonic()
            return stored

    def drop_session(self, sid: str):
        with self._lock:
            if sid not in self.sessions:
                raise HTTPException(404, "no such session")
            del self.sessions[sid]


class ModelUpload(BaseModel):
    model: dict | None = None
    catalogue: str | None = None
    reduce: bool = False
    node_limit: int | None = None
    time_budget: float | None = None


class SessionCreate(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    model_id: str
    mode: str = "plain"
    engine: str = "merged"
    costs: list[str] = []
    bounds: list[float] = []
    epsilon: float | None = None


class AssignBody(BaseModel):
    name: str
    value: str | int


class UnassignBody(BaseModel):
    name: str


class BoundsBody(BaseModel):
    bounds: dict[str, float]


def _model_summary(mid: str, art: Artifact) -> dict:
    return {
        "model_id": mid,
        "variables": [
            {"name": v.name, "domain": list(v.labels)} for v in art.model.variables
        ],
        "costs": sorted(art.model.costs.keys()),
        "stats": art.stats.as_dict(),
    }


def create_app(
    store: Store | None = None, max_body_bytes: int = MAX_BODY_BYTES
) -> FastAPI:
    app = FastAPI(title="mddconfig", version=__version__)
    store = store if store is not None else Store()
    app.state.store = store

    @app.exception_handler(ModelError)
    def _model_error(_req, exc: ModelError):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(TransitionError)
    def _transition_error(_req, exc: TransitionError):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(QueryError)
    def _query_error(_req, exc: QueryError):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(LimitExceeded)
    def _limit_error(_req, exc: LimitExceeded):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "version": __version__, "backend": backend_name()}

    @app.post("/models", status_code=201)
    def upload_model(body: ModelUpload, request: Request):
        length = request.headers.get("content-length")
        if length is not None and int(length) > max_body_bytes:
            raise HTTPException(413, "payload too large")
        if (body.model is None) == (body.catalogue is None):
            raise HTTPException(422, "provide exactly one of 'model' or 'catalogue'")
        if body.catalogue is not None:
            art = compile_catalogue_doc(parse_catalogue(body.catalogue), reduce=body.reduce)
        else:
            import json as _json

            model = parse_model(_json.dumps(body.model))
            art = compile_model(
                model,
                node_limit=body.node_limit or DEFAULT_NODE_LIMIT,
                time_budget=body.time_budget,
                reduce=body.reduce,
            )
        mid = store.add_model(art)
        return _model_summary(mid, art)

    @app.get("/models/{mid}/stats")
    def model_stats(mid: str):
        return _model_summary(mid, store.get_model(mid))

    @app.post("/sessions", status_code=201)
    def open_session(body: SessionCreate):
        art = store.get_model(body.model_id)
        session = Session(
            art,
            mode=body.mode,
            engine=body.engine,
            costs=body.costs,
            bounds=body.bounds,
            epsilon=body.epsilon,
        )
        sid = store.add_session(session)
        return {"session_id": sid, "model_id": body.model_id, "snapshot": session.snapshot()}

    @app.get("/sessions/{sid}")
    def read_session(sid: str):
        stored = store.get_session(sid)
        with stored.lock:
            return {"session_id": sid, "snapshot": stored.session.snapshot()}

    @app.delete("/sessions/{sid}", status_code=204)
    def close_session(sid: str):
        store.drop_session(sid)

    @app.post("/sessions/{sid}/assign")
    def assign(sid: str, body: AssignBody):
        stored = store.get_session(sid)
        with stored.lock:
            snap = stored.session.assign(body.name, body.value)
        return {"session_id": sid, "snapshot": snap}

    @app.post("/sessions/{sid}/unassign")
    def unassign(sid: str, body: UnassignBody):
        stored = store.get_session(sid)
        with stored.lock:
            snap = stored.session.unassign(body.name)
        return {"session_id": sid, "snapshot": snap}

    @app.post("/sessions/{sid}/bounds")
    def set_bounds(sid: str, body: BoundsBody):
        stored = store.get_session(sid)
        with stored.lock:
            if stored.session.mode == "plain":
                raise HTTPException(409, "session mode has no bounds")
            try:
                snap = stored.session.set_bounds(body.bounds)
            except QueryError as exc:
                raise HTTPException(422, str(exc)) from None
        return {"session_id": sid, "snapshot": snap}

    @app.get("/sessions/{sid}/frontier")
    def frontier(sid: str):
        stored = store.get_session(sid)
        with stored.lock:
            if stored.session.mode not in ("bicost", "kcost", "bicost-approx"):
                raise HTTPException(409, "session mode has no cost frontier")
            pairs = stored.session.frontier()
        return {"session_id": sid, "frontier": [list(p) for p in pairs]}

    return app


app = create_app()
