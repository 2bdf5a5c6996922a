"""Session-oriented HTTP API for driving a validation loop.

Sessions persist as append-only JSON-lines logs under
``<data_dir>/sessions/``; in-memory state is a pure fold over the log,
so a restart replays to an identical state. One writer per session is
enforced with a session token; metrics reads are unauthenticated
snapshots. Payload schemas are frozen in docs/api.md.
"""

from __future__ import annotations

import json
import secrets
import time
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException, Header
from pydantic import BaseModel, Field

from .calibration import CalibrationModel, CvScores, calibrate_sigma_macro, calibrate_sigma_micro, default_grid
from .dataio import DatasetBundle, load_estimates, load_labels, load_scores
from .errors import ConfigurationError, DataError, ProtocolError, ValirankError
from .ranking import Strategy, ValidationSession, method_config

__all__ = ["create_app"]


class BundleSpec(BaseModel):
    """File references, resolved relative to the service data directory."""

    scores: str
    gold: str | None = None
    estimates: str | None = None
    train_size: int | None = None
    cv_scores: str | None = None
    train_labels: str | None = None
    folds: int = 10


class ConfigSpec(BaseModel):
    method: str = "utheoretic"
    strategy: str = "static"
    averaging: str = "macro"
    beta: float = 1.0
    sigma: float | None = None
    grid: str = "1e-3:1e3:100"


class CreateSessionRequest(BaseModel):
    bundle: BundleSpec
    config: ConfigSpec


class ValidateRequest(BaseModel):
    doc_id: str
    flipped: list[str] = Field(default_factory=list)


class _SessionState:
    """Live session plus everything needed to serve metrics."""

    def __init__(self, session_id: str, token: str, session: ValidationSession,
                 config_echo: dict, log_path: Path):
        self.id = session_id
        self.token = token
        self.session = session
        self.config_echo = config_echo
        self.log_path = log_path
        self.closed = False
        self.trajectory: list[dict] = []
        self.initial_estimate = session.estimated_f_beta() or None

    @property
    def status(self) -> str:
        if self.closed:
            return "closed"
        return "exhausted" if self.session.exhausted else "active"

    def append_log(self, event: dict) -> None:
        with self.log_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")

    def record_validation(self, doc: str, flipped: list[str]) -> dict:
        self.session.apply_correction(doc, set(flipped))
        estimate = self.session.estimated_f_beta()
        self.trajectory.append({"doc_id": doc, "f_beta": estimate})
        return estimate


def _resolve_bundle(spec: BundleSpec, data_dir: Path) -> DatasetBundle:
    def path_of(rel: str) -> Path:
        p = (data_dir / rel).resolve()
        if not p.is_file():
            raise DataError(f"bundle file not found: {rel}")
        return p

    scores = load_scores(path_of(spec.scores))
    gold = load_labels(path_of(spec.gold)) if spec.gold else None
    estimates = cv = train = None
    if spec.estimates:
        if not spec.train_size:
            raise ConfigurationError("estimates require train_size")
        estimates = load_estimates(path_of(spec.estimates), spec.train_size, max(scores.n_docs, 1))
    elif spec.cv_scores and spec.train_labels:
        cv = CvScores(load_scores(path_of(spec.cv_scores)),
                      load_labels(path_of(spec.train_labels)), spec.folds)
        train = cv.labels
    return DatasetBundle(scores, gold, estimates, cv, train)


def _build_session(req: CreateSessionRequest, data_dir: Path) -> tuple[ValidationSession, dict]:
    bundle = _resolve_bundle(req.bundle, data_dir)
    cfg = req.config
    model = None
    if cfg.sigma is not None:
        model = CalibrationModel(cfg.sigma)
    elif bundle.cv is not None:
        low, high, count = cfg.grid.split(":")
        grid = default_grid(float(low), float(high), int(count))
        fit = calibrate_sigma_macro if cfg.averaging == "macro" else calibrate_sigma_micro
        model = fit(bundle.cv, grid)
    estimates = bundle.training_estimates() if cfg.method == "utheoretic" else None
    config = method_config(
        cfg.method, Strategy(cfg.strategy), cfg.averaging,
        beta=cfg.beta, model=model, estimates=estimates, gold=bundle.gold,
    )
    echo = req.config.model_dump() | {
        "sigma": model.sigma if model else None,
        "gain_rule": config.gain_rule.value,
    }
    return ValidationSession(bundle.scores, config), echo


def create_app(data_dir: str | Path, session_ttl: float | None = None) -> FastAPI:
    """Build the service app. Session logs live under data_dir/sessions."""
    data_dir = Path(data_dir)
    sessions_dir = data_dir / "sessions"
    sessions_dir.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="valirank validation sessions")
    live: dict[str, _SessionState] = {}
    last_touch: dict[str, float] = {}

    def touch(session_id: str) -> None:
        last_touch[session_id] = time.monotonic()
        if session_ttl is not None:
            for sid in [s for s, t in last_touch.items()
                        if s != session_id and time.monotonic() - t > session_ttl]:
                live.pop(sid, None)
                last_touch.pop(sid, None)

    def replay(session_id: str) -> _SessionState:
        log_path = sessions_dir / f"{session_id}.jsonl"
        if not log_path.is_file():
            raise HTTPException(404, f"unknown session {session_id}")
        state: _SessionState | None = None
        with log_path.open(encoding="utf-8") as fh:
            for line in fh:
                event = json.loads(line)
                if event["event"] == "created":
                    req = CreateSessionRequest.model_validate(event["request"])
                    session, echo = _build_session(req, data_dir)
                    state = _SessionState(session_id, event["token"], session, echo, log_path)
                elif event["event"] == "validated":
                    assert state is not None
                    state.record_validation(event["doc_id"], event["flipped"])
                elif event["event"] == "closed":
                    assert state is not None
                    state.closed = True
        if state is None:
            raise HTTPException(404, f"empty session log {session_id}")
        return state

    def get_state(session_id: str) -> _SessionState:
        touch(session_id)
        if session_id not in live:
            live[session_id] = replay(session_id)
        return live[session_id]

    def check_token(state: _SessionState, token: str | None) -> None:
        if token != state.token:
            raise HTTPException(403, "missing or invalid session token")

    @app.exception_handler(ValirankError)
    async def _domain_error(request, exc: ValirankError):  # pragma: no cover - thin shim
        raise HTTPException(400, str(exc))

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        try:
            session, echo = _build_session(req, data_dir)
        except (ConfigurationError, DataError) as exc:
            raise HTTPException(400, str(exc))
        session_id = uuid.uuid4().hex
        token = secrets.token_hex(16)
        log_path = sessions_dir / f"{session_id}.jsonl"
        state = _SessionState(session_id, token, session, echo, log_path)
        state.append_log({"event": "created", "token": token, "request": req.model_dump()})
        live[session_id] = state
        touch(session_id)
        return {"session_id": session_id, "token": token, "status": state.status}

    @app.get("/sessions/{session_id}/next")
    def next_document(session_id: str):
        state = get_state(session_id)
        if state.closed:
            raise HTTPException(409, "session is closed")
        doc = state.session.next_document()
        if doc is None:
            return {"exhausted": True, "remaining": 0}
        return {
            "exhausted": False,
            "doc_id": doc,
            "predicted_labels": state.session.predicted_labels(doc),
            "misclassification_probabilities": state.session.error_probabilities(doc),
            "remaining": state.session.remaining,
        }

    @app.post("/sessions/{session_id}/validate")
    def submit_validation(session_id: str, req: ValidateRequest,
                          x_session_token: str | None = Header(default=None)):
        state = get_state(session_id)
        check_token(state, x_session_token)
        if state.closed:
            raise HTTPException(409, "session is closed")
        unknown = [c for c in req.flipped if c not in state.session.scores.classes]
        if unknown:
            raise HTTPException(400, f"unknown classes: {unknown}")
        try:
            estimate = state.record_validation(req.doc_id, req.flipped)
        except ProtocolError as exc:
            raise HTTPException(409, str(exc))
        state.append_log(
            {"event": "validated", "doc_id": req.doc_id,
             "flipped": sorted(req.flipped), "ts": time.time()}
        )
        return {
            "f_beta": estimate,
            "remaining": state.session.remaining,
            "status": state.status,
        }

    @app.get("/sessions/{session_id}/metrics")
    def session_metrics(session_id: str):
        state = get_state(session_id)
        return {
            "status": state.status,
            "validated_count": len(state.session.visited),
            "remaining": state.session.remaining,
            "visited": list(state.session.visited),
            "trajectory": state.trajectory,
            "initial_f_beta": state.initial_estimate,
            "configuration": state.config_echo,
        }

    @app.delete("/sessions/{session_id}")
    def close_session(session_id: str,
                      x_session_token: str | None = Header(default=None)):
        state = get_state(session_id)
        check_token(state, x_session_token)
        if not state.closed:
            state.closed = True
            state.append_log({"event": "closed"})
        return {"status": "closed"}

    return app
