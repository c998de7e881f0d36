"""Stateful HTTP session API over the labeling loop.

Each session is one ``LabelingLoop`` plus an append-only event log; replaying
the log reconstructs the session after a restart. Mutating requests on a
session are serialized by a per-session lock.
"""

from __future__ import annotations

import json
import threading
import uuid
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .data import PredicateVocabulary, parse_dataset
from .dsl import DslSyntaxError, parse_rule, print_rule
from .harness import ExperimentConfig, HarnessError, LabelingLoop
from .learn import LearnError


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str, detail: str = ""):
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail
        super().__init__(message)


class SessionRuntime:
    def __init__(self, sid: str, loop: LabelingLoop, log_path: Optional[Path]):
        self.id = sid
        self.loop = loop
        self.lock = threading.RLock()
        self.log_path = log_path

    def log(self, event: dict) -> None:
        if self.log_path is None:
            return
        with self.log_path.open("a") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")


class SessionStore:
    def __init__(self, storage_dir: Optional[str] = None):
        self.dir = Path(storage_dir) if storage_dir else None
        if self.dir is not None:
            self.dir.mkdir(parents=True, exist_ok=True)
        self.sessions: dict[str, SessionRuntime] = {}
        self._lock = threading.Lock()

    def _build_loop(self, payload: dict) -> LabelingLoop:
        dataset_path = payload.get("dataset")
        if not dataset_path:
            raise ServiceError(422, "bad_request", "missing 'dataset' path")
        vocab = None
        if payload.get("vocabulary"):
            vocab = PredicateVocabulary.from_json(Path(payload["vocabulary"]).read_text())
        try:
            dataset = parse_dataset(Path(dataset_path).read_text(), vocab)
        except FileNotFoundError as exc:
            raise ServiceError(422, "bad_dataset", f"cannot read dataset: {exc}")
        except ValueError as exc:
            raise ServiceError(422, "bad_dataset", str(exc))
        try:
            config = ExperimentConfig.from_json(json.dumps(payload.get("config", {})))
        except ValueError as exc:
            raise ServiceError(422, "bad_config", str(exc))
        seed = int(payload.get("seed", config.seeds[0]))
        try:
            return LabelingLoop(dataset, config, seed)
        except (LearnError, HarnessError) as exc:
            raise ServiceError(422, "learner_failure", str(exc))

    def create(self, payload: dict) -> SessionRuntime:
        loop = self._build_loop(payload)
        sid = payload.get("id") or uuid.uuid4().hex[:12]
        log_path = self.dir / f"{sid}.events.jsonl" if self.dir else None
        runtime = SessionRuntime(sid, loop, log_path)
        with self._lock:
            self.sessions[sid] = runtime
        runtime.log({"type": "create", "payload": {**payload, "id": sid}})
        return runtime

    def get(self, sid: str) -> SessionRuntime:
        runtime = self.sessions.get(sid)
        if runtime is None:
            raise ServiceError(404, "not_found", f"unknown session {sid!r}")
        return runtime

    def load(self) -> None:
        """Rebuild sessions by replaying their event logs."""
        if self.dir is None:
            return
        for path in sorted(self.dir.glob("*.events.jsonl")):
            events = [json.loads(line) for line in path.read_text().splitlines() if line]
            if not events or events[0]["type"] != "create":
                continue
            payload = events[0]["payload"]
            loop = self._build_loop(payload)
            runtime = SessionRuntime(payload["id"], loop, None)  # no re-logging during replay
            for event in events[1:]:
                if event["type"] == "corrections":
                    loop.apply_corrections(event["payload"])
                elif event["type"] == "rules":
                    rule = parse_rule(event["payload"]["dsl"], loop.vocab)
                    loop.apply_rule_edit(rule)
                elif event["type"] == "step":
                    loop.advance()
            runtime.log_path = path
            with self._lock:
                self.sessions[payload["id"]] = runtime


def _atom_strings(record) -> list[str]:
    return sorted(str(a) for a in record.facts)


def _state_view(runtime: SessionRuntime) -> dict:
    loop = runtime.loop
    return {
        "id": runtime.id,
        "iteration": loop.iteration,
        "terminal": loop.terminal,
        "ready": loop.ready,
        "labels": list(loop.labels),
        "labeled_ids": sorted(r.id for r in loop.labeled),
        "unlabeled_count": len(loop.unlabeled),
        "rules": {
            label: {
                "dsl": print_rule(loop.rules.get(label)),
                "clauses": [
                    [str(a) for a in clause.atoms]
                    for clause in loop.rules.get(label).clauses
                ],
            }
            for label in loop.rules.labels
        },
        "constraints": {
            "include": [[label, str(clause)] for label, clause in loop.constraints.include],
            "exclude": [[label, str(clause)] for label, clause in loop.constraints.exclude],
        },
        "batch_ids": list(loop.pending.ids) if loop.pending else None,
        "metrics_count": len(loop.metrics),
    }


def _batch_view(runtime: SessionRuntime) -> dict:
    loop = runtime.loop
    if loop.pending is None:
        raise ServiceError(409, "no_batch", "session has no pending batch")
    by_id = {r.id: r for r in loop.unlabeled}
    records = []
    for rid in loop.pending.ids:
        record = by_id[rid]
        decision = loop.pending_decisions[rid]
        score = loop.pending.scored[rid]
        records.append(
            {
                "id": rid,
                "facts": _atom_strings(record),
                "numeric": {k: dict(v) for k, v in record.numeric_attrs.items()},
                "decision": {
                    "assigned": decision.assigned,
                    "satisfied_labels": list(decision.satisfied_labels),
                    "per_rule_csr": dict(decision.per_rule_csr),
                    "tie_broken": decision.tie_broken,
                },
                "score": {
                    "score": score.score,
                    "n_labels": score.n_labels,
                    "u": score.u,
                },
            }
        )
    return {"strategy": loop.pending.strategy, "ids": list(loop.pending.ids), "records": records}


def create_app(storage_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="rapid labeling sessions")
    store = SessionStore(storage_dir)
    store.load()
    app.state.store = store

    @app.exception_handler(ServiceError)
    async def _service_error(_req: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "detail": exc.detail},
        )

    @app.exception_handler(HarnessError)
    async def _harness_error(_req: Request, exc: HarnessError):
        return JSONResponse(
            status_code=409,
            content={"code": "conflict", "message": str(exc), "detail": ""},
        )

    @app.exception_handler(LearnError)
    async def _learn_error(_req: Request, exc: LearnError):
        return JSONResponse(
            status_code=422,
            content={"code": "learner_failure", "message": str(exc), "detail": ""},
        )

    @app.exception_handler(DslSyntaxError)
    async def _dsl_error(_req: Request, exc: DslSyntaxError):
        return JSONResponse(
            status_code=422,
            content={
                "code": "parse_error",
                "message": str(exc),
                "detail": f"position {exc.position}",
            },
        )

    @app.post("/sessions", status_code=201)
    async def create_session(payload: dict):
        runtime = store.create(payload)
        with runtime.lock:
            return {"id": runtime.id, "state": _state_view(runtime)}

    @app.get("/sessions/{sid}")
    async def get_session(sid: str):
        runtime = store.get(sid)
        with runtime.lock:
            return _state_view(runtime)

    @app.get("/sessions/{sid}/batch")
    async def get_batch(sid: str):
        runtime = store.get(sid)
        with runtime.lock:
            return _batch_view(runtime)

    @app.post("/sessions/{sid}/corrections")
    async def post_corrections(sid: str, payload: dict):
        runtime = store.get(sid)
        corrections = payload.get("corrections", {})
        if not isinstance(corrections, dict):
            raise ServiceError(422, "bad_request", "'corrections' must be an object")
        with runtime.lock:
            runtime.loop.apply_corrections(corrections)
            runtime.log({"type": "corrections", "payload": corrections})
            return _state_view(runtime)

    @app.post("/sessions/{sid}/rules")
    async def post_rules(sid: str, payload: dict):
        runtime = store.get(sid)
        label = payload.get("label")
        dsl = payload.get("dsl", "")
        with runtime.lock:
            rule = parse_rule(dsl, runtime.loop.vocab)
            if label is not None and rule.label != label:
                raise ServiceError(
                    422, "bad_request", f"rule defines {rule.label!r}, payload says {label!r}"
                )
            runtime.loop.apply_rule_edit(rule)
            runtime.log({"type": "rules", "payload": {"label": rule.label, "dsl": dsl}})
            return _state_view(runtime)

    @app.post("/sessions/{sid}/step")
    async def post_step(sid: str):
        runtime = store.get(sid)
        with runtime.lock:
            metrics = runtime.loop.advance()
            runtime.log({"type": "step"})
            return {"metrics": metrics.to_dict(), "state": _state_view(runtime)}

    @app.get("/sessions/{sid}/metrics")
    async def get_metrics(sid: str):
        runtime = store.get(sid)
        with runtime.lock:
            return {"metrics": [m.to_dict() for m in runtime.loop.metrics]}

    return app
