"""Live session service.

Exposes the engine over a websocket with JSON text frames so any browser or
script can be a client. One connection holds one session; a session binds
one trial at a time and persists its log through the session store when the
trial completes. Every keystroke frame gets exactly one state frame back
(emitted/rejected frames precede it); server frame ids increase strictly
per session. No server wall-clock enters any frame, so a recorded client
transcript replays to byte-identical server frames.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .codec import CodeTable, Direction
from .engine import Engine, EngineError
from .experiment import PhraseSet, SessionStore, TrialRecord, table_hash
from .metrics import MetricsError, compute_trial_metrics


def _boxes(engine: Engine) -> dict[str, list[str]]:
    return {d.name: syms for d, syms in engine.partition().items()}


class Session:
    def __init__(self, gateway: "Gateway", name: str):
        self.gateway = gateway
        self.name = name
        self.engine: Engine | None = None
        self.trial_count = 0
        self._next_id = 0

    def _frame(self, kind: str, **payload) -> str:
        self._next_id += 1
        return json.dumps({"kind": kind, "id": self._next_id, **payload},
                          separators=(",", ":"), sort_keys=True)

    def handle(self, message: str) -> list[str]:
        """Process one client frame, return the server frames to send."""
        try:
            msg = json.loads(message)
        except json.JSONDecodeError:
            return [self._frame("error", message="malformed JSON frame")]
        kind = msg.get("kind")
        if kind == "hello":
            return self._handle_hello(msg)
        if kind == "keystroke":
            return self._handle_keystroke(msg)
        return [self._frame("error", message=f"unknown frame kind {kind!r}")]

    def _handle_hello(self, msg: dict) -> list[str]:
        gw = self.gateway
        presented = msg.get("presented")
        if presented is None:
            phrases = gw.phrase_set.phrases
            presented = phrases[self.trial_count % len(phrases)]
        try:
            self.engine = Engine(gw.table, presented)
        except EngineError as e:
            return [self._frame("error", message=str(e))]
        return [
            self._frame(
                "layout",
                boxes=_boxes(self.engine),
                presented=presented,
                transcribed="",
                depth=0,
                table_hash=gw.hash,
            )
        ]

    def _handle_keystroke(self, msg: dict) -> list[str]:
        if self.engine is None:
            return [self._frame("error", message="no active trial; send hello first")]
        try:
            direction = Direction[msg["d"]]
            t_ms = int(msg["t"])
        except (KeyError, TypeError, ValueError):
            return [self._frame("error", message="keystroke frame needs d in LRUD and integer t")]
        try:
            outcome = self.engine.press(direction, t_ms)
        except EngineError as e:
            return [self._frame("error", message=str(e))]

        frames = []
        if outcome.kind == "emit":
            frames.append(
                self._frame("emitted", symbol=outcome.symbol, wrong=outcome.wrong)
            )
        elif outcome.kind == "rejected":
            frames.append(self._frame("rejected"))
        frames.append(
            self._frame(
                "state",
                boxes=_boxes(self.engine),
                transcribed=self.engine.trial.transcribed,
                depth=self.engine.depth,
            )
        )
        if self.engine.trial.finished:
            frames.append(self._finish_trial())
        return frames

    def _finish_trial(self) -> str:
        gw = self.gateway
        trial = self.engine.trial
        try:
            metrics = compute_trial_metrics(trial, gw.table, gw.count_enter)
            payload = json.loads(metrics.to_json())
        except MetricsError as e:
            metrics = None
            payload = {"error": str(e)}
        if gw.store is not None and metrics is not None:
            gw.store.append(
                TrialRecord(
                    participant=self.name,
                    device="ws",
                    block=1,
                    phrase_index=self.trial_count,
                    presented=trial.presented,
                    table_hash=gw.hash,
                    count_enter=gw.count_enter,
                    events=list(trial.keystrokes),
                    metrics=metrics,
                )
            )
        self.trial_count += 1
        self.engine = None
        return self._frame("trial-done", metrics=payload)


class Gateway:
    def __init__(
        self,
        table: CodeTable,
        phrase_set: PhraseSet,
        store_dir=None,
        count_enter: bool = False,
    ):
        self.table = table
        self.phrase_set = phrase_set
        self.count_enter = count_enter
        self.hash = table_hash(table)
        self.store = SessionStore.open(store_dir) if store_dir else None
        self._session_count = 0

    def new_session(self, name: str | None = None) -> Session:
        self._session_count += 1
        return Session(self, name or f"S{self._session_count:03d}")


def create_app(
    table: CodeTable,
    phrase_set: PhraseSet,
    store_dir=None,
    count_enter: bool = False,
    static_dir=None,
) -> FastAPI:
    app = FastAPI(title="h4writer gateway")
    gateway = Gateway(table, phrase_set, store_dir, count_enter)
    app.state.gateway = gateway

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        name = websocket.query_params.get("session")
        session = gateway.new_session(name)
        try:
            while True:
                message = await websocket.receive_text()
                for frame in session.handle(message):
                    await websocket.send_text(frame)
        except WebSocketDisconnect:
            pass

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
