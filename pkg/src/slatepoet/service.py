"""HTTP + WebSocket host for the slate session loop.

Endpoints (all JSON; timestamps are milliseconds since session start):

    POST /snapshot       accept a detection snapshot (poses or markers),
                         reply with the current reading-order preview
    GET  /state          mode, latest response, preview, last seq
    WS   /ws             event stream; a new subscriber first receives the
                         latest response event (the display keeps showing
                         the last response, so late joiners get it too),
                         then live events in sequence order
    POST /session/close  close the session; later snapshots get 409

Every event carries schema_version, session id, and a per-session
strictly increasing sequence number. Slow subscribers lose oldest
non-response events first; response events are never dropped.

All session mutation funnels through one asyncio lock per session, so
the engine has a single logical owner. Chain execution runs in a worker
thread and never blocks snapshot ingestion.
"""

from __future__ import annotations

import asyncio
import logging
import time
from collections import deque
from contextlib import asynccontextmanager
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, Query, WebSocket
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .analytics import SessionRecord, append_record
from .backends import make_backend
from .chains import run_chain
from .config import ServiceConfig
from .errors import ChainError, SlatePoetError, UnknownWordError
from .geometry import DetectedMarker, Point2
from .session import SessionEngine, SlateSnapshot, Submission
from .simulate import TilePose, marker_from_pose
from .vocabulary import Vocabulary, default_vocabulary

__all__ = ["create_app", "WIRE_SCHEMA_VERSION"]

log = logging.getLogger(__name__)

WIRE_SCHEMA_VERSION = 1
_SUBSCRIBER_QUEUE_LIMIT = 256


class PoseIn(BaseModel):
    word_id: str
    center: tuple[float, float]
    rotation: float = 0.0
    width: float = 60.0
    height: float = 20.0


class MarkerIn(BaseModel):
    word_id: str
    center: tuple[float, float]
    corners: list[tuple[float, float]]


class SnapshotIn(BaseModel):
    timestamp_ms: int | None = None
    poses: list[PoseIn] | None = None
    markers: list[MarkerIn] | None = None


@dataclass(eq=False)
class _Subscriber:
    queue: deque = field(default_factory=deque)
    wakeup: asyncio.Event = field(default_factory=asyncio.Event)

    def push(self, event: dict) -> None:
        self.queue.append(event)
        if len(self.queue) > _SUBSCRIBER_QUEUE_LIMIT:
            for i, queued in enumerate(self.queue):
                if queued["type"] != "response":
                    del self.queue[i]
                    break
        self.wakeup.set()


class SessionHub:
    """One live session: engine + event fanout + chain execution."""

    def __init__(self, session_id: str, config: ServiceConfig, vocabulary: Vocabulary, backend):
        self.session_id = session_id
        self.config = config
        self.backend = backend
        self.engine = SessionEngine(
            vocabulary,
            geometry=config.geometry,
            settle_ms=config.settle_ms,
            epsilon=config.move_epsilon,
        )
        self.lock = asyncio.Lock()
        self.seq = 0
        self.closed = False
        self.latest_response_event: dict | None = None
        self.pending_submission: Submission | None = None
        self.subscribers: set[_Subscriber] = set()
        self._started_monotonic = time.monotonic()
        self._last_ts = 0
        self._chain_tasks: set[asyncio.Task] = set()  # keep strong refs until done

    def now_ms(self) -> int:
        return int((time.monotonic() - self._started_monotonic) * 1000)

    def _emit(self, event_type: str, data: dict) -> dict:
        # caller must hold self.lock
        self.seq += 1
        event = {
            "schema_version": WIRE_SCHEMA_VERSION,
            "session": self.session_id,
            "seq": self.seq,
            "ts_ms": self.now_ms(),
            "type": event_type,
            "data": data,
        }
        if event_type == "response":
            self.latest_response_event = event
        for sub in self.subscribers:
            sub.push(event)
        return event

    def _snapshot_from_body(self, body: SnapshotIn) -> SlateSnapshot:
        if body.timestamp_ms is not None:
            ts = max(self._last_ts, int(body.timestamp_ms))
        else:
            ts = max(self._last_ts, self.now_ms())
        self._last_ts = ts
        detections: list[DetectedMarker] = []
        if body.poses:
            for p in body.poses:
                detections.append(
                    marker_from_pose(
                        TilePose(p.word_id, (p.center[0], p.center[1]), p.rotation, p.width, p.height)
                    )
                )
        if body.markers:
            for m in body.markers:
                detections.append(
                    DetectedMarker(
                        word_id=m.word_id,
                        center=Point2(*m.center),
                        corners=tuple(Point2(*c) for c in m.corners),
                    )
                )
        return SlateSnapshot(timestamp_ms=ts, detections=tuple(detections))

    async def accept_snapshot(self, body: SnapshotIn) -> dict:
        async with self.lock:
            if self.closed:
                raise HTTPException(status_code=409, detail="session closed")
            try:
                snapshot = self._snapshot_from_body(body)
                self.engine.ingest(snapshot)
            except UnknownWordError as exc:
                raise HTTPException(status_code=400, detail=f"unknown word_id: {exc.args[0]}")
            except SlatePoetError as exc:
                raise HTTPException(status_code=400, detail=str(exc))
            preview = self.engine.preview_tokens()
            self._emit("snapshot_accepted", {"tile_count": len(snapshot.detections), "preview": preview})
            deadline = self.engine.state.settle_deadline_ms
            if deadline is not None:
                self._emit("settle_countdown", {"remaining_ms": max(0, deadline - snapshot.timestamp_ms)})
            return {
                "ok": True,
                "preview": preview,
                "mode": self.engine.active_mode().value,
                "settle_deadline_ms": deadline,
                "seq": self.seq,
            }

    async def tick(self) -> None:
        async with self.lock:
            if self.closed:
                return
            submission = self.engine.poll(max(self.now_ms(), self._last_ts))
            if submission is None:
                return
            await self._dispatch_submission(submission)

    async def _dispatch_submission(self, submission: Submission) -> None:
        # caller must hold self.lock
        if self.engine.state.chain_in_flight:
            self.pending_submission = submission  # coalesce: latest wins
            return
        self.engine.state.chain_in_flight = True
        self._emit("submission", {"poem": submission.poem_text, "mode": submission.mode.value})
        self._emit("chain_started", {"mode": submission.mode.value})
        task = asyncio.create_task(self._run_chain(submission))
        self._chain_tasks.add(task)
        task.add_done_callback(self._chain_tasks.discard)

    async def _run_chain(self, submission: Submission) -> None:
        try:
            result = await asyncio.to_thread(
                run_chain, submission.mode, submission.poem_text, self.backend
            )
        except Exception as exc:
            if not isinstance(exc, (ChainError, SlatePoetError)):
                log.exception("unexpected chain failure")
            async with self.lock:
                stage = getattr(exc, "stage", None)
                code = f"chain_stage_{stage}" if stage else "chain_error"
                self._emit("error", {"code": code, "message": str(exc)})
        else:
            async with self.lock:
                self._emit(
                    "response",
                    {
                        "text": result.stage2_text,
                        "mode": result.mode.value,
                        "poem": result.poem,
                        "length_warning": result.length_warning,
                    },
                )
            self._record(submission, result)
        finally:
            async with self.lock:
                self.engine.state.chain_in_flight = False
                pending, self.pending_submission = self.pending_submission, None
                if pending is not None:
                    await self._dispatch_submission(pending)

    def _record(self, submission: Submission, result) -> None:
        if not self.config.log_path:
            return
        record = SessionRecord(
            ts_ms=submission.timestamp_ms,
            mode=result.mode,
            poem_text=result.poem,
            word_ids=submission.word_ids,
            stage1_text=result.stage1_text,
            stage2_text=result.stage2_text,
            latency_ms=result.total_latency_ms,
        )
        try:
            append_record(self.config.log_path, record)
        except OSError as exc:
            log.error("failed to append session record: %s", exc)

    def state_view(self) -> dict:
        latest = self.latest_response_event
        return {
            "schema_version": WIRE_SCHEMA_VERSION,
            "session": self.session_id,
            "mode": self.engine.active_mode().value,
            "latest_response": latest["data"]["text"] if latest else None,
            "latest_response_mode": latest["data"]["mode"] if latest else None,
            "preview": self.engine.preview_tokens(),
            "seq": self.seq,
            "closed": self.closed,
        }


def create_app(
    config: ServiceConfig | None = None,
    vocabulary: Vocabulary | None = None,
    backend=None,
) -> FastAPI:
    config = config or ServiceConfig()
    vocabulary = vocabulary or default_vocabulary()
    backend = backend or make_backend(config.backend, config.backend_config)

    hubs: dict[str, SessionHub] = {}

    def get_hub(session_id: str) -> SessionHub:
        if session_id in hubs:
            return hubs[session_id]
        if session_id != "default" and not config.multi_session:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        hubs[session_id] = SessionHub(session_id, config, vocabulary, backend)
        return hubs[session_id]

    get_hub("default")

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        async def ticker():
            while True:
                for hub in list(hubs.values()):
                    await hub.tick()
                await asyncio.sleep(config.tick_ms / 1000.0)

        task = asyncio.create_task(ticker())
        try:
            yield
        finally:
            task.cancel()
            try:
                await task
            except asyncio.CancelledError:
                pass

    app = FastAPI(title="slatepoet", lifespan=lifespan)
    # the browser slate is served from another origin (a static file server);
    # no cookies or credentials ride on these endpoints
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.hubs = hubs
    app.state.config = config

    @app.post("/snapshot")
    async def post_snapshot(body: SnapshotIn, session: str = Query(default="default")):
        return await get_hub(session).accept_snapshot(body)

    @app.get("/state")
    async def get_state(session: str = Query(default="default")):
        return get_hub(session).state_view()

    @app.get("/vocabulary")
    async def get_vocabulary():
        return {
            "tiles": [
                {
                    "word_id": t.word_id,
                    "text": t.text,
                    "attach_left": t.attach_left,
                    "kind": t.kind,
                    "mode": t.mode.value if t.mode else None,
                }
                for t in vocabulary
            ]
        }

    @app.post("/session/close")
    async def close_session(session: str = Query(default="default")):
        hub = get_hub(session)
        async with hub.lock:
            hub.closed = True
        return {"ok": True, "session": session}

    @app.websocket("/ws")
    async def ws_events(websocket: WebSocket, session: str = Query(default="default")):
        try:
            hub = get_hub(session)
        except HTTPException:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        sub = _Subscriber()
        async with hub.lock:
            if hub.latest_response_event is not None:
                sub.push(hub.latest_response_event)
            hub.subscribers.add(sub)

        async def pump():
            while True:
                while sub.queue:
                    await websocket.send_json(sub.queue.popleft())
                sub.wakeup.clear()
                await sub.wakeup.wait()

        async def watch_disconnect():
            while True:
                await websocket.receive_text()

        pump_task = asyncio.create_task(pump())
        watch_task = asyncio.create_task(watch_disconnect())
        try:
            done, _ = await asyncio.wait(
                {pump_task, watch_task}, return_when=asyncio.FIRST_COMPLETED
            )
            for task in done:
                if not task.cancelled():
                    task.exception()  # disconnects land here; nothing to do
        finally:
            pump_task.cancel()
            watch_task.cancel()
            hub.subscribers.discard(sub)

    return app
