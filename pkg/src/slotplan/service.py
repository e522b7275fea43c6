"""Live session hosting over websockets.

One control channel carries typed request/reply messages; one push stream
per session carries iteration reports and throttled snapshots.  Each
session's solver state is owned by a single worker thread: network handlers
only enqueue commands and forward the immutable documents the worker hands
back, so soundness of everything a client ever sees reduces to soundness of
the state between iterations.  Wire framing is documented in
docs/protocol.md.
"""

from __future__ import annotations

import asyncio
import json
import queue
import threading
import time
import uuid
from collections import deque
from contextlib import asynccontextmanager
from dataclasses import dataclass
from typing import Any

from fastapi import FastAPI, WebSocket
from starlette.websockets import WebSocketDisconnect, WebSocketState

from .model import ModelError
from .serialize import (
    FormatError,
    canonical_bytes,
    edit_from_doc,
    problem_from_doc,
    weights_from_doc,
)
from .session import Session, SetWeights, snapshot

DEFAULT_SNAPSHOT_INTERVAL = 0.05  # at most 20 streamed views per second
DEFAULT_SESSION_TTL = 600.0


def _canon(doc: dict) -> str:
    return canonical_bytes(doc).decode("utf-8")


@dataclass
class _Command:
    kind: str
    payload: Any
    loop: asyncio.AbstractEventLoop
    future: asyncio.Future

    def resolve(self, doc: dict) -> None:
        def _set() -> None:
            if not self.future.done():
                self.future.set_result(doc)

        try:
            self.loop.call_soon_threadsafe(_set)
        except RuntimeError:
            pass  # client's loop is gone; nobody is waiting any more


class _StreamClient:
    """Per-connection outbox fed by the worker thread via the event loop."""

    def __init__(self, loop: asyncio.AbstractEventLoop) -> None:
        self.loop = loop
        self.reports: deque[dict] = deque()
        self.latest: dict | None = None
        self.wake = asyncio.Event()

    def offer(self, report: dict | None, view: dict | None) -> None:
        # runs on the event loop (call_soon_threadsafe), never concurrently
        # with itself or with the pump coroutine's non-awaiting sections
        if report is not None:
            self.reports.append(report)
        if view is not None:
            self.latest = view
        self.wake.set()


class SessionWorker(threading.Thread):
    """Owns one Session; executes commands only between iterations.

    The pause flag is the one datum shared with handlers (atomic Event);
    everything else crosses the boundary as queued commands or as the
    plain dicts published to stream clients.
    """

    def __init__(self, sid: str, session: Session, hub: "SessionHub") -> None:
        super().__init__(daemon=True, name=f"slotplan-session-{sid[:8]}")
        self.sid = sid
        self.session = session
        self.hub = hub
        self.total_slots = session.state.problem.grid.total_slots
        self.commands: "queue.Queue[_Command | None]" = queue.Queue()
        self.running = threading.Event()
        self.last_touch = time.monotonic()
        self._steps: deque[tuple[int, _Command]] = deque()
        self._closed = False

    # -- handler side -----------------------------------------------------

    def touch(self) -> None:
        self.last_touch = time.monotonic()

    def submit(self, cmd: _Command) -> None:
        self.touch()
        self.commands.put(cmd)

    def close(self) -> None:
        self.commands.put(None)

    # -- worker side ------------------------------------------------------

    def run(self) -> None:
        while not self._closed:
            if self._want_iteration():
                try:
                    cmd = self.commands.get_nowait()
                except queue.Empty:
                    cmd = None
            else:
                try:
                    cmd = self.commands.get(timeout=0.2)
                except queue.Empty:
                    continue
            while cmd is not None:
                self._execute(cmd)
                if self._closed:
                    break
                try:
                    cmd = self.commands.get_nowait()
                except queue.Empty:
                    cmd = None
            if self._closed:
                break
            if self._want_iteration():
                self._iterate_once()
        for _, pending in self._steps:
            pending.resolve(self._error_doc("session closed"))
        self._steps.clear()

    def _want_iteration(self) -> bool:
        state = self.session.state
        if not state.unscheduled or state.iteration >= state.weights.max_iterations:
            return False
        return self.running.is_set() or bool(self._steps)

    def _iterate_once(self) -> None:
        reports = self.session.step(1)
        self.touch()
        if reports:
            self.hub.publish(
                self.sid,
                {"type": "iteration_report", "session": self.sid, "report": reports[0].to_doc()},
                self._snapshot_doc(include_scores=False),
            )
        done = not self._work_remains()
        if done:
            self.running.clear()
        if self._steps:
            remaining, cmd = self._steps[0]
            remaining -= 1
            if remaining <= 0 or done:
                self._steps.popleft()
                cmd.resolve(self._snapshot_doc())
            else:
                self._steps[0] = (remaining, cmd)
        if done:
            while self._steps:
                _, cmd = self._steps.popleft()
                cmd.resolve(self._snapshot_doc())

    def _work_remains(self) -> bool:
        state = self.session.state
        return bool(state.unscheduled) and state.iteration < state.weights.max_iterations

    def _execute(self, cmd: _Command | None) -> None:
        if cmd is None:
            self._closed = True
            return
        try:
            handler = getattr(self, f"_cmd_{cmd.kind}")
            handler(cmd)
        except (FormatError, ModelError) as e:
            cmd.resolve(self._error_doc(str(e)))

    def _cmd_start(self, cmd: _Command) -> None:
        if self._work_remains():
            self.running.set()
        cmd.resolve(self._snapshot_doc())

    def _cmd_pause(self, cmd: _Command) -> None:
        self.running.clear()
        while self._steps:  # a pause cancels pending steps; each still replies
            _, pending = self._steps.popleft()
            pending.resolve(self._snapshot_doc())
        cmd.resolve(self._snapshot_doc())

    def _cmd_step(self, cmd: _Command) -> None:
        self.running.clear()
        n = cmd.payload
        if n <= 0 or not self._work_remains():
            cmd.resolve(self._snapshot_doc())
            return
        self._steps.append((n, cmd))

    def _cmd_edit(self, cmd: _Command) -> None:
        report = self.session.apply_edit(cmd.payload)
        cmd.resolve({"type": "edit_result", "session": self.sid, "result": report.to_doc()})

    def _cmd_get_snapshot(self, cmd: _Command) -> None:
        cmd.resolve(self._snapshot_doc(include_scores=True))

    def _snapshot_doc(self, include_scores: bool = False) -> dict:
        view = snapshot(self.session.state, include_scores=include_scores)
        return {
            "type": "snapshot",
            "session": self.sid,
            "running": self.running.is_set() and self._work_remains(),
            "view": view.to_doc(),
        }

    def _error_doc(self, message: str) -> dict:
        return {"type": "error", "session": self.sid, "message": message}


class SessionHub:
    """All live sessions plus their attached stream clients."""

    def __init__(self, ttl: float) -> None:
        self.ttl = ttl
        self._lock = threading.Lock()
        self._workers: dict[str, SessionWorker] = {}
        self._clients: dict[str, set[_StreamClient]] = {}

    def create(self, session: Session) -> SessionWorker:
        sid = uuid.uuid4().hex
        worker = SessionWorker(sid, session, self)
        with self._lock:
            self._workers[sid] = worker
        worker.start()
        return worker

    def get(self, sid: str) -> SessionWorker | None:
        with self._lock:
            worker = self._workers.get(sid)
        if worker is not None:
            worker.touch()
        return worker

    def attach(self, sid: str, client: _StreamClient) -> None:
        with self._lock:
            self._clients.setdefault(sid, set()).add(client)

    def detach(self, sid: str, client: _StreamClient) -> None:
        with self._lock:
            clients = self._clients.get(sid)
            if clients is not None:
                clients.discard(client)
                if not clients:
                    del self._clients[sid]
        worker = self.get(sid)  # restart the idle clock at drop time
        if worker is not None:
            worker.touch()

    def has_clients(self, sid: str) -> bool:
        with self._lock:
            return bool(self._clients.get(sid))

    def publish(self, sid: str, report: dict | None, view: dict | None) -> None:
        with self._lock:
            clients = list(self._clients.get(sid, ()))
        for client in clients:
            try:
                client.loop.call_soon_threadsafe(client.offer, report, view)
            except RuntimeError:
                pass  # loop shut down mid-publish; detach will follow

    @property
    def count(self) -> int:
        with self._lock:
            return len(self._workers)

    def reap(self) -> None:
        now = time.monotonic()
        with self._lock:
            # a session stays alive while solving, while a stream is
            # attached, or until its idle clock outlasts the TTL
            expired = [
                (sid, w)
                for sid, w in self._workers.items()
                if not w.running.is_set()
                and not self._clients.get(sid)
                and now - w.last_touch > self.ttl
            ]
            for sid, _ in expired:
                del self._workers[sid]
        for _, worker in expired:
            worker.close()

    def close_all(self) -> None:
        with self._lock:
            workers = list(self._workers.values())
            self._workers.clear()
        for worker in workers:
            worker.close()
        for worker in workers:
            worker.join(timeout=2.0)


async def _await_reply(worker: SessionWorker, kind: str, payload: Any = None) -> dict:
    loop = asyncio.get_running_loop()
    cmd = _Command(kind, payload, loop, loop.create_future())
    worker.submit(cmd)
    return await cmd.future


def _parse_control(raw: str, hub: SessionHub) -> tuple[str, Any, SessionWorker | None]:
    """Decode one control frame into (kind, payload, worker).

    Raises FormatError for anything malformed; unknown sessions surface the
    same way so every bad frame maps to a single error reply.
    """
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as e:
        raise FormatError("$", f"not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise FormatError("$", f"expected an object, got {type(doc).__name__}")
    kind = doc.get("type")
    if kind == "create":
        problem = problem_from_doc(doc.get("problem"))
        weights = weights_from_doc(doc["weights"]) if "weights" in doc else None
        seed = doc.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise FormatError("$.seed", "expected an integer")
        return "create", (problem, weights, seed), None
    if kind not in ("start", "pause", "step", "edit", "set_weights", "get_snapshot"):
        raise FormatError("$.type", f"unknown message type {kind!r}")
    sid = doc.get("session")
    if not isinstance(sid, str):
        raise FormatError("$.session", "expected a session id string")
    worker = hub.get(sid)
    if worker is None:
        raise FormatError("$.session", f"unknown session {sid!r}")
    if kind == "step":
        n = doc.get("n")
        if not isinstance(n, int) or isinstance(n, bool):
            raise FormatError("$.n", "expected an integer iteration count")
        return "step", n, worker
    if kind == "edit":
        return "edit", edit_from_doc(doc.get("edit"), worker.total_slots), worker
    if kind == "set_weights":
        return "edit", SetWeights(weights_from_doc(doc.get("weights"))), worker
    return kind, None, worker


def create_app(
    session_ttl: float = DEFAULT_SESSION_TTL,
    snapshot_interval: float = DEFAULT_SNAPSHOT_INTERVAL,
    reap_interval: float | None = None,
) -> FastAPI:
    hub = SessionHub(session_ttl)
    interval = reap_interval if reap_interval is not None else max(session_ttl / 4.0, 0.05)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        stop = asyncio.Event()

        async def reaper() -> None:
            while not stop.is_set():
                try:
                    await asyncio.wait_for(stop.wait(), timeout=interval)
                except asyncio.TimeoutError:
                    hub.reap()

        task = asyncio.create_task(reaper())
        try:
            yield
        finally:
            stop.set()
            await task
            hub.close_all()

    app = FastAPI(lifespan=lifespan)
    app.state.hub = hub

    @app.get("/health")
    async def health() -> dict:
        return {"sessions": hub.count}

    @app.websocket("/ws")
    async def control(ws: WebSocket) -> None:
        await ws.accept()
        try:
            while True:
                message = await ws.receive()
                if message["type"] == "websocket.disconnect":
                    return
                raw = message.get("text")
                if raw is None:
                    await ws.send_text(
                        _canon({"type": "error", "session": None, "message": "text frames only"})
                    )
                    continue
                try:
                    kind, payload, worker = _parse_control(raw, hub)
                    if kind == "create":
                        problem, weights, seed = payload
                        # index construction is the heavy part; keep it off
                        # the event loop
                        session = await asyncio.to_thread(
                            Session, problem, weights=weights, seed=seed
                        )
                        worker = hub.create(session)
                        kind, payload = "get_snapshot", None
                except (FormatError, ModelError) as e:
                    await ws.send_text(
                        _canon({"type": "error", "session": None, "message": str(e)})
                    )
                    continue
                reply = await _await_reply(worker, kind, payload)
                await ws.send_text(_canon(reply))
        except (WebSocketDisconnect, RuntimeError):
            return

    @app.websocket("/stream/{sid}")
    async def stream(ws: WebSocket, sid: str) -> None:
        await ws.accept()
        worker = hub.get(sid)
        if worker is None:
            await ws.send_text(
                _canon({"type": "error", "session": sid, "message": f"unknown session {sid!r}"})
            )
            await ws.close(code=4404)
            return
        loop = asyncio.get_running_loop()
        initial = await _await_reply(worker, "get_snapshot")
        client = _StreamClient(loop)
        hub.attach(sid, client)
        recv_task = asyncio.create_task(ws.receive())
        try:
            await ws.send_text(_canon(initial))
            last_iter = initial["view"]["iteration"]
            last_send = loop.time()
            while True:
                # reports are never throttled; drain them first, in order
                while client.reports:
                    await ws.send_text(_canon(client.reports.popleft()))
                timeout = None
                if client.latest is not None:
                    remaining = last_send + snapshot_interval - loop.time()
                    if remaining <= 0:
                        view_doc = client.latest
                        client.latest = None
                        if view_doc["view"]["iteration"] > last_iter:
                            last_iter = view_doc["view"]["iteration"]
                            last_send = loop.time()
                            await ws.send_text(_canon(view_doc))
                        continue
                    timeout = remaining
                client.wake.clear()
                if client.reports or (client.latest is not None and timeout is None):
                    continue  # raced with offer() between drain and clear
                wake_task = asyncio.create_task(client.wake.wait())
                done, _ = await asyncio.wait(
                    {recv_task, wake_task},
                    timeout=timeout,
                    return_when=asyncio.FIRST_COMPLETED,
                )
                if wake_task not in done:
                    wake_task.cancel()
                if recv_task in done:
                    if _is_disconnect(recv_task):
                        return
                    recv_task = asyncio.create_task(ws.receive())
        except (WebSocketDisconnect, RuntimeError):
            return
        finally:
            hub.detach(sid, client)
            recv_task.cancel()
            if ws.client_state == WebSocketState.CONNECTED:
                try:
                    await ws.close()
                except RuntimeError:
                    pass

    return app


def _is_disconnect(recv_task: "asyncio.Task") -> bool:
    try:
        return recv_task.result()["type"] == "websocket.disconnect"
    except (WebSocketDisconnect, RuntimeError):
        return True


def run_service(
    host: str = "127.0.0.1", port: int = 8000, session_ttl: float = DEFAULT_SESSION_TTL
) -> None:
    import uvicorn

    uvicorn.run(create_app(session_ttl=session_ttl), host=host, port=port)
