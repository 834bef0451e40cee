"""Websocket session service.

One asyncio lock serializes all mutations (total event order). Heavy
computations (clustering, projection) run in a worker thread against an
immutable state snapshot and re-enter as completions carrying the revision
they were computed against; completions that lost a race are dropped with
a conflict rejection. Every accepted mutation is appended to the event log
so a live session can be exported and replayed bit-exactly.
"""

from __future__ import annotations

import asyncio
import logging
from dataclasses import replace

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from . import session as sessionmod
from .command import parse_command
from .errors import CommandError, EdakitError, RevisionConflict, SessionError
from .session import Event, SessionState, apply_event, delta_message, overview, snapshot

log = logging.getLogger(__name__)

HEAVY_EVENTS = frozenset({"apply_clustering", "apply_projection", "reproject"})
LOGGED_EVENTS = sessionmod.MUTATION_EVENTS | sessionmod.VIEW_EVENTS


def command_to_event(
    state: SessionState, text: str, context: dict | None, client_id: str, seq: int
) -> Event:
    """Turn a command sentence into a session event, resolving deictic
    context (current selection, focused view) supplied by the client."""
    cmd = parse_command(text)
    context = context or {}
    kind = type(cmd).__name__

    def focused_solution() -> int:
        fv = context.get("focused_view")
        if fv is not None:
            return state.binding(int(fv)).solution_id
        if len(state.solutions) == 1:
            return next(iter(state.solutions))
        raise SessionError(
            "ambiguous solution: supply a focused view or create a single solution"
        )

    if kind in ("ShowView", "LoadViewOnScreens"):
        sid = focused_solution()
        return Event(
            type="bind_view",
            payload={"kind": cmd.kind, "solution_id": sid, "slots": list(cmd.slots)},
            solution_id=sid,
            client_id=client_id,
            seq=seq,
        )
    if kind == "ExtendView":
        matching = [
            b for b in state.bindings.values() if b.kind == cmd.kind
        ]
        fv = context.get("focused_view")
        if fv is not None:
            matching = [b for b in matching if b.view_id == int(fv)] or matching
        if len(matching) != 1:
            raise SessionError(
                f"cannot resolve a unique {cmd.kind} view to extend"
            )
        binding = matching[0]
        need = cmd.n - len(binding.slots)
        if need <= 0:
            raise SessionError(
                f"view {binding.view_id} already spans {len(binding.slots)} screen(s)"
            )
        taken = state.occupied_slots()
        free = [s for s in range(1, state.slot_count + 1) if s not in taken]
        if len(free) < need:
            raise SessionError("not enough free screen slots")
        return Event(
            type="extend_view",
            payload={"view_id": binding.view_id, "slots": free[:need]},
            solution_id=binding.solution_id,
            client_id=client_id,
            seq=seq,
        )
    if kind == "ApplyClustering":
        return Event(
            type="apply_clustering",
            payload={"params": {"algorithm": cmd.algorithm, "k": cmd.k}},
            solution_id=cmd.solution,
            client_id=client_id,
            seq=seq,
        )
    if kind == "ApplyProjection":
        params = {"algorithm": cmd.algorithm, "dims": cmd.dims}
        if cmd.metric:
            params["metric"] = cmd.metric
        return Event(
            type="apply_projection",
            payload={"params": params},
            solution_id=cmd.solution,
            client_id=client_id,
            seq=seq,
        )
    if kind == "ForwardPerturb":
        selection = context.get("selection") or []
        if len(selection) != 1:
            raise SessionError(
                "forward projection needs exactly one selected data point in context"
            )
        fv = context.get("focused_view")
        sid = (
            state.binding(int(fv)).solution_id
            if fv is not None
            else focused_solution()
        )
        return Event(
            type="forward_project",
            payload={
                "row_id": int(selection[0]),
                "perturbation": {cmd.feature: cmd.delta},
            },
            solution_id=sid,
            client_id=client_id,
            seq=seq,
        )
    # FilterWhere
    from .filters import print_filter

    return Event(
        type="set_filter",
        payload={"filter": print_filter(cmd.expr)},
        solution_id=cmd.solution,
        client_id=client_id,
        seq=seq,
    )


class SessionService:
    """Shared state + connection registry behind the websocket endpoint."""

    def __init__(self, state: SessionState, preload_events: list[Event] | None = None):
        self._lock = asyncio.Lock()
        self._clients: dict[str, WebSocket] = {}
        self._next_client = 0
        self.event_log: list[Event] = []
        # startup events (e.g. preloading the dataset as solution 0) go
        # through the same logged path so an exported log replays bit-exactly
        for event in preload_events or []:
            state, _, _ = apply_event(state, event)
            if event.type in LOGGED_EVENTS:
                self.event_log.append(event)
        self._state = state

    @property
    def state(self) -> SessionState:
        return self._state

    def _hello_message(self) -> dict:
        return {
            "v": 1,
            "type": "snapshot",
            "revision": 0,
            "payload": {
                "session": snapshot(self._state),
                "dataset": sessionmod.dataset_summary(self._state.dataset),
                "overview": overview(self._state),
            },
        }

    async def register(self, ws: WebSocket) -> str:
        await ws.accept()
        async with self._lock:
            client_id = f"client-{self._next_client}"
            self._next_client += 1
            self._clients[client_id] = ws
            hello = self._hello_message()
        hello["payload"]["client_id"] = client_id
        await ws.send_json(hello)
        return client_id

    async def unregister(self, client_id: str):
        async with self._lock:
            self._clients.pop(client_id, None)

    async def _broadcast(self, messages: list[dict], targets, sender: str):
        if targets == "sender":
            recipients = {sender: self._clients.get(sender)}
        else:
            recipients = dict(self._clients)
        for msg in messages:
            for cid, ws in recipients.items():
                if ws is None:
                    continue
                try:
                    await ws.send_json(msg)
                except Exception:
                    log.warning("dropping unreachable client %s", cid)
                    await self.unregister(cid)

    async def _reject(self, ws: WebSocket, seq: int, exc: Exception):
        if isinstance(exc, RevisionConflict):
            code = "conflict"
        elif isinstance(exc, CommandError):
            code = "parse_error"
        elif isinstance(exc, EdakitError):
            code = "invalid"
        else:
            code = "internal"
            log.exception("internal error handling event")
        message = {
            "v": 1,
            "type": "reject",
            "revision": 0,
            "payload": {
                "seq": seq,
                "code": code,
                "reason": str(exc),
                "offset": getattr(exc, "offset", None),
                "suggestions": getattr(exc, "suggestions", None),
            },
        }
        await ws.send_json(message)

    async def apply(self, event: Event, ws: WebSocket, client_id: str):
        try:
            if event.type in HEAVY_EVENTS and event.solution_id is not None:
                await self._apply_heavy(event, client_id)
            else:
                async with self._lock:
                    state, messages, targets = await asyncio.to_thread(
                        apply_event, self._state, event
                    )
                    self._state = state
                    if event.type in LOGGED_EVENTS:
                        self.event_log.append(event)
                    await self._broadcast(messages, targets, client_id)
        except Exception as exc:
            await self._reject(ws, event.seq, exc)

    async def _apply_heavy(self, event: Event, client_id: str):
        # phase 1: pin the revision the computation runs against
        async with self._lock:
            base_state = self._state
            base_rev = base_state.solution(event.solution_id).revision
            if (
                event.expected_revision is not None
                and event.expected_revision != base_rev
            ):
                raise RevisionConflict(event.solution_id, event.expected_revision, base_rev)
        # phase 2: compute off-loop against the immutable snapshot
        new_state, _, _ = await asyncio.to_thread(apply_event, base_state, event)
        new_sol = new_state.solutions[event.solution_id]
        # phase 3: completion re-enters; drop it if the solution moved on
        async with self._lock:
            current = self._state.solution(event.solution_id)
            if current.revision != base_rev:
                raise RevisionConflict(event.solution_id, base_rev, current.revision)
            solutions = dict(self._state.solutions)
            solutions[event.solution_id] = new_sol
            self._state = replace(self._state, solutions=solutions)
            self.event_log.append(event)
            message = delta_message(self._state, event, new_sol)
            await self._broadcast([message], "all", client_id)

    async def handle_message(self, raw: dict, ws: WebSocket, client_id: str):
        seq = int(raw.get("seq") or 0)
        try:
            if raw.get("type") == "command":
                async with self._lock:
                    event = command_to_event(
                        self._state, raw.get("text", ""), raw.get("context"), client_id, seq
                    )
            else:
                event = Event.from_wire(raw, client_id)
        except Exception as exc:
            await self._reject(ws, seq, exc)
            return
        await self.apply(event, ws, client_id)

    def log_document(self) -> dict:
        return sessionmod.event_log_document(self._state, self.event_log)


def build_app(
    state: SessionState,
    ui_dir: str | None = None,
    preload_events: list[Event] | None = None,
) -> FastAPI:
    app = FastAPI(title="edakit session service")
    service = SessionService(state, preload_events=preload_events)
    app.state.service = service

    @app.get("/health")
    def health():
        return {"status": "ok", "solutions": len(service.state.solutions)}

    @app.get("/log")
    def event_log():
        return service.log_document()

    @app.get("/overview")
    def get_overview():
        return overview(service.state)

    @app.get("/table/{solution_id}")
    def table_page(solution_id: int, offset: int = 0, limit: int = 50):
        """Raw data page for the table view: cells, missing/outlier flags
        and current cluster labels for the solution's active rows."""
        return sessionmod.table_payload(
            service.state, solution_id, offset=offset, limit=limit
        )

    @app.get("/distributions/{solution_id}")
    def distributions(solution_id: int, bins: int = 20):
        return sessionmod.distributions_payload(service.state, solution_id, bins=bins)

    @app.get("/correlations/{solution_id}")
    def correlations(solution_id: int, top_k: int = 10):
        return sessionmod.correlations_payload(service.state, solution_id, top_k=top_k)

    @app.get("/ranking/{solution_id}")
    def ranking(solution_id: int, method: str = "variance", top_n: int | None = None, dims: int = 2):
        from fastapi import HTTPException

        try:
            return sessionmod.ranking_payload(
                service.state, solution_id, method=method, top_n=top_n, dims=dims
            )
        except EdakitError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        client_id = await service.register(ws)
        try:
            while True:
                raw = await ws.receive_json()
                await service.handle_message(raw, ws, client_id)
        except WebSocketDisconnect:
            pass
        finally:
            await service.unregister(client_id)

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app
