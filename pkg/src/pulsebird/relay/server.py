"""Server-authoritative game relay.

One asyncio process hosts many independent sessions.  Each session owns
a ``GameSession`` (world + HR controller + log) and a loop task that
ticks at the configured rate on the wall clock; connection handlers only
validate frames and push them onto per-session queues, so all state
mutation stays on the loop.

Ingest-to-effect path: a heart-rate or input frame is queued on arrival
and applied at the top of the next tick, so the effect is visible in
that tick's broadcast — one tick of added latency (17 ms at 60 Hz).

Backpressure: per-connection outboxes are bounded; when one fills, the
oldest *state* frame is discarded (a newer one is always coming).
Control frames — acks, errors, session lifecycle — are never dropped,
and inbound input/hr queues are unbounded so no player action is lost.

HTTP GET /health on the same port returns the active session count.
"""

from __future__ import annotations

import asyncio
import http
import json
import logging
import uuid
from collections import deque
from pathlib import Path

from websockets.asyncio.server import serve

from .. import records
from ..adaptation import is_plausible
from ..analysis import PanasResponse, PxiItem, PxiResponse
from ..engine import ConfigError, GameConfig, LevelSpec
from ..session import GameSession
from . import protocol as proto

logger = logging.getLogger(__name__)

__all__ = ["RelayServer", "RelaySession"]

OUTBOX_LIMIT = 64


class OutBox:
    """Bounded send queue that sheds only droppable (state) frames."""

    def __init__(self, limit: int = OUTBOX_LIMIT) -> None:
        self.limit = limit
        self.q: deque[tuple[str, bool]] = deque()
        self.dropped = 0
        self._ready = asyncio.Event()

    def put(self, payload: str, droppable: bool) -> None:
        if len(self.q) >= self.limit:
            for i, (_, d) in enumerate(self.q):
                if d:
                    del self.q[i]
                    self.dropped += 1
                    break
            else:
                if droppable:  # nothing sheddable and neither is this
                    self.dropped += 1
                    return
        self.q.append((payload, droppable))
        self._ready.set()

    async def get(self) -> str:
        while not self.q:
            self._ready.clear()
            await self._ready.wait()
        payload, _ = self.q.popleft()
        return payload


class ClientConn:
    """One websocket bound to a role within a session."""

    def __init__(self, ws) -> None:
        self.ws = ws
        self.role: str | None = None
        self.session: "RelaySession | None" = None
        self.last_seq_in: int | None = None
        self._seq_out = 0
        self.outbox = OutBox()
        self.sender_task: asyncio.Task | None = None

    def next_seq(self) -> int:
        self._seq_out += 1
        return self._seq_out

    def send(self, frame: dict, droppable: bool = False) -> None:
        self.outbox.put(proto.encode(frame), droppable)

    def accepts_seq(self, seq) -> bool:
        """Monotonic per-sender sequence check; stale frames are dropped."""
        if not isinstance(seq, int):
            return False
        if self.last_seq_in is not None and seq <= self.last_seq_in:
            return False
        self.last_seq_in = seq
        return True

    async def run_sender(self) -> None:
        try:
            while True:
                await self.ws.send(await self.outbox.get())
        except Exception:
            pass  # connection gone; the reader side handles cleanup


class RelaySession:
    """Relay-side wrapper of one game session and its connections."""

    def __init__(
        self,
        server: "RelayServer",
        session_id: str,
        level: LevelSpec,
        config: GameConfig,
        seed: int,
        pivot: float,
    ) -> None:
        self.server = server
        self.session_id = session_id
        self.level = level
        self.config = config
        self.seed = seed

        record = records.SessionRecord(
            session_id=session_id, level=level, config=config, seed=seed, pivot=pivot
        )
        path = None
        if server.log_dir is not None:
            path = Path(server.log_dir) / f"{session_id}.jsonl"
        self.writer = records.RecordWriter(path, record, fsync=server.fsync)
        self.game = GameSession(
            config=config,
            level=level,
            seed=seed,
            session_id=session_id,
            writer=self.writer,
            pivot=pivot,
        )

        self.player: ClientConn | None = None
        self.sensors: set[ClientConn] = set()
        self.observers: set[ClientConn] = set()

        self.hr_queue: deque[tuple[float, int, str]] = deque()
        self.input_queue: deque[tuple[ClientConn, int, bool]] = deque()
        self.loop_task: asyncio.Task | None = None
        self.questionnaire_count = 0
        self.closed = False

    # -- membership -------------------------------------------------------

    def attach(self, conn: ClientConn, role: str) -> None:
        if role == proto.ROLE_PLAYER:
            if self.player is not None:
                raise proto.ProtocolError("player_taken", "session already has a player")
            self.player = conn
        elif role == proto.ROLE_SENSOR:
            self.sensors.add(conn)
        elif role == proto.ROLE_OBSERVER:
            self.observers.add(conn)
        else:
            raise proto.ProtocolError("bad_role", f"unknown role {role!r}")
        conn.role = role
        conn.session = self

    def detach(self, conn: ClientConn) -> None:
        if self.player is conn:
            self.player = None
        self.sensors.discard(conn)
        self.observers.discard(conn)
        if self.player is None and not self.sensors and not self.observers:
            self.server.maybe_reap(self)

    @property
    def phase_name(self) -> str:
        if self.game.ended:
            return "ended"
        if not self.game.baseline_ready:
            return "collecting_baseline"
        if self.loop_task is None:
            return "ready"
        return "running"

    @property
    def active(self) -> bool:
        return not self.game.ended

    # -- frame ingest (connection handlers) ---------------------------------

    def on_hr(self, conn: ClientConn, frame: dict) -> None:
        if conn.role not in (proto.ROLE_SENSOR, proto.ROLE_PLAYER):
            raise proto.ProtocolError("role_mismatch", f"{conn.role} may not send hr")
        bpm = frame.get("bpm")
        ts = frame.get("ts", 0)
        if not isinstance(bpm, (int, float)):
            raise proto.ProtocolError("bad_payload", "hr frame needs numeric bpm")
        if not is_plausible(float(bpm)):
            conn.send(
                proto.ack_frame(
                    self.session_id, conn.next_seq(), frame["seq"], "dropped", "bpm out of range"
                )
            )
            return
        if self.game.ended:
            conn.send(
                proto.ack_frame(
                    self.session_id, conn.next_seq(), frame["seq"], "dropped", "session ended"
                )
            )
            return
        source = f"{conn.role}-{id(conn) & 0xFFFF:04x}"
        if self.loop_task is None:
            # no tick loop yet: apply immediately (baseline / pre-start)
            status = self.game.offer_hr(float(bpm), int(ts), source)
            self._after_prestart_hr(status)
        else:
            self.hr_queue.append((float(bpm), int(ts), source))
        conn.send(proto.ack_frame(self.session_id, conn.next_seq(), frame["seq"], "ok"))

    def _after_prestart_hr(self, status: str) -> None:
        if status == "baseline" and self.game.baseline_ready:
            self.broadcast_status()
            self.maybe_start()

    def on_input(self, conn: ClientConn, frame: dict) -> None:
        if conn.role != proto.ROLE_PLAYER:
            raise proto.ProtocolError("role_mismatch", f"{conn.role} may not send input")
        flap = frame.get("flap")
        if not isinstance(flap, bool):
            raise proto.ProtocolError("bad_payload", "input frame needs boolean flap")
        if self.game.ended:
            conn.send(
                proto.ack_frame(
                    self.session_id, conn.next_seq(), frame["seq"], "dropped", "session ended"
                )
            )
            return
        if not self.game.baseline_ready:
            conn.send(
                proto.ack_frame(
                    self.session_id,
                    conn.next_seq(),
                    frame["seq"],
                    "dropped",
                    "baseline incomplete",
                )
            )
            return
        # acked when applied, so acknowledged == applied holds exactly
        self.input_queue.append((conn, frame["seq"], flap))
        self.maybe_start()

    def on_questionnaire(self, conn: ClientConn, frame: dict) -> None:
        if conn.role != proto.ROLE_PLAYER:
            raise proto.ProtocolError("role_mismatch", f"{conn.role} may not send questionnaires")
        instrument = frame.get("instrument")
        items = frame.get("items")
        if instrument == "panas":
            if not isinstance(items, list) or len(items) != 20:
                raise proto.ProtocolError(
                    "bad_payload", "panas needs 20 items: 10 positive then 10 negative"
                )
            PanasResponse(tuple(items[:10]), tuple(items[10:]))  # raises on bad values
        elif instrument == "pxi":
            if not isinstance(items, list):
                raise proto.ProtocolError("bad_payload", "pxi needs an item list")
            PxiResponse(tuple(PxiItem(i["construct"], i["value"]) for i in items))
        else:
            raise proto.ProtocolError("bad_payload", f"unknown instrument {instrument!r}")
        self._store_questionnaire(instrument, items)
        conn.send(proto.ack_frame(self.session_id, conn.next_seq(), frame["seq"], "ok"))

    def _store_questionnaire(self, instrument: str, items: list) -> None:
        self.questionnaire_count += 1
        if self.server.log_dir is None:
            return
        path = Path(self.server.log_dir) / f"{self.session_id}.questionnaires.jsonl"
        line = json.dumps(
            {
                "type": "questionnaire",
                "session_id": self.session_id,
                "order": self.questionnaire_count,
                "instrument": instrument,
                "items": items,
            },
            sort_keys=True,
            separators=(",", ":"),
        )
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")

    # -- lifecycle ----------------------------------------------------------

    def maybe_start(self) -> None:
        if self.loop_task is None and self.game.baseline_ready and self.input_queue:
            self.loop_task = asyncio.get_running_loop().create_task(self._run_loop())

    async def _run_loop(self) -> None:
        loop = asyncio.get_running_loop()
        dt = self.config.dt
        next_t = loop.time()
        try:
            while not self.game.ended:
                now = loop.time()
                if next_t > now:
                    await asyncio.sleep(next_t - now)
                next_t += dt
                if next_t < loop.time() - 0.25:  # fell far behind; resync
                    next_t = loop.time()
                self._tick_once()
        except Exception:
            logger.exception("session %s loop crashed", self.session_id)
        finally:
            self.writer.close()

    def _tick_once(self) -> None:
        while self.hr_queue:
            bpm, ts, source = self.hr_queue.popleft()
            self.game.offer_hr(bpm, ts, source)
        applied = self.input_queue.popleft() if self.input_queue else None
        self.game.step(applied[2] if applied is not None else False)
        if applied is not None:
            conn, of_seq, _ = applied
            conn.send(proto.ack_frame(self.session_id, conn.next_seq(), of_seq, "ok"))
        self.broadcast_state()
        if self.game.ended:
            # inputs still in flight were never applied; say so
            while self.input_queue:
                conn, of_seq, _ = self.input_queue.popleft()
                conn.send(
                    proto.ack_frame(self.session_id, conn.next_seq(), of_seq, "dropped", "session ended")
                )
            self._broadcast_end()

    # -- outbound ----------------------------------------------------------

    def _state_receivers(self) -> list[ClientConn]:
        conns = list(self.observers)
        if self.player is not None:
            conns.append(self.player)
        return conns

    def broadcast_state(self) -> None:
        state = self.game.state()
        for conn in self._state_receivers():
            frame = proto.state_frame(
                self.session_id, conn.next_seq(), state, self.level, self.game.threshold_bpm
            )
            conn.send(frame, droppable=True)

    def send_current_state(self, conn: ClientConn) -> None:
        frame = proto.state_frame(
            self.session_id, conn.next_seq(), self.game.state(), self.level, self.game.threshold_bpm
        )
        conn.send(frame)

    def broadcast_status(self) -> None:
        collected = len(self.game.collector.values) if self.game.collector else None
        for conn in self._state_receivers():
            frame = proto.status_frame(
                self.session_id,
                conn.next_seq(),
                self.phase_name,
                baseline_collected=collected,
                baseline_needed=self.game.collector.needed if self.game.collector else None,
                threshold_bpm=self.game.threshold_bpm if self.level.hr_adaptive else None,
            )
            conn.send(frame)

    def _broadcast_end(self) -> None:
        state = self.game.state()
        for conn in list(self.sensors) + self._state_receivers():
            frame = proto.session_end_frame(
                self.session_id,
                conn.next_seq(),
                state.reason.value,
                state.elapsed,
                state.score,
            )
            conn.send(frame)
        self.server.session_ended(self)

    def close(self) -> None:
        if self.closed:
            return
        self.closed = True
        if self.loop_task is not None:
            self.loop_task.cancel()
        self.writer.close()


class RelayServer:
    """Hosts sessions over websockets; plain HTTP /health on the same port."""

    def __init__(
        self,
        host: str = "127.0.0.1",
        port: int = 8777,
        log_dir: str | Path | None = None,
        max_sessions: int = 64,
        fsync: bool = False,
        default_config: GameConfig | None = None,
    ) -> None:
        self.host = host
        self.port = port
        self.log_dir = Path(log_dir) if log_dir is not None else None
        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)
        self.max_sessions = max_sessions
        self.fsync = fsync
        self.default_config = default_config or GameConfig()
        self.sessions: dict[str, RelaySession] = {}
        self._server = None

    # -- session registry ---------------------------------------------------

    @property
    def active_session_count(self) -> int:
        return sum(1 for s in self.sessions.values() if s.active)

    def open_session(
        self,
        level: LevelSpec,
        config: GameConfig,
        seed: int,
        session_id: str | None = None,
        pivot: float = 5.0,
    ) -> RelaySession:
        if session_id is None:
            session_id = f"s-{uuid.uuid4().hex[:12]}"
        if session_id in self.sessions:
            raise proto.ProtocolError("duplicate_session", f"session {session_id!r} already exists")
        if self.active_session_count >= self.max_sessions:
            raise proto.ProtocolError("capacity", f"server is at max_sessions={self.max_sessions}")
        session = RelaySession(self, session_id, level, config, seed, pivot)
        self.sessions[session_id] = session
        logger.info("opened session %s (level %d, seed %d)", session_id, level.level_id, seed)
        return session

    def session_ended(self, session: RelaySession) -> None:
        logger.info("session %s ended", session.session_id)

    def maybe_reap(self, session: RelaySession) -> None:
        if session.game.ended:
            session.close()
            self.sessions.pop(session.session_id, None)

    # -- websocket plumbing ---------------------------------------------------

    async def _process_request(self, connection, request):
        if request.path == "/health":
            body = json.dumps({"active_sessions": self.active_session_count})
            return connection.respond(http.HTTPStatus.OK, body + "\n")
        return None

    async def _handler(self, ws) -> None:
        conn = ClientConn(ws)
        conn.sender_task = asyncio.get_running_loop().create_task(conn.run_sender())
        try:
            async for raw in ws:
                try:
                    frame = proto.decode(raw)
                except proto.ProtocolError as e:
                    conn.send(proto.error_frame(None, conn.next_seq(), e.code, e.message))
                    continue
                if not conn.accepts_seq(frame.get("seq")):
                    continue  # stale or unusable sequence number: drop
                try:
                    self._dispatch(conn, frame)
                except proto.ProtocolError as e:
                    sid = conn.session.session_id if conn.session else None
                    conn.send(proto.error_frame(sid, conn.next_seq(), e.code, e.message))
        finally:
            if conn.sender_task is not None:
                conn.sender_task.cancel()
            if conn.session is not None:
                conn.session.detach(conn)

    def _dispatch(self, conn: ClientConn, frame: dict) -> None:
        ftype = frame["type"]
        if ftype == "open_session":
            self._handle_open(conn, frame)
        elif ftype == "join":
            self._handle_join(conn, frame)
        elif conn.session is None:
            raise proto.ProtocolError("not_joined", "bind to a session first (open_session/join)")
        elif ftype == "hr":
            conn.session.on_hr(conn, frame)
        elif ftype == "input":
            conn.session.on_input(conn, frame)
        elif ftype == "questionnaire":
            conn.session.on_questionnaire(conn, frame)

    def _handle_open(self, conn: ClientConn, frame: dict) -> None:
        if conn.session is not None:
            raise proto.ProtocolError("already_joined", "connection already bound to a session")
        try:
            level = LevelSpec.from_dict(frame["level"]) if isinstance(frame.get("level"), dict) \
                else LevelSpec.level(int(frame.get("level", 0)))
        except (ConfigError, KeyError, TypeError, ValueError) as e:
            raise proto.ProtocolError("bad_level", f"malformed level spec: {e}") from e
        config = self.default_config
        if "config" in frame:
            try:
                config = GameConfig.from_dict({**config.to_dict(), **frame["config"]})
            except (ConfigError, TypeError) as e:
                raise proto.ProtocolError("bad_config", str(e)) from e
        seed = frame.get("seed")
        if seed is None:
            seed = uuid.uuid4().int & 0xFFFFFFFFFFFFFFFF
        session = self.open_session(
            level, config, int(seed), session_id=frame.get("session_id"),
            pivot=float(frame.get("pivot", 5.0)),
        )
        session.attach(conn, proto.ROLE_PLAYER)
        conn.send(
            proto.session_start_frame(session.session_id, conn.next_seq(), level, session.seed, config)
        )
        session.broadcast_status()

    def _handle_join(self, conn: ClientConn, frame: dict) -> None:
        if conn.session is not None:
            raise proto.ProtocolError("already_joined", "connection already bound to a session")
        session = self.sessions.get(frame.get("session_id"))
        if session is None:
            raise proto.ProtocolError("no_session", f"unknown session {frame.get('session_id')!r}")
        role = frame.get("role")
        if role not in proto.ROLES:
            raise proto.ProtocolError("bad_role", f"role must be one of {proto.ROLES}")
        session.attach(conn, role)
        conn.send(
            proto.joined_frame(session.session_id, conn.next_seq(), role, session.level, session.config)
        )
        if role == proto.ROLE_OBSERVER:
            # late joiners see the world immediately, then the live stream
            session.send_current_state(conn)

    # -- lifecycle ----------------------------------------------------------

    async def serve_forever(self) -> None:
        async with serve(
            self._handler,
            self.host,
            self.port,
            process_request=self._process_request,
        ) as server:
            self._server = server
            logger.info("relay listening on ws://%s:%d", self.host, self.port)
            await asyncio.get_running_loop().create_future()

    async def start(self):
        """Start serving without blocking; returns the websockets server."""
        self._server = await serve(
            self._handler,
            self.host,
            self.port,
            process_request=self._process_request,
        )
        return self._server

    async def close(self) -> None:
        for session in list(self.sessions.values()):
            session.close()
        self.sessions.clear()
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
            self._server = None
