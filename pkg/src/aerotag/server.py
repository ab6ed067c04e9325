"""WebSocket sync hub: snapshots, totally-ordered mutation broadcast,
server-side geotagging of pixel annotations, and view projection.

Every frame is one JSON object with a ``type`` field. Clients start with
``hello`` and get a full snapshot; accepted mutations are persisted to the
event log and broadcast (sender included) with the server-assigned ``seq``,
so every session observes the same gap-free order. Geodesy runs only here:
clients send pixels and receive markers.
"""

from __future__ import annotations

import asyncio
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from websockets.asyncio.server import ServerConnection, serve
from websockets.exceptions import ConnectionClosed

from aerotag.errors import (
    AerotagError,
    MalformedEvent,
    NoGroundIntersection,
    OutOfFrame,
    UnknownId,
)
from aerotag.geodesy import GeodeticCoord
from aerotag.poi import (
    POI_KINDS,
    EventLog,
    Poi,
    PoiOp,
    PoiStore,
    TrackPoint,
    replay_file,
)
from aerotag.projection import (
    Attitude,
    CameraIntrinsics,
    GimbalFrame,
    GroundModel,
    PixelCoord,
    UavPose,
    geolocation_to_pixel,
    pixel_to_geolocation,
)
from aerotag.sim.flightlog import FlightLog, load_flight_log
from aerotag.sim.noise import NoiseModel

logger = logging.getLogger(__name__)

DEFAULT_PORT = 8750
OUTBOUND_QUEUE_LIMIT = 1024

MUTATION_TYPES = {"poi.create", "poi.update", "poi.delete", "poi.track"}
KNOWN_TYPES = MUTATION_TYPES | {"hello", "annotate.pixel", "view.project"}


@dataclass
class ServerConfig:
    intrinsics: CameraIntrinsics = field(
        default_factory=lambda: CameraIntrinsics.from_fov(83.0, 1920, 1080)
    )
    noise: NoiseModel = field(default_factory=NoiseModel)
    ground_model: GroundModel = GroundModel.PLANE
    gimbal_frame: GimbalFrame = GimbalFrame.BODY
    interpolate_pose: bool = False


@dataclass
class _Session:
    client_id: str
    conn: ServerConnection
    queue: asyncio.Queue = field(
        default_factory=lambda: asyncio.Queue(maxsize=OUTBOUND_QUEUE_LIMIT)
    )
    writer: Optional[asyncio.Task] = None


def _dumps(msg: dict) -> str:
    return json.dumps(msg, sort_keys=True, separators=(",", ":"))


def _now_ms() -> int:
    return int(time.time() * 1000)


class SyncServer:
    """Session and mutation hub over one PoiStore (the single writer)."""

    def __init__(
        self,
        store: Optional[PoiStore] = None,
        event_log: Optional[EventLog] = None,
        flight_logs: Optional[dict[str, FlightLog]] = None,
        config: Optional[ServerConfig] = None,
    ) -> None:
        self.store = store if store is not None else PoiStore()
        self.event_log = event_log
        self.flight_logs = flight_logs or {}
        self.config = config or ServerConfig()
        self._sessions: dict[int, _Session] = {}

    @classmethod
    def from_paths(
        cls,
        event_log_path: Optional[str | Path] = None,
        flight_log_paths: Optional[dict[str, str | Path]] = None,
        config: Optional[ServerConfig] = None,
    ) -> "SyncServer":
        """Rebuild store state from the event log and load flight logs."""
        store = PoiStore()
        event_log = None
        if event_log_path is not None:
            event_log = EventLog(event_log_path)
            if event_log.path.exists():
                store = replay_file(event_log.path)
        logs = {
            uav_id: load_flight_log(p)
            for uav_id, p in (flight_log_paths or {}).items()
        }
        return cls(store=store, event_log=event_log,
                   flight_logs=logs, config=config)

    # -- session plumbing ---------------------------------------------------

    async def handler(self, conn: ServerConnection) -> None:
        session: Optional[_Session] = None
        try:
            async for raw in conn:
                try:
                    msg = json.loads(raw)
                    if not isinstance(msg, dict):
                        raise ValueError("frame must be a JSON object")
                except ValueError as exc:
                    await self._send_now(conn, _error("malformed", str(exc)))
                    continue
                mtype = msg.get("type")
                if session is None:
                    if mtype == "hello":
                        session = self._register(conn, msg)
                    else:
                        await self._send_now(
                            conn,
                            _error("unauthorized_before_hello",
                                   "first message must be hello"),
                        )
                    continue
                self._dispatch(session, mtype, msg)
        except ConnectionClosed:
            pass
        finally:
            if session is not None:
                self._unregister(session)

    def _register(self, conn: ServerConnection, msg: dict) -> _Session:
        client_id = msg.get("client_id")
        if not isinstance(client_id, str) or not client_id:
            client_id = f"client-{id(conn):x}"
        session = _Session(client_id=client_id, conn=conn)
        session.writer = asyncio.get_running_loop().create_task(
            self._write_loop(session)
        )
        # registration and the snapshot reply happen atomically (no await),
        # so every later broadcast has seq > the snapshot seq, gap-free
        self._sessions[id(conn)] = session
        self._enqueue(session, {
            "type": "snapshot",
            "seq": self.store.last_seq,
            "pois": self.store.snapshot_wire(),
        })
        logger.info("session open: %s", client_id)
        return session

    def _unregister(self, session: _Session) -> None:
        self._sessions.pop(id(session.conn), None)
        if session.writer is not None:
            session.writer.cancel()
        logger.info("session closed: %s", session.client_id)

    async def _write_loop(self, session: _Session) -> None:
        try:
            while True:
                msg = await session.queue.get()
                await session.conn.send(msg)
        except (ConnectionClosed, asyncio.CancelledError):
            pass

    def _enqueue(self, session: _Session, msg: dict) -> None:
        try:
            session.queue.put_nowait(_dumps(msg))
        except asyncio.QueueFull:
            logger.warning("outbound overflow, dropping %s", session.client_id)
            self._unregister(session)
            asyncio.get_running_loop().create_task(session.conn.close())

    async def _send_now(self, conn: ServerConnection, msg: dict) -> None:
        try:
            await conn.send(_dumps(msg))
        except ConnectionClosed:
            pass

    def _broadcast(self, msg: dict) -> None:
        for session in list(self._sessions.values()):
            self._enqueue(session, msg)

    # -- message dispatch ---------------------------------------------------

    def _dispatch(self, session: _Session, mtype, msg: dict) -> None:
        try:
            if mtype in MUTATION_TYPES:
                self._handle_mutation(session, mtype, msg)
            elif mtype == "annotate.pixel":
                self._handle_annotate(session, msg)
            elif mtype == "view.project":
                self._handle_view_project(session, msg)
            elif mtype == "hello":
                self._enqueue(session, _error("malformed", "duplicate hello"))
            else:
                self._enqueue(
                    session, _error("malformed", f"unknown type {mtype!r}")
                )
        except MalformedEvent as exc:
            self._enqueue(session, _error("malformed", str(exc)))
        except UnknownId as exc:
            self._enqueue(session, _error("unknown_id", str(exc)))

    def _handle_mutation(self, session: _Session, mtype: str, msg: dict) -> None:
        op = PoiOp(mtype.split(".", 1)[1])
        poi = point = None
        poi_id = None
        if op in (PoiOp.CREATE, PoiOp.UPDATE):
            if "poi" not in msg:
                raise MalformedEvent(f"{mtype} needs a poi")
            poi = Poi.from_wire(msg["poi"])
            ts_ms = poi.updated_ms or poi.created_ms or _now_ms()
        elif op is PoiOp.TRACK:
            poi_id = msg.get("id")
            if not isinstance(poi_id, str) or "point" not in msg:
                raise MalformedEvent("poi.track needs id and point")
            point = TrackPoint.from_wire(msg["point"])
            ts_ms = point.ts_ms
        else:
            poi_id = msg.get("id")
            if not isinstance(poi_id, str):
                raise MalformedEvent("poi.delete needs an id")
            ts_ms = _now_ms()
        self._apply_and_fanout(session, op, ts_ms=ts_ms, poi=poi,
                               point=point, poi_id=poi_id)

    def _apply_and_fanout(self, session: _Session, op: PoiOp, *, ts_ms: int,
                          poi: Optional[Poi], point: Optional[TrackPoint],
                          poi_id: Optional[str]) -> None:
        """The serialization point: apply, persist, broadcast, ack."""
        ev = self.store.propose(op, ts_ms=ts_ms, client=session.client_id,
                                poi=poi, point=point, poi_id=poi_id)
        if ev is None:
            self._enqueue(session, _error("stale", "mutation lost the "
                                          "last-writer-wins race"))
            return
        if self.event_log is not None:
            self.event_log.append(ev)
        out: dict = {"type": f"poi.{ev.op.value}", "seq": ev.seq}
        if ev.op in (PoiOp.CREATE, PoiOp.UPDATE):
            applied = self.store.get(ev.poi_id or "")
            assert applied is not None
            out["poi"] = applied.to_wire()
        elif ev.op is PoiOp.TRACK:
            out["id"] = ev.poi_id
            out["point"] = ev.point.to_wire()  # type: ignore[union-attr]
        else:
            out["id"] = ev.poi_id
        self._enqueue(session, {"type": "ack", "seq": ev.seq})
        self._broadcast(out)

    def _resolve_pose(self, msg: dict) -> UavPose:
        if "pose" in msg and msg["pose"] is not None:
            return pose_from_wire(msg["pose"])
        uav_id = msg.get("uav_id")
        t = msg.get("t")
        if uav_id is None or t is None:
            raise MalformedEvent("need pose or uav_id + t")
        log = self.flight_logs.get(uav_id)
        if log is None:
            raise _UnknownUav(f"no flight log for uav {uav_id!r}")
        if not log.in_range(float(t)):
            raise _OutOfLogRange(
                f"t={t} outside [{log.t_min}, {log.t_max}] for {uav_id!r}"
            )
        return log.pose_at(float(t), interpolate=self.config.interpolate_pose)

    def _resolve_intrinsics(self, msg: dict) -> CameraIntrinsics:
        intr = msg.get("intr")
        if intr is None:
            return self.config.intrinsics
        try:
            return CameraIntrinsics.from_fov(
                float(intr["fov_deg"]),
                int(intr["width"]),
                int(intr["height"]),
                mode=intr.get("mode", "horizontal"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedEvent(f"bad intrinsics: {exc}") from exc

    def _handle_annotate(self, session: _Session, msg: dict) -> None:
        try:
            pose = self._resolve_pose(msg)
        except _UnknownUav as exc:
            self._enqueue(session, _error("unknown_uav", str(exc)))
            return
        except _OutOfLogRange as exc:
            self._enqueue(session, _error("out_of_log_range", str(exc)))
            return
        intr = self._resolve_intrinsics(msg)
        kind = msg.get("kind")
        if kind not in POI_KINDS:
            raise MalformedEvent(f"unknown poi kind {kind!r}")
        text = msg.get("text")
        if text is not None and not isinstance(text, str):
            raise MalformedEvent("text must be a string")
        try:
            u = float(msg["u"])
            v = float(msg["v"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedEvent(f"bad pixel: {exc}") from exc
        try:
            geo = pixel_to_geolocation(
                pose, intr, PixelCoord(u, v),
                mode=self.config.ground_model,
                gimbal_frame=self.config.gimbal_frame,
            )
        except OutOfFrame as exc:
            raise MalformedEvent(str(exc)) from exc
        except NoGroundIntersection as exc:
            self._enqueue(session, _error("no_ground_intersection", str(exc)))
            return
        poi = Poi(
            id=f"poi-{self.store.last_seq + 1:06d}",
            kind=kind,
            geolocation=geo,
            uncertainty_radius_m=self.config.noise.cep68_for(pose.satellites),
            text_note=text,
        )
        self._apply_and_fanout(session, PoiOp.CREATE, ts_ms=_now_ms(),
                               poi=poi, point=None, poi_id=None)

    def _handle_view_project(self, session: _Session, msg: dict) -> None:
        try:
            pose = self._resolve_pose(msg)
        except _UnknownUav as exc:
            self._enqueue(session, _error("unknown_uav", str(exc)))
            return
        except _OutOfLogRange as exc:
            self._enqueue(session, _error("out_of_log_range", str(exc)))
            return
        intr = self._resolve_intrinsics(msg)
        markers = []
        for poi in self.store.snapshot():
            proj = geolocation_to_pixel(
                pose, intr, poi.geolocation,
                gimbal_frame=self.config.gimbal_frame,
            )
            if proj.depth_m > 0.0:
                radius_px = poi.uncertainty_radius_m * intr.focal_px / proj.depth_m
            else:
                radius_px = 0.0
            markers.append({
                "id": poi.id,
                "kind": poi.kind,
                "u": proj.pixel.u,
                "v": proj.pixel.v,
                "visible": proj.visible,
                "radius_px": radius_px,
            })
        self._enqueue(session, {"type": "view.overlays", "markers": markers})

    # -- lifecycle ----------------------------------------------------------

    async def serve(self, host: str = "127.0.0.1", port: int = DEFAULT_PORT):
        """Start listening; returns the websockets server object."""
        return await serve(self.handler, host, port)

    async def run_forever(self, host: str = "0.0.0.0",
                          port: int = DEFAULT_PORT) -> None:
        async with await self.serve(host, port) as ws_server:
            addr = ws_server.sockets[0].getsockname()
            logger.info("listening on ws://%s:%s", addr[0], addr[1])
            await asyncio.Future()


class _UnknownUav(AerotagError):
    pass


class _OutOfLogRange(AerotagError):
    pass


def _error(code: str, text: str) -> dict:
    return {"type": "error", "code": code, "msg": text}


def pose_from_wire(d: dict) -> UavPose:
    """Inline pose message: same field names as a flight log record."""
    try:
        return UavPose(
            position=GeodeticCoord(float(d["lat"]), float(d["lon"]),
                                   float(d["alt"])),
            uav_attitude=Attitude(float(d.get("roll", 0.0)),
                                  float(d.get("pitch", 0.0)),
                                  float(d.get("yaw", 0.0))),
            gimbal_attitude=Attitude(float(d.get("g_roll", 0.0)),
                                     float(d.get("g_pitch", 0.0)),
                                     float(d.get("g_yaw", 0.0))),
            agl_m=float(d["agl"]),
            satellites=int(d.get("sats", 0)),
            timestamp_s=float(d.get("t", 0.0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedEvent(f"bad pose: {exc}") from exc
