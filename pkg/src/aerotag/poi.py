"""Versioned POI store: last-writer-wins merge over an append-only event log.

The store is the single serialization point for mutations. Accepted events
are appended to a JSON-lines log and replaying that log rebuilds the exact
store state (byte-identical snapshots). Conflict resolution is
last-writer-wins on the (timestamp, client id) pair; deletes leave a
session tombstone so late mutations of a deleted POI stay dead instead of
resurrecting it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Optional

from aerotag.errors import CorruptLog, MalformedEvent, UnknownId
from aerotag.geodesy import GeodeticCoord

POI_KINDS = (
    "victim", "suspect", "weapon", "vehicle",
    "hazard", "evidence", "responder", "landmark",
)


class PoiOp(str, Enum):
    CREATE = "create"
    UPDATE = "update"
    DELETE = "delete"
    TRACK = "track"


@dataclass(frozen=True)
class TrackPoint:
    ts_ms: int
    location: GeodeticCoord

    def to_wire(self) -> dict:
        return {
            "ts_ms": self.ts_ms,
            "lat": self.location.lat_deg,
            "lon": self.location.lon_deg,
            "alt": self.location.alt_m,
        }

    @classmethod
    def from_wire(cls, d: dict) -> "TrackPoint":
        _expect_keys(d, {"ts_ms", "lat", "lon", "alt"}, "track point")
        try:
            loc = GeodeticCoord(float(d["lat"]), float(d["lon"]), float(d["alt"]))
        except (TypeError, ValueError) as exc:
            raise MalformedEvent(f"bad track point: {exc}") from exc
        return cls(ts_ms=_int_field(d, "ts_ms"), location=loc)


@dataclass
class Poi:
    """Geolocated, symbol-typed point of interest with track history."""

    id: str
    kind: str
    geolocation: GeodeticCoord
    uncertainty_radius_m: float = 0.0
    source: str = ""
    text_note: Optional[str] = None
    version: int = 1
    created_ms: int = 0
    updated_ms: int = 0
    track: list[TrackPoint] = field(default_factory=list)

    def to_wire(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "lat": self.geolocation.lat_deg,
            "lon": self.geolocation.lon_deg,
            "alt": self.geolocation.alt_m,
            "unc_m": self.uncertainty_radius_m,
            "source": self.source,
            "text": self.text_note,
            "version": self.version,
            "created_ms": self.created_ms,
            "updated_ms": self.updated_ms,
            "track": [p.to_wire() for p in self.track],
        }

    @classmethod
    def from_wire(cls, d: dict) -> "Poi":
        _expect_keys(
            d,
            {"id", "kind", "lat", "lon", "alt", "unc_m", "source", "text",
             "version", "created_ms", "updated_ms", "track"},
            "poi",
            optional={"unc_m", "source", "text", "version",
                      "created_ms", "updated_ms", "track"},
        )
        if not isinstance(d.get("id"), str) or not d["id"]:
            raise MalformedEvent("poi id must be a non-empty string")
        kind = d.get("kind")
        if kind not in POI_KINDS:
            raise MalformedEvent(f"unknown poi kind {kind!r}")
        try:
            geo = GeodeticCoord(float(d["lat"]), float(d["lon"]),
                                float(d.get("alt", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedEvent(f"bad poi geolocation: {exc}") from exc
        unc = float(d.get("unc_m", 0.0))
        if unc < 0.0:
            raise MalformedEvent("unc_m must be >= 0")
        text = d.get("text")
        if text is not None and not isinstance(text, str):
            raise MalformedEvent("text must be a string or null")
        track = [TrackPoint.from_wire(p) for p in d.get("track", [])]
        return cls(
            id=d["id"],
            kind=kind,
            geolocation=geo,
            uncertainty_radius_m=unc,
            source=str(d.get("source", "")),
            text_note=text,
            version=int(d.get("version", 1)),
            created_ms=int(d.get("created_ms", 0)),
            updated_ms=int(d.get("updated_ms", 0)),
            track=track,
        )

    def copy(self) -> "Poi":
        return replace(self, track=list(self.track))


@dataclass(frozen=True)
class PoiEvent:
    """One entry of the append-only mutation log."""

    seq: int
    ts_ms: int
    client: str
    op: PoiOp
    poi: Optional[Poi] = None
    point: Optional[TrackPoint] = None
    poi_id: Optional[str] = None

    def to_wire(self) -> dict:
        d: dict = {
            "seq": self.seq,
            "ts_ms": self.ts_ms,
            "client": self.client,
            "op": self.op.value,
        }
        if self.op in (PoiOp.CREATE, PoiOp.UPDATE):
            assert self.poi is not None
            d["poi"] = self.poi.to_wire()
        elif self.op is PoiOp.TRACK:
            assert self.point is not None
            d["id"] = self.poi_id
            d["point"] = self.point.to_wire()
        else:
            d["id"] = self.poi_id
        return d

    @classmethod
    def from_wire(cls, d: dict) -> "PoiEvent":
        if not isinstance(d, dict):
            raise MalformedEvent("event must be an object")
        try:
            op = PoiOp(d.get("op"))
        except ValueError:
            raise MalformedEvent(f"unknown op {d.get('op')!r}") from None
        seq = _int_field(d, "seq")
        ts_ms = _int_field(d, "ts_ms")
        client = d.get("client")
        if not isinstance(client, str) or not client:
            raise MalformedEvent("client must be a non-empty string")
        poi = point = None
        poi_id = None
        if op in (PoiOp.CREATE, PoiOp.UPDATE):
            if "poi" not in d:
                raise MalformedEvent(f"{op.value} event needs a poi")
            poi = Poi.from_wire(d["poi"])
            poi_id = poi.id
        elif op is PoiOp.TRACK:
            poi_id = d.get("id")
            if not isinstance(poi_id, str) or not poi_id:
                raise MalformedEvent("track event needs an id")
            if "point" not in d:
                raise MalformedEvent("track event needs a point")
            point = TrackPoint.from_wire(d["point"])
        else:
            poi_id = d.get("id")
            if not isinstance(poi_id, str) or not poi_id:
                raise MalformedEvent("delete event needs an id")
        return cls(seq=seq, ts_ms=ts_ms, client=client, op=op,
                   poi=poi, point=point, poi_id=poi_id)


def _int_field(d: dict, name: str) -> int:
    v = d.get(name)
    if isinstance(v, bool) or not isinstance(v, int):
        raise MalformedEvent(f"{name} must be an integer, got {v!r}")
    return v


def _expect_keys(d: dict, known: set, what: str, optional: set = frozenset()) -> None:
    if not isinstance(d, dict):
        raise MalformedEvent(f"{what} must be an object")
    extra = set(d) - known
    if extra:
        raise MalformedEvent(f"{what} has unknown fields {sorted(extra)}")
    missing = known - optional - set(d)
    if missing:
        raise MalformedEvent(f"{what} missing fields {sorted(missing)}")


class PoiStore:
    """In-memory POI state. Mutations must come from a single writer."""

    def __init__(self) -> None:
        self._pois: dict[str, Poi] = {}
        self._tombstones: set[str] = set()
        # (updated_ms, client) of the last accepted mutation per id; the
        # LWW key. Kept out of the wire Poi so broadcast folds stay exact.
        self._last_writer: dict[str, tuple[int, str]] = {}
        self.last_seq: int = 0

    def __len__(self) -> int:
        return len(self._pois)

    def get(self, poi_id: str) -> Optional[Poi]:
        p = self._pois.get(poi_id)
        return p.copy() if p is not None else None

    def apply_mutation(self, ev: PoiEvent) -> bool:
        """Apply one event; returns False when it loses the LWW race or
        repeats an already-applied sequence number.

        Raises :class:`UnknownId` for mutations of never-seen ids and
        :class:`MalformedEvent` for a sequence gap. A structurally valid
        in-order event consumes its sequence number even when rejected;
        the server only persists accepted events, so logs stay gap-free.
        """
        if ev.seq <= self.last_seq:
            return False
        if ev.seq != self.last_seq + 1:
            raise MalformedEvent(
                f"sequence gap: expected {self.last_seq + 1}, got {ev.seq}"
            )
        handler = {
            PoiOp.CREATE: self._apply_create,
            PoiOp.UPDATE: self._apply_update,
            PoiOp.DELETE: self._apply_delete,
            PoiOp.TRACK: self._apply_track,
        }[ev.op]
        accepted = handler(ev)
        self.last_seq = ev.seq
        return accepted

    def propose(self, op: PoiOp, *, ts_ms: int, client: str,
                poi: Optional[Poi] = None, point: Optional[TrackPoint] = None,
                poi_id: Optional[str] = None) -> Optional[PoiEvent]:
        """Assign the next sequence number and apply; the live-server path.

        Returns the applied event, or None when the mutation was rejected
        (LWW-stale); rejected or failing mutations do not burn a sequence
        number.
        """
        ev = PoiEvent(seq=self.last_seq + 1, ts_ms=ts_ms, client=client,
                      op=op, poi=poi, point=point,
                      poi_id=poi_id if poi_id is not None
                      else (poi.id if poi else None))
        saved = self.last_seq
        try:
            accepted = self.apply_mutation(ev)
        except Exception:
            self.last_seq = saved
            raise
        if not accepted:
            self.last_seq = saved
            return None
        return ev

    def _apply_create(self, ev: PoiEvent) -> bool:
        assert ev.poi is not None
        pid = ev.poi.id
        if pid in self._pois or pid in self._tombstones:
            return False
        poi = ev.poi.copy()
        poi.version = 1
        poi.created_ms = ev.ts_ms
        poi.updated_ms = ev.ts_ms
        poi.source = ev.client
        if poi.track:
            poi.geolocation = poi.track[-1].location
        self._pois[pid] = poi
        self._last_writer[pid] = (ev.ts_ms, ev.client)
        return True

    def _wins(self, pid: str, ev: PoiEvent) -> bool:
        return (ev.ts_ms, ev.client) > self._last_writer[pid]

    def _apply_update(self, ev: PoiEvent) -> bool:
        assert ev.poi is not None
        pid = ev.poi.id
        if pid in self._tombstones:
            return False
        cur = self._pois.get(pid)
        if cur is None:
            raise UnknownId(f"update of unknown poi {pid!r}")
        if not self._wins(pid, ev):
            return False
        moved = ev.poi.geolocation != cur.geolocation
        cur.kind = ev.poi.kind
        cur.geolocation = ev.poi.geolocation
        cur.uncertainty_radius_m = ev.poi.uncertainty_radius_m
        cur.text_note = ev.poi.text_note
        cur.source = ev.client
        cur.version += 1
        cur.updated_ms = ev.ts_ms
        if cur.track and moved:
            # keep "geolocation == last track point" true under moves
            cur.track.append(TrackPoint(ev.ts_ms, ev.poi.geolocation))
        self._last_writer[pid] = (ev.ts_ms, ev.client)
        return True

    def _apply_track(self, ev: PoiEvent) -> bool:
        assert ev.point is not None and ev.poi_id is not None
        pid = ev.poi_id
        if pid in self._tombstones:
            return False
        cur = self._pois.get(pid)
        if cur is None:
            raise UnknownId(f"track append to unknown poi {pid!r}")
        if not self._wins(pid, ev):
            return False
        cur.track.append(ev.point)
        cur.geolocation = ev.point.location
        cur.version += 1
        cur.updated_ms = ev.ts_ms
        self._last_writer[pid] = (ev.ts_ms, ev.client)
        return True

    def _apply_delete(self, ev: PoiEvent) -> bool:
        assert ev.poi_id is not None
        pid = ev.poi_id
        if pid in self._tombstones:
            return False
        if pid not in self._pois:
            raise UnknownId(f"delete of unknown poi {pid!r}")
        del self._pois[pid]
        self._last_writer.pop(pid, None)
        self._tombstones.add(pid)
        return True

    def snapshot(self) -> list[Poi]:
        """Live POIs ordered by id; safe-to-share copies."""
        return [self._pois[k].copy() for k in sorted(self._pois)]

    def snapshot_wire(self) -> list[dict]:
        return [p.to_wire() for p in self.snapshot()]

    def snapshot_json(self) -> bytes:
        """Canonical serialization: equal stores produce identical bytes."""
        return json.dumps(self.snapshot_wire(), sort_keys=True,
                          separators=(",", ":")).encode("utf-8")


def event_to_line(ev: PoiEvent) -> str:
    return json.dumps(ev.to_wire(), sort_keys=True, separators=(",", ":"))


class EventLog:
    """Append-only JSON-lines event log, one PoiEvent per line."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def append(self, ev: PoiEvent) -> None:
        with self.path.open("a", encoding="utf-8") as f:
            f.write(event_to_line(ev) + "\n")

    def read_events(self) -> Iterator[PoiEvent]:
        if not self.path.exists():
            return
        with self.path.open("r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    yield PoiEvent.from_wire(json.loads(line))
                except (json.JSONDecodeError, MalformedEvent) as exc:
                    raise CorruptLog(f"{self.path}:{lineno}: {exc}") from exc


def replay_log(events: Iterable[PoiEvent]) -> PoiStore:
    """Rebuild a store by folding events in sequence order.

    Raises :class:`CorruptLog` on duplicate or non-consecutive sequence
    numbers and on events a healthy server would never have persisted.
    """
    store = PoiStore()
    for ev in events:
        if ev.seq != store.last_seq + 1:
            raise CorruptLog(
                f"event seq {ev.seq} after {store.last_seq} is not consecutive"
            )
        try:
            store.apply_mutation(ev)
        except (UnknownId, MalformedEvent) as exc:
            raise CorruptLog(f"event seq {ev.seq}: {exc}") from exc
    return store


def replay_file(path: str | Path) -> PoiStore:
    return replay_log(EventLog(path).read_events())
