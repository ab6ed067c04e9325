"""Synthetic flight logs: waypoint missions sampled into timed pose records.

Log files are UTF-8 JSON-lines with one record per line and the fields
t, lat, lon, alt, agl, roll, pitch, yaw, g_roll, g_pitch, g_yaw, sats.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

from aerotag.errors import EmptyPath
from aerotag.geodesy import (
    EnuVector,
    GeodeticCoord,
    ecef_to_geodetic,
    enu_to_ecef,
    geodetic_to_enu,
)
from aerotag.projection import Attitude, UavPose


@dataclass(frozen=True)
class FlightLogRecord:
    t: float
    pose: UavPose


# step schedules: a bare value, or [(t, value), ...] where each value holds
# from its t until the next breakpoint
GimbalSchedule = Union[Attitude, Sequence[tuple[float, Attitude]]]
SatsSchedule = Union[int, Sequence[tuple[float, int]]]


def _schedule_at(schedule, t: float, default):
    if schedule is None:
        return default
    if not isinstance(schedule, (list, tuple)):
        return schedule
    value = default
    for t_from, v in schedule:
        if t_from <= t:
            value = v
        else:
            break
    return value


def generate_flight_log(
    waypoints: Sequence[GeodeticCoord],
    speed_mps: float = 5.0,
    rate_hz: float = 1.0,
    gimbal_schedule: GimbalSchedule | None = None,
    satellites_schedule: SatsSchedule | None = None,
    duration_s: float | None = None,
    ground_alt_m: float = 0.0,
) -> list[FlightLogRecord]:
    """Sample a piecewise-linear waypoint path at a fixed rate.

    Yaw faces the travel direction; a single waypoint hovers for
    ``duration_s``. The gimbal pitch range limit is enforced by UavPose.
    """
    if not waypoints:
        raise EmptyPath("at least one waypoint required")
    if speed_mps <= 0.0:
        raise ValueError("speed_mps must be > 0")
    if rate_hz <= 0.0:
        raise ValueError("rate_hz must be > 0")

    ref = waypoints[0]
    enu_pts = [geodetic_to_enu(w, ref) for w in waypoints]
    seg_len = [
        math.dist(
            (a.east_m, a.north_m, a.up_m), (b.east_m, b.north_m, b.up_m)
        )
        for a, b in zip(enu_pts, enu_pts[1:])
    ]
    path_time = sum(seg_len) / speed_mps
    total_time = max(path_time, duration_s or 0.0)

    # cumulative segment start distances
    cum = [0.0]
    for s in seg_len:
        cum.append(cum[-1] + s)

    def position_at(dist: float) -> tuple[EnuVector, float]:
        """ENU position and travel heading (deg) at path distance."""
        if not seg_len or dist >= cum[-1]:
            last = enu_pts[-1]
            heading = _segment_heading(enu_pts) if seg_len else 0.0
            return last, heading
        i = max(0, bisect_right(cum, dist) - 1)
        while seg_len[i] == 0.0:
            i += 1
        frac = (dist - cum[i]) / seg_len[i]
        a, b = enu_pts[i], enu_pts[i + 1]
        pos = EnuVector(
            a.east_m + frac * (b.east_m - a.east_m),
            a.north_m + frac * (b.north_m - a.north_m),
            a.up_m + frac * (b.up_m - a.up_m),
        )
        yaw = math.degrees(
            math.atan2(b.east_m - a.east_m, b.north_m - a.north_m)
        ) % 360.0
        return pos, yaw

    n_samples = int(math.floor(total_time * rate_hz + 1e-9)) + 1
    records = []
    for k in range(n_samples):
        t = k / rate_hz
        pos, yaw = position_at(min(t, path_time) * speed_mps)
        geo = ecef_to_geodetic(enu_to_ecef(pos, ref))
        agl = geo.alt_m - ground_alt_m
        if agl < 0.0:
            raise ValueError(f"waypoint path dips below ground at t={t}")
        gimbal = _schedule_at(gimbal_schedule, t, Attitude(pitch_deg=-90.0))
        sats = _schedule_at(satellites_schedule, t, 15)
        pose = UavPose(
            position=geo,
            uav_attitude=Attitude(yaw_deg=yaw),
            gimbal_attitude=gimbal,
            agl_m=agl,
            satellites=sats,
            timestamp_s=t,
        )
        records.append(FlightLogRecord(t=t, pose=pose))
    return records


def _segment_heading(enu_pts) -> float:
    for a, b in zip(reversed(enu_pts[:-1]), reversed(enu_pts)):
        de = b.east_m - a.east_m
        dn = b.north_m - a.north_m
        if de or dn:
            return math.degrees(math.atan2(de, dn)) % 360.0
    return 0.0


def record_to_wire(rec: FlightLogRecord) -> dict:
    pose = rec.pose
    return {
        "t": rec.t,
        "lat": pose.position.lat_deg,
        "lon": pose.position.lon_deg,
        "alt": pose.position.alt_m,
        "agl": pose.agl_m,
        "roll": pose.uav_attitude.roll_deg,
        "pitch": pose.uav_attitude.pitch_deg,
        "yaw": pose.uav_attitude.yaw_deg,
        "g_roll": pose.gimbal_attitude.roll_deg,
        "g_pitch": pose.gimbal_attitude.pitch_deg,
        "g_yaw": pose.gimbal_attitude.yaw_deg,
        "sats": pose.satellites,
    }


def record_from_wire(d: dict) -> FlightLogRecord:
    pose = UavPose(
        position=GeodeticCoord(d["lat"], d["lon"], d["alt"]),
        uav_attitude=Attitude(d["roll"], d["pitch"], d["yaw"]),
        gimbal_attitude=Attitude(d["g_roll"], d["g_pitch"], d["g_yaw"]),
        agl_m=d["agl"],
        satellites=int(d["sats"]),
        timestamp_s=d["t"],
    )
    return FlightLogRecord(t=float(d["t"]), pose=pose)


def save_flight_log(records: Sequence[FlightLogRecord], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(record_to_wire(rec), sort_keys=True,
                               separators=(",", ":")) + "\n")


def load_flight_log(path: str | Path) -> "FlightLog":
    records = []
    with Path(path).open("r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                records.append(record_from_wire(json.loads(line)))
    return FlightLog(records)


class FlightLog:
    """Time-ordered pose records with nearest-record lookup."""

    def __init__(self, records: Sequence[FlightLogRecord]):
        if not records:
            raise EmptyPath("flight log has no records")
        self.records = sorted(records, key=lambda r: r.t)
        self._times = [r.t for r in self.records]

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def t_min(self) -> float:
        return self._times[0]

    @property
    def t_max(self) -> float:
        return self._times[-1]

    def in_range(self, t: float) -> bool:
        return self.t_min <= t <= self.t_max

    def pose_at(self, t: float, interpolate: bool = False) -> UavPose:
        """Pose at time t: nearest record, ties to the earlier one.

        With ``interpolate`` the position and angles blend linearly
        between the bracketing records (angles along the short way).
        """
        i = bisect_right(self._times, t)
        if i == 0:
            return self.records[0].pose
        if i == len(self.records):
            return self.records[-1].pose
        before, after = self.records[i - 1], self.records[i]
        if not interpolate:
            return before.pose if t - before.t <= after.t - t else after.pose
        span = after.t - before.t
        if span <= 0.0:
            return before.pose
        w = (t - before.t) / span
        return _blend_pose(before.pose, after.pose, w, t)


def _lerp_angle(a: float, b: float, w: float) -> float:
    delta = (b - a + 180.0) % 360.0 - 180.0
    return a + w * delta


def _blend_pose(a: UavPose, b: UavPose, w: float, t: float) -> UavPose:
    enu = geodetic_to_enu(b.position, a.position)
    pos = ecef_to_geodetic(enu_to_ecef(
        EnuVector(enu.east_m * w, enu.north_m * w, enu.up_m * w), a.position
    ))
    att = Attitude(
        _lerp_angle(a.uav_attitude.roll_deg, b.uav_attitude.roll_deg, w),
        _lerp_angle(a.uav_attitude.pitch_deg, b.uav_attitude.pitch_deg, w),
        _lerp_angle(a.uav_attitude.yaw_deg, b.uav_attitude.yaw_deg, w),
    )
    gim = Attitude(
        _lerp_angle(a.gimbal_attitude.roll_deg, b.gimbal_attitude.roll_deg, w),
        _lerp_angle(a.gimbal_attitude.pitch_deg, b.gimbal_attitude.pitch_deg, w),
        _lerp_angle(a.gimbal_attitude.yaw_deg, b.gimbal_attitude.yaw_deg, w),
    )
    sats = a.satellites if w < 0.5 else b.satellites
    return UavPose(
        position=pos,
        uav_attitude=att,
        gimbal_attitude=gim,
        agl_m=a.agl_m + w * (b.agl_m - a.agl_m),
        satellites=sats,
        timestamp_s=t,
    )
