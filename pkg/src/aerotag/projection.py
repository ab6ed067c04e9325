"""Camera model: pixel rays, ground intersection, and reprojection.

Frames and conventions:

* Camera: x right in the image, y down in the image, z along the boresight.
* Body: x forward, y right, z down (aircraft convention). With all gimbal
  angles zero the camera looks forward, so camera (x, y, z) maps onto body
  (right, down, forward).
* Attitudes rotate body into local North-East-Down via intrinsic
  yaw-pitch-roll; yaw is measured clockwise from North, pitch -90 points
  the boresight straight down. Results are returned East-North-Up.

The gimbal rotation composes first (camera into body), then the UAV
attitude (body into world). A stabilized gimbal can instead be treated as
world-referenced via ``gimbal_frame``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from aerotag.errors import NoGroundIntersection, OutOfFrame
from aerotag.geodesy import (
    EllipsoidModel,
    EnuVector,
    GeodeticCoord,
    WGS84,
    ecef_to_geodetic,
    enu_to_ecef,
    geodetic_to_enu,
)

Mat3 = tuple[tuple[float, float, float], ...]

# camera (right, down, forward) -> body (forward, right, down)
_CAMERA_TO_BODY: Mat3 = (
    (0.0, 0.0, 1.0),
    (1.0, 0.0, 0.0),
    (0.0, 1.0, 0.0),
)


class GroundModel(Enum):
    """How the ray's ground hit is turned into an ENU offset."""

    PLANE = "plane"          # horizontal plane agl_m below the UAV
    PAPER_U0 = "paper-u0"    # same east/north, up forced to zero


class GimbalFrame(Enum):
    BODY = "body"    # gimbal angles are relative to the airframe
    WORLD = "world"  # stabilized gimbal, angles already world-referenced


def _wrap180(angle: float) -> float:
    a = math.fmod(angle, 360.0)
    if a > 180.0:
        a -= 360.0
    elif a <= -180.0:
        a += 360.0
    return a


@dataclass(frozen=True)
class Attitude:
    """Roll/pitch/yaw in degrees; yaw normalized to [0, 360)."""

    roll_deg: float = 0.0
    pitch_deg: float = 0.0
    yaw_deg: float = 0.0

    def __post_init__(self) -> None:
        for name in ("roll_deg", "pitch_deg", "yaw_deg"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} is not finite")
        object.__setattr__(self, "roll_deg", _wrap180(self.roll_deg))
        object.__setattr__(self, "pitch_deg", _wrap180(self.pitch_deg))
        object.__setattr__(self, "yaw_deg", self.yaw_deg % 360.0)

    def matrix(self) -> Mat3:
        """Body-to-NED rotation, intrinsic yaw-pitch-roll."""
        cr, sr = _cos_sin(self.roll_deg)
        cp, sp = _cos_sin(self.pitch_deg)
        cy, sy = _cos_sin(self.yaw_deg)
        # Rz(yaw) @ Ry(pitch) @ Rx(roll)
        return (
            (cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr),
            (sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr),
            (-sp, cp * sr, cp * cr),
        )


def _cos_sin(deg: float) -> tuple[float, float]:
    r = math.radians(deg)
    return math.cos(r), math.sin(r)


def _mat_vec(m: Mat3, v: tuple[float, float, float]) -> tuple[float, float, float]:
    return (
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    )


def _mat_vec_t(m: Mat3, v: tuple[float, float, float]) -> tuple[float, float, float]:
    # multiply by the transpose (inverse of a rotation)
    return (
        m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
        m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
        m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2],
    )


def _mat_mul(a: Mat3, b: Mat3) -> Mat3:
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3))
        for i in range(3)
    )  # type: ignore[return-value]


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole camera: horizontal field of view plus frame size in pixels."""

    fov_h_deg: float
    width_px: int
    height_px: int

    def __post_init__(self) -> None:
        if not (0.0 < self.fov_h_deg < 180.0):
            raise ValueError(f"horizontal FOV {self.fov_h_deg} outside (0, 180)")
        if self.width_px <= 0 or self.height_px <= 0:
            raise ValueError("frame size must be positive")

    @classmethod
    def from_fov(cls, fov_deg: float, width_px: int, height_px: int,
                 mode: str = "horizontal") -> "CameraIntrinsics":
        """Build intrinsics from an FOV quoted as horizontal, vertical, or
        diagonal (manufacturer specs usually quote diagonal)."""
        half = math.tan(math.radians(fov_deg) / 2.0)
        aspect = height_px / width_px
        if mode == "horizontal":
            tan_h = half
        elif mode == "vertical":
            tan_h = half / aspect
        elif mode == "diagonal":
            tan_h = half / math.sqrt(1.0 + aspect * aspect)
        else:
            raise ValueError(f"unknown FOV mode {mode!r}")
        return cls(math.degrees(2.0 * math.atan(tan_h)), width_px, height_px)

    @property
    def fov_v_deg(self) -> float:
        """Vertical FOV implied by the aspect ratio (square pixels)."""
        tan_h = math.tan(math.radians(self.fov_h_deg) / 2.0)
        return math.degrees(2.0 * math.atan(tan_h * self.height_px / self.width_px))

    @property
    def focal_px(self) -> float:
        """Focal length in pixels (same horizontally and vertically)."""
        return (self.width_px / 2.0) / math.tan(math.radians(self.fov_h_deg) / 2.0)


@dataclass(frozen=True)
class PixelCoord:
    """Image position: u is the column from the left, v the row from the top."""

    u: float
    v: float

    def in_frame(self, intr: CameraIntrinsics) -> bool:
        return 0.0 <= self.u <= intr.width_px and 0.0 <= self.v <= intr.height_px


@dataclass(frozen=True)
class UavPose:
    """GPS position plus UAV and gimbal attitude at one instant.

    Gimbal pitch is clamped to the mount's [-90, 0] travel on construction.
    """

    position: GeodeticCoord
    uav_attitude: Attitude
    gimbal_attitude: Attitude
    agl_m: float
    satellites: int = 0
    timestamp_s: float = 0.0

    def __post_init__(self) -> None:
        if self.agl_m < 0.0:
            raise ValueError(f"agl_m {self.agl_m} must be >= 0")
        if self.satellites < 0:
            raise ValueError("satellite count must be >= 0")
        g = self.gimbal_attitude
        pitch = min(0.0, max(-90.0, g.pitch_deg))
        if pitch != g.pitch_deg:
            object.__setattr__(
                self, "gimbal_attitude", Attitude(g.roll_deg, pitch, g.yaw_deg)
            )


@dataclass(frozen=True)
class PixelProjection:
    """Result of projecting a geolocation into a camera frame.

    When ``visible`` is false, ``pixel`` is the frame-edge clamp of the
    projection so callers can draw off-screen direction arrows.
    ``depth_m`` is the camera-frame distance along the boresight (negative
    behind the camera); it converts meters at the target into pixels.
    """

    pixel: PixelCoord
    visible: bool
    depth_m: float


def _camera_to_world(pose: UavPose, gimbal_frame: GimbalFrame) -> Mat3:
    cam_to_body = _mat_mul(pose.gimbal_attitude.matrix(), _CAMERA_TO_BODY)
    if gimbal_frame is GimbalFrame.WORLD:
        return cam_to_body
    return _mat_mul(pose.uav_attitude.matrix(), cam_to_body)


def camera_ray(pose: UavPose, intr: CameraIntrinsics, px: PixelCoord,
               gimbal_frame: GimbalFrame = GimbalFrame.BODY) -> EnuVector:
    """Unit ENU direction of the ray through pixel ``px``.

    Raises :class:`OutOfFrame` for pixels outside the frame bounds.
    """
    if not px.in_frame(intr):
        raise OutOfFrame(f"pixel ({px.u}, {px.v}) outside "
                         f"{intr.width_px}x{intr.height_px} frame")
    tan_h = math.tan(math.radians(intr.fov_h_deg) / 2.0)
    tan_v = math.tan(math.radians(intr.fov_v_deg) / 2.0)
    xc = (2.0 * px.u / intr.width_px - 1.0) * tan_h
    yc = (2.0 * px.v / intr.height_px - 1.0) * tan_v
    norm = math.sqrt(xc * xc + yc * yc + 1.0)
    cam = (xc / norm, yc / norm, 1.0 / norm)
    ned = _mat_vec(_camera_to_world(pose, gimbal_frame), cam)
    return EnuVector(east_m=ned[1], north_m=ned[0], up_m=-ned[2])


def pixel_to_geolocation(pose: UavPose, intr: CameraIntrinsics, px: PixelCoord,
                         mode: GroundModel = GroundModel.PLANE,
                         gimbal_frame: GimbalFrame = GimbalFrame.BODY,
                         ellipsoid: EllipsoidModel = WGS84) -> GeodeticCoord:
    """Geolocate the ground point seen at pixel ``px``.

    Intersects the pixel ray with the horizontal plane ``agl_m`` below the
    UAV, then chains the ENU offset through ECEF to geodetic coordinates.
    ``GroundModel.PAPER_U0`` zeroes the up component before the transform,
    which keeps the same horizontal fix but reports the point at the UAV's
    own altitude.
    """
    ray = camera_ray(pose, intr, px, gimbal_frame)
    if ray.up_m >= 0.0:
        raise NoGroundIntersection(
            f"ray up-component {ray.up_m:.6f} never reaches the ground"
        )
    scale = -pose.agl_m / ray.up_m
    up = 0.0 if mode is GroundModel.PAPER_U0 else -pose.agl_m
    hit = EnuVector(ray.east_m * scale, ray.north_m * scale, up)
    return ecef_to_geodetic(enu_to_ecef(hit, pose.position, ellipsoid), ellipsoid)


def geolocation_to_pixel(pose: UavPose, intr: CameraIntrinsics,
                         poi: GeodeticCoord,
                         gimbal_frame: GimbalFrame = GimbalFrame.BODY,
                         ellipsoid: EllipsoidModel = WGS84) -> PixelProjection:
    """Project a geolocation into the camera frame (inverse of the ray chain)."""
    enu = geodetic_to_enu(poi, pose.position, ellipsoid)
    ned = (enu.north_m, enu.east_m, -enu.up_m)
    cam = _mat_vec_t(_camera_to_world(pose, gimbal_frame), ned)
    depth = cam[2]
    half_w = intr.width_px / 2.0
    half_h = intr.height_px / 2.0
    fx = half_w / math.tan(math.radians(intr.fov_h_deg) / 2.0)
    fy = half_h / math.tan(math.radians(intr.fov_v_deg) / 2.0)

    if depth > 0.0:
        u = half_w + cam[0] / depth * fx
        v = half_h + cam[1] / depth * fy
        px = PixelCoord(u, v)
        if px.in_frame(intr):
            return PixelProjection(px, True, depth)
        clamped = PixelCoord(
            min(max(u, 0.0), float(intr.width_px)),
            min(max(v, 0.0), float(intr.height_px)),
        )
        return PixelProjection(clamped, False, depth)

    # Behind the camera there is no projection; anchor the edge hint from
    # the lateral camera-frame direction instead.
    dx = cam[0] * fx
    dy = cam[1] * fy
    if dx == 0.0 and dy == 0.0:
        dy = 1.0
    tx = half_w / abs(dx) if dx != 0.0 else math.inf
    ty = half_h / abs(dy) if dy != 0.0 else math.inf
    t = min(tx, ty)
    return PixelProjection(
        PixelCoord(half_w + t * dx, half_h + t * dy), False, depth
    )
