"""WGS84 coordinate conversions: geodetic <-> ECEF <-> local ENU.

Degrees and meters at every API boundary. The scalar math lives in
:mod:`aerotag.kernels` (compiled when available); this module adds the
typed surface, validation, and the horizontal-error metric used by the
accuracy analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from aerotag import kernels
from aerotag.errors import DegenerateInput


@dataclass(frozen=True)
class EllipsoidModel:
    """Reference ellipsoid with both eccentricities precomputed."""

    semi_major_a: float
    semi_minor_b: float
    flattening_f: float
    ecc2_e2: float
    ecc2p_ep2: float

    @classmethod
    def from_axis_flattening(cls, a: float, f: float) -> "EllipsoidModel":
        b = a * (1.0 - f)
        return cls(
            semi_major_a=a,
            semi_minor_b=b,
            flattening_f=f,
            ecc2_e2=(a * a - b * b) / (a * a),
            ecc2p_ep2=(a * a - b * b) / (b * b),
        )


WGS84 = EllipsoidModel.from_axis_flattening(6378137.0, 1.0 / 298.257223563)


def _wrap_lon(lon_deg: float) -> float:
    # normalize to (-180, 180]
    lon = math.fmod(lon_deg, 360.0)
    if lon <= -180.0:
        lon += 360.0
    elif lon > 180.0:
        lon -= 360.0
    return lon


@dataclass(frozen=True)
class GeodeticCoord:
    """Latitude/longitude in degrees, height in meters above the ellipsoid."""

    lat_deg: float
    lon_deg: float
    alt_m: float = 0.0

    def __post_init__(self) -> None:
        if not (-90.0 <= self.lat_deg <= 90.0):
            raise ValueError(f"latitude {self.lat_deg} outside [-90, 90]")
        if not math.isfinite(self.lon_deg):
            raise ValueError(f"longitude {self.lon_deg} is not finite")
        if not math.isfinite(self.alt_m):
            raise ValueError(f"altitude {self.alt_m} is not finite")
        object.__setattr__(self, "lon_deg", _wrap_lon(self.lon_deg))


@dataclass(frozen=True)
class EcefCoord:
    """Earth-Centered Earth-Fixed Cartesian point, meters."""

    x_m: float
    y_m: float
    z_m: float


@dataclass(frozen=True)
class EnuVector:
    """East-North-Up offset in the tangent frame of a stated reference."""

    east_m: float
    north_m: float
    up_m: float


def geodetic_to_ecef(p: GeodeticCoord, e: EllipsoidModel = WGS84) -> EcefCoord:
    """Convert geodetic coordinates to ECEF (geocentric-latitude form)."""
    x, y, z = kernels.geodetic_to_ecef(
        p.lat_deg, p.lon_deg, p.alt_m, e.semi_major_a, e.flattening_f
    )
    return EcefCoord(x, y, z)


def ecef_to_geodetic(p: EcefCoord, e: EllipsoidModel = WGS84) -> GeodeticCoord:
    """Convert ECEF to geodetic coordinates (Zhu closed form).

    Raises :class:`DegenerateInput` at the exact Earth center, where
    latitude and longitude are undefined.
    """
    if p.x_m == 0.0 and p.y_m == 0.0 and p.z_m == 0.0:
        raise DegenerateInput("ECEF origin has no geodetic equivalent")
    lat, lon, alt = kernels.ecef_to_geodetic(
        p.x_m, p.y_m, p.z_m, e.semi_major_a, e.flattening_f
    )
    return GeodeticCoord(lat, lon, alt)


def enu_to_ecef(v: EnuVector, ref: GeodeticCoord,
                e: EllipsoidModel = WGS84) -> EcefCoord:
    """Rotate a local ENU offset at ``ref`` into ECEF and translate."""
    x, y, z = kernels.enu_to_ecef(
        v.east_m, v.north_m, v.up_m,
        ref.lat_deg, ref.lon_deg, ref.alt_m,
        e.semi_major_a, e.flattening_f,
    )
    return EcefCoord(x, y, z)


def ecef_to_enu(p: EcefCoord, ref: GeodeticCoord,
                e: EllipsoidModel = WGS84) -> EnuVector:
    """Express an ECEF point as an ENU offset from ``ref``."""
    east, north, up = kernels.ecef_to_enu(
        p.x_m, p.y_m, p.z_m,
        ref.lat_deg, ref.lon_deg, ref.alt_m,
        e.semi_major_a, e.flattening_f,
    )
    return EnuVector(east, north, up)


def geodetic_to_enu(p: GeodeticCoord, ref: GeodeticCoord,
                    e: EllipsoidModel = WGS84) -> EnuVector:
    """ENU offset of a geodetic point from ``ref``."""
    return ecef_to_enu(geodetic_to_ecef(p, e), ref, e)


def horizontal_distance(a: GeodeticCoord, b: GeodeticCoord,
                        e: EllipsoidModel = WGS84) -> float:
    """Horizontal separation in meters, measured in the tangent frame of ``a``.

    Matches the horizontal-only accuracy metric: the up component is
    discarded, so two points differing only in altitude are 0 m apart.
    """
    v = geodetic_to_enu(b, a, e)
    return math.hypot(v.east_m, v.north_m)


def enu_rotation_matrix(ref: GeodeticCoord) -> list[list[float]]:
    """The ENU->ECEF rotation matrix at ``ref`` (columns: east, north, up).

    Exposed for the orthonormality checks; the conversions above inline it.
    """
    phi = math.radians(ref.lat_deg)
    lam = math.radians(ref.lon_deg)
    sp, cp = math.sin(phi), math.cos(phi)
    sl, cl = math.sin(lam), math.cos(lam)
    return [
        [-sl, -sp * cl, cp * cl],
        [cl, -sp * sl, cp * sl],
        [0.0, cp, sp],
    ]
