"""Pure-Python geodesy kernels.

Scalar hot-path math shared by every higher-level module. The compiled
backend in ``_core.pyx`` implements the same four functions with identical
formulas; keep the two files in sync (``tests/test_kernels_parity.py``
asserts agreement).

All angles are degrees at this boundary, meters elsewhere. ``a`` is the
ellipsoid semi-major axis and ``f`` its flattening.
"""

from __future__ import annotations

import math

BACKEND_NAME = "pure"


def geodetic_to_ecef(lat_deg: float, lon_deg: float, alt_m: float,
                     a: float, f: float) -> tuple[float, float, float]:
    """Geodetic -> ECEF via the geocentric-latitude form.

    Splits the point into the surface vector at geocentric latitude plus
    the altitude vector along the geodetic normal. The geocentric latitude
    is computed with a two-argument arctangent so +/-90 deg is exact.
    """
    mu = math.radians(lat_deg)
    t = math.radians(lon_deg)
    omf2 = (1.0 - f) * (1.0 - f)
    lat_s = math.atan2(omf2 * math.sin(mu), math.cos(mu))
    sin_s = math.sin(lat_s)
    r_s = math.sqrt(a * a / (1.0 + (1.0 / omf2 - 1.0) * sin_s * sin_s))
    cos_s = math.cos(lat_s)
    cos_mu = math.cos(mu)
    sin_mu = math.sin(mu)
    cos_t = math.cos(t)
    sin_t = math.sin(t)
    x = r_s * cos_s * cos_t + alt_m * cos_mu * cos_t
    y = r_s * cos_s * sin_t + alt_m * cos_mu * sin_t
    z = r_s * sin_s + alt_m * sin_mu
    return x, y, z


def ecef_to_geodetic(x: float, y: float, z: float,
                     a: float, f: float) -> tuple[float, float, float]:
    """ECEF -> geodetic via Zhu's closed form (no iteration).

    Latitude uses a two-argument arctangent so points on the polar axis
    resolve to exactly +/-90 deg. The caller guards the Earth-center
    degenerate input.
    """
    b = a * (1.0 - f)
    e2 = f * (2.0 - f)
    ep2 = (a * a - b * b) / (b * b)
    r = math.hypot(x, y)
    big_f = 54.0 * b * b * z * z
    g = r * r + (1.0 - e2) * z * z - e2 * (a * a - b * b)
    c = e2 * e2 * big_f * r * r / (g * g * g)
    s = (1.0 + c + math.sqrt(c * c + 2.0 * c)) ** (1.0 / 3.0)
    k = s + 1.0 + 1.0 / s
    p = big_f / (3.0 * k * k * g * g)
    q = math.sqrt(1.0 + 2.0 * e2 * e2 * p)
    r0 = -p * e2 * r / (1.0 + q) + math.sqrt(
        0.5 * a * a * (1.0 + 1.0 / q)
        - p * (1.0 - e2) * z * z / (q * (1.0 + q))
        - 0.5 * p * r * r
    )
    re = r - e2 * r0
    u = math.sqrt(re * re + z * z)
    v = math.sqrt(re * re + (1.0 - e2) * z * z)
    z0 = b * b * z / (a * v)
    alt = u * (1.0 - b * b / (a * v))
    lat = math.degrees(math.atan2(z + ep2 * z0, r))
    lon = math.degrees(math.atan2(y, x))
    return lat, lon, alt


def enu_to_ecef(e: float, n: float, u: float,
                lat0_deg: float, lon0_deg: float, alt0_m: float,
                a: float, f: float) -> tuple[float, float, float]:
    """Rotate a local East-North-Up offset into ECEF and add the reference."""
    x0, y0, z0 = geodetic_to_ecef(lat0_deg, lon0_deg, alt0_m, a, f)
    phi = math.radians(lat0_deg)
    lam = math.radians(lon0_deg)
    sp, cp = math.sin(phi), math.cos(phi)
    sl, cl = math.sin(lam), math.cos(lam)
    x = -sl * e - sp * cl * n + cp * cl * u + x0
    y = cl * e - sp * sl * n + cp * sl * u + y0
    z = cp * n + sp * u + z0
    return x, y, z


def ecef_to_enu(x: float, y: float, z: float,
                lat0_deg: float, lon0_deg: float, alt0_m: float,
                a: float, f: float) -> tuple[float, float, float]:
    """Express an ECEF point as an East-North-Up offset from the reference.

    Exact inverse of :func:`enu_to_ecef` (transposed rotation).
    """
    x0, y0, z0 = geodetic_to_ecef(lat0_deg, lon0_deg, alt0_m, a, f)
    dx, dy, dz = x - x0, y - y0, z - z0
    phi = math.radians(lat0_deg)
    lam = math.radians(lon0_deg)
    sp, cp = math.sin(phi), math.cos(phi)
    sl, cl = math.sin(lam), math.cos(lam)
    e = -sl * dx + cl * dy
    n = -sp * cl * dx - sp * sl * dy + cp * dz
    u = cp * cl * dx + cp * sl * dy + sp * dz
    return e, n, u
