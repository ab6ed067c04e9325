# cython: language_level=3, boundscheck=False, cdivision=True
"""Compiled geodesy kernels.

Same four functions and formulas as ``_pure.py``; see that module for the
documentation. Keep both backends in sync.
"""

from libc.math cimport sin, cos, atan2, sqrt, hypot, cbrt, pi

BACKEND_NAME = "cython"

cdef double DEG = pi / 180.0
cdef double RAD = 180.0 / pi


cdef inline (double, double, double) _geodetic_to_ecef(
        double lat_deg, double lon_deg, double alt_m, double a, double f) noexcept:
    cdef double mu = lat_deg * DEG
    cdef double t = lon_deg * DEG
    cdef double omf2 = (1.0 - f) * (1.0 - f)
    cdef double lat_s = atan2(omf2 * sin(mu), cos(mu))
    cdef double sin_s = sin(lat_s)
    cdef double r_s = sqrt(a * a / (1.0 + (1.0 / omf2 - 1.0) * sin_s * sin_s))
    cdef double cos_s = cos(lat_s)
    cdef double cos_mu = cos(mu)
    cdef double sin_mu = sin(mu)
    cdef double cos_t = cos(t)
    cdef double sin_t = sin(t)
    return (r_s * cos_s * cos_t + alt_m * cos_mu * cos_t,
            r_s * cos_s * sin_t + alt_m * cos_mu * sin_t,
            r_s * sin_s + alt_m * sin_mu)


def geodetic_to_ecef(double lat_deg, double lon_deg, double alt_m,
                     double a, double f):
    return _geodetic_to_ecef(lat_deg, lon_deg, alt_m, a, f)


def ecef_to_geodetic(double x, double y, double z, double a, double f):
    cdef double b = a * (1.0 - f)
    cdef double e2 = f * (2.0 - f)
    cdef double ep2 = (a * a - b * b) / (b * b)
    cdef double r = hypot(x, y)
    cdef double big_f = 54.0 * b * b * z * z
    cdef double g = r * r + (1.0 - e2) * z * z - e2 * (a * a - b * b)
    cdef double c = e2 * e2 * big_f * r * r / (g * g * g)
    cdef double s = cbrt(1.0 + c + sqrt(c * c + 2.0 * c))
    cdef double k = s + 1.0 + 1.0 / s
    cdef double p = big_f / (3.0 * k * k * g * g)
    cdef double q = sqrt(1.0 + 2.0 * e2 * e2 * p)
    cdef double r0 = -p * e2 * r / (1.0 + q) + sqrt(
        0.5 * a * a * (1.0 + 1.0 / q)
        - p * (1.0 - e2) * z * z / (q * (1.0 + q))
        - 0.5 * p * r * r)
    cdef double re = r - e2 * r0
    cdef double u = sqrt(re * re + z * z)
    cdef double v = sqrt(re * re + (1.0 - e2) * z * z)
    cdef double z0 = b * b * z / (a * v)
    cdef double alt = u * (1.0 - b * b / (a * v))
    cdef double lat = atan2(z + ep2 * z0, r) * RAD
    cdef double lon = atan2(y, x) * RAD
    return lat, lon, alt


def enu_to_ecef(double e, double n, double u,
                double lat0_deg, double lon0_deg, double alt0_m,
                double a, double f):
    cdef double x0, y0, z0
    x0, y0, z0 = _geodetic_to_ecef(lat0_deg, lon0_deg, alt0_m, a, f)
    cdef double phi = lat0_deg * DEG
    cdef double lam = lon0_deg * DEG
    cdef double sp = sin(phi), cp = cos(phi)
    cdef double sl = sin(lam), cl = cos(lam)
    return (-sl * e - sp * cl * n + cp * cl * u + x0,
            cl * e - sp * sl * n + cp * sl * u + y0,
            cp * n + sp * u + z0)


def ecef_to_enu(double x, double y, double z,
                double lat0_deg, double lon0_deg, double alt0_m,
                double a, double f):
    cdef double x0, y0, z0
    x0, y0, z0 = _geodetic_to_ecef(lat0_deg, lon0_deg, alt0_m, a, f)
    cdef double dx = x - x0, dy = y - y0, dz = z - z0
    cdef double phi = lat0_deg * DEG
    cdef double lam = lon0_deg * DEG
    cdef double sp = sin(phi), cp = cos(phi)
    cdef double sl = sin(lam), cl = cos(lam)
    return (-sl * dx + cl * dy,
            -sp * cl * dx - sp * sl * dy + cp * dz,
            cp * cl * dx + cp * sl * dy + sp * dz)
