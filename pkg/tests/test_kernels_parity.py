"""The compiled and pure kernel backends must agree bit-for-bit in spirit:
same formulas, differences only from compiler float scheduling (<< 1e-9)."""

import importlib.util
import random
import subprocess
import sys

import pytest

from aerotag.kernels import _pure

_has_core = importlib.util.find_spec("aerotag.kernels._core") is not None
needs_core = pytest.mark.skipif(not _has_core,
                                reason="compiled kernel core not built")

A = 6378137.0
F = 1.0 / 298.257223563


@needs_core
class TestBackendParity:
    def core(self):
        from aerotag.kernels import _core
        return _core

    def test_geodetic_to_ecef_agrees(self):
        core = self.core()
        rng = random.Random(1)
        for _ in range(2000):
            args = (rng.uniform(-90, 90), rng.uniform(-180, 180),
                    rng.uniform(-100, 10000), A, F)
            for p, c in zip(_pure.geodetic_to_ecef(*args),
                            core.geodetic_to_ecef(*args)):
                assert p == pytest.approx(c, abs=5e-9)

    def test_ecef_to_geodetic_agrees(self):
        core = self.core()
        rng = random.Random(2)
        for _ in range(2000):
            g = (rng.uniform(-89.9, 89.9), rng.uniform(-180, 180),
                 rng.uniform(-100, 10000))
            xyz = _pure.geodetic_to_ecef(*g, A, F)
            for p, c in zip(_pure.ecef_to_geodetic(*xyz, A, F),
                            core.ecef_to_geodetic(*xyz, A, F)):
                assert p == pytest.approx(c, abs=5e-9)

    def test_enu_roundtrip_agrees(self):
        core = self.core()
        rng = random.Random(3)
        for _ in range(1000):
            ref = (rng.uniform(-89, 89), rng.uniform(-180, 180),
                   rng.uniform(0, 1000))
            enu = (rng.uniform(-5000, 5000), rng.uniform(-5000, 5000),
                   rng.uniform(-500, 500))
            pe = _pure.enu_to_ecef(*enu, *ref, A, F)
            ce = core.enu_to_ecef(*enu, *ref, A, F)
            for p, c in zip(pe, ce):
                assert p == pytest.approx(c, abs=5e-9)
            for p, c in zip(_pure.ecef_to_enu(*pe, *ref, A, F),
                            core.ecef_to_enu(*ce, *ref, A, F)):
                assert p == pytest.approx(c, abs=5e-9)


class TestBackendSelection:
    def test_forced_pure_backend(self):
        proc = subprocess.run(
            [sys.executable, "-c",
             "from aerotag import kernels; print(kernels.BACKEND)"],
            capture_output=True, text=True,
            env={"PATH": "/usr/bin:/bin", "AEROTAG_KERNEL": "pure"},
        )
        assert proc.stdout.strip() == "pure"

    @needs_core
    def test_compiled_backend_preferred_by_default(self):
        proc = subprocess.run(
            [sys.executable, "-c",
             "from aerotag import kernels; print(kernels.BACKEND)"],
            capture_output=True, text=True,
            env={"PATH": "/usr/bin:/bin"},
        )
        assert proc.stdout.strip() == "cython"

    def test_package_works_on_pure_backend(self):
        code = (
            "from aerotag.geodesy import GeodeticCoord, geodetic_to_ecef, "
            "ecef_to_geodetic\n"
            "g = ecef_to_geodetic(geodetic_to_ecef(GeodeticCoord(45, 90, 1000)))\n"
            "assert abs(g.lat_deg - 45) < 1e-9, g\n"
            "print('ok')\n"
        )
        proc = subprocess.run(
            [sys.executable, "-c", code],
            capture_output=True, text=True,
            env={"PATH": "/usr/bin:/bin", "AEROTAG_KERNEL": "pure"},
        )
        assert proc.stdout.strip() == "ok", proc.stderr
