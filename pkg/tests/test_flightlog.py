import json

import pytest

from aerotag.errors import EmptyPath
from aerotag.geodesy import (
    EnuVector,
    GeodeticCoord,
    ecef_to_geodetic,
    enu_to_ecef,
    horizontal_distance,
)
from aerotag.projection import Attitude
from aerotag.sim.flightlog import (
    FlightLog,
    generate_flight_log,
    load_flight_log,
    record_to_wire,
    save_flight_log,
)

HOME = GeodeticCoord(41.7, -86.2, 120.0)


def north_of(ref, meters):
    return ecef_to_geodetic(enu_to_ecef(EnuVector(0, meters, 0), ref))


class TestGenerate:
    def test_hover_ten_seconds(self):
        recs = generate_flight_log([HOME], rate_hz=1.0, duration_s=10.0)
        assert len(recs) == 11
        positions = {(r.pose.position.lat_deg, r.pose.position.lon_deg,
                      r.pose.position.alt_m) for r in recs}
        assert len(positions) == 1

    def test_two_waypoints_100m_at_10mps(self):
        recs = generate_flight_log([HOME, north_of(HOME, 100)],
                                   speed_mps=10.0, rate_hz=1.0)
        assert len(recs) == 11
        for k, rec in enumerate(recs):
            d = horizontal_distance(HOME, rec.pose.position)
            assert d == pytest.approx(10.0 * k, abs=1e-6)

    def test_gimbal_pitch_clamped(self):
        recs = generate_flight_log(
            [HOME], duration_s=5.0,
            gimbal_schedule=Attitude(pitch_deg=-100.0))
        assert all(r.pose.gimbal_attitude.pitch_deg == -90.0 for r in recs)

    def test_empty_path_rejected(self):
        with pytest.raises(EmptyPath):
            generate_flight_log([])

    def test_times_strictly_increasing(self):
        recs = generate_flight_log([HOME, north_of(HOME, 57)],
                                   speed_mps=3.0, rate_hz=4.0)
        times = [r.t for r in recs]
        assert times == sorted(times)
        assert len(set(times)) == len(times)

    def test_yaw_faces_travel_direction(self):
        east = ecef_to_geodetic(enu_to_ecef(EnuVector(100, 0, 0), HOME))
        recs = generate_flight_log([HOME, east], speed_mps=10.0, rate_hz=1.0)
        assert recs[5].pose.uav_attitude.yaw_deg == pytest.approx(90.0, abs=1e-6)

    def test_schedules_step_at_breakpoints(self):
        recs = generate_flight_log(
            [HOME], duration_s=10.0,
            gimbal_schedule=[(0.0, Attitude(pitch_deg=-90)),
                             (5.0, Attitude(pitch_deg=-45))],
            satellites_schedule=[(0.0, 15), (7.0, 13)],
        )
        assert recs[4].pose.gimbal_attitude.pitch_deg == -90
        assert recs[5].pose.gimbal_attitude.pitch_deg == -45
        assert recs[6].pose.satellites == 15
        assert recs[7].pose.satellites == 13

    def test_agl_from_ground_reference(self):
        recs = generate_flight_log([HOME], duration_s=1.0, ground_alt_m=20.0)
        assert recs[0].pose.agl_m == pytest.approx(100.0)

    def test_below_ground_rejected(self):
        with pytest.raises(ValueError):
            generate_flight_log([HOME], duration_s=1.0, ground_alt_m=500.0)


class TestFileFormat:
    def test_wire_field_names_exact(self):
        rec = generate_flight_log([HOME], duration_s=0.0)[0]
        assert set(record_to_wire(rec)) == {
            "t", "lat", "lon", "alt", "agl", "roll", "pitch", "yaw",
            "g_roll", "g_pitch", "g_yaw", "sats",
        }

    def test_save_load_roundtrip(self, tmp_path):
        recs = generate_flight_log(
            [HOME, north_of(HOME, 80)], speed_mps=8.0, rate_hz=2.0,
            gimbal_schedule=Attitude(pitch_deg=-60, yaw_deg=10),
            satellites_schedule=13, ground_alt_m=20.0,
        )
        path = tmp_path / "log.jsonl"
        save_flight_log(recs, path)
        loaded = load_flight_log(path)
        assert len(loaded) == len(recs)
        for a, b in zip(recs, loaded.records):
            assert a.t == b.t
            assert a.pose == b.pose

    def test_one_json_object_per_line(self, tmp_path):
        path = tmp_path / "log.jsonl"
        save_flight_log(generate_flight_log([HOME], duration_s=3.0), path)
        lines = path.read_text().strip().split("\n")
        assert len(lines) == 4
        for line in lines:
            json.loads(line)


class TestPoseLookup:
    def make_log(self):
        return FlightLog(generate_flight_log(
            [HOME, north_of(HOME, 100)], speed_mps=10.0, rate_hz=1.0))

    def test_exact_time(self):
        log = self.make_log()
        assert log.pose_at(3.0).timestamp_s == 3.0

    def test_nearest_record(self):
        log = self.make_log()
        assert log.pose_at(3.2).timestamp_s == 3.0
        assert log.pose_at(3.8).timestamp_s == 4.0

    def test_tie_goes_to_earlier(self):
        log = self.make_log()
        assert log.pose_at(3.5).timestamp_s == 3.0

    def test_out_of_range_clamps_to_ends(self):
        log = self.make_log()
        assert log.pose_at(-5.0).timestamp_s == 0.0
        assert log.pose_at(99.0).timestamp_s == 10.0
        assert not log.in_range(99.0)
        assert log.in_range(10.0)

    def test_linear_interpolation_option(self):
        log = self.make_log()
        pose = log.pose_at(3.5, interpolate=True)
        d = horizontal_distance(HOME, pose.position)
        assert d == pytest.approx(35.0, abs=1e-6)

    def test_interpolation_wraps_yaw_short_way(self):
        a = generate_flight_log([HOME], duration_s=0.0)[0]
        recs = [
            a,
            type(a)(t=1.0, pose=type(a.pose)(
                position=a.pose.position,
                uav_attitude=Attitude(yaw_deg=350),
                gimbal_attitude=a.pose.gimbal_attitude,
                agl_m=a.pose.agl_m,
                satellites=a.pose.satellites,
                timestamp_s=1.0,
            )),
        ]
        log = FlightLog(recs)
        mid = log.pose_at(0.5, interpolate=True)
        assert mid.uav_attitude.yaw_deg == pytest.approx(355.0)
