import json
import subprocess
import sys

import pytest

from aerotag.cli import fmt_num, main
from aerotag.geodesy import GeodeticCoord
from aerotag.projection import Attitude
from aerotag.sim import generate_flight_log, save_flight_log


@pytest.fixture
def hover_log(tmp_path):
    path = tmp_path / "hover.jsonl"
    save_flight_log(
        generate_flight_log(
            [GeodeticCoord(41.7, -86.2, 120.0)], rate_hz=1.0, duration_s=10.0,
            gimbal_schedule=Attitude(pitch_deg=-90.0), ground_alt_m=20.0,
        ),
        path,
    )
    return path


def run_cli(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


class TestNumberFormat:
    def test_nine_significant_digits(self):
        assert fmt_num(6378137.0) == "6378137.0"
        assert fmt_num(0.0) == "0.0"
        assert fmt_num(111319.49079327358) == "111319.491"
        assert fmt_num(1.23456789012e-07) == "1.23456789e-07"
        assert fmt_num(41.7) == "41.7"


class TestConvert:
    def test_equator_to_ecef(self, capsys):
        code, out, _ = run_cli(["convert", "--to", "ecef", "0", "0", "0"],
                               capsys)
        assert code == 0
        assert out.strip() == "6378137.0 0.0 0.0"

    def test_ecef_to_geodetic(self, capsys):
        code, out, _ = run_cli(
            ["convert", "--to", "geodetic", "6378137.0", "0", "0"], capsys)
        assert code == 0
        assert out.strip() == "0.0 0.0 0.0"

    def test_enu_roundtrip_via_flags(self, capsys):
        code, out, _ = run_cli(
            ["convert", "--to", "ecef", "--from", "enu",
             "--ref", "0", "0", "0", "1", "0", "0"], capsys)
        assert code == 0
        assert out.strip() == "6378137.0 1.0 0.0"
        code, out, _ = run_cli(
            ["convert", "--to", "enu", "--from", "ecef",
             "--ref", "0", "0", "0", "6378137.0", "1.0", "0"], capsys)
        assert code == 0
        assert out.strip() == "1.0 0.0 0.0"

    def test_json_output_parses(self, capsys):
        code, out, _ = run_cli(
            ["convert", "--to", "ecef", "--json", "45", "90", "1000"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert set(doc) == {"x", "y", "z"}
        assert doc["y"] == pytest.approx(4518297.99, abs=0.01)

    def test_enu_without_ref_is_data_error(self, capsys):
        code, _, err = run_cli(["convert", "--to", "enu", "1", "2", "3"],
                               capsys)
        assert code == 2
        assert "ref" in err.lower()

    def test_bad_choice_is_usage_error(self, capsys):
        code, _, _ = run_cli(["convert", "--to", "nowhere", "0", "0", "0"],
                             capsys)
        assert code == 1


class TestGeolocate:
    def test_nadir_center(self, hover_log, capsys):
        code, out, _ = run_cli(
            ["geolocate", "--log", str(hover_log), "--t", "5.0",
             "--pixel", "960", "540"], capsys)
        assert code == 0
        lat, lon, alt = out.split()
        assert lat == "41.7" and lon == "-86.2"
        assert float(alt) == pytest.approx(20.0, abs=1e-6)

    def test_json_matches_text(self, hover_log, capsys):
        code, out, _ = run_cli(
            ["geolocate", "--log", str(hover_log), "--t", "5.0",
             "--pixel", "960", "540", "--json"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert set(doc) == {"lat", "lon", "alt"}
        assert doc["lat"] == 41.7

    def test_out_of_range_t(self, hover_log, capsys):
        code, _, err = run_cli(
            ["geolocate", "--log", str(hover_log), "--t", "55",
             "--pixel", "0", "0"], capsys)
        assert code == 2
        assert "range" in err

    def test_missing_log_file(self, tmp_path, capsys):
        code, _, _ = run_cli(
            ["geolocate", "--log", str(tmp_path / "nope.jsonl"), "--t", "0",
             "--pixel", "0", "0"], capsys)
        assert code == 2


class TestProject:
    def test_center_pixel(self, capsys):
        code, out, _ = run_cli(
            ["project", "--pose", "41.7", "-86.2", "120", "100",
             "--poi", "41.7", "-86.2", "20", "--json"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["visible"] is True
        assert doc["u"] == pytest.approx(960.0, abs=1e-6)
        assert doc["v"] == pytest.approx(540.0, abs=1e-6)

    def test_log_pose_source(self, hover_log, capsys):
        code, out, _ = run_cli(
            ["project", "--log", str(hover_log), "--t", "5.0",
             "--poi", "41.7", "-86.2", "20"], capsys)
        assert code == 0
        assert out.split()[2] == "visible"


class TestSimlogAndAccuracy:
    def test_simlog_writes_mission(self, tmp_path, capsys):
        mission = tmp_path / "mission.json"
        mission.write_text(json.dumps({
            "waypoints": [{"lat": 41.7, "lon": -86.2, "alt": 120.0}],
            "rate_hz": 1.0,
            "duration_s": 5.0,
            "gimbal": {"pitch": -90.0},
            "satellites": 14,
            "ground_alt_m": 20.0,
        }))
        out_path = tmp_path / "out.jsonl"
        code, out, _ = run_cli(
            ["simlog", "--mission", str(mission), "--out", str(out_path)],
            capsys)
        assert code == 0
        lines = out_path.read_text().strip().split("\n")
        assert len(lines) == 6
        assert json.loads(lines[0])["sats"] == 14

    def test_zero_sigma_accuracy(self, capsys):
        code, out, _ = run_cli(
            ["accuracy", "--sigma", "0", "--trials", "100", "--json"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["tier"] == "all"
        assert doc["cep99_m"] < 1e-6

    def test_same_seed_identical_output(self, capsys):
        args = ["accuracy", "--trials", "300", "--seed", "9", "--json"]
        _, out1, _ = run_cli(args, capsys)
        _, out2, _ = run_cli(args, capsys)
        assert out1 == out2

    def test_env_seed_overrides_flag(self, capsys, monkeypatch):
        args = ["accuracy", "--trials", "200", "--seed", "1", "--json",
                "--sigma", "2.0"]
        _, base, _ = run_cli(args, capsys)
        monkeypatch.setenv("AEROTAG_SEED", "2")
        _, enved, _ = run_cli(args, capsys)
        monkeypatch.delenv("AEROTAG_SEED")
        _, seed2, _ = run_cli(["accuracy", "--trials", "200", "--seed", "2",
                               "--json", "--sigma", "2.0"], capsys)
        assert enved != base
        assert enved == seed2

    def test_report_file_written(self, tmp_path, capsys):
        out_path = tmp_path / "report.json"
        code, _, _ = run_cli(
            ["accuracy", "--trials", "100", "--sigma", "1.0",
             "--out", str(out_path)], capsys)
        assert code == 0
        doc = json.loads(out_path.read_text())
        assert {"trials", "mean_m", "cep68_m", "cep99_m", "tier"} <= set(doc)
        assert {r["tier"] for r in doc["tiers"]} == {"sats>=0"}

    def test_emit_samples(self, capsys):
        code, out, _ = run_cli(
            ["accuracy", "--trials", "50", "--sigma", "1.0", "--json",
             "--emit-samples"], capsys)
        doc = json.loads(out)
        assert len(doc["samples"]) == 50

    def test_table_output(self, capsys):
        code, out, _ = run_cli(
            ["accuracy", "--trials", "50", "--sigma", "1.0"], capsys)
        assert code == 0
        assert "tier" in out and "cep68_m" in out and "sats>=0" in out


class TestReplay:
    def test_replay_snapshot(self, tmp_path, capsys):
        from aerotag.poi import EventLog, Poi, PoiOp, PoiStore

        store = PoiStore()
        log = EventLog(tmp_path / "events.jsonl")
        poi = Poi(id="p1", kind="victim",
                  geolocation=GeodeticCoord(41.7, -86.2, 20.0))
        ev = store.propose(PoiOp.CREATE, ts_ms=1000, client="x", poi=poi)
        log.append(ev)
        code, out, _ = run_cli(
            ["replay", "--event-log", str(tmp_path / "events.jsonl")], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["seq"] == 1
        assert doc["pois"][0]["id"] == "p1"

    def test_corrupt_log_is_data_error(self, tmp_path, capsys):
        path = tmp_path / "bad.jsonl"
        path.write_text("garbage\n")
        code, _, _ = run_cli(["replay", "--event-log", str(path)], capsys)
        assert code == 2


class TestConfigFile:
    def test_config_supplies_defaults_flags_win(self, tmp_path, capsys):
        cfg = tmp_path / "aerotag.conf"
        cfg.write_text("trials = 77\nsigma = 1.0\n# comment\nseed = 4\n")
        code, out, _ = run_cli(
            ["--config", str(cfg), "accuracy", "--json"], capsys)
        assert code == 0
        assert json.loads(out)["trials"] == 77
        code, out, _ = run_cli(
            ["--config", str(cfg), "accuracy", "--json", "--trials", "33"],
            capsys)
        assert json.loads(out)["trials"] == 33

    def test_bad_config_line(self, tmp_path, capsys):
        cfg = tmp_path / "bad.conf"
        cfg.write_text("this has no equals sign\n")
        code, _, err = run_cli(["--config", str(cfg), "accuracy"], capsys)
        assert code == 2


class TestHelpAndEntryPoint:
    def test_help_exits_zero(self, capsys):
        code, out, _ = run_cli(["--help"], capsys)
        assert code == 0
        assert "convert" in out and "serve" in out

    def test_subcommand_help(self, capsys):
        code, out, _ = run_cli(["accuracy", "--help"], capsys)
        assert code == 0
        assert "--trials" in out

    def test_module_entry(self, hover_log):
        proc = subprocess.run(
            [sys.executable, "-m", "aerotag.cli", "convert", "--to", "ecef",
             "0", "0", "0"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        assert proc.stdout.strip() == "6378137.0 0.0 0.0"
