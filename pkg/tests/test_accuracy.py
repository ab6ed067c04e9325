import json

import pytest

from aerotag.errors import EmptySamples, TargetNeverVisible
from aerotag.geodesy import GeodeticCoord
from aerotag.projection import Attitude, CameraIntrinsics
from aerotag.sim import (
    FlightLog,
    NoiseModel,
    demo_mission,
    generate_flight_log,
    percentile_radius,
    run_accuracy_experiment,
    run_tiered_experiment,
)

from oracles import counting_percentile, rayleigh_mean, rayleigh_quantile

HOME = GeodeticCoord(41.7, -86.2, 120.0)
GROUND = GeodeticCoord(41.7, -86.2, 20.0)
INTR = CameraIntrinsics(83.0, 1920, 1080)


def hover_log(pitch=-90.0, sats=15, n=50):
    return FlightLog(generate_flight_log(
        [HOME], rate_hz=1.0, duration_s=float(n - 1),
        gimbal_schedule=Attitude(pitch_deg=pitch),
        satellites_schedule=sats, ground_alt_m=20.0,
    ))


class TestPercentileRadius:
    def test_one_to_ten_at_68(self):
        samples = [float(x) for x in range(1, 11)]
        assert percentile_radius(samples, 0.68) == 7.0
        assert counting_percentile(samples, 0.68) == 7.0

    def test_matches_counting_oracle(self):
        import random
        rng = random.Random(17)
        samples = [rng.uniform(0, 50) for _ in range(137)]
        for p in (0.05, 0.31, 0.5, 0.68, 0.9, 0.99, 1.0):
            assert percentile_radius(samples, p) == counting_percentile(samples, p)

    def test_constant_samples(self):
        assert percentile_radius([4.2] * 9, 0.5) == 4.2
        assert percentile_radius([4.2] * 9, 0.99) == 4.2

    def test_p_one_is_max(self):
        assert percentile_radius([3.0, 9.0, 1.0], 1.0) == 9.0

    def test_unsorted_input(self):
        # ceil(0.34 * 3) = 2, so the second-smallest sample
        assert percentile_radius([5.0, 1.0, 3.0], 0.34) == 3.0

    def test_empty_rejected(self):
        with pytest.raises(EmptySamples):
            percentile_radius([], 0.68)

    def test_bad_fraction_rejected(self):
        with pytest.raises(ValueError):
            percentile_radius([1.0], 0.0)
        with pytest.raises(ValueError):
            percentile_radius([1.0], 1.5)


class TestExperiment:
    def test_zero_noise_is_exact(self):
        model = NoiseModel(tiers={0: 0.0}, seed=9)
        rep = run_accuracy_experiment(GROUND, hover_log(), INTR, model,
                                      trials=200)
        assert rep.mean_m < 1e-6
        assert rep.cep68_m < 1e-6
        assert rep.cep99_m < 1e-6

    def test_unit_sigma_matches_rayleigh(self):
        model = NoiseModel(tiers={0: 1.0}, seed=21)
        rep = run_accuracy_experiment(GROUND, hover_log(), INTR, model,
                                      trials=6000)
        assert rep.cep68_m == pytest.approx(rayleigh_quantile(1.0, 0.68),
                                            rel=0.15)
        assert rep.mean_m == pytest.approx(rayleigh_mean(1.0), rel=0.1)

    def test_cep_ordering_and_sample_count(self):
        model = NoiseModel(tiers={0: 2.0}, seed=4)
        rep = run_accuracy_experiment(GROUND, hover_log(), INTR, model,
                                      trials=500)
        assert rep.cep68_m <= rep.cep99_m
        assert rep.mean_m >= 0
        assert len(rep.samples) == rep.trials == 500

    def test_deterministic_reports(self):
        model = NoiseModel(tiers={0: 1.5}, seed=33)
        r1 = run_accuracy_experiment(GROUND, hover_log(), INTR, model, 400)
        r2 = run_accuracy_experiment(GROUND, hover_log(), INTR, model, 400)
        assert json.dumps(r1.to_wire(True)) == json.dumps(r2.to_wire(True))

    def test_doubling_sigma_doubles_cep68(self):
        r1 = run_accuracy_experiment(
            GROUND, hover_log(), INTR, NoiseModel(tiers={0: 1.0}, seed=8), 10000)
        r2 = run_accuracy_experiment(
            GROUND, hover_log(), INTR, NoiseModel(tiers={0: 2.0}, seed=8), 10000)
        assert r2.cep68_m == pytest.approx(2.0 * r1.cep68_m, rel=0.1)

    def test_oblique_mean_not_below_nadir(self):
        # horizontal-only noise translates the fix identically at any
        # gimbal pitch, so this holds as near-exact equality; each setup
        # gets a target at its own boresight ground point
        import math

        from aerotag.geodesy import EnuVector, ecef_to_geodetic, enu_to_ecef

        model = NoiseModel(tiers={0: 1.0}, seed=13)
        nadir = run_accuracy_experiment(GROUND, hover_log(-90.0), INTR,
                                        model, 2000)
        ahead = 100.0 / math.tan(math.radians(30.0))
        hit = ecef_to_geodetic(enu_to_ecef(EnuVector(0, ahead, -100), HOME))
        oblique = run_accuracy_experiment(hit, hover_log(-30.0), INTR,
                                          model, 2000)
        assert oblique.mean_m >= nadir.mean_m - 1e-3

    def test_lower_satellite_tier_means_larger_error(self):
        model = NoiseModel(tiers={15: 1.0, 13: 4.0, 0: 4.0}, seed=2)
        good = run_accuracy_experiment(GROUND, hover_log(sats=15), INTR,
                                       model, 3000)
        poor = run_accuracy_experiment(GROUND, hover_log(sats=13), INTR,
                                       model, 3000)
        assert poor.mean_m > good.mean_m

    def test_target_never_visible(self):
        # camera looks straight down but the target sits 10 km away
        far = GeodeticCoord(41.8, -86.2, 20.0)
        with pytest.raises(TargetNeverVisible):
            run_accuracy_experiment(far, hover_log(), INTR,
                                    NoiseModel(seed=1), 10)


class TestTieredExperiment:
    def test_tier_reports_partition_trials(self):
        target, log, intr, model = demo_mission(seed=5)
        reports = run_tiered_experiment(target, log, intr, model, trials=800)
        assert "all" in reports
        tier_total = sum(r.trials for k, r in reports.items() if k != "all")
        assert tier_total == reports["all"].trials == 800
        for rep in reports.values():
            assert rep.cep68_m <= rep.cep99_m

    def test_demo_mission_echoes_field_numbers(self):
        target, log, intr, model = demo_mission(seed=0)
        reports = run_tiered_experiment(target, log, intr, model, trials=6000)
        assert reports["all"].cep68_m == pytest.approx(2.6, rel=0.2)
        assert reports["sats>=15"].mean_m == pytest.approx(2.0, rel=0.2)
        assert reports["sats>=13"].mean_m == pytest.approx(7.0, rel=0.2)

    def test_report_wire_fields(self):
        target, log, intr, model = demo_mission(seed=1)
        rep = run_accuracy_experiment(target, log, intr, model, trials=50)
        wire = rep.to_wire()
        assert set(wire) == {"trials", "mean_m", "cep68_m", "cep99_m", "tier"}
        wire = rep.to_wire(include_samples=True)
        assert len(wire["samples"]) == 50
