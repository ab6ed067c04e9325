"""Deterministic mission simulation and the GPS-noise accuracy experiment."""

from aerotag.sim.flightlog import (
    FlightLog,
    FlightLogRecord,
    generate_flight_log,
    load_flight_log,
    save_flight_log,
)
from aerotag.sim.noise import DEFAULT_TIERS, NoiseModel, sample_gps_noise
from aerotag.sim.accuracy import (
    AccuracyReport,
    demo_mission,
    percentile_radius,
    run_accuracy_experiment,
    run_tiered_experiment,
)

__all__ = [
    "FlightLog",
    "FlightLogRecord",
    "generate_flight_log",
    "load_flight_log",
    "save_flight_log",
    "DEFAULT_TIERS",
    "NoiseModel",
    "sample_gps_noise",
    "AccuracyReport",
    "demo_mission",
    "percentile_radius",
    "run_accuracy_experiment",
    "run_tiered_experiment",
]
