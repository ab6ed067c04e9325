"""Monte-Carlo geotagging accuracy experiment.

Each trial re-annotates a known target from a randomly chosen log pose
whose GPS position has been perturbed, then measures the horizontal miss:

1. project the target through the TRUE pose to get its true pixel,
2. offset the pose position by one GPS noise draw,
3. geolocate that same pixel through the perturbed pose,
4. record the horizontal distance to the true target.

Error radii are reported as nearest-rank percentiles (CEP).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from aerotag.errors import EmptySamples, TargetNeverVisible
from aerotag.geodesy import (
    EnuVector,
    GeodeticCoord,
    ecef_to_geodetic,
    enu_to_ecef,
    horizontal_distance,
)
from aerotag.projection import (
    Attitude,
    CameraIntrinsics,
    GimbalFrame,
    GroundModel,
    UavPose,
    geolocation_to_pixel,
    pixel_to_geolocation,
)
from aerotag.sim.flightlog import FlightLog, FlightLogRecord, generate_flight_log
from aerotag.sim.noise import NoiseModel, sample_gps_noise

_STREAM_POSE_PICK = 0


@dataclass(frozen=True)
class AccuracyReport:
    trials: int
    mean_m: float
    cep68_m: float
    cep99_m: float
    samples: list[float] = field(default_factory=list)
    tier: str = "all"

    def to_wire(self, include_samples: bool = False) -> dict:
        d = {
            "trials": self.trials,
            "mean_m": self.mean_m,
            "cep68_m": self.cep68_m,
            "cep99_m": self.cep99_m,
            "tier": self.tier,
        }
        if include_samples:
            d["samples"] = list(self.samples)
        return d


def percentile_radius(samples: list[float], p: float) -> float:
    """Nearest-rank percentile: the ceil(p*n)-th smallest sample."""
    if not samples:
        raise EmptySamples("percentile of no samples")
    if not (0.0 < p <= 1.0):
        raise ValueError(f"percentile fraction {p} outside (0, 1]")
    ordered = sorted(samples)
    rank = math.ceil(p * len(ordered))
    return ordered[rank - 1]


def _report(samples: list[float], tier: str) -> AccuracyReport:
    return AccuracyReport(
        trials=len(samples),
        mean_m=math.fsum(samples) / len(samples),
        cep68_m=percentile_radius(samples, 0.68),
        cep99_m=percentile_radius(samples, 0.99),
        samples=samples,
        tier=tier,
    )


def _perturbed(pose: UavPose, offset: EnuVector) -> UavPose:
    if offset.east_m == 0.0 and offset.north_m == 0.0 and offset.up_m == 0.0:
        return pose
    pos = ecef_to_geodetic(enu_to_ecef(offset, pose.position))
    return UavPose(
        position=pos,
        uav_attitude=pose.uav_attitude,
        gimbal_attitude=pose.gimbal_attitude,
        agl_m=pose.agl_m,
        satellites=pose.satellites,
        timestamp_s=pose.timestamp_s,
    )


def _run_samples(
    target: GeodeticCoord,
    log: FlightLog,
    intr: CameraIntrinsics,
    model: NoiseModel,
    trials: int,
    ground_model: GroundModel,
    gimbal_frame: GimbalFrame,
) -> list[tuple[int, float]]:
    """(tier, horizontal error) per trial, in trial-index order."""
    candidates = []
    for rec in log:
        proj = geolocation_to_pixel(rec.pose, intr, target, gimbal_frame)
        if proj.visible:
            candidates.append((rec.pose, proj.pixel))
    if not candidates:
        raise TargetNeverVisible(
            "target is outside the camera frustum of every log record"
        )

    out = []
    for i in range(trials):
        rng = np.random.default_rng([model.seed, i, _STREAM_POSE_PICK])
        pose, true_px = candidates[int(rng.integers(len(candidates)))]
        offset = sample_gps_noise(model, pose.satellites, i)
        estimate = pixel_to_geolocation(
            _perturbed(pose, offset), intr, true_px,
            mode=ground_model, gimbal_frame=gimbal_frame,
        )
        err = horizontal_distance(target, estimate)
        out.append((model.tier_for(pose.satellites), err))
    return out


def run_accuracy_experiment(
    target: GeodeticCoord,
    log: FlightLog,
    intr: CameraIntrinsics,
    model: NoiseModel,
    trials: int,
    ground_model: GroundModel = GroundModel.PLANE,
    gimbal_frame: GimbalFrame = GimbalFrame.BODY,
) -> AccuracyReport:
    """Overall report across all trials."""
    pairs = _run_samples(target, log, intr, model, trials,
                         ground_model, gimbal_frame)
    return _report([err for _, err in pairs], tier="all")


def run_tiered_experiment(
    target: GeodeticCoord,
    log: FlightLog,
    intr: CameraIntrinsics,
    model: NoiseModel,
    trials: int,
    ground_model: GroundModel = GroundModel.PLANE,
    gimbal_frame: GimbalFrame = GimbalFrame.BODY,
) -> dict[str, AccuracyReport]:
    """Overall report plus one report per satellite tier that occurred.

    Keys: "all" and "sats>=<threshold>" in descending threshold order.
    """
    pairs = _run_samples(target, log, intr, model, trials,
                         ground_model, gimbal_frame)
    reports = {"all": _report([err for _, err in pairs], tier="all")}
    for thr in sorted({tier for tier, _ in pairs}, reverse=True):
        label = f"sats>={thr}"
        reports[label] = _report(
            [err for tier, err in pairs if tier == thr], tier=label
        )
    return reports


def demo_mission(
    seed: int = 0,
    n_records: int = 100,
    tiers: dict[int, float] | None = None,
) -> tuple[GeodeticCoord, FlightLog, CameraIntrinsics, NoiseModel]:
    """Shipped demo: nadir hover with a 90/10 mix of 15- and 13-satellite
    records, calibrated so the report echoes the field-accuracy shape."""
    hover = GeodeticCoord(41.7, -86.2, 120.0)
    sats_schedule = [
        (float(k), 13 if k % 10 == 9 else 15) for k in range(n_records)
    ]
    records = generate_flight_log(
        [hover],
        rate_hz=1.0,
        duration_s=float(n_records - 1),
        gimbal_schedule=Attitude(pitch_deg=-90.0),
        satellites_schedule=sats_schedule,
        ground_alt_m=20.0,
    )
    target = GeodeticCoord(41.7, -86.2, 20.0)
    intr = CameraIntrinsics.from_fov(83.0, 1920, 1080, mode="horizontal")
    model = NoiseModel(seed=seed) if tiers is None else NoiseModel(tiers, seed)
    return target, FlightLog(records), intr, model
