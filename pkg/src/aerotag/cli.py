"""Command-line front end.

Subcommands: convert, geolocate, project, simlog, accuracy, serve, replay.
Numbers print with 9 significant digits so golden-file comparisons are
stable; ``--json`` switches to machine-readable output. An optional
key=value config file supplies flag defaults (flags win), and the
AEROTAG_SEED environment variable overrides ``--seed``.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import os
import sys
from pathlib import Path

from aerotag.errors import AerotagError
from aerotag.geodesy import (
    EcefCoord,
    EnuVector,
    GeodeticCoord,
    ecef_to_enu,
    ecef_to_geodetic,
    enu_to_ecef,
    geodetic_to_ecef,
)
from aerotag.poi import replay_file
from aerotag.projection import (
    Attitude,
    CameraIntrinsics,
    GimbalFrame,
    GroundModel,
    PixelCoord,
    UavPose,
    geolocation_to_pixel,
    pixel_to_geolocation,
)
from aerotag.server import DEFAULT_PORT, ServerConfig, SyncServer
from aerotag.sim import (
    FlightLog,
    NoiseModel,
    demo_mission,
    generate_flight_log,
    load_flight_log,
    run_tiered_experiment,
    save_flight_log,
)


def fmt_num(x: float) -> str:
    """9 significant digits, always with a decimal marker."""
    s = f"{x:.9g}"
    if all(c not in s for c in ".eE"):
        s += ".0"
    return s


def round_sig(obj):
    """Recursively round floats to 9 significant digits for JSON output."""
    if isinstance(obj, float):
        return float(f"{obj:.9g}")
    if isinstance(obj, dict):
        return {k: round_sig(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [round_sig(v) for v in obj]
    return obj


def emit_json(obj) -> None:
    print(json.dumps(round_sig(obj), sort_keys=True))


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1; data errors exit 2 (see main)
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _intrinsics_from(args) -> CameraIntrinsics:
    return CameraIntrinsics.from_fov(
        args.fov, args.width, args.height, mode=args.fov_mode
    )


def _add_camera_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fov", type=float, default=83.0,
                   help="field of view in degrees (default 83)")
    p.add_argument("--fov-mode", choices=["horizontal", "vertical", "diagonal"],
                   default="horizontal",
                   help="which FOV the --fov value quotes")
    p.add_argument("--width", type=int, default=1920, help="frame width px")
    p.add_argument("--height", type=int, default=1080, help="frame height px")


def _add_ground_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ground-model", choices=[m.value for m in GroundModel],
                   default=GroundModel.PLANE.value,
                   help="plane: ground agl meters below the UAV; "
                        "paper-u0: zero the up component before transforming")
    p.add_argument("--gimbal-frame", choices=[g.value for g in GimbalFrame],
                   default=GimbalFrame.BODY.value,
                   help="interpret gimbal angles relative to the body or "
                        "as stabilized world-frame angles")


def build_parser() -> tuple[_Parser, list[_Parser]]:
    parser = _Parser(prog="aerotag", description=__doc__)
    parser.add_argument("--config", type=Path, default=None,
                        help="key=value file with flag defaults")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)
    subparsers = []
    _add = sub.add_parser

    def add_parser(*args, **kwargs):
        p = _add(*args, **kwargs)
        subparsers.append(p)
        return p

    sub.add_parser = add_parser  # type: ignore[method-assign]

    p = sub.add_parser("convert", help="convert between geodetic/ECEF/ENU")
    p.add_argument("--to", dest="target", default="ecef",
                   choices=["ecef", "geodetic", "enu"])
    p.add_argument("--from", dest="source",
                   choices=["ecef", "geodetic", "enu"], default=None,
                   help="input frame (defaults to the natural inverse)")
    p.add_argument("--ref", type=float, nargs=3, metavar=("LAT", "LON", "ALT"),
                   default=None, help="ENU reference point")
    p.add_argument("values", type=float, nargs=3, metavar="V")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("geolocate", help="flight log + time + pixel -> geodetic")
    p.add_argument("--log", required=True, type=Path)
    p.add_argument("--t", required=True, type=float)
    p.add_argument("--pixel", required=True, type=float, nargs=2,
                   metavar=("U", "V"))
    p.add_argument("--interpolate-pose", action="store_true")
    _add_camera_flags(p)
    _add_ground_flags(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("project", help="pose + POI -> pixel")
    p.add_argument("--log", type=Path, default=None)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--pose", type=float, nargs=4,
                   metavar=("LAT", "LON", "ALT", "AGL"), default=None)
    p.add_argument("--uav-att", type=float, nargs=3,
                   metavar=("ROLL", "PITCH", "YAW"), default=[0.0, 0.0, 0.0])
    p.add_argument("--gimbal", type=float, nargs=3,
                   metavar=("ROLL", "PITCH", "YAW"), default=[0.0, -90.0, 0.0])
    p.add_argument("--poi", type=float, nargs=3, required=True,
                   metavar=("LAT", "LON", "ALT"))
    p.add_argument("--interpolate-pose", action="store_true")
    _add_camera_flags(p)
    _add_ground_flags(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("simlog", help="waypoint mission config -> flight log")
    p.add_argument("--mission", required=True, type=Path,
                   help="mission JSON (waypoints, speed, rate, schedules)")
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("accuracy", help="Monte-Carlo geotag accuracy report")
    p.add_argument("--log", type=Path, default=None,
                   help="flight log (default: built-in demo hover mission)")
    p.add_argument("--target", type=float, nargs=3,
                   metavar=("LAT", "LON", "ALT"), default=None)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma", type=float, default=None,
                   help="flat per-axis sigma overriding the calibrated tiers")
    p.add_argument("--emit-samples", action="store_true",
                   help="include raw error samples in the JSON report")
    p.add_argument("--out", type=Path, default=None,
                   help="also write the JSON report to this path")
    _add_camera_flags(p)
    _add_ground_flags(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("serve", help="run the sync server")
    p.add_argument("--host", default="0.0.0.0")
    p.add_argument("--port", type=int, default=DEFAULT_PORT)
    p.add_argument("--event-log", type=Path, default=None,
                   help="append-only POI event log (replayed at startup)")
    p.add_argument("--flight-log", action="append", default=[],
                   metavar="NAME=PATH",
                   help="flight log to serve poses from (repeatable; "
                        "bare PATH uses the file stem as the uav id)")
    p.add_argument("--seed-pois", type=Path, default=None,
                   help="JSON list of POIs to create at startup if the "
                        "store is empty (scenario landmarks)")
    p.add_argument("--interpolate-pose", action="store_true")
    _add_camera_flags(p)
    _add_ground_flags(p)

    p = sub.add_parser("replay", help="event log -> snapshot JSON")
    p.add_argument("--event-log", required=True, type=Path)

    return parser, subparsers


def _load_config(path: Path) -> dict:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise AerotagError(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = _coerce(value.strip())
    return values


def _coerce(s: str):
    for cast in (int, float):
        try:
            return cast(s)
        except ValueError:
            pass
    if s.lower() in ("true", "false"):
        return s.lower() == "true"
    return s


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = build_parser()

    # apply config-file defaults before the real parse so flags win;
    # each subparser only takes the keys it actually declares
    if "--config" in argv:
        cfg_path = Path(argv[argv.index("--config") + 1])
        try:
            config = _load_config(cfg_path)
        except (OSError, AerotagError) as exc:
            print(f"aerotag: config error: {exc}", file=sys.stderr)
            return 2
        for p in [parser, *subparsers]:
            dests = {a.dest for a in p._actions}
            known = {k: v for k, v in config.items() if k in dests}
            if known:
                p.set_defaults(**known)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if "AEROTAG_SEED" in os.environ and hasattr(args, "seed"):
        args.seed = int(os.environ["AEROTAG_SEED"])

    try:
        return _dispatch(args)
    except (AerotagError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"aerotag: error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 0


def _dispatch(args) -> int:
    return {
        "convert": cmd_convert,
        "geolocate": cmd_geolocate,
        "project": cmd_project,
        "simlog": cmd_simlog,
        "accuracy": cmd_accuracy,
        "serve": cmd_serve,
        "replay": cmd_replay,
    }[args.command](args)


def cmd_convert(args) -> int:
    a, b, c = args.values
    source = args.source or {"ecef": "geodetic", "geodetic": "ecef",
                             "enu": "geodetic"}[args.target]
    if source == "enu" or args.target == "enu":
        if args.ref is None:
            raise AerotagError("ENU conversions need --ref LAT LON ALT")
    ref = GeodeticCoord(*args.ref) if args.ref else None

    if source == "geodetic":
        ecef = geodetic_to_ecef(GeodeticCoord(a, b, c))
    elif source == "ecef":
        ecef = EcefCoord(a, b, c)
    else:
        ecef = enu_to_ecef(EnuVector(a, b, c), ref)

    if args.target == "ecef":
        out = {"x": ecef.x_m, "y": ecef.y_m, "z": ecef.z_m}
    elif args.target == "geodetic":
        g = ecef_to_geodetic(ecef)
        out = {"lat": g.lat_deg, "lon": g.lon_deg, "alt": g.alt_m}
    else:
        v = ecef_to_enu(ecef, ref)
        out = {"east": v.east_m, "north": v.north_m, "up": v.up_m}

    if args.json:
        emit_json(out)
    else:
        print(" ".join(fmt_num(v) for v in out.values()))
    return 0


def _pose_from_args(args) -> UavPose:
    if args.log is not None:
        if args.t is None:
            raise AerotagError("--log needs --t")
        log = load_flight_log(args.log)
        if not log.in_range(args.t):
            raise AerotagError(
                f"t={args.t} outside log range [{log.t_min}, {log.t_max}]"
            )
        return log.pose_at(args.t, interpolate=args.interpolate_pose)
    if args.pose is None:
        raise AerotagError("need --log/--t or --pose")
    lat, lon, alt, agl = args.pose
    return UavPose(
        position=GeodeticCoord(lat, lon, alt),
        uav_attitude=Attitude(*args.uav_att),
        gimbal_attitude=Attitude(*args.gimbal),
        agl_m=agl,
    )


def cmd_geolocate(args) -> int:
    log = load_flight_log(args.log)
    if not log.in_range(args.t):
        raise AerotagError(
            f"t={args.t} outside log range [{log.t_min}, {log.t_max}]"
        )
    pose = log.pose_at(args.t, interpolate=args.interpolate_pose)
    geo = pixel_to_geolocation(
        pose, _intrinsics_from(args), PixelCoord(*args.pixel),
        mode=GroundModel(args.ground_model),
        gimbal_frame=GimbalFrame(args.gimbal_frame),
    )
    out = {"lat": geo.lat_deg, "lon": geo.lon_deg, "alt": geo.alt_m}
    if args.json:
        emit_json(out)
    else:
        print(" ".join(fmt_num(v) for v in out.values()))
    return 0


def cmd_project(args) -> int:
    pose = _pose_from_args(args)
    proj = geolocation_to_pixel(
        pose, _intrinsics_from(args), GeodeticCoord(*args.poi),
        gimbal_frame=GimbalFrame(args.gimbal_frame),
    )
    out = {"u": proj.pixel.u, "v": proj.pixel.v, "visible": proj.visible}
    if args.json:
        emit_json(out)
    else:
        print(f"{fmt_num(proj.pixel.u)} {fmt_num(proj.pixel.v)} "
              f"{'visible' if proj.visible else 'hidden'}")
    return 0


def cmd_simlog(args) -> int:
    spec = json.loads(args.mission.read_text(encoding="utf-8"))
    waypoints = [
        GeodeticCoord(w["lat"], w["lon"], w.get("alt", 0.0))
        for w in spec.get("waypoints", [])
    ]
    gimbal = _attitude_schedule(spec.get("gimbal"))
    sats = _sats_schedule(spec.get("satellites"))
    records = generate_flight_log(
        waypoints,
        speed_mps=spec.get("speed_mps", 5.0),
        rate_hz=spec.get("rate_hz", 1.0),
        gimbal_schedule=gimbal,
        satellites_schedule=sats,
        duration_s=spec.get("duration_s"),
        ground_alt_m=spec.get("ground_alt_m", 0.0),
    )
    save_flight_log(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _attitude_schedule(spec):
    if spec is None:
        return None
    if isinstance(spec, dict):
        return Attitude(spec.get("roll", 0.0), spec.get("pitch", -90.0),
                        spec.get("yaw", 0.0))
    return [
        (entry["t"], Attitude(entry.get("roll", 0.0),
                              entry.get("pitch", -90.0),
                              entry.get("yaw", 0.0)))
        for entry in spec
    ]


def _sats_schedule(spec):
    if spec is None or isinstance(spec, int):
        return spec
    return [(entry["t"], int(entry["sats"])) for entry in spec]


def cmd_accuracy(args) -> int:
    seed = args.seed
    if args.log is not None:
        if args.target is None:
            raise AerotagError("--log needs --target LAT LON ALT")
        log = load_flight_log(args.log)
        target = GeodeticCoord(*args.target)
        intr = _intrinsics_from(args)
        model = NoiseModel(seed=seed)
    else:
        target, log, intr, model = demo_mission(seed=seed)
        if args.target is not None:
            target = GeodeticCoord(*args.target)
    if args.sigma is not None:
        model = model.with_uniform_sigma(args.sigma)

    reports = run_tiered_experiment(
        target, log, intr, model, trials=args.trials,
        ground_model=GroundModel(args.ground_model),
        gimbal_frame=GimbalFrame(args.gimbal_frame),
    )
    # overall report fields at the top level; per-tier breakdown nested
    doc = reports["all"].to_wire(include_samples=args.emit_samples)
    doc["seed"] = seed
    doc["tiers"] = [r.to_wire(include_samples=args.emit_samples)
                    for name, r in reports.items() if name != "all"]
    if args.out is not None:
        args.out.write_text(
            json.dumps(round_sig(doc), sort_keys=True) + "\n", encoding="utf-8"
        )
    if args.json:
        emit_json(doc)
    else:
        header = f"{'tier':>10} {'trials':>8} {'mean_m':>12} {'cep68_m':>12} {'cep99_m':>12}"
        print(header)
        print("-" * len(header))
        for r in reports.values():
            print(f"{r.tier:>10} {r.trials:>8} {fmt_num(r.mean_m):>12} "
                  f"{fmt_num(r.cep68_m):>12} {fmt_num(r.cep99_m):>12}")
    return 0


def cmd_serve(args) -> int:
    logging.basicConfig(level=logging.INFO,
                        format="%(asctime)s %(levelname)s %(message)s")
    flight_logs = {}
    for entry in args.flight_log:
        name, _, path = entry.rpartition("=")
        path = Path(path)
        flight_logs[name or path.stem] = path
    config = ServerConfig(
        intrinsics=_intrinsics_from(args),
        ground_model=GroundModel(args.ground_model),
        gimbal_frame=GimbalFrame(args.gimbal_frame),
        interpolate_pose=args.interpolate_pose,
    )
    server = SyncServer.from_paths(
        event_log_path=args.event_log,
        flight_log_paths=flight_logs,
        config=config,
    )
    if args.seed_pois is not None and len(server.store) == 0:
        _seed_pois(server, args.seed_pois)
    asyncio.run(server.run_forever(args.host, args.port))
    return 0


def _seed_pois(server: SyncServer, path: Path) -> None:
    import time as _time
    from aerotag.poi import Poi, PoiOp

    entries = json.loads(path.read_text(encoding="utf-8"))
    now = int(_time.time() * 1000)
    for i, entry in enumerate(entries):
        poi = Poi(
            id=entry.get("id", f"seed-{i:03d}"),
            kind=entry["kind"],
            geolocation=GeodeticCoord(entry["lat"], entry["lon"],
                                      entry.get("alt", 0.0)),
            uncertainty_radius_m=entry.get("unc_m", 0.0),
            text_note=entry.get("text"),
        )
        ev = server.store.propose(PoiOp.CREATE, ts_ms=now + i, client="seed",
                                  poi=poi)
        if ev is not None and server.event_log is not None:
            server.event_log.append(ev)


def cmd_replay(args) -> int:
    store = replay_file(args.event_log)
    emit_json({"seq": store.last_seq, "pois": store.snapshot_wire()})
    return 0


if __name__ == "__main__":
    sys.exit(main())
