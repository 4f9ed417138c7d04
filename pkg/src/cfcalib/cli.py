"""Command-line entry point.

Subcommands cover the pipeline end to end: ingest -> clean -> stats /
simulate / calibrate / validate / report. Every output is written
atomically and deterministically, with a sidecar ``<out>.manifest.json``
recording the command, input digests, config echo, seeds, and tool
version. All randomness flows from explicit seed flags.

Exit codes: 0 success, 1 domain/validation error (one machine-parsable
line on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path


from . import __version__, report as report_mod
from .calib import GaConfig, calibrate_and_validate, gof_report, load_ga_config
from .cleaning import (
    CleaningRules,
    clean_segments,
    pair_trajectories,
    read_segments_json,
    retained_samples,
    segments_to_dict,
)
from .errors import CfCalibError, DomainError
from .ingest import (
    derive_kinematics,
    geodesic_distance,
    read_gps_csv,
    read_gps_pair,
    read_trajectory_json,
    trajectory_from_dict,
    trajectory_to_dict,
)
from .models import MODEL_KINDS, load_params, params_from_dict, params_to_dict
from .sim import SimLimits, load_limits, result_to_dict, simulate_all
from .stats import analyze_segments


def _default_threads() -> int:
    return int(os.environ.get("CF_CALIB_THREADS", "1"))


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: Path, payload: dict) -> None:
    _atomic_write(path, json.dumps(payload, sort_keys=True, indent=1) + "\n")


def _write_manifest(out_path: Path, args: argparse.Namespace, inputs: list[Path],
                    config_echo: dict | None = None, seeds: list[int] | None = None) -> None:
    manifest = {
        "command": list(getattr(args, "_argv", [])),
        "subcommand": args.command,
        "inputs": {str(p): _sha256(Path(p)) for p in inputs},
        "config": config_echo or {},
        "seeds": seeds or [],
        "tool_version": __version__,
        "wall_clock_utc": datetime.now(timezone.utc).isoformat(),
    }
    _atomic_write(Path(str(out_path) + ".manifest.json"),
                  json.dumps(manifest, sort_keys=True, indent=1) + "\n")


def _require_file(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise DomainError(f"input file not found: {p}")
    return p


# ---------------------------------------------------------------------------
# subcommand handlers

def _cmd_ingest(args) -> int:
    out = Path(args.out)
    if args.input:
        src = _require_file(args.input)
        fixes = read_gps_csv(src)
        traj = derive_kinematics(fixes, vehicle_id=args.vehicle_id or src.stem, dt=args.dt)
        _write_json(out, trajectory_to_dict(traj))
        _write_manifest(out, args, [src])
    else:
        leader_src = _require_file(args.leader)
        follower_src = _require_file(args.follower)
        leader_fixes, follower_fixes = read_gps_pair(leader_src, follower_src)
        leader = derive_kinematics(leader_fixes, vehicle_id=leader_src.stem, dt=args.dt)
        follower = derive_kinematics(follower_fixes, vehicle_id=follower_src.stem, dt=args.dt)
        # positions are per-log arc lengths; the distance between the two
        # start fixes places the leader's origin on the follower's axis
        offset = geodesic_distance(follower_fixes[0], leader_fixes[0])
        _write_json(out, {"leader": trajectory_to_dict(leader),
                          "follower": trajectory_to_dict(follower),
                          "leader_start_offset_ft": offset})
        _write_manifest(out, args, [leader_src, follower_src])
    return 0


def _load_pair(args) -> tuple:
    if args.pair:
        src = _require_file(args.pair)
        data = json.loads(src.read_text())
        offset = data.get("leader_start_offset_ft", 0.0)
        return (trajectory_from_dict(data["leader"]),
                trajectory_from_dict(data["follower"]), offset, [src])
    leader_src = _require_file(args.leader)
    follower_src = _require_file(args.follower)
    return (read_trajectory_json(leader_src), read_trajectory_json(follower_src),
            args.leader_offset, [leader_src, follower_src])


def _cmd_clean(args) -> int:
    leader, follower, offset, inputs = _load_pair(args)
    rules = CleaningRules(
        max_accel=args.max_accel,
        max_follower_speed=args.max_follower_speed,
        max_spacing=args.max_spacing,
        min_segment_len=args.min_segment_len,
    )
    paired = pair_trajectories(leader, follower, leader_offset=offset)
    segments = clean_segments(paired, rules)
    out = Path(args.out)
    payload = segments_to_dict(segments)
    payload["retained_samples"] = retained_samples(segments)
    payload["paired_samples"] = len(paired)
    _write_json(out, payload)
    _write_manifest(out, args, inputs, config_echo=vars_without(args, "command", "out"))
    return 0


def _cmd_stats(args) -> int:
    src = _require_file(args.segments)
    segments = read_segments_json(src)
    result = analyze_segments(segments)
    out = Path(args.out)
    _write_json(out, result)
    _write_manifest(out, args, [src])
    if args.svg_dir:
        svg_dir = Path(args.svg_dir)
        for name, svg in report_mod.stats_svgs(segments).items():
            _atomic_write(svg_dir / name, svg)
        _write_manifest(svg_dir / "figures", args, [src])
    return 0


def _cmd_simulate(args) -> int:
    model_src = _require_file(args.model)
    seg_src = _require_file(args.segments)
    params = load_params(model_src)
    segments = read_segments_json(seg_src)
    inputs = [model_src, seg_src]
    limits = SimLimits()
    if args.limits:
        limits_src = _require_file(args.limits)
        limits = load_limits(limits_src)
        inputs.append(limits_src)
    results = simulate_all(params, segments, limits, args.dt)
    out = Path(args.out)
    _write_json(out, {
        "model": params_to_dict(params),
        "dt": args.dt,
        "results": [result_to_dict(r, s.id) for r, s in zip(results, segments)],
        "total_collisions": sum(r.collisions for r in results),
    })
    _write_manifest(out, args, inputs, config_echo={"dt": args.dt})
    if args.svg_dir:
        svg_dir = Path(args.svg_dir)
        for seg, res in zip(segments, results):
            for name, svg in report_mod.simulation_svgs(seg, res).items():
                _atomic_write(svg_dir / name, svg)
        _write_manifest(svg_dir / "figures", args, inputs)
    return 0


def _cmd_calibrate(args) -> int:
    seg_src = _require_file(args.segments)
    segments = read_segments_json(seg_src)
    inputs = [seg_src]
    config = GaConfig()
    if args.config:
        config_src = _require_file(args.config)
        config = load_ga_config(config_src)
        inputs.append(config_src)
    if args.seeds is not None:
        config.seeds = [int(s) for s in args.seeds.split(",")]
    limits = SimLimits()
    if args.limits:
        limits_src = _require_file(args.limits)
        limits = load_limits(limits_src)
        inputs.append(limits_src)

    result, rep_calib, rep_valid = calibrate_and_validate(
        args.model, segments, config,
        split_fraction=args.split, split_seed=args.split_seed,
        limits=limits, dt=args.dt, threads=args.threads,
    )
    out = Path(args.out)
    _write_json(out, {
        "calibration": result.as_dict(),
        "gof_calibration": rep_calib.as_dict(),
        "gof_validation": rep_valid.as_dict(),
        "config": config.as_dict(),
        "split": {"fraction": args.split, "seed": args.split_seed},
        "dt": args.dt,
    })
    _write_manifest(out, args, inputs, config_echo=config.as_dict(), seeds=config.seeds)
    return 0


def _cmd_validate(args) -> int:
    params_src = _require_file(args.params)
    seg_src = _require_file(args.segments)
    data = json.loads(params_src.read_text())
    if "calibration" in data:  # accept a calibrate result file
        data = data["calibration"]["best_params"]
    params = params_from_dict(data)
    segments = read_segments_json(seg_src)
    limits = SimLimits()
    inputs = [params_src, seg_src]
    if args.limits:
        limits_src = _require_file(args.limits)
        limits = load_limits(limits_src)
        inputs.append(limits_src)
    rep = gof_report(params, segments, limits, args.dt)
    out = Path(args.out)
    _write_json(out, {"model": params_to_dict(params), "gof": rep.as_dict(), "dt": args.dt})
    _write_manifest(out, args, inputs, config_echo={"dt": args.dt})
    return 0


def _cmd_report(args) -> int:
    if args.benchmarks:
        text = report_mod.render_benchmark_text()
    else:
        src = _require_file(args.input)
        data = json.loads(src.read_text())
        kind = args.kind
        if kind == "auto":
            if "descriptive" in data:
                kind = "stats"
            elif "calibration" in data:
                kind = "calibration"
            else:
                kind = "unknown"
        if kind == "stats":
            text = report_mod.render_stats_text(data)
        elif kind == "calibration":
            text = report_mod.render_calibration_text(data)
        else:
            text = "no data\n"
    if args.out:
        _atomic_write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return 0


def vars_without(args, *skip) -> dict:
    drop = set(skip) | {"func"}
    return {k: v for k, v in vars(args).items()
            if k not in drop and not k.startswith("_")}


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfcalib",
        description="Car-following kinematics, simulation, and GA calibration toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="GPS CSV logs -> trajectory JSON")
    p.add_argument("--input", help="single t,lat,lon CSV")
    p.add_argument("--leader", help="leader CSV (with --follower)")
    p.add_argument("--follower", help="follower CSV (with --leader)")
    p.add_argument("--vehicle-id", default=None)
    p.add_argument("--dt", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("clean", help="paired trajectories -> car-following segments")
    p.add_argument("--pair", help="pair JSON from `ingest --leader --follower`")
    p.add_argument("--leader", help="leader trajectory JSON")
    p.add_argument("--follower", help="follower trajectory JSON")
    p.add_argument("--leader-offset", type=float, default=0.0,
                   help="ft between the two logs' start points along the route "
                        "(pair JSON carries this automatically)")
    p.add_argument("--max-accel", type=float, default=18.0)
    p.add_argument("--max-follower-speed", type=float, default=22.0)
    p.add_argument("--max-spacing", type=float, default=656.0)
    p.add_argument("--min-segment-len", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_clean)

    p = sub.add_parser("stats", help="segments -> exploratory statistics report")
    p.add_argument("--segments", required=True)
    p.add_argument("--svg-dir", help="also write histogram SVGs here")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("simulate", help="replay a model along recorded leaders")
    p.add_argument("--model", required=True, help="model parameter JSON")
    p.add_argument("--segments", required=True)
    p.add_argument("--limits", help="actuation limits JSON")
    p.add_argument("--dt", type=float, default=1.0)
    p.add_argument("--svg-dir", help="also write observed-vs-simulated SVGs here")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("calibrate", help="fit a model with the seeded GA")
    p.add_argument("--model", required=True, choices=MODEL_KINDS)
    p.add_argument("--segments", required=True)
    p.add_argument("--config", help="GA config JSON")
    p.add_argument("--seeds", help="comma-separated seed list overriding the config")
    p.add_argument("--split", type=float, default=0.8)
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--limits", help="actuation limits JSON")
    p.add_argument("--dt", type=float, default=1.0)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("validate", help="goodness-of-fit of a model on segments")
    p.add_argument("--params", required=True, help="model params JSON or calibrate result")
    p.add_argument("--segments", required=True)
    p.add_argument("--limits", help="actuation limits JSON")
    p.add_argument("--dt", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("report", help="render result JSON as text tables")
    p.add_argument("--input", help="stats or calibration result JSON")
    p.add_argument("--kind", choices=["auto", "stats", "calibration"], default="auto")
    p.add_argument("--benchmarks", action="store_true",
                   help="print the bundled benchmark tables instead")
    p.add_argument("--out", help="write to file instead of stdout")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._argv = list(argv) if argv is not None else sys.argv[1:]
    if args.command == "ingest" and not (args.input or (args.leader and args.follower)):
        parser.error("ingest needs --input or both --leader and --follower")
    if args.command == "clean" and not (args.pair or (args.leader and args.follower)):
        parser.error("clean needs --pair or both --leader and --follower")
    if args.command == "report" and not (args.benchmarks or args.input):
        parser.error("report needs --input or --benchmarks")
    try:
        return args.func(args)
    except CfCalibError as exc:
        sys.stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
        return 1
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": "io", "message": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
