"""
Command-line entry point.

    trapzopt profile  --v 1.2 --a 1.8
    trapzopt simulate --config run.json
    trapzopt sweep    --demo a --plot
    trapzopt optimize --config run.json --seed 3 --workers 4

Exit codes: 0 success, 2 infeasible request, 64 usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import plots
from .config import RunConfig, demo_config_path, load_run_config, load_waypoints
from .errors import ConfigError, PlanningError, TrapzoptError
from .objectives import FixedAccel, ProportionalAccel, cycle_time, default_sweep, energy, max_path_rates, sweep
from .optimizer import optimize_trajectory
from .robot_model import forward_kinematics, validate_waypoints
from .time_scaling import evaluate, profile_from_two
from .trajectory import plan_trajectory, waypoint_chords

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_USAGE = 64

log = logging.getLogger("trapzopt")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x) + 0.0:.9g}"  # + 0.0 folds -0.0 into 0.0


def write_csv(path: Path, header, rows) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)  # default dialect ends lines with CRLF
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])
    return path


def write_json(path: Path, doc) -> Path:
    path.write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n")
    return path


def sample_times(duration: float, rate: float) -> np.ndarray:
    """``k / rate`` for every k up to ``duration``, with ``duration`` itself appended."""
    k = int(math.floor(duration * rate + 1e-9))
    t = np.arange(k + 1) / rate
    if duration - t[-1] > 1e-12:
        t = np.append(t, duration)
    return t


# -- context ------------------------------------------------------------------


def _run_config(args) -> RunConfig:
    if getattr(args, "config", None):
        cfg = load_run_config(args.config)
    elif getattr(args, "demo", None) or args.command in ("simulate", "sweep", "optimize"):
        cfg = load_run_config(demo_config_path(getattr(args, "demo", None) or "a"))
    else:
        cfg = RunConfig()
    if getattr(args, "robot", None):
        cfg.robot_path = Path(args.robot)
    if getattr(args, "waypoints", None):
        cfg.waypoints, cfg.params = load_waypoints(args.waypoints)
    if getattr(args, "sample_rate", None) is not None:
        if not args.sample_rate > 0:
            raise UsageError("--sample-rate must be positive")
        cfg.sample_rate = args.sample_rate
    if getattr(args, "workers", None) is not None:
        cfg.workers = args.workers
    return cfg


def _out_dir(args, cfg: RunConfig) -> Path:
    out = Path(args.out) if args.out else (cfg.out or Path("trapzopt_out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _need_waypoints(cfg: RunConfig):
    if cfg.waypoints is None:
        raise ConfigError("no waypoints given (use --waypoints, --config or --demo)")
    return cfg.waypoints


def _check_range(robot, waypoints):
    bad = validate_waypoints(robot.limits, waypoints)
    if bad:
        raise PlanningError("; ".join(map(str, bad)))


# -- commands -----------------------------------------------------------------


def cmd_profile(args) -> int:
    cfg = _run_config(args)
    given = {k: getattr(args, k) for k in ("v", "a", "T") if getattr(args, k) is not None}
    if not given:
        given = {k: float(cfg.profile[k]) for k in ("v", "a", "T") if k in cfg.profile}
    if len(given) != 2:
        raise UsageError(f"profile needs exactly two of --v, --a, --T (got {len(given)})")
    p = profile_from_two(**given)
    print(f"v   = {p.v:.9g}")
    print(f"a   = {p.a:.9g}")
    print(f"T   = {p.T:.9g}")
    print(f"t_a = {p.t_a:.9g}")
    print(f"shape = {'triangular' if p.is_triangular else 'trapezoidal'}")
    out = _out_dir(args, cfg)
    t = sample_times(p.T, cfg.sample_rate)
    s, sd, sdd = evaluate(p, t)
    write_csv(out / "profile.csv", ["t", "s", "sdot", "sddot"], zip(t, s, sd, sdd))
    if args.plot:
        plots.profile_figure(t, s, sd, sdd, out / "profile.png")
    print(f"wrote {out / 'profile.csv'}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _run_config(args)
    robot = cfg.robot()
    waypoints = _need_waypoints(cfg)
    if cfg.params is None:
        raise ConfigError("simulate needs per-segment 'params' in the waypoint or run-config file")
    _check_range(robot, waypoints)
    traj = plan_trajectory(waypoints, cfg.params, robot.limits)
    out = _out_dir(args, cfg)

    t = sample_times(traj.duration, cfg.sample_rate)
    q, qd, qdd = traj.sample(t)
    header = ["t"] + [f"q{m}" for m in range(1, 7)] + [f"qd{m}" for m in range(1, 7)] + [f"qdd{m}" for m in range(1, 7)]
    write_csv(out / "trajectory.csv", header, (np.concatenate([[ti], a, b, c]) for ti, a, b, c in zip(t, q, qd, qdd)))
    xyz = np.array([forward_kinematics(robot.model, qi).position for qi in q])
    write_csv(out / "path.csv", ["t", "x", "y", "z"], (np.concatenate([[ti], p]) for ti, p in zip(t, xyz)))

    S1, S2 = energy(traj), cycle_time(traj)
    chords = waypoint_chords(waypoints, robot.model)
    doc = {
        "S1": S1,
        "S2": S2,
        "duration": traj.duration,
        "boundary_times": traj.boundary_times.tolist(),
        "segments": [
            {
                "v": seg.profile.v,
                "a": seg.profile.a,
                "T": seg.duration,
                "t_a": seg.profile.t_a,
                "chord_m": float(c),
                "end_effector_v": seg.profile.v * float(c),
            }
            for seg, c in zip(traj.segments, chords)
        ],
        "note": "f_f needs a normalization context; see the sweep and optimize commands",
    }
    write_json(out / "report.json", doc)
    if args.plot:
        plots.joint_curves_figure(t, qdd, traj.boundary_times, out / "joint_accel.png")
        plots.path_figure(xyz, out / "path.png")
    print(f"S1 = {S1:.9g}  S2 = {S2:.9g} s  ({len(traj.segments)} segments)")
    print(f"wrote trajectory.csv, path.csv, report.json to {out}")
    return EXIT_OK


def _sweep_inputs(block: dict, waypoints, limits):
    block = dict(block or {})
    rule = block.get("a_rule") or {"kind": "fixed"}
    try:
        if "v_grid" in block:
            grid = [float(v) for v in block["v_grid"]]
        elif "v_min" in block or "v_max" in block:
            grid = np.linspace(float(block["v_min"]), float(block["v_max"]), int(block.get("n", 40))).tolist()
        else:
            grid, _ = default_sweep(waypoints, limits, int(block.get("n", 40)), float(block.get("lo_frac", 0.1)))
        kind = rule.get("kind", "fixed")
        if kind == "fixed":
            a_rule = FixedAccel(float(rule["a"]) if "a" in rule else max_path_rates(waypoints, limits)[1])
        elif kind == "proportional":
            a_rule = ProportionalAccel(float(rule["c"]))
        else:
            raise ConfigError(f"sweep.a_rule.kind must be 'fixed' or 'proportional', got {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed sweep block: {exc}") from None
    return grid, a_rule


def cmd_sweep(args) -> int:
    cfg = _run_config(args)
    robot = cfg.robot()
    waypoints = _need_waypoints(cfg)
    _check_range(robot, waypoints)
    grid, a_rule = _sweep_inputs(cfg.sweep, waypoints, robot.limits)
    result = sweep(waypoints, robot.limits, grid, a_rule, model=robot.model, workers=cfg.workers)
    out = _out_dir(args, cfg)
    write_csv(
        out / "sweep.csv",
        ["v", "end_effector_v", "S1", "S2", "S1_norm", "S2_norm", "ff", "feasible"],
        ((r.v, r.end_effector_v, r.S1, r.S2, r.S1_norm, r.S2_norm, r.ff, r.feasible) for r in result.rows),
    )
    summary = result.summary()
    write_json(out / "summary.json", summary)
    if args.plot:
        plots.sweep_figure(result, out / "sweep.png")
    best = result.best
    print(f"best v = {best.v:.9g} (end-effector {best.end_effector_v:.9g} m/s), ff = {best.ff:.9g}")
    print(
        f"ff best/avg/worst = {result.f_best:.4f} / {result.f_average:.4f} / {result.f_worst:.4f}; "
        f"F_worst = {result.F_worst:.2f}%, F_average = {result.F_average:.2f}%"
    )
    return EXIT_OK


def cmd_optimize(args) -> int:
    cfg = _run_config(args)
    robot = cfg.robot()
    waypoints = _need_waypoints(cfg)
    _check_range(robot, waypoints)
    if cfg.pso is None:
        raise ConfigError("optimize needs a 'pso' block in the run configuration")
    pso = cfg.pso_config(len(waypoints) - 1, seed_override=args.seed)
    res = optimize_trajectory(waypoints, robot.limits, pso, workers=cfg.workers)
    out = _out_dir(args, cfg)

    write_json(
        out / "best_params.json",
        {"params": [list(p) for p in res.params], "best_f": res.best_f, "seed": pso.seed},
    )
    write_csv(out / "convergence.csv", ["iter", "gbest_f"], ((i + 1, f) for i, f in enumerate(res.run.history)))
    doc = res.report.to_dict()
    doc["audit_grid"] = {
        "points": res.audit.points,
        "feasible": int(res.audit.values.size),
        "min": float(res.audit.values.min()) if res.audit.values.size else None,
        "mean": res.audit.mean if res.audit.values.size else None,
        "worst": res.audit.worst if res.audit.values.size else None,
        "note": "every segment shares one box-relative (v, a) position per grid point",
    }
    doc["pso"] = {
        "swarm_size": pso.swarm_size,
        "max_iters": pso.max_iters,
        "w": pso.w,
        "c1": pso.c1,
        "c2": pso.c2,
        "seed": pso.seed,
        "iterations": res.run.iterations,
        "bounds": [list(b) for b in res.bounds],
    }
    write_json(out / "report.json", doc)
    if args.plot:
        plots.convergence_figure(res.run.history, out / "convergence.png")
    print(f"best f_f = {res.best_f:.9g} after {res.run.iterations} iterations (seed {pso.seed})")
    for i, (v, a) in enumerate(res.params, 1):
        print(f"  segment {i}: v = {v:.6g}, a = {a:.6g}")
    if res.report.F_average is not None:
        print(f"F vs audit grid: worst {res.report.F_worst:.2f}%, average {res.report.F_average:.2f}%")
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="run configuration JSON")
    common.add_argument("--seed", type=int, help="PSO seed; overrides the config (default 0)")
    common.add_argument("--out", metavar="DIR", help="output directory (default ./trapzopt_out)")
    common.add_argument("--sample-rate", type=float, metavar="HZ", help="curve export rate (default 500)")
    common.add_argument("--plot", action="store_true", help="also render PNG figures next to the CSVs")
    common.add_argument("-v", "--verbose", action="store_true")

    files = _Parser(add_help=False)
    files.add_argument("--robot", metavar="FILE", help="robot description JSON (default bundled UR5)")
    files.add_argument("--waypoints", metavar="FILE", help="waypoint JSON")
    files.add_argument("--demo", choices=["a", "b"], help="use a bundled demo run configuration")
    files.add_argument("--workers", type=int, help="threads for objective evaluation")

    parser = _Parser(prog="trapzopt", description="Trapezoidal MoveJ planning and energy/time tuning.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("profile", parents=[common], help="build one time scaling from two of v, a, T")
    p.add_argument("--v", type=float, help="peak path velocity (1/s)")
    p.add_argument("--a", type=float, help="path acceleration (1/s^2)")
    p.add_argument("--T", type=float, help="duration (s)")
    p.set_defaults(func=cmd_profile)

    for name, func, text in (
        ("simulate", cmd_simulate, "plan a trajectory and export joint curves"),
        ("sweep", cmd_sweep, "sweep a shared path velocity and score each row"),
        ("optimize", cmd_optimize, "tune per-segment (v, a) with particle swarm optimization"),
    ):
        p = sub.add_parser(name, parents=[common, files], help=text)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"trapzopt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PlanningError as exc:
        print(f"trapzopt: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except TrapzoptError as exc:
        print(f"trapzopt: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (KeyError, TypeError, ValueError) as exc:
        # malformed input that slipped past the parsers
        print(f"trapzopt: error: bad input ({exc.__class__.__name__}: {exc})", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
