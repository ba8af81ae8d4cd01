"""Run-configuration and waypoint file parsing."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .optimizer import PsoConfig, expand_bounds
from .robot_model import Robot, as_joint_config, load_robot

DEFAULT_SAMPLE_RATE = 500.0
DEMOS = ("a", "b")


def data_dir() -> Path:
    return Path(str(resources.files("trapzopt").joinpath("data")))


def demo_config_path(name: str) -> Path:
    if name not in DEMOS:
        raise ConfigError(f"unknown demo {name!r}; choose one of {', '.join(DEMOS)}")
    return data_dir() / f"demo_{name}_run.json"


def read_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return doc


def _pairs(raw, what: str) -> list[tuple[float, float]]:
    try:
        out = [(float(v), float(a)) for v, a in raw]
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be a list of [v, a] pairs") from None
    return out


def parse_waypoints(doc: dict, source: str = "waypoints") -> tuple[list, list | None]:
    """Return ``(waypoints, params or None)`` from a waypoint document."""
    raw = doc.get("waypoints")
    if not isinstance(raw, list):
        raise ConfigError(f"{source}: 'waypoints' must be a list of 6-angle lists")
    try:
        waypoints = [as_joint_config(q) for q in raw]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: bad waypoint ({exc})") from None
    params = doc.get("params")
    return waypoints, (_pairs(params, f"{source}: 'params'") if params is not None else None)


def load_waypoints(path) -> tuple[list, list | None]:
    return parse_waypoints(read_json(path), str(path))


@dataclass
class RunConfig:
    robot_path: Path | None = None
    waypoints: list | None = None
    params: list | None = None
    sample_rate: float = DEFAULT_SAMPLE_RATE
    out: Path | None = None
    profile: dict = field(default_factory=dict)
    sweep: dict | None = None
    pso: dict | None = None
    workers: int | None = None
    seed: int | None = None

    def robot(self) -> Robot:
        return load_robot(self.robot_path)

    def pso_config(self, n_segments: int, seed_override: int | None = None) -> PsoConfig:
        block = dict(self.pso or {})
        kwargs = {}
        for key, cast in (
            ("swarm_size", int),
            ("max_iters", int),
            ("w", float),
            ("c1", float),
            ("c2", float),
            ("stall_iters", int),
            ("stall_tol", float),
            ("seed", int),
        ):
            if key in block:
                try:
                    kwargs[key] = cast(block[key])
                except (TypeError, ValueError):
                    raise ConfigError(f"pso.{key} must be a number, got {block[key]!r}") from None
        if seed_override is not None:
            kwargs["seed"] = seed_override
        elif "seed" not in kwargs and self.seed is not None:
            kwargs["seed"] = self.seed
        b = block.get("bounds")
        if b is not None:
            try:
                kwargs["bounds"] = tuple(expand_bounds(b["v"], b["a"], n_segments))
            except (KeyError, TypeError, ValueError):
                raise ConfigError('pso.bounds must look like {"v": [lo, hi], "a": [lo, hi]}') from None
        return PsoConfig(**kwargs)


def _resolve(base: Path, value) -> Path:
    p = Path(value)
    return p if p.is_absolute() else base / p


def load_run_config(path) -> RunConfig:
    """Parse a run-configuration file; relative paths resolve against its directory."""
    path = Path(path)
    doc = read_json(path)
    base = path.parent
    cfg = RunConfig()
    if "robot" in doc:
        cfg.robot_path = _resolve(base, doc["robot"])
    wp = doc.get("waypoints")
    if isinstance(wp, str):
        cfg.waypoints, cfg.params = load_waypoints(_resolve(base, wp))
    elif wp is not None:
        cfg.waypoints, cfg.params = parse_waypoints(doc, str(path))
    if "params" in doc:
        cfg.params = _pairs(doc["params"], f"{path}: 'params'")
    try:
        cfg.sample_rate = float(doc.get("sample_rate", DEFAULT_SAMPLE_RATE))
        cfg.workers = int(doc["workers"]) if "workers" in doc else None
        cfg.seed = int(doc["seed"]) if "seed" in doc else None
    except (TypeError, ValueError):
        raise ConfigError(f"{path}: sample_rate, workers and seed must be numbers") from None
    if not cfg.sample_rate > 0:
        raise ConfigError(f"{path}: sample_rate must be positive")
    if "out" in doc:
        cfg.out = _resolve(base, doc["out"])
    for key in ("profile", "sweep", "pso"):
        block = doc.get(key)
        if block is not None and not isinstance(block, dict):
            raise ConfigError(f"{path}: '{key}' must be an object")
    cfg.profile = doc.get("profile") or {}
    cfg.sweep = doc.get("sweep")
    cfg.pso = doc.get("pso")
    return cfg
