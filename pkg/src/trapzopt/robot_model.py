"""Six-axis arm description: DH table, joint limits and forward kinematics."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError, EmptyTrajectory

N_JOINTS = 6
JOINT_RANGE = 2.0 * math.pi


def as_joint_config(q) -> np.ndarray:
    """Coerce ``q`` to a read-only float array of six joint angles (rad)."""
    arr = np.array(q, dtype=float).reshape(-1)
    if arr.shape != (N_JOINTS,):
        raise ConfigError(f"a joint configuration needs {N_JOINTS} angles, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError("joint angles must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class JointLimits:
    """Per-joint velocity (rad/s) and acceleration (rad/s^2) bounds."""

    v_max: tuple
    a_max: tuple

    def __post_init__(self):
        v = tuple(float(x) for x in self.v_max)
        a = tuple(float(x) for x in self.a_max)
        if len(v) != N_JOINTS or len(a) != N_JOINTS:
            raise ConfigError(f"v_max and a_max need {N_JOINTS} entries each")
        if min(v) <= 0 or min(a) <= 0:
            raise ConfigError("joint limits must be strictly positive")
        object.__setattr__(self, "v_max", v)
        object.__setattr__(self, "a_max", a)

    @classmethod
    def default(cls) -> "JointLimits":
        return cls(v_max=(math.pi,) * N_JOINTS, a_max=(2.0 * math.pi,) * N_JOINTS)


@dataclass(frozen=True)
class KinematicModel:
    """Standard (distal) Denavit-Hartenberg table, one ``(a, d, alpha)`` row per joint."""

    dh: np.ndarray
    name: str = "arm"

    def __post_init__(self):
        dh = np.array(self.dh, dtype=float)
        if dh.shape != (N_JOINTS, 3):
            raise ConfigError(f"DH table must be {N_JOINTS}x3, got {dh.shape}")
        dh.setflags(write=False)
        object.__setattr__(self, "dh", dh)

    @property
    def reach(self) -> float:
        """Upper bound on ``|p|`` over all configurations: sum of per-link extents."""
        return float(np.hypot(self.dh[:, 0], self.dh[:, 1]).sum())

    @property
    def arm_span(self) -> float:
        """Sum of the link lengths ``|a|``; the catalogue reach figure (0.817 m on a UR5)."""
        return float(np.abs(self.dh[:, 0]).sum())


@dataclass(frozen=True)
class Pose:
    position: np.ndarray
    rotation: np.ndarray


@dataclass(frozen=True)
class Robot:
    model: KinematicModel
    limits: JointLimits


def _dh_transform(a, d, alpha, theta):
    ct, st = math.cos(theta), math.sin(theta)
    ca, sa = math.cos(alpha), math.sin(alpha)
    return np.array(
        [
            [ct, -st * ca, st * sa, a * ct],
            [st, ct * ca, -ct * sa, a * st],
            [0.0, sa, ca, d],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def forward_kinematics(model: KinematicModel, q) -> Pose:
    """Flange pose in the base frame for joint angles ``q``."""
    q = as_joint_config(q)
    T = np.eye(4)
    for (a, d, alpha), theta in zip(model.dh, q):
        T = T @ _dh_transform(a, d, alpha, theta)
    return Pose(position=T[:3, 3].copy(), rotation=T[:3, :3].copy())


@dataclass(frozen=True)
class RangeViolation:
    waypoint: int
    joint: int  # 1-based
    value: float

    def __str__(self):
        return (
            f"waypoint {self.waypoint}: joint {self.joint} = {self.value:.6g} rad "
            f"outside [-2pi, 2pi]"
        )


def validate_waypoints(limits: JointLimits, waypoints) -> list[RangeViolation]:
    """Check every waypoint against the joint range; an empty list means ok.

    ``limits`` is accepted for symmetry with the segment checks; the angular
    range itself is fixed at +-2pi.
    """
    waypoints = list(waypoints)
    if len(waypoints) < 2:
        raise EmptyTrajectory(f"need at least 2 waypoints, got {len(waypoints)}")
    out = []
    for i, q in enumerate(waypoints):
        for m, value in enumerate(np.asarray(q, dtype=float).reshape(-1)):
            if abs(value) > JOINT_RANGE:
                out.append(RangeViolation(waypoint=i, joint=m + 1, value=float(value)))
    return out


def robot_from_dict(doc: dict) -> Robot:
    try:
        dh = doc["dh"]
    except (KeyError, TypeError):
        raise ConfigError("robot description needs a 'dh' table") from None
    defaults = JointLimits.default()
    try:
        limits = JointLimits(
            v_max=doc.get("v_max", defaults.v_max),
            a_max=doc.get("a_max", defaults.a_max),
        )
        model = KinematicModel(dh=dh, name=str(doc.get("name", "arm")))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed robot description: {exc}") from None
    return Robot(model=model, limits=limits)


def load_robot(path=None) -> Robot:
    """Read a robot JSON file; ``None`` loads the bundled UR5 description."""
    if path is None:
        text = resources.files("trapzopt").joinpath("data/ur5.json").read_text()
        source = "bundled ur5.json"
    else:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read robot file {path}: {exc.strerror}") from None
        source = str(path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}: invalid JSON ({exc})") from None
    return robot_from_dict(doc)


def default_robot() -> Robot:
    return load_robot(None)
