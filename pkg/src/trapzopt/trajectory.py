"""
Joint-space point-to-point trajectories.

Each segment moves all six joints along the straight joint-space line from
one waypoint to the next, ``q(t) = q0 + s(t) * dq``, sharing a single
trapezoidal scaling ``s``. Segments start and end at rest.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    EmptyTrajectory,
    InfeasibleProfile,
    JointLimitExceeded,
    ParamCountMismatch,
    UnsupportedMoveType,
    ZeroLengthSegment,
)
from .robot_model import JointLimits, as_joint_config, forward_kinematics
from .time_scaling import TrapezoidProfile, evaluate, profile_from_v_a

#: Segments whose largest joint displacement is below this are duplicates.
ZERO_LENGTH_TOL = 1e-9


class MoveType(enum.Enum):
    MOVE_J = "MoveJ"
    MOVE_L = "MoveL"
    MOVE_P = "MoveP"

    @classmethod
    def parse(cls, value) -> "MoveType":
        if isinstance(value, cls):
            return value
        for member in cls:
            if str(value).lower() in (member.value.lower(), member.name.lower()):
                return member
        raise ValueError(f"unknown move type {value!r}")


@dataclass(frozen=True)
class Segment:
    q_start: np.ndarray
    q_end: np.ndarray
    profile: TrapezoidProfile
    move_type: MoveType = MoveType.MOVE_J

    @property
    def delta(self) -> np.ndarray:
        return self.q_end - self.q_start

    @property
    def duration(self) -> float:
        return self.profile.T

    def sample(self, t):
        return sample(self, t)


@dataclass(frozen=True)
class LimitViolation:
    joint: int  # 1-based
    kind: str  # "velocity" | "acceleration"
    peak: float
    limit: float
    segment: int | None = None

    def __str__(self):
        where = f"segment {self.segment + 1}, " if self.segment is not None else ""
        unit = "rad/s" if self.kind == "velocity" else "rad/s^2"
        return (
            f"{where}joint {self.joint}: peak {self.kind} {self.peak:.6g} {unit} "
            f"exceeds limit {self.limit:.6g}"
        )


def plan_segment(q0, q1, v: float, a: float, mt=MoveType.MOVE_J) -> Segment:
    """Plan one rest-to-rest joint move with peak path speed ``v`` and acceleration ``a``."""
    mt = MoveType.parse(mt)
    if mt is not MoveType.MOVE_J:
        raise UnsupportedMoveType(f"{mt.value} segments cannot be planned; only MoveJ is supported")
    q0, q1 = as_joint_config(q0), as_joint_config(q1)
    if np.max(np.abs(q1 - q0)) < ZERO_LENGTH_TOL:
        raise ZeroLengthSegment("consecutive waypoints coincide")
    return Segment(q_start=q0, q_end=q1, profile=profile_from_v_a(v, a), move_type=mt)


def sample(seg: Segment, t):
    """Joint position, velocity and acceleration at segment-local time ``t``.

    For array ``t`` of length N the results have shape ``(N, 6)``.
    """
    s, sd, sdd = evaluate(seg.profile, t)
    dq = seg.delta
    if np.ndim(s) != 0:
        s, sd, sdd = (np.asarray(x)[:, None] for x in (s, sd, sdd))
    # q0 + 1*(q1 - q0) need not round to q1; pin the endpoint exactly
    q = np.where(s >= 1.0, seg.q_end, seg.q_start + s * dq)
    return q, sd * dq, sdd * dq


def check_joint_limits(seg: Segment, limits: JointLimits, segment_index=None) -> list[LimitViolation]:
    """Compare each joint's peak speed and acceleration with its bound.

    Returns the violations; an empty list means the segment is within limits.
    """
    out = []
    dq = np.abs(seg.delta)
    for m in range(len(dq)):
        peak_v = dq[m] * seg.profile.v
        peak_a = dq[m] * seg.profile.a
        if peak_v > limits.v_max[m]:
            out.append(LimitViolation(m + 1, "velocity", float(peak_v), limits.v_max[m], segment_index))
        if peak_a > limits.a_max[m]:
            out.append(LimitViolation(m + 1, "acceleration", float(peak_a), limits.a_max[m], segment_index))
    return out


@dataclass(frozen=True)
class Trajectory:
    segments: tuple

    @property
    def n(self) -> int:
        """Number of waypoints."""
        return len(self.segments) + 1

    @property
    def waypoints(self) -> list:
        return [self.segments[0].q_start] + [seg.q_end for seg in self.segments]

    @property
    def boundary_times(self) -> np.ndarray:
        """Waypoint arrival times, starting at 0."""
        return np.concatenate([[0.0], np.cumsum([seg.duration for seg in self.segments])])

    @property
    def duration(self) -> float:
        return float(self.boundary_times[-1])

    def sample(self, t):
        """Sample the whole trajectory at global times ``t`` (array), shape ``(N, 6)`` each."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        bounds = self.boundary_times
        idx = np.clip(np.searchsorted(bounds, t, side="right") - 1, 0, len(self.segments) - 1)
        q = np.empty((t.size, 6))
        qd = np.empty_like(q)
        qdd = np.empty_like(q)
        for i, seg in enumerate(self.segments):
            mask = idx == i
            if mask.any():
                q[mask], qd[mask], qdd[mask] = sample(seg, t[mask] - bounds[i])
        return q, qd, qdd


def plan_trajectory(waypoints: Sequence, params: Sequence, limits: JointLimits | None = None) -> Trajectory:
    """Plan a rest-to-rest MoveJ trajectory through ``waypoints``.

    Parameters
    ----------
    waypoints : sequence of 6-vectors
    params : sequence of (v, a)
        One pair per segment.
    limits : JointLimits, optional
        When given, every segment must respect them.

    Raises
    ------
    JointLimitExceeded
        Lists each offending segment and joint.
    """
    waypoints = [as_joint_config(q) for q in waypoints]
    if len(waypoints) < 2:
        raise EmptyTrajectory(f"need at least 2 waypoints, got {len(waypoints)}")
    params = [tuple(p) for p in params]
    if len(params) != len(waypoints) - 1:
        raise ParamCountMismatch(
            f"{len(waypoints) - 1} segments need {len(waypoints) - 1} (v, a) pairs, got {len(params)}"
        )
    segments = []
    violations = []
    for i, ((v, a), q0, q1) in enumerate(zip(params, waypoints[:-1], waypoints[1:])):
        try:
            seg = plan_segment(q0, q1, float(v), float(a))
        except (ZeroLengthSegment, InfeasibleProfile) as exc:
            raise type(exc)(f"segment {i + 1}: {exc}") from None
        if limits is not None:
            violations.extend(check_joint_limits(seg, limits, segment_index=i))
        segments.append(seg)
    if violations:
        raise JointLimitExceeded(violations)
    return Trajectory(segments=tuple(segments))


def waypoint_chords(waypoints, model) -> np.ndarray:
    """Cartesian distance between flange positions of consecutive waypoints."""
    pts = [forward_kinematics(model, q).position for q in waypoints]
    return np.array([np.linalg.norm(b - a) for a, b in zip(pts[:-1], pts[1:])])


def chord_lengths(traj: Trajectory, model) -> np.ndarray:
    return waypoint_chords(traj.waypoints, model)
