"""
Energy and cycle-time objectives, their normalization and the combined fitness.

Energy is the acceleration-RMS score: for each segment and joint,
``sqrt(mean(qdd_m(t)**2)) * T``. With the shared trapezoidal scaling
``qdd_m = dq_m * s_ddot`` so the score reduces to ``|dq_m| * sqrt(2*a*v*T)``.
Cycle time is the sum of segment durations.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateRange, InsufficientRows, InvalidImprovement, PlanningError
from .robot_model import JointLimits, KinematicModel, default_robot
from .time_scaling import integral_sq_accel
from .trajectory import Segment, Trajectory, plan_trajectory, waypoint_chords

MIN_SWEEP_ROWS = 3


def segment_energy(seg: Segment) -> np.ndarray:
    """Per-joint energy score of one segment (6-vector)."""
    T = seg.duration
    return np.abs(seg.delta) * math.sqrt(integral_sq_accel(seg.profile) * T)


def energy(traj: Trajectory) -> float:
    """Energy objective summed over segments and joints."""
    return float(sum(segment_energy(seg).sum() for seg in traj.segments))


def cycle_time(traj: Trajectory) -> float:
    """Cycle-time objective: total duration of the trajectory."""
    return float(sum(seg.duration for seg in traj.segments))


def fitness(s1_norm: float, s2_norm: float) -> float:
    """Equal-weight mean of the normalized energy and cycle time."""
    return 0.5 * s1_norm + 0.5 * s2_norm


def normalize(values: Sequence[float], method: str = "min-max", reference: float | None = None) -> np.ndarray:
    """Scale a column of objective values.

    ``"min-max"`` maps onto ``[0, 1]``; ``"reference"`` divides by ``reference``.
    """
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise ValueError("cannot normalize an empty column")
    if method == "min-max":
        lo, hi = x.min(), x.max()
        if not hi > lo:
            raise DegenerateRange(f"min-max normalization needs max > min (all values {lo:g})")
        return (x - lo) / (hi - lo)
    if method == "reference":
        if reference is None or not reference > 0:
            raise ValueError(f"reference normalization needs a positive reference, got {reference}")
        return x / reference
    raise ValueError(f"unknown normalization method {method!r}")


def improvement(f_candidate: float, f_best: float) -> float:
    """Percentage reduction of ``f_candidate`` achieved by ``f_best``."""
    if not (f_candidate > 0 and f_best > 0):
        raise InvalidImprovement(f"fitness values must be positive (got {f_candidate}, {f_best})")
    if f_best > f_candidate:
        raise InvalidImprovement(f"best fitness {f_best:g} exceeds candidate {f_candidate:g}")
    return 100.0 * (1.0 - f_best / f_candidate)


@dataclass(frozen=True)
class SegmentObjectives:
    v: float
    a: float
    T: float
    S1: float


@dataclass(frozen=True)
class ObjectiveReport:
    S1: float
    S2: float
    S1_norm: float
    S2_norm: float
    f_f: float
    segments: tuple = ()
    normalization: str = "reference"
    F_worst: float | None = None
    F_average: float | None = None

    def to_dict(self) -> dict:
        d = {
            "S1": self.S1,
            "S2": self.S2,
            "S1_norm": self.S1_norm,
            "S2_norm": self.S2_norm,
            "f_f": self.f_f,
            "normalization": self.normalization,
            "segments": [
                {"v": s.v, "a": s.a, "T": s.T, "S1": s.S1} for s in self.segments
            ],
        }
        if self.F_worst is not None:
            d["F_worst"] = self.F_worst
            d["F_average"] = self.F_average
        return d


def segment_breakdown(traj: Trajectory) -> tuple:
    return tuple(
        SegmentObjectives(v=seg.profile.v, a=seg.profile.a, T=seg.duration, S1=float(segment_energy(seg).sum()))
        for seg in traj.segments
    )


def report(traj: Trajectory, s1_ref: float, s2_ref: float, **extra) -> ObjectiveReport:
    """Objectives of ``traj`` normalized against reference values."""
    S1, S2 = energy(traj), cycle_time(traj)
    n1, n2 = S1 / s1_ref, S2 / s2_ref
    return ObjectiveReport(
        S1=S1,
        S2=S2,
        S1_norm=n1,
        S2_norm=n2,
        f_f=fitness(n1, n2),
        segments=segment_breakdown(traj),
        normalization="reference",
        **extra,
    )


# -- sweeps -------------------------------------------------------------------


@dataclass(frozen=True)
class FixedAccel:
    """Hold the path acceleration constant across the sweep."""

    a: float

    def __call__(self, v: float) -> float:
        return self.a

    def describe(self) -> dict:
        return {"kind": "fixed", "a": self.a}


@dataclass(frozen=True)
class ProportionalAccel:
    """Tie the path acceleration to the velocity, ``a = c * v``."""

    c: float

    def __call__(self, v: float) -> float:
        return self.c * v

    def describe(self) -> dict:
        return {"kind": "proportional", "c": self.c}


def max_path_rates(waypoints, limits: JointLimits) -> tuple[float, float]:
    """Largest path velocity and acceleration every segment can use within ``limits``."""
    q = np.asarray(waypoints, dtype=float)
    dq = np.abs(np.diff(q, axis=0))
    with np.errstate(divide="ignore"):
        v_hi = np.min(np.asarray(limits.v_max) / dq)
        a_hi = np.min(np.asarray(limits.a_max) / dq)
    return float(v_hi), float(a_hi)


def default_sweep(waypoints, limits: JointLimits, n: int = 40, lo_frac: float = 0.1):
    """Fixed-acceleration sweep spanning the limit-feasible velocity range.

    The acceleration is pinned at the joint-acceleration bound; the grid runs
    from ``lo_frac`` of the top admissible velocity up to that velocity.
    """
    v_lim, a_lim = max_path_rates(waypoints, limits)
    v_top = min(v_lim, math.sqrt(a_lim))
    return np.linspace(lo_frac * v_top, v_top, n), FixedAccel(a_lim)


@dataclass(frozen=True)
class SweepRow:
    v: float
    a: float
    end_effector_v: float
    S1: float
    S2: float
    S1_norm: float = math.nan
    S2_norm: float = math.nan
    ff: float = math.nan
    feasible: bool = True
    reason: str = ""


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    a_rule: dict = field(default_factory=dict)

    @property
    def feasible_rows(self) -> list:
        return [r for r in self.rows if r.feasible]

    @property
    def best_index(self) -> int:
        """Index into ``rows`` of the lowest-fitness feasible row."""
        return min((i for i, r in enumerate(self.rows) if r.feasible), key=lambda i: self.rows[i].ff)

    @property
    def best(self) -> SweepRow:
        return self.rows[self.best_index]

    @property
    def ff_values(self) -> np.ndarray:
        return np.array([r.ff for r in self.feasible_rows])

    @property
    def f_best(self) -> float:
        return float(self.ff_values.min())

    @property
    def f_worst(self) -> float:
        return float(self.ff_values.max())

    @property
    def f_average(self) -> float:
        return float(self.ff_values.mean())

    @property
    def F_worst(self) -> float:
        return improvement(self.f_worst, self.f_best)

    @property
    def F_average(self) -> float:
        return improvement(self.f_average, self.f_best)

    @property
    def interior_optimum(self) -> bool:
        feas = self.feasible_rows
        k = feas.index(self.best)
        return 0 < k < len(feas) - 1

    def summary(self) -> dict:
        best = self.best
        return {
            "best": {"v": best.v, "a": best.a, "end_effector_v": best.end_effector_v, "ff": best.ff},
            "ff_best": self.f_best,
            "ff_average": self.f_average,
            "ff_worst": self.f_worst,
            "F_worst": self.F_worst,
            "F_average": self.F_average,
            "interior_optimum": self.interior_optimum,
            "rows": len(self.rows),
            "feasible_rows": len(self.feasible_rows),
            "a_rule": self.a_rule,
            "normalization": "min-max over feasible sweep rows",
            "end_effector_v_definition": "v * mean Cartesian chord length of the segments (m/s)",
        }


def _sweep_row(waypoints, limits, v, a_rule, mean_chord) -> SweepRow:
    a = float(a_rule(v))
    try:
        traj = plan_trajectory(waypoints, [(v, a)] * (len(waypoints) - 1), limits)
    except PlanningError as exc:
        return SweepRow(v=v, a=a, end_effector_v=v * mean_chord, S1=math.nan, S2=math.nan,
                        feasible=False, reason=str(exc))
    return SweepRow(v=v, a=a, end_effector_v=v * mean_chord, S1=energy(traj), S2=cycle_time(traj))


def sweep(
    waypoints,
    limits: JointLimits,
    v_grid: Sequence[float],
    a_rule=None,
    model: KinematicModel | None = None,
    workers: int | None = None,
) -> SweepResult:
    """Evaluate both objectives over a grid of shared path velocities.

    Every segment uses the same ``(v, a_rule(v))``. Rows that cannot be
    planned are kept but marked infeasible and left out of the min-max
    normalization.

    Raises
    ------
    InsufficientRows
        Fewer than three feasible rows.
    """
    v_grid = [float(v) for v in v_grid]
    if len(v_grid) < MIN_SWEEP_ROWS:
        raise InsufficientRows(f"a sweep needs at least {MIN_SWEEP_ROWS} grid values, got {len(v_grid)}")
    if a_rule is None:
        a_rule = FixedAccel(max_path_rates(waypoints, limits)[1])
    model = model or default_robot().model
    mean_chord = float(np.mean(waypoint_chords(waypoints, model)))

    def work(v):
        return _sweep_row(waypoints, limits, v, a_rule, mean_chord)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(work, v_grid))
    else:
        rows = [work(v) for v in v_grid]

    feasible = [r for r in rows if r.feasible]
    if len(feasible) < MIN_SWEEP_ROWS:
        raise InsufficientRows(
            f"only {len(feasible)} of {len(rows)} sweep rows are feasible; need {MIN_SWEEP_ROWS}"
        )
    n1 = normalize([r.S1 for r in feasible])
    n2 = normalize([r.S2 for r in feasible])
    it = iter(zip(n1, n2))
    out = []
    for r in rows:
        if r.feasible:
            x1, x2 = next(it)
            r = SweepRow(**{**r.__dict__, "S1_norm": float(x1), "S2_norm": float(x2), "ff": fitness(x1, x2)})
        out.append(r)
    describe = getattr(a_rule, "describe", None)
    return SweepResult(rows=tuple(out), a_rule=describe() if describe else {"kind": "custom"})
