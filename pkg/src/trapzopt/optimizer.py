"""
Inertia-weight particle swarm optimization, plus its application to
per-segment ``(v, a)`` tuning.

The swarm advances in bulk-synchronous iterations: all positions are
evaluated (optionally on a thread pool), then bests and velocities are
updated sequentially. Random coefficients come from a Philox stream keyed
on ``(seed, iteration)`` and indexed by particle and dimension, so results
depend only on the seed and never on evaluation order.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import BadConfig, EmptyTrajectory, NoFeasiblePoint, PlanningError
from .objectives import ObjectiveReport, cycle_time, energy, fitness, improvement, report
from .robot_model import JointLimits, as_joint_config
from .trajectory import plan_trajectory

log = logging.getLogger(__name__)

_INIT_STREAM = 0
_STEP_STREAM = 1


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 30
    max_iters: int = 200
    w: float = 0.729
    c1: float = 1.49445
    c2: float = 1.49445
    bounds: tuple = ()
    seed: int = 0
    stall_iters: int = 30
    stall_tol: float = 1e-8
    vel_clamp: float = 0.5

    def validate(self, dim: int | None = None) -> None:
        if int(self.swarm_size) != self.swarm_size or self.swarm_size < 2:
            raise BadConfig(f"swarm_size must be an integer >= 2, got {self.swarm_size}")
        if self.max_iters < 1:
            raise BadConfig(f"max_iters must be >= 1, got {self.max_iters}")
        if not 0 <= self.w < 1:
            raise BadConfig(f"inertia w must lie in [0, 1), got {self.w}")
        if not (self.c1 > 0 and self.c2 > 0):
            raise BadConfig(f"c1 and c2 must be positive, got {self.c1}, {self.c2}")
        if not 0 <= int(self.seed) < 2**64 or int(self.seed) != self.seed:
            raise BadConfig(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.stall_iters < 1 or self.stall_tol < 0:
            raise BadConfig("stall_iters must be >= 1 and stall_tol >= 0")
        b = np.asarray(self.bounds, dtype=float)
        if b.ndim != 2 or b.shape[1] != 2 or b.shape[0] < 1:
            raise BadConfig("bounds must be a list of (lo, hi) pairs")
        if dim is not None and b.shape[0] != dim:
            raise BadConfig(f"bounds cover {b.shape[0]} dimensions, problem has {dim}")
        if not np.all(np.isfinite(b)) or np.any(b[:, 0] > b[:, 1]):
            raise BadConfig("every bound needs finite lo <= hi")

    @property
    def lo(self) -> np.ndarray:
        return np.asarray(self.bounds, dtype=float)[:, 0]

    @property
    def hi(self) -> np.ndarray:
        return np.asarray(self.bounds, dtype=float)[:, 1]


@dataclass(frozen=True)
class Particle:
    x: np.ndarray
    vel: np.ndarray
    pbest_x: np.ndarray
    pbest_f: float


@dataclass(frozen=True)
class SwarmState:
    """Whole-swarm state; row ``i`` of each array belongs to particle ``i``.

    ``iter`` counts completed steps. At ``iter == 0`` the initial positions
    have not been evaluated yet and ``gbest_x`` is ``None``.
    """

    x: np.ndarray
    vel: np.ndarray
    pbest_x: np.ndarray
    pbest_f: np.ndarray
    gbest_x: np.ndarray | None
    gbest_f: float
    iter: int
    seed: int

    @property
    def particles(self) -> list[Particle]:
        return [
            Particle(self.x[i], self.vel[i], self.pbest_x[i], float(self.pbest_f[i]))
            for i in range(len(self.x))
        ]

    @property
    def rng_state(self) -> tuple[int, int]:
        return (self.seed, self.iter)


def _rng(seed: int, stream: int, iteration: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, iteration, stream, 0]))


def initialize(cfg: PsoConfig, dim: int) -> SwarmState:
    """Uniform positions inside the bounds, zero velocities, unevaluated bests."""
    if dim < 1:
        raise BadConfig(f"dimension must be >= 1, got {dim}")
    cfg.validate(dim)
    lo, hi = cfg.lo, cfg.hi
    u = _rng(int(cfg.seed), _INIT_STREAM, 0).random((cfg.swarm_size, dim))
    x = np.clip(lo + u * (hi - lo), lo, hi)
    n = cfg.swarm_size
    return SwarmState(
        x=x,
        vel=np.zeros((n, dim)),
        pbest_x=x.copy(),
        pbest_f=np.full(n, math.inf),
        gbest_x=None,
        gbest_f=math.inf,
        iter=0,
        seed=int(cfg.seed),
    )


def _safe_eval(objective, x) -> float:
    try:
        f = float(objective(x))
    except Exception as exc:  # any failure inside the box maps to +inf
        log.debug("objective failed at %s: %s", x, exc)
        return math.inf
    return f if not math.isnan(f) else math.inf


def _evaluate(objective, X, executor) -> np.ndarray:
    rows = [X[i].copy() for i in range(len(X))]
    if executor is None:
        return np.array([_safe_eval(objective, r) for r in rows])
    return np.array(list(executor.map(lambda r: _safe_eval(objective, r), rows)))


def _absorb(state: SwarmState, f: np.ndarray) -> SwarmState:
    better = f < state.pbest_f
    pbest_x = np.where(better[:, None], state.x, state.pbest_x)
    pbest_f = np.where(better, f, state.pbest_f)
    k = int(np.argmin(pbest_f))
    if state.gbest_x is None or pbest_f[k] < state.gbest_f:
        gbest_x, gbest_f = pbest_x[k].copy(), float(pbest_f[k])
    else:
        gbest_x, gbest_f = state.gbest_x, state.gbest_f
    return replace(state, pbest_x=pbest_x, pbest_f=pbest_f, gbest_x=gbest_x, gbest_f=gbest_f)


def step(state: SwarmState, objective: Callable, cfg: PsoConfig, executor=None) -> SwarmState:
    """Advance the swarm one iteration.

    On the first call the initial positions are evaluated before moving.
    Positions leaving the box are clamped to it; velocities are clamped to
    ``cfg.vel_clamp * (hi - lo)`` per dimension.
    """
    if state.gbest_x is None:
        state = _absorb(state, _evaluate(objective, state.x, executor))
    lo, hi = cfg.lo, cfg.hi
    n, dim = state.x.shape
    r = _rng(state.seed, _STEP_STREAM, state.iter).random((2, n, dim))
    vel = (
        cfg.w * state.vel
        + cfg.c1 * r[0] * (state.pbest_x - state.x)
        + cfg.c2 * r[1] * (state.gbest_x - state.x)
    )
    vmax = cfg.vel_clamp * (hi - lo)
    vel = np.clip(vel, -vmax, vmax)
    x = np.clip(state.x + vel, lo, hi)
    moved = replace(state, x=x, vel=vel, iter=state.iter + 1)
    return _absorb(moved, _evaluate(objective, x, executor))


@dataclass(frozen=True)
class RunResult:
    best_x: np.ndarray
    best_f: float
    history: list = field(default_factory=list)
    state: SwarmState | None = None

    @property
    def iterations(self) -> int:
        return len(self.history)


def _stalled(history, window: int, tol: float) -> bool:
    if len(history) <= window:
        return False
    old, new = history[-1 - window], history[-1]
    if math.isinf(old) and math.isinf(new):
        return True
    if math.isinf(old):
        return False
    gain = old - new
    scale = abs(old)
    return gain <= tol * scale if scale > 0 else gain <= 0


def run(cfg: PsoConfig, dim: int, objective: Callable, workers: int | None = None) -> RunResult:
    """Minimize ``objective`` over the box ``cfg.bounds``.

    Stops after ``cfg.max_iters`` steps, or earlier once the relative gain in
    the global best over the last ``cfg.stall_iters`` steps falls to
    ``cfg.stall_tol`` or below. ``history[k]`` is the global best after step
    ``k + 1``.
    """
    state = initialize(cfg, dim)
    history = []
    executor = ThreadPoolExecutor(max_workers=workers) if workers and workers > 1 else None
    try:
        for _ in range(cfg.max_iters):
            state = step(state, objective, cfg, executor)
            history.append(state.gbest_f)
            if _stalled(history, cfg.stall_iters, cfg.stall_tol):
                break
    finally:
        if executor is not None:
            executor.shutdown()
    return RunResult(best_x=state.gbest_x.copy(), best_f=state.gbest_f, history=history, state=state)


# -- trajectory tuning --------------------------------------------------------


def repair(v: float, a: float) -> tuple[float, float]:
    """Raise ``a`` to ``v**2`` when the peak velocity would be unreachable."""
    return v, max(a, v * v)


def default_bounds(waypoints, limits: JointLimits, v_floor: float = 0.05) -> list:
    """Per-segment ``(v, a)`` boxes whose upper corners sit on the joint limits."""
    q = np.asarray(waypoints, dtype=float)
    bounds = []
    for dq in np.abs(np.diff(q, axis=0)):
        with np.errstate(divide="ignore"):
            v_hi = float(np.min(np.asarray(limits.v_max) / dq))
            a_hi = float(np.min(np.asarray(limits.a_max) / dq))
        v_hi = min(v_hi, math.sqrt(a_hi))
        bounds.append((v_floor * v_hi, v_hi))
        bounds.append((v_floor * a_hi, a_hi))
    return bounds


def expand_bounds(vb, ab, n_segments: int) -> list:
    """Repeat one ``(v_lo, v_hi)`` / ``(a_lo, a_hi)`` box for every segment."""
    return [tuple(map(float, b)) for _ in range(n_segments) for b in (vb, ab)]


class TrajectoryObjective:
    """Reference-normalized fitness of a flattened ``[v1, a1, v2, a2, ...]`` vector.

    Objectives are divided by their values at the repaired midpoint of the
    search box, so both terms are O(1). Candidates that still violate a
    joint limit after repair score ``+inf``.
    """

    def __init__(self, waypoints, limits: JointLimits, bounds):
        self.waypoints = [as_joint_config(q) for q in waypoints]
        self.limits = limits
        self.n_segments = len(self.waypoints) - 1
        b = np.asarray(bounds, dtype=float)
        mid = self.params((b[:, 0] + b[:, 1]) / 2)
        ref = plan_trajectory(self.waypoints, mid)
        self.s1_ref = energy(ref)
        self.s2_ref = cycle_time(ref)

    def params(self, x) -> list:
        x = np.asarray(x, dtype=float).reshape(self.n_segments, 2)
        return [repair(float(v), float(a)) for v, a in x]

    def plan(self, x):
        return plan_trajectory(self.waypoints, self.params(x), self.limits)

    def __call__(self, x) -> float:
        try:
            traj = self.plan(x)
        except PlanningError:
            return math.inf
        return fitness(energy(traj) / self.s1_ref, cycle_time(traj) / self.s2_ref)

    def report(self, x, **extra) -> ObjectiveReport:
        return report(self.plan(x), self.s1_ref, self.s2_ref, **extra)


@dataclass(frozen=True)
class AuditGrid:
    values: np.ndarray  # feasible fitness values on the grid
    points: int

    @property
    def worst(self) -> float:
        return float(self.values.max())

    @property
    def mean(self) -> float:
        return float(self.values.mean())


def audit_grid(objective: TrajectoryObjective, bounds, n: int = 10) -> AuditGrid:
    """Fitness on an ``n x n`` grid of box-relative (v, a) positions shared by all segments."""
    b = np.asarray(bounds, dtype=float)
    lo, hi = b[:, 0], b[:, 1]
    u = np.linspace(0.0, 1.0, n)
    vals = []
    for uv in u:
        for ua in u:
            frac = np.tile([uv, ua], objective.n_segments)
            vals.append(objective(lo + frac * (hi - lo)))
    vals = np.array(vals)
    return AuditGrid(values=vals[np.isfinite(vals)], points=n * n)


@dataclass(frozen=True)
class OptimizationResult:
    params: list
    report: ObjectiveReport
    run: RunResult
    audit: AuditGrid
    bounds: list

    @property
    def best_f(self) -> float:
        return self.run.best_f


def optimize_trajectory(
    waypoints: Sequence,
    limits: JointLimits,
    cfg: PsoConfig,
    workers: int | None = None,
    audit_n: int = 10,
) -> OptimizationResult:
    """Search per-segment ``(v, a)`` minimizing the normalized fitness.

    Bounds come from ``cfg.bounds`` if set, otherwise from
    :func:`default_bounds`. The returned parameters are the repaired global
    best, so re-planning them reproduces ``best_f`` exactly.

    Raises
    ------
    NoFeasiblePoint
        No evaluated candidate satisfied the joint limits.
    """
    waypoints = [as_joint_config(q) for q in waypoints]
    if len(waypoints) < 2:
        raise EmptyTrajectory(f"need at least 2 waypoints, got {len(waypoints)}")
    n_seg = len(waypoints) - 1
    bounds = list(cfg.bounds) if len(cfg.bounds) else default_bounds(waypoints, limits)
    cfg = replace(cfg, bounds=tuple(tuple(map(float, b)) for b in bounds))
    cfg.validate(2 * n_seg)
    objective = TrajectoryObjective(waypoints, limits, cfg.bounds)

    result = run(cfg, 2 * n_seg, objective, workers=workers)
    if not math.isfinite(result.best_f):
        raise NoFeasiblePoint(
            f"no candidate within the joint limits after {result.iterations} iterations; "
            f"widen the bounds or relax the limits"
        )
    grid = audit_grid(objective, cfg.bounds, audit_n)
    extra = {}
    if grid.values.size:
        if result.best_f > grid.values.min():
            log.warning("PSO best %.9g is worse than the audit grid minimum %.9g", result.best_f, grid.values.min())
        if result.best_f <= grid.mean:
            extra = {
                "F_worst": improvement(grid.worst, result.best_f),
                "F_average": improvement(grid.mean, result.best_f),
            }
    rep = objective.report(result.best_x, **extra)
    return OptimizationResult(
        params=objective.params(result.best_x),
        report=rep,
        run=result,
        audit=grid,
        bounds=list(cfg.bounds),
    )
