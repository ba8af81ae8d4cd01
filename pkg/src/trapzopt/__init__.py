"""Trapezoidal MoveJ trajectory planning with energy/cycle-time scoring and PSO tuning."""
from .errors import (
    BadConfig,
    ConfigError,
    DegenerateRange,
    EmptyTrajectory,
    InfeasibleProfile,
    InsufficientRows,
    InvalidImprovement,
    JointLimitExceeded,
    NoFeasiblePoint,
    ObjectiveFailure,
    ParamCountMismatch,
    PlanningError,
    TrapzoptError,
    UnsupportedMoveType,
    ZeroLengthSegment,
)
from .objectives import (
    FixedAccel,
    ObjectiveReport,
    ProportionalAccel,
    SweepResult,
    cycle_time,
    energy,
    fitness,
    improvement,
    normalize,
    sweep,
)
from .optimizer import PsoConfig, SwarmState, initialize, optimize_trajectory, run, step
from .robot_model import JointLimits, KinematicModel, Pose, forward_kinematics, load_robot, validate_waypoints
from .time_scaling import (
    TrapezoidProfile,
    evaluate,
    integral_sq_accel,
    profile_from_a_T,
    profile_from_v_a,
    profile_from_v_T,
)
from .trajectory import MoveType, Segment, Trajectory, check_joint_limits, plan_segment, plan_trajectory, sample

__version__ = "0.1.0"
