"""
Normalized trapezoidal time scaling.

A time scaling ``s(t)`` maps ``[0, T]`` onto ``[0, 1]``: constant path
acceleration ``a`` for ``t_a = v / a`` seconds, cruise at ``v``, then a
symmetric deceleration. Because ``s`` is unitless, ``v`` is in 1/s and ``a``
in 1/s^2. Any two of ``(v, a, T)`` fix the third; the three constructors
below cover each pairing.

A profile with ``v**2 / a == 1`` has no cruise phase (triangular). It is
accepted as the closed boundary of the feasible set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleProfile

#: Absolute slack on feasibility guards.
FEAS_TOL = 1e-12


@dataclass(frozen=True)
class TrapezoidProfile:
    """Unit-distance trapezoidal time scaling.

    Attributes
    ----------
    v : float
        Peak path velocity (1/s).
    a : float
        Path acceleration magnitude (1/s^2).
    T : float
        Total duration (s).
    """

    v: float
    a: float
    T: float

    def __post_init__(self):
        if not (self.v > 0 and self.a > 0 and self.T > 0):
            raise InfeasibleProfile(
                f"v, a, T must be positive (got v={self.v}, a={self.a}, T={self.T})"
            )
        if not all(map(math.isfinite, (self.v, self.a, self.T))):
            raise InfeasibleProfile("v, a, T must be finite")

    @property
    def t_a(self) -> float:
        """Ramp duration v/a."""
        return self.v / self.a

    @property
    def t_v(self) -> float:
        """Cruise duration, zero for a triangular profile."""
        return max(self.T - 2.0 * self.t_a, 0.0)

    @property
    def is_triangular(self) -> bool:
        return self.v * self.v / self.a >= 1.0 - FEAS_TOL

    def eval(self, t):
        return evaluate(self, t)

    def integral_sq_accel(self) -> float:
        return integral_sq_accel(self)


def min_duration(v: float, a: float) -> float:
    """Shortest unit move at peak velocity ``v`` and acceleration ``a``."""
    return (a + v * v) / (v * a)


def profile_from_v_a(v: float, a: float) -> TrapezoidProfile:
    """Build the profile reaching peak velocity ``v`` with acceleration ``a``.

    Raises
    ------
    InfeasibleProfile
        If ``v**2 / a > 1``: the ramps alone would overshoot unit distance.
    """
    if not (v > 0 and a > 0):
        raise InfeasibleProfile(f"v and a must be positive (got v={v}, a={a})")
    if v * v / a > 1.0 + FEAS_TOL:
        raise InfeasibleProfile(
            f"v^2/a = {v * v / a:.6g} > 1: peak velocity {v:g} is unreachable "
            f"with acceleration {a:g}; lower v or raise a"
        )
    return TrapezoidProfile(v=v, a=a, T=min_duration(v, a))


def profile_from_v_T(v: float, T: float) -> TrapezoidProfile:
    """Build the profile with peak velocity ``v`` finishing in exactly ``T``.

    Requires ``1 < v*T <= 2``. Below 1 the top speed cannot cover the unit
    distance; above 2 no trapezoid with peak ``v`` fits in ``T``.
    """
    if not (v > 0 and T > 0):
        raise InfeasibleProfile(f"v and T must be positive (got v={v}, T={T})")
    vT = v * T
    if vT <= 1.0:
        raise InfeasibleProfile(
            f"v*T = {vT:.6g} must exceed 1: top speed {v:g} cannot cover unit "
            f"distance in {T:g} s"
        )
    if vT > 2.0 + FEAS_TOL:
        raise InfeasibleProfile(f"v*T = {vT:.6g} > 2: no trapezoid with peak {v:g} lasts {T:g} s")
    a = v * v / (vT - 1.0)
    return TrapezoidProfile(v=v, a=a, T=T)


def profile_from_a_T(a: float, T: float) -> TrapezoidProfile:
    """Build the profile with acceleration ``a`` finishing in exactly ``T``.

    Takes the smaller root of ``v**2 - a*T*v + a = 0``; the larger root
    gives ``v*T > 2``. The root is computed as ``2a / (aT + sqrt(...))`` to
    avoid cancellation when ``a*T**2`` is large.
    """
    if not (a > 0 and T > 0):
        raise InfeasibleProfile(f"a and T must be positive (got a={a}, T={T})")
    disc = a * (a * T * T - 4.0)
    if disc < -FEAS_TOL * a:
        raise InfeasibleProfile(
            f"a*T^2 = {a * T * T:.6g} < 4: acceleration {a:g} cannot finish "
            f"the move in {T:g} s"
        )
    v = 2.0 * a / (a * T + math.sqrt(max(disc, 0.0)))
    return TrapezoidProfile(v=v, a=a, T=T)


def profile_from_two(*, v=None, a=None, T=None) -> TrapezoidProfile:
    """Dispatch to the constructor matching whichever two arguments are given."""
    given = {k for k, x in (("v", v), ("a", a), ("T", T)) if x is not None}
    if given == {"v", "a"}:
        return profile_from_v_a(v, a)
    if given == {"v", "T"}:
        return profile_from_v_T(v, T)
    if given == {"a", "T"}:
        return profile_from_a_T(a, T)
    raise TypeError(f"exactly two of v, a, T are required (got {sorted(given) or 'none'})")


def evaluate(p: TrapezoidProfile, t):
    """Position, velocity and acceleration of the scaling at time ``t``.

    ``t`` may be a scalar or an array; values outside ``[0, T]`` are clamped.
    Phase boundaries belong to the ramp phases, so ``s_ddot(0) = +a`` and
    ``s_ddot(T) = -a``.

    Returns
    -------
    tuple
        ``(s, s_dot, s_ddot)``, scalars or arrays matching ``t``.
    """
    scalar = np.ndim(t) == 0
    t = np.clip(np.asarray(t, dtype=float), 0.0, p.T)
    v, a, T = p.v, p.a, p.T
    t_a = v / a
    t_d = T - t_a

    accel = t <= t_a
    decel = (t >= t_d) & ~accel
    tr = T - t

    s = np.where(accel, 0.5 * a * t * t, np.where(decel, 1.0 - 0.5 * a * tr * tr, v * t - 0.5 * v * t_a))
    s_dot = np.where(accel, a * t, np.where(decel, a * tr, v))
    s_ddot = np.where(accel, a, np.where(decel, -a, 0.0))
    # triangular profiles can overshoot v by rounding at the apex
    s_dot = np.minimum(s_dot, v)
    if scalar:
        return float(s), float(s_dot), float(s_ddot)
    return s, s_dot, s_ddot


def integral_sq_accel(p: TrapezoidProfile) -> float:
    """Integral of ``s_ddot(t)**2`` over the whole move, equal to ``2*a*v``."""
    return 2.0 * p.a * p.v


def phase_breaks(p: TrapezoidProfile) -> tuple[float, ...]:
    """Phase boundary times ``(0, t_a, T - t_a, T)``; the middle two coincide for triangles."""
    t_a = p.t_a
    return (0.0, t_a, max(p.T - t_a, t_a), p.T)
