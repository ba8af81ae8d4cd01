"""Independent numerical references used by the tests.

Everything here integrates sampled curves numerically; nothing calls the
closed forms under test.
"""
import math

import numpy as np
from scipy.integrate import simpson

from trapzopt.time_scaling import evaluate
from trapzopt.trajectory import sample

N_SAMPLES = 100_001
# nodes are pulled at least this far (relative) inside each phase so that samples
# never land on a discontinuity of the acceleration
EDGE = 1e-12


def _phase_edges(v, a, T):
    t_a = v / a
    edges = [0.0, t_a, T - t_a, T]
    return [(lo, hi) for lo, hi in zip(edges[:-1], edges[1:]) if hi - lo > 64 * np.finfo(float).eps * T]


def piecewise_simpson(fn, v, a, T, n=N_SAMPLES):
    """Composite Simpson over each motion phase of a (v, a, T) profile.

    ``fn(t)`` must accept an array of times and return an array (or an
    ``(N, k)`` array, integrated column-wise).
    """
    total = 0.0
    per_phase = max(n // 3, 5) | 1
    u = np.linspace(0.0, 1.0, per_phase)
    for lo, hi in _phase_edges(v, a, T):
        width = hi - lo
        inset = max(EDGE * width, 8 * np.finfo(float).eps * T)
        nodes = lo + inset + (width - 2 * inset) * u
        y = fn(nodes)
        total = total + simpson(y, x=lo + width * u, axis=0)
    return total


def quad_sq_accel(profile, n=N_SAMPLES):
    return piecewise_simpson(lambda t: evaluate(profile, t)[2] ** 2, profile.v, profile.a, profile.T, n)


def quad_displacement(profile, n=N_SAMPLES):
    return piecewise_simpson(lambda t: evaluate(profile, t)[1], profile.v, profile.a, profile.T, n)


def quad_energy(traj, n=N_SAMPLES):
    """Sum over segments and joints of sqrt(mean(qdd^2)) * T, by quadrature."""
    total = 0.0
    for seg in traj.segments:
        p = seg.profile
        sq = piecewise_simpson(lambda t: sample(seg, t)[2] ** 2, p.v, p.a, p.T, n)
        total += float(np.sum(np.sqrt(sq / p.T) * p.T))
    return total


def brute_force_min(fn, v_bounds, a_bounds, n=100):
    """Minimum of fn(v, a) on an n x n grid; returns (f, v, a)."""
    best = (math.inf, None, None)
    for v in np.linspace(*v_bounds, n):
        for a in np.linspace(*a_bounds, n):
            f = fn(v, a)
            if f < best[0]:
                best = (f, v, a)
    return best
