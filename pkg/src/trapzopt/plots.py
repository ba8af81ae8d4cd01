"""Figure rendering for the CLI's ``--plot`` option.

Uses the object-oriented matplotlib API with no pyplot state, so figures
can be drawn from any thread without touching the global backend.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

FIGSIZE = (6.4, 4.0)
DPI = 120


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    return path


def profile_figure(t, s, s_dot, s_ddot, path) -> Path:
    """Position, velocity and acceleration of one time scaling, stacked."""
    fig = Figure(figsize=(FIGSIZE[0], 6.0))
    axes = fig.subplots(3, 1, sharex=True)
    for ax, y, label in zip(axes, (s, s_dot, s_ddot), ("s", "ds/dt [1/s]", "d2s/dt2 [1/s^2]")):
        ax.plot(t, y, lw=1.5)
        ax.set_ylabel(label)
        ax.grid(alpha=0.3)
    axes[-1].set_xlabel("t [s]")
    return _save(fig, path)


def joint_curves_figure(t, qdd, boundaries, path, title="joint acceleration") -> Path:
    fig = Figure(figsize=FIGSIZE)
    ax = fig.subplots()
    for m in range(qdd.shape[1]):
        ax.plot(t, qdd[:, m], lw=1.2, label=f"q{m + 1}")
    for b in boundaries[1:-1]:
        ax.axvline(b, color="0.6", ls=":", lw=0.8)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("rad/s^2")
    ax.set_title(title)
    ax.legend(ncol=3, fontsize="small")
    ax.grid(alpha=0.3)
    return _save(fig, path)


def path_figure(xyz, path) -> Path:
    fig = Figure(figsize=(5.0, 5.0))
    ax = fig.add_subplot(projection="3d")
    xyz = np.asarray(xyz)
    ax.plot(xyz[:, 0], xyz[:, 1], xyz[:, 2], lw=1.5)
    ax.scatter(*xyz[[0, -1]].T, color=["tab:green", "tab:red"])
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_zlabel("z [m]")
    return _save(fig, path)


def sweep_figure(result, path) -> Path:
    """Normalized energy and cycle time against end-effector speed, fitness overlaid."""
    rows = result.feasible_rows
    x = [r.end_effector_v for r in rows]
    fig = Figure(figsize=FIGSIZE)
    ax = fig.subplots()
    ax.plot(x, [r.S1_norm for r in rows], label="energy (normalized)")
    ax.plot(x, [r.S2_norm for r in rows], label="cycle time (normalized)")
    ax.plot(x, [r.ff for r in rows], "k--", label="fitness")
    best = result.best
    ax.plot([best.end_effector_v], [best.ff], "ko")
    ax.set_xlabel("end-effector speed [m/s]")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    ax.grid(alpha=0.3)
    return _save(fig, path)


def convergence_figure(history, path) -> Path:
    fig = Figure(figsize=FIGSIZE)
    ax = fig.subplots()
    ax.plot(np.arange(1, len(history) + 1), history)
    ax.set_xlabel("iteration")
    ax.set_ylabel("global best fitness")
    ax.grid(alpha=0.3)
    return _save(fig, path)
