"""Static SVG figures for scenario runs and coefficient sweeps.

Figures are built with the object-oriented API on the Agg canvas and saved
with a fixed hash salt and no timestamp so repeated runs give identical files.
"""
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib.figure import Figure
from matplotlib.patches import Circle

from .dynamics import Trajectory
from .kinematics import SwimmerGeometry, ball_centers

FRAME_TIMES = np.array([0.0, 0.5, 1.0, 1.5, 2.0]) * np.pi
SVG_RC = {"svg.hashsalt": "spr3", "svg.fonttype": "path"}


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    with matplotlib.rc_context(SVG_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def _frame_indices(traj: Trajectory) -> list[int]:
    s = traj.t * traj.meta.get("rate", 1.0)
    return [int(np.argmin(np.abs(s - tf))) for tf in FRAME_TIMES]


def scenario_figure(geom: SwimmerGeometry, traj: Trajectory, title: str = "") -> Figure:
    """Shape-space loop, body path with ball outlines at five frames, and pose against time."""
    fig = Figure(figsize=(14, 4.5), layout="constrained")
    ax3 = fig.add_subplot(1, 3, 1, projection="3d")
    ax3.plot(*traj.xi.T, color="tab:blue", lw=1.2)
    ax3.scatter(*traj.xi[0], color="k", s=12)
    ax3.set_xlabel(r"$\xi_1$")
    ax3.set_ylabel(r"$\xi_2$")
    ax3.set_zlabel(r"$\xi_3$")
    ax3.set_title("shape loop")

    ax = fig.add_subplot(1, 3, 2)
    colors = matplotlib.colormaps["viridis"](np.linspace(0, 0.9, len(FRAME_TIMES)))
    for k, color in zip(_frame_indices(traj), colors):
        balls = ball_centers(geom, traj.xi[k], (traj.c[k], traj.theta[k]))
        for b in balls:
            ax.plot([traj.c[k, 0], b[0]], [traj.c[k, 1], b[1]], color=color, lw=0.8)
            ax.add_patch(Circle(b, geom.radius, fill=False, color=color, lw=1.0))
    ax.plot(traj.c[:, 0], traj.c[:, 1], color="tab:red", lw=1.5, label="c(t)")
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(loc="upper right", frameon=False)
    ax.set_title("body path")

    # the path is small next to the arms, so show the pose against time too
    axt = fig.add_subplot(1, 3, 3)
    for series, label in ((traj.c[:, 0], "$c_x$"), (traj.c[:, 1], "$c_y$"), (traj.theta, r"$\theta$")):
        axt.plot(traj.t, series, lw=1.2, label=label)
    axt.set_xlabel("t")
    axt.legend(frameon=False)
    axt.set_title("pose")
    if title:
        fig.suptitle(title)
    return fig


def convergence_figure(report: dict) -> Figure:
    """``|numeric - series|`` against ``a / xi0`` for every coefficient on log axes."""
    ratios = np.array([row["ratio"] for row in report["rows"]])
    fig = Figure(figsize=(6, 4.5), layout="constrained")
    ax = fig.add_subplot()
    for name in report["rows"][0]["deviation"]:
        dev = np.array([row["deviation"][name] for row in report["rows"]])
        keep = dev > 0
        if keep.sum() < 2:
            continue
        slope = report["slopes"].get(name)
        label = name if slope is None else f"{name} ({slope:.2f})"
        ax.loglog(ratios[keep], dev[keep], marker="o", ms=3, label=label)
    ref = ratios**2 * 1e-2
    ax.loglog(ratios, ref, "k--", lw=0.8, label="slope 2")
    ax.set_xlabel(r"$a/\xi_0$")
    ax.set_ylabel("|numeric - series|")
    ax.legend(fontsize=7, ncols=2, frameon=False)
    return fig


def save_scenario_figure(geom, traj, path, title: str = "") -> Path:
    return _save(scenario_figure(geom, traj, title), path)


def save_convergence_figure(report, path) -> Path:
    return _save(convergence_figure(report), path)
