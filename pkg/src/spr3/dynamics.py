"""Time integration of the pose under a prescribed stroke.

The shape ``xi(t)`` is evaluated analytically from the stroke at every stage;
only the pose is integrated, with the classical fixed-step RK4 scheme.
"""
from dataclasses import dataclass, field

import numpy as np

from .control import AsymptoticCoefficients, ControlExpansion, control_matrix_exact
from .energetics import dissipation_template, gram_matrix
from .errors import AdmissibilityError
from .kinematics import SwimmerGeometry, rotation, rotation2
from .strokes import EllipticStroke


@dataclass
class Trajectory:
    """Samples ``(t, xi, c, theta, power)`` at every integrator node.

    ``power`` is the instantaneous dissipation divided by the drag
    coefficient.
    """

    t: np.ndarray
    xi: np.ndarray
    c: np.ndarray
    theta: np.ndarray
    power: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    def rows(self) -> np.ndarray:
        """Samples as an (N, 8) array ordered ``t, xi1..3, cx, cy, theta, power``."""
        return np.column_stack([self.t, self.xi, self.c, self.theta, self.power])


def rk4(rhs, y0, t0: float, h: float, n: int) -> np.ndarray:
    """Classical fourth-order Runge-Kutta; returns the ``n + 1`` states."""
    y = np.array(y0, dtype=float)
    out = np.empty((n + 1, y.size))
    out[0] = y
    t = t0
    for k in range(n):
        k1 = rhs(t, y)
        k2 = rhs(t + h / 2, y + h / 2 * k1)
        k3 = rhs(t + h / 2, y + h / 2 * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t0 + (k + 1) * h
        out[k + 1] = y
    return out


def _check_settings(n_steps, n_loops, rate, min_steps):
    if int(n_steps) != n_steps or n_steps < min_steps:
        raise ValueError(f"n_steps must be an integer >= {min_steps}, got {n_steps!r}")
    if int(n_loops) != n_loops or n_loops < 1:
        raise ValueError(f"n_loops must be a positive integer, got {n_loops!r}")
    if not rate > 0:
        raise ValueError(f"rate must be positive, got {rate!r}")


def _time_grid(n_steps, n_loops, rate):
    period = EllipticStroke.period / rate
    h = period / n_steps
    n = n_steps * n_loops
    return h, n, h * np.arange(n + 1), period


def _initial_pose(pose0):
    if pose0 is None:
        return np.zeros(2), 0.0
    c, theta = pose0
    return np.asarray(c, dtype=float), float(theta)


def integrate_leading_order(coeffs: AsymptoticCoefficients, expansion: ControlExpansion,
                            stroke: EllipticStroke, n_steps: int = 256, n_loops: int = 1,
                            pose0=None, rate: float = 1.0) -> Trajectory:
    """Leading-order dynamics for an elliptic stroke.

    ``theta(t) = theta0 + sigma t`` exactly, and

        c_dot = R(theta) [F0 xi_dot + sum_{j=1,2} (A_j xi_dot . xi) e_j]

    is integrated with RK4.  ``rate`` runs the stroke at ``xi(rate * t)``.
    """
    _check_settings(n_steps, n_loops, rate, 64)
    c0, theta0 = _initial_pose(pose0)
    sigma = stroke.sigma
    F0 = np.asarray(expansion.F0)[:2]
    A1, A2 = expansion.A1, expansion.A2

    def rhs(t, _):
        s = rate * t
        xi = stroke.shape(s)
        xi_dot = rate * stroke.rate(s)
        q = F0 @ xi_dot + np.array([xi @ A1 @ xi_dot, xi @ A2 @ xi_dot])
        return rotation2(theta0 + sigma * s) @ q

    h, n, t, period = _time_grid(n_steps, n_loops, rate)
    c = rk4(rhs, c0, 0.0, h, n)
    s = rate * t
    rates = rate * stroke.rate(s)
    G0 = dissipation_template(coeffs.kappa, coeffs.h)
    power = np.einsum("ni,ij,nj->n", rates, G0, rates)
    meta = {"variant": "leading-order", "n_steps": int(n_steps), "n_loops": int(n_loops),
            "rate": float(rate), "period": period}
    return Trajectory(t, stroke.shape(s), c, theta0 + sigma * s, power, meta)


def integrate_exact(geom: SwimmerGeometry, stroke: EllipticStroke, n_steps: int = 256,
                    n_loops: int = 1, pose0=None, rate: float = 1.0) -> Trajectory:
    """Full system ``p_dot = R(theta) F(xi) xi_dot`` with ``theta`` as a state."""
    _check_settings(n_steps, n_loops, rate, 1)
    c0, theta0 = _initial_pose(pose0)

    def rhs(t, p):
        s = rate * t
        xi = stroke.shape(s)
        try:
            F = control_matrix_exact(geom, xi)
        except AdmissibilityError as exc:
            raise AdmissibilityError(f"at t={t:.6g}: {exc}") from exc
        return rotation(p[2]) @ F @ (rate * stroke.rate(s))

    h, n, t, period = _time_grid(n_steps, n_loops, rate)
    p = rk4(rhs, np.r_[c0, theta0], 0.0, h, n)
    s = rate * t
    xi = stroke.shape(s)
    rates = rate * stroke.rate(s)
    power = np.array([r @ gram_matrix(geom, x) @ r for x, r in zip(xi, rates)])
    meta = {"variant": "exact", "n_steps": int(n_steps), "n_loops": int(n_loops),
            "rate": float(rate), "period": period}
    return Trajectory(t, xi, p[:, :2], p[:, 2], power, meta)


def net_displacement(traj: Trajectory) -> np.ndarray:
    """``(c(T) - c(0), theta(T) - theta(0))`` over a trajectory of whole loops."""
    period = traj.meta.get("period", EllipticStroke.period)
    loops = (traj.t[-1] - traj.t[0]) / period
    if len(traj) < 2 or abs(loops - round(loops)) > 1e-9 or round(loops) < 1:
        raise ValueError(f"trajectory covers {loops:.6g} loops; need a whole number")
    return np.r_[traj.c[-1] - traj.c[0], traj.theta[-1] - traj.theta[0]]


def loop_energy(traj: Trajectory) -> float:
    """Trapezoid integral of the sampled power over the first loop."""
    n = traj.meta["n_steps"]
    return float(np.trapezoid(traj.power[:n + 1], traj.t[:n + 1]))
