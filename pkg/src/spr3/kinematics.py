"""Geometry of the three-sphere swimmer.

Three balls of radius ``a`` sit at the ends of coplanar telescopic arms that
meet at the centre ``c`` with fixed angles of 2*pi/3.  The arm lengths are
``zeta_i = xi0 + xi_i``; the pose is ``p = (c, theta)``.  Everything lives in
the plane, so forces, velocities and ball centres are 2-vectors and the
cross product is the determinant ``b x f = b_x f_y - b_y f_x``.

Stacked 6-vectors follow the ball order ``(ball1_x, ball1_y, ball2_x, ...)``.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import AdmissibilityError

SQRT3 = np.sqrt(3.0)


def rotation(phi: float) -> np.ndarray:
    """3x3 rotation through ``phi`` about the vertical axis e3."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation2(phi: float) -> np.ndarray:
    """Planar (2x2) restriction of :func:`rotation`."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


# Arm directions z1 = e1, z2 = R^T(2pi/3) z1, z3 = R(2pi/3) z1, as rows.
ARMS_3D = np.array([
    [1.0, 0.0, 0.0],
    rotation(-2 * np.pi / 3) @ [1.0, 0.0, 0.0],
    rotation(2 * np.pi / 3) @ [1.0, 0.0, 0.0],
])
ARMS = ARMS_3D[:, :2]
ARMS_PERP = ARMS @ rotation2(np.pi / 2).T

# Orthogonal basis of shape space that diagonalises the holonomy actions.
TAU = np.array([
    [0.0, -1.0, 1.0],
    np.array([-2.0, 1.0, 1.0]) / SQRT3,
    [1.0, 1.0, 1.0],
])
# Columns tau_i / |tau_i|.
TAU_UNIT = (TAU / np.linalg.norm(TAU, axis=1)[:, None]).T


@dataclass(frozen=True)
class SwimmerGeometry:
    """Physical parameters of the swimmer.

    Parameters
    ----------
    radius : float
        Ball radius ``a``.
    arm_length : float
        Reference arm length ``xi0`` (all arms equal at zero stroke).
    viscosity : float
        Dynamic viscosity ``mu`` of the fluid.
    margin : float, optional
        Safety margin on the overlap bound, in units of ``arm_length``.
    """

    radius: float
    arm_length: float
    viscosity: float = 1.0
    margin: float = 1e-12

    def __post_init__(self):
        for name in ("radius", "arm_length", "viscosity"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if self.arm_length <= self.min_arm_length:
            raise AdmissibilityError(
                f"arm_length {self.arm_length} must exceed 2a/sqrt(3) = {self.min_arm_length}"
            )

    @property
    def ratio(self) -> float:
        """Dimensionless ball size ``a / xi0``."""
        return self.radius / self.arm_length

    @property
    def drag(self) -> float:
        """Stokes drag coefficient ``nu = 6 pi mu a``."""
        return 6 * np.pi * self.viscosity * self.radius

    @property
    def min_arm_length(self) -> float:
        return 2 * self.radius / SQRT3

    def scaled(self) -> "SwimmerGeometry":
        """Same swimmer in units where ``xi0 = 1`` and ``mu = 1``."""
        return SwimmerGeometry(self.ratio, 1.0, 1.0, self.margin)


class Pose(NamedTuple):
    c: np.ndarray
    theta: float


def arm_lengths(geom: SwimmerGeometry, xi) -> np.ndarray:
    return geom.arm_length + np.asarray(xi, dtype=float)


def is_admissible(geom: SwimmerGeometry, xi) -> bool:
    zeta = arm_lengths(geom, xi)
    bound = geom.min_arm_length + geom.margin * geom.arm_length
    return bool(np.all(np.isfinite(zeta)) and np.all(zeta > bound))


def check_admissible(geom: SwimmerGeometry, xi) -> np.ndarray:
    """Return ``xi`` as an array, raising if any arm is too short."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (3,):
        raise ValueError(f"shape state must be a 3-vector, got shape {xi.shape}")
    if not is_admissible(geom, xi):
        raise AdmissibilityError(
            f"shape {xi} gives arm lengths {arm_lengths(geom, xi)}; "
            f"each must exceed 2a/sqrt(3) = {geom.min_arm_length:.6g}"
        )
    return xi


def ball_centers(geom: SwimmerGeometry, xi, pose=None) -> np.ndarray:
    """Centres ``b_i = c + zeta_i R(theta) z_i`` as a (3, 2) array."""
    xi = check_admissible(geom, xi)
    c, theta = (np.zeros(2), 0.0) if pose is None else pose
    zeta = arm_lengths(geom, xi)
    return np.asarray(c, dtype=float) + zeta[:, None] * (ARMS @ rotation2(theta).T)


def shape_matrix_X(theta: float) -> np.ndarray:
    """6x3 block-diagonal matrix with blocks ``R(theta) z_i``."""
    dirs = ARMS @ rotation2(theta).T
    X = np.zeros((6, 3))
    for i in range(3):
        X[2 * i:2 * i + 2, i] = dirs[i]
    return X


def pose_matrix_Y(geom: SwimmerGeometry, xi, theta: float) -> np.ndarray:
    """6x3 matrix with rows ``[I2 | zeta_i R(theta) z_i_perp]``."""
    zeta = arm_lengths(geom, xi)
    perps = ARMS_PERP @ rotation2(theta).T
    Y = np.zeros((6, 3))
    for i in range(3):
        Y[2 * i:2 * i + 2, :2] = np.eye(2)
        Y[2 * i:2 * i + 2, 2] = zeta[i] * perps[i]
    return Y


def ball_velocities(geom: SwimmerGeometry, xi, theta: float, xi_dot, p_dot) -> np.ndarray:
    """Stacked ball velocities ``X(theta) xi_dot + Y(xi, theta) p_dot``."""
    return shape_matrix_X(theta) @ np.asarray(xi_dot) + pose_matrix_Y(geom, xi, theta) @ np.asarray(p_dot)


def balance_matrix_W(geom: SwimmerGeometry, xi, theta: float, c=(0.0, 0.0)) -> np.ndarray:
    """3x6 matrix whose kernel is the set of force- and torque-free force vectors.

    Rows 0-1 sum the forces; row 2 holds ``R(pi/2) b_i`` so that its product
    with ``f_i`` is the planar torque ``b_i x f_i``.
    """
    b = ball_centers(geom, xi, (c, theta))
    b_perp = b @ rotation2(np.pi / 2).T
    W = np.zeros((3, 6))
    for i in range(3):
        W[:2, 2 * i:2 * i + 2] = np.eye(2)
        W[2, 2 * i:2 * i + 2] = b_perp[i]
    return W
