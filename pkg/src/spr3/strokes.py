"""Energy-minimising elliptic strokes for a prescribed net displacement.

Over one loop ``xi(t) = cos(t) u + sin(t) v`` the symmetric parts of the
correctors and the ``F0`` term integrate to zero, leaving the holonomy
``dp_k = 2 pi u^T M_k v``.  The cheapest loop producing ``dp`` costs
``|omega|`` with ``omega`` a diagonal rescaling of ``dp``.
"""
from dataclasses import dataclass

import numpy as np

from .control import AsymptoticCoefficients
from .errors import AdmissibilityError
from .kinematics import SQRT3, TAU, TAU_UNIT, SwimmerGeometry


@dataclass(frozen=True)
class EllipticStroke:
    """Origin-centred ellipse in shape space, traversed once per ``2 pi`` of stroke time.

    ``sigma`` is the constant rotation rate the loop induces at leading order.
    """

    u: np.ndarray
    v: np.ndarray
    sigma: float = 0.0

    period = 2 * np.pi

    def shape(self, t):
        t = np.asarray(t, dtype=float)
        return np.multiply.outer(np.cos(t), self.u) + np.multiply.outer(np.sin(t), self.v)

    def rate(self, t):
        t = np.asarray(t, dtype=float)
        return np.multiply.outer(-np.sin(t), self.u) + np.multiply.outer(np.cos(t), self.v)

    def excursion(self) -> np.ndarray:
        """Largest ``|xi_i(t)|`` over the loop, per arm."""
        return np.hypot(self.u, self.v)

    def reversed(self) -> "EllipticStroke":
        return EllipticStroke(self.v, self.u, -self.sigma)

    def scaled(self, s: float) -> "EllipticStroke":
        return EllipticStroke(s * self.u, s * self.v, s * s * self.sigma)


def rotation_rate(coeffs: AsymptoticCoefficients, u, v) -> float:
    """``u^T M3 v = -gamma (u x v) . tau3``, constant along the ellipse."""
    return float(-coeffs.gamma * np.cross(u, v) @ TAU[2])


def realized_displacement(coeffs: AsymptoticCoefficients, stroke: EllipticStroke) -> np.ndarray:
    """Closed-form holonomy ``(dx, dy, dtheta)`` of one loop at leading order."""
    w = np.cross(stroke.u, stroke.v)
    return 2 * np.pi * np.array([
        coeffs.alpha * w @ TAU[0],
        coeffs.alpha * w @ TAU[1],
        -coeffs.gamma * w @ TAU[2],
    ])


def omega_vector(coeffs: AsymptoticCoefficients, target) -> np.ndarray:
    dp = np.asarray(target, dtype=float)
    if not (coeffs.alpha > 0 and coeffs.gamma > 0 and coeffs.g1 > 0 and coeffs.g2 > 0):
        raise ValueError("omega needs alpha, gamma, g1, g2 > 0")
    trans = np.sqrt(coeffs.g1 * coeffs.g2) / (np.sqrt(2) * coeffs.alpha)
    rot = coeffs.g1 / (SQRT3 * coeffs.gamma)
    return np.array([trans, trans, rot]) * dp


def _orthogonal_pair(omega):
    """Deterministic orthonormal pair spanning the plane orthogonal to ``omega``."""
    n = omega / np.linalg.norm(omega)
    for w in np.eye(3):
        if np.linalg.norm(np.cross(w, n)) > 1e-8:
            break
    s1 = w - (w @ n) * n
    s1 /= np.linalg.norm(s1)
    s2 = np.cross(n, s1)
    return s1, s2 / np.linalg.norm(s2)


def check_stroke(geom: SwimmerGeometry, stroke: EllipticStroke) -> None:
    limit = geom.arm_length - geom.min_arm_length - geom.margin * geom.arm_length
    worst = stroke.excursion().max()
    if not worst < limit:
        raise AdmissibilityError(
            f"stroke amplitude {worst:.6g} exceeds the admissible excursion {limit:.6g}; "
            "ask for a smaller displacement or use longer arms"
        )


def optimal_stroke(coeffs: AsymptoticCoefficients, target,
                   geom: SwimmerGeometry = None) -> EllipticStroke:
    """Minimal-dissipation ellipse realising ``target = (dx, dy, dtheta)``.

    The semi-axes are ``u, v = U Lambda^{-1/2} s_{1,2} / sqrt(2 pi)`` where
    ``s1, s2`` are orthogonal, orthogonal to ``omega`` (third component
    mirrored) and of squared norm
    ``|omega|``; ``U`` has columns ``tau_i/|tau_i|`` and
    ``Lambda = diag(g1, g1, g2)``.  The traversal direction is chosen so that
    the loop yields ``+target``.  With ``geom`` given the ellipse is checked
    against ball overlap.
    """
    dp = np.asarray(target, dtype=float)
    if dp.shape != (3,):
        raise ValueError(f"target must be a 3-vector, got shape {dp.shape}")
    if not np.linalg.norm(dp) > 0:
        raise ValueError("zero displacement target has no stroke")
    omega = omega_vector(coeffs, dp)
    # M3 acts as gamma * (xi x -tau3), so the plane is taken orthogonal to
    # omega with its rotation component mirrored.
    s1, s2 = _orthogonal_pair(omega * [1.0, 1.0, -1.0])
    scale = np.sqrt(np.linalg.norm(omega) / (2 * np.pi))
    B = TAU_UNIT / np.sqrt([coeffs.g1, coeffs.g1, coeffs.g2])
    u, v = scale * (B @ s1), scale * (B @ s2)

    stroke = EllipticStroke(u, v)
    if realized_displacement(coeffs, stroke) @ dp < 0:
        u, v = v, u
    stroke = EllipticStroke(u, v, rotation_rate(coeffs, u, v))
    if geom is not None:
        check_stroke(geom, stroke)
    return stroke
