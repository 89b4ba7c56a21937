"""Dissipated power as a quadratic form in the shape rates.

The power ``f . u`` equals ``nu * G(xi) xi_dot . xi_dot``.  Matrices here are
reported divided by ``nu`` so that ``G(0)`` has the dimensionless structure
``kappa`` on the diagonal and ``h`` off it.
"""
import warnings
from dataclasses import dataclass

import numpy as np

from .control import AsymptoticCoefficients, velocity_map
from .kinematics import SwimmerGeometry

ONES = np.ones((3, 3))


def gram_matrix(geom: SwimmerGeometry, xi, theta: float = 0.0, exact: bool = False) -> np.ndarray:
    """``G(xi)``, symmetrised, normalised by the drag coefficient."""
    B, K = velocity_map(geom, xi, theta, exact)
    G = B.T @ K @ B
    skew = np.linalg.norm(G - G.T) / np.linalg.norm(G)
    if skew > 1e-10:
        warnings.warn(f"dissipation form has relative skew part {skew:.3g}", RuntimeWarning,
                      stacklevel=2)
    return (G + G.T) / 2


def dissipation_template(kappa: float, h: float) -> np.ndarray:
    return h * ONES + (kappa - h) * np.eye(3)


@dataclass(frozen=True)
class DissipationForm:
    G0: np.ndarray
    kappa: float
    h: float
    g1: float
    g2: float
    residual: float = 0.0

    @classmethod
    def from_coefficients(cls, coeffs: AsymptoticCoefficients) -> "DissipationForm":
        return cls(dissipation_template(coeffs.kappa, coeffs.h), coeffs.kappa, coeffs.h,
                   coeffs.g1, coeffs.g2)


def extract_G0(geom: SwimmerGeometry, exact: bool = False) -> DissipationForm:
    """Fit ``kappa`` and ``h`` to ``G(0)``; eigenvalues follow from the structure."""
    G0 = gram_matrix(geom, np.zeros(3), exact=exact)
    kappa = float(np.trace(G0) / 3)
    h = float((G0.sum() - np.trace(G0)) / 6)
    residual = float(np.linalg.norm(G0 - dissipation_template(kappa, h)) / np.linalg.norm(G0))
    return DissipationForm(G0, kappa, h, kappa - h, kappa + 2 * h, residual)


def loop_dissipation(G0, stroke, n_steps: int = 256):
    """Energy ``int_0^{2pi} G0 xi_dot . xi_dot dt`` over one elliptic loop.

    Returns ``(quadrature, closed_form)``: the periodic trapezoid rule on
    ``n_steps`` nodes and ``pi (G0 u.u + G0 v.v)``.
    """
    if n_steps < 16:
        raise ValueError("n_steps must be at least 16")
    G0 = np.asarray(G0, dtype=float)
    t = 2 * np.pi * np.arange(n_steps) / n_steps
    rates = stroke.rate(t)
    integrand = np.einsum("ni,ij,nj->n", rates, G0, rates)
    quad = float(integrand.sum() * 2 * np.pi / n_steps)
    u, v = stroke.u, stroke.v
    closed = float(np.pi * (u @ G0 @ u + v @ G0 @ v))
    return quad, closed
