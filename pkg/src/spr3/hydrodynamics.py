"""Stokeslet interactions between the three balls.

Velocities and forces are related through ``u = (I/nu + L) f`` where ``L``
holds the pairwise stokeslets.  For long arms ``nu L`` is small and the
relation is inverted to first order, ``f = (nu I - nu^2 L) u``.
"""
import numpy as np

from .errors import AdmissibilityError, NumericalError

# Largest condition number accepted for the dense solves.
MAX_CONDITION = 1e12


def stokeslet(x, viscosity: float) -> np.ndarray:
    """Oseen tensor ``(I/|x| + x x^T/|x|^3) / (8 pi mu)``.

    Works for 3-vectors and for planar 2-vectors; the latter gives the 2x2
    in-plane block of the full tensor.
    """
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x)
    if not r > 0:
        raise ZeroDivisionError("stokeslet is singular at zero displacement")
    return (np.eye(x.size) / r + np.outer(x, x) / r**3) / (8 * np.pi * viscosity)


def interaction_matrix(centers, viscosity: float, radius: float = None) -> np.ndarray:
    """6x6 mutual interaction matrix with stokeslet blocks ``S(b_i - b_j)``.

    If ``radius`` is given, ball overlap (``|b_ij| <= 2a``) is rejected.
    """
    b = np.asarray(centers, dtype=float)
    L = np.zeros((6, 6))
    for i in range(3):
        for j in range(i + 1, 3):
            d = b[i] - b[j]
            if radius is not None and np.linalg.norm(d) <= 2 * radius:
                raise AdmissibilityError(
                    f"balls {i + 1} and {j + 1} overlap: distance {np.linalg.norm(d):.6g} <= 2a"
                )
            S = stokeslet(d, viscosity)
            L[2 * i:2 * i + 2, 2 * j:2 * j + 2] = S
            L[2 * j:2 * j + 2, 2 * i:2 * i + 2] = S
    return L


def mobility_matrix(L: np.ndarray, drag: float) -> np.ndarray:
    """``I/nu + L``, mapping forces to velocities."""
    return np.eye(6) / drag + L


def forces_leading_order(u, L: np.ndarray, drag: float) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return drag * u - drag**2 * (L @ u)


def forces_exact(u, L: np.ndarray, drag: float) -> np.ndarray:
    """Solve ``(I/nu + L) f = u`` for the forces."""
    M = mobility_matrix(L, drag)
    cond = np.linalg.cond(M)
    if not cond < MAX_CONDITION:
        raise NumericalError(f"mobility matrix is singular (condition number {cond:.3g})")
    return np.linalg.solve(M, np.asarray(u, dtype=float))


def instantaneous_power(f, u) -> float:
    return float(np.dot(f, u))
