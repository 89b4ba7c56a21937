"""Control system ``p_dot = F(xi, theta) xi_dot`` and its small-stroke expansion.

Forces are eliminated through the balance equations ``W f = 0``, giving

    F = -(W K Y)^{-1} W K X

with ``K = I - nu L`` (first-order force law) or ``K = (I + nu L)^{-1}``
(full mobility inversion).  About the reference shape ``xi = 0``

    F(xi) xi_dot = F0 xi_dot + sum_k (A_k xi_dot . xi) e_k

and the correctors have a fixed sparsity pattern in four scalars
``alpha, beta, lam, gamma``.  :func:`series_coefficients` gives their
two-term expansions in ``a / xi0``; :func:`extract_Ak` and the template
fits recover them numerically from the exact assembly.
"""
import warnings
from dataclasses import dataclass, fields

import numpy as np

from . import hydrodynamics as hydro
from .errors import ExtractionWarning, NumericalError
from .kinematics import (
    SQRT3, TAU, SwimmerGeometry, balance_matrix_W, ball_centers, check_admissible,
    pose_matrix_Y, shape_matrix_X,
)

F0_TEMPLATE = np.array([[-2.0, 1.0, 1.0], [0.0, SQRT3, -SQRT3], [0.0, 0.0, 0.0]])


def _force_operator(L, drag, exact):
    """Forces divided by ``nu`` as a linear map of the ball velocities."""
    if exact:
        M = np.eye(6) + drag * L
        cond = np.linalg.cond(M)
        if not cond < hydro.MAX_CONDITION:
            raise NumericalError(f"mobility matrix is singular (condition number {cond:.3g})")
        return np.linalg.inv(M)
    return np.eye(6) - drag * L


def _assemble(geom, xi, theta, exact):
    """F, the velocity map ``X + Y F`` and the force operator, in the units of ``geom``."""
    xi = check_admissible(geom, xi)
    b = ball_centers(geom, xi, (np.zeros(2), theta))
    L = hydro.interaction_matrix(b, geom.viscosity, geom.radius)
    K = _force_operator(L, geom.drag, exact)
    X = shape_matrix_X(theta)
    Y = pose_matrix_Y(geom, xi, theta)
    WK = balance_matrix_W(geom, xi, theta) @ K
    lhs = WK @ Y
    cond = np.linalg.cond(lhs)
    if not cond < hydro.MAX_CONDITION:
        raise NumericalError(
            f"balance system is singular at xi={xi}, theta={theta} (condition number {cond:.3g})"
        )
    F = -np.linalg.solve(lhs, WK @ X)
    return F, X + Y @ F, K


def _dimensionalize(F, arm_length):
    # theta rates carry 1/length; c rates are dimensionless.
    F = F.copy()
    F[2] /= arm_length
    return F


def control_matrix_exact(geom: SwimmerGeometry, xi, theta: float = 0.0) -> np.ndarray:
    """Control matrix from the first-order force law ``f = (nu I - nu^2 L) u``."""
    xi = check_admissible(geom, xi)
    F, _, _ = _assemble(geom.scaled(), xi / geom.arm_length, theta, exact=False)
    return _dimensionalize(F, geom.arm_length)


def control_matrix_exact_full_inversion(geom: SwimmerGeometry, xi, theta: float = 0.0) -> np.ndarray:
    """Same as :func:`control_matrix_exact` but with ``f = (I/nu + L)^{-1} u``."""
    xi = check_admissible(geom, xi)
    F, _, _ = _assemble(geom.scaled(), xi / geom.arm_length, theta, exact=True)
    return _dimensionalize(F, geom.arm_length)


def velocity_map(geom: SwimmerGeometry, xi, theta: float = 0.0, exact: bool = False):
    """Return ``(B, K)`` with ball velocities ``u = B xi_dot`` and forces ``f = nu K u``.

    Both are dimensionless, hence independent of the unit system.
    """
    xi = check_admissible(geom, xi)
    _, B, K = _assemble(geom.scaled(), xi / geom.arm_length, theta, exact)
    return B, K


def extract_F0(geom: SwimmerGeometry, exact: bool = False) -> np.ndarray:
    if exact:
        return control_matrix_exact_full_inversion(geom, np.zeros(3))
    return control_matrix_exact(geom, np.zeros(3))


def fit_F0(F0) -> tuple:
    """Least-squares ``phi`` for ``F0 ~ phi * F0_TEMPLATE`` and the relative residual."""
    F0 = np.asarray(F0, dtype=float)
    phi = np.sum(F0 * F0_TEMPLATE) / np.sum(F0_TEMPLATE**2)
    resid = np.linalg.norm(F0 - phi * F0_TEMPLATE) / np.linalg.norm(F0)
    return float(phi), float(resid)


def _central_difference(func, i, h):
    e = np.zeros(3)
    e[i] = h
    return (func(e) - func(-e)) / (2 * h)


def extract_Ak(geom: SwimmerGeometry, fd_step: float = None, exact: bool = False,
               rtol: float = 1e-6):
    """First-order correctors ``A_k[i, j] = d F(xi, 0)[k, j] / d xi_i`` at ``xi = 0``.

    Central differences at steps ``h`` and ``h/2`` combined by one Richardson
    level.  An :class:`ExtractionWarning` is issued when the Richardson
    correction exceeds ``sqrt(rtol)`` of the result (step too large) or when
    the estimated round-off exceeds ``rtol`` (step too small).
    """
    xi0 = geom.arm_length
    h = 1e-3 * xi0 if fd_step is None else float(fd_step)
    if not h > 0:
        raise ValueError("fd_step must be positive")
    check_admissible(geom, [-h, -h, -h])
    scaled = geom.scaled()
    hs = h / xi0

    def F(xi):
        return _assemble(scaled, xi, 0.0, exact)[0]

    D = np.empty((3, 3, 3))  # D[i] = dF/dxi_i
    correction = 0.0
    for i in range(3):
        coarse = _central_difference(F, i, hs)
        fine = _central_difference(F, i, hs / 2)
        D[i] = (4 * fine - coarse) / 3
        correction = max(correction, np.abs(fine - coarse).max() / 3)

    scale = np.abs(D).max()
    roundoff = np.finfo(float).eps * np.abs(F(np.zeros(3))).max() / hs
    if correction > np.sqrt(rtol) * scale:
        warnings.warn(f"fd_step={h:g} too large: Richardson correction {correction:.3g} "
                      f"vs derivative scale {scale:.3g}", ExtractionWarning, stacklevel=2)
    if roundoff > rtol * scale:
        warnings.warn(f"fd_step={h:g} too small: round-off estimate {roundoff:.3g} "
                      f"vs derivative scale {scale:.3g}", ExtractionWarning, stacklevel=2)

    # A_k[i, j] = D[i][k, j]; undo the length scaling (1/xi0 per derivative,
    # another 1/xi0 on the theta row).
    A = np.transpose(D, (1, 0, 2)) / xi0
    A[2] /= xi0
    return A[0], A[1], A[2]


@dataclass(frozen=True)
class AsymptoticCoefficients:
    """Scalars parametrising the small-stroke, long-arm control system.

    ``phi`` and ``kappa, h, g1, g2`` are dimensionless; ``alpha, beta, lam``
    scale as 1/length and ``gamma`` as 1/length**2.
    """

    phi: float
    alpha: float
    beta: float
    lam: float
    gamma: float
    kappa: float
    h: float
    g1: float
    g2: float

    def as_dict(self) -> dict:
        return {f.name: float(getattr(self, f.name)) for f in fields(self)}


def series_coefficients(geom: SwimmerGeometry) -> AsymptoticCoefficients:
    """Two-term expansions in ``r = a / xi0``."""
    r = geom.ratio
    xi0 = geom.arm_length
    kappa = 2 / 3 + r / SQRT3
    h = 1 / 6 + 7 * r / (16 * SQRT3)
    return AsymptoticCoefficients(
        phi=1 / 6 - r / (16 * SQRT3),
        alpha=r / (32 * SQRT3 * xi0),
        beta=r / (16 * SQRT3 * xi0),
        lam=5 * r / (48 * SQRT3 * xi0),
        gamma=1 / (6 * SQRT3 * xi0**2),
        kappa=kappa,
        h=h,
        g1=1 / 2 + 3 * SQRT3 * r / 16,
        g2=1 + 5 * SQRT3 * r / 8,
    )


def corrector_templates(alpha, beta, lam, gamma):
    """Assemble ``(A1, A2, A3)`` from the four structural scalars."""
    A1 = np.array([
        [-lam, alpha + beta / 3, alpha + beta / 3],
        [-alpha + beta / 3, lam / 2, -2 * beta / 3],
        [-alpha + beta / 3, -2 * beta / 3, lam / 2],
    ])
    A2 = SQRT3 * np.array([
        [0.0, (alpha - beta) / 3, (beta - alpha) / 3],
        [(-beta - alpha) / 3, lam / 2, -2 * alpha / 3],
        [(alpha + beta) / 3, 2 * alpha / 3, -lam / 2],
    ])
    A3 = gamma * np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])
    return A1, A2, A3


def build_Ak_from_coefficients(coeffs: AsymptoticCoefficients):
    return corrector_templates(coeffs.alpha, coeffs.beta, coeffs.lam, coeffs.gamma)


def fit_Ak(A1, A2, A3):
    """Joint least-squares fit of ``(alpha, beta, lam, gamma)`` to the correctors.

    Returns the four scalars and the per-matrix relative residuals.
    """
    target = np.concatenate([np.ravel(A1), np.ravel(A2), np.ravel(A3)])
    basis = np.column_stack([
        np.concatenate([m.ravel() for m in corrector_templates(*unit)])
        for unit in np.eye(4)
    ])
    params, *_ = np.linalg.lstsq(basis, target, rcond=None)
    fitted = corrector_templates(*params)
    resid = tuple(
        float(np.linalg.norm(A - T) / np.linalg.norm(A)) for A, T in zip((A1, A2, A3), fitted)
    )
    return tuple(float(p) for p in params), resid


def skew_action(k: int, coeffs: AsymptoticCoefficients, xi) -> np.ndarray:
    """Action of the skew part ``M_k`` of ``A_k`` on a shape vector.

    ``M1 xi = alpha xi x tau1``, ``M2 xi = alpha xi x tau2`` and
    ``M3 xi = gamma tau3 x xi`` (the last matches the sign of the ``A3``
    pattern with ``gamma > 0``).
    """
    xi = np.asarray(xi, dtype=float)
    if k == 1:
        return coeffs.alpha * np.cross(xi, TAU[0])
    if k == 2:
        return coeffs.alpha * np.cross(xi, TAU[1])
    if k == 3:
        return coeffs.gamma * np.cross(TAU[2], xi)
    raise ValueError(f"k must be 1, 2 or 3, got {k!r}")


@dataclass(frozen=True)
class ControlExpansion:
    """``F0`` and the first-order correctors ``A1, A2, A3``."""

    F0: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    A3: np.ndarray

    @property
    def correctors(self):
        return (self.A1, self.A2, self.A3)

    @property
    def skew_parts(self):
        return tuple((A - A.T) / 2 for A in self.correctors)

    def control_matrix(self, xi) -> np.ndarray:
        """First-order ``F(xi)``; row k gains ``xi^T A_k``."""
        xi = np.asarray(xi, dtype=float)
        return self.F0 + np.array([xi @ A for A in self.correctors])

    @classmethod
    def from_coefficients(cls, coeffs: AsymptoticCoefficients) -> "ControlExpansion":
        return cls(coeffs.phi * F0_TEMPLATE, *build_Ak_from_coefficients(coeffs))


def expand(geom: SwimmerGeometry, fd_step: float = None, exact: bool = False) -> ControlExpansion:
    """Numerically extracted expansion of the exact control matrix about ``xi = 0``."""
    return ControlExpansion(extract_F0(geom, exact), *extract_Ak(geom, fd_step, exact))


def extracted_coefficients(geom: SwimmerGeometry, fd_step: float = None,
                           exact: bool = False) -> AsymptoticCoefficients:
    """All coefficients recovered by template fits of the numerical expansion."""
    from .energetics import extract_G0

    exp = expand(geom, fd_step, exact)
    phi, _ = fit_F0(exp.F0)
    (alpha, beta, lam, gamma), _ = fit_Ak(*exp.correctors)
    G = extract_G0(geom, exact)
    return AsymptoticCoefficients(phi, alpha, beta, lam, gamma, G.kappa, G.h, G.g1, G.g2)
