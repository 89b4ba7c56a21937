import warnings

import numpy as np
import pytest
import sympy

from spr3 import control
from spr3.control import (
    ControlExpansion, build_Ak_from_coefficients, control_matrix_exact,
    control_matrix_exact_full_inversion, expand, extract_Ak, extract_F0, fit_Ak, fit_F0,
    series_coefficients, skew_action,
)
from spr3.errors import ExtractionWarning
from spr3.kinematics import ARMS, TAU, SwimmerGeometry, rotation

from conftest import random_states

SWEEP = np.array([0.04, 0.02, 0.01])


def _slope(ratios, devs):
    return np.polyfit(np.log(ratios), np.log(devs), 1)[0]


def kinematic_control(xi0, xi, xi_dot):
    """Pose rate of the swimmer when hydrodynamic interactions are switched off.

    Each ball then feels plain drag, so the velocities themselves must be
    force- and torque-free:  sum u_i = 0 and sum b_i x u_i = 0.
    """
    zeta = xi0 + np.asarray(xi)
    perp = np.column_stack([-ARMS[:, 1], ARMS[:, 0]])
    b = zeta[:, None] * ARMS
    cross = lambda p, q: p[0] * q[1] - p[1] * q[0]
    M = np.zeros((3, 3))
    rhs = np.zeros(3)
    for i in range(3):
        M[:2, :2] += np.eye(2)
        M[:2, 2] += zeta[i] * perp[i]
        rhs[:2] -= xi_dot[i] * ARMS[i]
        M[2, 0] += cross(b[i], [1, 0])
        M[2, 1] += cross(b[i], [0, 1])
        M[2, 2] += zeta[i] * cross(b[i], perp[i])
        rhs[2] -= xi_dot[i] * cross(b[i], ARMS[i])
    return np.linalg.solve(M, rhs)


def test_reference_shape_does_not_rotate(slender):
    F = control_matrix_exact(slender, np.zeros(3))
    assert np.allclose(F[2], 0, atol=1e-14)
    assert np.allclose(F @ np.ones(3), 0, atol=1e-14)
    assert np.allclose(F.sum(axis=1), 0, atol=1e-14)


@pytest.mark.parametrize("variant", [control_matrix_exact, control_matrix_exact_full_inversion])
def test_rotational_factorization(variant, rng):
    for geom, xi, theta in random_states(rng, 100):
        F0 = variant(geom, xi)
        assert np.linalg.norm(variant(geom, xi, theta) - rotation(theta) @ F0) <= 1e-12 * np.linalg.norm(F0)


def test_point_ball_limit_matches_kinematics(rng):
    geom = SwimmerGeometry(1e-13, 2.0)
    for _ in range(10):
        xi, xi_dot = rng.uniform(-0.5, 0.5, 3), rng.normal(size=3)
        expected = kinematic_control(2.0, xi, xi_dot)
        assert np.allclose(control_matrix_exact(geom, xi) @ xi_dot, expected, atol=1e-11)
        assert np.allclose(control_matrix_exact_full_inversion(geom, xi) @ xi_dot, expected, atol=1e-11)


def test_force_laws_agree_to_second_order(rng):
    xi = np.array([0.1, -0.05, 0.02])
    devs = []
    for r in SWEEP:
        g = SwimmerGeometry(r, 1.0)
        F = control_matrix_exact(g, xi)
        devs.append(np.linalg.norm(control_matrix_exact_full_inversion(g, xi) - F) / np.linalg.norm(F))
    assert 1.7 <= _slope(SWEEP, devs) <= 2.5


def test_control_units():
    # doubling every length leaves c-rates unchanged and halves theta-rates
    xi = np.array([0.1, -0.2, 0.05])
    F1 = control_matrix_exact(SwimmerGeometry(0.05, 1.0), xi)
    F2 = control_matrix_exact(SwimmerGeometry(0.1, 2.0, viscosity=7.0), 2 * xi)
    assert np.allclose(F2[:2], F1[:2], atol=1e-14)
    assert np.allclose(F2[2], F1[2] / 2, atol=1e-14)


def test_F0_structure():
    for r in (1e-3, 0.01, 0.1):
        F0 = extract_F0(SwimmerGeometry(r, 1.0))
        phi, resid = fit_F0(F0)
        assert resid <= 1e-10
        for i, j in ((2, 0), (2, 1), (2, 2), (1, 0)):
            assert abs(F0[i, j]) <= 1e-10 * abs(phi)
    phi, _ = fit_F0(extract_F0(SwimmerGeometry(1e-9, 1.0)))
    assert phi == pytest.approx(1 / 6, abs=1e-9)


def test_phi_second_order_remainder():
    devs = [abs(fit_F0(extract_F0(SwimmerGeometry(r, 1.0)))[0] - series_coefficients(SwimmerGeometry(r, 1.0)).phi)
            for r in SWEEP]
    assert 1.7 <= _slope(SWEEP, devs) <= 2.5
    # at a/xi0 = 0.01 the two-term series is 0.1663059 and the remainder C r^2 has C < 0.1
    assert series_coefficients(SwimmerGeometry(0.01, 1.0)).phi == pytest.approx(0.1663059, abs=1e-7)
    assert devs[-1] < 0.1 * 0.01**2


def test_corrector_templates_fit():
    A1, A2, A3 = extract_Ak(SwimmerGeometry(1e-3, 1.0))
    assert np.allclose(A3, -A3.T, atol=1e-8 * np.abs(A3).max())
    (alpha, beta, lam, gamma), resid = fit_Ak(A1, A2, A3)
    assert max(resid) <= 1e-8
    assert min(alpha, beta, lam, gamma) > 0


def test_gamma_small_ball_limit():
    for xi0 in (1.0, 3.0):
        *_, A3 = extract_Ak(SwimmerGeometry(1e-5 * xi0, xi0))
        gamma = fit_Ak(*extract_Ak(SwimmerGeometry(1e-5 * xi0, xi0)))[0][3]
        assert gamma * xi0**2 == pytest.approx(1 / (6 * np.sqrt(3)), rel=1e-4)
        assert A3[1, 0] == pytest.approx(gamma)


def test_expansion_predicts_small_shapes():
    # F(xi) - (F0 + first-order correction) must vanish quadratically in |xi|
    g = SwimmerGeometry(0.05, 1.0)
    exp = expand(g)
    direction = np.array([0.3, -0.8, 0.5])
    sizes = np.array([4e-3, 2e-3, 1e-3])
    errs = [np.linalg.norm(control_matrix_exact(g, s * direction) - exp.control_matrix(s * direction))
            for s in sizes]
    assert 1.8 <= _slope(sizes, errs) <= 2.2


def test_extraction_units():
    A_unit = extract_Ak(SwimmerGeometry(0.02, 1.0))
    A_big = extract_Ak(SwimmerGeometry(0.1, 5.0))
    assert np.allclose(A_big[0], A_unit[0] / 5, rtol=1e-7, atol=1e-14)
    assert np.allclose(A_big[2], A_unit[2] / 25, rtol=1e-7, atol=1e-14)


def test_extraction_step_diagnostics(slender):
    with pytest.warns(ExtractionWarning, match="too small"):
        extract_Ak(slender, fd_step=1e-11)
    with pytest.warns(ExtractionWarning, match="too large"):
        extract_Ak(slender, fd_step=0.3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        extract_Ak(slender)


def test_series_limits():
    c = series_coefficients(SwimmerGeometry(1e-12, 1.0))
    assert (c.kappa, c.h) == pytest.approx((2 / 3, 1 / 6))
    assert (c.g1, c.g2) == pytest.approx((0.5, 1.0))
    assert c.phi == pytest.approx(1 / 6)
    assert c.gamma == pytest.approx(1 / (6 * np.sqrt(3)))
    assert c.alpha == pytest.approx(0, abs=1e-12)


def test_series_eigenvalue_identities():
    r = sympy.Symbol("r", positive=True)
    s3 = sympy.sqrt(3)
    kappa = sympy.Rational(2, 3) + r / s3
    h = sympy.Rational(1, 6) + 7 * r / (16 * s3)
    assert sympy.simplify(kappa - h - (sympy.Rational(1, 2) + 3 * s3 * r / 16)) == 0
    assert sympy.simplify(kappa + 2 * h - (1 + 5 * s3 * r / 8)) == 0
    for ratio in (0.01, 0.1, 0.3):
        c = series_coefficients(SwimmerGeometry(ratio, 1.0))
        assert c.g1 == pytest.approx(c.kappa - c.h, abs=1e-15)
        assert c.g2 == pytest.approx(c.kappa + 2 * c.h, abs=1e-15)


def test_series_units():
    a = series_coefficients(SwimmerGeometry(0.01, 1.0))
    b = series_coefficients(SwimmerGeometry(0.04, 4.0))
    assert b.alpha == pytest.approx(a.alpha / 4)
    assert b.gamma == pytest.approx(a.gamma / 16)
    assert b.kappa == pytest.approx(a.kappa)


def test_templates_from_coefficients(slender):
    c = series_coefficients(slender)
    A1, A2, A3 = build_Ak_from_coefficients(c)
    assert np.allclose(np.diag(A1), [-c.lam, c.lam / 2, c.lam / 2])
    assert A2[0, 0] == 0
    assert A2[1, 2] == pytest.approx(-2 * np.sqrt(3) * c.alpha / 3)
    for A in (A1, A2, A3):
        assert np.trace(A) == pytest.approx(0, abs=1e-16)
    assert np.allclose(A3, -A3.T)
    exp = ControlExpansion.from_coefficients(c)
    assert np.allclose(exp.skew_parts[2], A3)
    assert np.allclose(exp.F0[2], 0)


def test_fit_recovers_template_parameters():
    params = (0.3, -0.7, 1.1, 0.05)
    fitted, resid = fit_Ak(*control.corrector_templates(*params))
    assert np.allclose(fitted, params)
    assert max(resid) < 1e-14


def test_skew_action_examples(slender):
    c = series_coefficients(slender)
    assert np.allclose(skew_action(1, c, TAU[0]), 0)
    assert np.allclose(skew_action(1, c, TAU[1]), c.alpha * 2 / np.sqrt(3) * TAU[2])
    with pytest.raises(ValueError):
        skew_action(4, c, np.ones(3))


def test_skew_action_matches_templates(slender, rng):
    c = series_coefficients(slender)
    M = ControlExpansion.from_coefficients(c).skew_parts
    for _ in range(50):
        xi = rng.normal(size=3)
        for k in range(3):
            assert np.allclose(M[k] @ xi, skew_action(k + 1, c, xi), atol=1e-12 * np.linalg.norm(xi))


def test_skew_action_matches_extraction():
    g = SwimmerGeometry(0.01, 1.0)
    exp = expand(g)
    (alpha, beta, lam, gamma), _ = fit_Ak(*exp.correctors)
    c = control.AsymptoticCoefficients(0, alpha, beta, lam, gamma, 0, 0, 0, 0)
    xi = np.array([0.3, -0.1, 0.7])
    for k, M in enumerate(exp.skew_parts):
        assert np.allclose(M @ xi, skew_action(k + 1, c, xi), rtol=1e-6, atol=1e-9 * abs(gamma))
