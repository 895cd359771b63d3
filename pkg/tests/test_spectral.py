import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from acp.ensembles import random_normal_self_tau, random_self_tau
from acp.errors import AtCenter, NotNormal, NotSelfTau, Singular
from acp.reflections import Reflection, StructuredMatrix, is_self_tau, operator_norm
from acp.spectral import (
    GridSpec,
    fun_calc,
    grid_project_matrix,
    grid_retract_point,
    normal_eig,
    perturb_to_invertible,
    self_tau_polar,
)
from conftest import cplx, reflection_cases

CASES = reflection_cases()


def test_normal_eig_diag():
    eig = normal_eig(np.diag([1.0, 1j]))
    assert sorted(eig.values, key=lambda z: z.imag) == pytest.approx([1, 1j])
    np.testing.assert_allclose(np.abs(eig.vectors), np.eye(2), atol=1e-14)


def test_normal_eig_hermitian(rng):
    G = cplx(rng, 6)
    eig = normal_eig(G + G.conj().T)
    assert np.max(np.abs(eig.values.imag)) <= 1e-12


def test_normal_eig_recovers_diagonal(rng):
    lam = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    Q, _ = np.linalg.qr(cplx(rng, 7))
    A = (Q * lam) @ Q.conj().T
    eig = normal_eig(A)
    from scipy.optimize import linear_sum_assignment

    r, c = linear_sum_assignment(np.abs(lam[:, None] - eig.values[None, :]))
    assert np.max(np.abs(lam[r] - eig.values[c])) <= 1e-9
    V = eig.vectors
    assert operator_norm(V.conj().T @ V - np.eye(7)) <= 1e-12
    assert operator_norm(A @ V - V * eig.values) <= 1e-10 * operator_norm(A)
    assert eig.schur_residual <= 1e-12


def test_normal_eig_rejects_non_normal():
    with pytest.raises(NotNormal):
        normal_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_fun_calc_examples(rng):
    G = cplx(rng, 5)
    H = G + G.conj().T
    np.testing.assert_allclose(fun_calc(H, lambda z: z), H, atol=1e-10)
    np.testing.assert_allclose(fun_calc(H, lambda z: np.ones_like(z)), np.eye(5), atol=1e-12)
    np.testing.assert_allclose(fun_calc(H, lambda z: z**2), H @ H, atol=1e-10 * operator_norm(H) ** 2)


@pytest.mark.parametrize("name,tau", CASES)
def test_fun_calc_equivariance(name, tau, rng):
    # generic normal (not self-tau) matrix: f(A)^tau = f(A^tau)
    Q, _ = np.linalg.qr(cplx(rng, 6))
    A = (Q * (rng.standard_normal(6) + 1j * rng.standard_normal(6))) @ Q.conj().T
    for coeffs in ([1, 0, 2], [0.5j, -1, 0, 1], [0, 0, 0, 0, 1]):
        f = lambda z, c=coeffs: np.polyval(c, z)
        lhs = tau.apply(fun_calc(A, f))
        rhs = fun_calc(tau.apply(A), f)
        sup = np.max(np.abs(f(np.linalg.eigvals(A))))
        assert operator_norm(lhs - rhs) <= 1e-9 * max(sup, 1.0)


@pytest.mark.parametrize("name,tau", CASES)
def test_fun_calc_keeps_self_tau(name, tau, rng):
    X = random_normal_self_tau(rng, 6, tau)
    Y = fun_calc(StructuredMatrix(X, tau), np.exp)
    assert is_self_tau(Y, tol=1e-10, tau=tau)


def test_perturb_zero_matrix():
    B = perturb_to_invertible(StructuredMatrix(np.zeros((3, 3)), Reflection.transpose()), 0.1)
    t0 = B.mat[0, 0]
    assert 0 < t0 < 0.1
    np.testing.assert_allclose(B.mat, t0 * np.eye(3))


def test_perturb_diag_0_1():
    A = np.diag([0.0, 1.0])
    B = perturb_to_invertible(StructuredMatrix(A, Reflection.transpose()), 0.5)
    t0 = B.mat[0, 0]
    assert 0 < t0 < 0.5
    assert np.linalg.det(B.mat) == pytest.approx(t0)
    assert operator_norm(A - B.mat) < 0.5


def test_perturb_returns_invertible_unchanged(rng):
    A = StructuredMatrix(np.diag([1.0, -2.0, 3.0]), Reflection.transpose())
    assert perturb_to_invertible(A, 1e-3) is A
    I = StructuredMatrix(np.eye(3))
    assert perturb_to_invertible(I, 0.1) is I


@pytest.mark.parametrize("name,tau", CASES)
@pytest.mark.parametrize("eps", [1e-1, 1e-4])
def test_perturb_properties(name, tau, eps, rng):
    # singular self-tau input: kill one eigen-direction of a self-tau Hermitian matrix
    X = random_normal_self_tau(rng, 6, tau)
    A = StructuredMatrix(X - np.linalg.eigvals(X)[0] * np.eye(6), tau)
    assert np.linalg.svd(A.mat, compute_uv=False)[-1] < 1e-10
    B = perturb_to_invertible(A, eps)
    assert operator_norm(A.mat - B.mat) < eps
    assert is_self_tau(B, tol=1e-12)
    s = np.linalg.svd(B.mat, compute_uv=False)
    assert s[-1] > 1e-14 * s[0]


def test_polar_examples():
    t = Reflection.transpose()
    u, p = self_tau_polar(StructuredMatrix(-np.eye(3), t))
    np.testing.assert_allclose(u, -np.eye(3), atol=1e-14)
    np.testing.assert_allclose(p, np.eye(3), atol=1e-14)
    P = np.array([[2.0, 0.5, 0.0], [0.5, 1.0, 0.2], [0.0, 0.2, 3.0]])
    u, p = self_tau_polar(StructuredMatrix(P, t))
    np.testing.assert_allclose(u, np.eye(3), atol=1e-10)
    np.testing.assert_allclose(p, P, atol=1e-10)


def test_polar_complex_symmetric_matches_formula(rng):
    t = Reflection.transpose()
    G = cplx(rng, 4)
    a = G + G.T
    u, p = self_tau_polar(StructuredMatrix(a, t))
    assert operator_norm(u.T - u) <= 1e-10
    # oracle: u = a (a^* a)^{-1/2} through the Hermitian functional calculus
    inv_sqrt = fun_calc(a.conj().T @ a, lambda z: 1 / np.sqrt(z.real))
    np.testing.assert_allclose(u, a @ inv_sqrt, atol=1e-10)
    np.testing.assert_allclose(p, fun_calc(a.conj().T @ a, lambda z: np.sqrt(z.real)), atol=1e-10)


@pytest.mark.parametrize("name,tau", CASES)
def test_polar_properties(name, tau, rng):
    a = random_self_tau(rng, 6, tau)
    u, p = self_tau_polar(StructuredMatrix(a, tau))
    assert operator_norm(u @ p - a) <= 1e-10 * operator_norm(a)
    assert operator_norm(u.conj().T @ u - np.eye(6)) <= 1e-11
    assert operator_norm(tau.apply(u) - u) <= 1e-10
    assert np.min(np.linalg.eigvalsh(p)) >= -1e-12


def test_polar_singular_policies():
    t = Reflection.transpose()
    a = StructuredMatrix(np.diag([1.0, 0.0]), t)
    with pytest.raises(Singular):
        self_tau_polar(a)
    u, p = self_tau_polar(a, singular_policy="perturb", eta=1e-6)
    assert operator_norm(u @ p - a.mat) <= 1e-6 + 1e-10
    assert operator_norm(u.T - u) <= 1e-10


def test_polar_requires_self_tau():
    with pytest.raises(NotSelfTau):
        self_tau_polar(StructuredMatrix(np.array([[1.0, 2.0], [0.0, 1.0]]), Reflection.transpose()))


# -- grid ----------------------------------------------------------------------


def test_retract_examples():
    g = GridSpec(1.0)
    assert grid_retract_point(0.3 + 0.2j, g) == pytest.approx(1 / 6 + 0j, abs=1e-15)
    for z in (2.0 + 0.37j, -0.4 + 3j, 0.0, 1.25 - 7j):
        assert grid_retract_point(z, g) == z
    with pytest.raises(AtCenter):
        grid_retract_point(0.5 + 0.5j, g)
    with pytest.raises(AtCenter):
        grid_retract_point(-2.5 + 1.5j, g)


@settings(max_examples=300, deadline=None)
@given(
    x=st.floats(-10, 10, allow_nan=False),
    y=st.floats(-10, 10, allow_nan=False),
    eps=st.sampled_from([0.1, 0.25, 1.0, 3.0]),
)
def test_retract_properties(x, y, eps):
    g = GridSpec(eps)
    z = complex(x, y)
    assume(g.center_distance(z) > 1e-9 * eps)
    w = grid_retract_point(z, g)
    assert g.line_distance(w) <= 1e-12 * eps
    assert abs(w - z) <= math.sqrt(2) / 2 * eps * (1 + 1e-12)
    assert grid_retract_point(w, g) == w


def test_retract_displacement_tight_near_center():
    g = GridSpec(1.0)
    z = 0.5 + 0.5j + 1e-9 * (1 + 1j)
    assert abs(grid_retract_point(z, g) - z) == pytest.approx(math.sqrt(2) / 2, abs=1e-8)


def test_grid_project_hermitian_unchanged(rng):
    G = cplx(rng, 5)
    X = StructuredMatrix(G + G.conj().T)
    assert grid_project_matrix(X, GridSpec(0.25)) is X


def test_grid_project_1x1():
    Y = grid_project_matrix(StructuredMatrix(np.array([[0.3 + 0.2j]]), Reflection.transpose()), GridSpec(1.0))
    assert Y.mat[0, 0] == pytest.approx(1 / 6, abs=1e-14)


def test_grid_project_center_eigenvalue_nudged():
    eps = 0.5
    X = StructuredMatrix((0.25 + 0.25j) * np.eye(4), Reflection.dual())
    Y = grid_project_matrix(X, GridSpec(eps))
    assert operator_norm(X.mat - Y.mat) <= eps
    assert np.all(GridSpec(eps).line_distance(np.linalg.eigvals(Y.mat)) <= 1e-9 * eps)
    assert is_self_tau(Y, tol=1e-12)


@pytest.mark.parametrize("name,tau", CASES)
def test_grid_project_random(name, tau, rng):
    g = GridSpec(0.25)
    X = StructuredMatrix(random_normal_self_tau(rng, 6, tau), tau)
    Y = grid_project_matrix(X, g)
    assert operator_norm(X.mat - Y.mat) <= 0.25
    assert np.all(g.line_distance(np.linalg.eigvals(Y.mat)) <= 1e-9 * 0.25)
    assert is_self_tau(Y, tol=1e-10)
    assert operator_norm(Y.mat @ Y.mat.conj().T - Y.mat.conj().T @ Y.mat) <= 1e-12
