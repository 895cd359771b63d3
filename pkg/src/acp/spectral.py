"""Functional calculus, polar decomposition and grid retraction for self-tau matrices.

Everything here acts on a single matrix.  Functions of normal matrices are
computed from a Schur decomposition, so the eigenvector matrix is unitary to
working precision and ``f(A)^tau = f(A^tau)`` holds whenever ``f`` is a genuine
function of the eigenvalue.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .errors import AtCenter, NotNormal, Singular
from .reflections import (
    Reflection,
    StructuredMatrix,
    as_matrix,
    operator_norm,
    require_self_tau,
)

NORMALITY_TOL = 1e-8


@dataclass(frozen=True)
class NormalEig:
    values: np.ndarray
    vectors: np.ndarray
    # Frobenius mass of the strictly upper Schur factor that was discarded
    schur_residual: float = 0.0


def _mat(A) -> tuple[np.ndarray, Optional[Reflection]]:
    if isinstance(A, StructuredMatrix):
        return A.mat, A.tau
    return as_matrix(A), None


def normality_defect(A: np.ndarray) -> float:
    return operator_norm(A.conj().T @ A - A @ A.conj().T)


def normal_eig(A, normality_tol: float = NORMALITY_TOL) -> NormalEig:
    """Unitary diagonalization of a normal matrix.

    Raises :class:`NotNormal` when ``||A^*A - AA^*|| > normality_tol * ||A||^2``.
    """
    M, _ = _mat(A)
    scale = operator_norm(M)
    if normality_defect(M) > normality_tol * max(scale, 1e-300) ** 2:
        raise NotNormal(f"||A*A - AA*|| = {normality_defect(M):.3e}")
    T, Z = scipy.linalg.schur(M.astype(complex), output="complex")
    residual = float(np.linalg.norm(np.triu(T, 1)))
    return NormalEig(np.diag(T).copy(), Z, residual)


def fun_calc(
    A, f: Callable[[np.ndarray], np.ndarray], normality_tol: float = NORMALITY_TOL
) -> np.ndarray:
    """``f(A) = V diag(f(lambda)) V^*`` for normal ``A``.

    ``f`` receives the array of eigenvalues and must act pointwise.
    """
    eig = normal_eig(A, normality_tol)
    fv = np.asarray(f(eig.values), dtype=complex)
    V = eig.vectors
    return (V * fv) @ V.conj().T


def perturb_to_invertible(A, eps: float) -> StructuredMatrix:
    """Nearby invertible self-tau matrix on the segment from ``A`` to ``I``.

    Returns ``B = (1 - t) A + t I`` with ``0 < t < eps / ||A - I||``, so that
    ``||A - B|| < eps``.  ``B`` is singular only for the finitely many
    ``t = lambda / (lambda - 1)`` with ``lambda`` an eigenvalue of ``A``; the
    chosen ``t`` stays as far from those as the interval allows.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    M, tau = _mat(A)
    n = M.shape[0]
    out = A if isinstance(A, StructuredMatrix) else StructuredMatrix(M)
    if np.array_equal(M, np.eye(n)):
        return out
    smin = np.linalg.svd(M, compute_uv=False)[-1]
    if smin >= eps * 1e-3:
        return out

    t_max = eps / operator_norm(M - np.eye(n))
    lam = np.linalg.eigvals(M)
    with np.errstate(divide="ignore", invalid="ignore"):
        bad = lam / (lam - 1.0)
    bad = bad[np.isfinite(bad)]
    # candidate parameters in the open interval; keep the one farthest from the singular set
    cands = t_max * np.linspace(0.05, 0.95, 91)
    if bad.size:
        dist = np.min(np.abs(cands[:, None] - bad[None, :]), axis=1)
        t0 = float(cands[np.argmax(dist)])
    else:
        t0 = float(cands[len(cands) // 2])
    B = (1.0 - t0) * M + t0 * np.eye(n)
    smin_b = np.linalg.svd(B, compute_uv=False)[-1]
    if not smin_b > 1e-14 * operator_norm(B):
        raise Singular("could not certify invertibility")  # unreachable for finite spectra
    return StructuredMatrix(B, tau)


def self_tau_polar(
    a, singular_policy: str = "reject", eta: float = 1e-8, tau: Optional[Reflection] = None
) -> tuple[np.ndarray, np.ndarray]:
    """Polar decomposition ``a = u p`` with ``u`` a self-tau unitary.

    ``p = (a^* a)^{1/2}`` and ``u = a (a^* a)^{-1/2}``, both taken from the SVD
    ``a = W s V^*`` as ``u = W V^*`` and ``p = V s V^*``.  With
    ``singular_policy="perturb"`` a singular ``a`` is first moved to an
    invertible self-tau matrix within ``eta``.
    """
    if not isinstance(a, StructuredMatrix):
        a = StructuredMatrix(a, tau)
    require_self_tau(a, what="a")
    M = a.mat
    s = np.linalg.svd(M, compute_uv=False)
    singular = s[-1] <= 1e-12 * max(s[0], 1e-300)
    if singular:
        if singular_policy == "reject":
            raise Singular(f"smallest singular value {s[-1]:.3e}")
        if singular_policy != "perturb":
            raise ValueError(f"unknown singular_policy {singular_policy!r}")
        M = perturb_to_invertible(StructuredMatrix(M, a.tau), eta).mat
    W, s, Vh = np.linalg.svd(M)
    u = W @ Vh
    p = (Vh.conj().T * s) @ Vh
    return u, 0.5 * (p + p.conj().T)


# -- the epsilon grid ----------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Grid lines ``Re z in eps Z or Im z in eps Z`` and their cell centers."""

    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")

    def line_distance(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        x = z.real / self.eps
        y = z.imag / self.eps
        return self.eps * np.minimum(np.abs(x - np.round(x)), np.abs(y - np.round(y)))

    def on_grid(self, z, tol: float = 1e-12) -> np.ndarray:
        return self.line_distance(z) <= tol * self.eps

    def center(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        cx = (np.floor(z.real / self.eps) + 0.5) * self.eps
        cy = (np.floor(z.imag / self.eps) + 0.5) * self.eps
        return cx + 1j * cy

    def center_distance(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return np.abs(z - self.center(z))

    def at_center(self, z, tol: float = 1e-14) -> np.ndarray:
        return self.center_distance(z) <= tol * self.eps


def _retract(z: np.ndarray, grid: GridSpec) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    c = grid.center(z)
    w = z - c
    m = np.maximum(np.abs(w.real), np.abs(w.imag))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (grid.eps / 2) / m
    out = c + t * w
    keep = grid.on_grid(z)
    return np.where(keep, z, out)


def grid_retract_point(z: complex, grid: GridSpec) -> complex:
    """Radial retraction of ``C`` minus the cell centers onto the grid lines.

    A point off the grid is pushed away from its cell center until it hits
    the cell boundary; the displacement is at most ``eps * sqrt(2) / 2``.
    """
    if grid.on_grid(z):
        return complex(z)
    if grid.at_center(z):
        raise AtCenter(f"{z} is a cell center of the eps={grid.eps} grid")
    return complex(_retract(np.array([z]), grid)[0])


def _nudge(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    out = values.copy()
    near = grid.center_distance(out) <= 1e-6 * grid.eps
    out[near] += 1e-3 * grid.eps
    still = grid.center_distance(out) <= 1e-6 * grid.eps
    out[still] += 1e-3j * grid.eps
    return out


def grid_project_matrix(
    X, grid: GridSpec, normality_tol: float = NORMALITY_TOL
) -> StructuredMatrix:
    """Normal self-tau ``Y`` with spectrum on the grid lines and ``||X - Y|| <= eps``.

    Eigenvalues within ``1e-6 eps`` of a cell center are first shifted by
    ``1e-3 eps``; the radial retraction is then applied through the functional
    calculus, which keeps ``Y`` self-tau.
    """
    if not isinstance(X, StructuredMatrix):
        X = StructuredMatrix(X)
    require_self_tau(X, what="X")
    eig = normal_eig(X, normality_tol)
    if np.all(grid.on_grid(eig.values, tol=1e-12)):
        return X
    V = eig.vectors
    fv = _retract(_nudge(eig.values, grid), grid)
    return StructuredMatrix((V * fv) @ V.conj().T, X.tau)


MAX_RETRACT_DISPLACEMENT = math.sqrt(2) / 2
