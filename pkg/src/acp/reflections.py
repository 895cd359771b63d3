"""Reflections on M_n(C) and the elementary operations built on them.

A reflection is a linear, *-preserving, anti-multiplicative involution
``A -> A^tau``.  Every reflection on M_n(C) has the form ``A -> S A^T S^*``
with ``S`` unitary and ``S^T = +-S``; the transpose (``S = I``) and the dual
operation (``S = J``, the standard symplectic form) are kept as fast paths.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .errors import DimensionMismatch, NotSelfTau

STRUCT_TOL = 1e-10

Kind = Literal["transpose", "dual", "generalized"]


def as_matrix(A) -> np.ndarray:
    """Validate ``A`` as a finite square complex matrix and return it as an array."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] == 0:
        raise DimensionMismatch("empty matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    if not np.iscomplexobj(A):
        A = A.astype(float)
    return A


def symplectic_form(n: int) -> np.ndarray:
    """J = [[0, I], [-I, 0]] of size 2n."""
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [-I, Z]])


def operator_norm(A) -> float:
    """Largest singular value."""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def commutator(A, B) -> np.ndarray:
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise DimensionMismatch(f"shapes differ: {A.shape} vs {B.shape}")
    return A @ B - B @ A


def commutator_norm(A, B) -> float:
    return operator_norm(commutator(A, B))


@dataclass(frozen=True, eq=False)
class Reflection:
    """A reflection ``A -> S A^T S^*`` on M_n(C).

    Use the constructors :meth:`transpose`, :meth:`dual` and :meth:`generalized`
    rather than building instances directly.
    """

    kind: Kind
    S: Optional[np.ndarray] = None
    sign: int = 1

    @classmethod
    def transpose(cls) -> "Reflection":
        return cls("transpose")

    @classmethod
    def dual(cls) -> "Reflection":
        return cls("dual", sign=-1)

    @classmethod
    def generalized(cls, S, tol: float = STRUCT_TOL) -> "Reflection":
        S = as_matrix(S).astype(complex)
        n = S.shape[0]
        if operator_norm(S @ S.conj().T - np.eye(n)) > tol:
            raise ValueError("S is not unitary")
        if operator_norm(S.T - S) <= tol:
            sign = 1
        elif operator_norm(S.T + S) <= tol:
            sign = -1
        else:
            raise ValueError("S must be symmetric or antisymmetric")
        S.setflags(write=False)
        return cls("generalized", S, sign)

    def __repr__(self) -> str:
        if self.kind == "generalized":
            return f"Reflection(generalized, n={self.S.shape[0]}, sign={self.sign:+d})"
        return f"Reflection({self.kind})"

    def check_dim(self, n: int) -> None:
        if self.kind == "dual" and n % 2:
            raise DimensionMismatch(f"dual reflection needs even dimension, got {n}")
        if self.kind == "generalized" and self.S.shape[0] != n:
            raise DimensionMismatch(
                f"reflection defined on dimension {self.S.shape[0]}, matrix has {n}"
            )

    def form(self, n: int) -> np.ndarray:
        """The unitary ``S`` with ``A^tau = S A^T S^*``."""
        self.check_dim(n)
        if self.kind == "transpose":
            return np.eye(n)
        if self.kind == "dual":
            return symplectic_form(n // 2)
        return self.S

    def apply(self, A) -> np.ndarray:
        A = np.asarray(A)
        n = A.shape[0]
        self.check_dim(n)
        if self.kind == "transpose":
            return A.T.copy()
        if self.kind == "dual":
            # J A^T J^{-1}, written out blockwise
            m = n // 2
            At = A.T
            out = np.empty_like(A)
            out[:m, :m] = At[m:, m:]
            out[:m, m:] = -At[m:, :m]
            out[m:, :m] = -At[:m, m:]
            out[m:, m:] = At[:m, :m]
            return out
        S = self.S
        return S @ A.T @ S.conj().T

    def canonical_frame(self, n: int) -> tuple[np.ndarray, "Reflection"]:
        """Unitary ``W`` and base reflection ``K`` with ``tau(A) = W K(W^* A W) W^*``.

        ``K`` is the transpose when ``S`` is symmetric and the dual operation
        when it is antisymmetric, so conjugation by ``W`` carries the structure
        of ``tau`` onto one of the two standard ones.
        """
        self.check_dim(n)
        if self.kind == "transpose":
            return np.eye(n), self
        if self.kind == "dual":
            return np.eye(n), self
        W = _takagi_frame(self.S) if self.sign == 1 else _youla_frame(self.S)
        return W, Reflection.transpose() if self.sign == 1 else Reflection.dual()


def _orthonormalize(v: np.ndarray, basis: list[np.ndarray]) -> Optional[np.ndarray]:
    for _ in range(2):
        for w in basis:
            v = v - (w.conj() @ v) * w
    nv = np.linalg.norm(v)
    if nv < 1e-6:
        return None
    return v / nv


def _takagi_frame(S: np.ndarray) -> np.ndarray:
    # S symmetric unitary: v -> S conj(v) is an antiunitary involution; collect an
    # orthonormal basis of its fixed vectors, which gives S = W W^T.
    n = S.shape[0]
    basis: list[np.ndarray] = []
    candidates = [np.eye(n, dtype=complex)[k] for k in range(n)]
    candidates += [1j * c for c in candidates]
    for e in candidates:
        if len(basis) == n:
            break
        v = e + S @ e.conj()
        if np.linalg.norm(v) < 1e-6:
            continue
        w = _orthonormalize(v, basis)
        if w is not None:
            w = 0.5 * (w + S @ w.conj())
            basis.append(w / np.linalg.norm(w))
    return np.column_stack(basis)


def _youla_frame(S: np.ndarray) -> np.ndarray:
    # S antisymmetric unitary: theta(v) = S conj(v) squares to -1, pair v with
    # u = -theta(v) so that S = W J W^T with W = [v_1..v_m, u_1..u_m].
    n = S.shape[0]
    m = n // 2
    vs: list[np.ndarray] = []
    us: list[np.ndarray] = []
    for k in range(n):
        if len(vs) == m:
            break
        w = _orthonormalize(np.eye(n, dtype=complex)[k], vs + us)
        if w is None:
            continue
        vs.append(w)
        us.append(-(S @ w.conj()))
    return np.column_stack(vs + us)


@dataclass(frozen=True, eq=False)
class StructuredMatrix:
    """A dense complex matrix tagged with a reflection.

    ``tau=None`` stands for plain complex matrices with no time-reversal
    constraint (the classical complex setting).
    """

    mat: np.ndarray
    tau: Optional[Reflection] = None

    def __post_init__(self):
        mat = as_matrix(self.mat)
        if self.tau is not None:
            self.tau.check_dim(mat.shape[0])
        object.__setattr__(self, "mat", mat)

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    def with_mat(self, mat) -> "StructuredMatrix":
        return StructuredMatrix(mat, self.tau)


def _unpack(A, tau):
    if isinstance(A, StructuredMatrix):
        return A.mat, A.tau if tau is None else tau
    return as_matrix(A), tau


def apply_reflection(A, tau: Optional[Reflection] = None) -> np.ndarray:
    """Return ``A^tau``."""
    M, tau = _unpack(A, tau)
    if tau is None:
        raise ValueError("no reflection attached")
    return tau.apply(M)


def is_self_tau(A, tol: float = STRUCT_TOL, tau: Optional[Reflection] = None) -> bool:
    M, tau = _unpack(A, tau)
    if tau is None:
        return True
    return operator_norm(M - tau.apply(M)) <= tol


def is_self_adjoint(A, tol: float = STRUCT_TOL) -> bool:
    M = A.mat if isinstance(A, StructuredMatrix) else np.asarray(A)
    return operator_norm(M - M.conj().T) <= tol


def is_real_element(A, tol: float = STRUCT_TOL, tau: Optional[Reflection] = None) -> bool:
    """True iff ``A^* = A^tau`` within ``tol``."""
    M, tau = _unpack(A, tau)
    if tau is None:
        return True
    return operator_norm(M.conj().T - tau.apply(M)) <= tol


def re_tau(A, tau: Optional[Reflection] = None) -> np.ndarray:
    """Real part ``(A + (A^*)^tau) / 2``; the result ``X`` satisfies ``X^* = X^tau``."""
    M, tau = _unpack(A, tau)
    if tau is None:
        raise ValueError("no reflection attached")
    return 0.5 * (M + tau.apply(M.conj().T))


def symmetrize_self_tau(A, tau: Optional[Reflection] = None) -> np.ndarray:
    """Average ``(A + A^tau) / 2``, the nearest self-tau matrix in Frobenius norm."""
    M, tau = _unpack(A, tau)
    if tau is None:
        return M.copy()
    return 0.5 * (M + tau.apply(M))


def require_self_tau(A: StructuredMatrix, tol: float = STRUCT_TOL, what: str = "matrix"):
    if A.tau is None:
        return
    err = operator_norm(A.mat - A.tau.apply(A.mat))
    if err > tol * max(1.0, operator_norm(A.mat)):
        raise NotSelfTau(f"{what} is not self-tau: ||A - A^tau|| = {err:.3e}")
