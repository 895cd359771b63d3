"""Quaternion matrices and their embedding as self-dual complex matrices.

An entry ``q = a + b i + c j + d k`` is stored as four real components.  The
complex embedding writes ``q = alpha + beta j`` with ``alpha = a + b i`` and
``beta = c + d i`` and places an n x n quaternion matrix into M_2n(C) as

    [[ alpha,        beta       ],
     [ -conj(beta),  conj(alpha) ]]

(n x n blocks), whose image is exactly ``{X : X^# = X^*}`` for the dual
operation ``#``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, RealityViolation
from .reflections import STRUCT_TOL, Reflection, StructuredMatrix, as_matrix, operator_norm


def qmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product of quaternion arrays with components on the last axis."""
    a1, b1, c1, d1 = np.moveaxis(np.asarray(p, float), -1, 0)
    a2, b2, c2, d2 = np.moveaxis(np.asarray(q, float), -1, 0)
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )


def qconj(q: np.ndarray) -> np.ndarray:
    out = np.array(q, dtype=float, copy=True)
    out[..., 1:] *= -1
    return out


def _pair(data: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return data[..., 0] + 1j * data[..., 1], data[..., 2] + 1j * data[..., 3]


def _from_pair(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    return np.stack([alpha.real, alpha.imag, beta.real, beta.imag], axis=-1)


@dataclass(frozen=True, eq=False)
class QuaternionMatrix:
    """n x n quaternion matrix, ``data`` has shape ``(n, n, 4)``."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 3 or data.shape[0] != data.shape[1] or data.shape[2] != 4:
            raise DimensionMismatch(f"expected shape (n, n, 4), got {data.shape}")
        object.__setattr__(self, "data", data)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @classmethod
    def identity(cls, n: int) -> "QuaternionMatrix":
        data = np.zeros((n, n, 4))
        data[np.arange(n), np.arange(n), 0] = 1.0
        return cls(data)

    @classmethod
    def from_scalar(cls, a=0.0, b=0.0, c=0.0, d=0.0) -> "QuaternionMatrix":
        return cls(np.array([[[a, b, c, d]]], dtype=float))

    def __matmul__(self, other: "QuaternionMatrix") -> "QuaternionMatrix":
        # (Pa + Pb j)(Qa + Qb j) = (Pa Qa - Pb conj(Qb)) + (Pa Qb + Pb conj(Qa)) j
        pa, pb = _pair(self.data)
        qa, qb = _pair(other.data)
        return QuaternionMatrix(
            _from_pair(pa @ qa - pb @ qb.conj(), pa @ qb + pb @ qa.conj())
        )

    def __add__(self, other: "QuaternionMatrix") -> "QuaternionMatrix":
        return QuaternionMatrix(self.data + other.data)

    def __sub__(self, other: "QuaternionMatrix") -> "QuaternionMatrix":
        return QuaternionMatrix(self.data - other.data)

    def conj_transpose(self) -> "QuaternionMatrix":
        return QuaternionMatrix(qconj(self.data).transpose(1, 0, 2))

    @property
    def H(self) -> "QuaternionMatrix":
        return self.conj_transpose()

    def to_complex(self) -> np.ndarray:
        alpha, beta = _pair(self.data)
        return np.block([[alpha, beta], [-beta.conj(), alpha.conj()]])

    def norm(self) -> float:
        """Operator norm (equal to that of the complex embedding)."""
        return operator_norm(self.to_complex())


def embed_quaternion(Q: QuaternionMatrix) -> StructuredMatrix:
    """Embed ``Q`` into M_2n(C) as a real element of ``(M_2n, #)``."""
    return StructuredMatrix(Q.to_complex(), Reflection.dual())


def project_real_dual(X: np.ndarray) -> QuaternionMatrix:
    """Quaternion matrix obtained by averaging the redundant blocks of ``X``.

    This is the orthogonal projection onto the image of the embedding; it is
    the exact inverse of :func:`embed_quaternion` on that image.
    """
    X = np.asarray(X)
    m = X.shape[0] // 2
    alpha = 0.5 * (X[:m, :m] + X[m:, m:].conj())
    beta = 0.5 * (X[:m, m:] - X[m:, :m].conj())
    return QuaternionMatrix(_from_pair(alpha, beta))


def extract_quaternion(X, tol: float = STRUCT_TOL) -> QuaternionMatrix:
    """Inverse of :func:`embed_quaternion`.

    Raises :class:`RealityViolation` if ``||X^# - X^*|| > tol``.
    """
    if isinstance(X, StructuredMatrix):
        if X.tau is not None and X.tau.kind != "dual":
            raise ValueError("extract_quaternion needs the dual reflection")
        X = X.mat
    X = as_matrix(X)
    if X.shape[0] % 2:
        raise DimensionMismatch("self-dual matrices have even dimension")
    dev = operator_norm(Reflection.dual().apply(X) - X.conj().T)
    if dev > tol * max(1.0, operator_norm(X)):
        raise RealityViolation(f"||X^# - X^*|| = {dev:.3e} exceeds {tol:.1e}")
    return project_real_dual(X)


def random_quaternion_matrix(rng: np.random.Generator, n: int) -> QuaternionMatrix:
    return QuaternionMatrix(rng.standard_normal((n, n, 4)))


def quaternion_qr(Q: QuaternionMatrix) -> tuple[QuaternionMatrix, QuaternionMatrix]:
    """QR factorization by modified Gram-Schmidt in quaternion arithmetic.

    ``R`` has real positive diagonal, which fixes the factorization uniquely
    for full-rank input (so Gaussian input gives a Haar symplectic unitary).
    """
    n = Q.n
    cols = [Q.data[:, k, :].copy() for k in range(n)]
    R = np.zeros((n, n, 4))
    for k in range(n):
        v = cols[k]
        for l in range(k):
            # r = <q_l, v> = sum conj(q_l) v ; v <- v - q_l r
            r = qmul(qconj(cols[l]), v).sum(axis=0)
            R[l, k] = r
            v = v - qmul(cols[l], np.broadcast_to(r, v.shape))
        nv = np.sqrt(np.sum(v * v))
        R[k, k, 0] = nv
        cols[k] = v / nv
    return QuaternionMatrix(np.stack(cols, axis=1)), QuaternionMatrix(R)
