"""Seeded random ensembles of structured matrices."""
from __future__ import annotations

from typing import Optional

import numpy as np

from .errors import DimensionMismatch
from .quaternion import QuaternionMatrix, project_real_dual, quaternion_qr
from .reflections import Reflection, StructuredMatrix, operator_norm, symplectic_form

STRUCTURES = ("real", "complex", "selfdual")


def reflection_for(structure: str) -> Optional[Reflection]:
    if structure == "real":
        return Reflection.transpose()
    if structure == "complex":
        return None
    if structure == "selfdual":
        return Reflection.dual()
    raise ValueError(f"unknown structure {structure!r}")


def structure_of(tau: Optional[Reflection]) -> str:
    if tau is None or tau.kind == "generalized":
        return "complex"
    return "real" if tau.kind == "transpose" else "selfdual"


def _check(n: int, structure: str) -> None:
    if structure not in STRUCTURES:
        raise ValueError(f"unknown structure {structure!r}")
    if n < 1:
        raise DimensionMismatch("dimension must be positive")
    if structure == "selfdual" and n % 2:
        raise DimensionMismatch(f"selfdual needs even ambient dimension, got {n}")


def haar_group(rng: np.random.Generator, n: int, structure: str) -> np.ndarray:
    """Haar-distributed element of the structure group (as an n x n complex/real array).

    Orthogonal for ``real``, unitary for ``complex``, symplectic unitary for
    ``selfdual`` (n is the ambient dimension), each from the QR factorization
    of a Gaussian matrix with positive diagonal in ``R``.
    """
    _check(n, structure)
    if structure == "real":
        Q, R = np.linalg.qr(rng.standard_normal((n, n)))
        return Q * np.sign(np.diag(R))
    if structure == "complex":
        Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        Q, R = np.linalg.qr(Z)
        d = np.diag(R)
        return Q * (d / np.abs(d))
    Q, _ = quaternion_qr(QuaternionMatrix(rng.standard_normal((n // 2, n // 2, 4))))
    return Q.to_complex()


def gaussian_hermitian(rng: np.random.Generator, n: int, structure: str) -> np.ndarray:
    """GOE / GUE / GSE-like draw, unnormalized."""
    _check(n, structure)
    if structure == "real":
        G = rng.standard_normal((n, n))
        return (G + G.T) / 2
    if structure == "complex":
        G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        return (G + G.conj().T) / 2
    Q = QuaternionMatrix(rng.standard_normal((n // 2, n // 2, 4)))
    X = Q.to_complex()
    return (X + X.conj().T) / 2


def normalized_hermitian(rng: np.random.Generator, n: int, structure: str, scale: float = 1.0):
    H = gaussian_hermitian(rng, n, structure)
    nrm = operator_norm(H)
    return H * (scale / nrm) if nrm > 0 else H


def _real_diagonal(rng, n: int, structure: str) -> np.ndarray:
    if structure == "selfdual":
        d = rng.uniform(-1.0, 1.0, n // 2)
        return np.concatenate([d, d])
    return rng.uniform(-1.0, 1.0, n)


def _to_unit_ball(H: np.ndarray) -> np.ndarray:
    nrm = operator_norm(H)
    return H / nrm if nrm > 1.0 else H


def _clean(H: np.ndarray, structure: str) -> np.ndarray:
    H = (H + H.conj().T) / 2
    if structure == "real":
        return H.real.copy()
    if structure == "selfdual":
        return project_real_dual(H).to_complex()
    return H


def random_structured_pair(
    seed: int,
    n: int,
    structure: str = "real",
    delta: float = 0.0,
    mode: str = "perturbed-commuting",
) -> tuple[StructuredMatrix, StructuredMatrix]:
    """Self-adjoint, self-tau pair with ``||A||, ||B|| <= 1``.

    ``perturbed-commuting``: conjugate two real diagonals in [-1, 1] by a Haar
    structure-group element and add independent ensemble noise of operator
    norm ``delta`` to each.  ``independent``: two normalized ensemble draws.
    ``n`` is the ambient (complex) dimension.
    """
    _check(n, structure)
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    rng = np.random.default_rng(seed)
    tau = reflection_for(structure)
    if mode == "perturbed-commuting":
        U = haar_group(rng, n, structure)
        d1 = _real_diagonal(rng, n, structure)
        d2 = _real_diagonal(rng, n, structure)
        A = (U * d1) @ U.conj().T
        B = (U * d2) @ U.conj().T
        if delta > 0:
            A = A + normalized_hermitian(rng, n, structure, delta)
            B = B + normalized_hermitian(rng, n, structure, delta)
    elif mode == "independent":
        A = normalized_hermitian(rng, n, structure)
        B = normalized_hermitian(rng, n, structure)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    A = _to_unit_ball(_clean(A, structure))
    B = _to_unit_ball(_clean(B, structure))
    return StructuredMatrix(A, tau), StructuredMatrix(B, tau)


# -- generators used by tests and the acceptance suite ------------------------


def random_generalized_reflection(rng: np.random.Generator, n: int, sign: int) -> Reflection:
    """``S = W K W^T`` for Haar unitary ``W`` and ``K`` = I or J."""
    W = haar_group(rng, n, "complex")
    K = np.eye(n) if sign == 1 else symplectic_form(n // 2)
    return Reflection.generalized(W @ K @ W.T)


def _canonical(rng, n: int, tau: Optional[Reflection]):
    if tau is None:
        return np.eye(n), None
    return tau.canonical_frame(n)


def random_self_tau(rng: np.random.Generator, n: int, tau: Optional[Reflection]) -> np.ndarray:
    """Generic (non-normal) self-tau matrix with Gaussian entries."""
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    if tau is None:
        return G
    return 0.5 * (G + tau.apply(G))


def random_normal_self_tau(
    rng: np.random.Generator, n: int, tau: Optional[Reflection]
) -> np.ndarray:
    """Normal self-tau matrix with eigenvalues in the unit disk."""
    W, base = _canonical(rng, n, tau)
    if base is None:
        V = haar_group(rng, n, "complex")
        lam = rng.uniform(0, 1, n) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
    elif base.kind == "transpose":
        V = haar_group(rng, n, "real")
        lam = rng.uniform(0, 1, n) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
    else:
        V = haar_group(rng, n, "selfdual")
        half = rng.uniform(0, 1, n // 2) * np.exp(2j * np.pi * rng.uniform(0, 1, n // 2))
        lam = np.concatenate([half, half])
    V = W @ V
    return (V * lam) @ V.conj().T


def random_hermitian_self_tau(
    rng: np.random.Generator, n: int, tau: Optional[Reflection]
) -> np.ndarray:
    W, base = _canonical(rng, n, tau)
    structure = structure_of(base)
    H = gaussian_hermitian(rng, n, structure)
    return W @ H @ W.conj().T
