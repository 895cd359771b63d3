"""Structure-preserving joint diagonalization of almost-commuting pairs.

The solver runs cyclic Jacobi sweeps in the arithmetic that matches the
structure of the pair: real for the transpose (real symmetric input), complex
for no reflection, and quaternion for the dual operation (self-dual input is
extracted to M_n(H), solved there and re-embedded).  A general reflection
``A -> S A^T S^*`` is first conjugated onto the transpose or the dual one.
Because ``A'`` and ``B'`` are conjugates of real diagonals by the same
structure-group element they commute exactly, whatever the convergence
quality.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import NotSelfAdjoint, StructureMismatch, TooFarFromGroup
from .quaternion import QuaternionMatrix, extract_quaternion, project_real_dual, qconj, qmul, quaternion_qr
from .reflections import (
    STRUCT_TOL,
    Reflection,
    StructuredMatrix,
    commutator_norm,
    operator_norm,
    require_self_tau,
)

ORTHOGONAL = "orthogonal"
UNITARY = "unitary"
SYMPLECTIC = "symplectic"


# -- scalar algebras -----------------------------------------------------------


class _Real:
    name = "real"
    dim = 1
    dtype = float

    def comps(self, x):
        return np.atleast_1d(np.real(x))

    def scalar(self, y: np.ndarray) -> float:
        return float(y[0])

    def conj(self, s):
        return s

    def lmul(self, s, X):
        return s * X

    def rmul(self, X, s):
        return X * s

    def diag(self, X):
        return np.diagonal(X).copy()

    def sq(self, X):
        return X * X

    def herm_norm(self, X):
        return float(np.max(np.abs(np.linalg.eigvalsh(X)), initial=0.0))

    def identity(self, n):
        return np.eye(n)

    def H(self, X):
        return X.T

    def matmul(self, X, Y):
        return X @ Y


class _Complex(_Real):
    name = "complex"
    dim = 2
    dtype = complex

    def comps(self, x):
        return np.array([x.real, x.imag])

    def scalar(self, y):
        return complex(y[0], y[1])

    def conj(self, s):
        return np.conj(s)

    def diag(self, X):
        return np.diagonal(X).real.copy()

    def sq(self, X):
        return (X * X.conj()).real

    def H(self, X):
        return X.conj().T

    def identity(self, n):
        return np.eye(n, dtype=complex)


class _Quaternion(_Real):
    name = "quaternion"
    dim = 4

    def comps(self, x):
        return np.asarray(x, float)

    def scalar(self, y):
        return np.asarray(y, float)

    def conj(self, s):
        return qconj(s)

    def lmul(self, s, X):
        if np.ndim(s) == 0:
            return s * X
        return qmul(np.broadcast_to(s, X.shape), X)

    def rmul(self, X, s):
        if np.ndim(s) == 0:
            return X * s
        return qmul(X, np.broadcast_to(s, X.shape))

    def diag(self, X):
        n = X.shape[0]
        return X[np.arange(n), np.arange(n), 0].copy()

    def sq(self, X):
        return np.sum(X * X, axis=-1)

    def herm_norm(self, X):
        return float(np.max(np.abs(np.linalg.eigvalsh(QuaternionMatrix(X).to_complex()))))

    def identity(self, n):
        return QuaternionMatrix.identity(n).data

    def H(self, X):
        return qconj(X).transpose(1, 0, 2)

    def matmul(self, X, Y):
        return (QuaternionMatrix(X) @ QuaternionMatrix(Y)).data


REAL, COMPLEX, QUATERNION = _Real(), _Complex(), _Quaternion()


def _algebra_of(X: np.ndarray):
    if X.ndim == 3:
        return QUATERNION
    return COMPLEX if np.iscomplexobj(X) else REAL


def off_energy(X: np.ndarray, alg=None) -> float:
    """Off-diagonal Frobenius energy ``sum_{i != j} |x_ij|^2``."""
    alg = alg or _algebra_of(X)
    sq = alg.sq(X)
    # summed directly: subtracting the diagonal from the total loses the
    # small off-diagonal energy of nearly diagonal input to cancellation
    return float(sq[~np.eye(sq.shape[0], dtype=bool)].sum())


# -- Givens-type rotations -----------------------------------------------------


@dataclass(frozen=True)
class Rotation:
    """Unitary on coordinates (i, j): ``[[c, -conj(s)], [s, c]]``."""

    i: int
    j: int
    c: float
    s: object
    gain: float = 0.0  # predicted drop in joint off-diagonal energy

    @property
    def is_identity(self) -> bool:
        return self.c == 1.0 and not np.any(self.s)


def rotation_solve(mats: Sequence, i: int, j: int, algebra=None) -> Rotation:
    """Rotation on (i, j) maximizing the drop of joint off-diagonal energy.

    For Hermitian ``a`` over R, C or H the 2x2 block is described by
    ``g = (a_ii - a_jj, 2 a_ij)`` (the off-diagonal entry split into its real
    components); the rotation acts on the unit sphere of these vectors and the
    new diagonal gap is ``v . g``.  Maximizing ``sum_k (v . g_k)^2`` picks the
    dominant eigenvector ``v = (x, y)`` of ``G = sum_k g_k g_k^T`` and then
    ``c = sqrt((1 + x) / 2)``, ``s = conj(y) / (2c)``.
    """
    mats = [m.data if isinstance(m, QuaternionMatrix) else np.asarray(m) for m in mats]
    alg = algebra or _algebra_of(mats[0])
    rows = []
    for a in mats:
        d = float(np.real(alg.diag(a)[i] - alg.diag(a)[j]))
        rows.append(np.concatenate([[d], 2.0 * alg.comps(a[i, j])]))
    g = np.array(rows)
    G = g.T @ g
    if not np.any(G[1:]):
        return Rotation(i, j, 1.0, alg.scalar(np.zeros(alg.dim)))
    w, V = np.linalg.eigh(G)
    v = V[:, -1]
    if v[0] < 0:
        v = -v
    x = min(float(v[0]), 1.0)
    c = np.sqrt((1.0 + x) / 2.0)
    s = alg.conj(alg.scalar(v[1:] / (2.0 * c)))
    gain = 0.5 * (w[-1] - G[0, 0])
    return Rotation(i, j, float(c), s, float(gain))


def apply_rotation(X: np.ndarray, rot: Rotation, alg, cols_only: bool = False) -> None:
    """In place ``X <- R^* X R`` (or ``X <- X R`` with ``cols_only``)."""
    i, j, c, s = rot.i, rot.j, rot.c, rot.s
    sb = alg.conj(s)
    Xi = X[:, i].copy()
    Xj = X[:, j].copy()
    X[:, i] = c * Xi + alg.rmul(Xj, s)
    X[:, j] = alg.rmul(Xi, -sb) + c * Xj
    if cols_only:
        return
    Ri = X[i].copy()
    Rj = X[j].copy()
    X[i] = c * Ri + alg.lmul(sb, Rj)
    X[j] = alg.lmul(-s, Ri) + c * Rj


# -- structure group -----------------------------------------------------------


def group_of(tau: Optional[Reflection]) -> str:
    if tau is None or tau.kind == "generalized":
        return UNITARY
    return ORTHOGONAL if tau.kind == "transpose" else SYMPLECTIC


def _polar(U: np.ndarray) -> np.ndarray:
    W, _, Vh = np.linalg.svd(U)
    return W @ Vh


def project_to_group(U, group: str, max_dev: float = 1e-3) -> np.ndarray:
    """Nearest element of the structure group (polar factor).

    The symplectic case projects onto the embedded quaternion matrices before
    and after taking the polar factor, so the result satisfies
    ``U^T J U = J`` to working precision.
    """
    U = np.asarray(U)
    if group == ORTHOGONAL:
        P = _polar(np.real(U))
    elif group == UNITARY:
        P = _polar(U.astype(complex))
    elif group == SYMPLECTIC:
        Q = project_real_dual(U).to_complex()
        P = project_real_dual(_polar(Q)).to_complex()
    else:
        raise ValueError(f"unknown group {group!r}")
    dev = operator_norm(U - P)
    if dev > max_dev:
        raise TooFarFromGroup(f"distance to {group} group is {dev:.3e}")
    return P


def group_defect(U: np.ndarray, group: str) -> float:
    n = U.shape[0]
    dev = operator_norm(U.conj().T @ U - np.eye(n))
    if group == ORTHOGONAL:
        dev = max(dev, float(np.max(np.abs(np.imag(U)), initial=0.0)))
    elif group == SYMPLECTIC:
        J = Reflection.dual().form(n)
        dev = max(dev, operator_norm(U.T @ J @ U - J))
    return dev


# -- solver --------------------------------------------------------------------


@dataclass(frozen=True)
class SolverOptions:
    max_sweeps: int = 100
    rel_tol: float = 1e-12
    # extra sweeps minimizing ||A - A'|| + ||B - B'|| directly over single-matrix rotations
    polish: bool = True
    polish_sweeps: int = 3
    # start from the eigenbasis of A + INIT_MIX * B; this makes the result
    # independent of the basis the pair is given in ("identity" disables it)
    init: str = "eig"


@dataclass
class JointDiagResult:
    U: np.ndarray
    A_prime: StructuredMatrix
    B_prime: StructuredMatrix
    sweeps: int
    off_energy: float
    dist_A: float
    dist_B: float
    comm_before: float
    comm_after: float
    group: str
    energy_history: list = field(default_factory=list)
    polish_steps: int = 0
    diag_residue: float = 0.0
    runtime_ms: float = 0.0

    @property
    def eps_pair(self) -> float:
        return self.dist_A + self.dist_B

    def checks(self, tol: float = 1e-12) -> dict:
        """Recompute the result invariants from the stored matrices."""
        Ap, Bp = self.A_prime.mat, self.B_prime.mat
        scale = max(operator_norm(Ap), operator_norm(Bp), 1.0)
        tau = self.A_prime.tau
        hist = np.asarray(self.energy_history)
        slack = 1e-14 * (hist[0] if hist.size else 0.0)
        out = {
            "commute": commutator_norm(Ap, Bp) <= 1e-10 * scale,
            "self_adjoint": all(operator_norm(M - M.conj().T) <= tol * scale for M in (Ap, Bp)),
            "self_tau": tau is None
            or all(operator_norm(M - tau.apply(M)) <= tol * scale for M in (Ap, Bp)),
            "group": group_defect(self.U, self.group) <= 1e-11,
            "monotone": bool(np.all(np.diff(hist) <= slack)) if hist.size > 1 else True,
        }
        return out


def _check_pair(A: StructuredMatrix, B: StructuredMatrix) -> None:
    if A.n != B.n:
        raise StructureMismatch(f"dimensions differ: {A.n} vs {B.n}")
    ta, tb = A.tau, B.tau
    same = (ta is None and tb is None) or (
        ta is not None
        and tb is not None
        and ta.kind == tb.kind
        and (ta.kind != "generalized" or np.array_equal(ta.S, tb.S))
    )
    if not same:
        raise StructureMismatch(f"reflections differ: {ta!r} vs {tb!r}")
    for name, M in (("A", A), ("B", B)):
        dev = operator_norm(M.mat - M.mat.conj().T)
        if dev > STRUCT_TOL:
            raise NotSelfAdjoint(f"{name} is not self-adjoint: ||{name} - {name}*|| = {dev:.3e}")
        require_self_tau(M, what=name)


def _to_working(M: np.ndarray, tau: Optional[Reflection]):
    if tau is None:
        return 0.5 * (M + M.conj().T).astype(complex), COMPLEX
    if tau.kind == "transpose":
        R = np.real(M)
        return 0.5 * (R + R.T), REAL
    Q = extract_quaternion(0.5 * (M + M.conj().T), tol=1e-8)
    return 0.5 * (Q.data + QUATERNION.H(Q.data)), QUATERNION


def _to_ambient(X: np.ndarray, alg) -> np.ndarray:
    if alg is QUATERNION:
        return QuaternionMatrix(X).to_complex()
    return X


INIT_MIX = (np.sqrt(5.0) - 1.0) / 2.0


def _eig_frame(M: np.ndarray, alg) -> np.ndarray:
    """Eigenbasis of a Hermitian matrix as a structure-group element of the algebra."""
    if alg is not QUATERNION:
        return np.linalg.eigh(M)[1]
    n = M.shape[0]
    _, V = np.linalg.eigh(QuaternionMatrix(M).to_complex())
    # one vector per Kramers pair; [x; y] is the first column of the embedded
    # quaternion column with alpha = x, beta = -conj(y)
    x, y = V[:n, 0::2], V[n:, 0::2]
    Q = np.stack([x.real, x.imag, -y.real, y.imag], axis=-1)
    return quaternion_qr(QuaternionMatrix(Q))[0].data


def _initial_frame(mats: list, alg, opts: SolverOptions):
    n = mats[0].shape[0]
    if opts.init == "identity":
        return None
    if opts.init != "eig":
        raise ValueError(f"unknown init {opts.init!r}")
    total = sum(float(alg.sq(M).sum()) for M in mats)
    if sum(off_energy(M, alg) for M in mats) <= opts.rel_tol * total:
        return None
    U0 = _eig_frame(mats[0] + INIT_MIX * mats[1], alg)
    if alg is not QUATERNION and n:
        # fix the column signs / phases so the frame does not depend on LAPACK's choice
        k = np.argmax(np.abs(U0), axis=0)
        ph = U0[k, np.arange(n)]
        U0 = U0 * (np.abs(ph) / ph)
    return U0


def _jacobi(mats: list, alg, opts: SolverOptions):
    n = mats[0].shape[0]
    U = alg.identity(n)
    U0 = _initial_frame(mats, alg, opts)
    if U0 is not None:
        U = U0.astype(U.dtype) if alg is not QUATERNION else U0
        for k, M in enumerate(mats):
            T = alg.matmul(alg.matmul(alg.H(U), M), U)
            mats[k][...] = 0.5 * (T + alg.H(T))
    total = sum(float(alg.sq(M).sum()) for M in mats)
    energy = sum(off_energy(M, alg) for M in mats)
    history = [energy]
    sweeps = 0
    for _ in range(opts.max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                rot = rotation_solve(mats, i, j, alg)
                if rot.is_identity or rot.gain <= 1e-18 * total:
                    continue
                for M in mats:
                    apply_rotation(M, rot, alg)
                apply_rotation(U, rot, alg, cols_only=True)
                rotated = True
        if not rotated:
            break
        sweeps += 1
        new = sum(off_energy(M, alg) for M in mats)
        history.append(new)
        if energy - new < opts.rel_tol * total:
            energy = new
            break
        energy = new
    return U, sweeps, history


def _residual_sum(mats: list, alg) -> float:
    tot = 0.0
    for M in mats:
        R = M.copy()
        n = R.shape[0]
        R[np.arange(n), np.arange(n)] = 0.0
        tot += alg.herm_norm(R)
    return tot


def _polish(mats: list, U: np.ndarray, alg, opts: SolverOptions) -> int:
    # coordinate descent on the true objective: for every pair, try the rotations
    # that diagonalize the (i, j) block of one matrix alone
    n = mats[0].shape[0]
    current = _residual_sum(mats, alg)
    steps = 0
    for _ in range(opts.polish_sweeps):
        improved = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                best, best_rot = current, None
                for k in range(len(mats)):
                    rot = rotation_solve([mats[k]], i, j, alg)
                    if rot.is_identity:
                        continue
                    trial = [M.copy() for M in mats]
                    for T in trial:
                        apply_rotation(T, rot, alg)
                    val = _residual_sum(trial, alg)
                    if val < best - 1e-15 * (1.0 + best):
                        best, best_rot = val, rot
                if best_rot is not None:
                    for M in mats:
                        apply_rotation(M, best_rot, alg)
                    apply_rotation(U, best_rot, alg, cols_only=True)
                    current = best
                    steps += 1
                    improved = True
        if not improved:
            break
    return steps


def _commit(M: np.ndarray, U: np.ndarray, alg, group: str):
    """``U diag(real diag of U^* M U) U^*`` in ambient coordinates, plus the imaginary residue."""
    T = alg.matmul(alg.matmul(alg.H(U), M), U)
    n = T.shape[0]
    if alg is QUATERNION:
        d = T[np.arange(n), np.arange(n), 0]
        residue = float(np.max(np.abs(T[np.arange(n), np.arange(n), 1:]), initial=0.0))
        Uc = QuaternionMatrix(U).to_complex()
        dd = np.concatenate([d, d])
    else:
        dd = np.real(np.diagonal(T))
        residue = float(np.max(np.abs(np.imag(np.diagonal(T))), initial=0.0))
        Uc = U
    Mp = (Uc * dd) @ Uc.conj().T
    Mp = 0.5 * (Mp + Mp.conj().T)
    if group == ORTHOGONAL:
        Mp = np.real(Mp)
    elif group == SYMPLECTIC:
        Mp = project_real_dual(Mp).to_complex()
    return Mp, residue


def joint_diag(
    A: StructuredMatrix, B: StructuredMatrix, opts: Optional[SolverOptions] = None
) -> JointDiagResult:
    """Commuting self-adjoint self-tau pair near ``(A, B)`` by Jacobi sweeps."""
    opts = opts or SolverOptions()
    t0 = time.perf_counter()
    _check_pair(A, B)
    tau = A.tau
    group = group_of(tau)
    if tau is not None and tau.kind == "generalized":
        W, base = tau.canonical_frame(A.n)
        Wh = W.conj().T
        inner = joint_diag(
            StructuredMatrix(_hermitize(Wh @ A.mat @ W), base),
            StructuredMatrix(_hermitize(Wh @ B.mat @ W), base),
            opts,
        )
        Ap = _hermitize(W @ inner.A_prime.mat @ Wh)
        Bp = _hermitize(W @ inner.B_prime.mat @ Wh)
        U = project_to_group(W @ inner.U, UNITARY)
        return JointDiagResult(
            U=U,
            A_prime=StructuredMatrix(Ap, tau),
            B_prime=StructuredMatrix(Bp, tau),
            sweeps=inner.sweeps,
            off_energy=inner.off_energy,
            dist_A=operator_norm(A.mat - Ap),
            dist_B=operator_norm(B.mat - Bp),
            comm_before=commutator_norm(A.mat, B.mat),
            comm_after=commutator_norm(Ap, Bp),
            group=group,
            energy_history=inner.energy_history,
            polish_steps=inner.polish_steps,
            diag_residue=inner.diag_residue,
            runtime_ms=1e3 * (time.perf_counter() - t0),
        )

    Xa, alg = _to_working(A.mat, tau)
    Xb, _ = _to_working(B.mat, tau)
    orig = [Xa.copy(), Xb.copy()]
    mats = [Xa, Xb]
    U, sweeps, history = _jacobi(mats, alg, opts)
    polish_steps = _polish(mats, U, alg, opts) if opts.polish else 0
    final_energy = sum(off_energy(M, alg) for M in mats)

    Uc = project_to_group(_to_ambient(U, alg), group)
    if alg is QUATERNION:
        Uw = project_real_dual(Uc).data
    else:
        Uw = np.real(Uc) if alg is REAL else Uc
    Ap, ra = _commit(orig[0], Uw, alg, group)
    Bp, rb = _commit(orig[1], Uw, alg, group)
    return JointDiagResult(
        U=Uc,
        A_prime=StructuredMatrix(Ap, tau),
        B_prime=StructuredMatrix(Bp, tau),
        sweeps=sweeps,
        off_energy=final_energy,
        dist_A=operator_norm(A.mat - Ap),
        dist_B=operator_norm(B.mat - Bp),
        comm_before=commutator_norm(A.mat, B.mat),
        comm_after=commutator_norm(Ap, Bp),
        group=group,
        energy_history=history,
        polish_steps=polish_steps,
        diag_residue=max(ra, rb),
        runtime_ms=1e3 * (time.perf_counter() - t0),
    )


def _hermitize(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.conj().T)


def pair_correct(
    A: StructuredMatrix, B: StructuredMatrix, opts: Optional[SolverOptions] = None
) -> JointDiagResult:
    """Nearby commuting pair, reporting ``eps_pair = ||A - A'|| + ||B - B'||``.

    Inputs are scaled jointly into the unit ball before solving and the
    output is scaled back.
    """
    _check_pair(A, B)
    scale = max(1.0, operator_norm(A.mat), operator_norm(B.mat))
    if scale == 1.0:
        return joint_diag(A, B, opts)
    res = joint_diag(A.with_mat(A.mat / scale), B.with_mat(B.mat / scale), opts)
    Ap = A.with_mat(res.A_prime.mat * scale)
    Bp = B.with_mat(res.B_prime.mat * scale)
    res.A_prime, res.B_prime = Ap, Bp
    res.dist_A = operator_norm(A.mat - Ap.mat)
    res.dist_B = operator_norm(B.mat - Bp.mat)
    res.comm_before = commutator_norm(A.mat, B.mat)
    res.comm_after = commutator_norm(Ap.mat, Bp.mat)
    return res


@dataclass
class NormalCorrection:
    X_prime: StructuredMatrix
    distance: float
    normality_before: float
    normality_after: float
    joint: JointDiagResult


def normal_correct(X, opts: Optional[SolverOptions] = None) -> NormalCorrection:
    """Nearby normal self-tau matrix.

    With ``A = X + X^*`` and ``B = -i (X - X^*)`` (so ``X = (A + iB)/2``) the
    pair is corrected by :func:`joint_diag` and ``X' = (A' + i B') / 2``.
    Note ``||[X, X^*]|| = ||[A, B]|| / 2``.
    """
    if not isinstance(X, StructuredMatrix):
        X = StructuredMatrix(X)
    require_self_tau(X, what="X")
    M = X.mat.astype(complex)
    A = _hermitize(M + M.conj().T)
    B = _hermitize(-1j * (M - M.conj().T))
    if X.tau is not None and X.tau.kind == "transpose":
        A, B = A.real, B.real
    res = joint_diag(StructuredMatrix(A, X.tau), StructuredMatrix(B, X.tau), opts)
    Xp = 0.5 * (res.A_prime.mat + 1j * res.B_prime.mat)
    return NormalCorrection(
        X_prime=StructuredMatrix(Xp, X.tau),
        distance=operator_norm(M - Xp),
        normality_before=commutator_norm(M, M.conj().T),
        normality_after=commutator_norm(Xp, Xp.conj().T),
        joint=res,
    )
