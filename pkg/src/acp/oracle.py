"""Brute-force references for the solver.

Nothing here imports the solver or the spectral code: rotations are built as
dense matrices from their angles and energies are summed entry by entry, so
agreement with :mod:`acp.jacobi` is a genuine cross-check.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass
class OracleReport:
    best_value: float
    argument: np.ndarray
    grid_resolution: int
    refinement_iterations: int
    grid_value: float = math.inf


@dataclass
class BruteForcePair:
    distance: float
    A_prime: np.ndarray
    B_prime: np.ndarray
    report: OracleReport


def _sym2_norm(a: float, b: float, d: float) -> float:
    # operator norm of [[a, b], [b, d]] from its closed-form eigenvalues
    m = 0.5 * (a + d)
    r = math.hypot(0.5 * (a - d), b)
    return max(abs(m + r), abs(m - r))


def _rot(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def _pair_distance(A: np.ndarray, B: np.ndarray, theta: float) -> float:
    c, s = math.cos(theta), math.sin(theta)
    total = 0.0
    for M in (A, B):
        a, b, d = M[0, 0], M[0, 1], M[1, 1]
        # off-diagonal entry of R^T M R; the committed diagonal leaves only it
        off = (c * c - s * s) * b + c * s * (d - a)
        total += _sym2_norm(0.0, off, 0.0)
    return total


def _golden(f, lo: float, hi: float, tol: float) -> tuple[float, float, int]:
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    it = 0
    while hi - lo > tol:
        it += 1
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = f(x2)
    return (x1, f1, it) if f1 <= f2 else (x2, f2, it)


def brute_force_2x2(A, B, grid: int = 10_000, tol: float = 1e-10) -> BruteForcePair:
    """Minimize ``||A - A'|| + ||B - B'||`` over commuting real symmetric 2x2 pairs.

    The shared eigenbasis is the rotation by ``theta in [0, pi/2)``; for a fixed
    basis the best commuting pair keeps the diagonal in that frame.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != (2, 2) or B.shape != (2, 2):
        raise ValueError("brute_force_2x2 takes 2x2 matrices")
    thetas = np.arange(grid) * (0.5 * math.pi / grid)
    vals = np.array([_pair_distance(A, B, t) for t in thetas])
    k = int(np.argmin(vals))
    h = 0.5 * math.pi / grid
    f = lambda t: _pair_distance(A, B, t)
    t_ref, v_ref, iters = _golden(f, thetas[k] - h, thetas[k] + h, tol)
    if v_ref > vals[k]:
        t_ref, v_ref = float(thetas[k]), float(vals[k])
    R = _rot(t_ref)
    outs = []
    for M in (A, B):
        T = R.T @ M @ R
        outs.append(R @ np.diag(np.diag(T)) @ R.T)
    report = OracleReport(v_ref, np.array([t_ref]), grid, iters, float(vals[k]))
    return BruteForcePair(v_ref, outs[0], outs[1], report)


# -- rotation parameter search -------------------------------------------------


def _as_complex(M: np.ndarray) -> tuple[np.ndarray, bool]:
    M = np.asarray(M)
    if M.ndim == 3:
        n = M.shape[0]
        al = M[..., 0] + 1j * M[..., 1]
        be = M[..., 2] + 1j * M[..., 3]
        X = np.zeros((2 * n, 2 * n), dtype=complex)
        X[:n, :n] = al
        X[:n, n:] = be
        X[n:, :n] = -be.conj()
        X[n:, n:] = al.conj()
        return X, True
    return M.astype(complex), False


def _quat_unit(angles) -> np.ndarray:
    a, b, c = angles
    return np.array(
        [
            math.cos(a),
            math.sin(a) * math.cos(b),
            math.sin(a) * math.sin(b) * math.cos(c),
            math.sin(a) * math.sin(b) * math.sin(c),
        ]
    )


def _rotation_dense(n: int, i: int, j: int, c: float, s, quat: bool) -> np.ndarray:
    # R = I except R_ii = R_jj = c, R_ji = s, R_ij = -conj(s); quaternion s acts
    # through its 2x2 complex block
    if not quat:
        R = np.eye(n, dtype=complex)
        R[i, i] = R[j, j] = c
        R[j, i] = s
        R[i, j] = -np.conj(s)
        return R
    R = np.eye(2 * n, dtype=complex)

    def put(r, k, q):
        al, be = q[0] + 1j * q[1], q[2] + 1j * q[3]
        R[r, k] = al
        R[r, n + k] = be
        R[n + r, k] = -np.conj(be)
        R[n + r, n + k] = np.conj(al)

    put(i, i, np.array([c, 0, 0, 0]))
    put(j, j, np.array([c, 0, 0, 0]))
    put(j, i, s)
    put(i, j, -s * np.array([1, -1, -1, -1]))
    return R


def _off(X: np.ndarray, n: int, quat: bool) -> float:
    total = 0.0
    for r in range(n):
        for k in range(n):
            if r == k:
                continue
            if quat:
                blk = (X[r, k], X[r, n + k], X[n + r, k], X[n + r, n + k])
                total += 0.5 * sum(abs(x) ** 2 for x in blk)
            else:
                total += abs(X[r, k]) ** 2
    return total


def numeric_rotation_min(mats, i: int, j: int, algebra: str, grid: int = 24) -> OracleReport:
    """Minimize joint off-diagonal energy over rotations on (i, j).

    Parameters are an angle ``theta`` (``c = cos theta``) and a unit direction
    in the algebra (``s = sin theta * u``): one real parameter for R, two for
    C, four for H.  A coarse grid seeds Nelder-Mead refinements.
    """
    data = [_as_complex(M) for M in mats]
    quat = data[0][1]
    n = mats[0].shape[0]
    Xs = [X for X, _ in data]

    def params(p):
        if algebra == "real":
            return math.cos(p[0]), math.sin(p[0])
        if algebra == "complex":
            return math.cos(p[0]), math.sin(p[0]) * complex(math.cos(p[1]), math.sin(p[1]))
        return math.cos(p[0]), math.sin(p[0]) * _quat_unit(p[1:])

    def energy(p):
        c, s = params(p)
        R = _rotation_dense(n, i, j, c, s, quat)
        return sum(_off(R.conj().T @ X @ R, n, quat) for X in Xs)

    if algebra == "real":
        axes = [np.linspace(-math.pi / 2, math.pi / 2, 40 * grid + 1)]
    elif algebra == "complex":
        axes = [np.linspace(0, math.pi / 2, grid + 1), np.linspace(0, 2 * math.pi, 2 * grid, endpoint=False)]
    elif algebra == "quaternion":
        g = max(grid // 3, 6)
        axes = [
            np.linspace(0, math.pi / 2, g + 1),
            np.linspace(0, math.pi, g + 1),
            np.linspace(0, math.pi, g + 1),
            np.linspace(0, 2 * math.pi, 2 * g, endpoint=False),
        ]
    else:
        raise ValueError(f"unknown algebra {algebra!r}")
    pts = [np.array(p) for p in itertools.product(*axes)]
    vals = np.array([energy(p) for p in pts])
    order = np.argsort(vals)
    best_p, best_v = pts[order[0]], float(vals[order[0]])
    grid_v = best_v
    iters = 0
    for k in order[:5]:
        res = minimize(energy, pts[k], method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-16, "maxiter": 4000})
        iters += int(res.nit)
        if res.fun < best_v:
            best_p, best_v = res.x, float(res.fun)
    return OracleReport(best_v, np.asarray(best_p), len(pts), iters, grid_v)


def power_norm(A, iters: int = 500, seed: int = 0) -> float:
    """Operator norm estimate by power iteration on ``A^* A`` (a lower bound)."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[1]
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max(iters, 1)):
        w = A.conj().T @ (A @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        est = np.linalg.norm(A @ v)
    return float(est)
