"""Acceptance criteria 1-11, each at its stated tolerance.

Every test records a single PASS/FAIL line (printed in the pytest terminal
summary) and then asserts.
"""
import json
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from acp import cli
from acp.ensembles import (
    random_generalized_reflection,
    random_hermitian_self_tau,
    random_normal_self_tau,
    random_self_tau,
    random_structured_pair,
)
from acp.harness import ExperimentConfig, run_experiment, summarize
from acp.jacobi import joint_diag
from acp.oracle import brute_force_2x2
from acp.quaternion import QuaternionMatrix, embed_quaternion, extract_quaternion, random_quaternion_matrix
from acp.reflections import Reflection, StructuredMatrix, operator_norm
from acp.spectral import MAX_RETRACT_DISPLACEMENT, GridSpec, fun_calc, grid_project_matrix, grid_retract_point, self_tau_polar
from conftest import ACCEPTANCE_LINES

FIXTURES = sorted((Path(cli.__file__).parent / "fixtures").glob("*.json"))


def record(k, ok, detail):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}")
    print(ACCEPTANCE_LINES[-1])
    assert ok, detail


def gaussian(rng, n):
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2 * n)


def multiset_gap(x, y):
    r, c = linear_sum_assignment(np.abs(x[:, None] - y[None, :]))
    return float(np.max(np.abs(x[r] - y[c])))


def test_criterion_01_reflection_axioms():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    n = 6
    kinds = [("transpose", Reflection.transpose()), ("dual", Reflection.dual())]
    kinds += [(f"gen{k}", random_generalized_reflection(rng, n, (+1, -1)[k % 2])) for k in range(5)]
    worst = dict(invol=0.0, antimul=0.0, star=0.0, iso=0.0, spectrum=0.0)
    for _, tau in kinds:
        for _ in range(1000):
            A, B = gaussian(rng, n), gaussian(rng, n)
            At = tau.apply(A)
            worst["invol"] = max(worst["invol"], operator_norm(tau.apply(At) - A))
            AB = A @ B
            worst["antimul"] = max(worst["antimul"], operator_norm(tau.apply(AB) - tau.apply(B) @ At) / operator_norm(AB))
            worst["star"] = max(worst["star"], operator_norm(tau.apply(A.conj().T) - At.conj().T))
            nA = operator_norm(A)
            worst["iso"] = max(worst["iso"], abs(operator_norm(At) - nA) / nA)
            worst["spectrum"] = max(worst["spectrum"], multiset_gap(np.linalg.eigvals(A), np.linalg.eigvals(At)))
    elapsed = time.perf_counter() - t0
    ok = (worst["invol"] <= 1e-13 and worst["antimul"] <= 1e-12 and worst["star"] <= 1e-13
          and worst["iso"] <= 1e-12 and worst["spectrum"] <= 1e-8 and elapsed < 30)
    record(1, ok, "reflection axioms, 7 kinds x 1000 "
           + " ".join(f"{k}={v:.1e}" for k, v in worst.items()) + f" time={elapsed:.1f}s")


def test_criterion_02_quaternion_correspondence():
    rng = np.random.default_rng(102)
    rt = hom = kramers = 0.0
    for _ in range(200):
        P, Q = random_quaternion_matrix(rng, 4), random_quaternion_matrix(rng, 4)
        eP, eQ = embed_quaternion(P).mat, embed_quaternion(Q).mat
        rt = max(rt, float(np.max(np.abs(extract_quaternion(eP).data - P.data))))
        for lhs, rhs in (
            (embed_quaternion(P @ Q).mat, eP @ eQ),
            (embed_quaternion(P + Q).mat, eP + eQ),
            (embed_quaternion(P.H).mat, eP.conj().T),
        ):
            hom = max(hom, operator_norm(lhs - rhs) / max(1.0, operator_norm(rhs)))
        w = np.linalg.eigvalsh(embed_quaternion(P + P.H).mat)
        kramers = max(kramers, float(np.max(np.abs(w[0::2] - w[1::2]))))
    ok = rt <= 1e-14 and hom <= 1e-12 and kramers <= 1e-8
    record(2, ok, f"quaternion embedding round-trip={rt:.1e} hom={hom:.1e} kramers={kramers:.1e}")


def _poly(rng):
    deg = int(rng.integers(0, 6))
    return rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)


def test_criterion_03_functional_calculus():
    rng = np.random.default_rng(103)
    taus = [Reflection.transpose(), Reflection.dual(),
            random_generalized_reflection(rng, 6, 1), random_generalized_reflection(rng, 6, -1)]
    worst = 0.0
    for k in range(100):
        tau = taus[k % 4]
        A = random_normal_self_tau(rng, 6, tau)
        lam = np.linalg.eigvals(A)
        for _ in range(10):
            c = _poly(rng)
            f = lambda z, c=c: np.polyval(c, z)
            sup = float(np.max(np.abs(f(lam))))
            gap = operator_norm(tau.apply(fun_calc(A, f)) - fun_calc(tau.apply(A), f))
            worst = max(worst, gap / max(sup, 1e-300))
    record(3, worst <= 1e-9, f"f(A)^tau vs f(A^tau), 100 matrices x 10 polynomials, worst/sup|f| = {worst:.1e}")


def test_criterion_04_polar():
    rng = np.random.default_rng(104)
    worst = dict(recomp=0.0, unitary=0.0, selftau=0.0)
    for n in (2, 4, 8, 16):
        taus = {"transpose": Reflection.transpose(), "dual": Reflection.dual(), "none": None,
                "gen+": random_generalized_reflection(rng, n, 1), "gen-": random_generalized_reflection(rng, n, -1)}
        for tau in taus.values():
            for _ in range(200):
                a = random_self_tau(rng, n, tau)
                u, p = self_tau_polar(StructuredMatrix(a, tau))
                worst["recomp"] = max(worst["recomp"], operator_norm(u @ p - a) / operator_norm(a))
                worst["unitary"] = max(worst["unitary"], operator_norm(u.conj().T @ u - np.eye(n)))
                if tau is not None:
                    worst["selftau"] = max(worst["selftau"], operator_norm(tau.apply(u) - u))
    ok = worst["recomp"] <= 1e-10 and worst["unitary"] <= 1e-11 and worst["selftau"] <= 1e-10
    record(4, ok, "self-tau polar, 5 reflections x 4 sizes x 200 "
           + " ".join(f"{k}={v:.1e}" for k, v in worst.items()))


def test_criterion_05_grid():
    rng = np.random.default_rng(105)
    taus = [Reflection.transpose(), Reflection.dual(), random_generalized_reflection(rng, 6, 1)]
    on_grid = dist = 0.0
    for eps in (0.1, 0.25):
        g = GridSpec(eps)
        for k in range(100):
            tau = taus[k % 3]
            X = StructuredMatrix(random_normal_self_tau(rng, 6, tau), tau)
            Y = grid_project_matrix(X, g)
            on_grid = max(on_grid, float(np.max(g.line_distance(np.linalg.eigvals(Y.mat)))) / eps)
            dist = max(dist, operator_norm(X.mat - Y.mat) / eps)
    g = GridSpec(1.0)
    pts = rng.uniform(-5, 5, 100_000) + 1j * rng.uniform(-5, 5, 100_000)
    disp = max(abs(grid_retract_point(z, g) - z) for z in pts)
    ok = on_grid <= 1e-9 and dist <= 1.0 and disp <= MAX_RETRACT_DISPLACEMENT * (1 + 1e-12)
    record(5, ok, f"grid projection dist-to-grid/eps={on_grid:.1e} ||X-Y||/eps={dist:.3f} "
           f"max point displacement={disp:.4f} (bound {MAX_RETRACT_DISPLACEMENT:.4f})")


def test_criterion_06_solver_soundness():
    rng = np.random.default_rng(106)
    failures, count = [], 0
    for structure in ("real", "complex", "selfdual"):
        for n in (2, 4, 8):
            for seed in range(10):
                for delta in (0.0, 1e-3, 1e-1):
                    A, B = random_structured_pair(seed, n, structure, delta)
                    res = joint_diag(A, B)
                    count += 1
                    flags = res.checks()
                    if not all(flags.values()) or res.comm_after > 1e-10:
                        failures.append((structure, n, seed, delta, flags))
    for sign in (1, -1):
        tau = random_generalized_reflection(rng, 6, sign)
        for _ in range(10):
            A = StructuredMatrix(random_hermitian_self_tau(rng, 6, tau), tau)
            B = StructuredMatrix(random_hermitian_self_tau(rng, 6, tau), tau)
            res = joint_diag(A, B)
            count += 1
            if not all(res.checks().values()):
                failures.append(("generalized", sign))
    record(6, not failures, f"joint_diag soundness (commute, structure, group, monotone) on {count} pairs, "
           f"{len(failures)} failures")


def test_criterion_07_recovery():
    t0 = time.perf_counter()
    delta = 1e-3
    cfg = ExperimentConfig(structures=("real", "complex", "selfdual"), dims=(4, 8, 16), deltas=(delta,),
                           trials=100, base_seed=7)
    recs = run_experiment(cfg)
    elapsed = time.perf_counter() - t0
    fracs = {}
    for r in recs:
        fracs.setdefault((r.structure, r.n), []).append(r.ok and r.eps_pair <= 10 * delta)
    fracs = {k: float(np.mean(v)) for k, v in fracs.items()}
    worst = min(fracs.values())
    ok = worst >= 0.95 and elapsed < 300
    record(7, ok, f"recovery eps_pair <= 10 delta, worst cell fraction {worst:.2f} over {len(fracs)} cells "
           f"x 100 trials, time={elapsed:.0f}s")


def test_criterion_08_oracle_dominance():
    rng = np.random.default_rng(108)
    T = Reflection.transpose()
    worst = -np.inf
    for _ in range(100):
        G, H = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
        A, B = G + G.T, H + H.T
        res = joint_diag(StructuredMatrix(A, T), StructuredMatrix(B, T))
        worst = max(worst, res.eps_pair - brute_force_2x2(A, B).distance)
    record(8, worst <= 1e-6, f"n=2 solver minus brute-force distance, worst over 100 pairs = {worst:.1e}")


def test_criterion_09_dimension_stability():
    cfg = ExperimentConfig(structures=("real", "complex", "selfdual"), dims=(4, 8, 16, 32), deltas=(1e-2,),
                           trials=20, base_seed=9)
    s = summarize(run_experiment(cfg))
    ratios = {k[0]: v for k, v in s.stability.items()}
    ok = all(v <= 3 for v in ratios.values())
    record(9, ok, "median eps_pair max/min across n in {4,8,16,32}, delta=1e-2: "
           + " ".join(f"{k}={v:.2f}" for k, v in ratios.items()))


def test_criterion_10_reproducibility(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"structures": ["real", "complex", "selfdual"], "dims": [4, 6],
                               "deltas": [1e-3, 1e-2], "trials": 4, "base_seed": 2024}))
    outs = [tmp_path / "run1.csv", tmp_path / "run2.csv"]
    codes = [cli.main(["experiment", "--config", str(cfg), "--csv", str(p)]) for p in outs]
    same = outs[0].read_bytes() == outs[1].read_bytes()
    record(10, codes == [0, 0] and same, f"experiment CSV byte-identical across runs: {same}")


def test_criterion_11_end_to_end(tmp_path):
    results = {}
    for fx in FIXTURES:
        out = tmp_path / f"{fx.stem}.out.json"
        results[fx.stem] = (cli.main(["correct", str(fx), "-o", str(out)]), cli.main(["verify", str(out)]))
    ok = "selfdual_4" in results and all(v == (0, 0) for v in results.values())
    record(11, ok, "correct -> verify exit codes: " + " ".join(f"{k}={v[0]}/{v[1]}" for k, v in results.items()))
