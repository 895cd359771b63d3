"""Command line interface: ``acp correct | verify | experiment | demo``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .ensembles import random_structured_pair
from .errors import ACPError
from .harness import ExperimentConfig, run_experiment, summarize, write_csv
from .io import DocumentError, PairDocument, dump_document, load_document, matrix_from_json, matrix_to_json
from .jacobi import SolverOptions, group_defect, group_of, pair_correct
from .quaternion import extract_quaternion
from .reflections import Reflection, commutator_norm, operator_norm

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3

VERIFY_STRUCT_TOL = 1e-10
VERIFY_COMM_TOL = 1e-10


def cmd_correct(args) -> int:
    try:
        doc = load_document(args.input)
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    opts = SolverOptions(max_sweeps=args.max_sweeps, rel_tol=args.tol)
    A, B = doc.structured()
    try:
        res = pair_correct(A, B, opts)
    except ACPError as exc:
        print(f"solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    out = PairDocument(doc.n, doc.structure, doc.A, doc.B, doc.S).to_json()
    out["A_prime"] = matrix_to_json(res.A_prime.mat)
    out["B_prime"] = matrix_to_json(res.B_prime.mat)
    out["U"] = matrix_to_json(res.U)
    out["diagnostics"] = {
        "group": res.group,
        "sweeps": res.sweeps,
        "polish_steps": res.polish_steps,
        "off_energy": res.off_energy,
        "dist_A": res.dist_A,
        "dist_B": res.dist_B,
        "eps_pair": res.eps_pair,
        "comm_before": res.comm_before,
        "comm_after": res.comm_after,
        "diag_residue": res.diag_residue,
    }
    text = dump_document(out, args.output)
    if args.output is None:
        sys.stdout.write(text)
    else:
        print(f"eps_pair = {res.eps_pair:.6e}  comm {res.comm_before:.3e} -> {res.comm_after:.3e}"
              f"  sweeps = {res.sweeps}", file=sys.stderr)
    return EXIT_OK


def verify_document(doc: PairDocument) -> list[tuple[str, bool, str]]:
    """Recompute every invariant from the raw matrices: ``(name, ok, detail)``."""
    checks = []
    tau = doc.tau
    extra = doc.extra or {}
    is_result = "A_prime" in extra
    for msg in doc.violations():
        checks.append((msg, False, "input structure"))
    if not doc.violations():
        checks.append(("input structure", True, doc.structure))

    def structure_checks(name, M):
        scale = max(1.0, operator_norm(M))
        dev = operator_norm(M - M.conj().T)
        checks.append((f"{name} self-adjoint", dev <= VERIFY_STRUCT_TOL * scale, f"{dev:.2e}"))
        if tau is not None:
            dev = operator_norm(M - tau.apply(M))
            checks.append((f"{name} self-tau", dev <= VERIFY_STRUCT_TOL * scale, f"{dev:.2e}"))
        if doc.structure == "real":
            dev = float(np.max(np.abs(M.imag), initial=0.0))
            checks.append((f"{name} real", dev <= VERIFY_STRUCT_TOL * scale, f"{dev:.2e}"))
        if doc.structure == "selfdual":
            dual = Reflection.dual()
            dev = operator_norm(dual.apply(M) - M.conj().T)
            checks.append((f"{name}^# = {name}*", dev <= VERIFY_STRUCT_TOL * scale, f"{dev:.2e}"))

    if not is_result:
        c = commutator_norm(doc.A, doc.B)
        scale = max(1.0, operator_norm(doc.A), operator_norm(doc.B))
        checks.append(("[A, B] = 0", c <= VERIFY_COMM_TOL * scale, f"{c:.2e}"))
        return checks

    try:
        Ap = matrix_from_json(extra["A_prime"], doc.n, "A_prime")
        Bp = matrix_from_json(extra["B_prime"], doc.n, "B_prime")
        U = matrix_from_json(extra["U"], doc.n, "U")
    except (KeyError, DocumentError) as exc:
        checks.append(("result fields", False, str(exc)))
        return checks
    structure_checks("A'", Ap)
    structure_checks("B'", Bp)
    scale = max(1.0, operator_norm(Ap), operator_norm(Bp))
    c = commutator_norm(Ap, Bp)
    checks.append(("[A', B'] = 0", c <= VERIFY_COMM_TOL * scale, f"{c:.2e}"))
    group = group_of(tau)
    dev = group_defect(U, group)
    checks.append((f"U in {group} group", dev <= 1e-10, f"{dev:.2e}"))
    for name, M in (("A'", Ap), ("B'", Bp)):
        D = U.conj().T @ M @ U
        off = operator_norm(D - np.diag(np.diag(D)))
        checks.append((f"U diagonalizes {name}", off <= 1e-9 * scale, f"{off:.2e}"))
    if doc.structure == "selfdual":
        try:
            extract_quaternion(Ap, tol=VERIFY_STRUCT_TOL)
            extract_quaternion(Bp, tol=VERIFY_STRUCT_TOL)
            checks.append(("quaternion extraction", True, ""))
        except ACPError as exc:
            checks.append(("quaternion extraction", False, str(exc)))
    diag = extra.get("diagnostics", {})
    for key, M, Mp in (("dist_A", doc.A, Ap), ("dist_B", doc.B, Bp)):
        d = operator_norm(M - Mp)
        if key in diag:
            ok = abs(d - float(diag[key])) <= 1e-9 * max(1.0, d)
            checks.append((f"{key} matches", ok, f"{d:.6e} vs {float(diag[key]):.6e}"))
    return checks


def cmd_verify(args) -> int:
    try:
        doc = load_document(args.input, validate=False)
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    checks = verify_document(doc)
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<28} {detail}")
    ok = all(flag for _, flag, _ in checks)
    print("all invariants hold" if ok else "invariant violations found")
    return EXIT_OK if ok else EXIT_FAIL


def _split(text, conv):
    return tuple(conv(x) for x in text.replace(",", " ").split())


def cmd_experiment(args) -> int:
    cfg_dict = {}
    if args.config:
        try:
            cfg_dict = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_INPUT
    flags = {
        "structures": _split(args.structure, str) if args.structure else None,
        "dims": _split(args.dims, int) if args.dims else None,
        "deltas": _split(args.deltas, float) if args.deltas else None,
        "trials": args.trials,
        "base_seed": args.seed,
        "output": args.csv,
        "workers": args.workers,
        "timing": True if args.timing else None,
    }
    cfg_dict.update({k: v for k, v in flags.items() if v is not None})
    try:
        cfg = ExperimentConfig.from_dict(cfg_dict)
    except (TypeError, ValueError) as exc:
        print(f"error: invalid experiment config: {exc}", file=sys.stderr)
        return EXIT_INPUT
    records = run_experiment(cfg)
    if cfg.output is None:
        from .harness import records_to_csv

        sys.stdout.write(records_to_csv(records))
    failed = sum(not r.ok for r in records)
    try:
        print(summarize(records).format(), file=sys.stderr)
    except ACPError:
        pass
    if failed:
        print(f"{failed} of {len(records)} trials failed", file=sys.stderr)
    return EXIT_OK


def demo_document() -> PairDocument:
    A, B = random_structured_pair(7, 4, "selfdual", 5e-2)
    return PairDocument(4, "selfdual", A.mat, B.mat)


def cmd_demo(args) -> int:
    doc = demo_document()
    A, B = doc.structured()
    res = pair_correct(A, B)
    np.set_printoptions(precision=4, suppress=True, linewidth=120)
    print("Self-dual 4x4 pair (a 2x2 quaternion Hermitian pair embedded in M_4(C))")
    print("A =\n", A.mat)
    print("B =\n", B.mat)
    print(f"||[A, B]|| = {res.comm_before:.4e}")
    print("\nCommuting self-dual pair:")
    print("A' =\n", res.A_prime.mat)
    print("B' =\n", res.B_prime.mat)
    print(f"||[A', B']|| = {res.comm_after:.2e}")
    print(f"||A - A'|| = {res.dist_A:.4e}   ||B - B'|| = {res.dist_B:.4e}   eps_pair = {res.eps_pair:.4e}")
    dual = Reflection.dual()
    print(f"||A'^# - A'*|| = {operator_norm(dual.apply(res.A_prime.mat) - res.A_prime.mat.conj().T):.2e}")
    print("eigenvalues of A' (Kramers pairs):", np.round(np.linalg.eigvalsh(res.A_prime.mat), 6))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="acp", description="Nearby commuting pairs for almost-commuting structured matrices.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("correct", help="replace a pair by a nearby commuting pair")
    c.add_argument("input")
    c.add_argument("--tol", type=float, default=1e-12, help="relative sweep tolerance")
    c.add_argument("--max-sweeps", type=int, default=100)
    c.add_argument("--output", "-o", default=None)
    c.set_defaults(func=cmd_correct)

    v = sub.add_parser("verify", help="recheck the invariants of a pair or result document")
    v.add_argument("input")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("experiment", help="run a delta -> eps study and write CSV")
    e.add_argument("--config", default=None, help="JSON file with ExperimentConfig fields")
    e.add_argument("--structure", default=None, help="comma list of real,complex,selfdual")
    e.add_argument("--dims", default=None)
    e.add_argument("--deltas", default=None)
    e.add_argument("--trials", type=int, default=None)
    e.add_argument("--seed", type=int, default=None)
    e.add_argument("--csv", default=None)
    e.add_argument("--workers", type=int, default=None, help="default: $ACP_THREADS or all cores")
    e.add_argument("--timing", action="store_true", help="record runtime_ms (not reproducible)")
    e.set_defaults(func=cmd_experiment)

    d = sub.add_parser("demo", help="worked 4x4 self-dual example")
    d.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
