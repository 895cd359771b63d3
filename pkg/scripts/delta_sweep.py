"""delta -> eps sweep: how far the corrected pair moves as the commutator grows.

    python3 scripts/delta_sweep.py --structure real,selfdual --n 8 --trials 30
"""
import argparse

import numpy as np

from acp.harness import ExperimentConfig, run_experiment, summarize, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--structure", default="real,complex,selfdual")
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--deltas", default="1e-4,3e-4,1e-3,3e-3,1e-2,3e-2,1e-1")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()

    cfg = ExperimentConfig(
        structures=tuple(args.structure.split(",")),
        dims=(args.n,),
        deltas=tuple(float(d) for d in args.deltas.split(",")),
        trials=args.trials,
        base_seed=args.seed,
    )
    recs = run_experiment(cfg)
    if args.csv:
        write_csv(recs, args.csv)
    s = summarize(recs)
    print(f"{'structure':<9} {'delta':>8} {'median eps':>12} {'eps/delta':>10} {'median [A,B]':>13}")
    for c in s.cells:
        comm = np.median([r.comm_before for r in recs
                          if r.structure == c["structure"] and r.delta == c["delta"] and r.ok])
        print(f"{c['structure']:<9} {c['delta']:>8.0e} {c['median']:>12.4e} {c['median'] / c['delta']:>10.3f} {comm:>13.4e}")
    for key, flag in s.monotone.items():
        print(f"monotone {key}: {flag}")


if __name__ == "__main__":
    main()
