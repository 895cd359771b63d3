"""Median eps_pair against n at a fixed delta.

The correction should not degrade with dimension; the printed ratio is
max/min of the per-n medians for each structure.

    python3 scripts/dimension_study.py --delta 1e-2 --dims 4,8,16,32
"""
import argparse
import time

from acp.harness import ExperimentConfig, run_experiment, summarize, write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--structure", default="real,complex,selfdual")
    ap.add_argument("--dims", default="4,8,16,32")
    ap.add_argument("--delta", type=float, default=1e-2)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=9)
    ap.add_argument("--csv", default=None)
    ap.add_argument("--gnuplot", default=None, help="also write a gnuplot script plotting the CSV")
    args = ap.parse_args()

    cfg = ExperimentConfig(
        structures=tuple(args.structure.split(",")),
        dims=tuple(int(n) for n in args.dims.split(",")),
        deltas=(args.delta,),
        trials=args.trials,
        base_seed=args.seed,
        timing=True,
    )
    t0 = time.perf_counter()
    recs = run_experiment(cfg)
    print(summarize(recs).format())
    print(f"{len(recs)} trials in {time.perf_counter() - t0:.1f}s")
    if args.csv:
        write_csv(recs, args.csv)
        if args.gnuplot:
            with open(args.gnuplot, "w") as fh:
                fh.write("set datafile separator ','\nset logscale x 2\nset xlabel 'n'\nset ylabel 'eps_pair'\n")
                fh.write(f"plot '{args.csv}' every ::1 using 2:8 with points title 'eps_pair'\n")


if __name__ == "__main__":
    main()
