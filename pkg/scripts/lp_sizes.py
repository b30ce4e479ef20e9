"""LP model sizes for the first four putative tiles, beside the reference sizes.

With --solve the models are written to MPS and handed to HiGHS (if the
highspy package is installed) to report feasibility of the relaxation.
"""

import argparse
import os
import tempfile
import time

from f2tiling.ideal import table1_region
from f2tiling.lpmodel import LpBuildOptions, build_primal, export_lp, model_stats

# k -> (rows, variables, nonzeros) as reported for the commercial solver runs
REFERENCE = {
    6: (33569, 33414, 99465),
    7: (74349, 74710, 221693),
    8: (140312, 142632, 419864),
    9: (321016, 327828, 961832),
}


def solve_with_highs(model):
    import highspy

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "model.mps")
        with open(path, "w") as fh:
            fh.write(export_lp(model, "mps"))
        h = highspy.Highs()
        h.silent()
        h.readModel(path)
        h.run()
        return h.modelStatusToString(h.getModelStatus())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, nargs="*", default=sorted(REFERENCE))
    ap.add_argument("--solve", action="store_true")
    ap.add_argument("--full-rank", action="store_true")
    args = ap.parse_args(argv)
    print(f"{'k':>3} {'n':>3} {'rows':>8} {'ref':>8} {'vars':>8} {'ref':>8} {'nnz':>8} {'ref':>8}  orient  build  status")
    for k in args.k:
        V = table1_region(k)
        t0 = time.perf_counter()
        model = build_primal(V, LpBuildOptions(full_rank=args.full_rank))
        built = time.perf_counter() - t0
        rows, nvars, nnz = model_stats(model)
        ref = REFERENCE.get(k, (0, 0, 0))
        status = solve_with_highs(model) if args.solve else "-"
        print(f"{k:>3} {V.n:>3} {rows:>8} {ref[0]:>8} {nvars:>8} {ref[1]:>8} {nnz:>8} {ref[2]:>8}"
              f"  {model.orientation:>6} {built:5.1f}s  {status}")


if __name__ == "__main__":
    main()
