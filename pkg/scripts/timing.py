"""Time each pipeline stage for one diagram and report peak memory."""

import argparse
import resource
import time
from pathlib import Path

from khops.cli import read_diagram
from khops.complex import build_unified, even_signs, odd_signs, reduce
from khops.cube import build_cube
from khops.diagram import torus_knot
from khops.operations import Engine

TABLE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "targets.pd"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("name", nargs="?", default="10_124",
                    help="knot in the table, or torus:P,Q")
    ap.add_argument("--table", default=str(TABLE))
    ap.add_argument("--reduced", action="store_true")
    ap.add_argument("--op", action="append")
    args = ap.parse_args()
    if args.name.startswith("torus:"):
        p, q = map(int, args.name[6:].split(","))
        d = torus_knot(p, q)
    else:
        d = read_diagram(args.table, args.name)
    if args.reduced:
        d = d.with_basepoint(d.default_basepoint())

    stages = []
    t = time.perf_counter()

    def lap(label):
        nonlocal t
        now = time.perf_counter()
        stages.append((label, now - t))
        t = now

    cube = build_cube(d, check=False)
    lap("cube")
    ev = even_signs(cube)
    od = odd_signs(cube)
    lap("signs")
    cx = build_unified(cube, ev, od, reduced=args.reduced, check=False)
    lap("assemble")
    red, _ = reduce(cx)
    lap("reduce")
    eng = Engine(red)
    for theory in ("even", "odd", "mod2"):
        eng.homology(theory)
    lap("homology")
    for w in args.op or ["beta", "phi_eo", "phi_oe", "theta_o"]:
        eng.rank_table(w)
    lap("operations")

    print(f"{d.name or args.name}: {d.n_crossings} crossings, {cube.generator_count()} generators, "
          f"{red.size()} after reduction")
    for label, dt in stages:
        print(f"  {label:<11}{dt:8.2f}s")
    print(f"  {'total':<11}{sum(dt for _, dt in stages):8.2f}s")
    peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024
    print(f"  peak RSS   {peak:8.0f} MB")


if __name__ == "__main__":
    main()
