"""Compare knot pairs with equal even and odd homology by operation ranks,
and their mirror images."""

import argparse
import time
from pathlib import Path

from khops.census import ComplexCache, DEFAULT_OPS, compare_records, run_census
from khops.cli import read_diagram
from khops.diagram import mirror

TABLE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "targets.pd"
PAIRS = [("13n1002", "14n6487"), ("13n651", "14n16550"), ("14n1346", "14n7711"),
         ("14n5293", "14n12516")]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--table", default=str(TABLE))
    ap.add_argument("--pair", nargs=2, action="append", metavar=("A", "B"))
    ap.add_argument("--op", action="append")
    ap.add_argument("--workers", type=int, default=2)
    ap.add_argument("--no-mirrors", action="store_true")
    ap.add_argument("--no-cache", action="store_true")
    args = ap.parse_args()
    ops = args.op or list(DEFAULT_OPS)
    cache = None if args.no_cache else ComplexCache()
    for a, b in args.pair or PAIRS:
        t0 = time.perf_counter()
        da, db = read_diagram(args.table, a), read_diagram(args.table, b)
        jobs = [da, db]
        if not args.no_mirrors:
            jobs += [mirror(da).with_name(f"m{a}"), mirror(db).with_name(f"m{b}")]
        recs = run_census(jobs, ops, cache=cache, workers=args.workers)
        for x, y in zip(recs[::2], recs[1::2]):
            if x.fingerprint != y.fingerprint:
                print(f"{x.name} / {y.name}: homologies differ")
                continue
            rep = compare_records(x, y)
            print(rep.summary())
            for w, diffs in rep.differences.items():
                for bg, ra, rb in diffs:
                    print(f"  {w} at {bg}: {ra} vs {rb}")
        print(f"[{a} / {b}: {time.perf_counter() - t0:.1f}s]")


if __name__ == "__main__":
    main()
