"""Print the homology tables and Bockstein arrows for 8_19 and 10_124, and
optionally the reduced tables of T(4,5) (about a minute)."""

import argparse
import time
from pathlib import Path

from khops.cli import read_diagram, render_table
from khops.complex import unified_complex
from khops.diagram import torus_knot
from khops.operations import Engine

TABLE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "targets.pd"


def show(d, reduced=False):
    t0 = time.perf_counter()
    eng = Engine(unified_complex(d, reduced=reduced))
    prefix = "reduced " if reduced else ""
    for theory in ("even", "odd"):
        print(render_table(eng.homology(theory), f"{prefix}{theory} {d.name}").text(), end="\n\n")
    ranks = [eng.rank_table(w) for w in ("beta_e", "beta_o")]
    print(render_table(eng.homology("mod2"), f"{prefix}mod2 {d.name}", ranks).text())
    for w in ("beta_o beta_e", "beta_e beta_o", "beta^2", "beta^3"):
        arrows = eng.rank_table(w).arrows()
        print(f"{w}: " + (", ".join(f"{s} -> {t}" for s, t, _ in arrows) or "zero"))
    print(f"[{d.name}: {time.perf_counter() - t0:.1f}s]\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--table", default=str(TABLE))
    ap.add_argument("--t45", action="store_true", help="also compute reduced T(4,5)")
    args = ap.parse_args()
    for name in ("8_19", "10_124"):
        show(read_diagram(args.table, name))
    if args.t45:
        show(torus_knot(4, 5).with_name("T(4,5)"), reduced=True)


if __name__ == "__main__":
    main()
