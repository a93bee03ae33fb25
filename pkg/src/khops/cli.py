"""Command-line front end: homology, ops, compare, census, cache."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .census import (DEFAULT_CROSSING_LIMIT, DEFAULT_OPS, CensusError, ComplexCache, cached_complex,
                     compare_records, compute_record, find_pairs, load_table, write_records,
                     table_from_json, table_to_json, ranks_from_json, ranks_to_json)
from .complex import ComplexError
from .cube import CubeError
from .diagram import DiagramError, LinkDiagram, parse_pd
from .homalg import Group, HomologyTable, describe
from .operations import Engine, OperationError, parse_word

SCHEMA = "khops/1"
RINGS = {"even": "Z-even", "odd": "Z-odd", "mod2": "GF2"}

_SUP = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


# --- rendering -----------------------------------------------------------------

def cell_text(g: Group, ring: str) -> str:
    if g.is_zero():
        return ""
    if ring == "GF2":
        return "Z₂" + (str(g.rank).translate(_SUP) if g.rank > 1 else "")
    return describe(g)


@dataclass
class RenderedTable:
    """Grid of cell strings, q rows descending and i columns ascending."""
    title: str
    i_values: list
    q_values: list
    cells: dict
    arrows: list

    def text(self) -> str:
        head = [self.title] + [str(i) for i in self.i_values]
        rows = [[str(q)] + [self.cells.get((i, q), "") for i in self.i_values]
                for q in self.q_values]
        widths = [max(len(r[k]) for r in [head] + rows) for k in range(len(head))]
        sep = "+".join("-" * (w + 2) for w in widths)

        def line(r):
            return "|".join(" " + c.rjust(widths[k]) + " " for k, c in enumerate(r))
        out = [line(head), sep] + [line(r) for r in rows]
        for word, src, tgt, rank in self.arrows:
            out.append(f"{word}: {src} -> {tgt} rank {rank}")
        return "\n".join(out)


def render_table(table: HomologyTable, title: str = "", ranks: list | None = None) -> RenderedTable:
    bgs = table.bigradings()
    arrows = []
    for rt in ranks or []:
        for src, tgt, r in rt.arrows():
            arrows.append((rt.word, src, tgt, r))
    keys = bgs + [a[1] for a in arrows] + [a[2] for a in arrows]
    if keys:
        i_values = list(range(min(k[0] for k in keys), max(k[0] for k in keys) + 1))
        qs = sorted({k[1] for k in keys}, reverse=True)
        step = 2 if all((q - qs[0]) % 2 == 0 for q in qs) else 1
        q_values = list(range(qs[0], qs[-1] - 1, -step))
    else:
        i_values, q_values = [], []
    cells = {bg: cell_text(table[bg], table.ring) for bg in bgs}
    return RenderedTable(title or table.ring, i_values, q_values, cells, arrows)


def table_csv_rows(theory: str, table: HomologyTable) -> list:
    rows = []
    for (i, q), g in sorted(table.groups.items()):
        rows.append([theory, i, q, g.rank, ";".join(str(t) for t in g.torsion)])
    return rows


def structured(d: LinkDiagram, tables: dict, ops: dict, reduced: bool, variant: str,
               matrices: dict | None = None) -> dict:
    out = {
        "schema": SCHEMA,
        "knot": d.name,
        "pd": d.to_pd(),
        "basepoint": d.basepoint,
        "reduced": reduced,
        "variant": variant,
        "homology": {th: table_to_json(t) for th, t in tables.items()},
        "operations": {w: ranks_to_json(r) for w, r in ops.items()},
    }
    if matrices:
        out["matrices"] = matrices
    return out


def parse_structured(data: dict | str) -> tuple[dict, dict]:
    """Inverse of the structured output: (tables by theory, rank tables by word)."""
    if isinstance(data, str):
        data = json.loads(data)
    if data.get("schema") != SCHEMA:
        raise ValueError(f"unsupported schema {data.get('schema')!r}")
    tables = {th: table_from_json(RINGS[th], t) for th, t in data["homology"].items()}
    ops = {w: ranks_from_json(w, r) for w, r in data["operations"].items()}
    return tables, ops


# --- input -------------------------------------------------------------------------

def read_diagram(source: str, name: str | None = None, basepoint: int | None = None,
                 fallback: str = "inline") -> LinkDiagram:
    """A file with ``name: PD`` lines (first one, or the one named) or inline PD."""
    p = Path(source)
    if source and p.is_file():
        lines = [ln.split("#", 1)[0].strip() for ln in p.read_text().splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise DiagramError(f"{source} contains no PD code")
        diagrams = [parse_pd(ln) for ln in lines]
        if name:
            found = [d for d in diagrams if d.name == name]
            if not found:
                raise DiagramError(f"no diagram named {name!r} in {source}")
            d = found[0]
        else:
            d = diagrams[0]
        if not d.name:
            d = d.with_name(p.stem)
    else:
        d = parse_pd(source)
        if not d.name:
            d = d.with_name(fallback)
    if basepoint is not None:
        d = d.with_basepoint(basepoint)
    return d


def _cache(args) -> ComplexCache | None:
    if getattr(args, "no_cache", False):
        return None
    return ComplexCache(args.cache_dir) if getattr(args, "cache_dir", None) else ComplexCache()


def _engine(args, d: LinkDiagram) -> Engine:
    cx = cached_complex(d, args.reduced, args.variant, _cache(args), crossing_limit=args.crossing_limit)
    return Engine(cx)


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        Path(args.output).write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


# --- commands ----------------------------------------------------------------------

def cmd_homology(args) -> int:
    d = read_diagram(args.input, args.name, args.basepoint)
    eng = _engine(args, d)
    theories = ["even", "odd", "mod2"] if args.theory == "all" else [args.theory]
    tables = {th: eng.homology(th) for th in theories}
    if args.format == "json":
        text = json.dumps(structured(d, tables, {}, args.reduced, args.variant), indent=1, sort_keys=True)
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theory", "i", "q", "rank", "torsion"])
        for th, t in tables.items():
            w.writerows(table_csv_rows(th, t))
        text = buf.getvalue().rstrip("\n")
    else:
        prefix = "reduced " if args.reduced else ""
        text = "\n\n".join(render_table(t, f"{prefix}{th} {d.name}".strip()).text()
                           for th, t in tables.items())
    _emit(args, text)
    return 0


def cmd_ops(args) -> int:
    d = read_diagram(args.input, args.name, args.basepoint)
    eng = _engine(args, d)
    words = args.op or ["beta_e", "beta_o"]
    maps = {w: eng.word(w) for w in words}
    ranks = {w: m.rank_table() for w, m in maps.items()}
    if args.format == "json":
        mats = {w: {f"{i},{q}": blk for (i, q), blk in sorted(m.blocks.items())}
                for w, m in maps.items()}
        tables = {th: eng.homology(th) for th in ("even", "odd", "mod2")}
        text = json.dumps(structured(d, tables, ranks, args.reduced, args.variant, mats),
                          indent=1, sort_keys=True)
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["operation", "i", "q", "target_i", "target_q", "rank"])
        for word, rt in ranks.items():
            for src, tgt, r in rt.arrows():
                w.writerow([word, src[0], src[1], tgt[0], tgt[1], r])
        text = buf.getvalue().rstrip("\n")
    else:
        base = {"mod2": "mod2", "even": "even", "odd": "odd"}[maps[words[0]].source]
        title = ("reduced " if args.reduced else "") + f"{base} {d.name}".strip()
        text = render_table(eng.homology(base), title, list(ranks.values())).text()
        for w in words:
            if not ranks[w].ranks:
                text += f"\n{w}: zero"
    _emit(args, text)
    return 0


def cmd_compare(args) -> int:
    d1 = read_diagram(args.first, fallback="first")
    d2 = read_diagram(args.second, fallback="second")
    ops = args.op or list(DEFAULT_OPS)
    cache = _cache(args)
    r1 = compute_record(d1, ops, args.reduced, args.variant, cache, args.crossing_limit)
    r2 = compute_record(d2, ops, args.reduced, args.variant, cache, args.crossing_limit)
    if r1.fingerprint != r2.fingerprint:
        which = [t for t, a, b in (("even", r1.even, r2.even), ("odd", r1.odd, r2.odd)) if a != b]
        print(f"{d1.name} / {d2.name}: homologies differ ({', '.join(which)})")
        return 0
    rep = compare_records(r1, r2, ops)
    if not rep.distinguished:
        print(f"{d1.name} / {d2.name}: identical fingerprints; no operation rank differs")
        return 0
    print(rep.summary())
    for w, diffs in rep.differences.items():
        for bg, a, b in diffs:
            print(f"  {w} at {bg}: {a} vs {b}")
    return 0


def cmd_census(args) -> int:
    from .census import run_census
    diagrams, errors = load_table(args.table)
    for e in errors:
        print(f"{args.table}:{e.line}: {e.message}", file=sys.stderr)
    keep = []
    for d in diagrams:
        if d.n_crossings > args.crossing_limit:
            print(f"skipping {d.name}: {d.n_crossings} crossings exceeds limit "
                  f"{args.crossing_limit}", file=sys.stderr)
        else:
            keep.append(d)
    ops = args.op or list(DEFAULT_OPS)
    records = run_census(keep, ops, args.reduced, args.variant, _cache(args), args.workers,
                         args.crossing_limit)
    if args.records:
        write_records(records, args.records)
    pairs = find_pairs(records, ops)
    print(f"{len(records)} knots, {len(pairs)} distinguished pairs")
    for p in pairs:
        print(p.summary())
    return 0


def cmd_cache(args) -> int:
    cache = ComplexCache(args.cache_dir) if args.cache_dir else ComplexCache()
    if args.action == "path":
        print(cache.root)
    elif args.action == "list":
        for p in cache.entries():
            print(p)
    elif args.action == "info":
        entries = cache.entries()
        size = sum(p.stat().st_size for p in entries)
        print(f"{cache.root}: {len(entries)} entries, {size} bytes")
    elif args.action == "clear":
        print(f"removed {cache.clear()} entries")
    return 0


# --- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="khops", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, single=True, limit=16):
        if single:
            p.add_argument("--name", help="pick a named diagram from a multi-line file")
            p.add_argument("--basepoint", type=int, help="arc label of the basepoint (reduced theory)")
            p.add_argument("--format", choices=["ascii", "csv", "json"], default="ascii")
            p.add_argument("-o", "--output", help="write to a file instead of stdout")
        p.add_argument("--reduced", action="store_true")
        p.add_argument("--variant", choices=["X", "Y"], default="X",
                       help="which ladybug type counts as commuting in the odd sign solve")
        p.add_argument("--crossing-limit", type=int, default=limit)
        p.add_argument("--no-cache", action="store_true")
        p.add_argument("--cache-dir")

    p = sub.add_parser("homology", help="homology tables of one diagram")
    p.add_argument("input", help="PD file or inline PD code")
    p.add_argument("--theory", choices=["even", "odd", "mod2", "all"], default="all")
    common(p)
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("ops", help="rank tables of homological operations")
    p.add_argument("input")
    p.add_argument("--op", action="append", help="operation word, e.g. 'beta_e beta_o' (repeatable)")
    common(p)
    p.set_defaults(func=cmd_ops)

    p = sub.add_parser("compare", help="compare two diagrams")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--op", action="append")
    common(p, single=False)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("census", help="invariants and distinguished pairs for a table file")
    p.add_argument("table")
    p.add_argument("--op", action="append")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--records", help="write one JSON record per knot to this file")
    common(p, single=False, limit=DEFAULT_CROSSING_LIMIT)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("cache", help="inspect or clear the complex cache")
    p.add_argument("action", choices=["path", "list", "info", "clear"])
    p.add_argument("--cache-dir")
    p.set_defaults(func=cmd_cache)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for w in getattr(args, "op", None) or []:
        try:
            parse_word(w)
        except OperationError as exc:
            parser.error(str(exc))
    try:
        return args.func(args)
    except (DiagramError, CubeError, ComplexError, CensusError, OperationError, OSError) as exc:
        print(f"khops: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
