"""Batch invariants over knot tables: records, fingerprints, pair finding
and an on-disk cache of reduced unified complexes."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .complex import (CONVENTION_VERSION, UnifiedComplex, complex_from_json, complex_to_json,
                      unified_complex)
from .diagram import DiagramError, LinkDiagram, parse_pd
from .homalg import Group, HomologyTable
from .operations import Engine, RankTable, beta_rank_from_torsion, parse_word, uct_mod2_dims

DEFAULT_CROSSING_LIMIT = 14
DEFAULT_OPS = ("beta", "beta^2", "phi_eo", "phi_oe", "theta_e", "theta_o")
CACHE_ENV = "KHOPS_CACHE_DIR"

log = logging.getLogger(__name__)


class CensusError(ValueError):
    pass


class ConventionMismatch(CensusError):
    pass


class CacheCorrupt(CensusError):
    pass


# --- records -------------------------------------------------------------------

def table_to_json(t: HomologyTable) -> dict:
    return {f"{i},{q}": [g.rank, list(g.torsion)] for (i, q), g in sorted(t.groups.items())}


def table_from_json(ring: str, data: dict) -> HomologyTable:
    groups = {}
    for k, (rank, tors) in data.items():
        i, q = k.split(",")
        groups[(int(i), int(q))] = Group(rank, tuple(tors))
    return HomologyTable(ring, groups)


def ranks_to_json(r: RankTable) -> dict:
    return {"degree": r.degree, "ranks": {f"{i},{q}": v for (i, q), v in sorted(r.ranks.items())}}


def ranks_from_json(word: str, data: dict) -> RankTable:
    ranks = {}
    for k, v in data["ranks"].items():
        i, q = k.split(",")
        ranks[(int(i), int(q))] = v
    return RankTable(word, data["degree"], ranks)


@dataclass
class InvariantRecord:
    name: str
    pd_hash: str
    crossings: int
    reduced: bool
    variant: str
    even: HomologyTable
    odd: HomologyTable
    ranks: dict = field(default_factory=dict)     # word -> RankTable
    convention: str = CONVENTION_VERSION

    @property
    def fingerprint(self) -> str:
        return fingerprint(self.even, self.odd)

    def to_json(self) -> dict:
        return {
            "name": self.name, "pd_hash": self.pd_hash, "crossings": self.crossings,
            "reduced": self.reduced, "variant": self.variant, "convention": self.convention,
            "even": table_to_json(self.even), "odd": table_to_json(self.odd),
            "ranks": {w: ranks_to_json(r) for w, r in self.ranks.items()},
        }

    @classmethod
    def from_json(cls, data: dict) -> "InvariantRecord":
        return cls(data["name"], data["pd_hash"], data["crossings"], data["reduced"],
                   data["variant"], table_from_json("Z-even", data["even"]),
                   table_from_json("Z-odd", data["odd"]),
                   {w: ranks_from_json(w, r) for w, r in data["ranks"].items()},
                   data.get("convention", CONVENTION_VERSION))


def fingerprint(even: HomologyTable, odd: HomologyTable) -> str:
    """Hash of the even and odd homology tables (pairs must agree here)."""
    blob = json.dumps([table_to_json(even), table_to_json(odd)], sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def pd_hash(d: LinkDiagram) -> str:
    blob = f"{d.to_pd()}|bp={d.basepoint}"
    return hashlib.sha256(blob.encode()).hexdigest()


# --- cache ------------------------------------------------------------------------

def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "khops"


class ComplexCache:
    """Content-addressed store of reduced unified complexes.

    Keys combine the PD code, basepoint, reduced flag, sign variant and the
    convention version; entries are written atomically and carry a checksum.
    """

    def __init__(self, root: str | Path | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()

    def key(self, d: LinkDiagram, reduced: bool, variant: str) -> str:
        blob = f"{CONVENTION_VERSION}|{pd_hash(d)}|reduced={reduced}|variant={variant}"
        return hashlib.sha256(blob.encode()).hexdigest()

    def path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, d: LinkDiagram, reduced: bool, variant: str) -> UnifiedComplex | None:
        p = self.path(self.key(d, reduced, variant))
        if not p.exists():
            return None
        try:
            data = json.loads(p.read_text())
            body = data["complex"]
            check = hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()
        except (ValueError, KeyError) as exc:
            raise CacheCorrupt(f"unreadable cache entry {p}: {exc}") from exc
        if check != data.get("checksum"):
            raise CacheCorrupt(f"checksum mismatch in {p}")
        return complex_from_json(body)

    def put(self, d: LinkDiagram, reduced: bool, variant: str, cx: UnifiedComplex) -> Path:
        p = self.path(self.key(d, reduced, variant))
        p.parent.mkdir(parents=True, exist_ok=True)
        body = complex_to_json(cx)
        data = {"complex": body,
                "checksum": hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()}
        fd, tmp = tempfile.mkstemp(dir=p.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(data, fh)
            os.replace(tmp, p)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return p

    def entries(self) -> list[Path]:
        if not self.root.exists():
            return []
        return sorted(self.root.glob("*/*.json"))

    def clear(self) -> int:
        n = 0
        for p in self.entries():
            p.unlink()
            n += 1
        return n


def cached_complex(d: LinkDiagram, reduced: bool = False, variant: str = "X",
                   cache: ComplexCache | None = None,
                   crossing_limit: int | None = None) -> UnifiedComplex:
    if reduced and d.basepoint is None:
        d = d.with_basepoint(d.default_basepoint())
    if cache is not None:
        try:
            cx = cache.get(d, reduced, variant)
        except CacheCorrupt as exc:
            log.warning("%s; recomputing", exc)
            cx = None
        if cx is not None:
            return cx
    cx = unified_complex(d, reduced=reduced, variant=variant, crossing_limit=crossing_limit)
    if cache is not None:
        cache.put(d, reduced, variant, cx)
    return cx


# --- tables and records --------------------------------------------------------------

@dataclass
class TableLineError:
    line: int
    text: str
    message: str


def load_table(path: str | Path) -> tuple[list[LinkDiagram], list[TableLineError]]:
    """Read ``name: PD`` lines (``#`` comments); bad lines are reported, not
    fatal."""
    diagrams, errors = [], []
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            diagrams.append(parse_pd(text))
        except DiagramError as exc:
            errors.append(TableLineError(n, raw, str(exc)))
    return diagrams, errors


def compute_record(d: LinkDiagram, ops=DEFAULT_OPS, reduced: bool = False, variant: str = "X",
                   cache: ComplexCache | None = None,
                   crossing_limit: int = DEFAULT_CROSSING_LIMIT) -> InvariantRecord:
    if d.n_crossings > crossing_limit:
        raise CensusError(f"{d.name or 'diagram'} has {d.n_crossings} crossings "
                          f"(limit {crossing_limit})")
    for w in ops:
        parse_word(w)
    cx = cached_complex(d, reduced, variant, cache, crossing_limit=max(crossing_limit, 16))
    eng = Engine(cx)
    check_consistency(eng, d.name)
    ranks = {w: eng.rank_table(w) for w in ops}
    return InvariantRecord(d.name, pd_hash(d), d.n_crossings, reduced, variant,
                           eng.homology("even"), eng.homology("odd"), ranks)


def check_consistency(eng: Engine, name: str = "") -> None:
    """Universal coefficients and rank-vs-torsion for the Bocksteins; a
    record failing these never enters a comparison."""
    mod2 = eng.homology("mod2").poincare()
    for theory, word in (("even", "beta_e"), ("odd", "beta_o")):
        table = eng.homology(theory)
        if uct_mod2_dims(table) != mod2:
            raise CensusError(f"{name}: {theory} homology violates universal coefficients")
        rt = eng.rank_table(word)
        for bg in set(rt.ranks) | {(i - 1, q) for (i, q) in table.bigradings()}:
            if rt[bg] != beta_rank_from_torsion(table, (bg[0] + 1, bg[1])):
                raise CensusError(f"{name}: {word} rank at {bg} disagrees with torsion")


def _worker(args):
    text, basepoint, ops, reduced, variant, cache_root, limit = args
    cache = ComplexCache(cache_root) if cache_root is not None else None
    d = parse_pd(text).with_basepoint(basepoint)
    return compute_record(d, ops, reduced, variant, cache, limit).to_json()


def run_census(diagrams, ops=DEFAULT_OPS, reduced: bool = False, variant: str = "X",
               cache: ComplexCache | None = None, workers: int = 1,
               crossing_limit: int = DEFAULT_CROSSING_LIMIT) -> list[InvariantRecord]:
    """Records for every diagram, in input order."""
    jobs = [(f"{d.name}: {d.to_pd()}" if d.name else d.to_pd(), d.basepoint, tuple(ops), reduced, variant,
             str(cache.root) if cache else None, crossing_limit) for d in diagrams]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            out = list(pool.map(_worker, jobs))
    else:
        out = [_worker(j) for j in jobs]
    return [InvariantRecord.from_json(r) for r in out]


# --- pairs -------------------------------------------------------------------------

@dataclass
class PairReport:
    first: str
    second: str
    fingerprint: str
    distinguished_by: list
    differences: dict          # word -> [(bigrading, rank first, rank second)]

    @property
    def distinguished(self) -> bool:
        return bool(self.distinguished_by)

    def summary(self) -> str:
        if not self.distinguished_by:
            return f"{self.first} / {self.second}: homologies equal; no operation differs"
        return (f"{self.first} / {self.second}: homologies equal; "
                f"{', '.join(self.distinguished_by)} rank tables differ")


def compare_records(a: InvariantRecord, b: InvariantRecord, ops=None) -> PairReport:
    if (a.convention, a.variant, a.reduced) != (b.convention, b.variant, b.reduced):
        raise ConventionMismatch(f"{a.name} and {b.name} were computed with different settings")
    words = ops or [w for w in a.ranks if w in b.ranks]
    diffs = {}
    for w in words:
        ra, rb = a.ranks.get(w), b.ranks.get(w)
        if ra is None or rb is None:
            raise CensusError(f"operation {w!r} missing from a record")
        if ra != rb:
            keys = sorted(set(ra.ranks) | set(rb.ranks))
            diffs[w] = [(k, ra[k], rb[k]) for k in keys if ra[k] != rb[k]]
    return PairReport(a.name, b.name, a.fingerprint if a.fingerprint == b.fingerprint else "",
                      list(diffs), diffs)


def find_pairs(records, ops=None, only_distinguished: bool = True) -> list[PairReport]:
    """Pairs with equal even and odd homology, compared by operation ranks."""
    groups: dict = {}
    for r in records:
        groups.setdefault(r.fingerprint, []).append(r)
    out = []
    for fp in sorted(groups):
        rs = groups[fp]
        for x in range(len(rs)):
            for y in range(x + 1, len(rs)):
                rep = compare_records(rs[x], rs[y], ops)
                if rep.distinguished or not only_distinguished:
                    out.append(rep)
    return out


def write_records(records, path: str | Path) -> None:
    with open(path, "w") as fh:
        for r in records:
            fh.write(json.dumps(r.to_json(), sort_keys=True) + "\n")


def read_records(path: str | Path) -> list[InvariantRecord]:
    return [InvariantRecord.from_json(json.loads(line))
            for line in Path(path).read_text().splitlines() if line.strip()]
