"""Bockstein operations on mod-2 Khovanov homology and their integral lifts.

Everything is computed on one unified complex, where the even and odd
differentials live on the same basis:

    beta_e[x] = [d_e x / 2],   beta_o[x] = [d_o x / 2],   beta = beta_e + beta_o
    phi_eo[x] = [d_o x / 2] in Kh_o for an even cycle x
    phi_oe[x] = [d_e x / 2] in Kh_e for an odd cycle x
    theta_e = phi_oe phi_eo,   theta_o = phi_eo phi_oe

Operation words are read like composition: "beta_e beta_o" applies beta_o
first.  Every operation raises the homological degree by one per letter and
keeps q.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .complex import UnifiedComplex, ParityViolation
from .homalg import HomologyTable, Presentation, presentation, rank_f2

THEORIES = ("even", "odd", "mod2")

# letter -> (source theory, target theory)
LETTERS = {
    "beta_e": ("mod2", "mod2"),
    "beta_o": ("mod2", "mod2"),
    "beta": ("mod2", "mod2"),
    "phi_eo": ("even", "odd"),
    "phi_oe": ("odd", "even"),
    "theta_e": ("even", "even"),
    "theta_o": ("odd", "odd"),
}

ALIASES = {
    "βe": "beta_e", "βo": "beta_o", "β": "beta", "β_e": "beta_e", "β_o": "beta_o",
    "φ_eo": "phi_eo", "φ_oe": "phi_oe", "θ_e": "theta_e", "θ_o": "theta_o",
}


class OperationError(ValueError):
    pass


class UnknownOperation(OperationError):
    pass


class TypeMismatch(OperationError):
    pass


def parse_word(word: str) -> list[str]:
    """Split an operation word into letters (leftmost applied last).

    Accepts spaces or "*" between letters and powers such as ``beta^3``.
    """
    letters = []
    for tok in re.split(r"[\s*∘]+", word.strip()):
        if not tok:
            continue
        m = re.fullmatch(r"(.+?)(?:\^(\d+))?", tok)
        name, power = m.group(1), int(m.group(2) or 1)
        name = ALIASES.get(name, name)
        if name not in LETTERS:
            raise UnknownOperation(f"unknown operation {tok!r}")
        letters.extend([name] * power)
    if not letters:
        raise UnknownOperation("empty operation word")
    for left, right in zip(letters, letters[1:]):
        if LETTERS[right][1] != LETTERS[left][0]:
            raise TypeMismatch(f"cannot apply {left} after {right}")
    return letters


@dataclass
class OperationMap:
    """Matrices of an operation per source bigrading.

    ``blocks[(i, q)]`` has one column per homology generator at (i, q) and
    one row per generator at the target bigrading; entries are coordinates
    in the target presentation (mod 2 for mod-2 operations, reduced mod the
    generator orders for integral ones).
    """
    word: str
    source: str
    target: str
    degree: int
    blocks: dict = field(default_factory=dict)
    target_orders: dict = field(default_factory=dict)

    def target_of(self, bg) -> tuple:
        return (bg[0] + self.degree, bg[1])

    def rank(self, bg) -> int:
        m = self.blocks.get(tuple(bg))
        if not m:
            return 0
        if self.target == "mod2":
            return rank_f2(m)
        return rank_f2(_two_torsion_part(m, self.target_orders[self.target_of(bg)]))

    def rank_table(self) -> "RankTable":
        ranks = {}
        for bg in self.blocks:
            r = self.rank(bg)
            if r:
                ranks[bg] = r
        return RankTable(self.word, self.degree, ranks)

    def is_zero(self) -> bool:
        return not any(any(any(v for v in row) for row in m) for m in self.blocks.values())


def _two_torsion_part(m, orders) -> list:
    """Rows of an integral operation on even-order generators, as mod-2
    multiples of the order-2 element; any other nonzero coordinate means the
    image is not 2-torsion."""
    out = []
    for row, n in zip(m, orders):
        if n and n % 2 == 0:
            half = n // 2
            r = []
            for v in row:
                if v % half:
                    raise OperationError("image is not annihilated by 2")
                r.append((v // half) % 2)
            out.append(r)
        elif any(row):
            raise OperationError("image is not annihilated by 2")
    return out


@dataclass
class RankTable:
    word: str
    degree: int
    ranks: dict

    def __getitem__(self, bg) -> int:
        return self.ranks.get(tuple(bg), 0)

    def arrows(self) -> list:
        return [(bg, (bg[0] + self.degree, bg[1]), r) for bg, r in sorted(self.ranks.items())]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RankTable):
            return NotImplemented
        return self.degree == other.degree and self.ranks == other.ranks


class Engine:
    """Homology and operations of one unified complex (usually reduced).

    Presentations are computed lazily and cached per theory and bigrading.
    """

    def __init__(self, cx: UnifiedComplex):
        self.cx = cx
        self._spec = {}
        self._pres = {}
        self._ops = {}

    # -- homology
    def specialized(self, theory: str):
        if theory not in self._spec:
            self._spec[theory] = self.cx.specialize(theory)
        return self._spec[theory]

    def pres(self, theory: str, bg) -> Presentation:
        key = (theory, tuple(bg))
        if key not in self._pres:
            self._pres[key] = presentation(self.specialized(theory), tuple(bg))
        return self._pres[key]

    def bigradings(self) -> list:
        return self.cx.bigradings()

    def homology(self, theory: str) -> HomologyTable:
        if theory not in THEORIES:
            raise ValueError(f"unknown theory {theory!r}")
        groups = {}
        for bg in self.bigradings():
            g = self.pres(theory, bg).group
            if not g.is_zero():
                groups[bg] = g
        return HomologyTable({"even": "Z-even", "odd": "Z-odd", "mod2": "GF2"}[theory], groups)

    # -- chain level
    def _dense(self, bg, part):
        key = ("dense", tuple(bg), part)
        if key not in self._spec:
            self._spec[key] = self.cx.dense(bg, part)
        return self._spec[key]

    def half_boundary(self, part: str, bg, chain: list[int]) -> list[int]:
        """``d_part(chain) / 2`` for a chain at ``bg`` whose boundary is even."""
        m = self._dense(bg, part)
        out = []
        for row in m:
            v = sum(a * b for a, b in zip(row, chain) if a and b)
            if v % 2:
                raise ParityViolation("boundary is not divisible by 2")
            out.append(v // 2)
        return out

    def bockstein_chain(self, flavor: str, bg, x: list[int]) -> list[int]:
        """Mod-2 coordinates of ``beta_flavor [x]`` for a mod-2 cycle ``x``."""
        lift = [v % 2 for v in x]
        tgt = (bg[0] + 1, bg[1])
        if flavor == "beta":
            a = self.bockstein_chain("beta_e", bg, x)
            b = self.bockstein_chain("beta_o", bg, x)
            return [(u + v) % 2 for u, v in zip(a, b)]
        part = {"beta_e": "e", "beta_o": "o"}[flavor]
        y = self.half_boundary(part, bg, lift)
        return self.pres("mod2", tgt).coordinates([v % 2 for v in y])

    def lift_chain(self, direction: str, bg, x: list[int]) -> list[int]:
        """Coordinates of ``phi_direction [x]`` for an integral cycle ``x``."""
        src, tgt_theory = {"phi_eo": ("even", "odd"), "phi_oe": ("odd", "even")}[direction]
        part = "o" if direction == "phi_eo" else "e"
        y = self.half_boundary(part, bg, x)
        return self.pres(tgt_theory, (bg[0] + 1, bg[1])).coordinates(y)

    # -- operations
    def letter(self, name: str) -> OperationMap:
        if name in self._ops:
            return self._ops[name]
        src, tgt = LETTERS[name]
        if name in ("theta_e", "theta_o"):
            word = "phi_oe phi_eo" if name == "theta_e" else "phi_eo phi_oe"
            op = self.word(word)
            op.word = name
            self._ops[name] = op
            return op
        op = OperationMap(name, src, tgt, 1)
        for bg in self.bigradings():
            p = self.pres(src, bg)
            if not p.gens:
                continue
            tbg = (bg[0] + 1, bg[1])
            tp = self.pres(tgt, tbg) if self.cx.dim(tbg) else None
            if tp is None or not tp.gens:
                continue
            cols = []
            for g in p.gens:
                if src == "mod2":
                    cols.append(self.bockstein_chain(name, bg, g))
                else:
                    cols.append(self.lift_chain(name, bg, g))
            op.blocks[bg] = [list(r) for r in zip(*cols)]
            op.target_orders[tbg] = list(tp.orders)
        self._ops[name] = op
        return op

    def word(self, word: str) -> OperationMap:
        letters = parse_word(word)
        op = self.letter(letters[-1])
        for name in reversed(letters[:-1]):
            op = compose(self.letter(name), op, self)
        op.word = " ".join(letters)
        return op

    def rank_table(self, word: str) -> RankTable:
        return self.word(word).rank_table()

    def reduction(self, theory: str, bg) -> list:
        """Matrix of ``Kh_theory -> Kh_Z2`` (reduction of coefficients)."""
        p = self.pres(theory, bg)
        p2 = self.pres("mod2", bg)
        cols = [p2.coordinates([v % 2 for v in g]) for g in p.gens]
        return [list(r) for r in zip(*cols)] if cols else []


def compose(left: OperationMap, right: OperationMap, engine: Engine) -> OperationMap:
    """``left`` after ``right`` at the level of homology."""
    if right.target != left.source:
        raise TypeMismatch(f"{left.word} cannot follow {right.word}")
    out = OperationMap(f"{left.word} {right.word}", right.source, left.target,
                       left.degree + right.degree)
    mod2 = left.target == "mod2"
    for bg, m in right.blocks.items():
        mid = right.target_of(bg)
        lm = left.blocks.get(mid)
        if not lm:
            continue
        tbg = (mid[0] + left.degree, mid[1])
        orders = left.target_orders.get(tbg) or [0] * len(lm)
        prod = []
        for r, row in enumerate(lm):
            new = []
            for c in range(len(m[0])):
                v = sum(row[k] * m[k][c] for k in range(len(row)))
                if mod2:
                    v %= 2
                elif orders[r]:
                    v %= orders[r]
                new.append(v)
            prod.append(new)
        out.blocks[bg] = prod
        out.target_orders[tbg] = list(orders)
    return out


def beta_rank_from_torsion(table: HomologyTable, bg) -> int:
    """Rank of the Bockstein into ``bg``: the number of Z/2 invariant
    factors (2-adic valuation one) of the integral group at ``bg``."""
    return table[bg].factors_2adic(1)


def uct_mod2_dims(table: HomologyTable) -> dict:
    """Mod-2 dimensions predicted by universal coefficients:
    ``rank H^i + #even factors of H^i + #even factors of H^(i+1)``."""
    out = {}
    keys = set(table.bigradings()) | {(i - 1, q) for (i, q) in table.bigradings()}
    for (i, q) in keys:
        v = table[(i, q)].rank + table[(i, q)].even_factors() + table[(i + 1, q)].even_factors()
        if v:
            out[(i, q)] = v
    return out
