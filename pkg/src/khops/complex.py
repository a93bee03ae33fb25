"""Even, odd, unified and mod-2 Khovanov complexes on one shared basis.

A chain generator is a state together with a subset of its circles (a
bitmask): a circle in the subset carries ``v-`` in the even theory and is a
factor of the exterior monomial (in increasing circle order) in the odd
theory.  With this dictionary both differentials have the same support and
agree mod 2, so the unified complex over ``Z[xi]/(xi^2-1)`` is stored as
the pair ``(d_e, d_o)`` of integer matrices, ``xi -> (1, -1)``.

Gradings: ``i = |s| - n_minus`` and
``q = (#v+ - #v-) + |s| + n_plus - 2 n_minus``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .cube import ResolutionCube, CubeEdge, SMOOTHING

CONVENTION_VERSION = "khops-1"


class ComplexError(ValueError):
    pass


class NoSignAssignment(ComplexError):
    pass


class ParityViolation(ComplexError):
    pass


class NoBasepoint(ComplexError):
    pass


class NotAComplex(ComplexError):
    pass


# --- the coefficient ring ----------------------------------------------------

class UnifiedScalar(NamedTuple):
    """Element of Z[xi]/(xi^2 - 1) as its pair of images (xi=1, xi=-1)."""
    e: int
    o: int

    @classmethod
    def from_poly(cls, a: int, b: int) -> "UnifiedScalar":
        """``a + b*xi``."""
        return cls(a + b, a - b)

    def to_poly(self) -> tuple[int, int]:
        if (self.e - self.o) % 2:
            raise ParityViolation(f"{self} is not in the unified ring")
        return (self.e + self.o) // 2, (self.e - self.o) // 2

    def __add__(self, other):
        return UnifiedScalar(self.e + other.e, self.o + other.o)

    def __sub__(self, other):
        return UnifiedScalar(self.e - other.e, self.o - other.o)

    def __mul__(self, other):
        if isinstance(other, int):
            return UnifiedScalar(self.e * other, self.o * other)
        return UnifiedScalar(self.e * other.e, self.o * other.o)

    __rmul__ = __mul__

    def __neg__(self):
        return UnifiedScalar(-self.e, -self.o)

    def is_unit(self) -> bool:
        return abs(self.e) == 1 and abs(self.o) == 1

    def is_zero(self) -> bool:
        return self.e == 0 and self.o == 0

    def valid(self) -> bool:
        return (self.e - self.o) % 2 == 0


ONE = UnifiedScalar(1, 1)
XI = UnifiedScalar(1, -1)


# --- edge maps -------------------------------------------------------------

def _bits(mask: int):
    k = 0
    while mask:
        if mask & 1:
            yield k
        mask >>= 1
        k += 1


def _inversions(seq) -> int:
    n = 0
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                n += 1
    return n


def odd_image(edge: CubeEdge, mask: int) -> list[tuple[int, int]]:
    """Unsigned odd edge map on one exterior monomial: merge is the
    quotient identifying the two circles, split is ``w -> (a1 - a2) ^ w``
    with ``a1`` the circle at the tail of the arrow."""
    cmap = edge.circle_map
    if edge.kind == "merge":
        a, b, _ = edge.affected
        if (mask >> a) & 1 and (mask >> b) & 1:
            return []
        seq = [cmap[k] for k in _bits(mask)]
        t = 0
        for v in seq:
            t |= 1 << v
        return [(t, -1 if _inversions(seq) & 1 else 1)]
    _, tail, head = edge.affected
    seq = [cmap[k] for k in _bits(mask)]
    base = -1 if _inversions(seq) & 1 else 1
    t = 0
    for v in seq:
        t |= 1 << v
    out = []
    for coef, v in ((1, tail), (-1, head)):
        if (t >> v) & 1:
            continue
        below = sum(1 for w in seq if w < v)
        out.append((t | (1 << v), coef * base * (-1 if below & 1 else 1)))
    return out


def even_image(edge: CubeEdge, mask: int) -> list[tuple[int, int]]:
    """Unsigned even edge map (Khovanov's m and Delta) on one generator."""
    cmap = edge.circle_map
    if edge.kind == "merge":
        a, b, _ = edge.affected
        if (mask >> a) & 1 and (mask >> b) & 1:
            return []
        t = 0
        for k in _bits(mask):
            t |= 1 << cmap[k]
        return [(t, 1)]
    a, tail, head = edge.affected
    t = 0
    for k in _bits(mask):
        t |= 1 << cmap[k]
    if (mask >> a) & 1:
        return [(t | (1 << head), 1)]
    return [(t | (1 << tail), 1), (t | (1 << head), 1)]


# --- signs -------------------------------------------------------------------

def even_signs(cube: ResolutionCube) -> np.ndarray:
    """``eps[s, c] = (-1)^(number of 1-bits of s below c)``; entries for
    crossings already 1-smoothed in ``s`` are unused."""
    n = cube.n
    eps = np.ones((1 << n, max(n, 1)), dtype=np.int8)
    for s in range(1 << n):
        below = 0
        for c in range(n):
            eps[s, c] = -1 if below & 1 else 1
            below += (s >> c) & 1
    return eps


def _compose_odd(e1: CubeEdge, e2: CubeEdge, mask: int = 0) -> dict[int, int]:
    out: dict[int, int] = {}
    for m1, c1 in odd_image(e1, mask):
        for m2, c2 in odd_image(e2, m1):
            out[m2] = out.get(m2, 0) + c1 * c2
    return {k: v for k, v in out.items() if v}


def _partner(bit: int, p: int) -> int:
    for u, v in SMOOTHING[bit]:
        if p == u:
            return v
        if p == v:
            return u
    raise AssertionError


def ladybug_type(cube: ResolutionCube, s: int, i: int, j: int) -> str:
    """Classify a ladybug square.  Walk the circle through crossings ``i``
    and ``j`` in state ``s``; one chord lies on the left of the walk, the
    other on the right.  From the tail of the left chord, meeting the tail
    of the right chord first gives "X", its head first gives "Y".  The
    answer does not depend on the walking direction."""
    d = cube.diagram
    xs = d.crossings
    slots = {}
    for c, x in enumerate(xs):
        for p, a in enumerate(x):
            slots.setdefault(a, []).append((c, p))
    events = []
    start = (i, 0)
    c, p = start
    for _ in range(8 * len(xs) + 8):
        bit = (s >> c) & 1
        out = _partner(bit, p)
        if c in (i, j):
            end = "T" if {p, out} == {0, 1} else "H"
            side = "L" if out == (p + 1) % 4 else "R"
            events.append((c, end, side))
        a = xs[c][out]
        s0, s1 = slots[a]
        c, p = s1 if s0 == (c, out) else s0
        if (c, p) == start:
            break
    else:
        raise ComplexError("circle walk did not close")
    sides = {}
    for c, _, side in events:
        if sides.setdefault(c, side) != side:
            raise ComplexError(f"chord of crossing {c} meets both sides of its circle")
    if len(events) != 4 or len(set(sides.values())) != 2:
        raise ComplexError("not a ladybug configuration")
    left = next(c for c, sd in sides.items() if sd == "L")
    k = next(idx for idx, ev in enumerate(events) if ev[0] == left and ev[1] == "T")
    for step in range(1, 4):
        c, end, _ = events[(k + step) % 4]
        if c != left:
            return "X" if end == "T" else "Y"
    raise AssertionError


def face_type(cube: ResolutionCube, s: int, i: int, j: int) -> str:
    """"C" (odd maps commute), "A" (anticommute) or ladybug "X"/"Y"."""
    p1 = _compose_odd(cube.edge(s, i), cube.edge(s | (1 << i), j))
    p2 = _compose_odd(cube.edge(s, j), cube.edge(s | (1 << j), i))
    if not p1 and not p2:
        return ladybug_type(cube, s, i, j)
    if p1 == p2:
        return "C"
    if p1 == {k: -v for k, v in p2.items()}:
        return "A"
    raise ComplexError(f"face ({s}, {i}, {j}) neither commutes nor anticommutes")


def _faces(n: int):
    for s in range(1 << n):
        for i in range(n):
            if (s >> i) & 1:
                continue
            for j in range(i + 1, n):
                if not (s >> j) & 1:
                    yield s, i, j


def odd_signs(cube: ResolutionCube, variant: str = "X", verify: bool = True) -> np.ndarray:
    """Edge signs making every odd square anticommute.

    Unknowns are edge bits, one equation per square (sum of the four bits =
    1 for commuting squares, 0 for anticommuting; ladybug squares of type
    ``variant`` count as commuting).  The system is solved in closed form
    after fixing ``eps(s, j) = 0`` whenever ``s`` has no 1-bit below ``j``;
    every square is then checked.
    """
    if variant not in ("X", "Y"):
        raise ValueError("variant must be 'X' or 'Y'")
    n = cube.n
    cache: dict = {}

    def t(s, i, j):
        key = (s, i, j)
        v = cache.get(key)
        if v is None:
            ft = face_type(cube, s, i, j)
            v = 1 if ft == "C" or ft == variant else 0
            cache[key] = v
        return v

    bits = np.zeros((1 << n, max(n, 1)), dtype=np.int8)
    for s in range(1 << n):
        if s == 0:
            continue
        k = (s & -s).bit_length() - 1
        sp = s ^ (1 << k)
        for j in range(k + 1, n):
            if not (s >> j) & 1:
                bits[s, j] = t(sp, k, j) ^ bits[sp, j]
    if verify:
        for s, i, j in _faces(n):
            tot = bits[s, i] ^ bits[s | 1 << i, j] ^ bits[s, j] ^ bits[s | 1 << j, i]
            if tot != t(s, i, j):
                raise NoSignAssignment(f"square ({s}, {i}, {j}) violates the sign system")
    return np.where(bits == 1, -1, 1).astype(np.int8)


def solve_signs_gf2(cube: ResolutionCube, variant: str = "X") -> np.ndarray | None:
    """Reference solver: dense Gaussian elimination over GF(2) on the full
    edge/square system (small cubes only).  Returns None if infeasible."""
    n = cube.n
    edges = [(s, c) for s in range(1 << n) for c in range(n) if not (s >> c) & 1]
    index = {e: k for k, e in enumerate(edges)}
    rows = []
    for s, i, j in _faces(n):
        ft = face_type(cube, s, i, j)
        rhs = 1 if ft == "C" or ft == variant else 0
        v = 0
        for e in ((s, i), (s | 1 << i, j), (s, j), (s | 1 << j, i)):
            v ^= 1 << index[e]
        rows.append(v | (rhs << len(edges)))
    m = len(edges)
    pivots = []
    r = 0
    for col in range(m):
        piv = next((k for k in range(r, len(rows)) if (rows[k] >> col) & 1), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for k in range(len(rows)):
            if k != r and (rows[k] >> col) & 1:
                rows[k] ^= rows[r]
        pivots.append(col)
        r += 1
    for k in range(r, len(rows)):
        if (rows[k] >> m) & 1:
            return None
    sol = [0] * m
    for k, col in enumerate(pivots):
        sol[col] = (rows[k] >> m) & 1
    eps = np.ones((1 << n, max(n, 1)), dtype=np.int8)
    for (s, c), b in zip(edges, sol):
        eps[s, c] = -1 if b else 1
    return eps


# --- complexes ---------------------------------------------------------------

@dataclass
class Block:
    """Differential ``(i, q) -> (i+1, q)`` in coordinate form; ``rows`` index
    the target basis, ``cols`` the source basis."""
    rows: np.ndarray
    cols: np.ndarray
    e: np.ndarray
    o: np.ndarray

    @classmethod
    def empty(cls) -> "Block":
        z = np.zeros(0, dtype=np.int64)
        return cls(z, z.copy(), z.copy(), z.copy())

    def __len__(self) -> int:
        return len(self.rows)

    def dense(self, n_rows: int, n_cols: int, part: str) -> list[list[int]]:
        out = [[0] * n_cols for _ in range(n_rows)]
        vals = self.e if part == "e" else self.o
        for r, c, v in zip(self.rows.tolist(), self.cols.tolist(), vals.tolist()):
            out[r][c] += v
        return out


@dataclass
class UnifiedComplex:
    """Bigraded free complex over Z_xi stored as paired integer matrices.

    ``basis[(i, q)]`` is an array of generator ids; ``d[(i, q)]`` maps that
    block into ``(i+1, q)``.  Generator ids decode to ``(state, mask)`` via
    ``info["offsets"]``.
    """
    basis: dict
    d: dict
    info: dict = field(default_factory=dict)

    def bigradings(self) -> list[tuple[int, int]]:
        return sorted(k for k, v in self.basis.items() if len(v))

    def qs(self) -> list[int]:
        return sorted({q for (_, q) in self.bigradings()})

    def dim(self, bigrading) -> int:
        return len(self.basis.get(bigrading, ()))

    def size(self) -> int:
        return sum(len(v) for v in self.basis.values())

    def nnz(self) -> int:
        return sum(len(b) for b in self.d.values())

    def block(self, bigrading) -> Block:
        return self.d.get(bigrading) or Block.empty()

    def dense(self, bigrading, part: str) -> list[list[int]]:
        i, q = bigrading
        return self.block(bigrading).dense(self.dim((i + 1, q)), self.dim(bigrading), part)

    def decode(self, gid: int) -> tuple[int, int]:
        offsets = self.info["offsets"]
        s = int(np.searchsorted(offsets, gid, side="right") - 1)
        return s, int(gid - offsets[s])

    def check(self) -> None:
        """Raise unless d^2 = 0 in both parts and d_e = d_o mod 2."""
        for bg, b in self.d.items():
            if len(b) and np.any((b.e - b.o) % 2):
                raise ParityViolation(f"d_e and d_o differ mod 2 at {bg}")
        for (i, q) in self.bigradings():
            nxt = (i + 1, q)
            for part in ("e", "o"):
                a = self.dense((i, q), part)
                b = self.dense(nxt, part)
                if _matmul(b, a, nonzero_only=True):
                    raise NotAComplex(f"d_{part}^2 != 0 at {(i, q)}")

    def specialize(self, target: str):
        from .homalg import SpecializedComplex, SparseMatrix
        if target not in ("even", "odd", "mod2"):
            raise ValueError(f"unknown specialization {target!r}")
        d = {}
        for bg, b in self.d.items():
            i, q = bg
            shape = (self.dim((i + 1, q)), self.dim(bg))
            vals = b.o if target == "odd" else b.e
            entries = {}
            for r, c, v in zip(b.rows.tolist(), b.cols.tolist(), vals.tolist()):
                if target == "mod2":
                    v &= 1
                if v:
                    entries[(r, c)] = v
            d[bg] = SparseMatrix(shape, entries)
        ring = {"even": "Z-even", "odd": "Z-odd", "mod2": "GF2"}[target]
        return SpecializedComplex(ring, {k: v for k, v in self.basis.items()}, d)

    def content_hash(self) -> str:
        h = hashlib.sha256()
        for bg in self.bigradings():
            h.update(repr(bg).encode())
            h.update(np.asarray(self.basis[bg], dtype=np.int64).tobytes())
            b = self.block(bg)
            for arr in (b.rows, b.cols, b.e, b.o):
                h.update(np.asarray(arr, dtype=np.int64).tobytes())
        return h.hexdigest()


def _matmul(b, a, nonzero_only=False):
    if not a or not b or not a[0]:
        return False if nonzero_only else []
    n, k, m = len(b), len(a), len(a[0])
    out = [[0] * m for _ in range(n)]
    for r in range(n):
        br = b[r]
        orow = out[r]
        for t in range(k):
            v = br[t]
            if v:
                at = a[t]
                for c in range(m):
                    if at[c]:
                        orow[c] += v * at[c]
    if nonzero_only:
        return any(any(x for x in row) for row in out)
    return out


def generator_grading(cube: ResolutionCube, state: int, mask: int) -> tuple[int, int]:
    d = cube.diagram
    w = int(cube.weights[state])
    c = int(cube.ncircles[state])
    k = bin(mask).count("1")
    return w - d.n_minus, (c - 2 * k) + w + d.n_plus - 2 * d.n_minus


def build_unified(cube: ResolutionCube, even: np.ndarray | None = None,
                  odd: np.ndarray | None = None, reduced: bool = False,
                  check: bool | None = None, backend: str = "auto") -> UnifiedComplex:
    """Assemble the unified complex; ``reduced`` restricts to generators whose
    marked circle carries ``v-`` and shifts q by +1."""
    if even is None:
        even = even_signs(cube)
    if odd is None:
        odd = odd_signs(cube)
    if reduced and cube.marked_circle(0) is None:
        raise NoBasepoint("reduced complex needs a basepoint")
    from . import fastbuild
    if backend == "auto":
        backend = "fast" if fastbuild.available() and cube.n >= 6 else "python"
    if backend == "fast":
        cx = fastbuild.build(cube, even, odd, reduced)
    else:
        cx = _build_python(cube, even, odd, reduced)
    cx.info.update(_info(cube, reduced))
    if check is None:
        check = cube.n <= 7
    if check:
        cx.check()
    return cx


def _info(cube: ResolutionCube, reduced: bool) -> dict:
    d = cube.diagram
    offsets = np.zeros((1 << cube.n) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(1 << cube.ncircles.astype(np.int64))
    return {
        "pd": d.to_pd(),
        "name": d.name,
        "n_plus": d.n_plus,
        "n_minus": d.n_minus,
        "basepoint": d.basepoint,
        "reduced": reduced,
        "offsets": offsets,
        "history": ["built"],
        "convention": CONVENTION_VERSION,
    }


def _build_python(cube: ResolutionCube, even, odd, reduced: bool) -> UnifiedComplex:
    n = cube.n
    offsets = np.zeros((1 << n) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(1 << cube.ncircles.astype(np.int64))
    shift = 1 if reduced else 0
    basis_lists: dict = {}
    where: dict = {}
    for s in range(1 << n):
        mk = cube.marked_circle(s) if reduced else None
        for mask in range(1 << int(cube.ncircles[s])):
            if mk is not None and not (mask >> mk) & 1:
                continue
            i, q = generator_grading(cube, s, mask)
            q += shift
            lst = basis_lists.setdefault((i, q), [])
            where[int(offsets[s]) + mask] = ((i, q), len(lst))
            lst.append(int(offsets[s]) + mask)
    entries: dict = {}
    for e in cube.edges():
        s, c, t = e.source, e.crossing, e.target
        se, so = int(even[s, c]), int(odd[s, c])
        for mask in range(1 << int(cube.ncircles[s])):
            src = int(offsets[s]) + mask
            if src not in where:
                continue
            bg, col = where[src]
            ev = dict(even_image(e, mask))
            for tm, oc in odd_image(e, mask):
                tgt = int(offsets[t]) + tm
                if tgt not in where:
                    continue
                ec = ev.pop(tm)
                _, row = where[tgt]
                entries.setdefault(bg, []).append((row, col, se * ec, so * oc))
            if ev:
                raise ParityViolation("even and odd edge maps have different support")
    basis = {bg: np.array(v, dtype=np.int64) for bg, v in basis_lists.items()}
    dd = {}
    for bg, lst in entries.items():
        arr = np.array(lst, dtype=np.int64).reshape(-1, 4)
        dd[bg] = Block(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3])
    return UnifiedComplex(basis, dd)


def reduced_subcomplex(cx: UnifiedComplex, cube: ResolutionCube) -> UnifiedComplex:
    """Restrict an unreduced complex to generators whose marked circle is
    labeled ``v-``; q shifts by +1."""
    if cx.info.get("reduced"):
        return cx
    if cube.marked_circle(0) is None:
        raise NoBasepoint("reduced complex needs a basepoint")
    offsets = cx.info["offsets"]
    keep = {}
    basis = {}
    for (i, q), gids in cx.basis.items():
        sel = []
        for k, g in enumerate(gids.tolist()):
            s = int(np.searchsorted(offsets, g, side="right") - 1)
            mask = g - int(offsets[s])
            if (mask >> cube.marked_circle(s)) & 1:
                sel.append(k)
        idx = np.full(len(gids), -1, dtype=np.int64)
        idx[sel] = np.arange(len(sel))
        keep[(i, q)] = idx
        basis[(i, q + 1)] = gids[sel]
    d = {}
    for (i, q), b in cx.d.items():
        ci, ri = keep[(i, q)], keep.get((i + 1, q))
        if ri is None:
            continue
        cols, rows = ci[b.cols], ri[b.rows]
        ok = cols >= 0
        if np.any(rows[ok] < 0):
            raise ComplexError("differential leaves the reduced subcomplex")
        d[(i, q + 1)] = Block(rows[ok], cols[ok], b.e[ok], b.o[ok])
    info = dict(cx.info)
    info["reduced"] = True
    info["history"] = list(info.get("history", [])) + ["reduced-subcomplex"]
    return UnifiedComplex(basis, d, info)


# --- reduction ---------------------------------------------------------------

@dataclass
class Transport:
    """Homotopy equivalence between a complex ``C`` and its reduction ``R``:
    ``f: C -> R``, ``g: R -> C``, ``h: C -> C`` (degree -1) with
    ``f g = id`` and ``g f - id = d h + h d``.  Maps are dicts
    ``gid -> {gid: UnifiedScalar}``; generators keep their ids."""
    f: dict
    g: dict
    h: dict


def _is_unit(v) -> bool:
    return (v[0] == 1 or v[0] == -1) and (v[1] == 1 or v[1] == -1)


def _lin_apply(m: dict, vec: dict) -> dict:
    out: dict = {}
    for k, c in vec.items():
        for t, w in m.get(k, {}).items():
            a = out.get(t, (0, 0))
            out[t] = (a[0] + c[0] * w[0], a[1] + c[1] * w[1])
    return {k: v for k, v in out.items() if v != (0, 0)}


def _eliminate_block(out: dict, inn: dict, order: list, track=None) -> None:
    """Cancel unit arrows in place until none is left.  ``out[x]`` maps
    targets of ``d x`` to coefficient pairs; ``inn[y]`` is the set of
    sources hitting ``y``."""
    changed = True
    while changed:
        changed = False
        for x in order:
            ox = out.get(x)
            if not ox:
                continue
            best = None
            for y, v in ox.items():
                if _is_unit(v):
                    k = len(inn[y])
                    if best is None or k < best[0] or (k == best[0] and y < best[1]):
                        best = (k, y)
            if best is None:
                continue
            y = best[1]
            u = ox[y]
            if track is not None:
                track(x, y, u, out)
            rest = [(z, c) for z, c in ox.items() if z != y]
            for w in list(inn[y]):
                if w == x:
                    continue
                ow = out[w]
                a = ow[y]
                # coefficient of the correction: d(w,y) * u^{-1}, u^{-1} = u
                ke, ko = a[0] * u[0], a[1] * u[1]
                for z, c in rest:
                    b = ow.get(z)
                    ne = -ke * c[0]
                    no = -ko * c[1]
                    if b is None:
                        ow[z] = (ne, no)
                        inn[z].add(w)
                    else:
                        ne += b[0]
                        no += b[1]
                        if ne == 0 and no == 0:
                            del ow[z]
                            inn[z].discard(w)
                        else:
                            ow[z] = (ne, no)
            # drop x and y with all their arrows
            for z in ox:
                inn[z].discard(x)
            for w in inn.pop(x, ()):
                out[w].pop(x, None)
            for z in out.pop(y, {}):
                inn[z].discard(y)
            for w in inn.pop(y, ()):
                if w != x:
                    out[w].pop(y, None)
            del out[x]
            changed = True


def reduce(cx: UnifiedComplex, transport: bool = False):
    """Gaussian elimination over Z_xi: cancel every arrow whose coefficient
    is a unit of the unified ring, block by block in q.  Surviving
    generators keep their ids.  Returns ``(reduced, Transport | None)``."""
    grading = {}
    for (i, q), gids in cx.basis.items():
        for g in gids.tolist():
            grading[g] = (i, q)
    tr = None
    if transport:
        tr = Transport({g: {g: (1, 1)} for g in grading}, {g: {g: (1, 1)} for g in grading}, {})
    new_basis: dict = {}
    new_d: dict = {}
    for q in cx.qs():
        bgs = sorted(bg for bg in cx.basis if bg[1] == q)
        out: dict = {}
        inn: dict = {}
        order = []
        for bg in bgs:
            for g in cx.basis[bg].tolist():
                out[g] = {}
                inn[g] = set()
                order.append(g)
        for bg in bgs:
            b = cx.d.get(bg)
            if b is None or not len(b):
                continue
            i, _ = bg
            src = cx.basis[bg][b.cols].tolist()
            tgt = cx.basis[(i + 1, q)][b.rows].tolist()
            for s, t, e, o in zip(src, tgt, b.e.tolist(), b.o.tolist()):
                if e or o:
                    out[s][t] = (e, o)
                    inn[t].add(s)
        _eliminate_block(out, inn, order, _tracker(tr, inn) if tr else None)
        alive = sorted(out)
        for g in alive:
            new_basis.setdefault(grading[g], []).append(g)
        pos = {}
        for bg, lst in new_basis.items():
            if bg[1] == q:
                for k, g in enumerate(lst):
                    pos[g] = k
        ent: dict = {}
        for s in alive:
            for t, (e, o) in out[s].items():
                ent.setdefault(grading[s], []).append((pos[t], pos[s], e, o))
        for bg, lst in ent.items():
            arr = np.array(lst, dtype=object)
            new_d[bg] = Block(np.array(arr[:, 0], dtype=np.int64), np.array(arr[:, 1], dtype=np.int64),
                              _int_array(arr[:, 2]), _int_array(arr[:, 3]))
    basis = {bg: np.array(v, dtype=np.int64) for bg, v in new_basis.items()}
    info = dict(cx.info)
    info["history"] = list(info.get("history", [])) + ["reduced"]
    red = UnifiedComplex(basis, new_d, info)
    if tr is not None:
        tr.f = {g: UnifiedMap(m) for g, m in tr.f.items()}
        tr.g = {g: UnifiedMap(m) for g, m in tr.g.items()}
        tr.h = {g: UnifiedMap(m) for g, m in tr.h.items()}
    return red, tr


def UnifiedMap(m: dict) -> dict:
    return {k: UnifiedScalar(*v) for k, v in m.items() if v != (0, 0)}


def _int_array(col) -> np.ndarray:
    vals = [int(v) for v in col]
    if vals and max(abs(v) for v in vals) >= 1 << 62:
        raise OverflowError("coefficient growth beyond 64 bits during reduction")
    return np.array(vals, dtype=np.int64)


def _tracker(tr: Transport, inn: dict):
    """Compose the transport maps with one cancellation ``d x = u y + ...``.

    Single step (``C = R + <x, y>``): ``f1(y) = -sum u d(x,z) z``,
    ``f1(x) = 0``; ``g1(w) = w - d(w,y) u x``; ``h1(y) = -u x``.
    Composites: ``F = f1 F``, ``G = G g1``, ``H = H + G h1 F``.
    """
    def mul(a, b):
        return (a[0] * b[0], a[1] * b[1])

    def axpy(dst, c, src):
        for k, v in src.items():
            a = dst.get(k, (0, 0))
            dst[k] = (a[0] + c[0] * v[0], a[1] + c[1] * v[1])

    def track(x, y, u, out):
        gx = tr.g[x]
        fy = {z: (-u[0] * c[0], -u[1] * c[1]) for z, c in out[x].items() if z != y}
        for g0, img in tr.f.items():
            if x not in img and y not in img:
                continue
            cy = img.get(y)
            if cy is not None:
                hh = tr.h.setdefault(g0, {})
                c = mul(cy, u)
                axpy(hh, (-c[0], -c[1]), gx)
                tr.h[g0] = {k: v for k, v in hh.items() if v != (0, 0)}
            new = {k: v for k, v in img.items() if k != x and k != y}
            if cy is not None:
                axpy(new, cy, fy)
            tr.f[g0] = {k: v for k, v in new.items() if v != (0, 0)}
        for w in inn[y]:
            if w == x:
                continue
            c = mul(out[w][y], u)
            gw = dict(tr.g[w])
            axpy(gw, (-c[0], -c[1]), gx)
            tr.g[w] = {k: v for k, v in gw.items() if v != (0, 0)}
        tr.g.pop(x, None)
        tr.g.pop(y, None)
    return track


def unified_complex(diagram, reduced: bool = False, variant: str = "X",
                    simplify: bool = True, crossing_limit: int | None = None) -> UnifiedComplex:
    """Diagram -> (reduced) unified complex, Gaussian-eliminated by default."""
    from .cube import DEFAULT_CROSSING_LIMIT, build_cube
    if reduced and diagram.basepoint is None:
        diagram = diagram.with_basepoint(diagram.default_basepoint())
    cube = build_cube(diagram, crossing_limit or DEFAULT_CROSSING_LIMIT)
    cx = build_unified(cube, even_signs(cube), odd_signs(cube, variant), reduced=reduced)
    cx.info["variant"] = variant
    if simplify:
        cx, _ = reduce(cx)
    return cx


def complex_to_json(cx: UnifiedComplex) -> dict:
    def key(bg):
        return f"{bg[0]},{bg[1]}"
    info = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in cx.info.items()}
    return {
        "basis": {key(bg): v.tolist() for bg, v in cx.basis.items()},
        "d": {key(bg): [b.rows.tolist(), b.cols.tolist(), b.e.tolist(), b.o.tolist()]
              for bg, b in cx.d.items()},
        "info": info,
    }


def complex_from_json(data: dict) -> UnifiedComplex:
    def bg(k):
        i, q = k.split(",")
        return int(i), int(q)
    basis = {bg(k): np.array(v, dtype=np.int64) for k, v in data["basis"].items()}
    d = {bg(k): Block(*(np.array(a, dtype=np.int64) for a in v)) for k, v in data["d"].items()}
    info = dict(data.get("info", {}))
    if "offsets" in info:
        info["offsets"] = np.array(info["offsets"], dtype=np.int64)
    return UnifiedComplex(basis, d, info)
