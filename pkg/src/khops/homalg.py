"""Exact homological algebra over Z and GF(2).

Matrices here are small (they come from reduced complexes), so everything
is dense lists of Python ints.  The Smith normal form keeps its transforms:
``P @ A @ Q == D`` with ``P``, ``Q`` unimodular and their inverses tracked.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class HomalgError(ValueError):
    pass


class NotACycle(HomalgError):
    pass


class ShapeMismatch(HomalgError):
    pass


# --- matrices ------------------------------------------------------------------

@dataclass
class SparseMatrix:
    shape: tuple
    entries: dict = field(default_factory=dict)   # (row, col) -> nonzero int

    def dense(self) -> list[list[int]]:
        m, n = self.shape
        out = [[0] * n for _ in range(m)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    @classmethod
    def from_dense(cls, rows, ncols: int | None = None) -> "SparseMatrix":
        m = len(rows)
        n = len(rows[0]) if m else (ncols or 0)
        return cls((m, n), {(r, c): v for r, row in enumerate(rows)
                            for c, v in enumerate(row) if v})

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape[1] != other.shape[0]:
            raise ShapeMismatch(f"{self.shape} @ {other.shape}")
        by_row: dict = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        out: dict = {}
        for (r, k), v in self.entries.items():
            for c, w in by_row.get(k, ()):
                out[(r, c)] = out.get((r, c), 0) + v * w
        return SparseMatrix((self.shape[0], other.shape[1]),
                            {k: v for k, v in out.items() if v})

    def mod(self, p: int) -> "SparseMatrix":
        return SparseMatrix(self.shape, {k: v % p for k, v in self.entries.items() if v % p})

    def is_zero(self) -> bool:
        return not self.entries

    def apply(self, vec: list[int]) -> list[int]:
        out = [0] * self.shape[0]
        for (r, c), v in self.entries.items():
            if vec[c]:
                out[r] += v * vec[c]
        return out


def identity(n: int) -> list[list[int]]:
    return [[1 if r == c else 0 for c in range(n)] for r in range(n)]


def matmul(a, b):
    if not a:
        return []
    n = len(b[0]) if b else 0
    out = []
    for row in a:
        o = [0] * n
        for k, v in enumerate(row):
            if v:
                bk = b[k]
                for c in range(n):
                    if bk[c]:
                        o[c] += v * bk[c]
        out.append(o)
    return out


def matvec(a, x):
    return [sum(v * x[k] for k, v in enumerate(row) if v) for row in a]


# --- Smith normal form -----------------------------------------------------------

@dataclass
class SNF:
    """``P A Q = D`` with ``D`` diagonal, entries ``diag`` (nonzero, each
    dividing the next; over GF(2) all ones)."""
    diag: list
    P: list
    Pinv: list
    Q: list
    Qinv: list
    shape: tuple

    @property
    def rank(self) -> int:
        return len(self.diag)


def snf(a: list[list[int]], ncols: int | None = None, modulus: int | None = None) -> SNF:
    """Smith normal form over Z (``modulus=None``) or GF(2) (``modulus=2``)."""
    m = len(a)
    n = len(a[0]) if m else (ncols or 0)
    A = [list(row) for row in a]
    if modulus:
        A = [[v % modulus for v in row] for row in A]
    P, Pinv, Q, Qinv = identity(m), identity(m), identity(n), identity(n)
    red = (lambda v: v % modulus) if modulus else (lambda v: v)

    def row_add(i, j, k):      # row i += k * row j
        if not k:
            return
        Ai, Aj = A[i], A[j]
        for c in range(n):
            if Aj[c]:
                Ai[c] = red(Ai[c] + k * Aj[c])
        Pi, Pj = P[i], P[j]
        for c in range(m):
            if Pj[c]:
                Pi[c] = red(Pi[c] + k * Pj[c])
        for row in Pinv:       # column j -= k * column i
            if row[i]:
                row[j] = red(row[j] - k * row[i])

    def col_add(i, j, k):      # col i += k * col j
        if not k:
            return
        for row in A:
            if row[j]:
                row[i] = red(row[i] + k * row[j])
        for row in Q:
            if row[j]:
                row[i] = red(row[i] + k * row[j])
        Qj, Qi = Qinv[j], Qinv[i]   # row j -= k * row i
        for c in range(n):
            if Qi[c]:
                Qj[c] = red(Qj[c] - k * Qi[c])

    def row_swap(i, j):
        if i == j:
            return
        A[i], A[j] = A[j], A[i]
        P[i], P[j] = P[j], P[i]
        for row in Pinv:
            row[i], row[j] = row[j], row[i]

    def col_swap(i, j):
        if i == j:
            return
        for M in (A, Q):
            for row in M:
                row[i], row[j] = row[j], row[i]
        Qinv[i], Qinv[j] = Qinv[j], Qinv[i]

    def row_neg(i):
        A[i] = [-v for v in A[i]]
        P[i] = [-v for v in P[i]]
        for row in Pinv:
            row[i] = -row[i]

    diag = []
    t = 0
    while t < min(m, n):
        # smallest nonzero entry of the remaining block
        best = None
        for r in range(t, m):
            row = A[r]
            for c in range(t, n):
                v = row[c]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), r, c)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, r, c = best
        row_swap(t, r)
        col_swap(t, c)
        while True:
            p = A[t][t]
            done = True
            for r in range(t + 1, m):
                v = A[r][t]
                if v:
                    qt = v // p if not modulus else v
                    row_add(r, t, -qt)
                    if A[r][t]:
                        done = False
            for c in range(t + 1, n):
                v = A[t][c]
                if v:
                    qt = v // p if not modulus else v
                    col_add(c, t, -qt)
                    if A[t][c]:
                        done = False
            if done:
                # divisibility of the rest of the block
                bad = None
                if not modulus:
                    for r in range(t + 1, m):
                        if any(A[r][c] % p for c in range(t + 1, n)):
                            bad = r
                            break
                if bad is None:
                    break
                row_add(t, bad, 1)
                continue
            # move the smallest entry of row/col t to the pivot
            best = (abs(A[t][t]), t, t)
            for r in range(t + 1, m):
                if A[r][t] and abs(A[r][t]) < best[0]:
                    best = (abs(A[r][t]), r, t)
            for c in range(t + 1, n):
                if A[t][c] and abs(A[t][c]) < best[0]:
                    best = (abs(A[t][c]), t, c)
            row_swap(t, best[1])
            col_swap(t, best[2])
        if A[t][t] < 0:
            row_neg(t)
        diag.append(A[t][t])
        t += 1
    return SNF(diag, P, Pinv, Q, Qinv, (m, n))


def rank_f2(a: list[list[int]]) -> int:
    rows = []
    for row in a:
        v = 0
        for c, x in enumerate(row):
            if x & 1:
                v |= 1 << c
        if v:
            rows.append(v)
    rank = 0
    pivots: dict = {}
    for v in rows:
        while v:
            h = v.bit_length() - 1
            if h in pivots:
                v ^= pivots[h]
            else:
                pivots[h] = v
                rank += 1
                break
    return rank


# --- homology ---------------------------------------------------------------------

@dataclass(frozen=True)
class Group:
    """Finitely generated abelian group ``Z^rank + sum Z/t`` (invariant
    factors ``t > 1``); over GF(2) only ``rank`` is used."""
    rank: int = 0
    torsion: tuple = ()

    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def primary(self) -> dict:
        """Primary decomposition: prime power -> multiplicity."""
        out: dict = {}
        for t in self.torsion:
            for p, e in _factor(t).items():
                out[p ** e] = out.get(p ** e, 0) + 1
        return dict(sorted(out.items()))

    def even_factors(self) -> int:
        return sum(1 for t in self.torsion if t % 2 == 0)

    def factors_2adic(self, k: int) -> int:
        """Number of invariant factors with 2-adic valuation exactly ``k``."""
        return sum(1 for t in self.torsion if _val2(t) == k)

    def __str__(self) -> str:
        return describe(self)


def describe(g: Group, unicode: bool = True) -> str:
    if g.is_zero():
        return "0"
    sup = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")
    sub = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")
    parts = []
    if g.rank:
        if unicode:
            parts.append("Z" + (str(g.rank).translate(sup) if g.rank > 1 else ""))
        else:
            parts.append("Z" + (f"^{g.rank}" if g.rank > 1 else ""))
    for pk, mult in g.primary().items():
        if unicode:
            parts.append("Z" + str(pk).translate(sub) + (str(mult).translate(sup) if mult > 1 else ""))
        else:
            parts.append(f"Z{pk}" + (f"^{mult}" if mult > 1 else ""))
    return ("⊕" if unicode else "+").join(parts)


def _val2(t: int) -> int:
    k = 0
    while t % 2 == 0:
        t //= 2
        k += 1
    return k


def _factor(t: int) -> dict:
    out: dict = {}
    p = 2
    while p * p <= t:
        while t % p == 0:
            out[p] = out.get(p, 0) + 1
            t //= p
        p += 1
    if t > 1:
        out[t] = out.get(t, 0) + 1
    return out


@dataclass
class SpecializedComplex:
    """Bigraded complex over one ring: ``ring`` in {"Z-even", "Z-odd", "GF2"}."""
    ring: str
    basis: dict
    d: dict

    @property
    def modulus(self) -> int | None:
        return 2 if self.ring == "GF2" else None

    def dim(self, bg) -> int:
        return len(self.basis.get(bg, ()))

    def bigradings(self) -> list:
        return sorted(k for k, v in self.basis.items() if len(v))

    def matrix(self, bg) -> list[list[int]]:
        """Dense matrix of ``d: C(i,q) -> C(i+1,q)``."""
        i, q = bg
        m, n = self.dim((i + 1, q)), self.dim(bg)
        sm = self.d.get(bg)
        if sm is None:
            return [[0] * n for _ in range(m)]
        if sm.shape != (m, n):
            raise ShapeMismatch(f"block {bg} has shape {sm.shape}, expected {(m, n)}")
        out = sm.dense()
        if self.modulus:
            out = [[v % 2 for v in row] for row in out]
        return out


@dataclass
class Presentation:
    """Homology at one bigrading with explicit generators.

    ``gens[k]`` is a cycle (chain vector) representing generator ``k`` of
    order ``orders[k]`` (0 = infinite).  ``coordinates(z)`` expresses a cycle
    in these generators (modulo the orders).
    """
    bigrading: tuple
    gens: list
    orders: list
    kernel_left: list       # K^+ : chains -> kernel coordinates
    change: list            # kernel coords -> generator coords (P of the image SNF)
    skip: int               # number of unit invariant factors dropped
    outgoing: list          # differential out of this bigrading (cycle check)
    modulus: int | None = None

    @property
    def group(self) -> Group:
        if self.modulus:
            return Group(len(self.gens))
        return Group(sum(1 for o in self.orders if o == 0),
                     tuple(o for o in self.orders if o))

    def coordinates(self, z: list[int], check: bool = True) -> list[int]:
        if check and self.outgoing:
            dz = matvec(self.outgoing, z)
            if any((v % self.modulus) if self.modulus else v for v in dz):
                raise NotACycle(f"chain is not a cycle at {self.bigrading}")
        y = matvec(self.kernel_left, z)
        y2 = matvec(self.change, y)[self.skip:]
        out = []
        for v, o in zip(y2, self.orders):
            if self.modulus:
                out.append(v % self.modulus)
            elif o:
                out.append(v % o)
            else:
                out.append(v)
        return out


def presentation(cx: SpecializedComplex, bg) -> Presentation:
    i, q = bg
    mod = cx.modulus
    n = cx.dim(bg)
    a_out = cx.matrix(bg)                      # C^i -> C^{i+1}
    a_in = cx.matrix((i - 1, q))               # C^{i-1} -> C^i
    s_out = snf(a_out, ncols=n, modulus=mod)
    r = s_out.rank
    K = [row[r:] for row in s_out.Q]           # n x (n - r)
    Kplus = s_out.Qinv[r:]                     # (n - r) x n
    kdim = n - r
    M = matmul(Kplus, a_in) if a_in and a_in[0] else [[] for _ in range(kdim)]
    if mod:
        M = [[v % mod for v in row] for row in M]
    ncols = len(a_in[0]) if a_in and a_in[0] else 0
    s_in = snf(M, ncols=ncols, modulus=mod)
    diag = s_in.diag
    skip = sum(1 for v in diag if v == 1)
    orders = [v for v in diag if v != 1] + [0] * (kdim - len(diag))
    # generators: K times columns of P^{-1} beyond the unit factors
    gens = []
    for k in range(skip, kdim):
        col = [s_in.Pinv[row][k] for row in range(kdim)]
        g = matvec(K, col)
        if mod:
            g = [v % mod for v in g]
        gens.append(g)
    return Presentation(bg, gens, orders, Kplus, s_in.P, skip, a_out, mod)


@dataclass
class HomologyTable:
    """Homology groups per bigrading (only nonzero entries are stored)."""
    ring: str
    groups: dict

    def __getitem__(self, bg) -> Group:
        return self.groups.get(tuple(bg), Group())

    def bigradings(self) -> list:
        return sorted(self.groups)

    def poincare(self) -> dict:
        return {bg: g.rank for bg, g in self.groups.items() if g.rank}

    def total_rank(self) -> int:
        return sum(g.rank for g in self.groups.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomologyTable):
            return NotImplemented
        return self.groups == other.groups

    def shifted(self, di: int = 0, dq: int = 0) -> "HomologyTable":
        return HomologyTable(self.ring, {(i + di, q + dq): g for (i, q), g in self.groups.items()})


def homology(cx: SpecializedComplex, with_presentations: bool = False):
    """Homology table (and optionally all presentations) of a complex."""
    groups = {}
    pres = {}
    for bg in cx.bigradings():
        p = presentation(cx, bg)
        g = p.group
        if not g.is_zero():
            groups[bg] = g
        pres[bg] = p
    table = HomologyTable(cx.ring, groups)
    if with_presentations:
        return table, pres
    return table


def homology_ranks_f2(cx: SpecializedComplex) -> dict:
    """Fast mod-2 dimensions (no presentations)."""
    ranks = {bg: rank_f2(cx.matrix(bg)) for bg in cx.bigradings()}
    out = {}
    for (i, q) in cx.bigradings():
        dim = cx.dim((i, q)) - ranks[(i, q)] - ranks.get((i - 1, q), 0)
        if dim:
            out[(i, q)] = dim
    return out
