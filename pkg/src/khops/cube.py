"""The cube of resolutions of a link diagram.

A state is an integer bitmask with bit ``c`` set when crossing ``c`` takes
its 1-smoothing.  For ``X(i,j,k,l)`` the 0-smoothing joins ``i-j`` and
``k-l`` (positions 0-1 and 2-3), the 1-smoothing joins ``j-k`` and ``l-i``.
For a positive crossing the 0-smoothing is the oriented one.

Circles of a state are numbered by their least arc label; crossing-less
loops of the diagram come last.

Odd-theory arrows: at the 0-smoothing the arrow of a crossing points from
the smoothing arc at positions 0-1 to the one at 2-3; at the 1-smoothing it
is that arrow turned a quarter counterclockwise, i.e. it points from the arc
at positions 1-2 to the arc at 3-0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .diagram import LinkDiagram

DEFAULT_CROSSING_LIMIT = 16

# smoothing arcs of a crossing, as pairs of positions
SMOOTHING = {0: ((0, 1), (2, 3)), 1: ((1, 2), (3, 0))}


class CubeError(ValueError):
    pass


class StateLengthMismatch(CubeError):
    pass


class SizeLimitExceeded(CubeError):
    pass


@dataclass(frozen=True)
class State:
    bits: tuple

    @property
    def weight(self) -> int:
        return sum(self.bits)

    def as_int(self) -> int:
        return sum(1 << c for c, b in enumerate(self.bits) if b)

    @classmethod
    def from_int(cls, value: int, n: int) -> "State":
        return cls(tuple((value >> c) & 1 for c in range(n)))

    @classmethod
    def parse(cls, text: str) -> "State":
        return cls(tuple(int(ch) for ch in text))

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class CircleSet:
    circles: tuple        # tuple of tuples of arc labels (sorted); loops are ()
    marked: int | None    # circle containing the basepoint arc
    incidence: tuple      # per crossing: circle indices of its two smoothing arcs

    def __len__(self) -> int:
        return len(self.circles)


@dataclass(frozen=True)
class CubeEdge:
    source: int
    target: int
    crossing: int
    kind: str               # "merge" or "split"
    circle_map: tuple       # source circle index -> target circle index
    affected: tuple         # merge: (a, b, merged); split: (a, tail, head)
    sign_even: int = 1

    @property
    def arrow(self) -> tuple:
        """(tail, head) circles of the 1-smoothing arrow, for splits."""
        return self.affected[1:] if self.kind == "split" else ()


def _union_find_circles(diagram: LinkDiagram, state: int, arc_index: dict) -> np.ndarray:
    m = len(arc_index)
    parent = list(range(m))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for c, x in enumerate(diagram.crossings):
        for p, r in SMOOTHING[(state >> c) & 1]:
            a, b = find(arc_index[x[p]]), find(arc_index[x[r]])
            if a != b:
                if a < b:
                    parent[b] = a
                else:
                    parent[a] = b
    roots = [find(a) for a in range(m)]
    # circle number by least arc label (arc indices are sorted by label)
    order = {}
    out = np.empty(m, dtype=np.int16)
    for a, r in enumerate(roots):
        if r not in order:
            order[r] = len(order)
        out[a] = order[r]
    return out


def resolve(diagram: LinkDiagram, state: State | int) -> CircleSet:
    n = diagram.n_crossings
    if isinstance(state, State):
        if len(state.bits) != n:
            raise StateLengthMismatch(f"state has {len(state.bits)} bits, diagram has {n} crossings")
        s = state.as_int()
    else:
        s = int(state)
        if s < 0 or s >> n:
            raise StateLengthMismatch(f"state {s} out of range for {n} crossings")
    arcs = diagram.arcs
    arc_index = {a: k for k, a in enumerate(arcs)}
    circ = _union_find_circles(diagram, s, arc_index)
    k = int(circ.max()) + 1 if len(arcs) else 0
    circles = [[] for _ in range(k)]
    for a, ci in zip(arcs, circ):
        circles[ci].append(a)
    circles = [tuple(cs) for cs in circles] + [()] * diagram.free_loops
    marked = None
    if diagram.basepoint is not None:
        marked = int(circ[arc_index[diagram.basepoint]])
    elif not arcs and diagram.free_loops:
        marked = 0
    incidence = []
    for c, x in enumerate(diagram.crossings):
        (p0, _), (p2, _) = SMOOTHING[(s >> c) & 1]
        incidence.append((int(circ[arc_index[x[p0]]]), int(circ[arc_index[x[p2]]])))
    return CircleSet(tuple(circles), marked, tuple(incidence))


class ResolutionCube:
    """All ``2**n`` resolutions of a diagram, fully materialized.

    ``circle_of[s, a]`` is the circle (in state ``s``) through the arc with
    index ``a`` (arcs indexed in increasing label order); ``ncircles[s]``
    counts circles including crossing-less loops.
    """

    def __init__(self, diagram: LinkDiagram, crossing_limit: int = DEFAULT_CROSSING_LIMIT):
        n = diagram.n_crossings
        if n > crossing_limit:
            raise SizeLimitExceeded(f"{n} crossings exceeds the limit of {crossing_limit}")
        self.diagram = diagram
        self.n = n
        self.arcs = diagram.arcs
        self.arc_index = {a: k for k, a in enumerate(self.arcs)}
        self.loops = diagram.free_loops
        m = len(self.arcs)
        self.circle_of = np.zeros((1 << n, m), dtype=np.int16)
        self.ncircles = np.zeros(1 << n, dtype=np.int32)
        for s in range(1 << n):
            if m:
                circ = _union_find_circles(diagram, s, self.arc_index)
                self.circle_of[s] = circ
                self.ncircles[s] = int(circ.max()) + 1 + self.loops
            else:
                self.ncircles[s] = self.loops
        # slot arc indices per crossing
        self.xarc = np.array([[self.arc_index[a] for a in x] for x in diagram.crossings],
                             dtype=np.int32).reshape(n, 4)
        self.weights = np.array([bin(s).count("1") for s in range(1 << n)], dtype=np.int32)

    @property
    def n_states(self) -> int:
        return 1 << self.n

    def generator_count(self) -> int:
        return int(sum(1 << int(c) for c in self.ncircles))

    def marked_circle(self, state: int) -> int | None:
        bp = self.diagram.basepoint
        if bp is None:
            return 0 if (not self.arcs and self.loops) else None
        return int(self.circle_of[state, self.arc_index[bp]])

    def circles(self, state: int) -> CircleSet:
        return resolve(self.diagram, state)

    def edge(self, s: int, c: int) -> CubeEdge:
        if (s >> c) & 1:
            raise CubeError(f"crossing {c} is already 1-smoothed in state {s}")
        t = s | (1 << c)
        cs, ct = self.circle_of[s], self.circle_of[t]
        x = self.xarc[c]
        ns, nt = int(self.ncircles[s]), int(self.ncircles[t])
        loops = self.loops
        nsa, nta = ns - loops, nt - loops
        # representative arc of each source circle
        rep = np.full(nsa, -1, dtype=np.int64)
        for a in range(len(cs) - 1, -1, -1):
            rep[cs[a]] = a
        cmap = [int(ct[rep[k]]) for k in range(nsa)] + [nta + k for k in range(loops)]
        a0, b0 = int(cs[x[0]]), int(cs[x[2]])
        if a0 != b0:
            merged = int(ct[x[0]])
            return CubeEdge(s, t, c, "merge", tuple(cmap), (a0, b0, merged),
                            _even_sign(s, c))
        tail, head = int(ct[x[1]]), int(ct[x[3]])
        cmap[a0] = tail
        return CubeEdge(s, t, c, "split", tuple(cmap), (a0, tail, head), _even_sign(s, c))

    def edges(self) -> Iterator[CubeEdge]:
        for s in range(1 << self.n):
            for c in range(self.n):
                if not (s >> c) & 1:
                    yield self.edge(s, c)

    def n_edges(self) -> int:
        return self.n * (1 << max(self.n - 1, 0)) if self.n else 0

    def dump(self) -> str:
        """Structured text listing of states and edges (test fixtures)."""
        lines = [f"cube n={self.n} loops={self.loops} generators={self.generator_count()}"]
        for s in range(1 << self.n):
            cs = resolve(self.diagram, s)
            st = State.from_int(s, self.n)
            lines.append(f"state {st} w={st.weight} circles=" +
                         ";".join(",".join(map(str, c)) or "loop" for c in cs.circles))
        for e in self.edges():
            lines.append(f"edge {State.from_int(e.source, self.n)}->{State.from_int(e.target, self.n)}"
                         f" x{e.crossing} {e.kind} map={list(e.circle_map)} aff={list(e.affected)}")
        return "\n".join(lines)


def _even_sign(s: int, c: int) -> int:
    return -1 if bin(s & ((1 << c) - 1)).count("1") & 1 else 1


def build_cube(diagram: LinkDiagram, crossing_limit: int = DEFAULT_CROSSING_LIMIT,
               check: bool | None = None) -> ResolutionCube:
    cube = ResolutionCube(diagram, crossing_limit)
    if check is None:
        check = cube.n <= 6
    if check:
        check_faces(cube)
    return cube


def check_faces(cube: ResolutionCube) -> None:
    """Every square closes: the two edge paths compose to the same circle map."""
    n = cube.n
    for s in range(1 << n):
        for i in range(n):
            if (s >> i) & 1:
                continue
            for j in range(i + 1, n):
                if (s >> j) & 1:
                    continue
                e1, e2 = cube.edge(s, i), cube.edge(s | (1 << i), j)
                f1, f2 = cube.edge(s, j), cube.edge(s | (1 << j), i)
                for k in range(int(cube.ncircles[s])):
                    if k in _touched(e1, e2) or k in _touched(f1, f2):
                        continue
                    if e2.circle_map[e1.circle_map[k]] != f2.circle_map[f1.circle_map[k]]:
                        raise CubeError(f"face at state {s}, crossings {i},{j} does not close")
                dc = [int(cube.ncircles[t]) for t in (s, s | 1 << i, s | 1 << j, s | 1 << i | 1 << j)]
                for a, b in ((0, 1), (0, 2), (1, 3), (2, 3)):
                    if abs(dc[a] - dc[b]) != 1:
                        raise CubeError("edge does not change the circle count by one")


def _touched(e1: CubeEdge, e2: CubeEdge) -> set:
    """Source circles of ``e1`` that are involved in the two-step path."""
    out = set(e1.affected[:1])
    if e1.kind == "merge":
        out.add(e1.affected[1])
    inv = {}
    for k, v in enumerate(e1.circle_map):
        inv.setdefault(v, []).append(k)
    for v in (e2.affected[0],) + ((e2.affected[1],) if e2.kind == "merge" else ()):
        out.update(inv.get(v, []))
    if e1.kind == "split":
        out.add(e1.affected[0])
    return out
