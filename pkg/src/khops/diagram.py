"""Oriented link diagrams given by planar diagram (PD) codes.

Conventions follow KnotTheory/Knotscape: a crossing ``X(i,j,k,l)`` lists
the four arc labels counterclockwise, starting from the incoming
under-strand ``i``; the under-strand runs ``i -> k``.  The crossing is
positive when the over-strand runs ``l -> j`` and negative when it runs
``j -> l``.  With this convention ``X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)`` is
the left-handed trefoil, ``(n_plus, n_minus) = (0, 3)``.

Crossing-less unknotted components cannot be written as crossings; they
are carried in ``free_loops`` and written ``Loop()`` in PD text.

Accepted PD syntax (whitespace and commas between crossings optional)::

    [name:] X(1,4,2,5) X(3,6,4,1) X(5,2,6,3) [Loop()]
    [name:] X[1,4,2,5], X[3,6,4,1], X[5,2,6,3]
    [name:] PD[X[1,4,2,5], X[3,6,4,1], X[5,2,6,3]]
    [name:] [[1,4,2,5],[3,6,4,1],[5,2,6,3]]
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence


class DiagramError(ValueError):
    pass


class MalformedSyntax(DiagramError):
    pass


class InvalidIncidence(DiagramError):
    pass


class OrientationInconsistent(DiagramError):
    pass


class InvalidArc(DiagramError):
    pass


Crossing = tuple  # (i, j, k, l)


@dataclass(frozen=True)
class LinkDiagram:
    crossings: tuple
    signs: tuple
    components: int
    free_loops: int = 0
    basepoint: int | None = None
    name: str = field(default="", compare=False)

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    @property
    def n_plus(self) -> int:
        return sum(1 for s in self.signs if s > 0)

    @property
    def n_minus(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    @property
    def writhe(self) -> int:
        return self.n_plus - self.n_minus

    @property
    def arcs(self) -> list[int]:
        return sorted({a for x in self.crossings for a in x})

    def with_basepoint(self, arc: int | None) -> "LinkDiagram":
        if arc is not None and arc not in set(self.arcs):
            raise InvalidArc(f"basepoint {arc} is not an arc of the diagram")
        return replace(self, basepoint=arc)

    def with_name(self, name: str) -> "LinkDiagram":
        return replace(self, name=name)

    def default_basepoint(self) -> int | None:
        arcs = self.arcs
        return arcs[0] if arcs else None

    def to_pd(self) -> str:
        """Normalized PD text; ``parse_pd(d.to_pd())`` reproduces ``d``."""
        parts = ["X(%d,%d,%d,%d)" % tuple(x) for x in self.crossings]
        parts += ["Loop()"] * self.free_loops
        return " ".join(parts)

    def __str__(self) -> str:
        return (self.name + ": " if self.name else "") + self.to_pd()


# --- parsing ---------------------------------------------------------------

_NAME_RE = re.compile(r"^\s*([^:\[\]()]+?)\s*:(?!:)\s*(.*)$", re.S)
_X_RE = re.compile(r"X\s*[\[(]\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*[\])]")
_LOOP_RE = re.compile(r"Loop\s*[\[(]\s*\d*\s*[\])]")
_LIST_RE = re.compile(r"\[\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\]")


def _split_name(text: str) -> tuple[str, str]:
    m = _NAME_RE.match(text)
    if m and not m.group(1).strip().startswith(("X", "[", "PD")):
        return m.group(1).strip(), m.group(2)
    return "", text


def _tokenize(body: str) -> tuple[list[tuple[int, int, int, int]], int]:
    body = body.strip()
    if body.startswith("PD"):
        inner = body[2:].strip()
        if not (inner[:1] in "[(" and inner[-1:] in "])"):
            raise MalformedSyntax(f"unbalanced PD wrapper: {body!r}")
        body = inner[1:-1]
    loops = len(_LOOP_RE.findall(body))
    rest = _LOOP_RE.sub(" ", body)
    if "X" in rest:
        pattern = _X_RE
    else:
        pattern = _LIST_RE
        stripped = rest.strip()
        if stripped.startswith("[") and stripped.endswith("]") and _LIST_RE.fullmatch(stripped) is None:
            rest = stripped[1:-1]
    crossings = [tuple(int(v) for v in m.groups()) for m in pattern.finditer(rest)]
    leftover = pattern.sub(" ", rest)
    if re.sub(r"[\s,;]", "", leftover):
        raise MalformedSyntax(f"unparseable token(s) in PD code: {leftover.strip()!r}")
    return crossings, loops


def parse_pd(text: str, name: str | None = None) -> LinkDiagram:
    """Parse PD text (optionally prefixed by ``name:``) into a diagram."""
    found, body = _split_name(text)
    crossings, loops = _tokenize(body)
    return from_crossings(crossings, free_loops=loops, name=name if name is not None else found)


def from_crossings(crossings: Iterable[Sequence[int]], free_loops: int = 0,
                   basepoint: int | None = None, name: str = "") -> LinkDiagram:
    xs = tuple(tuple(int(a) for a in x) for x in crossings)
    for x in xs:
        if len(x) != 4:
            raise MalformedSyntax(f"crossing {x} does not have four arcs")
    if len(set(xs)) != len(xs):
        raise InvalidIncidence("a crossing is listed twice")
    slots: dict[int, list[tuple[int, int]]] = {}
    for c, x in enumerate(xs):
        for p, a in enumerate(x):
            slots.setdefault(a, []).append((c, p))
    for a, occ in slots.items():
        if len(occ) != 2:
            raise InvalidIncidence(f"arc {a} is used {len(occ)} times (expected 2)")
    heads = _orient(xs, slots)
    # heads[a] is the slot where arc a ends; an over-strand entering at
    # slot 3 runs l -> j, i.e. the crossing is positive
    signs = tuple(+1 if heads[x[3]] == (c, 3) else -1 for c, x in enumerate(xs))
    n_comp = len(_components(xs, slots, heads)) + free_loops
    d = LinkDiagram(crossings=xs, signs=signs, components=n_comp,
                    free_loops=free_loops, name=name)
    if basepoint is not None:
        d = d.with_basepoint(basepoint)
    return d


def _other(slots, a, slot):
    s0, s1 = slots[a]
    return s1 if slot == s0 else s0


def _orient(xs, slots) -> dict[int, tuple[int, int]]:
    """Return, for every arc, the slot (crossing, position) where it ends."""
    heads: dict[int, tuple[int, int]] = {}

    def assign(a, head):
        prev = heads.get(a)
        if prev is not None:
            if prev != head:
                raise OrientationInconsistent(f"arc {a} cannot be coherently oriented")
            return False
        heads[a] = head
        return True

    def propagate(a, head):
        stack = [(a, head)]
        while stack:
            a, head = stack.pop()
            if not assign(a, head):
                continue
            tail = _other(slots, a, head)
            c, p = tail
            # the arc leaves crossing c at `tail`; the strand arrived at the
            # opposite position, so the arc there ends at c
            prev_slot = (c, (p + 2) % 4)
            b = xs[c][prev_slot[1]]
            stack.append((b, prev_slot))
            c, p = head
            nxt = (c, (p + 2) % 4)
            b = xs[c][nxt[1]]
            stack.append((b, _other(slots, b, nxt)))

    for c, x in enumerate(xs):
        # under-strand: position 0 is incoming, position 2 outgoing
        propagate(x[0], (c, 0))
        propagate(x[2], _other(slots, x[2], (c, 2)))
    for c, x in enumerate(xs):
        if x[1] in heads:
            continue
        # over-only component: orient by label order (KnotTheory rule)
        j, l = x[1], x[3]
        if j - l == 1 or l - j > 1:
            propagate(l, (c, 3))
        else:
            propagate(j, (c, 1))
    for c, x in enumerate(xs):
        if heads[x[0]] != (c, 0) or heads[x[2]] == (c, 2):
            raise OrientationInconsistent(f"under-strand at crossing {c} is not oriented i -> k")
        if (heads[x[1]] == (c, 1)) == (heads[x[3]] == (c, 3)):
            raise OrientationInconsistent(f"over-strand at crossing {c} is not coherently oriented")
    return heads


def _components(xs, slots, heads) -> list[list[int]]:
    """Arc cycles in traversal order."""
    seen: set[int] = set()
    comps = []
    for start in sorted(slots):
        if start in seen:
            continue
        cyc = []
        a = start
        while a not in seen:
            seen.add(a)
            cyc.append(a)
            c, p = heads[a]
            a = xs[c][(p + 2) % 4]
        comps.append(cyc)
    return comps


def arc_components(d: LinkDiagram) -> list[list[int]]:
    """Arcs of each crossing-carrying component, in orientation order."""
    slots = _slots(d.crossings)
    return _components(d.crossings, slots, _orient(d.crossings, slots))


def arc_heads(d: LinkDiagram) -> dict[int, tuple[int, int]]:
    slots = _slots(d.crossings)
    return _orient(d.crossings, slots)


def _slots(xs):
    if len(set(xs)) != len(xs):
        raise InvalidIncidence("a crossing is listed twice")
    slots: dict[int, list[tuple[int, int]]] = {}
    for c, x in enumerate(xs):
        for p, a in enumerate(x):
            slots.setdefault(a, []).append((c, p))
    return slots


# --- composition -----------------------------------------------------------

def mirror(d: LinkDiagram) -> LinkDiagram:
    """Switch every crossing; arc labels are kept."""
    xs = []
    for (i, j, k, l), s in zip(d.crossings, d.signs):
        # the old over-strand becomes the under-strand
        xs.append((l, i, j, k) if s > 0 else (j, k, l, i))
    name = d.name
    if name:
        name = name[1:] if name.startswith("!") else "!" + name
    return LinkDiagram(crossings=tuple(xs), signs=tuple(-s for s in d.signs),
                       components=d.components, free_loops=d.free_loops,
                       basepoint=d.basepoint, name=name)


def _shift(d: LinkDiagram, offset: int) -> tuple:
    return tuple(tuple(a + offset for a in x) for x in d.crossings)


def disjoint_union(d1: LinkDiagram, d2: LinkDiagram) -> LinkDiagram:
    offset = max(d1.arcs, default=0)
    xs = d1.crossings + _shift(d2, offset)
    return LinkDiagram(crossings=xs, signs=d1.signs + d2.signs,
                       components=d1.components + d2.components,
                       free_loops=d1.free_loops + d2.free_loops,
                       basepoint=d1.basepoint,
                       name=f"{d1.name} U {d2.name}" if d1.name and d2.name else "")


def connected_sum(d1: LinkDiagram, d2: LinkDiagram,
                  a1: int | None = None, a2: int | None = None) -> LinkDiagram:
    """Cut ``a1`` on ``d1`` and ``a2`` on ``d2`` and splice them, respecting
    orientation.  Arcs default to each diagram's basepoint (or lowest arc)."""
    name = f"{d1.name} # {d2.name}" if d1.name and d2.name else ""
    if not d2.crossings:
        if a2 is not None:
            raise InvalidArc(f"arc {a2} is absent from a crossing-less diagram")
        if d2.free_loops == 0:
            raise InvalidArc("cannot form a connected sum with the empty diagram")
        return disjoint_union(d1, replace(d2, free_loops=d2.free_loops - 1,
                                          components=d2.components - 1)).with_name(name)
    if not d1.crossings:
        if a1 is not None:
            raise InvalidArc(f"arc {a1} is absent from a crossing-less diagram")
        if d1.free_loops == 0:
            raise InvalidArc("cannot form a connected sum with the empty diagram")
        out = disjoint_union(replace(d1, free_loops=d1.free_loops - 1,
                                     components=d1.components - 1), d2)
        return replace(out, basepoint=None, name=name)
    a1 = a1 if a1 is not None else (d1.basepoint or d1.default_basepoint())
    a2 = a2 if a2 is not None else (d2.basepoint or d2.default_basepoint())
    if a1 not in set(d1.arcs):
        raise InvalidArc(f"arc {a1} is not an arc of the first diagram")
    if a2 not in set(d2.arcs):
        raise InvalidArc(f"arc {a2} is not an arc of the second diagram")
    offset = max(d1.arcs)
    xs1 = [list(x) for x in d1.crossings]
    xs2 = [list(x) for x in _shift(d2, offset)]
    b2 = a2 + offset
    h1 = arc_heads(d1)[a1]
    h2 = arc_heads(d2)[a2]
    # a1 now runs from its old tail to a2's old head, and a2 from its old
    # tail to a1's old head
    xs1[h1[0]][h1[1]] = b2
    xs2[h2[0]][h2[1]] = a1
    out = from_crossings(xs1 + xs2, free_loops=d1.free_loops + d2.free_loops, name=name)
    return replace(out, basepoint=d1.basepoint)


def relabel(d: LinkDiagram) -> LinkDiagram:
    """Renumber arcs 1..2n consecutively along components."""
    mapping = {}
    for comp in arc_components(d):
        for a in comp:
            mapping[a] = len(mapping) + 1
    xs = tuple(tuple(mapping[a] for a in x) for x in d.crossings)
    bp = mapping.get(d.basepoint) if d.basepoint is not None else None
    return LinkDiagram(crossings=xs, signs=d.signs, components=d.components,
                       free_loops=d.free_loops, basepoint=bp, name=d.name)


# --- standard families -----------------------------------------------------

def braid_closure(strands: int, word: Sequence[int], name: str = "") -> LinkDiagram:
    """Closure of a braid; generator ``k`` (1-based) is a positive crossing of
    strands ``k`` and ``k+1``, ``-k`` its inverse.  Strands run upward."""
    if strands < 1:
        raise DiagramError("a braid needs at least one strand")
    label = 0
    bottom = []
    current = []
    for _ in range(strands):
        label += 1
        bottom.append(label)
        current.append(label)
    crossings = []
    for g in word:
        k = abs(g) - 1
        if not 0 <= k < strands - 1:
            raise DiagramError(f"generator {g} out of range for {strands} strands")
        bl, br = current[k], current[k + 1]
        tl, tr = label + 1, label + 2
        label += 2
        if g > 0:
            # under-strand runs bottom-right -> top-left
            crossings.append([br, tr, tl, bl])
        else:
            crossings.append([bl, br, tr, tl])
        current[k], current[k + 1] = tl, tr
    # close up: top arc at each position is the bottom arc at that position
    ident = {top: bot for top, bot in zip(current, bottom)}
    free = 0
    used = {a for x in crossings for a in x}
    for bot in bottom:
        if bot not in used:
            free += 1
    xs = [[ident.get(a, a) for a in x] for x in crossings]
    d = from_crossings(xs, free_loops=free, name=name)
    return relabel(d) if xs else d


def torus_knot(p: int, q: int) -> LinkDiagram:
    """Positive ``T(p, q)`` as the closure of ``(s_1 ... s_{p-1})^q``."""
    return braid_closure(p, list(range(1, p)) * q, name=f"T({p},{q})")


def unknot() -> LinkDiagram:
    return LinkDiagram(crossings=(), signs=(), components=1, free_loops=1, name="unknot")


def empty_link() -> LinkDiagram:
    return LinkDiagram(crossings=(), signs=(), components=0)
