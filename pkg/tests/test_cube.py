import pytest

from khops.cube import (SizeLimitExceeded, State, StateLengthMismatch, build_cube, check_faces,
                        resolve)
from khops.diagram import mirror, parse_pd, torus_knot, unknot

from conftest import TREFOIL_PD

# [DERIVED] circle counts per state (bit c = crossing c), by hand from the PD
TREFOIL_COUNTS = [3, 2, 2, 1, 2, 1, 1, 2]


def test_trefoil_counts():
    c = build_cube(parse_pd(TREFOIL_PD))
    assert [int(v) for v in c.ncircles] == TREFOIL_COUNTS


def test_mirror_counts_by_weight():
    # the mirror's cube is the trefoil's with every bit flipped
    c = build_cube(mirror(parse_pd(TREFOIL_PD)))
    by_weight = sorted((int(c.weights[s]), int(c.ncircles[s])) for s in range(8))
    assert [n for _, n in by_weight] == [2, 1, 1, 1, 2, 2, 2, 3]


def test_generator_count():
    assert build_cube(parse_pd(TREFOIL_PD)).generator_count() == sum(2 ** k for k in TREFOIL_COUNTS)


def test_resolve_state_objects():
    t = parse_pd(TREFOIL_PD)
    cs = resolve(t, State.parse("000"))
    assert len(cs) == 3
    assert sorted(a for c in cs.circles for a in c) == list(range(1, 7))
    with pytest.raises(StateLengthMismatch):
        resolve(t, State.parse("0000"))
    with pytest.raises(StateLengthMismatch):
        resolve(t, 8)


def test_kink():
    # one-crossing unknot diagram: two circles on one side, one on the other
    c = build_cube(parse_pd("X(1,1,2,2)"))
    assert sorted(int(v) for v in c.ncircles) == [1, 2]


def test_unknot_loops():
    c = build_cube(unknot())
    assert c.n == 0 and int(c.ncircles[0]) == 1


def test_edges_change_circle_count_by_one():
    c = build_cube(torus_knot(3, 4), check=False)
    for e in c.edges():
        d = int(c.ncircles[e.target]) - int(c.ncircles[e.source])
        assert d == (-1 if e.kind == "merge" else 1)
    assert sum(1 for _ in c.edges()) == c.n_edges()
    check_faces(c)


def test_size_limit():
    with pytest.raises(SizeLimitExceeded):
        build_cube(torus_knot(3, 4), crossing_limit=6)


def test_dump_is_deterministic():
    t = parse_pd(TREFOIL_PD)
    a, b = build_cube(t).dump(), build_cube(t).dump()
    assert a == b
    assert a.splitlines()[0] == "cube n=3 loops=0 generators=30"
    assert "state 000 w=0 circles=1,4;2,5;3,6" in a


def test_unknot_empty_state():
    assert len(resolve(unknot(), 0)) == 1


def test_trefoil_edges():
    c = build_cube(parse_pd(TREFOIL_PD))
    assert c.n_states == 8 and c.n_edges() == 12


def test_kink_cube():
    c = build_cube(parse_pd("X(1,1,2,2)"))
    (e,) = list(c.edges())
    assert c.n_states == 2
    assert e.kind == ("merge" if int(c.ncircles[0]) == 2 else "split")


def test_fourteen_crossing_cube(targets):
    c = build_cube(targets["14n6487"], check=False)
    assert c.n_states == 16384
    assert c.generator_count() == sum(2 ** int(k) for k in c.ncircles)
