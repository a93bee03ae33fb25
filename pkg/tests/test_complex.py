import numpy as np
import pytest
from hypothesis import given, strategies as st

from khops.complex import (NoBasepoint, NotAComplex, UnifiedScalar, build_unified,
                           complex_from_json, complex_to_json, even_signs, face_type, odd_signs,
                           reduce, reduced_subcomplex, solve_signs_gf2, unified_complex)
from khops.cube import build_cube
from khops.diagram import braid_closure, parse_pd, torus_knot
from khops.homalg import homology, homology_ranks_f2

from conftest import TREFOIL_PD, random_braids
from oracles import euler_characteristic, mod2_dims, table_euler

ints = st.integers(-20, 20)
scalars = st.builds(UnifiedScalar.from_poly, ints, ints)


@given(scalars, scalars, scalars)
def test_ring_axioms(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert (a * b).valid() and (a + b).valid()
    assert UnifiedScalar(*a.to_poly()) == UnifiedScalar(*a.to_poly())
    assert UnifiedScalar.from_poly(*a.to_poly()) == a


def test_xi_squares_to_one():
    xi = UnifiedScalar.from_poly(0, 1)
    assert xi * xi == UnifiedScalar(1, 1)
    assert xi.is_unit() and not UnifiedScalar.from_poly(1, 1).is_unit()


def _entries(cx):
    out = set()
    for (i, q), b in cx.d.items():
        src, tgt = cx.basis[(i, q)], cx.basis[(i + 1, q)]
        for r, c, e, o in zip(b.rows, b.cols, b.e, b.o):
            out.add((int(src[c]), int(tgt[r]), int(e), int(o)))
    return out


def _basis(cx):
    return {bg: sorted(v.tolist()) for bg, v in cx.basis.items() if len(v)}


CORPUS = [parse_pd(TREFOIL_PD), torus_knot(3, 4), braid_closure(3, [1, -2, 1, -2]),
          braid_closure(3, [1, 1, -2, 1, 2, -1])]


@pytest.mark.parametrize("d", CORPUS, ids=lambda d: d.name or d.to_pd()[:20])
def test_builders_agree_and_d_squared(d):
    cube = build_cube(d)
    ev, od = even_signs(cube), odd_signs(cube)
    a = build_unified(cube, ev, od, backend="python", check=True)
    b = build_unified(cube, ev, od, backend="fast", check=True)
    assert _basis(a) == _basis(b)
    assert _entries(a) == _entries(b)


@pytest.mark.parametrize("d", CORPUS[:3], ids=lambda d: d.to_pd()[:20])
def test_closed_form_signs_agree_with_gf2_solver(d):
    cube = build_cube(d)
    for variant in ("X", "Y"):
        closed = odd_signs(cube, variant)
        solved = solve_signs_gf2(cube, variant)
        assert solved is not None
        a = homology(build_unified(cube, odd=closed).specialize("odd"))
        b = homology(build_unified(cube, odd=np.asarray(solved)).specialize("odd"))
        assert a == b


def test_variants_give_same_odd_homology():
    d = torus_knot(3, 4)
    x = homology(unified_complex(d, variant="X").specialize("odd"))
    y = homology(unified_complex(d, variant="Y").specialize("odd"))
    assert x == y


def test_face_types_on_trefoil():
    cube = build_cube(parse_pd(TREFOIL_PD))
    kinds = {face_type(cube, s, i, j) for s in range(8) for i in range(3) for j in range(i + 1, 3)
             if not (s >> i) & 1 and not (s >> j) & 1}
    assert kinds <= {"C", "A", "X", "Y"}


def test_broken_complex_detected():
    cx = unified_complex(torus_knot(2, 3), simplify=False)
    bg = next(k for k, b in cx.d.items() if len(b) and (k[0] + 1, k[1]) in cx.d
              and len(cx.d[(k[0] + 1, k[1])]))
    nxt = cx.d[(bg[0] + 1, bg[1])]
    k = next(k for k, r in enumerate(cx.d[bg].rows) if r in set(nxt.cols.tolist()))
    cx.d[bg].e[k] += 2
    cx.d[bg].o[k] += 2
    with pytest.raises(NotAComplex):
        cx.check()


@pytest.mark.parametrize("d", random_braids(12, 6, seed=7), ids=lambda d: d.name)
def test_euler_characteristic_matches_state_sum(d):
    cx = unified_complex(d)
    chi = euler_characteristic(d.crossings, d.signs, d.free_loops)
    for theory in ("even", "odd"):
        assert table_euler(homology(cx.specialize(theory))) == chi


@pytest.mark.parametrize("d", random_braids(12, 6, seed=11), ids=lambda d: d.name)
def test_mod2_matches_independent_complex(d):
    cx = unified_complex(d, simplify=False)
    assert homology_ranks_f2(cx.specialize("mod2")) == mod2_dims(d.crossings, d.signs, d.free_loops)


def _apply(m, vec):
    out = {}
    for k, c in vec.items():
        for t, v in m.get(k, {}).items():
            out[t] = out.get(t, UnifiedScalar(0, 0)) + c * v
    return {k: v for k, v in out.items() if not v.is_zero()}


def _diff(cx):
    d = {}
    for s, t, e, o in _entries(cx):
        d.setdefault(s, {})[t] = UnifiedScalar(e, o)
    return d


@pytest.mark.parametrize("d", [parse_pd(TREFOIL_PD), braid_closure(3, [1, -2, 1, -2])],
                         ids=["trefoil", "figure8"])
def test_transport_maps(d):
    cx = unified_complex(d, simplify=False)
    red, tr = reduce(cx, transport=True)
    dc, dr = _diff(cx), _diff(red)
    gens = [g for v in cx.basis.values() for g in v.tolist()]
    kept = [g for v in red.basis.values() for g in v.tolist()]
    for g in kept:
        unit = {g: UnifiedScalar(1, 1)}
        assert _apply(tr.f, _apply(tr.g, unit)) == unit
        # g is a chain map
        assert _apply(dc, _apply(tr.g, unit)) == _apply(tr.g, _apply(dr, unit))
    for g in gens:
        unit = {g: UnifiedScalar(1, 1)}
        lhs = _apply(tr.g, _apply(tr.f, unit))
        lhs = {k: v for k, v in ((k, lhs.get(k, UnifiedScalar(0, 0)) - unit.get(k, UnifiedScalar(0, 0)))
                                for k in set(lhs) | set(unit)) if not v.is_zero()}
        a, b = _apply(dc, _apply(tr.h, unit)), _apply(tr.h, _apply(dc, unit))
        rhs = {k: v for k, v in ((k, a.get(k, UnifiedScalar(0, 0)) + b.get(k, UnifiedScalar(0, 0)))
                                for k in set(a) | set(b)) if not v.is_zero()}
        assert lhs == rhs
        assert _apply(tr.f, _apply(dc, unit)) == _apply(dr, _apply(tr.f, unit))


def test_reduction_preserves_homology():
    d = torus_knot(3, 4)
    raw = unified_complex(d, simplify=False)
    red = unified_complex(d)
    assert red.size() < raw.size()
    for theory in ("even", "odd"):
        assert homology(raw.specialize(theory)) == homology(red.specialize(theory))


def test_reduced_subcomplex_matches_direct_build():
    d = parse_pd(TREFOIL_PD).with_basepoint(1)
    cube = build_cube(d)
    full = build_unified(cube)
    direct = build_unified(cube, reduced=True)
    sub = reduced_subcomplex(full, cube)
    assert _basis(sub) == _basis(direct)
    assert _entries(sub) == _entries(direct)


def test_reduced_needs_basepoint():
    with pytest.raises(NoBasepoint):
        build_unified(build_cube(parse_pd(TREFOIL_PD)), reduced=True)


def test_json_round_trip():
    cx = unified_complex(torus_knot(3, 4))
    back = complex_from_json(complex_to_json(cx))
    assert back.content_hash() == cx.content_hash()
    assert back.info["convention"] == cx.info["convention"]


def test_one_crossing_signs():
    cube = build_cube(parse_pd("X(1,1,2,2)"))
    assert int(even_signs(cube)[0, 0]) == 1
    odd_signs(cube)


def test_trefoil_even_faces_anticommute():
    cube = build_cube(parse_pd(TREFOIL_PD))
    ev = even_signs(cube)
    for s in range(8):
        for i in range(3):
            for j in range(i + 1, 3):
                if (s >> i) & 1 or (s >> j) & 1:
                    continue
                prod = (ev[s, i] * ev[s | 1 << i, j] * ev[s, j] * ev[s | 1 << j, i])
                assert prod == -1


def test_unknot_complex():
    from khops.diagram import unknot
    cx = unified_complex(unknot())
    assert _basis(cx) == {(0, -1): [1], (0, 1): [0]}
    assert cx.nnz() == 0
    even = homology(cx.specialize("even"))
    assert sorted(even.groups) == [(0, -1), (0, 1)]
    assert all(g.rank == 1 and not g.torsion for g in even.groups.values())
    assert homology(cx.specialize("odd"))[(0, 1)].rank == 1
    r = unified_complex(unknot(), reduced=True)
    assert _basis(r) == {(0, 0): [1]}


def test_specializations_agree_mod_2():
    cx = unified_complex(torus_knot(3, 4), simplify=False)
    for part in ("even", "odd"):
        a, b = cx.specialize(part), cx.specialize("mod2")
        for bg in a.d:
            assert a.d[bg].mod(2).entries == b.d[bg].entries


def test_reduced_trefoil_odd_is_torsion_free():
    t = homology(unified_complex(parse_pd(TREFOIL_PD), reduced=True).specialize("odd"))
    assert all(not g.torsion for g in t.groups.values())


def test_reduce_sizes(targets):
    from khops.diagram import unknot
    z, _ = reduce(unified_complex(unknot(), simplify=False))
    assert z.size() == 2
    assert unified_complex(parse_pd(TREFOIL_PD)).size() <= 12
    raw = unified_complex(targets["10_124"], simplify=False)
    red = unified_complex(targets["10_124"])
    assert red.size() <= 0.05 * raw.size()


markov_words = st.integers(2, 3).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.integers(1, n - 1).flatmap(lambda g: st.sampled_from([g, -g])),
                         min_size=1, max_size=5)))


@given(markov_words, st.sampled_from([1, -1]), st.integers(0, 4))
def test_markov_moves_preserve_homology(bw, sign, shift):
    """Conjugation and stabilization of the braid do not change any table."""
    n, word = bw
    k = shift % len(word)
    conj = word[k:] + word[:k]
    stab = word + [sign * n]
    tables = []
    for strands, w in ((n, word), (n, conj), (n + 1, stab)):
        cx = unified_complex(braid_closure(strands, w))
        tables.append([homology(cx.specialize(t)) for t in ("even", "odd", "mod2")])
    assert tables[0] == tables[1] == tables[2]


@pytest.mark.parametrize("name", ["3_1", "4_1", "5_2", "6_3", "7_4"])
def test_relabelled_diagrams_agree(rolfsen, name):
    """Shifting arc labels along the knot and reordering crossings give the
    same homology."""
    d = rolfsen[name]
    m = 2 * d.n_crossings
    xs = [tuple((a + 2) % m + 1 for a in x) for x in reversed(d.crossings)]
    e = parse_pd(" ".join("X(%d,%d,%d,%d)" % x for x in xs))
    assert sorted(e.signs) == sorted(d.signs)
    a, b = unified_complex(d), unified_complex(e)
    for t in ("even", "odd"):
        assert homology(a.specialize(t)) == homology(b.specialize(t))
