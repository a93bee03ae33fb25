import random

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from khops.complex import unified_complex
from khops.diagram import braid_closure, parse_pd, unknot
from khops.operations import Engine, TypeMismatch, UnknownOperation, compose, parse_word

from conftest import TREFOIL_PD
from properties import (check_basepoints, check_bocksteins, check_lifts, check_representatives,
                        check_uct)


def test_parse_word():
    assert parse_word("beta^3") == ["beta"] * 3
    assert parse_word("βe βo") == ["beta_e", "beta_o"]
    assert parse_word("beta_e*beta_o") == ["beta_e", "beta_o"]
    assert parse_word("phi_oe phi_eo") == ["phi_oe", "phi_eo"]


@pytest.mark.parametrize("word", ["gamma", "", "beta^", "beta_x"])
def test_unknown_words(word):
    with pytest.raises(UnknownOperation):
        parse_word(word)


@pytest.mark.parametrize("word", ["phi_eo phi_eo", "beta phi_eo", "theta_e phi_eo"])
def test_type_mismatch(word):
    with pytest.raises(TypeMismatch):
        parse_word(word)


def test_compose_checks_types():
    eng = Engine(unified_complex(parse_pd(TREFOIL_PD)))
    with pytest.raises(TypeMismatch):
        compose(eng.letter("phi_eo"), eng.letter("beta"), eng)


def test_unknot_operations_vanish():
    eng = Engine(unified_complex(unknot()))
    for w in ("beta_e", "beta_o", "beta", "phi_eo", "phi_oe", "theta_e", "theta_o"):
        assert eng.rank_table(w).ranks == {}


def test_figure_eight_has_no_odd_bockstein(rolfsen):
    eng = Engine(unified_complex(rolfsen["4_1"]))
    assert eng.rank_table("beta_o").ranks == {}


def test_trefoil():
    eng = Engine(unified_complex(parse_pd(TREFOIL_PD)))
    # even homology of the left-handed trefoil has one Z2, at (-2,-7)
    assert eng.homology("even")[(-2, -7)].torsion == (2,)
    assert eng.rank_table("beta_e").ranks == {(-3, -7): 1}
    red = Engine(unified_complex(parse_pd(TREFOIL_PD), reduced=True))
    for w in ("beta_e", "beta_o", "beta"):
        assert red.rank_table(w).ranks == {}


def test_theta_is_a_composite():
    eng = Engine(unified_complex(braid_closure(3, [1, 1, 1, 2, 1, 1, 1, 2])))
    assert eng.rank_table("theta_o") == eng.rank_table("phi_eo phi_oe")
    assert eng.rank_table("theta_e") == eng.rank_table("phi_oe phi_eo")
    assert eng.word("theta_o").degree == 2


def test_operations_keep_q():
    eng = Engine(unified_complex(braid_closure(3, [1, 1, 1, 2, 1, 1, 1, 2])))
    for w in ("beta", "phi_eo", "theta_o"):
        op = eng.word(w)
        for bg in op.blocks:
            assert op.target_of(bg)[1] == bg[1]


braid_words = st.integers(2, 4).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.integers(1, n - 1).flatmap(lambda g: st.sampled_from([g, -g])),
                         min_size=1, max_size=6)))


@settings(max_examples=25, suppress_health_check=[HealthCheck.too_slow])
@given(braid_words, st.randoms(use_true_random=False))
def test_operation_identities_on_random_diagrams(bw, rnd):
    d = braid_closure(*bw)
    eng = Engine(unified_complex(d))
    check_uct(eng)
    check_bocksteins(eng)
    check_lifts(eng)
    check_representatives(eng, random.Random(rnd.random()))


@settings(max_examples=15, suppress_health_check=[HealthCheck.too_slow])
@given(braid_words)
def test_reduced_data_independent_of_basepoint(bw):
    d = braid_closure(*bw)
    if d.components == 1 and d.n_crossings:
        check_basepoints(d)


def test_binomial_prediction_for_10_124_squared(targets):
    """Four alternating Bocksteins survive on u x u' while beta^4 vanishes."""
    import numpy as np
    from kunneth import tensor_operator

    eng = Engine(unified_complex(targets["10_124"]))
    pairs, te = tensor_operator(eng, eng, "beta_e")
    _, to = tensor_operator(eng, eng, "beta_o")
    u, u2 = ((2, 13), 0), ((5, 19), 0)
    x = np.zeros(len(pairs), dtype=np.int64)
    x[pairs.index((u, u2))] = 1
    oeoe = to @ (te @ (to @ (te @ x) % 2) % 2) % 2
    eoeo = te @ (to @ (te @ (to @ x) % 2) % 2) % 2
    assert oeoe.any() and np.array_equal(oeoe, eoeo)
    # the image is beta_o beta_e (u) x beta_e beta_o (u'), both at homological degree 4+7
    assert {(pairs[k][0][0], pairs[k][1][0]) for k in np.flatnonzero(oeoe)} == {((4, 13), (7, 19))}
    beta = (te + to) % 2
    b4 = np.linalg.matrix_power(beta, 4) % 2
    assert not b4.any()
