import random

import pytest
from hypothesis import given, settings, strategies as st

from wlsa import corpus
from wlsa.errors import BudgetExceeded, ValidationError
from wlsa.lp import solve
from wlsa.relax import build_sa1, build_sak
from wlsa.stark import Fact, equiv_k, star_k, star_k_simplified, star_size
from wlsa.wl import equiv1


def test_projection_relation_of_edge():
    S = star_k(corpus.complete(2), 2).structure
    assert S.relations["E>2,1"] == {(Fact("E", ("0", "1")), ("1", "0")), (Fact("E", ("1", "0")), ("0", "1"))}


def test_universe_layers():
    A = corpus.cycle(3)
    star = star_k(A, 2)
    # 3 singletons, 9 pairs, 6 constraint elements
    assert len(star.structure) == 3 + 9 + 6 == star_size(A, 2)
    assert all(star.origin[t] == t for t in star.structure.universe if isinstance(t, tuple))


def test_constant_markers():
    S = star_k(corpus.loop(), 2).structure
    assert S.relations["E[1,2]"] == {(Fact("E", ("0", "0")),)}
    assert S.relations["T2[1,2]"] == {(("0", "0"),)}


def test_simplified_needs_small_arity():
    with pytest.raises(ValidationError):
        star_k_simplified(corpus.random_structure(corpus.BINARY_TERNARY, 2, random.Random(0)), 2)


def test_star_budget():
    with pytest.raises(BudgetExceeded):
        star_k(corpus.cycle(6), 3, budget=50)


def test_star_rejects_valued():
    X, _, _ = corpus.example_pvcsp()
    with pytest.raises(ValidationError):
        star_k(X, 2)


def test_equivalence_examples(c6_pair):
    assert equiv_k(*c6_pair, 1)
    assert equiv_k(*c6_pair, 2)
    assert not equiv_k(*c6_pair, 3)
    A = corpus.path(4)
    assert all(equiv_k(A, A, k) for k in (1, 2, 3))


def test_level_one_is_refinement(c6_pair):
    assert equiv_k(*c6_pair, 1) == equiv1(*c6_pair)


def small_graph_pairs(max_n):
    return st.builds(lambda n, a, b: (corpus.random_structure(corpus.GRAPH, n, random.Random(a), density=0.4),
                                      corpus.random_structure(corpus.GRAPH, n, random.Random(b), density=0.4,
                                                              prefix="b")),
                     st.integers(1, max_n), st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))


@settings(max_examples=25)
@given(small_graph_pairs(3))
def test_simplified_and_full_agree(pair):
    A, B = pair
    assert equiv_k(A, B, 2) == equiv_k(A, B, 2, simplified=True)


@settings(max_examples=25)
@given(small_graph_pairs(3))
def test_equivalence_levels_nest(pair):
    A, B = pair
    e = [equiv_k(A, B, k) for k in (1, 2, 3)]
    assert e[2] <= e[1] <= e[0]


@settings(max_examples=20)
@given(st.integers(0, 10 ** 6))
def test_level_two_through_star(seed):
    rng = random.Random(seed)
    X = corpus.random_sparse_structure(corpus.GRAPH, rng.randint(1, 3), rng, max_tuples=4, prefix="x")
    A = corpus.random_structure(corpus.GRAPH, rng.randint(1, 2), rng, density=0.5)
    direct = solve(build_sak(X, A, 2)).feasible
    packed = solve(build_sa1(star_k(X, 2).structure, star_k(A, 2).structure)).feasible
    assert direct == packed


def test_equivalent_instances_share_level_two_answers(c6_pair):
    # level-2 equivalent instances get the same level-2 verdict against every small template
    X, Y = c6_pair
    for A in (corpus.complete(2), corpus.cycle(3), corpus.path(3)):
        assert solve(build_sak(X, A, 2)).feasible == solve(build_sak(Y, A, 2)).feasible
