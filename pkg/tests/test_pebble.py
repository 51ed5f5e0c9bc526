import random

import pytest
from hypothesis import given, settings, strategies as st

from wlsa import corpus
from wlsa.core import check_isomorphism, count_homomorphisms, relabel
from wlsa.errors import BudgetExceeded, ValidationError
from wlsa.pebble import (TreeDecomposition, enumerate_treewidth_structures, find_distinguisher, perfect_matching,
                         strategy_fixpoint, winning_strategy)
from wlsa.stark import equiv_k


def pair_strategy(max_n):
    def build(n, a, b, copy):
        A = corpus.random_structure(corpus.GRAPH, n, random.Random(a), density=0.4)
        if copy:
            rng = random.Random(b)
            perm = list(A.universe)
            rng.shuffle(perm)
            return A, relabel(A, {x: "r" + y for x, y in zip(A.universe, perm)})
        return A, corpus.random_structure(corpus.GRAPH, n, random.Random(b), density=0.4, prefix="b")
    return st.builds(build, st.integers(1, max_n), st.integers(0, 10 ** 6), st.integers(0, 10 ** 6), st.booleans())


def test_perfect_matching():
    assert perfect_matching(3, [[0, 1], [0], [2]]) == [1, 0, 2]
    assert perfect_matching(2, [[0], [0]]) is None


def test_identity_strategy_survives():
    A = corpus.path(4)
    S = winning_strategy(A, A, 2)
    assert S is not None and S.verify(A, A)
    assert all((tuple(a), tuple(a)) in S.pairs for a in [(x,) for x in A.universe])


def test_cycle_pair(c6_pair):
    A, B = c6_pair
    S = winning_strategy(A, B, 2)
    assert S is not None and S.verify(A, B)
    assert winning_strategy(A, B, 3) is None


def test_schedules_agree(c6_pair):
    for k in (2, 3):
        a = strategy_fixpoint(*c6_pair, k, method="worklist")
        b = strategy_fixpoint(*c6_pair, k, method="rounds")
        assert a.pairs == b.pairs


def test_rounds_history_shrinks(c6_pair):
    S = strategy_fixpoint(*c6_pair, 3, method="rounds")
    assert S.history == sorted(S.history, reverse=True)
    assert S.history[-1] == len(S) == 0


def test_tampered_strategy_rejected(c6_pair):
    A, B = c6_pair
    S = winning_strategy(A, B, 2)
    dropped = next(p for p in S.pairs if len(p[0]) == 1)
    S.pairs = S.pairs - {dropped}
    assert not S.verify(A, B)


def test_inputs_checked():
    X, _, _ = corpus.example_pvcsp()
    with pytest.raises(ValidationError):
        winning_strategy(X, X, 2)
    with pytest.raises(BudgetExceeded):
        winning_strategy(corpus.cycle(8), corpus.cycle(8), 3, budget=1000)


def test_size_mismatch_loses():
    assert winning_strategy(corpus.cycle(3), corpus.cycle(4), 2) is None


@settings(max_examples=30)
@given(pair_strategy(3))
def test_game_matches_level_equivalence(pair):
    A, B = pair
    for k in (2, 3):
        S = winning_strategy(A, B, k)
        assert (S is not None) == equiv_k(A, B, k)
        if S is not None:
            assert S.verify(A, B)


@settings(max_examples=30)
@given(pair_strategy(3))
def test_enough_pebbles_decide_isomorphism(pair):
    A, B = pair
    assert (winning_strategy(A, B, len(A)) is not None) == (check_isomorphism(A, B) is not None)


@settings(max_examples=20)
@given(pair_strategy(4))
def test_more_pebbles_never_help_duplicator(pair):
    A, B = pair
    wins = [winning_strategy(A, B, k) is not None for k in (1, 2, 3)]
    assert wins[2] <= wins[1] <= wins[0]


# bounded treewidth


def test_stream_contains_small_trees():
    stream = [S for S, _ in enumerate_treewidth_structures(corpus.GRAPH, 3, 2)]
    for tree in (corpus.path(1), corpus.path(2), corpus.path(3)):
        assert any(len(S) == len(tree) and check_isomorphism(S, tree) is not None for S in stream)


def test_stream_decompositions_valid():
    for S, dec in enumerate_treewidth_structures(corpus.GRAPH, 4, 3, symmetric=True):
        assert dec.verify(S)
        assert dec.width <= 2


def test_decomposition_checks():
    C3 = corpus.cycle(3)
    good = TreeDecomposition((frozenset(C3.universe),), ())
    assert good.verify(C3) and good.width == 2
    split = TreeDecomposition((frozenset({"0", "1"}), frozenset({"1", "2"})), ((0, 1),))
    assert not split.verify(C3)


def test_triangle_distinguishes(c6_pair):
    d = find_distinguisher(*c6_pair, 3)
    assert d is not None
    assert d.counts == (0, 12)
    assert check_isomorphism(d.structure, corpus.cycle(3)) is not None
    assert d.decomposition.verify(d.structure) and d.decomposition.width < 3
    assert d.counts == (count_homomorphisms(d.structure, c6_pair[0]), count_homomorphisms(d.structure, c6_pair[1]))


def test_trees_do_not_distinguish(c6_pair):
    assert find_distinguisher(*c6_pair, 2, max_elems=6, budget=5000) is None


def test_self_pair_has_no_distinguisher():
    A = corpus.path(3)
    assert find_distinguisher(A, A, 2, budget=500) is None
