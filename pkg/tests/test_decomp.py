import random
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from wlsa import corpus
from wlsa.core import Structure, ValuedRelation, find_homomorphism, is_homomorphism
from wlsa.core.structure import as_instance, as_template, support
from wlsa.decomp import compose_chain, decompose_crisp, decompose_valued, verify_decomposition
from wlsa.errors import ValidationError
from wlsa.lp import solve
from wlsa.relax import build_sa1, build_valued_sa1, con_var, elem_var
from wlsa.wl import equiv1


def uniform_solution(X, A):
    lp = build_sa1(X, A)
    sol = {v: Fraction(0) for v in lp.variables}
    edges = A.tuples("E")
    for x in X.universe:
        for a in A.universe:
            sol[elem_var(x, a)] = Fraction(1, len(A))
    for i, _ in enumerate(X.constraints):
        for t in edges:
            sol[con_var(i, t)] = Fraction(1, len(edges))
    assert lp.satisfied_by(sol)
    return sol


def all_pass(report):
    return all(report.values())


def test_identity_decomposition():
    K2 = corpus.complete(2)
    lp = build_sa1(K2, K2)
    sol = {v: Fraction(0) for v in lp.variables}
    for x in K2.universe:
        sol[elem_var(x, x)] = Fraction(1)
    for i, c in enumerate(K2.constraints):
        sol[con_var(i, c.scope)] = Fraction(1)
    w = decompose_crisp(K2, K2, sol)
    assert w.m == 1
    assert len(w.Y1) == len(w.Y2) == 2
    assert all(w.h2[(1, x)] == x for x in K2.universe)
    assert all_pass(verify_decomposition(K2, K2, w))


def test_uniform_cycle_solution():
    X, A = corpus.cycle(6), corpus.cycle(3)
    w = decompose_crisp(X, A, uniform_solution(X, A))
    # six arcs of mass 1/6 each
    assert w.m == 6
    assert len(w.Y1) == 36
    assert all(is_homomorphism(X, w.Y1, h) for h in w.copy_maps)
    assert equiv1(w.Y1, w.Y2)
    assert is_homomorphism(w.Y2, A, w.h2)
    assert all_pass(verify_decomposition(X, A, w))


def test_edge_into_triangle():
    X, A = corpus.complete(2), corpus.cycle(3)
    w = decompose_crisp(X, A, uniform_solution(X, A))
    assert w.m == 6
    assert all_pass(verify_decomposition(X, A, w))


def test_rejects_non_solution():
    X, A = corpus.cycle(6), corpus.cycle(3)
    sol = uniform_solution(X, A)
    sol[elem_var("0", "0")] += 1
    with pytest.raises(ValidationError):
        decompose_crisp(X, A, sol)


def test_valued_example_diagonal_half():
    X, A, _ = corpus.example_pvcsp()
    lp = build_valued_sa1(X, A)
    sol = {v: Fraction(0) for v in lp.variables}
    sol[elem_var("x", "0")] = sol[elem_var("x", "1")] = Fraction(1, 2)
    sol[con_var(0, ("0", "0"))] = sol[con_var(0, ("1", "1"))] = Fraction(1, 2)
    w = decompose_valued(X, A, sol)
    assert w.m == 2
    assert w.value == 3
    assert all_pass(verify_decomposition(X, A, w))


def test_valued_zero_instance():
    _, A, _ = corpus.example_pvcsp()
    Z = Structure.valued(A.signature, ["x"], {"R": ValuedRelation(Fraction(0), {})})
    w = decompose_valued(Z, A, solve(build_valued_sa1(Z, A)).assignment)
    assert (w.m, w.value) == (1, 0)


def test_valued_rejects_suboptimal_point():
    X, _, _ = corpus.example_pvcsp()
    A = Structure.valued(X.signature, ["0", "1"], {"R": ValuedRelation(Fraction(0), {("1", "1"): Fraction(1)})})
    lp = build_valued_sa1(X, A)
    sol = {v: Fraction(0) for v in lp.variables}
    sol[elem_var("x", "1")] = Fraction(1)
    sol[con_var(0, ("1", "1"))] = Fraction(1)
    assert lp.satisfied_by(sol)
    with pytest.raises(ValidationError):
        decompose_valued(X, A, sol)


def test_crisp_as_valued_matches_crisp():
    X, A = corpus.cycle(6), corpus.cycle(3)
    sol = uniform_solution(X, A)
    crisp = decompose_crisp(X, A, sol)
    valued = decompose_valued(as_instance(X), as_template(A), sol)
    assert valued.m == crisp.m
    assert support(valued.Y1) == crisp.Y1
    assert support(valued.Y2) == crisp.Y2


def test_deleting_a_y2_tuple_breaks_equivalence():
    X, A = corpus.cycle(6), corpus.cycle(3)
    w = decompose_crisp(X, A, uniform_solution(X, A))
    E = sorted(w.Y2.relations["E"], key=w.Y2.tuple_key)
    Y2 = Structure.crisp(w.Y2.signature, w.Y2.universe, {"E": E[1:]})
    report = verify_decomposition(X, A, replace(w, Y2=Y2))
    assert not report["y1_equiv_y2"]


def test_perturbed_h2_fails():
    X, A = corpus.cycle(6), corpus.cycle(3)
    w = decompose_crisp(X, A, uniform_solution(X, A))
    h2 = dict(w.h2)
    y = next(iter(h2))
    h2[y] = next(a for a in A.universe if a != h2[y])
    assert not verify_decomposition(X, A, replace(w, h2=h2))["y2_to_a"]


def test_chain_from_plain_homomorphism():
    X, A = corpus.cycle(6), corpus.complete(2)
    h = find_homomorphism(X, A)
    identity = {x: x for x in X.universe}
    sol = compose_chain(X, A, identity, X, X, h)
    assert build_sa1(X, A).satisfied_by(sol)


def test_chain_needs_equivalent_middle():
    X, A = corpus.cycle(6), corpus.cycle(3)
    assert compose_chain(X, A, {x: x for x in X.universe}, X, corpus.cycle(5), {}) is None


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6))
def test_crisp_round_trip(seed):
    rng = random.Random(seed)
    sig = corpus.GRAPH if seed % 3 else corpus.BINARY_TERNARY
    X = corpus.random_sparse_structure(sig, rng.randint(1, 4), rng, max_tuples=4, prefix="x")
    A = corpus.random_structure(sig, rng.randint(1, 3), rng, density=0.5)
    res = solve(build_sa1(X, A))
    if not res.feasible:
        assert find_homomorphism(X, A) is None
        return
    w = decompose_crisp(X, A, res.assignment)
    assert all_pass(verify_decomposition(X, A, w))
    back = compose_chain(X, A, w.copy_maps[0], w.Y1, w.Y2, w.h2)
    assert build_sa1(X, A).satisfied_by(back)


@settings(max_examples=20)
@given(st.integers(0, 10 ** 6))
def test_valued_round_trip(seed):
    rng = random.Random(seed)
    X = corpus.random_valued_instance(corpus.GRAPH, rng.randint(1, 3), rng)
    A = corpus.random_valued_template(corpus.GRAPH, rng.randint(1, 3), rng, costs=(0, 1, 2, Fraction(1, 2)))
    res = solve(build_valued_sa1(X, A))
    w = decompose_valued(X, A, res.assignment)
    assert w.value == res.value
    assert all_pass(verify_decomposition(X, A, w))
