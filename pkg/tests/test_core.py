import itertools
import json
import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from wlsa import corpus
from wlsa.core import (INF, Signature, Structure, ValuedRelation, check_isomorphism, count_homomorphisms,
                       disjoint_union, dump_structure, factor_graph, find_homomorphism, is_homomorphism,
                       load_structure, matrix_slice, opt_value, parse_value, format_value, relabel, value_of_map)
from wlsa.core.structure import Label
from wlsa.errors import BudgetExceeded, ValidationError


def brute_homs(X, A):
    """Every map checked tuple by tuple; no pruning."""
    out = []
    for img in itertools.product(A.universe, repeat=len(X)):
        h = dict(zip(X.universe, img))
        if all(A.holds(c.symbol, tuple(h[x] for x in c.scope)) for c in X.constraints):
            out.append(h)
    return out


def brute_opt(X, A):
    best = INF
    for img in itertools.product(A.universe, repeat=len(X)):
        h = dict(zip(X.universe, img))
        total = Fraction(0)
        for c in X.constraints:
            v = A.value(c.symbol, tuple(h[x] for x in c.scope))
            if v is INF:
                total = INF
                break
            total += c.weight * v
        if total is not INF and (best is INF or total < best):
            best = total
    return best


def to_nx(G):
    H = nx.DiGraph()
    H.add_nodes_from(G.universe)
    H.add_edges_from(G.relations["E"])
    return H


small_graphs = st.builds(
    lambda n, seed, d: corpus.random_structure(corpus.GRAPH, n, random.Random(seed), density=d),
    st.integers(1, 4), st.integers(0, 10 ** 6), st.sampled_from([0.2, 0.4, 0.6]))


# reading and writing


K2_DOC = {"signature": [{"name": "E", "arity": 2}], "universe": ["0", "1"], "kind": "crisp",
          "relations": {"E": [["0", "1"], ["1", "0"]]}}


def test_read_k2():
    K2 = load_structure(K2_DOC)
    assert len(K2) == 2
    assert len(K2.constraints) == 2


def test_arity_mismatch_rejected():
    doc = json.loads(json.dumps(K2_DOC))
    doc["relations"]["E"].append(["0", "1", "0"])
    with pytest.raises(ValidationError):
        load_structure(doc)


def test_valued_template_file():
    doc = {"signature": [{"name": "R", "arity": 2}], "universe": ["0", "1"], "kind": "valued",
           "relations": {"R": {"default": "2", "entries": [{"tuple": ["0", "0"], "value": "3"},
                                                            {"tuple": ["1", "1"], "value": "3"}]}}}
    A = load_structure(doc)
    assert not A.is_crisp
    assert A.value("R", ("0", "0")) == 3
    assert A.value("R", ("0", "1")) == 2


def test_valued_relation_needs_default():
    doc = {"signature": [{"name": "R", "arity": 1}], "universe": ["0"], "kind": "valued",
           "relations": {"R": {"entries": []}}}
    with pytest.raises(ValidationError):
        load_structure(doc)


def test_empty_relation_needs_opt_in():
    doc = json.loads(json.dumps(K2_DOC))
    doc["relations"]["E"] = []
    with pytest.raises(ValidationError):
        load_structure(doc)
    assert len(load_structure(doc, allow_empty=True).constraints) == 0


@pytest.mark.parametrize("text,value", [("3", Fraction(3)), ("1/2", Fraction(1, 2)), ("-2/3", Fraction(-2, 3))])
def test_parse_value(text, value):
    assert parse_value(text) == value
    assert parse_value(format_value(value)) == value


def test_non_canonical_rational_rejected():
    with pytest.raises(ValueError):
        parse_value("-4/6")


def test_parse_infinity():
    assert parse_value("inf") is INF
    assert format_value(INF) == "inf"


@given(small_graphs)
def test_dump_load_round_trip(A):
    assert load_structure(dump_structure(A), allow_empty=True) == A


def test_dump_load_valued_round_trip():
    X, A, B = corpus.example_pvcsp()
    for S in (X, A, B):
        assert load_structure(dump_structure(S)) == S


# structure operations


def test_union_sizes():
    U = corpus.graph_union(corpus.cycle(3), corpus.cycle(3))
    assert len(U) == 6
    assert len(U.constraints) == 12


def test_union_adds_tree_counts():
    edge = corpus.path(2)
    A, B = corpus.cycle(5), corpus.complete(3)
    U = disjoint_union(A, B)
    assert count_homomorphisms(edge, U) == len(brute_homs(edge, A)) + len(brute_homs(edge, B))


def test_factor_graph_of_loop():
    fg = factor_graph(corpus.loop())
    assert len(fg.variables) == 1 and len(fg.constraints) == 1
    edges = list(fg.edges())
    assert len(edges) == 1
    assert edges[0][2] == Label((1, 2), "E")


def test_factor_graph_of_k2():
    fg = factor_graph(corpus.complete(2))
    labels = sorted(lab.positions for _, _, lab in fg.edges())
    assert fg.n_vertices == 4
    assert labels == [(1,), (1,), (2,), (2,)]


def test_valued_edge_label_carries_weight():
    X, _, _ = corpus.example_pvcsp()
    (_, _, lab), = factor_graph(X).edges()
    assert lab == Label((1, 2), "R", Fraction(1))


def test_matrix_slice_columns():
    K2 = corpus.complete(2)
    M = matrix_slice(K2, Label((1,), "E"))
    assert M.shape == (2, 2)
    assert list(M.sum(axis=0)) == [1, 1]
    assert not matrix_slice(corpus.loop(), Label((1,), "E")).any()


@given(small_graphs)
def test_slice_column_sums_count_distinct_scope_entries(A):
    labels = {lab for _, _, lab in factor_graph(A).edges()}
    total = sum(matrix_slice(A, lab) for lab in labels) if labels else None
    for j, c in enumerate(A.constraints):
        assert total[:, j].sum() == len(set(c.scope))


# homomorphisms


def test_homomorphism_examples():
    K2 = corpus.complete(2)
    assert find_homomorphism(K2, K2) is not None
    assert find_homomorphism(corpus.loop(), K2) is None
    C6, C33 = corpus.cycle(6), corpus.graph_union(corpus.cycle(3), corpus.cycle(3))
    h = find_homomorphism(C6, C33)
    assert h is not None and is_homomorphism(C6, C33, h)


@pytest.mark.parametrize("n", range(3, 9))
def test_cycle_colourings_closed_form(n):
    # proper 3-colourings of an n-cycle: 2^n + 2(-1)^n
    assert count_homomorphisms(corpus.cycle(n), corpus.complete(3)) == 2 ** n + 2 * (-1) ** n


def test_triangle_counts():
    C3 = corpus.cycle(3)
    assert count_homomorphisms(C3, C3) == 6
    assert count_homomorphisms(C3, corpus.cycle(6)) == 0
    assert count_homomorphisms(C3, corpus.graph_union(C3, C3)) == 12


@given(small_graphs, small_graphs)
def test_counts_match_enumeration(X, A):
    assert count_homomorphisms(X, A) == len(brute_homs(X, A))
    assert (find_homomorphism(X, A) is None) == (not brute_homs(X, A))


def test_hom_budget():
    with pytest.raises(BudgetExceeded):
        count_homomorphisms(corpus.cycle(8), corpus.complete(4), budget=100)


# valued


def test_example_value_of_loop():
    X, A, B = corpus.example_pvcsp()
    assert value_of_map(X, A, {"x": "0"}) == 3
    assert opt_value(X, A)[0] == 3
    assert opt_value(X, B)[0] == 3


def test_zero_instance_costs_nothing():
    _, A, _ = corpus.example_pvcsp()
    Z = Structure.valued(A.signature, ["x", "y"], {"R": ValuedRelation(Fraction(0), {})})
    for h in ({"x": "0", "y": "0"}, {"x": "0", "y": "1"}):
        assert value_of_map(Z, A, h) == 0


def test_infinite_cost_propagates():
    sig = Signature.of(("R", 1))
    A = Structure.valued(sig, ["0", "1"], {"R": ValuedRelation(Fraction(0), {("1",): INF})})
    X = Structure.valued(sig, ["x"], {"R": ValuedRelation(Fraction(0), {("x",): Fraction(1, 2)})})
    assert value_of_map(X, A, {"x": "1"}) is INF
    assert opt_value(X, A)[0] == 0


@given(st.integers(0, 10 ** 6))
def test_opt_matches_enumeration(seed):
    rng = random.Random(seed)
    X = corpus.random_valued_instance(corpus.GRAPH, rng.randint(1, 3), rng)
    A = corpus.random_valued_template(corpus.GRAPH, rng.randint(1, 3), rng)
    val, h = opt_value(X, A)
    assert val == brute_opt(X, A)
    if val is not INF:
        assert value_of_map(X, A, h) == val


def test_negative_template_costs_accepted():
    sig = Signature.of(("R", 1))
    A = Structure.valued(sig, ["0", "1"], {"R": ValuedRelation(Fraction(0), {("1",): Fraction(-1)})})
    X = Structure.valued(sig, ["x"], {"R": ValuedRelation(Fraction(0), {("x",): Fraction(1)})})
    assert opt_value(X, A)[0] == -1


def test_negative_instance_weights_rejected():
    sig = Signature.of(("R", 1))
    A = Structure.valued(sig, ["0"], {"R": ValuedRelation(Fraction(0), {})})
    X = Structure.valued(sig, ["x"], {"R": ValuedRelation(Fraction(0), {("x",): Fraction(-1)})})
    with pytest.raises(ValidationError):
        opt_value(X, A)


# isomorphism


def test_isomorphism_examples(c6_pair):
    C3 = corpus.cycle(3)
    R = relabel(C3, {"0": "a", "1": "b", "2": "c"})
    assert check_isomorphism(C3, R) is not None
    assert check_isomorphism(*c6_pair) is None
    A = corpus.path(4)
    assert check_isomorphism(A, A) is not None


@given(small_graphs, small_graphs)
def test_isomorphism_matches_networkx(A, B):
    iso = check_isomorphism(A, B)
    assert (iso is not None) == nx.is_isomorphic(to_nx(A), to_nx(B))
    if iso is not None:
        assert is_homomorphism(A, B, iso)
