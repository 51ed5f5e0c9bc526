import itertools
import random
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from wlsa import corpus
from wlsa.core import Signature, Structure, ValuedRelation, adjacency_matrix, relabel
from wlsa.errors import ValidationError
from wlsa.lp import INFEASIBLE, verify_certificate
from wlsa.wl import (check_fractional_iso, common_equitable_partition, equitable_witness, equiv1, fractional_iso_lp,
                     graph_fractional_iso, stable_coloring, verify_equitable)

TWO_LOOPS = Structure.crisp(corpus.GRAPH, ["a", "b"], {"E": [("a", "a"), ("b", "b")]})


def simple_graph(n, seed, p=0.5):
    rng = random.Random(seed)
    return corpus.graph(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < p])


def nx_graph(G):
    H = nx.Graph()
    H.add_nodes_from(G.universe)
    H.add_edges_from(G.relations["E"])
    return H


def nx_refinement_equivalent(G, H):
    """Colour refinement through networkx hashing, run long enough to stabilise."""
    n = len(G) + len(H) + 1
    return nx.weisfeiler_lehman_graph_hash(nx_graph(G), iterations=n) == \
        nx.weisfeiler_lehman_graph_hash(nx_graph(H), iterations=n)


graph_pairs = st.builds(lambda n, a, b: (simple_graph(n, a), simple_graph(n, b)),
                        st.integers(1, 6), st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))


# refinement


def test_cycle_single_class():
    col = stable_coloring(corpus.cycle(6))
    assert len(set(col.colors[:6])) == 1
    assert len(set(col.colors[6:])) == 1


def test_path_endpoints_split():
    col = stable_coloring(corpus.path(3))
    assert col.colors[0] == col.colors[2] != col.colors[1]
    assert col.rounds >= 1


def test_history_is_increasing():
    col = stable_coloring(corpus.graph_union(corpus.path(5), corpus.star_graph(3)))
    assert col.history == sorted(col.history)
    assert len(set(col.history)) == len(col.history)


def test_equiv1_examples(c6_pair):
    assert equiv1(*c6_pair)
    assert not equiv1(corpus.cycle(6), corpus.cycle(5))
    assert not equiv1(corpus.complete(2), TWO_LOOPS)


def test_equiv1_sees_weights():
    X, _, _ = corpus.example_pvcsp()
    Y = Structure.valued(X.signature, X.universe, {"R": ValuedRelation(Fraction(0), {("x", "x"): Fraction(2)})})
    assert equiv1(X, X)
    assert not equiv1(X, Y)


@given(graph_pairs)
def test_equiv1_matches_networkx(pair):
    G, H = pair
    assert equiv1(G, H) == nx_refinement_equivalent(G, H)


@given(st.integers(1, 5), st.integers(0, 10 ** 6))
def test_equiv1_invariant_under_relabelling(n, seed):
    rng = random.Random(seed)
    A = corpus.random_structure(corpus.BINARY_TERNARY, n, rng, density=0.3)
    perm = list(A.universe)
    rng.shuffle(perm)
    B = relabel(A, {a: "r" + b for a, b in zip(A.universe, perm)})
    assert equiv1(A, B)


# equitable partitions


def test_common_partition_of_cycle_pair(c6_pair):
    part = common_equitable_partition(*c6_pair)
    assert part is not None
    assert [len(cls) for cls in part.var_classes] == [12]
    vs, _ = part.split(0)
    assert [len(cls) for cls in vs] == [6]
    counts = {lk[0]: cnt for (i, j, lk), cnt in part.params["c"].items()}
    assert counts == {(1,): 2, (2,): 2}


def test_self_partition_splits_evenly():
    A = corpus.graph_union(corpus.path(4), corpus.cycle(3))
    part = common_equitable_partition(A, A)
    assert all(len(cls) % 2 == 0 for cls in part.var_classes)
    for side in (0, 1):
        vs, _ = part.split(side)
        assert sum(map(len, vs)) == len(A)


def test_no_common_partition_for_different_labels():
    assert common_equitable_partition(corpus.complete(2), TWO_LOOPS) is None


def test_stable_partition_is_equitable():
    P = corpus.path(3)
    col = stable_coloring(P)
    classes = {}
    for a, c in zip(P.universe, col.colors):
        classes.setdefault(c, []).append(a)
    cons = {}
    for j in range(len(P.constraints)):
        cons.setdefault(col.colors[len(P) + j], []).append(j)
    assert verify_equitable(P, list(classes.values()), list(cons.values())).ok


def test_merged_classes_report_violation():
    P = corpus.path(3)
    rep = verify_equitable(P, [list(P.universe)], [list(range(len(P.constraints)))])
    assert not rep.ok
    assert "class 0" in rep.witness


def test_discrete_partition_is_equitable():
    P = corpus.path(4)
    rep = verify_equitable(P, [[a] for a in P.universe], [[j] for j in range(len(P.constraints))])
    assert rep.ok


# fractional isomorphism


def test_block_witness_for_cycle_pair(c6_pair):
    A, B = c6_pair
    P, Q = equitable_witness(A, B)
    assert all(v == Fraction(1, 6) for v in P.flat)
    assert check_fractional_iso(A, B, P, Q)


def test_fractional_iso_examples(c6_pair):
    res = fractional_iso_lp(*c6_pair)
    assert res.feasible
    assert check_fractional_iso(*c6_pair, res.P, res.Q)
    A = corpus.path(4)
    same = fractional_iso_lp(A, A)
    assert same.feasible
    I4, I3 = np.eye(4, dtype=int).astype(object), np.eye(len(A.constraints), dtype=int).astype(object)
    assert check_fractional_iso(A, A, I4, I3)
    bad = fractional_iso_lp(corpus.complete(2), TWO_LOOPS)
    assert bad.status == INFEASIBLE
    assert verify_certificate(bad.lp, bad.result)


def test_size_mismatch_certificate():
    res = fractional_iso_lp(corpus.cycle(3), corpus.cycle(4))
    assert res.status == INFEASIBLE
    assert verify_certificate(res.lp, res.result)


def test_tampered_matrix_rejected(c6_pair):
    A, B = c6_pair
    P, Q = equitable_witness(A, B)
    P = P.copy()
    P[0, 0] += Fraction(1, 6)
    P[0, 1] -= Fraction(1, 6)
    assert not check_fractional_iso(A, B, P, Q)


@given(st.integers(1, 3), st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_three_way_agreement(n, a, b):
    A = corpus.random_structure(corpus.GRAPH, n, random.Random(a), density=0.4)
    B = corpus.random_structure(corpus.GRAPH, n, random.Random(b), density=0.4, prefix="b")
    e = equiv1(A, B)
    res = fractional_iso_lp(A, B)
    assert res.feasible == e == (common_equitable_partition(A, B) is not None)
    if res.feasible:
        assert check_fractional_iso(A, B, res.P, res.Q)


def test_graph_level_examples(c6_pair):
    G, H = c6_pair
    res = graph_fractional_iso(G, H)
    assert res.feasible
    P = res.P
    assert np.array_equal(P.dot(adjacency_matrix(G).astype(object)), adjacency_matrix(H).astype(object).dot(P))
    c4, k2k2 = corpus.cycle(4), corpus.graph(4, [(0, 1), (2, 3)])
    bad = graph_fractional_iso(c4, k2k2)
    assert bad.status == INFEASIBLE
    assert verify_certificate(bad.lp, bad.result)
    assert graph_fractional_iso(G, G).feasible


def test_graph_level_rejects_loops():
    with pytest.raises(ValidationError):
        graph_fractional_iso(corpus.loop(), corpus.loop())


@given(graph_pairs)
def test_graph_level_matches_structure_level(pair):
    G, H = pair
    assert graph_fractional_iso(G, H).feasible == fractional_iso_lp(G, H).feasible == equiv1(G, H)


def test_ternary_signature():
    sig = Signature.of(("T", 3))
    A = Structure.crisp(sig, ["0", "1", "2"], {"T": [("0", "1", "2")]})
    B = Structure.crisp(sig, ["0", "1", "2"], {"T": [("2", "0", "1")]})
    C = Structure.crisp(sig, ["0", "1", "2"], {"T": [("0", "0", "1")]})
    assert equiv1(A, B) and fractional_iso_lp(A, B).feasible
    assert not equiv1(A, C) and not fractional_iso_lp(A, C).feasible
