"""Named structures and seeded random generators used by tests and reports."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .core import INF, Signature, Structure, ValuedRelation

GRAPH = Signature.of(("E", 2))
BINARY_TERNARY = Signature.of(("E", 2), ("T", 3))


def _names(n: int, prefix: str = "") -> List[str]:
    return [f"{prefix}{i}" for i in range(n)]


def graph(n: int, edges: Sequence[Tuple[int, int]], prefix: str = "") -> Structure:
    """Undirected graph on ``0..n-1``: each edge is stored in both directions."""
    U = _names(n, prefix)
    E = set()
    for u, v in edges:
        E.add((U[u], U[v]))
        E.add((U[v], U[u]))
    return Structure.crisp(GRAPH, U, {"E": sorted(E)}, allow_empty=True)


def cycle(n: int) -> Structure:
    return graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Structure:
    return graph(n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int) -> Structure:
    return graph(n, list(itertools.combinations(range(n), 2)))


def star_graph(leaves: int) -> Structure:
    return graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def loop() -> Structure:
    return Structure.crisp(GRAPH, ["0"], {"E": [("0", "0")]})


def graph_union(*parts: Structure) -> Structure:
    """Disjoint union of graphs with elements renamed ``0..n-1`` in order."""
    n = 0
    edges = []
    for G in parts:
        idx = G.index
        edges.extend((n + idx[u], n + idx[v]) for u, v in G.relations["E"])
        n += len(G)
    return graph(n, edges)


def example_pvcsp() -> Tuple[Structure, Structure, Structure]:
    """The one-loop instance X and the two-element templates A, B.

    Both templates cost 3 on the diagonal; off the diagonal A costs 2 and B
    costs 0.  X is a single element with a weight-1 loop.
    """
    sig = Signature.of(("R", 2))
    U = ["0", "1"]
    A = Structure.valued(sig, U, {"R": ValuedRelation(Fraction(2), {("0", "0"): Fraction(3), ("1", "1"): Fraction(3)})})
    B = Structure.valued(sig, U, {"R": ValuedRelation(Fraction(0), {("0", "0"): Fraction(3), ("1", "1"): Fraction(3)})})
    X = Structure.valued(sig, ["x"], {"R": ValuedRelation(Fraction(0), {("x", "x"): Fraction(1)})})
    return X, A, B


HORN = Signature.of(("N", 3), ("H", 3), ("F", 1), ("T", 1))


def horn3sat() -> Structure:
    """Boolean template: ``N`` is not-x or not-y or not-z, ``H`` is not-x or not-y or z, plus constants."""
    U = ["0", "1"]
    cube = list(itertools.product(U, repeat=3))
    return Structure.crisp(HORN, U, {
        "N": [t for t in cube if t != ("1", "1", "1")],
        "H": [t for t in cube if t != ("1", "1", "0")],
        "F": [("0",)],
        "T": [("1",)],
    })


def random_structure(sig: Signature, n: int, rng: random.Random, density: float = 0.3,
                     prefix: str = "") -> Structure:
    """Each possible tuple is present independently with probability ``density``."""
    U = _names(n, prefix)
    rels = {}
    for R, r in sig:
        rels[R] = [t for t in itertools.product(U, repeat=r) if rng.random() < density]
    return Structure.crisp(sig, U, rels, allow_empty=True)


def random_sparse_structure(sig: Signature, n: int, rng: random.Random, max_tuples: int = 3,
                            prefix: str = "") -> Structure:
    """At most ``max_tuples`` tuples per symbol, drawn uniformly."""
    U = _names(n, prefix)
    rels = {}
    for R, r in sig:
        cand = list(itertools.product(U, repeat=r))
        rels[R] = rng.sample(cand, rng.randint(0, min(max_tuples, len(cand))))
    return Structure.crisp(sig, U, rels, allow_empty=True)


def random_valued_instance(sig: Signature, n: int, rng: random.Random,
                           weights: Sequence = (0, 1, 2, Fraction(1, 2)), density: float = 0.4) -> Structure:
    U = _names(n)
    rels = {}
    for R, r in sig:
        entries = {}
        for t in itertools.product(U, repeat=r):
            if rng.random() < density:
                w = Fraction(rng.choice(list(weights)))
                if w:
                    entries[t] = w
        rels[R] = ValuedRelation(Fraction(0), entries)
    return Structure.valued(sig, U, rels)


def random_valued_template(sig: Signature, n: int, rng: random.Random,
                           costs: Sequence = (0, 1, 2, Fraction(1, 2), INF)) -> Structure:
    U = _names(n)
    rels = {}
    for R, r in sig:
        entries = {}
        for t in itertools.product(U, repeat=r):
            v = rng.choice(list(costs))
            entries[t] = v if v is INF else Fraction(v)
        rels[R] = ValuedRelation(Fraction(0), entries)
    return Structure.valued(sig, U, rels)


def random_regular_pair(rng: random.Random) -> Tuple[Structure, Structure]:
    """Two 2-regular graphs on the same number of vertices from random cycle splits."""
    n = rng.randint(6, 8)

    def split():
        sizes, left = [], n
        while left:
            s = rng.randint(3, left) if left >= 3 else 3
            if left - s in (1, 2):
                s = left
            sizes.append(s)
            left -= s
        return graph_union(*(cycle(s) for s in sizes))

    return split(), split()


def curated_graph_pairs() -> List[Tuple[str, Structure, Structure]]:
    """Small undirected graph pairs used for the fractional isomorphism checks."""
    pairs = [
        ("C6 vs C3+C3", cycle(6), graph_union(cycle(3), cycle(3))),
        ("C8 vs C4+C4", cycle(8), graph_union(cycle(4), cycle(4))),
        ("C8 vs C5+C3", cycle(8), graph_union(cycle(5), cycle(3))),
        ("C7 vs C4+C3", cycle(7), graph_union(cycle(4), cycle(3))),
        ("C6 vs C6", cycle(6), cycle(6)),
        ("P4 vs star3", path(4), star_graph(3)),
        ("P5 vs P5", path(5), path(5)),
        ("P6 vs C6", path(6), cycle(6)),
        ("K4 vs C4", complete(4), cycle(4)),
        ("C4+C4 vs cube", graph_union(cycle(4), cycle(4)),
         graph(8, [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)])),
        ("cube vs K4,4 minus matching", graph(8, [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4),
                                                 (0, 4), (1, 5), (2, 6), (3, 7)]),
         graph(8, [(i, j) for i in range(4) for j in range(4, 8) if j - 4 != i])),
        ("K3,3 vs prism", graph(6, [(i, j) for i in range(3) for j in range(3, 6)]),
         graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)])),
        ("C5 vs C5", cycle(5), cycle(5)),
        ("K1 vs K1", graph(1, []), graph(1, [])),
        ("P3 vs K2+K1", path(3), graph(3, [(0, 1)])),
    ]
    return pairs
