"""Relational structures (crisp and valued), their constraints and factor graphs."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Tuple

import numpy as np

from ..errors import ValidationError
from .ext import INF, ExtRational, ext

CRISP = "crisp"
VALUED = "valued"


@dataclass(frozen=True)
class Signature:
    symbols: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple((str(n), int(r)) for n, r in self.symbols))
        names = [n for n, _ in self.symbols]
        if len(set(names)) != len(names):
            raise ValidationError(f"duplicate relation symbol in {names}")
        for n, r in self.symbols:
            if r < 1:
                raise ValidationError(f"symbol {n} has arity {r} < 1")

    @classmethod
    def of(cls, *pairs) -> "Signature":
        return cls(tuple(pairs))

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(n for n, _ in self.symbols)

    def arity(self, name: str) -> int:
        for n, r in self.symbols:
            if n == name:
                return r
        raise KeyError(name)

    @property
    def max_arity(self) -> int:
        return max((r for _, r in self.symbols), default=0)

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)


@dataclass(frozen=True)
class ValuedRelation:
    """A sparse cost function: explicit entries on top of a default value."""
    default: ExtRational
    entries: Mapping[tuple, ExtRational] = field(default_factory=dict)

    def __call__(self, t: tuple) -> ExtRational:
        return self.entries.get(t, self.default)


class Constraint(NamedTuple):
    symbol: str
    scope: tuple
    weight: Optional[ExtRational] = None


class Label(NamedTuple):
    """Edge label of the factor graph: 1-based positions, symbol and (valued only) weight."""
    positions: Tuple[int, ...]
    symbol: str
    weight: Optional[ExtRational] = None

    def key(self):
        w = self.weight
        wk = () if w is None else ((1, 0) if w is INF else (0, w))
        return (self.positions, self.symbol, wk)


def element_name(e) -> str:
    """Serialized name of an element; tuples render as ``(a,b)``."""
    if isinstance(e, str):
        return e
    if isinstance(e, tuple):
        return "(" + ",".join(element_name(x) for x in e) + ")"
    return str(e)


@dataclass(frozen=True)
class Structure:
    signature: Signature
    universe: tuple
    kind: str
    relations: Mapping[str, object]
    allow_empty: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "universe", tuple(self.universe))
        if len(set(self.universe)) != len(self.universe):
            raise ValidationError("universe has repeated elements")
        if self.kind not in (CRISP, VALUED):
            raise ValidationError(f"unknown kind {self.kind!r}")
        if set(self.relations) != set(self.signature.names):
            raise ValidationError("relations do not match the signature")
        members = set(self.universe)
        rels = {}
        for name, r in self.signature:
            rel = self.relations[name]
            if self.kind == CRISP:
                tuples = frozenset(tuple(t) for t in rel)
                for t in tuples:
                    if len(t) != r or not members.issuperset(t):
                        raise ValidationError(f"bad tuple {t!r} for {name}/{r}")
                if not tuples and not self.allow_empty:
                    raise ValidationError(f"relation {name} is empty")
                rels[name] = tuples
            else:
                if not isinstance(rel, ValuedRelation):
                    default, entries = rel
                    rel = ValuedRelation(ext(default), {tuple(t): ext(v) for t, v in dict(entries).items()})
                else:
                    rel = ValuedRelation(ext(rel.default), {tuple(t): ext(v) for t, v in rel.entries.items()})
                for t in rel.entries:
                    if len(t) != r or not members.issuperset(t):
                        raise ValidationError(f"bad tuple {t!r} for {name}/{r}")
                # entries equal to the default carry no information
                clean = {t: v for t, v in rel.entries.items() if v != rel.default}
                rels[name] = ValuedRelation(rel.default, clean)
        object.__setattr__(self, "relations", rels)

    # construction helpers

    @classmethod
    def crisp(cls, signature, universe, relations, allow_empty=False) -> "Structure":
        if not isinstance(signature, Signature):
            signature = Signature(tuple(signature))
        return cls(signature, tuple(universe), CRISP, dict(relations), allow_empty)

    @classmethod
    def valued(cls, signature, universe, relations) -> "Structure":
        if not isinstance(signature, Signature):
            signature = Signature(tuple(signature))
        return cls(signature, tuple(universe), VALUED, dict(relations))

    # basic queries

    @property
    def is_crisp(self) -> bool:
        return self.kind == CRISP

    def __len__(self):
        return len(self.universe)

    @cached_property
    def index(self) -> Dict[object, int]:
        return {a: i for i, a in enumerate(self.universe)}

    def tuple_key(self, t: tuple) -> tuple:
        idx = self.index
        return tuple(idx[a] for a in t)

    def holds(self, name: str, t: tuple) -> bool:
        """Crisp membership; for valued structures, finiteness of the cost."""
        if self.kind == CRISP:
            return tuple(t) in self.relations[name]
        return self.relations[name](tuple(t)) is not INF

    def value(self, name: str, t: tuple) -> ExtRational:
        """Cost of ``t`` read as a template: crisp members cost 0, the rest INF."""
        if self.kind == CRISP:
            return Fraction(0) if tuple(t) in self.relations[name] else INF
        return self.relations[name](tuple(t))

    def weight(self, name: str, t: tuple) -> ExtRational:
        """Weight of ``t`` read as an instance: crisp members weigh 1, the rest 0."""
        if self.kind == CRISP:
            return Fraction(1) if tuple(t) in self.relations[name] else Fraction(0)
        return self.relations[name](tuple(t))

    def all_tuples(self, arity: int) -> Iterator[tuple]:
        return itertools.product(self.universe, repeat=arity)

    def tuples(self, name: str) -> List[tuple]:
        """Crisp tuples, or valued tuples with finite cost, in canonical order."""
        if self.kind == CRISP:
            return sorted(self.relations[name], key=self.tuple_key)
        rel = self.relations[name]
        if rel.default is INF:
            return sorted((t for t, v in rel.entries.items() if v is not INF), key=self.tuple_key)
        return [t for t in self.all_tuples(self.signature.arity(name)) if rel(t) is not INF]

    @cached_property
    def constraints(self) -> Tuple[Constraint, ...]:
        """Scopes carrying positive weight, ordered by symbol then tuple index."""
        out = []
        for name, r in self.signature:
            if self.kind == CRISP:
                for t in sorted(self.relations[name], key=self.tuple_key):
                    out.append(Constraint(name, t))
                continue
            rel = self.relations[name]
            if rel.default is INF or rel.default > 0:
                cands = self.all_tuples(r)
            else:
                cands = sorted(rel.entries, key=self.tuple_key)
            for t in cands:
                w = rel(t)
                if w > 0:
                    out.append(Constraint(name, t, w))
        return tuple(out)

    def is_nonnegative_finite(self) -> bool:
        if self.kind == CRISP:
            return True
        for rel in self.relations.values():
            vals = [rel.default, *rel.entries.values()]
            if any(v is INF or v < 0 for v in vals):
                return False
        return True

    def similar(self, other: "Structure") -> bool:
        return self.signature == other.signature

    def __repr__(self):
        return f"Structure({self.kind}, |U|={len(self.universe)}, sig={list(self.signature.symbols)})"


def require_similar(*structs: Structure):
    sig = structs[0].signature
    for s in structs[1:]:
        if s.signature != sig:
            raise ValidationError("structures have different signatures")


def as_template(A: Structure) -> Structure:
    """Crisp structure as a {0, INF}-valued template."""
    if A.kind == VALUED:
        return A
    rels = {name: ValuedRelation(INF, {t: Fraction(0) for t in A.relations[name]}) for name in A.signature.names}
    return Structure(A.signature, A.universe, VALUED, rels)


def as_instance(X: Structure) -> Structure:
    """Crisp structure as a unit-weight valued instance."""
    if X.kind == VALUED:
        return X
    rels = {name: ValuedRelation(Fraction(0), {t: Fraction(1) for t in X.relations[name]}) for name in X.signature.names}
    return Structure(X.signature, X.universe, VALUED, rels)


def support(X: Structure) -> Structure:
    """Crisp structure of the positive-weight tuples."""
    if X.kind == CRISP:
        return X
    rels = {name: [] for name in X.signature.names}
    for c in X.constraints:
        rels[c.symbol].append(c.scope)
    return Structure(X.signature, X.universe, CRISP, rels, allow_empty=True)


def finite_part(A: Structure) -> Structure:
    """Crisp structure of the finite-cost tuples."""
    if A.kind == CRISP:
        return A
    rels = {name: A.tuples(name) for name in A.signature.names}
    return Structure(A.signature, A.universe, CRISP, rels, allow_empty=True)


def relabel(A: Structure, mapping: Mapping) -> Structure:
    """Image of ``A`` under an injective renaming of its elements."""
    universe = tuple(mapping[a] for a in A.universe)
    if A.kind == CRISP:
        rels = {n: [tuple(mapping[a] for a in t) for t in ts] for n, ts in A.relations.items()}
        return Structure(A.signature, universe, CRISP, rels, A.allow_empty)
    rels = {n: ValuedRelation(rel.default, {tuple(mapping[a] for a in t): v for t, v in rel.entries.items()})
            for n, rel in A.relations.items()}
    return Structure(A.signature, universe, VALUED, rels)


def reorder(A: Structure, universe: Iterable) -> Structure:
    """Same structure with the universe listed in another order."""
    return Structure(A.signature, tuple(universe), A.kind, A.relations, A.allow_empty)


def disjoint_union(A: Structure, B: Structure) -> Structure:
    """Union on tagged copies ``(0, a)`` and ``(1, b)``."""
    require_similar(A, B)
    if A.kind != B.kind:
        A, B = as_instance(A), as_instance(B)
    universe = tuple((0, a) for a in A.universe) + tuple((1, b) for b in B.universe)
    if A.kind == CRISP:
        rels = {}
        for n in A.signature.names:
            rels[n] = [tuple((0, a) for a in t) for t in A.relations[n]] + \
                      [tuple((1, b) for b in t) for t in B.relations[n]]
        return Structure(A.signature, universe, CRISP, rels, A.allow_empty or B.allow_empty)
    rels = {}
    for n in A.signature.names:
        ra, rb = A.relations[n], B.relations[n]
        if ra.default != rb.default:
            raise ValidationError("valued union needs equal defaults")
        entries = {tuple((0, a) for a in t): v for t, v in ra.entries.items()}
        entries.update({tuple((1, b) for b in t): v for t, v in rb.entries.items()})
        rels[n] = ValuedRelation(ra.default, entries)
    return Structure(A.signature, universe, VALUED, rels)


def labels_of_signature(sig: Signature, weights: Iterable = (None,)) -> List[Label]:
    out = []
    for name, r in sig:
        for size in range(1, r + 1):
            for S in itertools.combinations(range(1, r + 1), size):
                for w in weights:
                    out.append(Label(S, name, w))
    return out


def edge_label(c: Constraint, a) -> Label:
    S = tuple(i + 1 for i, x in enumerate(c.scope) if x == a)
    return Label(S, c.symbol, c.weight)


@dataclass
class FactorGraph:
    """Bipartite incidence graph: variables are elements, the other side constraints."""
    structure: Structure
    variables: tuple
    constraints: Tuple[Constraint, ...]
    # adjacency by vertex id; variables are 0..n-1, constraint j is n + j
    adjacency: List[List[Tuple[int, Label]]]

    @property
    def n_vertices(self) -> int:
        return len(self.variables) + len(self.constraints)

    def edges(self) -> Iterator[Tuple[int, int, Label]]:
        n = len(self.variables)
        for v in range(n):
            for w, lab in self.adjacency[v]:
                yield v, w - n, lab


def factor_graph(A: Structure) -> FactorGraph:
    n = len(A.universe)
    idx = A.index
    cons = A.constraints
    adj: List[List[Tuple[int, Label]]] = [[] for _ in range(n + len(cons))]
    for j, c in enumerate(cons):
        seen = []
        for a in c.scope:
            if a in seen:
                continue
            seen.append(a)
            lab = edge_label(c, a)
            adj[idx[a]].append((n + j, lab))
            adj[n + j].append((idx[a], lab))
    return FactorGraph(A, A.universe, cons, adj)


def labels_used(*structs: Structure) -> List[Label]:
    seen = {}
    for A in structs:
        for c in A.constraints:
            for a in dict.fromkeys(c.scope):
                lab = edge_label(c, a)
                seen[lab.key()] = lab
    return [seen[k] for k in sorted(seen)]


def matrix_slice(A: Structure, label: Label) -> np.ndarray:
    """0/1 matrix over elements x constraints marking edges carrying ``label``."""
    cons = A.constraints
    M = np.zeros((len(A.universe), len(cons)), dtype=np.int64)
    idx = A.index
    for j, c in enumerate(cons):
        if c.symbol != label.symbol or c.weight != label.weight:
            continue
        for a in set(c.scope):
            if edge_label(c, a).positions == label.positions:
                M[idx[a], j] = 1
    return M


def adjacency_matrix(G: Structure, symbol: Optional[str] = None) -> np.ndarray:
    """Adjacency matrix of a single binary relation (a digraph)."""
    if symbol is None:
        (symbol, r), = G.signature.symbols
        if r != 2:
            raise ValidationError("adjacency matrix needs a binary relation")
    idx = G.index
    N = np.zeros((len(G), len(G)), dtype=np.int64)
    for a, b in G.relations[symbol]:
        N[idx[a], idx[b]] = 1
    return N
