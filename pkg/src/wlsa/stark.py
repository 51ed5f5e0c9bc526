"""The star transform: packs all tuples of length at most k and all constraints
of a structure into a structure over unary and binary symbols, so that level-k
questions become level-1 questions on the transformed pair.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .core import CRISP, Signature, Structure, require_similar
from .errors import DEFAULT_BUDGET, BudgetExceeded, ValidationError
from .wl import equiv1


@dataclass(frozen=True)
class Fact:
    """Element standing for the constraint ``symbol(args)``."""
    symbol: str
    args: tuple

    def __str__(self):
        return f"{self.symbol}(" + ",".join(str(a) for a in self.args) + ")"


def _subsets(j: int) -> List[tuple]:
    return [S for size in range(j + 1) for S in itertools.combinations(range(1, j + 1), size)]


def _idx_tuples(j: int, jp: int) -> List[tuple]:
    return list(itertools.product(range(1, j + 1), repeat=jp))


def _fmt(seq) -> str:
    return ",".join(str(i) for i in seq)


def _project(a: tuple, ind: tuple) -> tuple:
    return tuple(a[i - 1] for i in ind)


def _constant_on(a: tuple, S: tuple) -> bool:
    return len({a[i - 1] for i in S}) <= 1


def star_signature(sig: Signature, k: int, simplified: bool = False) -> Signature:
    syms = []
    for j in range(1, k + 1):
        for S in _subsets(j):
            syms.append((f"T{j}[{_fmt(S)}]", 1))
    tij = []
    for j in range(1, k + 1):
        for jp in range(1, k + 1):
            for ind in _idx_tuples(j, jp):
                if simplified and len(set(range(1, j + 1)) - set(ind)) > 1:
                    continue
                tij.append(((jp, j, ind), f"T{j}>{_fmt(ind)}"))
    syms.extend((name, 2) for _, name in sorted(tij))
    for R, r in sig:
        for S in _subsets(r):
            if simplified and S:
                continue
            syms.append((f"{R}[{_fmt(S)}]", 1))
    if not simplified:
        for R, r in sig:
            for j in range(1, k + 1):
                for ind in _idx_tuples(r, j):
                    syms.append((f"{R}>{_fmt(ind)}", 2))
    return Signature(tuple(syms))


def star_size(A: Structure, k: int) -> int:
    return sum(len(A) ** j for j in range(1, k + 1)) + len(A.constraints)


@dataclass
class StarStructure:
    structure: Structure
    origin: Dict[object, object]     # new element -> tuple over A, or the original Constraint
    k: int
    simplified: bool = False


def star_k(A: Structure, k: int, budget: Optional[int] = None, simplified: bool = False) -> StarStructure:
    """Elements: tuples over ``A`` of length 1..k, then one element per constraint.

    Unary ``T{j}[S]`` marks length-j tuples constant on positions ``S``;
    binary ``T{j}>i`` links a length-j tuple to its projection onto the index
    tuple ``i``.  For every symbol ``R``, unary ``R[S]`` marks constraint
    elements constant on ``S`` and binary ``R>i`` links a constraint element to
    the projection of its scope.
    """
    if A.kind != CRISP:
        raise ValidationError("the star transform needs a crisp structure")
    if k < 1:
        raise ValidationError("k must be positive")
    if simplified and A.signature.max_arity > k:
        raise ValidationError("simplified transform needs every arity at most k")
    budget = DEFAULT_BUDGET if budget is None else budget
    size = star_size(A, k)
    if size > budget:
        raise BudgetExceeded("star transform", size, budget)
    sig = star_signature(A.signature, k, simplified)
    U = A.universe
    layers = {j: list(itertools.product(U, repeat=j)) for j in range(1, k + 1)}
    universe: List[object] = [t for j in range(1, k + 1) for t in layers[j]]
    origin: Dict[object, object] = {t: t for t in universe}
    facts: Dict[object, tuple] = {}
    if not simplified:
        for c in A.constraints:
            f = Fact(c.symbol, c.scope)
            universe.append(f)
            origin[f] = c
            facts[f] = c.scope
    rels: Dict[str, list] = {name: [] for name in sig.names}
    for j in range(1, k + 1):
        for S in _subsets(j):
            rels[f"T{j}[{_fmt(S)}]"] = [(a,) for a in layers[j] if _constant_on(a, S)]
        for jp in range(1, k + 1):
            for ind in _idx_tuples(j, jp):
                name = f"T{j}>{_fmt(ind)}"
                if name in rels:
                    rels[name] = [(a, _project(a, ind)) for a in layers[j]]
    for R, r in A.signature:
        tuples = A.tuples(R)
        if simplified:
            rels[f"{R}[]"] = [(t,) for t in tuples]
            continue
        for S in _subsets(r):
            rels[f"{R}[{_fmt(S)}]"] = [(Fact(R, t),) for t in tuples if _constant_on(t, S)]
        for j in range(1, k + 1):
            for ind in _idx_tuples(r, j):
                rels[f"{R}>{_fmt(ind)}"] = [(Fact(R, t), _project(t, ind)) for t in tuples]
    S = Structure(sig, tuple(universe), CRISP, rels, allow_empty=True)
    return StarStructure(S, origin, k, simplified)


def star_k_simplified(A: Structure, k: int, budget: Optional[int] = None) -> StarStructure:
    """Leaner transform for arities at most k: constraints fold into their scope tuples."""
    return star_k(A, k, budget, simplified=True)


def equiv_k(A: Structure, B: Structure, k: int, budget: Optional[int] = None, simplified: bool = False) -> bool:
    """Level-k equivalence: level-1 equivalence of the star transforms (plain level 1 when k = 1)."""
    require_similar(A, B)
    if k == 1:
        return equiv1(A, B)
    SA = star_k(A, k, budget, simplified).structure
    SB = star_k(B, k, budget, simplified).structure
    return equiv1(SA, SB)
