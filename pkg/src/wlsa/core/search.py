"""Exhaustive homomorphism, isomorphism and optimum search."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

from ..errors import DEFAULT_BUDGET, BudgetExceeded, ValidationError
from .ext import INF, ExtRational, ext_mul
from .structure import CRISP, Structure, as_instance, require_similar, support


def _check_budget(what, n_target, n_source, budget):
    budget = DEFAULT_BUDGET if budget is None else budget
    needed = n_target ** n_source
    if needed > budget:
        raise BudgetExceeded(what, needed, budget)


def _scope_schedule(X: Structure, rel_of) -> List[List[Tuple[tuple, object]]]:
    """For each element index, the checks that become decidable once it is assigned."""
    idx = X.index
    due: List[List[Tuple[tuple, object]]] = [[] for _ in X.universe]
    for name in X.signature.names:
        rel = rel_of(name)
        for t in X.relations[name]:
            pos = tuple(idx[a] for a in t)
            due[max(pos)].append((pos, rel))
    return due


def _crisp_homs(X: Structure, A: Structure) -> Iterator[List[int]]:
    """Yield homomorphisms as lists of target indices, lexicographically."""
    require_similar(X, A)
    Xc = X if X.kind == CRISP else support(X)
    Aidx = A.index
    target = {n: {tuple(Aidx[a] for a in t) for t in A.tuples(n)} for n in A.signature.names}
    due = _scope_schedule(Xc, lambda n: target[n])
    n, m = len(X.universe), len(A.universe)
    if n == 0:
        yield []
        return
    if m == 0:
        return
    h = [0] * n
    i = 0
    h[0] = -1
    while i >= 0:
        h[i] += 1
        if h[i] >= m:
            i -= 1
            continue
        ok = True
        for pos, rel in due[i]:
            if tuple(h[p] for p in pos) not in rel:
                ok = False
                break
        if not ok:
            continue
        if i == n - 1:
            yield list(h)
        else:
            i += 1
            h[i] = -1


def find_homomorphism(X: Structure, A: Structure, budget: Optional[int] = None) -> Optional[dict]:
    """Lexicographically first homomorphism ``X -> A`` (crisp reading), or None."""
    _check_budget("homomorphism search", len(A), len(X), budget)
    for h in _crisp_homs(X, A):
        return {x: A.universe[j] for x, j in zip(X.universe, h)}
    return None


def count_homomorphisms(X: Structure, A: Structure, budget: Optional[int] = None) -> int:
    _check_budget("homomorphism count", len(A), len(X), budget)
    return sum(1 for _ in _crisp_homs(X, A))


def iter_homomorphisms(X: Structure, A: Structure) -> Iterator[dict]:
    """All homomorphisms; no budget check, the caller bounds the work."""
    for h in _crisp_homs(X, A):
        yield {x: A.universe[j] for x, j in zip(X.universe, h)}


def is_homomorphism(X: Structure, A: Structure, h: dict) -> bool:
    for name in X.signature.names:
        for t in (X.relations[name] if X.kind == CRISP else support(X).relations[name]):
            if not A.holds(name, tuple(h[x] for x in t)):
                return False
    return True


def value_of_map(X: Structure, A: Structure, h: dict) -> ExtRational:
    """Sum of weight times template cost over the constraints of ``X``."""
    require_similar(X, A)
    total = Fraction(0)
    for c in as_instance(X).constraints:
        term = ext_mul(c.weight, A.value(c.symbol, tuple(h[x] for x in c.scope)))
        if term is INF:
            return INF
        total += term
    return total


def opt_value(X: Structure, A: Structure, budget: Optional[int] = None) -> Tuple[ExtRational, Optional[dict]]:
    """Minimum of :func:`value_of_map` over all maps, with the first minimiser."""
    require_similar(X, A)
    _check_budget("optimum enumeration", len(A), len(X), budget)
    Xi = as_instance(X)
    if not Xi.is_nonnegative_finite():
        raise ValidationError("instance weights must be finite and non-negative")
    idx = X.index
    terms = []
    for c in Xi.constraints:
        terms.append((tuple(idx[x] for x in c.scope), c.weight, c.symbol))
    # cache template costs by index tuple
    U = A.universe
    cost_cache: Dict[tuple, ExtRational] = {}

    def cost(sym, t):
        key = (sym, t)
        v = cost_cache.get(key)
        if v is None:
            v = A.value(sym, tuple(U[j] for j in t))
            cost_cache[key] = v
        return v

    best, best_h = None, None
    for h in itertools.product(range(len(U)), repeat=len(X.universe)):
        total = Fraction(0)
        for pos, w, sym in terms:
            v = cost(sym, tuple(h[p] for p in pos))
            if v is INF:
                total = INF
                break
            total += w * v
        if best is None or total < best:
            best, best_h = total, h
    if best_h is None:
        return INF, None
    return best, {x: U[j] for x, j in zip(X.universe, best_h)}


def check_isomorphism(A: Structure, B: Structure, budget: Optional[int] = None) -> Optional[dict]:
    """An isomorphism ``A -> B`` found by backtracking over bijections, or None."""
    require_similar(A, B)
    if len(A) != len(B) or A.kind != B.kind:
        return None
    budget = DEFAULT_BUDGET if budget is None else budget
    n = len(A)
    if A.kind == CRISP:
        for name in A.signature.names:
            if len(A.relations[name]) != len(B.relations[name]):
                return None
        rel_of = lambda name: {tuple(B.index[b] for b in t) for t in B.relations[name]}
        due = _scope_schedule(A, rel_of)
        check = lambda pos, rel, h: tuple(h[p] for p in pos) in rel
    else:
        for name in A.signature.names:
            ra, rb = A.relations[name], B.relations[name]
            if ra.default != rb.default or len(ra.entries) != len(rb.entries):
                return None
        idx = A.index
        due = [[] for _ in A.universe]
        for name in A.signature.names:
            rb = B.relations[name]
            for t, v in A.relations[name].entries.items():
                pos = tuple(idx[a] for a in t)
                due[max(pos)].append((pos, (rb, v)))
        check = lambda pos, rv, h: rv[0](tuple(B.universe[h[p]] for p in pos)) == rv[1]
    used = [False] * n
    h = [-1] * n
    steps = 0

    def rec(i):
        nonlocal steps
        if i == n:
            return True
        for j in range(n):
            if used[j]:
                continue
            steps += 1
            if steps > budget:
                raise BudgetExceeded("isomorphism search", steps, budget)
            h[i] = j
            if all(check(pos, rel, h) for pos, rel in due[i]):
                used[j] = True
                if rec(i + 1):
                    return True
                used[j] = False
        h[i] = -1
        return False

    if not rec(0):
        return None
    return {a: B.universe[j] for a, j in zip(A.universe, h)}
