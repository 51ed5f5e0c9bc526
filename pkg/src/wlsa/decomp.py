"""Decomposition witnesses for level-1 relaxation solutions.

From an exact solution with common denominator ``m`` we build two structures
on ``[m] x X``: ``Y1`` is ``m`` disjoint copies of ``X`` and ``Y2`` re-wires
each copy of a constraint through per-position permutations of ``[m]``.
Then ``X -> Y1`` (copy maps), ``Y1`` and ``Y2`` are level-1 equivalent, and
``Y2 -> A`` through ``h2(q, x) = p_x[q]`` where ``p_x`` lists every element
``a`` exactly ``m * p_x(a)`` times.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from .core import (CRISP, INF, Structure, ValuedRelation, as_instance, as_template, disjoint_union,
                   is_homomorphism, require_similar, value_of_map)
from .errors import BudgetExceeded, ValidationError
from .lp import FEASIBLE, OPTIMAL, SolveResult, solve, verify_certificate
from .relax import blp_marginals, build_sa1, build_valued_sa1, con_var, dual_frac_hom_lp, elem_var
from .wl import equitable_witness, equiv1, stable_coloring

DECOMP_BUDGET = 10 ** 5


@dataclass
class DecompositionWitness:
    m: int
    Y1: Structure
    Y2: Structure
    copy_maps: List[dict]
    perms: Dict[int, List[Tuple[int, ...]]]       # constraint index -> rho_1..rho_r, each as the images of 1..m
    h2: dict
    p_tuples: Dict[object, tuple]
    tables: Dict[int, List[tuple]]                # constraint index -> rows of T
    value: Optional[Fraction] = None
    distribution: List[Tuple[dict, Fraction]] = field(default_factory=list)

    @property
    def valued(self) -> bool:
        return self.value is not None


def _lcm_of_denominators(values) -> int:
    m = 1
    for v in values:
        m = math.lcm(m, Fraction(v).denominator)
    return m


def _check_solution(lp, sol: Dict[str, Fraction]):
    missing = set(lp.variables) - set(sol)
    if missing:
        raise ValidationError(f"solution misses {len(missing)} variables")
    if not verify_certificate(lp, SolveResult(FEASIBLE, assignment={v: Fraction(sol[v]) for v in lp.variables})):
        raise ValidationError("supplied solution does not satisfy the program")


def _construct(X: Structure, A: Structure, sol: Dict[str, Fraction], weights, budget: Optional[int]):
    """Shared construction; ``weights[i]`` is the weight of constraint i of ``X``."""
    elem, cons = blp_marginals(X, A, sol)
    m = _lcm_of_denominators(list(v for d in elem.values() for v in d.values()) +
                             list(v for d in cons for v in d.values()))
    budget = DECOMP_BUDGET if budget is None else budget
    if m * len(X) > budget:
        raise BudgetExceeded(f"decomposition (m={m})", m * len(X), budget)
    # canonical tuples p_x: elements of A in universe order, each repeated m * p_x(a) times
    p_tuples = {}
    for x in X.universe:
        p_tuples[x] = tuple(a for a in A.universe for _ in range(int(m * elem[x][a])))
    tables: Dict[int, List[tuple]] = {}
    perms: Dict[int, List[Tuple[int, ...]]] = {}
    X_cons = X.constraints
    for i, c in enumerate(X_cons):
        rows = [t for t in itertools.product(A.universe, repeat=len(c.scope)) for _ in range(int(m * cons[i][t]))]
        tables[i] = rows
        rhos = []
        for pos, x in enumerate(c.scope):
            # bucket rows and p_x positions by element value, match in increasing order
            slots: Dict[object, List[int]] = {}
            for q, a in enumerate(p_tuples[x], start=1):
                slots.setdefault(a, []).append(q)
            rho = [0] * m
            taken: Dict[object, int] = Counter()
            for k, row in enumerate(rows):
                a = row[pos]
                rho[k] = slots[a][taken[a]]
                taken[a] += 1
            rhos.append(tuple(rho))
        perms[i] = rhos
    universe = [(k, x) for k in range(1, m + 1) for x in X.universe]
    y1: Dict[str, Dict[tuple, Fraction]] = {n: {} for n in X.signature.names}
    y2: Dict[str, Dict[tuple, Fraction]] = {n: {} for n in X.signature.names}
    for i, c in enumerate(X_cons):
        for k in range(1, m + 1):
            y1[c.symbol][tuple((k, x) for x in c.scope)] = weights[i]
            y2[c.symbol][tuple((perms[i][pos][k - 1], x) for pos, x in enumerate(c.scope))] = weights[i]
    h2 = {(q, x): p_tuples[x][q - 1] for q in range(1, m + 1) for x in X.universe}
    copy_maps = [{x: (k, x) for x in X.universe} for k in range(1, m + 1)]
    return m, universe, y1, y2, h2, copy_maps, perms, p_tuples, tables


def decompose_crisp(X: Structure, A: Structure, sol: Dict[str, Fraction],
                    budget: Optional[int] = None) -> DecompositionWitness:
    """Witness ``X -> Y1``, ``Y1 ~ Y2``, ``Y2 -> A`` from a solution of :func:`build_sa1`."""
    require_similar(X, A)
    if X.kind != CRISP or A.kind != CRISP:
        raise ValidationError("crisp decomposition needs crisp structures")
    _check_solution(build_sa1(X, A), sol)
    m, U, y1, y2, h2, copies, perms, p_tuples, tables = _construct(X, A, sol, [1] * len(X.constraints), budget)
    Y1 = Structure.crisp(X.signature, U, {n: sorted(t) for n, t in y1.items()}, allow_empty=True)
    Y2 = Structure.crisp(X.signature, U, {n: sorted(t) for n, t in y2.items()}, allow_empty=True)
    w = DecompositionWitness(m, Y1, Y2, copies, perms, h2, p_tuples, tables)
    _assert_witness(X, A, w)
    return w


def decompose_valued(X: Structure, A: Structure, sol: Dict[str, Fraction],
                     budget: Optional[int] = None) -> DecompositionWitness:
    """Valued witness from an optimal solution of :func:`build_valued_sa1`.

    ``Y1`` and ``Y2`` carry weight ``w/m`` on the copies of each weight-``w``
    constraint of ``X``; the uniform distribution over the copy maps is a dual
    fractional homomorphism ``X -> Y1``.
    """
    require_similar(X, A)
    Xv, Av = as_instance(X), as_template(A)
    lp = build_valued_sa1(Xv, Av)
    _check_solution(lp, sol)
    value = sum((a * Fraction(sol[v]) for v, a in lp.objective.items()), Fraction(0))
    best = solve(lp)
    if best.status != OPTIMAL or best.value != value:
        raise ValidationError("supplied solution is not optimal")
    cons = Xv.constraints
    m, U, y1, y2, h2, copies, perms, p_tuples, tables = _construct(Xv, Av, sol, [c.weight for c in cons], budget)
    scale = Fraction(1, m)
    rel1 = {n: ValuedRelation(Fraction(0), {t: w * scale for t, w in d.items()}) for n, d in y1.items()}
    rel2 = {n: ValuedRelation(Fraction(0), {t: w * scale for t, w in d.items()}) for n, d in y2.items()}
    Y1 = Structure.valued(X.signature, U, rel1)
    Y2 = Structure.valued(X.signature, U, rel2)
    w = DecompositionWitness(m, Y1, Y2, copies, perms, h2, p_tuples, tables, value,
                             [(f, scale) for f in copies])
    _assert_witness(Xv, Av, w)
    return w


def _assert_witness(X, A, w: DecompositionWitness):
    report = structural_checks(X, w)
    if w.valued:
        report["value_identity"] = value_of_map(w.Y2, A, w.h2) == w.value
    else:
        report["y2_to_a"] = is_homomorphism(w.Y2, A, w.h2)
    bad = [k for k, ok in report.items() if not ok]
    if bad:
        raise AssertionError(f"decomposition construction failed: {bad}")


def structural_checks(X: Structure, w: DecompositionWitness) -> Dict[str, bool]:
    """Column and repetition properties of the tables and permutations."""
    cols = rep = rows_ok = True
    for i, c in enumerate(as_instance(X).constraints if w.valued else X.constraints):
        T = w.tables[i]
        rhos = w.perms[i]
        if len(T) != w.m or any(sorted(r) != list(range(1, w.m + 1)) for r in rhos):
            rows_ok = False
            continue
        for pos, x in enumerate(c.scope):
            if Counter(row[pos] for row in T) != Counter(w.p_tuples[x]):
                cols = False
            for k in range(w.m):
                if T[k][pos] != w.p_tuples[x][rhos[pos][k] - 1]:
                    rows_ok = False
            for pos2 in range(pos + 1, len(c.scope)):
                if c.scope[pos2] == x and rhos[pos] != rhos[pos2]:
                    rep = False
    return {"rows": rows_ok, "columns": cols, "repetitions": rep}


def _scaled(X: Structure, factor: Fraction) -> Structure:
    Xi = as_instance(X)
    rels = {n: ValuedRelation(Fraction(0), {t: v * factor for t, v in Xi.relations[n].entries.items() if v})
            for n in Xi.signature.names}
    return Structure.valued(Xi.signature, Xi.universe, rels)


def _degree_check(X: Structure, w: DecompositionWitness) -> bool:
    base = _scaled(X, Fraction(1, w.m)) if w.valued else X
    U = disjoint_union(disjoint_union(w.Y1, w.Y2), base)
    colors = stable_coloring(U).colors
    idx = U.index
    for (k, x) in w.Y1.universe:
        cx = colors[idx[(1, x)]]
        if colors[idx[(0, (0, (k, x)))]] != cx or colors[idx[(0, (1, (k, x)))]] != cx:
            return False
    return True


def verify_decomposition(X: Structure, A: Structure, w: DecompositionWitness) -> Dict[str, bool]:
    """Independent clause-by-clause check of a witness; failures are ``False`` entries."""
    report: Dict[str, bool] = {}
    if w.valued:
        report["x_to_y1"] = dual_frac_hom_lp(X, w.Y1, budget=10 ** 9).feasible
    else:
        report["x_to_y1"] = bool(w.copy_maps) and all(is_homomorphism(X, w.Y1, h) for h in w.copy_maps)
    report["y1_equiv_y2"] = equiv1(w.Y1, w.Y2)
    if set(w.h2) != set(w.Y2.universe):
        report["y2_to_a"] = False
    elif w.valued:
        val = value_of_map(w.Y2, A, w.h2)
        opt = solve(build_valued_sa1(as_instance(X), as_template(A))).value
        report["y2_to_a"] = val is not INF and val <= opt
        report["value_identity"] = val == w.value == opt
    else:
        report["y2_to_a"] = is_homomorphism(w.Y2, A, w.h2)
    report.update(structural_checks(X, w))
    report["degrees"] = _degree_check(X, w)
    return report


# ---------------------------------------------------------------------------
# from a chain back to a level-1 solution


def compose_chain(X: Structure, A: Structure, h: dict, Y1: Structure, Y2: Structure, g: dict) -> Optional[Dict[str, Fraction]]:
    """Solution of :func:`build_sa1` from ``X -h-> Y1``, ``Y1 ~ Y2``, ``Y2 -g-> A``.

    Multiplies the 0/1 matrices of the two homomorphisms with the doubly
    stochastic pair relating ``Y1`` and ``Y2``.  Returns None when ``Y1`` and
    ``Y2`` are not level-1 equivalent.
    """
    wit = equitable_witness(Y1, Y2)
    if wit is None:
        return None
    P, Q = wit
    H = np.full((len(Y1), len(X)), Fraction(0), dtype=object)
    for x in X.universe:
        H[Y1.index[h[x]], X.index[x]] = Fraction(1)
    G = np.full((len(A), len(Y2)), Fraction(0), dtype=object)
    for y in Y2.universe:
        G[A.index[g[y]], Y2.index[y]] = Fraction(1)
    elem = G.dot(P).dot(H)
    sol: Dict[str, Fraction] = {}
    for x in X.universe:
        for a in A.universe:
            sol[elem_var(x, a)] = elem[A.index[a], X.index[x]]
    c1 = {(c.symbol, c.scope): j for j, c in enumerate(Y1.constraints)}
    c2 = Y2.constraints
    for i, c in enumerate(X.constraints):
        r = len(c.scope)
        for t in itertools.product(A.universe, repeat=r):
            sol[con_var(i, t)] = Fraction(0)
        j1 = c1[(c.symbol, tuple(h[x] for x in c.scope))]
        for j2, d in enumerate(c2):
            if d.symbol == c.symbol and Q[j2, j1]:
                t = tuple(g[y] for y in d.scope)
                sol[con_var(i, t)] += Q[j2, j1]
    return sol
