"""Builders for the LP relaxations of (valued) homomorphism problems.

Every builder is deterministic: variables and rows are emitted in the
canonical order of elements (universe order) and constraints (symbol order,
then tuple index order), so two builds of the same input produce identical
program text.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .core import (CRISP, INF, Structure, ValuedRelation, as_instance, as_template, element_name, finite_part,
                   iter_homomorphisms, require_similar, support)
from .errors import DEFAULT_BUDGET, BudgetExceeded, ValidationError
from .lp import EQ, GE, INFEASIBLE, LE, LinearProgram, SolveResult, solve

# ---------------------------------------------------------------------------
# variable names


def _names(seq) -> str:
    return ",".join(element_name(a) for a in seq)


def elem_var(x, a) -> str:
    return f"p[{element_name(x)}|{element_name(a)}]"


def con_var(i: int, t: Sequence) -> str:
    return f"q[{i}|{_names(t)}]"


def set_var(V: Sequence, f: Sequence) -> str:
    return f"s[{_names(V)}|{_names(f)}]"


def _crisp_instance(X: Structure) -> Structure:
    return X if X.kind == CRISP else support(X)


def _require_crisp_template(A: Structure):
    if A.kind != CRISP:
        raise ValidationError("template must be crisp here; use the valued builders")


# ---------------------------------------------------------------------------
# basic LP and Sherali-Adams level 1 (tuple indexed)


def _blp_rows(lp: LinearProgram, X: Structure, A: Structure, loops: bool, cost_of=None):
    """Shared rows of the (valued) basic LP; ``cost_of(symbol, t)`` is the template cost."""
    U = A.universe
    cons = X.constraints
    uname = [element_name(a) for a in U]
    pvar = {x: [f"p[{element_name(x)}|{n}]" for n in uname] for x in X.universe}
    for x in X.universe:
        for v in pvar[x]:
            lp.add_variable(v, 0, 1)
    by_arity: Dict[int, list] = {}
    qvars: List[List[str]] = []
    for i, c in enumerate(cons):
        r = len(c.scope)
        if r not in by_arity:
            by_arity[r] = list(itertools.product(range(len(U)), repeat=r))
        names = [f"q[{i}|" + ",".join(uname[j] for j in t) + "]" for t in by_arity[r]]
        qvars.append(names)
        for v in names:
            lp.add_variable(v, 0, 1)
    for x in X.universe:
        lp.add_constraint({v: 1 for v in pvar[x]}, EQ, 1, f"one[{element_name(x)}]")
    for i, c in enumerate(cons):
        tuples = by_arity[len(c.scope)]
        for pos, x in enumerate(c.scope):
            groups: List[Dict[str, Fraction]] = [{pvar[x][a]: Fraction(1)} for a in range(len(U))]
            for t, v in zip(tuples, qvars[i]):
                groups[t[pos]][v] = Fraction(-1)
            for a, row in enumerate(groups):
                lp.add_constraint(row, EQ, 0, f"marg[{i},{pos + 1},{uname[a]}]")
    for i, c in enumerate(cons):
        for t, v in zip(by_arity[len(c.scope)], qvars[i]):
            if not A.holds(c.symbol, tuple(U[j] for j in t)):
                lp.add_constraint({v: 1}, EQ, 0, f"forbid[{i}]")
    if loops:
        for i, c in enumerate(cons):
            r = len(c.scope)
            pairs = [(p, q) for p in range(r) for q in range(p + 1, r) if c.scope[p] == c.scope[q]]
            if not pairs:
                continue
            for t, v in zip(by_arity[r], qvars[i]):
                if any(t[p] != t[q] for p, q in pairs):
                    lp.add_constraint({v: 1}, EQ, 0, f"loop[{i}]")
    if cost_of is not None:
        obj = {}
        for i, c in enumerate(cons):
            for t, v in zip(by_arity[len(c.scope)], qvars[i]):
                cost = cost_of(c.symbol, tuple(U[j] for j in t))
                if cost is INF:
                    continue
                coef = c.weight * cost
                if coef:
                    obj[v] = coef
        lp.minimize(obj)


def build_blp(X: Structure, A: Structure) -> LinearProgram:
    """Basic LP: per-element and per-constraint distributions with consistent marginals."""
    require_similar(X, A)
    _require_crisp_template(A)
    lp = LinearProgram("blp")
    _blp_rows(lp, _crisp_instance(X), A, loops=False)
    return lp


def build_sa1(X: Structure, A: Structure) -> LinearProgram:
    """Basic LP plus consistency of repeated scope entries."""
    require_similar(X, A)
    _require_crisp_template(A)
    lp = LinearProgram("sa1")
    _blp_rows(lp, _crisp_instance(X), A, loops=True)
    return lp


def _valued_inputs(X: Structure, A: Structure) -> Tuple[Structure, Structure]:
    require_similar(X, A)
    Xv, Av = as_instance(X), as_template(A)
    if not Xv.is_nonnegative_finite():
        raise ValidationError("instance weights must be finite and non-negative")
    return Xv, Av


def build_valued_blp(X: Structure, A: Structure) -> LinearProgram:
    """Valued basic LP minimising the expected cost."""
    Xv, Av = _valued_inputs(X, A)
    lp = LinearProgram("vblp")
    _blp_rows(lp, Xv, Av, loops=False, cost_of=Av.value)
    return lp


def build_valued_sa1(X: Structure, A: Structure) -> LinearProgram:
    Xv, Av = _valued_inputs(X, A)
    lp = LinearProgram("vsa1")
    _blp_rows(lp, Xv, Av, loops=True, cost_of=Av.value)
    return lp


def blp_marginals(X: Structure, A: Structure, assignment: Dict[str, Fraction]):
    """Split a basic-LP solution into element and constraint distributions."""
    elem = {x: {a: assignment[elem_var(x, a)] for a in A.universe} for x in X.universe}
    cons = []
    for i, c in enumerate(X.constraints):
        cons.append({t: assignment[con_var(i, t)] for t in itertools.product(A.universe, repeat=len(c.scope))})
    return elem, cons


# ---------------------------------------------------------------------------
# Sherali-Adams level k (set indexed)


def _distinct(scope) -> tuple:
    return tuple(dict.fromkeys(scope))


def build_sak(X: Structure, A: Structure, k: int) -> LinearProgram:
    """Level-k Sherali-Adams: consistent distributions on all sets of at most k elements."""
    require_similar(X, A)
    _require_crisp_template(A)
    if k < 1:
        raise ValidationError("level must be at least 1")
    X = _crisp_instance(X)
    U = A.universe
    idx = X.index
    lp = LinearProgram(f"sa{k}")
    subsets: List[tuple] = []
    for size in range(1, min(k, len(X.universe)) + 1):
        subsets.extend(itertools.combinations(X.universe, size))
    for V in subsets:
        for f in itertools.product(U, repeat=len(V)):
            lp.add_variable(set_var(V, f), 0, 1)
    cons = X.constraints
    scopes = []
    for i, c in enumerate(cons):
        V = tuple(sorted(_distinct(c.scope), key=idx.__getitem__))
        scopes.append(V)
        for f in itertools.product(U, repeat=len(V)):
            lp.add_variable(con_var(i, f), 0, 1)
    for V in subsets:
        lp.add_constraint({set_var(V, f): 1 for f in itertools.product(U, repeat=len(V))}, EQ, 1)
    for V in subsets:
        n = len(V)
        for size in range(1, n):
            for pos in itertools.combinations(range(n), size):
                Usub = tuple(V[p] for p in pos)
                for f in itertools.product(U, repeat=size):
                    row = {set_var(Usub, f): Fraction(1)}
                    for g in itertools.product(U, repeat=n):
                        if all(g[p] == fv for p, fv in zip(pos, f)):
                            row[set_var(V, g)] = Fraction(-1)
                    lp.add_constraint(row, EQ, 0)
    for i, c in enumerate(cons):
        V = scopes[i]
        n = len(V)
        for size in range(1, min(k, n) + 1):
            for pos in itertools.combinations(range(n), size):
                Usub = tuple(V[p] for p in pos)
                for f in itertools.product(U, repeat=size):
                    row = {set_var(Usub, f): Fraction(1)}
                    for g in itertools.product(U, repeat=n):
                        if all(g[p] == fv for p, fv in zip(pos, f)):
                            row[con_var(i, g)] = Fraction(-1)
                    lp.add_constraint(row, EQ, 0)
    for i, c in enumerate(cons):
        V = scopes[i]
        where = {v: p for p, v in enumerate(V)}
        for g in itertools.product(U, repeat=len(V)):
            if not A.holds(c.symbol, tuple(g[where[x]] for x in c.scope)):
                lp.add_constraint({con_var(i, g): 1}, EQ, 0)
    return lp


# ---------------------------------------------------------------------------
# lifted polytope of the 0/1 encoding


def _yvar(pair) -> str:
    x, a = pair
    return f"{element_name(x)}:{element_name(a)}"


def build_lifted_polytope(X: Structure, A: Structure, k: int, lift_bounds: bool = True) -> LinearProgram:
    """Level-k lift of the 0/1 polytope of maps ``X -> A`` avoiding forbidden tuples.

    Base variables ``y[x:a]`` encode ``x -> a``.  Every base row (one value per
    element, forbidden assignments of a constraint) and, when ``lift_bounds``
    is set, every bound ``y >= 0``, ``1 - y >= 0`` is multiplied by each
    product of at most ``k - 1`` factors ``y`` or ``1 - y`` over distinct
    variables; squares collapse and each monomial over the set ``K`` becomes
    the variable ``z[K]``.
    """
    require_similar(X, A)
    _require_crisp_template(A)
    if k < 1:
        raise ValidationError("level must be at least 1")
    X = _crisp_instance(X)
    pairs = [(x, a) for x in X.universe for a in A.universe]
    n = len(pairs)
    pid = {p: i for i, p in enumerate(pairs)}

    # base rows: (coeffs over base indices, constant, sense) meaning sum + const (sense) 0
    base: List[Tuple[Dict[int, Fraction], Fraction, str]] = []
    for x in X.universe:
        base.append(({pid[(x, a)]: Fraction(1) for a in A.universe}, Fraction(-1), EQ))
    idx = X.index
    for c in X.constraints:
        V = tuple(sorted(_distinct(c.scope), key=idx.__getitem__))
        where = {v: p for p, v in enumerate(V)}
        for g in itertools.product(A.universe, repeat=len(V)):
            if A.holds(c.symbol, tuple(g[where[x]] for x in c.scope)):
                continue
            base.append(({pid[(v, g[p])]: Fraction(-1) for p, v in enumerate(V)}, Fraction(len(V) - 1), GE))
    if lift_bounds:
        for i in range(n):
            base.append(({i: Fraction(1)}, Fraction(0), GE))
            base.append(({i: Fraction(-1)}, Fraction(1), GE))

    # multiplier terms as polynomials {frozenset K: coeff}
    terms: List[Dict[frozenset, int]] = []
    for size in range(0, k):
        for S in itertools.combinations(range(n), size):
            for mask in range(1 << size):
                I = [S[j] for j in range(size) if not mask >> j & 1]
                J = [S[j] for j in range(size) if mask >> j & 1]
                poly: Dict[frozenset, int] = {}
                for tsize in range(len(J) + 1):
                    for T in itertools.combinations(J, tsize):
                        K = frozenset(I) | frozenset(T)
                        poly[K] = poly.get(K, 0) + (-1) ** tsize
                terms.append(poly)

    monos = [frozenset(K) for size in range(1, k + 1) for K in itertools.combinations(range(n), size)]
    lp = LinearProgram(f"lift{k}")

    def zname(K):
        return "z[" + ",".join(_yvar(pairs[i]) for i in sorted(K)) + "]"

    for K in monos:
        lp.add_variable(zname(K), 0, 1)
    for poly in terms:
        for coeffs, const, sense in base:
            row: Dict[frozenset, Fraction] = {}
            for K, pc in poly.items():
                for i, a in coeffs.items():
                    KK = K | {i}
                    row[KK] = row.get(KK, Fraction(0)) + pc * a
                row[K] = row.get(K, Fraction(0)) + pc * const
            rhs = -row.pop(frozenset(), Fraction(0))
            named = {zname(K): v for K, v in row.items() if v}
            if not named and ((sense == EQ and rhs == 0) or (sense == GE and rhs <= 0)):
                continue
            lp.add_constraint(named, sense, rhs)
    return lp


# ---------------------------------------------------------------------------
# fractional homomorphisms and polymorphisms


@dataclass
class MorphismProgram:
    """A distribution-over-maps program together with its answer."""
    lp: LinearProgram
    maps: List[dict]
    result: SolveResult
    rows: List[object] = field(default_factory=list)   # per constraint index: (symbol, tuple) or "sum"

    @property
    def status(self) -> str:
        return self.result.status

    @property
    def feasible(self) -> bool:
        return self.result.feasible

    def distribution(self) -> List[Tuple[dict, Fraction]]:
        if not self.result.feasible:
            return []
        out = []
        for k, f in enumerate(self.maps):
            w = self.result.assignment[_mu(k)]
            if w:
                out.append((f, w))
        return out


def _mu(k: int) -> str:
    return f"m[{k}]"


def _budget(what: str, needed: int, budget: Optional[int]):
    budget = DEFAULT_BUDGET if budget is None else budget
    if needed > budget:
        raise BudgetExceeded(what, needed, budget)


def frac_hom_lp(A: Structure, B: Structure, budget: Optional[int] = None) -> MorphismProgram:
    """Is there a distribution over maps ``A -> B`` whose expected cost is pointwise at most ``A``'s?"""
    require_similar(A, B)
    A, B = as_template(A), as_template(B)
    _budget("fractional homomorphism maps", len(B) ** len(A), budget)
    maps = list(iter_homomorphisms(finite_part(A), finite_part(B)))
    lp = LinearProgram("frachom")
    for k in range(len(maps)):
        lp.add_variable(_mu(k))
    rows: List[object] = []
    for name, r in A.signature:
        for t in A.tuples(name):
            rhs = A.value(name, t)
            co = {_mu(k): B.value(name, tuple(f[a] for a in t)) for k, f in enumerate(maps)}
            lp.add_constraint(co, LE, rhs)
            rows.append((name, t))
    lp.add_constraint({_mu(k): 1 for k in range(len(maps))}, EQ, 1)
    rows.append("sum")
    return MorphismProgram(lp, maps, solve(lp), rows)


def fh_separator(A: Structure, B: Structure, prog: MorphismProgram) -> Structure:
    """Instance on ``A``'s universe with ``Opt(X, B) > Opt(X, A)``, built from the Farkas multipliers."""
    if prog.status != INFEASIBLE:
        raise ValueError("separator needs an infeasible program")
    A, B = as_template(A), as_template(B)
    y = prog.result.farkas
    weights: Dict[Tuple[str, tuple], Fraction] = {}
    for i, row in enumerate(prog.rows):
        if row != "sum":
            weights[row] = y.get(f"c{i}+", Fraction(0))
    vA = sum(w * A.value(n, t) for (n, t), w in weights.items())
    sA = sum(A.value(n, t) for (n, t) in weights)
    gaps, spreads = [], []
    for f in prog.maps:
        vB = sum(w * B.value(n, tuple(f[a] for a in t)) for (n, t), w in weights.items())
        sB = sum(B.value(n, tuple(f[a] for a in t)) for (n, t) in weights)
        gaps.append(vB - vA)
        spreads.append(abs(sB - sA))
    # a uniform bump makes every finite tuple carry weight, so maps leaving the
    # finite part pay INF, while the strict gap on the listed maps survives
    delta = min(gaps) if gaps else Fraction(1)
    eps = delta / (2 * (max(spreads, default=Fraction(0)) + 1))
    rels = {}
    for name in A.signature.names:
        entries = {t: w + eps for (n, t), w in weights.items() if n == name}
        rels[name] = ValuedRelation(Fraction(0), entries)
    return Structure.valued(A.signature, A.universe, rels)


def _active_support(X: Structure) -> Tuple[Structure, tuple]:
    S = support(X)
    active = [a for a in X.universe if any(a in c.scope for c in S.constraints)]
    act = set(active)
    rels = {n: [t for t in S.relations[n] if act.issuperset(t)] for n in S.signature.names}
    return Structure.crisp(S.signature, active, rels, allow_empty=True), tuple(a for a in X.universe if a not in act)


def dual_frac_hom_lp(X: Structure, Y: Structure, budget: Optional[int] = None) -> MorphismProgram:
    """Is there a distribution over maps ``X -> Y`` pushing ``X``'s weight below ``Y``'s pointwise?

    Elements outside every weighted scope do not affect any row, so they are
    sent to the first element of ``Y``; maps hitting a zero-weight tuple of
    ``Y`` are forced to probability zero and are left out.
    """
    require_similar(X, Y)
    X, Y = as_instance(X), as_instance(Y)
    if not (X.is_nonnegative_finite() and Y.is_nonnegative_finite()):
        raise ValidationError("instances must be finite and non-negative")
    _budget("dual fractional homomorphism maps", len(Y) ** len(X), budget)
    lp = LinearProgram("dualfrachom")
    Xa, idle = _active_support(X)
    maps = []
    if len(Y) or not X.universe:
        for h in iter_homomorphisms(Xa, support(Y)):
            f = dict(h)
            for x in idle:
                f[x] = Y.universe[0]
            maps.append({x: f[x] for x in X.universe})
    for k in range(len(maps)):
        lp.add_variable(_mu(k))
    cols: Dict[Tuple[str, tuple], Dict[str, Fraction]] = {}
    for k, f in enumerate(maps):
        for c in X.constraints:
            key = (c.symbol, tuple(f[x] for x in c.scope))
            row = cols.setdefault(key, {})
            row[_mu(k)] = row.get(_mu(k), Fraction(0)) + c.weight
    rows: List[object] = []
    for name in Y.signature.names:
        keys = sorted((key for key in cols if key[0] == name), key=lambda kk: Y.tuple_key(kk[1]))
        for key in keys:
            lp.add_constraint(cols[key], LE, Y.weight(*key))
            rows.append(key)
    lp.add_constraint({_mu(k): 1 for k in range(len(maps))}, EQ, 1)
    rows.append("sum")
    return MorphismProgram(lp, maps, solve(lp), rows)


def dfh_separator(X: Structure, Y: Structure, prog: MorphismProgram) -> Structure:
    """Template on ``Y``'s universe with ``Opt(Y, A) < Opt(X, A)``, built from the Farkas multipliers."""
    if prog.status != INFEASIBLE:
        raise ValueError("separator needs an infeasible program")
    X, Y = as_instance(X), as_instance(Y)
    y = prog.result.farkas
    z: Dict[Tuple[str, tuple], Fraction] = {}
    for i, row in enumerate(prog.rows):
        if row != "sum":
            z[row] = y.get(f"c{i}+", Fraction(0))
    base = sum(Y.weight(n, t) * v for (n, t), v in z.items())
    w_min = min((c.weight for c in X.constraints), default=Fraction(1))
    big = base / w_min + 1
    rels = {}
    for name, r in Y.signature:
        entries = {}
        for t in itertools.product(Y.universe, repeat=r):
            if (name, t) in z:
                entries[t] = z[(name, t)]
            elif Y.weight(name, t) == 0:
                entries[t] = big
        rels[name] = ValuedRelation(Fraction(0), entries)
    return Structure.valued(Y.signature, Y.universe, rels)


def multisets(U: Sequence, n: int) -> List[tuple]:
    return list(itertools.combinations_with_replacement(U, n))


def _poly_key(U_index, args, symmetric):
    if symmetric:
        return tuple(sorted(args, key=U_index.__getitem__))
    return tuple(args)


def frac_polymorphism_lp(A: Structure, B: Structure, n: int, symmetric_only: bool = False,
                         budget: Optional[int] = None) -> MorphismProgram:
    """Distribution over ``n``-ary operations ``A^n -> B`` beating the average cost on every list of tuples."""
    require_similar(A, B)
    A, B = as_template(A), as_template(B)
    if n < 1:
        raise ValidationError("arity must be at least 1")
    args = multisets(A.universe, n) if symmetric_only else list(itertools.product(A.universe, repeat=n))
    _budget("operations", len(B) ** len(args), budget)
    lists = []
    for name, r in A.signature:
        fin = A.tuples(name)
        for lst in itertools.product(fin, repeat=n):
            rhs = sum(A.value(name, t) for t in lst) / n
            cols = [tuple(t[j] for t in lst) for j in range(r)]
            lists.append((name, cols, rhs))
    aidx = A.index
    maps = []
    for values in itertools.product(B.universe, repeat=len(args)):
        f = dict(zip(args, values))
        ok = True
        for name, cols, _ in lists:
            if B.value(name, tuple(f[_poly_key(aidx, c, symmetric_only)] for c in cols)) is INF:
                ok = False
                break
        if ok:
            maps.append(f)
    lp = LinearProgram(f"fracpoly{n}{'s' if symmetric_only else ''}")
    for k in range(len(maps)):
        lp.add_variable(_mu(k))
    rows: List[object] = []
    for name, cols, rhs in lists:
        co = {_mu(k): B.value(name, tuple(f[_poly_key(aidx, c, symmetric_only)] for c in cols))
              for k, f in enumerate(maps)}
        lp.add_constraint(co, LE, rhs)
        rows.append((name, tuple(cols)))
    lp.add_constraint({_mu(k): 1 for k in range(len(maps))}, EQ, 1)
    rows.append("sum")
    return MorphismProgram(lp, maps, solve(lp), rows)


def is_polymorphism(A: Structure, f: dict, n: int, symmetric: bool) -> bool:
    aidx = A.index
    for name, r in A.signature:
        rel = A.relations[name] if A.kind == CRISP else set(A.tuples(name))
        for lst in itertools.product(sorted(rel, key=A.tuple_key), repeat=n):
            image = tuple(f[_poly_key(aidx, tuple(t[j] for t in lst), symmetric)] for j in range(r))
            if not A.holds(name, image):
                return False
    return True


def find_symmetric_polymorphisms(A: Structure, n: int, budget: Optional[int] = None) -> List[dict]:
    """All symmetric ``n``-ary polymorphisms of a crisp structure, keyed by sorted argument tuples."""
    _require_crisp_template(A)
    args = multisets(A.universe, n)
    _budget("symmetric operations", len(A) ** len(args), budget)
    found = []
    for values in itertools.product(A.universe, repeat=len(args)):
        f = dict(zip(args, values))
        if is_polymorphism(A, f, n, True):
            found.append(f)
    return found

