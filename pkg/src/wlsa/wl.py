"""Colour refinement on factor graphs, equitable partitions and fractional isomorphism."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from .core import (Label, Structure, adjacency_matrix, disjoint_union, element_name, factor_graph, labels_used,
                   matrix_slice, require_similar)
from .core.structure import CRISP, FactorGraph, edge_label
from .errors import ValidationError
from .lp import EQ, INFEASIBLE, LinearProgram, SolveResult, record, solve, verify_certificate


@dataclass
class Coloring:
    colors: List[int]
    history: List[int]          # number of colour classes after each round

    @property
    def rounds(self) -> int:
        return len(self.history) - 1

    @property
    def n_classes(self) -> int:
        return self.history[-1]


def refine(fg: FactorGraph) -> Coloring:
    """Iterate neighbourhood-multiset refinement from the variable/constraint split to its fixpoint."""
    n_var = len(fg.variables)
    N = fg.n_vertices
    label_keys = sorted({lab.key() for adj in fg.adjacency for _, lab in adj})
    lab_id = {k: i for i, k in enumerate(label_keys)}
    nbrs = [[(lab_id[lab.key()], w) for w, lab in fg.adjacency[v]] for v in range(N)]
    colors = [0 if v < n_var else 1 for v in range(N)]
    count = len(set(colors))
    history = [count]
    for _ in range(2 * N + 1):
        sigs = [(colors[v], tuple(sorted((l, colors[w]) for l, w in nbrs[v]))) for v in range(N)]
        palette = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [palette[s] for s in sigs]
        new_count = len(palette)
        colors = new
        if new_count == count:
            break
        count = new_count
        history.append(count)
    else:
        raise AssertionError("refinement did not stabilise")
    return Coloring(colors, history)


def stable_coloring(A: Structure) -> Coloring:
    return refine(factor_graph(A))


def _union_coloring(A: Structure, B: Structure) -> Tuple[Structure, FactorGraph, Coloring]:
    U = disjoint_union(A, B)
    fg = factor_graph(U)
    return U, fg, refine(fg)


def equiv1(A: Structure, B: Structure) -> bool:
    """Do ``A`` and ``B`` receive the same multiset of stable element colours?"""
    require_similar(A, B)
    if len(A) != len(B):
        return False
    U, fg, col = _union_coloring(A, B)
    n = len(A)
    left = sorted(col.colors[:n])
    right = sorted(col.colors[n:2 * n])
    return left == right


# ---------------------------------------------------------------------------
# equitable partitions


@dataclass
class EquitabilityReport:
    params: Optional[dict]
    witness: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.params is not None


def verify_equitable(S: Structure, var_classes: List[List], con_classes: List[List[int]]) -> EquitabilityReport:
    """Check that every element/constraint class sees each other class through each label equally often.

    ``var_classes`` partitions the elements, ``con_classes`` the constraint
    indices of ``S``.  Returns the count tables ``c[(i, j, label)]`` and
    ``d[(j, i, label)]`` or the first violation found.
    """
    cons = S.constraints
    vclass = {}
    for i, cls in enumerate(var_classes):
        for a in cls:
            if a in vclass:
                return EquitabilityReport(None, f"element {element_name(a)} in two classes")
            vclass[a] = i
    cclass = {}
    for j, cls in enumerate(con_classes):
        for c in cls:
            if c in cclass:
                return EquitabilityReport(None, f"constraint {c} in two classes")
            cclass[c] = j
    if set(vclass) != set(S.universe) or set(cclass) != set(range(len(cons))):
        return EquitabilityReport(None, "classes do not cover the structure")
    v_counts: Dict[object, Dict[tuple, int]] = {a: {} for a in S.universe}
    c_counts: Dict[int, Dict[tuple, int]] = {j: {} for j in range(len(cons))}
    for j, c in enumerate(cons):
        for a in dict.fromkeys(c.scope):
            lk = edge_label(c, a).key()
            key = (cclass[j], lk)
            v_counts[a][key] = v_counts[a].get(key, 0) + 1
            key = (vclass[a], lk)
            c_counts[j][key] = c_counts[j].get(key, 0) + 1
    c_par, d_par = {}, {}
    for i, cls in enumerate(var_classes):
        ref = v_counts[cls[0]] if cls else {}
        for a in cls:
            if v_counts[a] != ref:
                return EquitabilityReport(None, f"elements {element_name(cls[0])} and {element_name(a)} "
                                                f"of class {i} see different counts")
        for (j, lk), cnt in ref.items():
            c_par[(i, j, lk)] = cnt
    for j, cls in enumerate(con_classes):
        ref = c_counts[cls[0]] if cls else {}
        for c in cls:
            if c_counts[c] != ref:
                return EquitabilityReport(None, f"constraints {cls[0]} and {c} of class {j} see different counts")
        for (i, lk), cnt in ref.items():
            d_par[(j, i, lk)] = cnt
    return EquitabilityReport({"c": c_par, "d": d_par})


@dataclass
class EquitablePartition:
    union: Structure
    var_classes: List[List]          # elements of the tagged union
    con_classes: List[List[int]]     # constraint indices of the union
    params: dict

    def split(self, side: int):
        """Per class, the members coming from ``A`` (side 0) or ``B`` (side 1)."""
        vs = [[a[1] for a in cls if a[0] == side] for cls in self.var_classes]
        cons = self.union.constraints
        cs = [[cons[j] for j in cls if cons[j].scope[0][0] == side] for cls in self.con_classes]
        return vs, cs


def common_equitable_partition(A: Structure, B: Structure) -> Optional[EquitablePartition]:
    """Stable partition of the union when both sides are equally represented in every class."""
    require_similar(A, B)
    if len(A) != len(B) or len(A.constraints) != len(B.constraints):
        return None
    U, fg, col = _union_coloring(A, B)
    n = len(U.universe)
    vcls: Dict[int, list] = {}
    for v, a in enumerate(U.universe):
        vcls.setdefault(col.colors[v], []).append(a)
    ccls: Dict[int, list] = {}
    for j in range(len(U.constraints)):
        ccls.setdefault(col.colors[n + j], []).append(j)
    var_classes = [vcls[k] for k in sorted(vcls)]
    con_classes = [ccls[k] for k in sorted(ccls)]
    cons = U.constraints
    for cls in var_classes:
        if sum(1 for a in cls if a[0] == 0) * 2 != len(cls):
            return None
    for cls in con_classes:
        if sum(1 for j in cls if cons[j].scope[0][0] == 0) * 2 != len(cls):
            return None
    rep = verify_equitable(U, var_classes, con_classes)
    if not rep.ok:
        raise AssertionError(f"stable colouring is not equitable: {rep.witness}")
    return EquitablePartition(U, var_classes, con_classes, rep.params)


# ---------------------------------------------------------------------------
# fractional isomorphism


def _zeros(r, c):
    return np.full((r, c), Fraction(0), dtype=object)


def check_fractional_iso(A: Structure, B: Structure, P, Q) -> bool:
    """Exact check of the doubly stochastic intertwining equations for every used label."""
    P = np.asarray(P, dtype=object)
    Q = np.asarray(Q, dtype=object)
    nA, nB, cA, cB = len(A), len(B), len(A.constraints), len(B.constraints)
    if P.shape != (nB, nA) or Q.shape != (cB, cA):
        return False
    for M in (P, Q):
        if any(v < 0 for v in M.flat):
            return False
        if any(s != 1 for s in M.sum(axis=0)) or any(s != 1 for s in M.sum(axis=1)):
            return False
    for lab in labels_used(A, B):
        MA = matrix_slice(A, lab).astype(object)
        MB = matrix_slice(B, lab).astype(object)
        if not np.array_equal(P.dot(MA), MB.dot(Q)):
            return False
        if not np.array_equal(MA.dot(Q.T), P.T.dot(MB)):
            return False
    return True


def _union_constraint_map(A: Structure, B: Structure, U: Structure) -> List[Tuple[int, int]]:
    """For each constraint of the tagged union: (side, index in that side's constraint list)."""
    where = [{(c.symbol, c.scope): j for j, c in enumerate(S.constraints)} for S in (A, B)]
    out = []
    for c in U.constraints:
        side = c.scope[0][0]
        out.append((side, where[side][(c.symbol, tuple(e[1] for e in c.scope))]))
    return out


def equitable_witness(A: Structure, B: Structure):
    """Block-uniform doubly stochastic pair built from the common equitable partition, or None."""
    part = common_equitable_partition(A, B)
    if part is None:
        return None
    P = _zeros(len(B), len(A))
    for cls in part.var_classes:
        a_side = [a[1] for a in cls if a[0] == 0]
        b_side = [b[1] for b in cls if b[0] == 1]
        w = Fraction(1, len(a_side))
        for b in b_side:
            for a in a_side:
                P[B.index[b], A.index[a]] = w
    cmap = _union_constraint_map(A, B, part.union)
    Q = _zeros(len(B.constraints), len(A.constraints))
    for cls in part.con_classes:
        a_side = [cmap[j][1] for j in cls if cmap[j][0] == 0]
        b_side = [cmap[j][1] for j in cls if cmap[j][0] == 1]
        w = Fraction(1, len(a_side))
        for jb in b_side:
            for ja in a_side:
                Q[jb, ja] = w
    return P, Q


@dataclass
class FracIsoResult:
    lp: LinearProgram
    result: SolveResult
    P: Optional[np.ndarray] = None
    Q: Optional[np.ndarray] = None

    @property
    def status(self):
        return self.result.status

    @property
    def feasible(self) -> bool:
        return self.result.feasible


def _pname(b, a):
    return f"P[{element_name(b)}|{element_name(a)}]"


def _qname(jb, ja):
    return f"Q[{jb}|{ja}]"


def _stochastic_rows(lp: LinearProgram, rows, cols, name) -> Tuple[List[int], List[int]]:
    row_ids, col_ids = [], []
    for r in rows:
        row_ids.append(lp.add_constraint({name(r, c): 1 for c in cols}, EQ, 1))
    for c in cols:
        col_ids.append(lp.add_constraint({name(r, c): 1 for r in rows}, EQ, 1))
    return row_ids, col_ids


def _size_certificate(row_ids, col_ids, n_rows, n_cols) -> Dict[str, Fraction]:
    """Summing the row equations against the column equations exposes unequal dimensions."""
    y = {}
    if n_rows < n_cols:
        for i in row_ids:
            y[f"c{i}+"] = Fraction(1)
        for i in col_ids:
            y[f"c{i}-"] = Fraction(1)
    else:
        for i in row_ids:
            y[f"c{i}-"] = Fraction(1)
        for i in col_ids:
            y[f"c{i}+"] = Fraction(1)
    return y


def fractional_iso_lp(A: Structure, B: Structure) -> FracIsoResult:
    """Search doubly stochastic ``P`` (``B`` x ``A``) and ``Q`` intertwining every label slice."""
    require_similar(A, B)
    consA, consB = A.constraints, B.constraints
    lp = LinearProgram("fraciso")
    for b in B.universe:
        for a in A.universe:
            lp.add_variable(_pname(b, a), 0, 1)
    for jb in range(len(consB)):
        for ja in range(len(consA)):
            lp.add_variable(_qname(jb, ja), 0, 1)
    p_rows = _stochastic_rows(lp, B.universe, A.universe, _pname)
    q_rows = _stochastic_rows(lp, range(len(consB)), range(len(consA)), _qname)
    # per label: the element of each constraint carrying it, and the constraints of each element carrying it
    labels = labels_used(A, B)

    def incidence(S: Structure):
        at_con: Dict[tuple, Dict[int, object]] = {}
        at_elem: Dict[tuple, Dict[object, List[int]]] = {}
        for j, c in enumerate(S.constraints):
            for a in dict.fromkeys(c.scope):
                lk = edge_label(c, a).key()
                at_con.setdefault(lk, {})[j] = a
                at_elem.setdefault(lk, {}).setdefault(a, []).append(j)
        return at_con, at_elem

    conA, elemA = incidence(A)
    conB, elemB = incidence(B)
    for lab in labels:
        lk = lab.key()
        cA, eA = conA.get(lk, {}), elemA.get(lk, {})
        cB, eB = conB.get(lk, {}), elemB.get(lk, {})
        # (P M_A)[b, C] = (M_B Q)[b, C]
        for b in B.universe:
            for ja in range(len(consA)):
                row = {}
                if ja in cA:
                    row[_pname(b, cA[ja])] = Fraction(1)
                for jb in eB.get(b, ()):
                    row[_qname(jb, ja)] = row.get(_qname(jb, ja), Fraction(0)) - 1
                if row:
                    lp.add_constraint(row, EQ, 0)
        # (M_A Q^T)[a, C'] = (P^T M_B)[a, C']
        for a in A.universe:
            for jb in range(len(consB)):
                row = {}
                for ja in eA.get(a, ()):
                    row[_qname(jb, ja)] = Fraction(1)
                if jb in cB:
                    key = _pname(cB[jb], a)
                    row[key] = row.get(key, Fraction(0)) - 1
                if row:
                    lp.add_constraint(row, EQ, 0)
    if len(A) != len(B) or len(consA) != len(consB):
        if len(A) != len(B):
            y = _size_certificate(*p_rows, len(B), len(A))
        else:
            y = _size_certificate(*q_rows, len(consB), len(consA))
        res = SolveResult(INFEASIBLE, farkas=y)
        if not verify_certificate(lp, res):
            raise AssertionError("size certificate failed")
        record(lp, res)
        return FracIsoResult(lp, res)
    res = solve(lp)
    out = FracIsoResult(lp, res)
    if res.feasible:
        x = res.assignment
        out.P = np.array([[x[_pname(b, a)] for a in A.universe] for b in B.universe], dtype=object).reshape(len(B), len(A))
        out.Q = np.array([[x[_qname(jb, ja)] for ja in range(len(consA))] for jb in range(len(consB))],
                         dtype=object).reshape(len(consB), len(consA))
    return out


def graph_fractional_iso(G: Structure, H: Structure) -> FracIsoResult:
    """Doubly stochastic ``P`` with ``P N_G = N_H P`` for undirected loopless graphs."""
    require_similar(G, H)
    for S in (G, H):
        if S.kind != CRISP or not is_undirected_graph(S):
            raise ValidationError("expected a graph: one symmetric irreflexive binary relation")
    NG, NH = adjacency_matrix(G), adjacency_matrix(H)
    lp = LinearProgram("graphfraciso")
    for b in H.universe:
        for a in G.universe:
            lp.add_variable(_pname(b, a), 0, 1)
    p_rows = _stochastic_rows(lp, H.universe, G.universe, _pname)
    for bi, b in enumerate(H.universe):
        for ai, a in enumerate(G.universe):
            row = {}
            for ci, c in enumerate(G.universe):
                if NG[ci, ai]:
                    row[_pname(b, c)] = Fraction(1)
            for di, d in enumerate(H.universe):
                if NH[bi, di]:
                    key = _pname(d, a)
                    row[key] = row.get(key, Fraction(0)) - 1
            if row:
                lp.add_constraint(row, EQ, 0)
    if len(G) != len(H):
        res = SolveResult(INFEASIBLE, farkas=_size_certificate(*p_rows, len(H), len(G)))
        if not verify_certificate(lp, res):
            raise AssertionError("size certificate failed")
        record(lp, res)
        return FracIsoResult(lp, res)
    res = solve(lp)
    out = FracIsoResult(lp, res)
    if res.feasible:
        x = res.assignment
        out.P = np.array([[x[_pname(b, a)] for a in G.universe] for b in H.universe], dtype=object)
    return out


def is_undirected_graph(G: Structure) -> bool:
    if len(G.signature) != 1 or G.signature.max_arity != 2:
        return False
    (name, _), = G.signature.symbols
    E = G.relations[name]
    return all((b, a) in E and a != b for a, b in E)
