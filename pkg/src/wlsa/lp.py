"""Exact rational linear programming.

Programs are stated over named non-negative variables with optional upper
bounds.  :func:`solve` runs a two-phase sparse tableau simplex with Bland's
rule on exact rationals (``gmpy2.mpq`` inside, :class:`fractions.Fraction` at
the interface), so every answer is exact and reproducible.  Each answer
carries a certificate that :func:`verify_certificate` checks by substitution
alone:

* feasible / optimal: the assignment, and for optimal also dual multipliers;
* infeasible: Farkas multipliers ``y >= 0`` over the canonical ``<=`` rows
  with ``y^T M >= 0`` and ``y^T b < 0``.

The canonical rows of a program are ``a.x <= b`` (key ``c<i>+``) for every
``<=`` or ``=`` constraint, ``-a.x <= -b`` (key ``c<i>-``) for every ``>=`` or
``=`` constraint, ``x <= hi`` (key ``ub:<var>``) and ``-x <= -lo`` for
positive lower bounds (key ``lb:<var>``).
"""

from __future__ import annotations

import contextvars
import copy
import json
import re
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from gmpy2 import mpq

LE, GE, EQ = "<=", ">=", "="

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
OPTIMAL = "optimal"
UNBOUNDED = "unbounded"

ZERO = Fraction(0)
ONE = Fraction(1)

# the tableau itself runs on gmpy2 rationals; answers are handed back as Fractions
QZERO = mpq(0)
QONE = mpq(1)


def _frac(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


@dataclass
class LinearConstraint:
    coeffs: Dict[str, Fraction]
    sense: str
    rhs: Fraction
    name: str = ""


class LinearProgram:
    """A linear program under construction; minimisation when an objective is set."""

    def __init__(self, name: str = ""):
        self.name = name
        self.variables: Dict[str, Tuple[Fraction, Optional[Fraction]]] = {}
        self.constraints: List[LinearConstraint] = []
        self.objective: Optional[Dict[str, Fraction]] = None

    def add_variable(self, name: str, lo=0, hi=None) -> str:
        if name in self.variables:
            raise ValueError(f"duplicate variable {name}")
        lo = Fraction(lo)
        if lo < 0:
            raise ValueError("variables must have a non-negative lower bound")
        hi = None if hi is None else Fraction(hi)
        self.variables[name] = (lo, hi)
        return name

    def add_constraint(self, coeffs: Dict[str, object], sense: str, rhs, name: str = "") -> int:
        if sense not in (LE, GE, EQ):
            raise ValueError(f"bad sense {sense!r}")
        clean = {}
        for v, a in coeffs.items():
            if v not in self.variables:
                raise KeyError(f"unknown variable {v}")
            if type(a) is not Fraction:
                a = Fraction(a)
            if a:
                clean[v] = clean[v] + a if v in clean else a
        clean = {v: a for v, a in clean.items() if a}
        self.constraints.append(LinearConstraint(clean, sense, Fraction(rhs), name))
        return len(self.constraints) - 1

    def minimize(self, coeffs: Dict[str, object]):
        for v in coeffs:
            if v not in self.variables:
                raise KeyError(f"unknown variable {v}")
        self.objective = {v: Fraction(a) for v, a in coeffs.items() if a}

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    def canonical_rows(self) -> List[Tuple[str, Dict[str, Fraction], Fraction]]:
        rows = []
        for i, c in enumerate(self.constraints):
            if c.sense in (LE, EQ):
                rows.append((f"c{i}+", c.coeffs, c.rhs))
            if c.sense in (GE, EQ):
                rows.append((f"c{i}-", {v: -a for v, a in c.coeffs.items()}, -c.rhs))
        for v, (lo, hi) in self.variables.items():
            if hi is not None:
                rows.append((f"ub:{v}", {v: ONE}, hi))
            if lo > 0:
                rows.append((f"lb:{v}", {v: -ONE}, -lo))
        return rows

    def satisfied_by(self, x: Dict[str, object]) -> bool:
        """Does the point ``x`` (missing variables read as 0) satisfy every row and bound?"""
        if set(x) - set(self.variables):
            return False
        vals = {v: Fraction(a) for v, a in x.items()}
        if any(a < 0 for a in vals.values()):
            return False
        for _, co, b in self.canonical_rows():
            if sum((a * vals.get(v, ZERO) for v, a in co.items()), ZERO) > b:
                return False
        return True

    def dump(self) -> str:
        """CPLEX-style text with exact rational coefficients."""
        names = list(self.variables)
        order = {v: i for i, v in enumerate(names)}
        alias = {v: (v if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.]*", v) else f"x{i}") for i, v in enumerate(names)}
        out = [f"\\ {self.name or 'program'}"]
        for v in names:
            if alias[v] != v:
                out.append(f"\\ {alias[v]} = {v}")

        def expr(coeffs):
            if not coeffs:
                return "0"
            parts = []
            for v in sorted(coeffs, key=order.__getitem__):
                a = coeffs[v]
                sign = "-" if a < 0 else "+"
                mag = abs(a)
                parts.append(f"{sign} {'' if mag == 1 else str(mag) + ' '}{alias[v]}")
            s = " ".join(parts)
            return s[2:] if s.startswith("+ ") else s

        out.append("Minimize")
        out.append(f" obj: {expr(self.objective or {})}")
        out.append("Subject To")
        for i, c in enumerate(self.constraints):
            out.append(f" c{i}: {expr(c.coeffs)} {c.sense} {c.rhs}")
        out.append("Bounds")
        for v in names:
            lo, hi = self.variables[v]
            out.append(f" {lo} <= {alias[v]}" + ("" if hi is None else f" <= {hi}"))
        out.append("End")
        return "\n".join(out) + "\n"


@dataclass
class SolveResult:
    status: str
    assignment: Optional[Dict[str, Fraction]] = None
    value: Optional[Fraction] = None
    farkas: Optional[Dict[str, Fraction]] = None
    duals: Optional[Dict[str, Fraction]] = None
    ray: Optional[Dict[str, Fraction]] = None
    pivots: int = 0

    @property
    def feasible(self) -> bool:
        return self.status in (FEASIBLE, OPTIMAL, UNBOUNDED)

    def to_json(self) -> dict:
        def vec(d):
            return None if d is None else {k: str(v) for k, v in d.items()}
        out = {"status": self.status}
        if self.value is not None:
            out["value"] = str(self.value)
        for key in ("assignment", "farkas", "duals", "ray"):
            if getattr(self, key) is not None:
                out[key] = vec(getattr(self, key))
        return out


# ---------------------------------------------------------------------------
# solve log: every program solved inside ``recording()`` is kept for auditing

_log: contextvars.ContextVar = contextvars.ContextVar("wlsa_lp_log", default=None)


@contextmanager
def recording():
    log: List[Tuple[LinearProgram, SolveResult]] = []
    token = _log.set(log)
    try:
        yield log
    finally:
        _log.reset(token)


def record(lp: LinearProgram, res: SolveResult):
    log = _log.get()
    if log is not None:
        log.append((lp, res))


# ---------------------------------------------------------------------------
# internal rows

@dataclass
class _Row:
    coeffs: Dict[int, Fraction]   # original coefficients
    sense: str                    # LE or EQ
    rhs: Fraction
    key: str                      # canonical key of the <= orientation (EQ rows: the '+' key)
    key_neg: str = ""             # EQ rows: key of the negated orientation
    bound: bool = False           # a declared upper bound
    live: Dict[int, Fraction] = field(default_factory=dict)


def _internal_rows(lp: LinearProgram, names: List[str]) -> List[_Row]:
    idx = {v: i for i, v in enumerate(names)}
    rows: List[_Row] = []
    for i, c in enumerate(lp.constraints):
        co = {idx[v]: a for v, a in c.coeffs.items()}
        if c.sense == LE:
            rows.append(_Row(co, LE, c.rhs, f"c{i}+"))
        elif c.sense == GE:
            rows.append(_Row({j: -a for j, a in co.items()}, LE, -c.rhs, f"c{i}-"))
        else:
            rows.append(_Row(co, EQ, c.rhs, f"c{i}+", f"c{i}-"))
    for j, v in enumerate(names):
        lo, hi = lp.variables[v]
        if hi is not None:
            rows.append(_Row({j: ONE}, LE, hi, f"ub:{v}", bound=True))
        if lo > 0:
            rows.append(_Row({j: -ONE}, LE, -lo, f"lb:{v}"))
    for r in rows:
        r.live = dict(r.coeffs)
    return rows


def _implied_upper_bounds(rows: List[_Row], wanted: Dict[int, Fraction]) -> Dict[int, Fraction]:
    """Upper bounds on live columns derivable from the given rows and non-negativity.

    Stops early once every bound in ``wanted`` is implied.
    """
    ub: Dict[int, Fraction] = {}
    for _ in range(4):
        changed = False
        for r in rows:
            items = list(r.live.items())
            pos_sum, pos_unknown = ZERO, 0
            neg_sum, neg_unknown = ZERO, 0
            for j, a in items:
                u = ub.get(j)
                if a > 0:
                    if u is None:
                        pos_unknown += 1
                    else:
                        pos_sum += a * u
                else:
                    if u is None:
                        neg_unknown += 1
                    else:
                        neg_sum -= a * u
            for j, a in items:
                bound = None
                if a > 0:
                    # a x_j <= b + sum |a_l| x_l over negative l
                    if neg_unknown == 0:
                        bound = (r.rhs + neg_sum) / a
                elif r.sense == EQ:
                    if pos_unknown == 0:
                        bound = (pos_sum - r.rhs) / (-a)
                if bound is not None:
                    if bound < 0:
                        bound = ZERO
                    u = ub.get(j)
                    if u is None or bound < u:
                        ub[j] = bound
                        changed = True
        if not changed or all(j in ub and ub[j] <= h for j, h in wanted.items()):
            break
    return ub


class _Tableau:
    def __init__(self, rows, rhs, basis):
        self.rows: List[Dict[int, Fraction]] = rows
        self.rhs: List[Fraction] = rhs
        self.basis: List[int] = basis
        self.pivots = 0
        self.cols: Dict[int, set] = {}
        for i, ri in enumerate(rows):
            for k in ri:
                self.cols.setdefault(k, set()).add(i)

    def pivot(self, r: int, e: int, obj: Dict[int, Fraction]) -> Fraction:
        row = self.rows[r]
        piv = row[e]
        if piv != 1:
            row = {k: v / piv for k, v in row.items()}
            self.rows[r] = row
            self.rhs[r] = self.rhs[r] / piv
        br = self.rhs[r]
        items = list(row.items())
        cols = self.cols
        for i in list(cols[e]):
            if i == r:
                continue
            ri = self.rows[i]
            f = ri[e]
            for k, v in items:
                old = ri.get(k)
                nv = (QZERO if old is None else old) - f * v
                if nv:
                    ri[k] = nv
                    if old is None:
                        cols.setdefault(k, set()).add(i)
                else:
                    del ri[k]
                    cols[k].discard(i)
            if br:
                self.rhs[i] -= f * br
        f = obj.get(e)
        delta = QZERO
        if f is not None:
            for k, v in items:
                nv = obj.get(k, QZERO) - f * v
                if nv:
                    obj[k] = nv
                else:
                    del obj[k]
            delta = f * br
        self.basis[r] = e
        self.pivots += 1
        return delta

    def run(self, obj: Dict[int, Fraction], barred: int) -> Tuple[Fraction, Optional[int]]:
        """Bland's rule until optimal; returns (objective change, unbounded column)."""
        total = QZERO
        while True:
            e = None
            for k, v in obj.items():
                if v < 0 and k < barred and (e is None or k < e):
                    e = k
            if e is None:
                return total, None
            best = None
            for i in self.cols.get(e, ()):
                a = self.rows[i][e]
                if a <= 0:
                    continue
                ratio = self.rhs[i] / a
                if best is None or ratio < best[0] or (ratio == best[0] and self.basis[i] < self.basis[best[1]]):
                    best = (ratio, i)
            if best is None:
                return total, e
            total += self.pivot(best[1], e, obj)


def solve(lp: LinearProgram) -> SolveResult:
    """Solve exactly; feasibility programs (no objective) report FEASIBLE/INFEASIBLE."""
    res = _solve(lp)
    if not verify_certificate(lp, res):
        raise AssertionError(f"solver produced an unverifiable {res.status} answer for {lp.name}")
    record(lp, res)
    return res


def solve_feasibility(lp: LinearProgram) -> SolveResult:
    """FEASIBLE or INFEASIBLE, ignoring any objective."""
    if lp.objective is None:
        return solve(lp)
    plain = copy.copy(lp)
    plain.objective = None
    return solve(plain)


def solve_optimum(lp: LinearProgram) -> SolveResult:
    if lp.objective is None:
        raise ValueError("program has no objective")
    return solve(lp)


class _Presolve:
    """Zero-fixing and two-term substitution, with enough history to undo both.

    A row with zero right-hand side whose live coefficients share one sign
    fixes those columns to zero.  An equality ``a x_i + b x_j = 0`` with
    opposite signs merges column ``i`` into ``j`` via ``x_i = c x_j``, c > 0.
    Every live column then stands for a group of original variables with
    positive multipliers, and a live coefficient is the multiplier-weighted sum
    of the original ones.  Certificates for the reduced program are lifted back
    by adding multiples of the recorded rows, whose right-hand sides are zero.
    """

    def __init__(self, rows: List[_Row], n: int, cost: Dict[int, Fraction]):
        self.rows = rows
        self.n = n
        self.cost = dict(cost)
        self.col_rows: Dict[int, set] = {}
        for ri, r in enumerate(rows):
            for j in r.live:
                self.col_rows.setdefault(j, set()).add(ri)
        self.gone = [False] * n
        self.members: Dict[int, list] = {}
        self.steps: list = []
        self.merges: List[Tuple[int, int, Fraction]] = []
        self.conflict: Optional[Tuple[int, int]] = None
        self._queue = list(range(len(rows)))
        self._queued = [True] * len(rows)

    def group(self, j: int) -> list:
        return self.members.get(j) or [(j, ONE)]

    def _touch(self, ri: int):
        if not self._queued[ri]:
            self._queued[ri] = True
            self._queue.append(ri)

    def run(self):
        rows = self.rows
        while self._queue:
            ri = self._queue.pop()
            self._queued[ri] = False
            r = rows[ri]
            live = r.live
            pos = neg = False
            for a in live.values():
                if a.numerator > 0:
                    pos = True
                else:
                    neg = True
            if r.sense == LE:
                if r.rhs < 0 and not neg:
                    self.conflict = (ri, 1)
                elif r.rhs == 0 and pos and not neg:
                    self._fix(ri, 1)
            else:
                if r.rhs < 0 and not neg:
                    self.conflict = (ri, 1)
                elif r.rhs > 0 and not pos:
                    self.conflict = (ri, -1)
                elif r.rhs == 0 and live and not (pos and neg):
                    self._fix(ri, 1 if pos else -1)
                elif r.rhs == 0 and len(live) == 2:
                    self._merge(ri)
            if self.conflict is not None:
                return

    def _fix(self, ri: int, sign: int):
        live = self.rows[ri].live
        cols = [(j, live[j], self.group(j)) for j in sorted(live)]
        self.steps.append(("fix", ri, sign, cols))
        for j, _, _ in cols:
            self.gone[j] = True
            self.cost.pop(j, None)
            for rr in self.col_rows.pop(j, ()):
                self.rows[rr].live.pop(j, None)
                self._touch(rr)

    def _merge(self, ri: int):
        live = self.rows[ri].live
        j, i = sorted(live)
        a, b = live[i], live[j]
        c = -b / a
        self.steps.append(("merge", ri, a, self.group(i)))
        self.merges.append((i, j, c))
        keep = self.col_rows.setdefault(j, set())
        for rr in self.col_rows.pop(i, ()):
            lv = self.rows[rr].live
            nv = lv.get(j, ZERO) + c * lv.pop(i)
            if nv:
                lv[j] = nv
                keep.add(rr)
            else:
                lv.pop(j, None)
                keep.discard(rr)
            self._touch(rr)
        self.members[j] = self.group(j) + [(v, m * c) for v, m in self.group(i)]
        self.members.pop(i, None)
        ci = self.cost.pop(i, ZERO)
        if ci:
            nc = self.cost.get(j, ZERO) + c * ci
            if nc:
                self.cost[j] = nc
            else:
                self.cost.pop(j, None)
        self.gone[i] = True

    def kept_rows(self) -> List[int]:
        """Rows left for the simplex.

        Drops empty, trivially satisfied and repeated rows, and declared upper
        bounds already implied by the other remaining rows.
        """
        seen = set()
        out = []
        for ri, r in enumerate(self.rows):
            live = r.live
            if not live:
                continue
            if r.sense == LE and r.rhs >= 0 and all(a < 0 for a in live.values()):
                continue
            items = sorted(live.items())
            scale = items[0][1] if r.sense == EQ else abs(items[0][1])
            key = (r.sense, tuple((j, a / scale) for j, a in items), r.rhs / scale)
            if key in seen:
                continue
            seen.add(key)
            out.append(ri)
        bounds = [ri for ri in out if self.rows[ri].bound]
        if not bounds:
            return out
        wanted: Dict[int, Fraction] = {}
        for ri in bounds:
            (j, a), = self.rows[ri].live.items()
            h = self.rows[ri].rhs / a
            if j not in wanted or h < wanted[j]:
                wanted[j] = h
        implied = _implied_upper_bounds([self.rows[ri] for ri in out if not self.rows[ri].bound], wanted)
        drop = set()
        for ri in bounds:
            (j, a), = self.rows[ri].live.items()
            if j in implied and implied[j] <= self.rows[ri].rhs / a:
                drop.add(ri)
        return [ri for ri in out if ri not in drop]

    def expand(self, vals: Dict[int, Fraction]) -> Dict[int, Fraction]:
        """Values of all original columns from values of the live ones."""
        out = {j: vals.get(j, ZERO) for j in range(self.n) if not self.gone[j]}
        for i, j, c in reversed(self.merges):
            out[i] = c * out.get(j, ZERO)
        for j in range(self.n):
            out.setdefault(j, ZERO)
        return out

    def lift(self, z: Dict[int, Fraction], cost: Dict[int, Fraction]) -> Dict[int, Fraction]:
        """Extend row multipliers so every original reduced cost is non-negative."""
        if not self.steps:
            return z
        rows = self.rows
        z = dict(z)
        g = dict(cost)
        for ri, zr in z.items():
            for j, a in rows[ri].coeffs.items():
                g[j] = g.get(j, ZERO) + zr * a

        def add(ri, t):
            z[ri] = z.get(ri, ZERO) + t
            for j, a in rows[ri].coeffs.items():
                g[j] = g.get(j, ZERO) + t * a

        for step in reversed(self.steps):
            if step[0] == "fix":
                _, ri, sign, cols = step
                t = ZERO
                for _, coef, mem in cols:
                    G = sum((m * g.get(v, ZERO) for v, m in mem), ZERO)
                    if G < 0:
                        t = max(t, -G / abs(coef))
                if t:
                    add(ri, sign * t)
            else:
                _, ri, a, mem = step
                G = sum((m * g.get(v, ZERO) for v, m in mem), ZERO)
                if G:
                    add(ri, -G / a)
        return {ri: v for ri, v in z.items() if v}


def _solve(lp: LinearProgram) -> SolveResult:
    names = list(lp.variables)
    n = len(names)
    rows = _internal_rows(lp, names)
    cost = {}
    if lp.objective is not None:
        idx = {v: i for i, v in enumerate(names)}
        cost = {idx[v]: a for v, a in lp.objective.items() if a}

    pre = _Presolve(rows, n, cost)
    pre.run()
    if pre.conflict is not None:
        ri, sign = pre.conflict
        z = pre.lift({ri: Fraction(sign)}, {})
        return SolveResult(INFEASIBLE, farkas=_canonical(rows, z))

    # simplex on the remaining rows and columns
    act_rows = pre.kept_rows()
    act_cols = [j for j in range(n) if not pre.gone[j]]
    col_pos = {j: p for p, j in enumerate(act_cols)}
    ns = len(act_cols)
    n_slack = sum(1 for ri in act_rows if rows[ri].sense == LE)
    first_art = ns + n_slack
    t_rows, t_rhs, basis, sigma, init_col, init_is_art = [], [], [], [], [], []
    slack = ns
    art = first_art
    art_rows = []
    for p, ri in enumerate(act_rows):
        r = rows[ri]
        d = {col_pos[j]: mpq(a) for j, a in r.live.items()}
        s = 1 if r.rhs >= 0 else -1
        if s < 0:
            d = {k: -a for k, a in d.items()}
        slack_col = None
        if r.sense == LE:
            slack_col = slack
            d[slack] = mpq(s)
            slack += 1
        if slack_col is not None and s > 0:
            basis.append(slack_col)
            init_col.append(slack_col)
            init_is_art.append(False)
        else:
            d[art] = QONE
            basis.append(art)
            init_col.append(art)
            init_is_art.append(True)
            art_rows.append(p)
            art += 1
        t_rows.append(d)
        t_rhs.append(mpq(r.rhs * s))
        sigma.append(s)
    tab = _Tableau(t_rows, t_rhs, basis)

    # phase 1
    if art_rows:
        obj: Dict[int, Fraction] = {}
        w = QZERO
        for p in art_rows:
            for k, v in t_rows[p].items():
                if k < first_art:
                    obj[k] = obj.get(k, QZERO) - v
            w += t_rhs[p]
        obj = {k: v for k, v in obj.items() if v}
        dw, _ = tab.run(obj, barred=first_art)
        w += dw
        if w > 0:
            y = [_frac((1 if init_is_art[p] else 0) - obj.get(init_col[p], QZERO)) for p in range(len(act_rows))]
            z = {ri: -sigma[p] * y[p] for p, ri in enumerate(act_rows) if y[p]}
            z = pre.lift(z, {})
            return SolveResult(INFEASIBLE, farkas=_canonical(rows, z), pivots=tab.pivots)
        # drive zero-level artificials out of the basis where possible
        for p in range(len(act_rows)):
            if tab.basis[p] >= first_art:
                cands = [k for k in tab.rows[p] if k < first_art]
                if cands:
                    tab.pivot(p, min(cands), {})

    def basic_values() -> Dict[int, Fraction]:
        return {act_cols[b]: _frac(tab.rhs[p]) for p, b in enumerate(tab.basis) if b < ns}

    def assignment():
        vals = pre.expand(basic_values())
        return {v: vals[j] for j, v in enumerate(names)}

    if lp.objective is None:
        return SolveResult(FEASIBLE, assignment=assignment(), pivots=tab.pivots)

    # phase 2
    obj = {col_pos[j]: mpq(c) for j, c in pre.cost.items()}
    val = QZERO
    for p, b in enumerate(tab.basis):
        cb = mpq(pre.cost.get(act_cols[b], ZERO)) if b < ns else QZERO
        if cb:
            for k, v in tab.rows[p].items():
                nv = obj.get(k, QZERO) - cb * v
                if nv:
                    obj[k] = nv
                else:
                    obj.pop(k, None)
            val += cb * tab.rhs[p]
    dv, unbounded = tab.run(obj, barred=first_art)
    val += dv
    if unbounded is not None:
        d: Dict[int, Fraction] = {}
        if unbounded < ns:
            d[act_cols[unbounded]] = ONE
        for p, b in enumerate(tab.basis):
            a = tab.rows[p].get(unbounded)
            if a and b < ns:
                d[act_cols[b]] = -_frac(a)
        dd = pre.expand(d)
        ray = {v: dd[j] for j, v in enumerate(names)}
        return SolveResult(UNBOUNDED, assignment=assignment(), ray=ray, pivots=tab.pivots)
    y = [-_frac(obj.get(init_col[p], QZERO)) for p in range(len(act_rows))]
    z = {ri: -sigma[p] * y[p] for p, ri in enumerate(act_rows) if y[p]}
    z = pre.lift(z, cost)
    return SolveResult(OPTIMAL, assignment=assignment(), value=_frac(val), duals=_canonical(rows, z), pivots=tab.pivots)


def _canonical(rows: List[_Row], z: Dict[int, Fraction]) -> Dict[str, Fraction]:
    out = {}
    for ri in sorted(z):
        v = z[ri]
        r = rows[ri]
        if r.sense == LE:
            if v < 0:
                raise AssertionError("negative multiplier on an inequality row")
            out[r.key] = out.get(r.key, ZERO) + v
        elif v > 0:
            out[r.key] = out.get(r.key, ZERO) + v
        else:
            out[r.key_neg] = out.get(r.key_neg, ZERO) - v
    return out


# ---------------------------------------------------------------------------

def verify_certificate(lp: LinearProgram, res: SolveResult) -> bool:
    """Re-check an answer by substitution into the program."""
    rows = lp.canonical_rows()
    if res.status in (FEASIBLE, OPTIMAL, UNBOUNDED):
        x = res.assignment
        if x is None or set(x) != set(lp.variables):
            return False
        if any(Fraction(v) < 0 for v in x.values()):
            return False
        nz = {v: Fraction(a) for v, a in x.items() if a}
        for _, co, b in rows:
            if sum((a * nz[v] for v, a in co.items() if v in nz), ZERO) > b:
                return False
        if res.status == FEASIBLE:
            return True
        c = lp.objective or {}
        if res.status == UNBOUNDED:
            d = res.ray
            if d is None or any(v < 0 for v in d.values()):
                return False
            for _, co, b in rows:
                if sum(a * d.get(v, ZERO) for v, a in co.items()) > 0:
                    return False
            return sum(a * d.get(v, ZERO) for v, a in c.items()) < 0
        if res.value != sum(a * x[v] for v, a in c.items()):
            return False
        if res.duals is None:
            return True
        return _check_duals(lp, rows, res.duals, res.value)
    if res.status == INFEASIBLE:
        y = res.farkas
        if not y:
            return False
        keyed = {k: (co, b) for k, co, b in rows}
        if any(k not in keyed or v < 0 for k, v in y.items()):
            return False
        col = {v: ZERO for v in lp.variables}
        rhs = ZERO
        for k, m in y.items():
            co, b = keyed[k]
            for v, a in co.items():
                col[v] += m * a
            rhs += m * b
        return rhs < 0 and all(v >= 0 for v in col.values())
    return False


def _check_duals(lp, rows, w, value) -> bool:
    keyed = {k: (co, b) for k, co, b in rows}
    if any(k not in keyed or v < 0 for k, v in w.items()):
        return False
    red = {v: Fraction(a) for v, a in (lp.objective or {}).items()}
    bound = ZERO
    for k, m in w.items():
        co, b = keyed[k]
        for v, a in co.items():
            red[v] = red.get(v, ZERO) + m * a
        bound -= m * b
    return all(v >= 0 for v in red.values()) and bound == value


def result_digest(lp: LinearProgram, res: SolveResult) -> str:
    """Canonical text of a program together with its answer."""
    return lp.dump() + json.dumps(res.to_json(), sort_keys=True)
