from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from wlsa import corpus
from wlsa.lp import (EQ, FEASIBLE, GE, INFEASIBLE, LE, OPTIMAL, UNBOUNDED, LinearProgram, recording, result_digest,
                     solve, solve_feasibility, solve_optimum, verify_certificate)
from wlsa.relax import build_sa1, build_valued_blp, build_valued_sa1


def test_single_equality():
    lp = LinearProgram()
    lp.add_variable("x")
    lp.add_constraint({"x": 1}, EQ, 1)
    res = solve_feasibility(lp)
    assert res.status == FEASIBLE
    assert res.assignment == {"x": 1}
    assert verify_certificate(lp, res)


def test_contradictory_bounds():
    lp = LinearProgram()
    lp.add_variable("x")
    lp.add_constraint({"x": 1}, GE, 1)
    lp.add_constraint({"x": 1}, LE, 0)
    res = solve_feasibility(lp)
    assert res.status == INFEASIBLE
    assert verify_certificate(lp, res)
    # the multipliers combine the rows into 0 <= -1
    assert set(res.farkas) == {"c0-", "c1+"}


def test_minimum_at_bound():
    lp = LinearProgram()
    lp.add_variable("x")
    lp.add_constraint({"x": 1}, GE, 2)
    lp.minimize({"x": 1})
    res = solve_optimum(lp)
    assert res.status == OPTIMAL and res.value == 2
    assert verify_certificate(lp, res)
    assert res.duals


def test_unbounded_ray():
    lp = LinearProgram()
    lp.add_variable("x")
    lp.add_variable("y")
    lp.add_constraint({"x": 1, "y": -1}, LE, 1)
    lp.minimize({"x": -1})
    res = solve(lp)
    assert res.status == UNBOUNDED
    assert verify_certificate(lp, res)


def test_lower_and_upper_bounds():
    lp = LinearProgram()
    lp.add_variable("x", Fraction(1, 3), 2)
    lp.minimize({"x": 1})
    res = solve(lp)
    assert res.value == Fraction(1, 3)
    assert verify_certificate(lp, res)
    lp.minimize({"x": -1})
    assert solve(lp).value == -2


def test_loop_to_edge_level_one_infeasible():
    lp = build_sa1(corpus.loop(), corpus.complete(2))
    res = solve(lp)
    assert res.status == INFEASIBLE
    assert verify_certificate(lp, res)


def test_example_values():
    X, A, _ = corpus.example_pvcsp()
    blp, sa1 = build_valued_blp(X, A), build_valued_sa1(X, A)
    rb, rs = solve(blp), solve(sa1)
    assert (rb.status, rb.value) == (OPTIMAL, 2)
    assert (rs.status, rs.value) == (OPTIMAL, 3)
    assert verify_certificate(blp, rb) and verify_certificate(sa1, rs)


def test_tampered_assignment_rejected():
    lp = build_sa1(corpus.cycle(6), corpus.cycle(3))
    res = solve(lp)
    assert verify_certificate(lp, res)
    var = next(v for v, a in res.assignment.items() if a)
    res.assignment[var] += Fraction(1, 7)
    assert not verify_certificate(lp, res)


def test_tampered_farkas_rejected():
    lp = build_sa1(corpus.loop(), corpus.complete(2))
    res = solve(lp)
    key = next(iter(res.farkas))
    res.farkas[key] = 0
    assert not verify_certificate(lp, res)


def test_satisfied_by_reads_missing_as_zero():
    lp = LinearProgram()
    lp.add_variable("x")
    lp.add_variable("y", 0, 1)
    lp.add_constraint({"x": 1, "y": 1}, EQ, 1)
    assert lp.satisfied_by({"x": 1})
    assert not lp.satisfied_by({"y": 2, "x": -1})
    assert not lp.satisfied_by({"z": 1})


def test_rejects_bad_input():
    lp = LinearProgram()
    lp.add_variable("x")
    with pytest.raises(ValueError):
        lp.add_variable("x")
    with pytest.raises(KeyError):
        lp.add_constraint({"y": 1}, LE, 0)
    with pytest.raises(ValueError):
        lp.add_constraint({"x": 1}, "<", 0)


def test_recording_logs_every_solve():
    with recording() as log:
        solve(build_sa1(corpus.cycle(3), corpus.complete(2)))
        solve(build_sa1(corpus.loop(), corpus.complete(2)))
    assert len(log) == 2
    assert all(verify_certificate(lp, res) for lp, res in log)


# random programs against a floating-point oracle


@st.composite
def programs(draw):
    n = draw(st.integers(1, 4))
    m = draw(st.integers(1, 4))
    coef = st.integers(-3, 3)
    lp = LinearProgram()
    names = [lp.add_variable(f"x{i}", 0, draw(st.sampled_from([None, 1, 2, 5]))) for i in range(n)]
    for _ in range(m):
        row = {v: draw(coef) for v in names}
        lp.add_constraint(row, draw(st.sampled_from([LE, GE, EQ])), draw(st.integers(-4, 6)))
    lp.minimize({v: draw(coef) for v in names})
    return lp


def scipy_oracle(lp):
    names = list(lp.variables)
    idx = {v: i for i, v in enumerate(names)}
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for c in lp.constraints:
        row = np.zeros(len(names))
        for v, a in c.coeffs.items():
            row[idx[v]] = float(a)
        if c.sense == EQ:
            A_eq.append(row), b_eq.append(float(c.rhs))
        elif c.sense == LE:
            A_ub.append(row), b_ub.append(float(c.rhs))
        else:
            A_ub.append(-row), b_ub.append(-float(c.rhs))
    cost = np.zeros(len(names))
    for v, a in (lp.objective or {}).items():
        cost[idx[v]] = float(a)
    bounds = [(float(lo), None if hi is None else float(hi)) for lo, hi in lp.variables.values()]
    r = linprog(cost, A_ub=A_ub or None, b_ub=b_ub or None, A_eq=A_eq or None, b_eq=b_eq or None,
                bounds=bounds, method="highs")
    return {0: OPTIMAL, 2: INFEASIBLE, 3: UNBOUNDED}[r.status], r.fun


@given(programs())
def test_agrees_with_highs(lp):
    res = solve(lp)
    status, value = scipy_oracle(lp)
    assert res.status == status
    if status == OPTIMAL:
        assert abs(float(res.value) - value) < 1e-7
    assert verify_certificate(lp, res)


@given(programs(), st.integers(1, 9))
def test_row_scaling_invariance(lp, factor):
    res = solve(lp)
    scaled = LinearProgram()
    for v, (lo, hi) in lp.variables.items():
        scaled.add_variable(v, lo, hi)
    for c in lp.constraints:
        scaled.add_constraint({v: a * factor for v, a in c.coeffs.items()}, c.sense, c.rhs * factor)
    scaled.minimize(lp.objective)
    other = solve(scaled)
    assert other.status == res.status
    assert other.value == res.value


@given(programs())
def test_deterministic(lp):
    assert result_digest(lp, solve(lp)) == result_digest(lp, solve(lp))


def test_dump_lists_rows_and_bounds():
    lp = LinearProgram("tiny")
    lp.add_variable("x", 0, 1)
    lp.add_constraint({"x": 2}, GE, 1)
    lp.minimize({"x": 1})
    text = lp.dump()
    assert "Minimize" in text and "Bounds" in text and text.endswith("End\n")
