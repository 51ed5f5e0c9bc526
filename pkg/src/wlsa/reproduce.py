"""Acceptance suites: each one runs a seeded corpus through the library and
cross-checks the answers against brute force or against each other.

Every suite returns a :class:`SuiteResult`.  All linear programs solved inside
a suite are logged, so the solver audit can re-verify every certificate and
fingerprint the whole run.
"""

from __future__ import annotations

import hashlib
import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from . import corpus
from .core import (INF, Signature, Structure, ValuedRelation, adjacency_matrix, check_isomorphism, count_homomorphisms,
                   find_homomorphism, opt_value, relabel)
from .decomp import compose_chain, decompose_crisp, decompose_valued, verify_decomposition
from .lp import OPTIMAL, recording, result_digest, solve, verify_certificate
from .pebble import find_distinguisher, strategy_fixpoint, winning_strategy
from .relax import (build_blp, build_lifted_polytope, build_sa1, build_sak, build_valued_blp, build_valued_sa1,
                    dfh_separator, dual_frac_hom_lp, fh_separator, find_symmetric_polymorphisms, frac_hom_lp,
                    is_polymorphism)
from .stark import equiv_k, star_k
from .wl import (check_fractional_iso, common_equitable_partition, equiv1, fractional_iso_lp, graph_fractional_iso,
                 stable_coloring)
from .core.structure import disjoint_union


@dataclass
class SuiteResult:
    criterion: int
    name: str
    cases: int = 0
    failures: List[str] = field(default_factory=list)
    seconds: float = 0.0
    limit: float = 0.0
    notes: Dict[str, object] = field(default_factory=dict)
    series: Dict[str, List[int]] = field(default_factory=dict)
    log: list = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return not self.failures and self.cases > 0 and self.seconds <= self.limit

    def fail(self, msg: str):
        self.failures.append(msg)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.criterion}|{self.cases}|{self.failures}|{sorted(self.notes.items())}".encode())
        for lp, res in self.log:
            h.update(result_digest(lp, res).encode())
        return h.hexdigest()


def _run(criterion: int, name: str, limit: float, body: Callable[[SuiteResult], None]) -> SuiteResult:
    out = SuiteResult(criterion, name, limit=limit)
    start = time.perf_counter()
    with recording() as log:
        body(out)
    out.seconds = time.perf_counter() - start
    out.log = log
    return out


# ---------------------------------------------------------------------------
# 1: the valued example where the basic LP is weaker than level one


def suite_example(seed: int = 0) -> SuiteResult:
    def body(out: SuiteResult):
        X, A, B = corpus.example_pvcsp()
        blp = solve(build_valued_blp(X, A))
        sa1 = solve(build_valued_sa1(X, A))
        opt_b, _ = opt_value(X, B)
        fh = frac_hom_lp(A, B)
        identity = {a: a for a in A.universe}
        point = {v: Fraction(0) for v in fh.lp.variables}
        if identity in fh.maps:
            point[f"m[{fh.maps.index(identity)}]"] = Fraction(1)
        checks = {
            "blp value 2": blp.status == OPTIMAL and blp.value == 2,
            "level-1 value 3": sa1.status == OPTIMAL and sa1.value == 3,
            "brute-force Opt(X,B) 3": opt_b == 3,
            "fractional homomorphism feasible": fh.feasible,
            "identity point mass satisfies every row": identity in fh.maps and fh.lp.satisfied_by(point),
        }
        out.cases = len(checks)
        for what, ok in checks.items():
            if not ok:
                out.fail(what)
        out.notes.update(blp=str(blp.value), sa1=str(sa1.value), opt_b=str(opt_b))

    return _run(1, "valued example exact values", 1.0, body)


# ---------------------------------------------------------------------------
# 2: refinement, equitable partitions and fractional isomorphism agree


def _digraph_from_mask(n: int, mask: int) -> Structure:
    pairs = list(itertools.product(range(n), repeat=2))
    U = [str(i) for i in range(n)]
    E = [(U[a], U[b]) for bit, (a, b) in enumerate(pairs) if mask >> bit & 1]
    return Structure.crisp(corpus.GRAPH, U, {"E": E}, allow_empty=True)


def _canonical_mask(n: int, mask: int, perm_maps) -> int:
    best = None
    for pm in perm_maps:
        m2 = 0
        for bit, nb in enumerate(pm):
            if mask >> bit & 1:
                m2 |= 1 << nb
        if best is None or m2 < best:
            best = m2
    return best


def _perm_bit_maps(n: int):
    pairs = list(itertools.product(range(n), repeat=2))
    pos = {p: i for i, p in enumerate(pairs)}
    return [[pos[(p[a], p[b])] for a, b in pairs] for p in itertools.permutations(range(n))]


def digraph_classes(n: int, rng: Optional[random.Random] = None, samples: int = 0) -> List[int]:
    """Canonical masks of loop-allowed digraphs on ``n`` vertices.

    All classes when ``rng`` is None, otherwise the classes hit by ``samples``
    uniform draws.
    """
    maps = _perm_bit_maps(n)
    masks = range(1 << (n * n)) if rng is None else (rng.getrandbits(n * n) for _ in range(samples))
    return sorted({_canonical_mask(n, m, maps) for m in masks})


def _degree_key(G: Structure):
    E = G.relations["E"]
    return tuple(sorted((sum(1 for a, _ in E if a == v), sum(1 for _, b in E if b == v), (v, v) in E)
                        for v in G.universe))


def _tally(out: SuiteResult, tag: str, answers: List[bool]):
    out.cases += 1
    out.notes["equivalent pairs"] = out.notes.get("equivalent pairs", 0) + int(answers[0])
    if len(set(answers)) != 1:
        out.fail(f"{tag}: answers {answers}")


def _three_way(out: SuiteResult, tag: str, A: Structure, B: Structure):
    """Refinement, common equitable partition and the structure-level LP."""
    part = common_equitable_partition(A, B)
    fi = fractional_iso_lp(A, B)
    if fi.feasible and not check_fractional_iso(A, B, fi.P, fi.Q):
        out.fail(f"{tag}: fractional isomorphism witness does not check")
    _tally(out, tag, [equiv1(A, B), part is not None, fi.feasible])


def _graph_agreement(out: SuiteResult, tag: str, G: Structure, H: Structure):
    """Refinement, common equitable partition and the adjacency-matrix LP."""
    part = common_equitable_partition(G, H)
    fi = graph_fractional_iso(G, H)
    if fi.feasible:
        P = fi.P
        NG, NH = adjacency_matrix(G).astype(object), adjacency_matrix(H).astype(object)
        stochastic = all(sum(P[i, :]) == 1 for i in range(len(H))) and all(sum(P[:, j]) == 1 for j in range(len(G)))
        if not stochastic or (P.dot(NG) != NH.dot(P)).any():
            out.fail(f"{tag}: doubly stochastic witness does not check")
    _tally(out, tag, [equiv1(G, H), part is not None, fi.feasible])


def _random_relabel(S: Structure, rng: random.Random, prefix: str = "r") -> Structure:
    perm = list(S.universe)
    rng.shuffle(perm)
    return relabel(S, {a: f"{prefix}{perm.index(a)}" for a in S.universe})


def suite_refinement(seed: int = 0) -> SuiteResult:
    def body(out: SuiteResult):
        rng = random.Random(seed)
        for n in (1, 2, 3):
            reps = [_digraph_from_mask(n, m) for m in digraph_classes(n)]
            for i, j in itertools.combinations_with_replacement(range(len(reps)), 2):
                _three_way(out, f"n={n} classes {i},{j}", reps[i], reps[j])
        reps4 = [_digraph_from_mask(4, m) for m in digraph_classes(4, rng, 3000)]
        buckets: Dict[tuple, List[Structure]] = {}
        for G in reps4:
            buckets.setdefault(_degree_key(G), []).append(G)
        same = [(G, H) for grp in buckets.values() for G, H in itertools.combinations(grp, 2)]
        rng.shuffle(same)
        for G, H in same[:300]:
            _three_way(out, "n=4 same degrees", G, H)
        for _ in range(100):
            G, H = rng.sample(reps4, 2)
            _three_way(out, "n=4 random", G, H)
        for t in range(200):
            n = rng.randint(1, 5)
            A = corpus.random_sparse_structure(corpus.BINARY_TERNARY, n, rng, max_tuples=4)
            if t % 3 == 0:
                B = _random_relabel(A, rng)
            else:
                B = corpus.random_sparse_structure(corpus.BINARY_TERNARY, n, rng, max_tuples=4)
            _three_way(out, f"binary/ternary #{t}", A, B)
        graph_pairs = [(name, G, H) for name, G, H in corpus.curated_graph_pairs()]
        for t in range(12):
            G, H = corpus.random_regular_pair(rng)
            graph_pairs.append((f"2-regular #{t}", G, H))
        for name, G, H in graph_pairs:
            _graph_agreement(out, name, G, H)

    return _run(2, "refinement / equitable partition / fractional isomorphism agreement", 300.0, body)


# ---------------------------------------------------------------------------
# 3: crisp level-1 round trip


def suite_crisp_decomposition(seed: int = 0) -> SuiteResult:
    def body(out: SuiteResult):
        rng = random.Random(seed)
        feasible = 0
        for t in range(300):
            sig = corpus.GRAPH if t % 4 else corpus.BINARY_TERNARY
            X = corpus.random_sparse_structure(sig, rng.randint(1, 5), rng, max_tuples=5, prefix="x")
            A = corpus.random_structure(sig, rng.randint(1, 4), rng, density=rng.choice((0.2, 0.4, 0.6)))
            res = solve(build_sa1(X, A))
            out.cases += 1
            if res.feasible:
                feasible += 1
                w = decompose_crisp(X, A, res.assignment)
                report = verify_decomposition(X, A, w)
                bad = [k for k, ok in report.items() if not ok]
                if bad:
                    out.fail(f"pair {t}: clauses {bad}")
                    continue
                back = compose_chain(X, A, w.copy_maps[0], w.Y1, w.Y2, w.h2)
                lp = build_sa1(X, A)
                if back is None or not lp.satisfied_by(back):
                    out.fail(f"pair {t}: chain does not give a level-1 solution")
                out.series.setdefault("m", []).append(w.m)
            elif find_homomorphism(X, A) is not None:
                out.fail(f"pair {t}: level 1 infeasible but a homomorphism exists")
        out.notes["feasible"] = feasible

    return _run(3, "crisp level-1 decomposition round trip", 600.0, body)


# ---------------------------------------------------------------------------
# 4: valued round trip


def suite_valued_decomposition(seed: int = 0) -> SuiteResult:
    def body(out: SuiteResult):
        rng = random.Random(seed)
        for t in range(100):
            X = corpus.random_valued_instance(corpus.GRAPH, rng.randint(1, 4), rng)
            A = corpus.random_valued_template(corpus.GRAPH, rng.randint(1, 3), rng,
                                              costs=(0, 1, 2, Fraction(1, 2)))
            res = solve(build_valued_sa1(X, A))
            out.cases += 1
            if res.status != OPTIMAL:
                out.fail(f"pair {t}: status {res.status}")
                continue
            w = decompose_valued(X, A, res.assignment)
            report = verify_decomposition(X, A, w)
            bad = [k for k, ok in report.items() if not ok]
            if bad:
                out.fail(f"pair {t}: clauses {bad}")

    return _run(4, "valued level-1 decomposition round trip", 600.0, body)


# ---------------------------------------------------------------------------
# 5: level two through the star transform


def suite_star(seed: int = 0) -> SuiteResult:
    def body(out: SuiteResult):
        rng = random.Random(seed)
        agree_true = 0
        for t in range(100):
            X = corpus.random_sparse_structure(corpus.GRAPH, rng.randint(1, 3), rng, max_tuples=4, prefix="x")
            A = corpus.random_structure(corpus.GRAPH, rng.randint(1, 3), rng, density=rng.choice((0.3, 0.5)))
            direct = solve(build_sak(X, A, 2)).feasible
            packed = solve(build_sa1(star_k(X, 2).structure, star_k(A, 2).structure)).feasible
            out.cases += 1
            agree_true += direct
            if direct != packed:
                out.fail(f"pair {t}: level 2 {direct}, star level 1 {packed}")
        out.notes["feasible"] = agree_true

    return _run(5, "level two equals level one on star transforms", 600.0, body)


# ---------------------------------------------------------------------------
# 6: refinement at level k against the bijective pebble game


def _cycle_unions(max_n: int) -> Dict[int, List[Tuple[str, Structure]]]:
    def parts(n, lo):
        if n == 0:
            yield []
        for s in range(lo, n + 1):
            for rest in parts(n - s, s):
                yield [s] + rest

    out: Dict[int, List[Tuple[str, Structure]]] = {}
    for n in range(3, max_n + 1):
        for sizes in parts(n, 3):
            name = "+".join(f"C{s}" for s in sizes)
            out.setdefault(n, []).append((name, corpus.graph_union(*(corpus.cycle(s) for s in sizes))))
    return out


def suite_pebble(seed: int = 0) -> SuiteResult:
    def body(out: SuiteResult):
        rng = random.Random(seed)
        pairs: List[Tuple[str, Structure, Structure]] = []
        for n, items in _cycle_unions(8).items():
            for (na, A), (nb, B) in itertools.combinations_with_replacement(items, 2):
                pairs.append((f"{na} vs {nb}", A, B))
        for t in range(30):
            n = rng.randint(1, 4)
            A = corpus.random_structure(corpus.GRAPH, n, rng, density=0.4)
            B = _random_relabel(A, rng) if t % 3 == 0 else corpus.random_structure(corpus.GRAPH, n, rng, density=0.4)
            pairs.append((f"random #{t}", A, B))
        for name, A, B in pairs:
            for k in (2, 3):
                e = equiv_k(A, B, k)
                W = winning_strategy(A, B, k)
                out.cases += 1
                if e != (W is not None):
                    out.fail(f"{name} k={k}: refinement {e}, game {W is not None}")
                if W is not None and not W.verify(A, B):
                    out.fail(f"{name} k={k}: strategy fails re-verification")
        C6 = corpus.cycle(6)
        C33 = corpus.graph_union(corpus.cycle(3), corpus.cycle(3))
        split = (equiv_k(C6, C33, 2), equiv_k(C6, C33, 3))
        out.cases += 1
        if split != (True, False):
            out.fail(f"C6 vs C3+C3 split {split}")
        d = find_distinguisher(C6, C33, 3)
        out.cases += 1
        if d is None or d.counts != (0, 12) or check_isomorphism(d.structure, corpus.cycle(3)) is None:
            out.fail("distinguisher is not the triangle with counts 0 and 12")
        elif not d.decomposition.verify(d.structure) or d.decomposition.width >= 3:
            out.fail("distinguisher decomposition does not check")
        else:
            out.notes["distinguisher"] = f"triangle after {d.examined} candidates, counts {d.counts}"
        for k in (1, 2, 3):
            out.series[f"pebble k={k}"] = strategy_fixpoint(C6, C33, k, method="rounds").history
        U = disjoint_union(C6, C33)
        out.series["refinement k=1"] = stable_coloring(U).history
        for k in (2, 3):
            U = disjoint_union(star_k(C6, k).structure, star_k(C33, k).structure)
            out.series[f"refinement k={k}"] = stable_coloring(U).history

    return _run(6, "level-k refinement against the bijective pebble game", 600.0, body)


# ---------------------------------------------------------------------------
# 7: interleaving with the lifted polytope


def suite_interleaving(seed: int = 0) -> SuiteResult:
    def body(out: SuiteResult):
        rng = random.Random(seed)
        r = 2
        for t in range(50):
            X = corpus.random_sparse_structure(corpus.GRAPH, rng.randint(1, 3), rng, max_tuples=4, prefix="x")
            A = corpus.random_structure(corpus.GRAPH, rng.randint(1, 3), rng, density=rng.choice((0.3, 0.5)))
            sa = {k: solve(build_sak(X, A, k)).feasible for k in (1, 2, 3)}
            for k in (1, 2):
                lifted = solve(build_lifted_polytope(X, A, k)).feasible
                out.cases += 1
                if lifted and r <= k and not sa[k]:
                    out.fail(f"pair {t} k={k}: lifted polytope nonempty but level {k} infeasible")
                if sa[k + r - 1] and not lifted:
                    out.fail(f"pair {t} k={k}: level {k + r - 1} feasible but lifted polytope empty")

    return _run(7, "Sherali-Adams levels interleave with the lifted polytope", 600.0, body)


# ---------------------------------------------------------------------------
# 8: fractional homomorphisms order optimal values


def suite_fractional(seed: int = 0) -> SuiteResult:
    def body(out: SuiteResult):
        rng = random.Random(seed)
        costs = (0, 1, 2, Fraction(1, 2), INF)
        tally = {"fh feasible": 0, "fh infeasible": 0, "dfh feasible": 0, "dfh infeasible": 0}
        for t in range(25):
            A = corpus.random_valued_template(corpus.GRAPH, rng.randint(1, 2), rng, costs)
            B = corpus.random_valued_template(corpus.GRAPH, rng.randint(1, 2), rng, costs)
            prog = frac_hom_lp(A, B)
            out.cases += 1
            if prog.feasible:
                tally["fh feasible"] += 1
                for s in range(20):
                    X = corpus.random_valued_instance(corpus.GRAPH, rng.randint(1, 3), rng)
                    if opt_value(X, B)[0] > opt_value(X, A)[0]:
                        out.fail(f"template pair {t}: Opt(X,B) > Opt(X,A) on sample {s}")
            else:
                tally["fh infeasible"] += 1
                X = fh_separator(A, B, prog)
                if not opt_value(X, B)[0] > opt_value(X, A)[0]:
                    out.fail(f"template pair {t}: separator does not separate")
        for t in range(25):
            X = corpus.random_valued_instance(corpus.GRAPH, rng.randint(1, 3), rng)
            Y = corpus.random_valued_instance(corpus.GRAPH, rng.randint(1, 3), rng)
            prog = dual_frac_hom_lp(X, Y)
            out.cases += 1
            if prog.feasible:
                tally["dfh feasible"] += 1
                for s in range(20):
                    A = corpus.random_valued_template(corpus.GRAPH, rng.randint(1, 3), rng, costs)
                    if opt_value(X, A)[0] > opt_value(Y, A)[0]:
                        out.fail(f"instance pair {t}: Opt(X,A) > Opt(Y,A) on sample {s}")
            else:
                tally["dfh infeasible"] += 1
                A = dfh_separator(X, Y, prog)
                if not opt_value(Y, A)[0] < opt_value(X, A)[0]:
                    out.fail(f"instance pair {t}: separator does not separate")
        out.notes.update(tally)

    return _run(8, "fractional and dual fractional homomorphisms order optima", 600.0, body)


# ---------------------------------------------------------------------------
# 9: symmetric polymorphisms and level one


def _horn_instance(rng: random.Random) -> Structure:
    n = rng.randint(2, 6)
    U = [f"v{i}" for i in range(n)]
    rels = {}
    for name, r in corpus.HORN:
        cand = list(itertools.product(U, repeat=r))
        rels[name] = rng.sample(cand, rng.randint(0, min(4 if r == 3 else 2, len(cand))))
    return Structure.crisp(corpus.HORN, U, rels, allow_empty=True)


def suite_polymorphisms(seed: int = 0) -> SuiteResult:
    def body(out: SuiteResult):
        rng = random.Random(seed)
        horn = corpus.horn3sat()
        for n in (2, 3):
            found = find_symmetric_polymorphisms(horn, n)
            minimum = {args: min(args) for args in itertools.combinations_with_replacement(horn.universe, n)}
            out.cases += 1
            if minimum not in found or not is_polymorphism(horn, minimum, n, True):
                out.fail(f"min is not found among symmetric {n}-ary polymorphisms")
            out.notes[f"symmetric arity {n}"] = len(found)
        infeasible = 0
        for t in range(200):
            X = _horn_instance(rng)
            res = solve(build_sa1(X, horn))
            out.cases += 1
            if res.feasible and find_homomorphism(X, horn) is None:
                out.fail(f"instance {t}: level 1 feasible without a homomorphism")
            infeasible += not res.feasible
        out.notes["infeasible instances"] = infeasible
        K2, C3 = corpus.complete(2), corpus.cycle(3)
        out.cases += 1
        if find_symmetric_polymorphisms(K2, 2):
            out.fail("K2 has a symmetric binary polymorphism")
        if not solve(build_blp(C3, K2)).feasible or find_homomorphism(C3, K2) is not None:
            out.fail("triangle is not a basic-LP false positive for K2")

    return _run(9, "symmetric polymorphisms and level-one soundness", 300.0, body)


SUITES: Dict[int, Callable[[int], SuiteResult]] = {
    1: suite_example,
    2: suite_refinement,
    3: suite_crisp_decomposition,
    4: suite_valued_decomposition,
    5: suite_star,
    6: suite_pebble,
    7: suite_interleaving,
    8: suite_fractional,
    9: suite_polymorphisms,
}


# ---------------------------------------------------------------------------
# 10: solver audit


def audit(results: List[SuiteResult], rerun: Optional[List[SuiteResult]] = None) -> SuiteResult:
    """Re-verify every logged answer; compare fingerprints with a second run when given."""
    out = SuiteResult(10, "solver certificates and run determinism", limit=float("inf"))
    start = time.perf_counter()
    for r in results:
        for lp, res in r.log:
            out.cases += 1
            if not verify_certificate(lp, res):
                out.fail(f"suite {r.criterion}: {lp.name} answer {res.status} does not verify")
    out.notes["programs"] = out.cases
    if rerun is not None:
        first = {r.criterion: r.digest() for r in results}
        second = {r.criterion: r.digest() for r in rerun}
        if first != second:
            out.fail(f"runs differ on suites {sorted(c for c in first if first[c] != second.get(c))}")
    out.seconds = time.perf_counter() - start
    return out


def run_suites(criteria=None, seed: int = 0) -> List[SuiteResult]:
    chosen = sorted(SUITES) if criteria is None else [c for c in sorted(set(criteria)) if c in SUITES]
    return [SUITES[c](seed) for c in chosen]


def csv_rows(results: List[SuiteResult], timings: bool = False) -> List[List[str]]:
    rows = [["criterion", "name", "passed", "cases", "failures", "seconds", "limit_seconds", "notes"]]
    for r in results:
        notes = ";".join(f"{k}={v}" for k, v in sorted(r.notes.items()))
        rows.append([str(r.criterion), r.name, "pass" if r.passed else "fail", str(r.cases),
                     str(len(r.failures)), f"{r.seconds:.3f}" if timings else "",
                     "" if r.limit == float("inf") else f"{r.limit:g}", notes])
    return rows
