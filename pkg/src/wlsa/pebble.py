"""Bijective k-pebble game, bounded-treewidth structure streams and
hom-count distinguishers.

Strategies are computed as a greatest fixpoint over pairs of equal-length
tuples ``(a, b)`` with ``0 <= len <= k``.  A pair survives while

* ``a_i -> b_i`` is a partial isomorphism,
* every pair obtained by deleting one position survives, and
* for ``len < k`` some bijection ``f`` keeps every insertion
  ``(a with x at i, b with f(x) at i)`` alive, for all positions ``i``.

The last test is a perfect matching question on ``A x B``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

from .core import CRISP, Signature, Structure, count_homomorphisms, require_similar
from .errors import DEFAULT_BUDGET, BudgetExceeded, ValidationError

Pair = Tuple[tuple, tuple]


def _insert(t: tuple, i: int, x) -> tuple:
    return t[:i] + (x,) + t[i:]


def _delete(t: tuple, i: int) -> tuple:
    return t[:i] + t[i + 1:]


def perfect_matching(n: int, adj: Sequence[Sequence[int]]) -> Optional[List[int]]:
    """Kuhn's augmenting paths; ``adj[x]`` lists right vertices of left vertex x."""
    match_right = [-1] * n

    def augment(x, seen):
        for y in adj[x]:
            if seen[y]:
                continue
            seen[y] = True
            if match_right[y] < 0 or augment(match_right[y], seen):
                match_right[y] = x
                return True
        return False

    for x in range(n):
        if not augment(x, [False] * n):
            return None
    f = [0] * n
    for y, x in enumerate(match_right):
        f[x] = y
    return f


class _Game:
    """Index-level data shared by both fixpoint schedules."""

    def __init__(self, A: Structure, B: Structure, k: int):
        self.n = len(A)
        self.k = k
        self.sig = A.signature
        self.relA = {R: {tuple(A.index[a] for a in t) for t in A.tuples(R)} for R in A.signature.names}
        self.relB = {R: {tuple(B.index[b] for b in t) for t in B.tuples(R)} for R in B.signature.names}

    def extends(self, a: tuple, b: tuple, x: int, y: int) -> bool:
        """Whether appending ``x -> y`` to the partial isomorphism ``a -> b`` keeps it one."""
        for ai, bi in zip(a, b):
            if (ai == x) != (bi == y):
                return False
        if x in a:
            return True
        dom = list(dict.fromkeys(a)) + [x]
        img = {ai: bi for ai, bi in zip(a, b)}
        img[x] = y
        last = len(dom) - 1
        for R, r in self.sig:
            RA, RB = self.relA[R], self.relB[R]
            for t in itertools.product(range(len(dom)), repeat=r):
                if last not in t:
                    continue
                ta = tuple(dom[i] for i in t)
                tb = tuple(img[e] for e in ta)
                if (ta in RA) != (tb in RB):
                    return False
        return True

    def initial(self) -> Set[Pair]:
        W: Set[Pair] = {((), ())}
        level = [((), ())]
        for _ in range(self.k):
            nxt = []
            for a, b in level:
                for x in range(self.n):
                    for y in range(self.n):
                        if self.extends(a, b, x, y):
                            nxt.append((a + (x,), b + (y,)))
            W.update(nxt)
            level = nxt
        return W

    def ok(self, pair: Pair, W: Set[Pair]) -> bool:
        a, b = pair
        j = len(a)
        for i in range(j):
            if (_delete(a, i), _delete(b, i)) not in W:
                return False
        if j < self.k:
            adj = []
            for x in range(self.n):
                row = []
                for y in range(self.n):
                    if all((_insert(a, i, x), _insert(b, i, y)) in W for i in range(j + 1)):
                        row.append(y)
                adj.append(row)
            if perfect_matching(self.n, adj) is None:
                return False
        return True


@dataclass
class Strategy:
    """Pairs of element tuples; ``history`` holds the pair count after each round."""
    pairs: frozenset
    k: int
    history: List[int] = field(default_factory=list)

    @property
    def wins(self) -> bool:
        return ((), ()) in self.pairs

    def __len__(self):
        return len(self.pairs)

    def verify(self, A: Structure, B: Structure) -> bool:
        """Re-check the three strategy conditions from scratch."""
        if not self.pairs or len(A) != len(B):
            return False
        W = self.pairs
        for a, b in W:
            if len(a) != len(b) or len(a) > self.k:
                return False
            if not _is_partial_iso(A, B, a, b):
                return False
            for i in range(len(a)):
                if (_delete(a, i), _delete(b, i)) not in W:
                    return False
            if len(a) < self.k and _find_bijection(A, B, a, b, W) is None:
                return False
        return True


def _is_partial_iso(A: Structure, B: Structure, a: tuple, b: tuple) -> bool:
    f = {}
    for x, y in zip(a, b):
        if f.setdefault(x, y) != y:
            return False
    if len(set(f.values())) != len(f):
        return False
    dom = list(f)
    for R, r in A.signature:
        for t in itertools.product(dom, repeat=r):
            if A.holds(R, t) != B.holds(R, tuple(f[x] for x in t)):
                return False
    return True


def _find_bijection(A: Structure, B: Structure, a: tuple, b: tuple, W) -> Optional[dict]:
    j = len(a)

    def good(x, y):
        return all((_insert(a, i, x), _insert(b, i, y)) in W for i in range(j + 1))

    if len(A) <= 6:
        for perm in itertools.permutations(B.universe):
            if all(good(x, y) for x, y in zip(A.universe, perm)):
                return dict(zip(A.universe, perm))
        return None
    adj = [[q for q, y in enumerate(B.universe) if good(x, y)] for x in A.universe]
    f = perfect_matching(len(A), adj)
    return None if f is None else {x: B.universe[f[p]] for p, x in enumerate(A.universe)}


def _check_inputs(A: Structure, B: Structure, k: int, budget: Optional[int]):
    require_similar(A, B)
    if A.kind != CRISP or B.kind != CRISP:
        raise ValidationError("the pebble game needs crisp structures")
    if k < 1:
        raise ValidationError("k must be positive")
    budget = DEFAULT_BUDGET if budget is None else budget
    needed = sum((len(A) * len(B)) ** j for j in range(k + 1))
    if needed > budget:
        raise BudgetExceeded("pebble game", needed, budget)


def _to_elements(A: Structure, B: Structure, W: Set[Pair]) -> frozenset:
    UA, UB = A.universe, B.universe
    return frozenset((tuple(UA[i] for i in a), tuple(UB[i] for i in b)) for a, b in W)


def strategy_fixpoint(A: Structure, B: Structure, k: int, budget: Optional[int] = None,
                      method: str = "worklist") -> Strategy:
    """Greatest fixpoint of the strategy conditions (possibly empty).

    ``method="rounds"`` deletes every failing pair simultaneously per round
    and records the size after each round; ``"worklist"`` re-checks only the
    neighbours of deleted pairs.
    """
    _check_inputs(A, B, k, budget)
    if len(A) != len(B):
        return Strategy(frozenset(), k, [0])
    game = _Game(A, B, k)
    W = game.initial()
    history = [len(W)]
    if method == "rounds":
        while True:
            bad = {p for p in W if not game.ok(p, W)}
            if not bad:
                break
            W -= bad
            history.append(len(W))
    elif method == "worklist":
        n = game.n
        queue = sorted(W, key=lambda p: (len(p[0]), p))
        queued = set(W)
        while queue:
            p = queue.pop()
            queued.discard(p)
            if p not in W or game.ok(p, W):
                continue
            W.discard(p)
            a, b = p
            j = len(a)
            for i in range(j):
                q = (_delete(a, i), _delete(b, i))
                if q in W and q not in queued:
                    queued.add(q)
                    queue.append(q)
            if j < k:
                for i in range(j + 1):
                    for x in range(n):
                        for y in range(n):
                            q = (_insert(a, i, x), _insert(b, i, y))
                            if q in W and q not in queued:
                                queued.add(q)
                                queue.append(q)
        history.append(len(W))
    else:
        raise ValueError(f"unknown method {method!r}")
    return Strategy(_to_elements(A, B, W), k, history)


def winning_strategy(A: Structure, B: Structure, k: int, budget: Optional[int] = None,
                     method: str = "worklist") -> Optional[Strategy]:
    """Duplicator's greatest winning strategy, or None when Spoiler wins."""
    require_similar(A, B)
    if len(A) != len(B):
        return None
    S = strategy_fixpoint(A, B, k, budget, method)
    return S if S.wins else None


# ---------------------------------------------------------------------------
# tree decompositions and structures of bounded treewidth


@dataclass(frozen=True)
class TreeDecomposition:
    bags: Tuple[frozenset, ...]
    edges: Tuple[Tuple[int, int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def _neighbours(self) -> List[List[int]]:
        nb: List[List[int]] = [[] for _ in self.bags]
        for u, v in self.edges:
            nb[u].append(v)
            nb[v].append(u)
        return nb

    def _connected(self, nodes: Set[int], nb) -> bool:
        if not nodes:
            return True
        start = min(nodes)
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in nb[u]:
                if v in nodes and v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen == nodes

    def verify(self, S: Structure) -> bool:
        t = len(self.bags)
        if t == 0 or len(self.edges) != t - 1:
            return False
        if any(not (0 <= u < t and 0 <= v < t) or u == v for u, v in self.edges):
            return False
        nb = self._neighbours()
        if not self._connected(set(range(t)), nb):
            return False
        elems = set(S.universe)
        if any(not b <= elems for b in self.bags):
            return False
        for c in S.constraints:
            scope = set(c.scope)
            if not any(scope <= b for b in self.bags):
                return False
        for x in elems:
            if not self._connected({i for i, b in enumerate(self.bags) if x in b}, nb):
                return False
        return True


def _skeletons(n: int, k: int) -> Iterator[Tuple[List[frozenset], List[Tuple[int, int]]]]:
    """Partial (k-1)-tree shapes: each new element joins a (k-1)-subset of an earlier bag."""
    first = frozenset(range(min(n, k)))

    def grow(e, bags, edges):
        if e == n:
            yield list(bags), list(edges)
            return
        seen: Dict[frozenset, int] = {}
        for t, bag in enumerate(bags):
            for S in itertools.combinations(sorted(bag), min(k - 1, len(bag))):
                seen.setdefault(frozenset(S), t)
        for S, t in sorted(seen.items(), key=lambda it: sorted(it[0])):
            bags.append(S | {e})
            edges.append((t, len(bags) - 1))
            yield from grow(e + 1, bags, edges)
            bags.pop()
            edges.pop()

    yield from grow(len(first), [first], [])


def _allowed_orbits(sig: Signature, bags: List[frozenset], symmetric: bool) -> List[Tuple[str, tuple]]:
    out = []
    for R, r in sig:
        tuples = set()
        for bag in bags:
            tuples.update(itertools.product(sorted(bag), repeat=r))
        if symmetric:
            orbits = {tuple(sorted(set(itertools.permutations(t)))) for t in tuples}
        else:
            orbits = {(t,) for t in tuples}
        out.extend((R, o) for o in sorted(orbits))
    return out


def _subsets_in_order(m: int) -> Iterator[tuple]:
    for size in range(m + 1):
        yield from itertools.combinations(range(m), size)


def enumerate_treewidth_structures(sig: Signature, max_elems: int, k: int, seed: int = 0,
                                   symmetric: bool = False, exhaustive_limit: int = 4096,
                                   samples: int = 64) -> Iterator[Tuple[Structure, TreeDecomposition]]:
    """Structures of treewidth < k with a decomposition of width <= k - 1.

    Sizes run from 1 to ``max_elems``.  For each decomposition shape, every
    choice of tuples inside the bags is emitted (fewest tuples first) when
    there are at most ``exhaustive_limit`` choices; otherwise ``samples``
    seeded random choices are drawn.  ``symmetric`` keeps only relations
    closed under permuting positions.  Repeats are suppressed.
    """
    if k < 1:
        raise ValidationError("k must be positive")
    seen = set()
    for n in range(1, max_elems + 1):
        names = [str(i) for i in range(n)]
        for s_idx, (bags, edges) in enumerate(_skeletons(n, k)):
            orbits = _allowed_orbits(sig, bags, symmetric)
            m = len(orbits)
            if 2 ** m <= exhaustive_limit:
                choices = _subsets_in_order(m)
            else:
                rng = random.Random(f"{seed}/{n}/{s_idx}")
                choices = (tuple(i for i in range(m) if rng.random() < 0.5) for _ in range(samples))
            dec = TreeDecomposition(tuple(frozenset(names[i] for i in b) for b in bags), tuple(edges))
            for chosen in choices:
                rels: Dict[str, set] = {R: set() for R in sig.names}
                for i in chosen:
                    R, orbit = orbits[i]
                    rels[R].update(orbit)
                key = (n, tuple(frozenset(rels[R]) for R in sig.names))
                if key in seen:
                    continue
                seen.add(key)
                S = Structure.crisp(sig, names, {R: [tuple(names[i] for i in t) for t in sorted(rels[R])]
                                                 for R in sig.names}, allow_empty=True)
                yield S, dec


@dataclass
class Distinguisher:
    structure: Structure
    decomposition: TreeDecomposition
    counts: Tuple[int, int]
    examined: int


def _permutation_closed(S: Structure) -> bool:
    for R, r in S.signature:
        rel = S.relations[R]
        for t in rel:
            if any(p not in rel for p in itertools.permutations(t)):
                return False
    return True


def find_distinguisher(A: Structure, B: Structure, k: int, budget: Optional[int] = None,
                       max_elems: Optional[int] = None, seed: int = 0) -> Optional[Distinguisher]:
    """First streamed structure of treewidth < k whose hom counts into A and B differ.

    ``budget`` caps the number of structures examined (default 20000).  When
    both targets have relations closed under permuting positions, only such
    structures are streamed: closing a source's relations that way does not
    change its hom count into either target.
    """
    require_similar(A, B)
    budget = 20000 if budget is None else budget
    max_elems = max(len(A), len(B), k) if max_elems is None else max_elems
    symmetric = _permutation_closed(A) and _permutation_closed(B)
    examined = 0
    for X, dec in enumerate_treewidth_structures(A.signature, max_elems, k, seed, symmetric):
        if examined >= budget:
            return None
        examined += 1
        ca, cb = count_homomorphisms(X, A), count_homomorphisms(X, B)
        if ca != cb:
            return Distinguisher(X, dec, (ca, cb), examined)
    return None
