"""Exact dim, ldim and bdim for small posets.

All three searches are budgeted in search nodes, not wall time, so a result
depends only on the input and the budget.  Relations inside the searches are
kept as lists of Python-int bitmasks: ``up[a]`` has bit b set iff a < b.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import NamedTuple, Sequence

import numpy as np

from .errors import PairNotIncomparable
from .poset import Poset, topological_order
from .realizers import (
    BooleanRealizer,
    infer_tau,
    realizer_to_boolean,
    verify_boolean_realizer,
    verify_local_realizer,
    verify_realizer,
)

DEFAULT_BUDGET_NODES = 10**7


def default_budget_nodes() -> int:
    raw = os.environ.get("ORDIM_BUDGET_NODES")
    return int(float(raw)) if raw else DEFAULT_BUDGET_NODES


@dataclass
class Budget:
    max_nodes: int = field(default_factory=default_budget_nodes)
    deterministic: bool = True

    def __post_init__(self):
        if self.max_nodes <= 0:
            raise ValueError("max_nodes must be positive")


class BudgetExhausted(Exception):
    pass


class _Counter:
    def __init__(self, limit: int):
        self.limit = limit
        self.nodes = 0

    def tick(self, amount: int = 1):
        self.nodes += amount
        if self.nodes > self.limit:
            raise BudgetExhausted


@dataclass
class DimResult:
    """Exact value when ``lo == hi``; otherwise the bracket reached in budget."""

    kind: str
    lo: int
    hi: int
    certificate: list | None
    nodes: int

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def value(self) -> int | None:
        return self.lo if self.exact else None


@dataclass
class BdimDecision:
    status: str  # "yes", "no" or "unknown"
    certificate: BooleanRealizer | None
    nodes: int


class ReversibleCheck(NamedTuple):
    ok: bool
    extension: list[int] | None
    cycle: list[int] | None


# -- bitmask relation helpers -------------------------------------------------

def _add_less(up: list[int], lo: int, hi: int) -> list[int] | None:
    """Closure of ``up`` plus lo < hi, or None if that creates a cycle."""
    if lo == hi or (up[hi] >> lo) & 1:
        return None
    gain = (1 << hi) | up[hi]
    bit = 1 << lo
    new = list(up)
    for a, mask in enumerate(up):
        if a == lo or mask & bit:
            new[a] = mask | gain
    return new


def _extension_of(up: Sequence[int], members: Sequence[int]) -> list[int]:
    """A linear extension of a transitively closed relation on ``members``."""
    below = {a: 0 for a in members}
    for a in members:
        m = up[a]
        for b in members:
            if (m >> b) & 1:
                below[b] += 1
    return sorted(members, key=lambda a: (below[a], a))


def _check_incomparable(P: Poset, pairs):
    for x, y in pairs:
        if not P.incomparable(x, y):
            raise PairNotIncomparable((x, y))


def is_reversible(P: Poset, S) -> ReversibleCheck:
    """Can one linear extension put x above y for every (x, y) in S?

    Yes iff the order plus all y < x stays acyclic; the answer carries either
    such an extension or a directed cycle (listed bottom to top, closing back
    on its first element).
    """
    S = list(S)
    _check_incomparable(P, S)
    up = list(P.up_masks)
    for x, y in S:
        up = _add_less(up, y, x)
        if up is None:
            return ReversibleCheck(False, None, _shortest_cycle(P, S))
    return ReversibleCheck(True, _extension_of(up, range(P.size)), None)


def _shortest_cycle(P: Poset, S) -> list[int]:
    n = P.size
    succ = [set(int(v) for v in np.flatnonzero(P.less[u])) for u in range(n)]
    for x, y in S:
        succ[y].add(x)
    best = None
    for x, y in S:
        # path x -> ... -> y closes the cycle with the added edge y -> x
        prev = {x: None}
        queue = deque([x])
        while queue and y not in prev:
            u = queue.popleft()
            for v in sorted(succ[u]):
                if v not in prev:
                    prev[v] = u
                    queue.append(v)
        if y in prev:
            path = []
            v = y
            while v is not None:
                path.append(v)
                v = prev[v]
            path.reverse()
            cycle = [y] + path[:-1]
            if best is None or len(cycle) < len(best):
                best = cycle
    return best


def critical_pairs(P: Poset) -> list[tuple[int, int]]:
    """Incomparable (x, y) with D(x) within D(y) and U(y) within U(x)."""
    up, down = P.up_masks, P.down_masks
    n = P.size
    out = []
    for x in range(n):
        for y in range(n):
            if x == y or P.less[x, y] or P.less[y, x]:
                continue
            if down[x] & ~down[y] == 0 and up[y] & ~up[x] == 0:
                out.append((x, y))
    return out


# -- dimension ------------------------------------------------------------------

def _greedy_clique(conflict: list[int], m: int) -> int:
    best = 0
    order = sorted(range(m), key=lambda i: -bin(conflict[i]).count("1"))
    for start in order[: min(m, 16)]:
        clique = 1
        cand = conflict[start]
        while cand:
            v = max(
                (i for i in range(m) if (cand >> i) & 1),
                key=lambda i: bin(conflict[i] & cand).count("1"),
            )
            clique += 1
            cand &= conflict[v]
        best = max(best, clique)
    return best


def _reversal_classes(base: list[int], pairs, k: int | None, counter: _Counter):
    """Split ``pairs`` into at most k reversible classes (None = unbounded,
    greedy).  Returns the list of class relations or None if impossible."""
    classes: list[list[int]] = []
    m = len(pairs)

    if k is None:
        for x, y in pairs:
            if any((c[y] >> x) & 1 for c in classes):
                continue
            for i, c in enumerate(classes):
                new = _add_less(c, y, x)
                if new is not None:
                    classes[i] = new
                    break
            else:
                classes.append(_add_less(base, y, x))
        return classes

    def search() -> bool:
        counter.tick()
        best = None
        for p in range(m):
            x, y = pairs[p]
            if any((c[y] >> x) & 1 for c in classes):
                continue
            opts = [i for i, c in enumerate(classes) if not (c[x] >> y) & 1]
            count = len(opts) + (len(classes) < k)
            if count == 0:
                return False
            if best is None or count < best[0]:
                best = (count, p, opts)
                if count == 1:
                    break
        if best is None:
            return True
        _, p, opts = best
        x, y = pairs[p]
        for i in opts:
            saved = classes[i]
            classes[i] = _add_less(saved, y, x)
            if search():
                return True
            classes[i] = saved
        if len(classes) < k:
            classes.append(_add_less(base, y, x))
            if search():
                return True
            classes.pop()
        return False

    return classes if search() else None


def dim_exact(P: Poset, budget: Budget | None = None, *, _counter=None) -> DimResult:
    """Least number of linear extensions whose intersection is P.

    Critical pairs are split into reversible classes by branch and bound
    (DSATUR-style choice of the most constrained pair); a greedy split gives
    the starting upper bound and a clique of pairwise non-reversible pairs
    the lower bound.  Each class closure yields one linear extension.
    """
    budget = budget or Budget()
    counter = _counter or _Counter(budget.max_nodes)
    n = P.size
    crit = critical_pairs(P)
    if not crit:
        return DimResult("dim", 1, 1, [topological_order(P)], counter.nodes)
    base = list(P.up_masks)
    m = len(crit)
    # two reversals clash iff x1 <= y2 and x2 <= y1 (an alternating cycle)
    leq = P.less | np.eye(n, dtype=bool)
    xs = np.array([x for x, _ in crit])
    ys = np.array([y for _, y in crit])
    below = leq[np.ix_(xs, ys)]  # below[i, j]: x_i <= y_j
    clash = below & below.T
    conflict = [sum(1 << int(j) for j in np.flatnonzero(row)) for row in clash]
    lo = max(2, _greedy_clique(conflict, m))
    classes = _reversal_classes(base, crit, None, counter)
    hi = len(classes)
    cert = [_extension_of(c, range(n)) for c in classes]
    try:
        k = lo
        while k < hi:
            found = _reversal_classes(base, crit, k, counter)
            if found is not None:
                hi = len(found)
                cert = [_extension_of(c, range(n)) for c in found]
                break
            k += 1
            lo = k
    except BudgetExhausted:
        pass
    lo = min(lo, hi)
    report = verify_realizer(P, cert)
    if not report.valid:
        raise AssertionError(f"dim certificate failed verification: {report}")
    return DimResult("dim", lo, hi, cert, counter.nodes)


# -- local dimension ------------------------------------------------------------

class _Slot:
    """One ple under construction: its members and the closure of the
    induced order plus the orientations it has been asked to realize."""

    __slots__ = ("members", "up", "fits")

    def __init__(self, members: int, up: list[int]):
        self.members = members
        self.up = up
        self.fits: dict[tuple[int, int], bool] = {}  # structural feasibility cache

    def with_element(self, P_up: list[int], P_down: list[int], e: int) -> "_Slot | None":
        members = self.members
        up = self.up
        preds = P_down[e] & members
        succs = P_up[e] & members
        above = succs
        s = succs
        while s:
            b = s & -s
            above |= up[b.bit_length() - 1]
            s ^= b
        below = preds
        m = members & ~preds
        while m:
            b = m & -m
            a = b.bit_length() - 1
            if up[a] & preds:
                below |= b
            m ^= b
        if below & above:
            return None
        new = list(up)
        new[e] = above
        gain = (1 << e) | above
        m = below
        while m:
            b = m & -m
            a = b.bit_length() - 1
            new[a] |= gain
            m ^= b
        return _Slot(members | (1 << e), new)

    def with_less(self, lo: int, hi: int) -> "_Slot | None":
        if (self.up[hi] >> lo) & 1:
            return None
        if (self.up[lo] >> hi) & 1:
            return self
        gain = (1 << hi) | self.up[hi]
        new = list(self.up)
        m = self.members
        while m:
            b = m & -m
            a = b.bit_length() - 1
            if a == lo or (new[a] >> lo) & 1:
                new[a] |= gain
            m ^= b
        return _Slot(self.members, new)

    def ordered_members(self) -> list[int]:
        members = [i for i in range(len(self.up)) if (self.members >> i) & 1]
        return _extension_of(self.up, members)


def _local_requirements(P: Poset) -> list[tuple[int, int]]:
    """(lo, hi) pairs some ple must list with lo below hi: every comparable
    pair in its own orientation and every incomparable pair in both."""
    n = P.size
    return [(x, y) for x in range(n) for y in range(n) if x != y and not P.less[y, x]]


def ldim_decide(P: Poset, k: int, counter: _Counter) -> list[list[int]] | None:
    """A local realizer with every element in at most k ples, or None.

    Every requirement (lo, hi) is assigned to one ple; a ple only ever holds
    endpoints of requirements assigned to it, since dropping other elements
    keeps it a ple and lowers mu.  New ples are opened only through a single
    'fresh' branch, which removes the relabeling symmetry.
    """
    n = P.size
    P_up, P_down = list(P.up_masks), list(P.down_masks)
    reqs = _local_requirements(P)
    slots: list[_Slot] = []
    mu = [0] * n

    def satisfied(lo, hi):
        pair = (1 << lo) | (1 << hi)
        for s in slots:
            if s.members & pair == pair and (s.up[lo] >> hi) & 1:
                return True
        return False

    def fits(s: _Slot, lo: int, hi: int) -> bool:
        """Whether ``s`` can take the requirement, multiplicities aside."""
        for e in (lo, hi):
            if not (s.members >> e) & 1 and mu[e] >= k:
                return False
        got = s.fits.get((lo, hi))
        if got is None:
            got = s.fits[(lo, hi)] = option(s, lo, hi, check_mu=False) is not None
        return got

    def option(s: _Slot, lo: int, hi: int, check_mu: bool = True):
        """(cost, new slot) for placing the requirement in ``s``, or None."""
        cost = 0
        cur = s
        for e in (lo, hi):
            if not (cur.members >> e) & 1:
                if check_mu and mu[e] >= k:
                    return None
                cur = cur.with_element(P_up, P_down, e)
                if cur is None:
                    return None
                cost += 1
        cur = cur.with_less(lo, hi)
        return None if cur is None else (cost, cur)

    def search() -> bool:
        counter.tick()
        best = None
        best_count = len(slots) + 2
        for lo, hi in reqs:
            if satisfied(lo, hi):
                continue
            # count options only until they can no longer beat the best
            count = int(mu[lo] < k and mu[hi] < k)
            for s in slots:
                if count >= best_count:
                    break
                if fits(s, lo, hi):
                    count += 1
            if count == 0:
                return False
            if count < best_count:
                best, best_count = (lo, hi), count
                if count == 1:
                    break
        if best is None:
            return True
        lo, hi = best
        fresh = mu[lo] < k and mu[hi] < k
        opts = []
        for i, s in enumerate(slots):
            o = option(s, lo, hi)
            if o is not None:
                opts.append((o[0], i, o[1]))
        opts.sort(key=lambda t: (t[0], t[1]))
        for cost, i, new in opts:
            old = slots[i]
            added = [e for e in (lo, hi) if not (old.members >> e) & 1]
            slots[i] = new
            for e in added:
                mu[e] += 1
            if search():
                return True
            for e in added:
                mu[e] -= 1
            slots[i] = old
        if fresh:
            empty = _Slot(0, [0] * n)
            s = empty.with_element(P_up, P_down, lo).with_element(P_up, P_down, hi)
            s = s.with_less(lo, hi)
            slots.append(s)
            mu[lo] += 1
            mu[hi] += 1
            if search():
                return True
            mu[lo] -= 1
            mu[hi] -= 1
            slots.pop()
        return False

    if not search():
        return None
    return [s.ordered_members() for s in slots]


def ldim_exact(P: Poset, budget: Budget | None = None) -> DimResult:
    """Least max-multiplicity over local realizers.

    Chains are 1 directly.  Otherwise the ordinary dimension certificate
    gives an upper bound (a realizer is a local realizer with mu = dim) and
    the decision search runs for k = 2, 3, ... below it.
    """
    budget = budget or Budget()
    counter = _Counter(budget.max_nodes)
    n = P.size
    if P.is_chain():
        cert = [topological_order(P)] if n else []
        return DimResult("ldim", 1, 1, cert, 0)
    lo = 2
    dres = dim_exact(P, budget, _counter=counter)
    hi = dres.hi
    cert = [list(o) for o in dres.certificate]
    try:
        k = lo
        while k < hi:
            found = ldim_decide(P, k, counter)
            if found is not None:
                hi = k
                cert = found
                break
            k += 1
            lo = k
    except BudgetExhausted:
        pass
    report = verify_local_realizer(P, cert)
    if not report.valid or report.mu_max > hi:
        raise AssertionError(f"ldim certificate failed verification: {report}")
    return DimResult("ldim", min(lo, hi), hi, cert, counter.nodes)


# -- Boolean dimension ----------------------------------------------------------

def _tau_candidates(k: int):
    """Truth tables worth trying, as sets of codes mapped to 1.

    A code c and its complement can never both map to 1 (a pair with code c
    would then be below and above its partner), and if c is unused its
    value does not matter; so each complementary pair {c, ~c} is in one of
    three states: c -> 1, ~c -> 1, or both -> 0.
    """
    full = (1 << k) - 1
    reps = [c for c in range(1 << k) if c < full ^ c]
    for states in product(range(3), repeat=len(reps)):
        ones = set()
        for c, st in zip(reps, states):
            if st == 1:
                ones.add(c)
            elif st == 2:
                ones.add(full ^ c)
        yield frozenset(ones)


def bdim_decide(P: Poset, k: int, budget: Budget | None = None, *, use_dimension: bool = True) -> BdimDecision:
    """Is there a Boolean realizer with k linear orders?

    A realizer with at most k extensions answers yes immediately (tau maps
    only all-ones to 1).  Otherwise the search is exhaustive: for each
    candidate tau it assigns every pair x < y (by id) a fingerprint code
    allowed by tau, branching on the most constrained pair and keeping each
    of the k orders transitively closed, so a full assignment is a k-tuple
    of linear orders.  Reversing one order complements one bit of every
    fingerprint and maps Boolean realizers to Boolean realizers, so element
    0 is taken to precede element 1 in every order.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    budget = budget or Budget()
    counter = _Counter(budget.max_nodes)
    n = P.size
    if use_dimension:
        try:
            dres = dim_exact(P, budget, _counter=counter)
        except BudgetExhausted:
            dres = None
        if dres is not None and dres.hi <= k:
            orders = list(dres.certificate)
            orders += [orders[0]] * (k - len(orders))
            B = realizer_to_boolean(orders)
            if verify_boolean_realizer(P, B).valid:
                return BdimDecision("yes", B, counter.nodes)
    if n <= 1:
        B = BooleanRealizer(tuple(tuple(range(n)) for _ in range(k)), frozenset())
        return BdimDecision("yes", B, counter.nodes)
    full = (1 << k) - 1
    pairs = [(x, y) for x in range(n) for y in range(x + 1, n)]
    kinds = [1 if P.less[x, y] else (-1 if P.less[y, x] else 0) for x, y in pairs]
    try:
        for ones in _tau_candidates(k):
            def ok(c, kind):
                if kind == 1:
                    return c in ones
                if kind == -1:
                    return (full ^ c) in ones
                return c not in ones and (full ^ c) not in ones

            allowed = [[c for c in range(1 << k) if ok(c, kind)] for kind in kinds]
            if any(not a for a in allowed):
                continue
            allowed[0] = [c for c in allowed[0] if c == full]  # pair (0, 1)
            if not allowed[0]:
                continue
            orders = _assign_codes(n, k, pairs, allowed, counter)
            if orders is not None:
                tau = infer_tau(P, orders)
                B = BooleanRealizer(tuple(tuple(o) for o in orders), tau)
                if not verify_boolean_realizer(P, B).valid:
                    raise AssertionError("Boolean certificate failed verification")
                return BdimDecision("yes", B, counter.nodes)
    except BudgetExhausted:
        return BdimDecision("unknown", None, counter.nodes)
    return BdimDecision("no", None, counter.nodes)


def _assign_codes(n: int, k: int, pairs, allowed, counter: _Counter):
    """k linear orders in which each pair (x, y) gets a code from its
    allowed list (bit k-1-i set iff x precedes y in order i), or None."""
    ups = [[0] * n for _ in range(k)]

    def fixed_bits(x, y):
        """(mask of decided bits, their values) for the pair in all orders."""
        mask = val = 0
        for i in range(k):
            bit = 1 << (k - 1 - i)
            if (ups[i][x] >> y) & 1:
                mask |= bit
                val |= bit
            elif (ups[i][y] >> x) & 1:
                mask |= bit
        return mask, val

    def search() -> bool:
        counter.tick()
        best = None
        for p, (x, y) in enumerate(pairs):
            mask, val = fixed_bits(x, y)
            opts = [c for c in allowed[p] if c & mask == val]
            if not opts:
                return False
            if mask == (1 << k) - 1:
                continue
            if best is None or len(opts) < len(best[1]):
                best = (p, opts, mask)
                if len(opts) == 1:
                    break
        if best is None:
            return True
        p, opts, mask = best
        x, y = pairs[p]
        saved = [list(u) for u in ups]
        for c in opts:
            for i in range(k):
                bit = 1 << (k - 1 - i)
                if not mask & bit:
                    lo, hi = (x, y) if c & bit else (y, x)
                    ups[i] = _add_less(ups[i], lo, hi)
            if search():
                return True
            for i in range(k):
                ups[i] = list(saved[i])
        return False

    if not search():
        return None
    return [_extension_of(u, range(n)) for u in ups]


def bdim_exact(P: Poset, budget: Budget | None = None) -> DimResult:
    """Smallest k with a Boolean realizer, by deciding k = 1, 2, ... ."""
    budget = budget or Budget()
    spent = 0
    k = 1
    lo = 1
    while True:
        left = Budget(max(1, budget.max_nodes - spent), budget.deterministic)
        dec = bdim_decide(P, k, left)
        spent += dec.nodes
        if dec.status == "yes":
            return DimResult("bdim", lo, k, dec.certificate, spent)
        if dec.status == "unknown":
            hi = dim_exact(P).hi
            return DimResult("bdim", lo, max(hi, lo), None, spent)
        k += 1
        lo = k
