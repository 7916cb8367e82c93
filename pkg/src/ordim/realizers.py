"""Verification of ordinary, local and Boolean realizers, plus the explicit
realizers of the Kelly poset.

Sequences (linear orders and ples) are listed bottom to top: ``seq[0]`` is the
least element of the order.  A ple "reverses" an incomparable pair (x, y)
when it places x above y.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .constructions import kelly
from .errors import EqualElements, IdOutOfRange
from .poset import Label, Poset, inc_pairs, validate_order

LinearOrder = tuple[int, ...]
Ple = tuple[int, ...]


@dataclass(frozen=True)
class BooleanRealizer:
    orders: tuple[LinearOrder, ...]
    tau_ones: frozenset[str]

    def __post_init__(self):
        d = len(self.orders)
        for s in self.tau_ones:
            if len(s) != d or set(s) - {"0", "1"}:
                raise ValueError(f"bit string {s!r} does not have length {d}")

    @property
    def dimension(self) -> int:
        return len(self.orders)


@dataclass
class RealizerReport:
    valid: bool
    witness: tuple | None = None
    reason: str | None = None


@dataclass
class LocalRealizerReport:
    valid: bool
    mu_max: int
    mu: list[int] = field(repr=False)
    witness: tuple | None = None
    reason: str | None = None


@dataclass(frozen=True)
class Collision:
    """Two ordered pairs with one fingerprint but different comparability."""

    comparable_pair: tuple[int, int]
    incomparable_pair: tuple[int, int]
    fingerprint: str


def _positions(order: Sequence[int], n: int) -> np.ndarray:
    pos = np.full(n, -1, dtype=np.int64)
    for i, e in enumerate(order):
        if not 0 <= e < n:
            raise IdOutOfRange(e, n)
        pos[e] = i
    return pos


def q_fingerprint(B: BooleanRealizer, x: int, y: int) -> str:
    """Bit i is 1 iff x comes before y in the i-th order."""
    if x == y:
        raise EqualElements(f"fingerprint needs distinct elements, got {x} twice")
    bits = []
    for order in B.orders:
        pos = {e: i for i, e in enumerate(order)}
        bits.append("1" if pos[x] < pos[y] else "0")
    return "".join(bits)


def _fingerprint_codes(orders: Sequence[Sequence[int]], n: int) -> np.ndarray:
    """codes[x, y] as an integer whose bit (d-1-i) is [x before y in order i]."""
    codes = np.zeros((n, n), dtype=np.int64)
    for order in orders:
        pos = _positions(order, n)
        codes = (codes << 1) | (pos[:, None] < pos[None, :])
    return codes


def _code_str(code: int, d: int) -> str:
    return format(int(code), f"0{d}b") if d else ""


def verify_realizer(P: Poset, orders: Sequence[Sequence[int]]) -> RealizerReport:
    """Every order must be a linear extension and every incomparable pair
    must be reversed by at least one of them."""
    if not orders:
        return RealizerReport(False, None, "empty family")
    n = P.size
    reversed_ = np.zeros((n, n), dtype=bool)
    for k, order in enumerate(orders):
        check = validate_order(P, order, "total")
        if not check.ok:
            return RealizerReport(False, (k, check.witness), "not a linear extension")
        pos = _positions(order, n)
        reversed_ |= pos[:, None] > pos[None, :]
    for x, y in inc_pairs(P):
        if not reversed_[x, y]:
            return RealizerReport(False, (x, y), "incomparable pair never reversed")
    return RealizerReport(True)


def mu_counts(n: int, ples: Sequence[Sequence[int]]) -> list[int]:
    mu = [0] * n
    for ple in ples:
        for e in ple:
            mu[e] += 1
    return mu


def verify_local_realizer(P: Poset, ples: Sequence[Sequence[int]]) -> LocalRealizerReport:
    n = P.size
    mu = mu_counts(n, ples)
    mu_max = max(mu, default=0)
    before = np.zeros((n, n), dtype=bool)
    for k, ple in enumerate(ples):
        check = validate_order(P, ple, "ple")
        if not check.ok:
            return LocalRealizerReport(False, mu_max, mu, (k, check.witness), "ple violates the order")
        pos = _positions(ple, n)
        present = pos >= 0
        before |= (pos[:, None] < pos[None, :]) & present[:, None] & present[None, :]
    # a ple that contains both ends of x < y necessarily lists x first
    uncovered = np.argwhere(P.less & ~before)
    if len(uncovered):
        x, y = (int(t) for t in uncovered[0])
        return LocalRealizerReport(False, mu_max, mu, (x, y), "comparable pair not covered")
    for x, y in inc_pairs(P):
        if not before[y, x]:
            return LocalRealizerReport(False, mu_max, mu, (x, y), "incomparable pair never reversed")
    return LocalRealizerReport(True, mu_max, mu)


def verify_boolean_realizer(P: Poset, B: BooleanRealizer) -> RealizerReport:
    n = P.size
    d = len(B.orders)
    for k, order in enumerate(B.orders):
        if sorted(order) != list(range(n)):
            return RealizerReport(False, (k,), "not a linear order of the ground set")
    codes = _fingerprint_codes(B.orders, n)
    ones = {int(s, 2) for s in B.tau_ones} if d else set()
    for x in range(n):
        for y in range(n):
            if x == y:
                continue
            says = int(codes[x, y]) in ones if d else False
            if says != bool(P.less[x, y]):
                return RealizerReport(False, (x, y), f"tau({_code_str(codes[x, y], d)}) disagrees")
    return RealizerReport(True)


def infer_tau(P: Poset, orders: Sequence[Sequence[int]]) -> frozenset[str] | Collision:
    """The unique tau (as its set of 1-strings, restricted to fingerprints that
    occur) making ``orders`` a Boolean realizer, or the first collision."""
    n = P.size
    d = len(orders)
    codes = _fingerprint_codes(orders, n)
    status: dict[int, tuple[bool, tuple[int, int]]] = {}
    for x in range(n):
        for y in range(n):
            if x == y:
                continue
            c = int(codes[x, y])
            comp = bool(P.less[x, y])
            seen = status.get(c)
            if seen is None:
                status[c] = (comp, (x, y))
            elif seen[0] != comp:
                cp, ip = ((x, y), seen[1]) if comp else (seen[1], (x, y))
                return Collision(cp, ip, _code_str(c, d))
    return frozenset(_code_str(c, d) for c, (comp, _) in status.items() if comp)


def realizer_to_boolean(orders: Sequence[Sequence[int]]) -> BooleanRealizer:
    """Boolean realizer from an ordinary realizer: tau maps only 1...1 to 1."""
    d = len(orders)
    return BooleanRealizer(tuple(tuple(o) for o in orders), frozenset({"1" * d}))


def _kelly_ids(n: int):
    K = kelly(n)
    a = lambda i: K.index(Label((("a", i),)))
    b = lambda i: K.index(Label((("b", i),)))
    w = lambda i: K.index(Label((("w", i),)))
    z = lambda i: K.index(Label((("z", i),)))
    return a, b, w, z


def kelly_linear_extensions(n: int) -> tuple[LinearOrder, LinearOrder]:
    """L1 = a_1 w_1 a_2 ... w_{n-1} a_n b_n z_{n-1} b_{n-1} ... z_1 b_1 and
    L2 = a_n z_{n-1} ... z_1 a_1 b_1 w_1 b_2 ... w_{n-1} b_n."""
    if n < 2:
        raise ValueError("n >= 2 required")
    a, b, w, z = _kelly_ids(n)
    l1 = [a(1)]
    for i in range(1, n):
        l1 += [w(i), a(i + 1)]
    l1.append(b(n))
    for i in range(n - 1, 0, -1):
        l1 += [z(i), b(i)]
    l2 = [a(n)]
    for i in range(n - 1, 0, -1):
        l2 += [z(i), a(i)]
    l2.append(b(1))
    for i in range(1, n):
        l2 += [w(i), b(i + 1)]
    return tuple(l1), tuple(l2)


def kelly_boolean_realizer(n: int) -> BooleanRealizer:
    """Four orders with tau^{-1}(1) = {1101, 1110}; only L1, L2 extend K_n."""
    if n < 3:
        raise ValueError("n >= 3 required")
    a, b, w, z = _kelly_ids(n)
    l1, l2 = kelly_linear_extensions(n)
    l3 = [e for i in range(1, n + 1) for e in (a(i), b(i))]
    l3 += [w(i) for i in range(1, n)] + [z(i) for i in range(1, n)]
    l4 = [z(i) for i in range(n - 1, 0, -1)] + [w(i) for i in range(n - 1, 0, -1)]
    l4 += [e for i in range(n, 0, -1) for e in (a(i), b(i))]
    return BooleanRealizer((l1, l2, tuple(l3), tuple(l4)), frozenset({"1101", "1110"}))


def kelly_local_realizer(n: int) -> list[Ple]:
    """{L1, L2} plus the two-element ples (b_i, a_i) reversing each a_i, b_i."""
    a, b, _, _ = _kelly_ids(n)
    l1, l2 = kelly_linear_extensions(n)
    return [l1, l2] + [(b(i), a(i)) for i in range(1, n + 1)]
