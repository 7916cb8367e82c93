"""Finite posets on dense integer ids, plus the handful of derived structures
(covers, incomparable pairs, order validation) every other module builds on.

A poset stores its strict order as a dense ``N x N`` boolean matrix where
``less[x, y]`` means ``x < y``.  Element identity is the row index; labels are
metadata used for printing, file formats and the Kelly/core constructions.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    CycleDetected,
    DuplicateElement,
    DuplicateLabel,
    IdOutOfRange,
    NotTotal,
    OrdimError,
)

# a/b/w/z are the point families of the Kelly construction; x marks generic
# elements (random posets, chains, antichains).
FAMILIES = "abwzx"
_TOKEN_RE = re.compile(r"^([abwzx])([1-9][0-9]*)$")


@dataclass(frozen=True, order=True)
class Label:
    tokens: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("label needs at least one token")
        for fam, idx in self.tokens:
            if fam not in FAMILIES or not isinstance(idx, int) or idx < 1:
                raise ValueError(f"bad label token {fam!r}{idx!r}")

    @classmethod
    def of(cls, *parts: str) -> "Label":
        """``Label.of("a2", "b3")`` is the sequence (a_2, b_3)."""
        return cls(tuple(parse_token(p) for p in parts))

    @classmethod
    def parse(cls, text: str) -> "Label":
        text = text.strip()
        if text.startswith("(") and text.endswith(")"):
            text = text[1:-1]
        return cls.of(*[t for t in text.split(",") if t])

    def prepend(self, family: str, index: int) -> "Label":
        return Label(((family, index),) + self.tokens)

    @property
    def families(self) -> str:
        return "".join(f for f, _ in self.tokens)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for _, i in self.tokens)

    def to_json(self) -> list[str]:
        return [f"{f}{i}" for f, i in self.tokens]

    def __len__(self):
        return len(self.tokens)

    def __str__(self):
        body = ",".join(self.to_json())
        return body if len(self.tokens) == 1 else f"({body})"


def parse_token(token: str) -> tuple[str, int]:
    m = _TOKEN_RE.match(token.strip())
    if not m:
        raise ValueError(f"bad label token {token!r}")
    return m.group(1), int(m.group(2))


def _as_label(label) -> Label:
    if isinstance(label, Label):
        return label
    if isinstance(label, str):
        return Label.parse(label)
    return Label.of(*label)


class OrderCheck(NamedTuple):
    ok: bool
    witness: tuple[int, int] | None


class Poset:
    """Immutable finite poset.

    ``aliases`` maps an element id to extra names it carries; the recursive
    Kelly construction uses it for glued cut vertices.
    """

    def __init__(self, labels: Sequence[Label], less, aliases=None):
        self._labels = tuple(_as_label(l) for l in labels)
        less = np.array(less, dtype=bool, copy=True)
        n = len(self._labels)
        if less.shape != (n, n):
            raise ValueError(f"relation shape {less.shape} does not match {n} labels")
        less.setflags(write=False)
        self._less = less
        self._index: dict[Label, int] = {}
        for i, lab in enumerate(self._labels):
            if lab in self._index:
                raise DuplicateLabel(lab)
            self._index[lab] = i
        self._aliases: dict[int, tuple[Label, ...]] = {}
        for i, names in (aliases or {}).items():
            names = tuple(_as_label(a) for a in names)
            if names:
                self._aliases[int(i)] = names
                for a in names:
                    if a in self._index:
                        raise DuplicateLabel(a)
                    self._index[a] = int(i)

    @property
    def size(self) -> int:
        return len(self._labels)

    def __len__(self):
        return len(self._labels)

    @property
    def labels(self) -> tuple[Label, ...]:
        return self._labels

    @property
    def less(self) -> np.ndarray:
        return self._less

    @property
    def aliases(self) -> dict[int, tuple[Label, ...]]:
        return dict(self._aliases)

    def index(self, label) -> int:
        """Id of the element carrying ``label`` (canonical name or alias)."""
        return self._index[_as_label(label)]

    def __contains__(self, label) -> bool:
        try:
            return _as_label(label) in self._index
        except ValueError:
            return False

    def lt(self, x: int, y: int) -> bool:
        return bool(self._less[x, y])

    def comparable(self, x: int, y: int) -> bool:
        return bool(self._less[x, y] or self._less[y, x])

    def incomparable(self, x: int, y: int) -> bool:
        return x != y and not self.comparable(x, y)

    @cached_property
    def up_masks(self) -> list[int]:
        """Bitmask of the strict up-set of each element."""
        return [_row_mask(row) for row in self._less]

    @cached_property
    def down_masks(self) -> list[int]:
        return [_row_mask(col) for col in self._less.T]

    @cached_property
    def comparability_count(self) -> int:
        return int(self._less.sum())

    def is_chain(self) -> bool:
        n = self.size
        return self.comparability_count == n * (n - 1) // 2

    def is_antichain(self) -> bool:
        return self.comparability_count == 0

    def check_invariants(self) -> None:
        """Raise ``OrdimError`` unless the relation is a strict partial order."""
        less = self._less
        if np.any(np.diag(less)):
            raise OrdimError("relation is not irreflexive")
        if np.any(less & less.T):
            raise OrdimError("relation is not antisymmetric")
        two_step = (less.astype(np.float32) @ less.astype(np.float32)) > 0
        if np.any(two_step & ~less):
            raise OrdimError("relation is not transitive")

    def relabel(self, labels: Sequence[Label]) -> "Poset":
        return Poset(labels, self._less)

    def __eq__(self, other):
        if not isinstance(other, Poset):
            return NotImplemented
        return (
            self._labels == other._labels
            and np.array_equal(self._less, other._less)
            and self._aliases == other._aliases
        )

    __hash__ = None

    def __repr__(self):
        return f"Poset(size={self.size}, comparabilities={self.comparability_count})"


def _row_mask(row: np.ndarray) -> int:
    mask = 0
    for i in np.flatnonzero(row):
        mask |= 1 << int(i)
    return mask


def _find_cycle(n: int, succ: list[list[int]], candidates: Iterable[int]) -> list[int]:
    """Return some directed cycle inside ``candidates`` (all have in-degree left)."""
    alive = set(candidates)
    start = min(alive)
    # Every vertex left after Kahn's algorithm has a predecessor that is also
    # left, so walking predecessors must revisit a vertex.
    pred: dict[int, int] = {}
    for u in sorted(alive):
        for v in succ[u]:
            if v in alive and v not in pred:
                pred[v] = u
    seen: dict[int, int] = {}
    path = []
    v = start
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        v = pred[v]
    cycle = path[seen[v]:]
    cycle.reverse()
    return cycle


def poset_from_covers(labels: Sequence, covers: Iterable[tuple[int, int]], aliases=None) -> Poset:
    """Build the poset whose order is the transitive closure of ``covers``.

    ``covers`` lists (lower, upper) pairs.  They need not be a Hasse diagram;
    any acyclic relation works.
    """
    labels = [_as_label(l) for l in labels]
    n = len(labels)
    seen = set()
    for lab in labels:
        if lab in seen:
            raise DuplicateLabel(lab)
        seen.add(lab)
    succ: list[list[int]] = [[] for _ in range(n)]
    preds: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for u, v in covers:
        for e in (u, v):
            if not (0 <= e < n):
                raise IdOutOfRange(e, n)
        if u == v:
            raise CycleDetected([u])
        succ[u].append(v)
        preds[v].append(u)
        indeg[v] += 1
    order = [v for v in range(n) if indeg[v] == 0]
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                order.append(v)
    if len(order) < n:
        raise CycleDetected(_find_cycle(n, succ, [v for v in range(n) if indeg[v] > 0]))

    below = np.zeros((n, n), dtype=bool)
    for v in order:
        for u in preds[v]:
            below[v] |= below[u]
            below[v, u] = True
    return Poset(labels, below.T, aliases)


def cover_relation(P: Poset) -> list[tuple[int, int]]:
    less = P.less
    if P.size == 0:
        return []
    f = less.astype(np.float32)
    covers = less & ~((f @ f) > 0)
    return [(int(x), int(y)) for x, y in np.argwhere(covers)]


def inc_pairs(P: Poset) -> list[tuple[int, int]]:
    """All ordered pairs (x, y) with x and y incomparable, lexicographic."""
    less = P.less
    inc = ~(less | less.T)
    np.fill_diagonal(inc, False)
    return [(int(x), int(y)) for x, y in np.argwhere(inc)]


def validate_order(P: Poset, seq: Sequence[int], mode: str = "total") -> OrderCheck:
    """Check that ``seq`` (listed bottom to top) never puts y before x when x < y.

    With ``mode="total"`` the sequence must also cover the whole ground set;
    with ``mode="ple"`` it is a linear extension of the subposet it lists.
    """
    if mode not in ("total", "ple"):
        raise ValueError(f"unknown mode {mode!r}")
    n = P.size
    seen = set()
    for e in seq:
        if not (0 <= e < n):
            raise IdOutOfRange(e, n)
        if e in seen:
            raise DuplicateElement(e)
        seen.add(e)
    if mode == "total" and len(seen) != n:
        raise NotTotal(sorted(set(range(n)) - seen))
    if len(seq) < 2:
        return OrderCheck(True, None)
    idx = np.asarray(seq, dtype=np.intp)
    sub = P.less[np.ix_(idx, idx)]
    # sub[j, i] with j > i: the later element is below the earlier one
    bad = np.argwhere(np.tril(sub, -1))
    if len(bad) == 0:
        return OrderCheck(True, None)
    witness = min((int(idx[j]), int(idx[i])) for j, i in bad)
    return OrderCheck(False, witness)


def dual(P: Poset) -> Poset:
    return Poset(P.labels, P.less.T, P.aliases)


def subposet(P: Poset, S: Iterable[int]) -> Poset:
    """Induced subposet on ``S``; new ids follow the sorted order of ``S``."""
    ids = sorted(set(S))
    for e in ids:
        if not (0 <= e < P.size):
            raise IdOutOfRange(e, P.size)
    idx = np.asarray(ids, dtype=np.intp)
    aliases = {}
    old = P.aliases
    for new, e in enumerate(ids):
        if e in old:
            aliases[new] = old[e]
    return Poset([P.labels[e] for e in ids], P.less[np.ix_(idx, idx)], aliases)


def generic_labels(n: int) -> list[Label]:
    return [Label((("x", i + 1),)) for i in range(n)]


def chain(n: int) -> Poset:
    less = np.triu(np.ones((n, n), dtype=bool), 1)
    return Poset(generic_labels(n), less)


def antichain(n: int) -> Poset:
    return Poset(generic_labels(n), np.zeros((n, n), dtype=bool))


def disjoint_union(*posets: Poset) -> Poset:
    """Disjoint union; component k's labels get an ``x<k>`` prefix token."""
    labels = []
    n = sum(p.size for p in posets)
    less = np.zeros((n, n), dtype=bool)
    off = 0
    for k, p in enumerate(posets, start=1):
        labels.extend(l.prepend("x", k) for l in p.labels)
        less[off:off + p.size, off:off + p.size] = p.less
        off += p.size
    return Poset(labels, less)


def random_poset(n: int, p: float, seed) -> Poset:
    """Random poset: transitive closure of a random DAG with edge probability p.

    Ids are shuffled so that id order is not automatically a linear extension.
    Deterministic for a fixed seed.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    edges = np.triu(rng.random((n, n)) < p, 1)
    covers = [(int(perm[i]), int(perm[j])) for i, j in np.argwhere(edges)]
    return poset_from_covers(generic_labels(n), covers)


def height(P: Poset) -> int:
    """Number of elements in a longest chain."""
    return max(rank_by_height(P), default=-1) + 1


def rank_by_height(P: Poset) -> list[int]:
    """Length of the longest chain ending below each element (minimal -> 0)."""
    n = P.size
    rank = [0] * n
    # ids sorted by down-set size form a linear extension
    order = sorted(range(n), key=lambda v: int(P.less[:, v].sum()))
    for v in order:
        below = np.flatnonzero(P.less[:, v])
        if len(below):
            rank[v] = 1 + max(rank[int(u)] for u in below)
    return rank


def topological_order(P: Poset) -> list[int]:
    """The least linear extension in id order."""
    n = P.size
    indeg = P.less.sum(axis=0).astype(int).tolist()
    heap = [v for v in range(n) if indeg[v] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        u = heapq.heappop(heap)
        out.append(u)
        for v in np.flatnonzero(P.less[u]):
            v = int(v)
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, v)
    return out


def find_order_embedding(P: Poset, Q: Poset, *, require_bijection: bool = False) -> list[int] | None:
    """Injective f: P -> Q with x < y in P iff f(x) < f(y) in Q, or None.

    Plain backtracking with degree-based candidate filtering; meant for the
    small block/standard-example checks, not for large instances.
    """
    n, m = P.size, Q.size
    if n > m or (require_bijection and n != m):
        return None
    pu = P.less.sum(axis=1)
    pd = P.less.sum(axis=0)
    qu = Q.less.sum(axis=1)
    qd = Q.less.sum(axis=0)
    cands = []
    for x in range(n):
        if require_bijection:
            c = [y for y in range(m) if qu[y] == pu[x] and qd[y] == pd[x]]
        else:
            c = [y for y in range(m) if qu[y] >= pu[x] and qd[y] >= pd[x]]
        cands.append(c)
    order = sorted(range(n), key=lambda x: len(cands[x]))
    f = [-1] * n
    used = set()

    def extend(k: int) -> bool:
        if k == n:
            return True
        x = order[k]
        for y in cands[x]:
            if y in used:
                continue
            ok = True
            for j in range(k):
                z = order[j]
                fz = f[z]
                if P.less[x, z] != Q.less[y, fz] or P.less[z, x] != Q.less[fz, y]:
                    ok = False
                    break
            if ok:
                f[x] = y
                used.add(y)
                if extend(k + 1):
                    return True
                used.discard(y)
                f[x] = -1
        return False

    return f if extend(0) else None


def is_isomorphic(P: Poset, Q: Poset) -> bool:
    return find_order_embedding(P, Q, require_bijection=True) is not None


def strict_pairs(P: Poset) -> list[tuple[int, int]]:
    return [(int(x), int(y)) for x, y in np.argwhere(P.less)]
