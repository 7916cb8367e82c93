"""Generators: standard examples, the Kelly poset K_n, the recursive planar
family Kelly(n, d), and the abstract height-2 core poset.

Id layout of ``kelly(n)``: a_1..a_n, b_1..b_n, w_1..w_{n-1}, z_1..z_{n-1}.
"""

from __future__ import annotations

import numpy as np

from .errors import EmbeddingViolation, MalformedCoreLabel, SizeGuardExceeded
from .poset import Label, Poset, poset_from_covers

DEFAULT_MAX_ELEMENTS = 10**6


def _tok(fam: str, i: int) -> Label:
    return Label(((fam, i),))


def standard_example(n: int) -> Poset:
    """S_n: a_i < b_j exactly when i != j."""
    if n < 2:
        raise ValueError("standard example needs n >= 2")
    labels = [_tok("a", i) for i in range(1, n + 1)] + [_tok("b", j) for j in range(1, n + 1)]
    covers = [(i, n + j) for i in range(n) for j in range(n) if i != j]
    return poset_from_covers(labels, covers)


def kelly_labels(n: int) -> list[Label]:
    return (
        [_tok("a", i) for i in range(1, n + 1)]
        + [_tok("b", i) for i in range(1, n + 1)]
        + [_tok("w", i) for i in range(1, n)]
        + [_tok("z", i) for i in range(1, n)]
    )


def kelly_covers(n: int) -> list[tuple[int, int]]:
    """Cover pairs of K_n in the standard id layout."""
    a = lambda i: i - 1
    b = lambda i: n + i - 1
    w = lambda i: 2 * n + i - 1
    z = lambda i: 3 * n - 1 + i - 1
    covers = []
    for i in range(1, n):
        covers += [(a(i), w(i)), (w(i), b(i + 1)), (a(i + 1), z(i)), (z(i), b(i))]
    for i in range(1, n - 1):
        covers += [(w(i), w(i + 1)), (z(i + 1), z(i))]
    return covers


def kelly(n: int) -> Poset:
    """Kelly's planar poset K_n containing S_n on its a/b points."""
    if n < 2:
        raise ValueError("kelly needs n >= 2")
    return poset_from_covers(kelly_labels(n), kelly_covers(n))


def kelly_rec_size(n: int, d: int) -> int:
    size = 4 * n - 2
    for _ in range(d - 1):
        size = (4 * n - 2) + n * (size - 1)
    return size


def _kelly_rec_parts(n: int, d: int):
    """Labels, covers and aliases of Kelly(n, d) without computing the order."""
    labels = kelly_labels(n)
    covers = kelly_covers(n)
    aliases: dict[int, list[Label]] = {}
    if d == 1:
        return labels, covers, aliases
    sub_labels, sub_covers, sub_aliases = _kelly_rec_parts(n, d - 1)
    top_bn = n + n - 1  # id of (b_n) inside the sub-construction
    for i in range(1, n + 1):
        ai = i - 1
        remap = {}
        for sid, lab in enumerate(sub_labels):
            if sid == top_bn:
                remap[sid] = ai
                aliases.setdefault(ai, []).append(lab.prepend("a", i))
            else:
                remap[sid] = len(labels)
                labels.append(lab.prepend("a", i))
        for sid, names in sub_aliases.items():
            aliases.setdefault(remap[sid], []).extend(x.prepend("a", i) for x in names)
        covers.extend((remap[u], remap[v]) for u, v in sub_covers)
    return labels, covers, aliases


def kelly_rec(n: int, d: int, max_elements: int = DEFAULT_MAX_ELEMENTS) -> Poset:
    """Kelly(n, d): n copies of Kelly(n, d-1) hung below the a_i of a fresh K_n.

    Copy i has every label prefixed by a_i and its point (b_n) identified with
    a_i.  The merged point keeps the shorter all-A label; the long name is
    stored as an alias.
    """
    if n < 2 or d < 1:
        raise ValueError("kelly_rec needs n >= 2 and d >= 1")
    size = kelly_rec_size(n, d)
    if size > max_elements:
        raise SizeGuardExceeded(size, max_elements)
    labels, covers, aliases = _kelly_rec_parts(n, d)
    return poset_from_covers(labels, covers, aliases)


def kelly_rec_covers(n: int, d: int, max_elements: int = DEFAULT_MAX_ELEMENTS):
    """(labels, cover pairs) of Kelly(n, d) without the transitive closure.

    Gluing happens at cut vertices, so covers of the copies stay covers.
    """
    size = kelly_rec_size(n, d)
    if size > max_elements:
        raise SizeGuardExceeded(size, max_elements)
    labels, covers, _ = _kelly_rec_parts(n, d)
    return labels, covers


def core_size(n: int, d: int) -> int:
    return n**d + sum(n**k for k in range(1, d + 1))


class CoreOrder:
    """Implicit core poset: labels and comparisons by index arithmetic.

    Ids: minimal points A^d first, in lexicographic order, then for each
    k = 1..d the maximal points A^{k-1} x B, lexicographic.  Nothing of size
    N^2 is stored, so this works well beyond the dense-matrix range.
    """

    def __init__(self, n: int, d: int):
        if n < 2 or d < 1:
            raise ValueError("core needs n >= 2 and d >= 1")
        self.n, self.d = n, d
        self.n_min = n**d
        self._offsets = []
        off = self.n_min
        for k in range(1, d + 1):
            self._offsets.append(off)
            off += n**k
        self.size = off

    def _digits(self, value: int, length: int) -> list[int]:
        out = []
        for _ in range(length):
            value, r = divmod(value, self.n)
            out.append(r)
        return out[::-1]

    def _number(self, digits) -> int:
        v = 0
        for x in digits:
            v = v * self.n + x
        return v

    def level(self, x: int) -> int:
        """0 for minimal points, k for points of A^{k-1} x B."""
        if x < self.n_min:
            return 0
        k = 1
        while k < self.d and x >= self._offsets[k]:
            k += 1
        return k

    def label(self, x: int) -> Label:
        if not 0 <= x < self.size:
            raise IndexError(x)
        k = self.level(x)
        if k == 0:
            return Label(tuple(("a", i + 1) for i in self._digits(x, self.d)))
        digits = self._digits(x - self._offsets[k - 1], k)
        return Label(tuple(("a", i + 1) for i in digits[:-1]) + (("b", digits[-1] + 1),))

    def index(self, label) -> int:
        label = label if isinstance(label, Label) else Label.of(*label)
        kind = _core_kind(label, self.n, self.d)
        digits = [i - 1 for i in label.indices]
        if kind == "min":
            return self._number(digits)
        return self._offsets[len(label) - 1] + self._number(digits)

    def lt(self, x: int, y: int) -> bool:
        if self.level(x) != 0:
            return False
        k = self.level(y)
        if k == 0:
            return False
        ydig = self._digits(y - self._offsets[k - 1], k)
        xdig = self._digits(x, self.d)
        return xdig[: k - 1] == ydig[:-1] and xdig[k - 1] != ydig[-1]

    def min_id(self, hs) -> int:
        """Id of the minimal point (a_{h_1}, ..., a_{h_d}); indices are 1-based."""
        return self._number(h - 1 for h in hs)

    def max_id(self, prefix, j: int) -> int:
        """Id of the maximal point (a_{h_1}, ..., a_{h_{k-1}}, b_j)."""
        prefix = list(prefix)
        return self._offsets[len(prefix)] + self._number([h - 1 for h in prefix] + [j - 1])

    def indices_of(self, x: int) -> tuple[int, tuple[int, ...]]:
        """(level, 1-based indices of the label) of point ``x``."""
        k = self.level(x)
        if k == 0:
            return 0, tuple(i + 1 for i in self._digits(x, self.d))
        return k, tuple(i + 1 for i in self._digits(x - self._offsets[k - 1], k))

    def up_set(self, x: int) -> list[int]:
        """Maximal points above the minimal point ``x`` (empty for maxima)."""
        if self.level(x) != 0:
            return []
        xdig = self._digits(x, self.d)
        out = []
        for k in range(1, self.d + 1):
            base = self._offsets[k - 1] + self._number(xdig[: k - 1]) * self.n
            out.extend(base + j for j in range(self.n) if j != xdig[k - 1])
        return out


def core_labels(n: int, d: int) -> list[Label]:
    core = CoreOrder(n, d)
    return [core.label(x) for x in range(core.size)]


def abstract_core(n: int, d: int, max_elements: int = 20_000) -> Poset:
    """Dense height-2 poset on A^d and the A^{k-1} x B, ordered by the prefix
    rule: u < v iff v = (u_1..u_{k-1}, b_j) with u_k != j.

    The guard is lower than for kelly_rec because the relation is stored
    densely; use ``CoreOrder`` for larger parameters.
    """
    if n < 2 or d < 1:
        raise ValueError("abstract_core needs n >= 2 and d >= 1")
    size = core_size(n, d)
    if size > max_elements:
        raise SizeGuardExceeded(size, max_elements)
    core = CoreOrder(n, d)
    less = np.zeros((size, size), dtype=bool)
    for x in range(core.n_min):
        less[x, core.up_set(x)] = True
    return Poset([core.label(x) for x in range(size)], less)


def _core_kind(label: Label, n: int, d: int) -> str:
    fams = label.families
    if any(i > n for i in label.indices):
        raise MalformedCoreLabel(f"{label} uses an index above n={n}")
    if len(fams) == d and set(fams) == {"a"}:
        return "min"
    if 1 <= len(fams) <= d and fams[-1] == "b" and set(fams[:-1]) <= {"a"}:
        return "max"
    raise MalformedCoreLabel(f"{label} is not a core point for d={d}")


def prop1_less(u, v, n: int, d: int) -> bool:
    """Order of the core poset decided directly from the labels."""
    u = u if isinstance(u, Label) else Label.of(*u)
    v = v if isinstance(v, Label) else Label.of(*v)
    ku, kv = _core_kind(u, n, d), _core_kind(v, n, d)
    if ku != "min" or kv != "max":
        return False
    k = len(v)
    if u.tokens[: k - 1] != v.tokens[: k - 1]:
        return False
    return u.tokens[k - 1][1] != v.tokens[-1][1]


def structural_core_points(P: Poset, with_flags: bool = False):
    """Ids of Kelly(n, d) whose canonical label uses only a/b tokens.

    Glued cut vertices (alias ending in b_n) are included; with
    ``with_flags`` each id comes paired with a bool marking such vertices.
    """
    aliases = P.aliases
    ids = [i for i, lab in enumerate(P.labels) if set(lab.families) <= {"a", "b"}]
    if with_flags:
        return [(i, i in aliases) for i in ids]
    return ids


def embed_core(n: int, d: int, max_elements: int = DEFAULT_MAX_ELEMENTS) -> list[int]:
    """Map abstract_core(n, d) into kelly_rec(n + 1, d) by label identity.

    Returns ``image`` with ``image[core_id] = kelly_id``; raises
    ``EmbeddingViolation`` if the map is not an order embedding.
    """
    core = abstract_core(n, d, max_elements)
    K = kelly_rec(n + 1, d, max_elements)
    image = [K.index(lab) for lab in core.labels]
    idx = np.asarray(image, dtype=np.intp)
    induced = K.less[np.ix_(idx, idx)]
    bad = np.argwhere(induced != core.less)
    if len(bad):
        x, y = (int(t) for t in bad[0])
        raise EmbeddingViolation(
            (x, y), f"core says {bool(core.less[x, y])}, kelly says {bool(induced[x, y])}"
        )
    return image
