"""Product Ramsey at k = 1: sufficient bounds and monochromatic boxes.

A grid coloring assigns a color to every cell of X_1 x ... x X_t.  A box of
side m is a product H_1 x ... x H_t of m-subsets; it is monochromatic when
all its cells share one color.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import Overflow

MAX_BOUND_BITS = 4096


def pigeonhole_bound(r: int, m: int) -> int:
    """Least n such that every r-coloring of [n] has m cells of one color."""
    if r < 1 or m < 1:
        raise ValueError("r and m must be positive")
    return r * (m - 1) + 1


def _pram(r: int, t: int, m: int):
    """(value or None, symbolic expression)."""
    if t == 1:
        v = pigeonhole_bound(r, m)
        return v, str(v)
    prev, prev_expr = _pram(r, t - 1, m)
    if prev is None:
        return None, f"({m - 1})*{r}^(({prev_expr})^{t - 1})+1"
    if r == 1 or m == 1:
        return max(prev, m), str(max(prev, m))
    exponent = prev ** (t - 1)
    expr = f"({m - 1})*{r}^({prev}^{t - 1})+1"
    if exponent * r.bit_length() > MAX_BOUND_BITS:
        return None, expr
    return max(prev, (m - 1) * r**exponent + 1), expr


def pram_bound(r: int, t: int, m: int) -> int:
    """A sufficient side length for a monochromatic m-box in any r-coloring
    of a t-dimensional grid, following the grouping recursion used by
    ``extract_mono_box``.  Raises ``Overflow`` when the value is too large to
    be worth materializing; the exception carries the expression."""
    if r < 1 or t < 1 or m < 1:
        raise ValueError("r, t and m must be positive")
    value, expr = _pram(r, t, m)
    if value is None:
        raise Overflow(expr)
    return value


@dataclass
class GridColoring:
    """Colors of a t-dimensional grid.

    ``axes[i]`` lists the index values of axis i; ``colors`` has shape
    ``tuple(len(a) for a in axes)`` and entries in range(r).
    """

    axes: tuple[tuple[int, ...], ...]
    colors: np.ndarray
    r: int | None = None

    def __post_init__(self):
        self.axes = tuple(tuple(a) for a in self.axes)
        self.colors = np.asarray(self.colors, dtype=np.int64)
        if not self.axes or any(len(a) == 0 for a in self.axes):
            raise ValueError("every axis must be non-empty")
        shape = tuple(len(a) for a in self.axes)
        if self.colors.shape != shape:
            raise ValueError(f"color array has shape {self.colors.shape}, expected {shape}")
        if self.colors.min() < 0:
            raise ValueError("colors must be non-negative")
        if self.r is None:
            self.r = int(self.colors.max()) + 1
        if self.r < 1 or self.colors.max() >= self.r:
            raise ValueError("colors must lie in range(r)")

    @classmethod
    def from_sizes(cls, sizes: Sequence[int], colors, r: int | None = None) -> "GridColoring":
        arr = np.asarray(colors, dtype=np.int64).reshape(tuple(sizes))
        return cls(tuple(tuple(range(1, s + 1)) for s in sizes), arr, r)

    @property
    def t(self) -> int:
        return len(self.axes)


@dataclass(frozen=True)
class MonoBox:
    color: int
    subsets: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class SizeInsufficient:
    """Extraction failed at recursion level ``stage`` (number of axes still
    in play); ``required`` is the side length that guarantees success there,
    or a string when that bound overflows."""

    stage: int
    required: int | str


def _positions(g: GridColoring, box: MonoBox):
    return [[g.axes[i].index(h) for h in sub] for i, sub in enumerate(box.subsets)]


def is_monochromatic(g: GridColoring, box: MonoBox) -> bool:
    if len(box.subsets) != g.t:
        return False
    sizes = {len(s) for s in box.subsets}
    if len(sizes) != 1 or any(len(set(s)) != len(s) for s in box.subsets):
        return False
    try:
        pos = _positions(g, box)
    except ValueError:
        return False
    cells = g.colors[np.ix_(*pos)]
    return bool(np.all(cells == box.color))


def _all_true_box(A: np.ndarray, m: int):
    """Lexicographically least position sets making A true on the box."""
    if A.ndim == 1:
        idx = np.flatnonzero(A)
        return [tuple(int(i) for i in idx[:m])] if len(idx) >= m else None
    # a row can only take part if it holds at least m^(t-1) true cells
    counts = A.reshape(A.shape[0], -1).sum(axis=1)
    rows = [i for i in range(A.shape[0]) if counts[i] >= m ** (A.ndim - 1)]
    for combo in combinations(rows, m):
        rest = A[list(combo)].all(axis=0)
        sub = _all_true_box(rest, m)
        if sub is not None:
            return [combo] + sub
    return None


def find_mono_box_exact(g: GridColoring, m: int, colors: Sequence[int] | None = None) -> MonoBox | None:
    """Exhaustive search; returns the box with least color, then least
    subsets in lexicographic order, or None when no box exists."""
    if m < 1:
        raise ValueError("m must be positive")
    if m > min(len(a) for a in g.axes):
        return None
    candidates = range(g.r) if colors is None else sorted(colors)
    for c in candidates:
        found = _all_true_box(g.colors == c, m)
        if found is not None:
            return MonoBox(int(c), tuple(tuple(g.axes[i][p] for p in ps) for i, ps in enumerate(found)))
    return None


def _required(r: int, t: int, m: int) -> int | str:
    try:
        return pram_bound(r, t, m)
    except Overflow as exc:
        return exc.expression


def _extract(C: np.ndarray, m: int, r: int):
    t = C.ndim
    if t == 1:
        for c in range(r):
            idx = np.flatnonzero(C == c)
            if len(idx) >= m:
                return c, [tuple(int(i) for i in idx[:m])]
        return SizeInsufficient(1, pigeonhole_bound(r, m))
    need = _required(r, t - 1, m)
    keep = tuple(
        slice(0, C.shape[i] if isinstance(need, str) else min(C.shape[i], need))
        for i in range(t - 1)
    )
    sub = C[keep]
    groups: dict[bytes, list[int]] = {}
    for k in range(C.shape[-1]):
        groups.setdefault(sub[..., k].tobytes(), []).append(k)
    for ks in groups.values():
        if len(ks) < m:
            continue
        inner = _extract(sub[..., ks[0]], m, r)
        if isinstance(inner, SizeInsufficient):
            continue
        color, pos = inner
        return color, pos + [tuple(ks[:m])]
    return SizeInsufficient(t, _required(r, t, m))


def extract_mono_box(g: GridColoring, m: int) -> MonoBox | SizeInsufficient:
    """Constructive pigeonhole.

    The last axis is grouped by the coloring each of its slices induces on
    the other axes (cut down to the size the lower-dimensional bound needs);
    a group with m members fixes the last subset and the search recurses on
    one representative slice.  Guaranteed to succeed when every axis has at
    least ``pram_bound(r, t, m)`` entries.
    """
    if m < 1:
        raise ValueError("m must be positive")
    out = _extract(g.colors, m, g.r)
    if isinstance(out, SizeInsufficient):
        return out
    color, pos = out
    box = MonoBox(int(color), tuple(tuple(g.axes[i][p] for p in ps) for i, ps in enumerate(pos)))
    if not is_monochromatic(g, box):
        raise AssertionError("extracted box is not monochromatic")
    return box
