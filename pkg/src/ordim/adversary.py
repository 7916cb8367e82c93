"""The stage-by-stage adversary against low-multiplicity local realizers of
the core poset.

Given ples L over ``CoreOrder(n, d)`` (ids as in ``abstract_core``), the
adversary fixes one coordinate per stage.  At stage m it holds fixed indices
h_1..h_{m-1}, index sets H_m..H_d and a family M of m-1 ples that all
contain every minimal point of {a_{h_1}} x ... x A(H_m) x ... x A(H_d).  A
stage either advances (one more fixed index, one more ple in M, smaller
H-sets) or stops with a failure report whose witness can be re-checked
against the inputs alone.  After the last stage the d min-max pairs left
over form a standard example, and some point lies in d distinct ples.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Sequence

import numpy as np

from .constructions import CoreOrder, standard_example
from .errors import IdOutOfRange, InvalidRealizer, Overflow
from .poset import Poset, is_isomorphic
from .ramsey import GridColoring, MonoBox, extract_mono_box, find_mono_box_exact, pram_bound
from .solvers import is_reversible

log = logging.getLogger(__name__)

SIZE_INSUFFICIENT = "SizeInsufficient"
UNREVERSED_PAIR = "UnreversedPair"
UNCOVERED_COMPARABILITY = "UncoveredComparability"
MU_PRECONDITION = "MuPreconditionExceeded"


@dataclass(frozen=True)
class AdversaryState:
    m: int
    fixed: tuple[int, ...]
    H: tuple[tuple[int, ...], ...]  # H_m, ..., H_d, each sorted
    M: tuple[int, ...]  # ple indices, in the order they were added

    @classmethod
    def initial(cls, n: int, d: int) -> "AdversaryState":
        return cls(1, (), tuple(tuple(range(1, n + 1)) for _ in range(d)), ())


@dataclass(frozen=True)
class Certificate:
    witness: int
    ple_indices: tuple[int, ...]


@dataclass(frozen=True)
class FailureReport:
    stage: int
    reason: str
    witness: dict
    required_size: int | str | None = None


@dataclass
class AdversaryRun:
    result: Certificate | FailureReport
    trace: list[dict] = field(default_factory=list)


class _Ples:
    """Position lookups for a ple family over the core."""

    def __init__(self, core: CoreOrder, ples: Sequence[Sequence[int]]):
        self.core = core
        self.ples = [tuple(int(e) for e in p) for p in ples]
        self.pos = []
        for k, ple in enumerate(self.ples):
            where = {}
            for i, e in enumerate(ple):
                if not 0 <= e < core.size:
                    raise IdOutOfRange(e, core.size)
                if e in where:
                    raise InvalidRealizer(f"ple {k} lists element {e} twice")
                where[e] = i
            self.pos.append(where)

    def check_orders(self):
        """Every ple must respect the core order."""
        core = self.core
        for k, ple in enumerate(self.ples):
            mins = [(i, e) for i, e in enumerate(ple) if core.level(e) == 0]
            maxs = {e: i for i, e in enumerate(ple) if core.level(e) > 0}
            for i, e in mins:
                for y in core.up_set(e):
                    j = maxs.get(y)
                    if j is not None and j < i:
                        raise InvalidRealizer(f"ple {k} lists {y} below {e}")

    def mu(self) -> list[int]:
        counts = [0] * self.core.size
        for ple in self.ples:
            for e in ple:
                counts[e] += 1
        return counts

    def reverses(self, k: int, u: int, v: int) -> bool:
        where = self.pos[k]
        return u in where and v in where and where[u] > where[v]

    def contains(self, k: int, x: int) -> bool:
        return x in self.pos[k]

    def __len__(self):
        return len(self.ples)


def mu_check(core: CoreOrder, ples, d: int) -> FailureReport | None:
    """MuPreconditionExceeded unless every point lies in at most d-1 ples.

    For d = 1 the bound would forbid every non-empty family, so no check is
    made there.
    """
    fam = ples if isinstance(ples, _Ples) else _Ples(core, ples)
    if d < 2:
        return None
    mu = fam.mu()
    top = max(mu, default=0)
    if top <= d - 1:
        return None
    u = mu.index(top)
    return FailureReport(0, MU_PRECONDITION, {"u": u, "mu": top, "bound": d - 1})


def minmax_reversing_family(core: CoreOrder, ples, prefix: Sequence[int], part: Sequence[Sequence[int]]) -> list[int]:
    """Indices of ples reversing some incomparable min-max pair of U x V.

    ``part`` holds the index sets H_{m,j}, ..., H_{d,j};
    U = prefix x A(H_{m,j}) x ... x A(H_{d,j}) and V = prefix x B(H_{m,j}).
    A minimal point u is incomparable to (prefix, b_h) exactly when its
    m-th index is h.
    """
    fam = ples if isinstance(ples, _Ples) else _Ples(core, ples)
    prefix = tuple(prefix)
    m = len(prefix) + 1
    sets = [frozenset(s) for s in part]
    out = []
    for k, ple in enumerate(fam.ples):
        vs = {}
        for i, e in enumerate(ple):
            level, idx = core.indices_of(e)
            if level == m and idx[:-1] == prefix and idx[-1] in sets[0]:
                vs[idx[-1]] = i
        if not vs:
            continue
        for i, e in enumerate(ple):
            level, idx = core.indices_of(e)
            if level != 0 or idx[: m - 1] != prefix:
                continue
            h = idx[m - 1]
            if h in vs and vs[h] < i and all(x in s for x, s in zip(idx[m - 1:], sets)):
                out.append(k)
                break
    return out


def round_robin(H: Sequence[int], parts: int) -> list[tuple[int, ...]]:
    H = sorted(H)
    return [tuple(H[j::parts]) for j in range(parts)]


def _first_incomparable_pair(core: CoreOrder, prefix, part):
    h = part[0][0]
    u = core.min_id(tuple(prefix) + (h,) + tuple(s[0] for s in part[1:]))
    v = core.max_id(prefix, h)
    return u, v


def _required_size(r: int, t: int, target: int, parts: int) -> int | str:
    try:
        return parts * pram_bound(max(r, 1), t, target)
    except Overflow as exc:
        return f"{parts}*({exc.expression})"


def adversary_step(state: AdversaryState, core: CoreOrder, ples, target: int, *,
                   constructive: bool = False, enforce_mu_bound: bool = True,
                   trace: list | None = None) -> AdversaryState | FailureReport:
    """Advance from stage m to m + 1 with new H-sets of size ``target``."""
    fam = ples if isinstance(ples, _Ples) else _Ples(core, ples)
    d = core.d
    m = state.m
    if not 1 <= m < d:
        raise ValueError(f"stage {m} has no successor for d={d}")
    if enforce_mu_bound:
        bad = mu_check(core, fam, d)
        if bad is not None:
            return FailureReport(m, bad.reason, bad.witness)
    prefix = state.fixed
    t = d - m
    r_bound = d - 1 if enforce_mu_bound else len(fam)
    if min(len(h) for h in state.H) < m:
        return FailureReport(m, SIZE_INSUFFICIENT, {"part_size": 0, "target": target},
                             _required_size(r_bound, t, target, m))
    split = [round_robin(h, m) for h in state.H]  # split[i - m][j]
    parts = [tuple(split[i][j] for i in range(len(split))) for j in range(m)]
    families = [minmax_reversing_family(core, fam, prefix, part) for part in parts]
    for j, j2 in combinations(range(m), 2):
        shared = set(families[j]) & set(families[j2])
        if shared:
            raise AssertionError(f"reversing families {j} and {j2} share ples {sorted(shared)}")
    M = set(state.M)
    j0 = next(j for j in range(m) if not M & set(families[j]))
    part = parts[j0]
    record = {"stage": m, "families": families, "j0": j0}
    if trace is not None:
        trace.append(record)
    if not families[j0]:
        u, v = _first_incomparable_pair(core, prefix, part)
        return FailureReport(m, UNREVERSED_PAIR, {"u": u, "v": v})
    h_m = part[0][0]
    v = core.max_id(prefix, h_m)
    axes = part[1:]
    record["h"] = h_m
    W = np.empty(tuple(len(a) for a in axes), dtype=np.int64)
    for cell in product(*(range(len(a)) for a in axes)):
        W[cell] = core.min_id(tuple(prefix) + (h_m,) + tuple(a[c] for a, c in zip(axes, cell)))
    candidates = [k for k in range(len(fam)) if fam.contains(k, v)]
    hits = np.zeros((len(candidates),) + W.shape, dtype=bool)
    for ci, k in enumerate(candidates):
        for cell in np.ndindex(W.shape):
            hits[(ci,) + cell] = fam.reverses(k, int(W[cell]), v)
    unreached = np.argwhere(~hits.any(axis=0))
    if len(unreached):
        w = int(W[tuple(unreached[0])])
        return FailureReport(m, UNREVERSED_PAIR, {"u": w, "v": v})
    box: MonoBox | None = None
    chosen = None
    if constructive:
        first = hits.argmax(axis=0)
        g = GridColoring(axes, first, r=len(candidates))
        got = extract_mono_box(g, target)
        if isinstance(got, MonoBox):
            box, chosen = got, candidates[got.color]
        record["coloring"] = first.tolist()
    else:
        for ci, k in enumerate(candidates):
            g = GridColoring(axes, hits[ci].astype(np.int64), r=2)
            got = find_mono_box_exact(g, target, colors=[1])
            if got is not None:
                box, chosen = got, k
                break
    if box is None:
        witness = {
            "v": v,
            "axes": [list(a) for a in axes],
            "candidates": candidates,
            "target": target,
            "mode": "constructive" if constructive else "exact",
        }
        return FailureReport(m, SIZE_INSUFFICIENT, witness, _required_size(r_bound, t, target, m))
    record["ple"] = chosen
    record["box"] = [list(s) for s in box.subsets]
    log.debug("stage %d: j0=%d h=%d ple=%d", m, j0, h_m, chosen)
    return AdversaryState(m + 1, prefix + (h_m,), tuple(tuple(sorted(s)) for s in box.subsets), state.M + (chosen,))


def schedule(d: int, constructive: bool = False) -> list[int | str]:
    """Box sizes p_1..p_d with p_1 = d.

    Stage m shrinks H from p_{d+1-m} to p_{d-m}.  The exact schedule only
    pays for the m-way split, p_{s+1} = (d - s) p_s, and relies on the
    search finding a box; the constructive one also pays the Ramsey bound
    for s axes and d - 1 colors, so the extractor is guaranteed to succeed.
    Entries that overflow are kept as expressions.
    """
    p: list[int | str] = [d]
    for s in range(1, d):
        prev = p[-1]
        parts = d - s
        if isinstance(prev, str):
            p.append(f"{parts}*B({prev})")
        elif constructive:
            p.append(_required_size(max(d - 1, 1), s, max(prev, 1), parts))
        else:
            p.append(parts * prev)
    return p


def _final(state: AdversaryState, core: CoreOrder, fam: _Ples, trace: list | None):
    d = core.d
    prefix = state.fixed
    H = state.H[0]
    if len(H) < d:
        return FailureReport(d, SIZE_INSUFFICIENT, {"part_size": len(H), "target": d}, d)
    hs = H[:d]
    us = [core.min_id(prefix + (h,)) for h in hs]
    vs = [core.max_id(prefix, h) for h in hs]
    if d >= 2:
        labels = [core.label(x) for x in us + vs]
        less = np.array([[core.lt(x, y) for y in us + vs] for x in us + vs], dtype=bool)
        Sd = Poset(labels, less)
        if not is_isomorphic(Sd, standard_example(d)):
            raise AssertionError("final min-max pairs do not form a standard example")
        for i, j in combinations(range(d), 2):
            if is_reversible(Sd, [(i, d + i), (j, d + j)]).ok:
                raise AssertionError("two final pairs are reversible together")
    reversers = []
    for u, v in zip(us, vs):
        ks = [k for k in range(len(fam)) if fam.reverses(k, u, v)]
        if not ks:
            return FailureReport(d, UNREVERSED_PAIR, {"u": u, "v": v})
        reversers.append(ks)
    for i, j in combinations(range(d), 2):
        for a, b in ((i, j), (j, i)):
            u, v = us[a], vs[b]
            if not any(fam.contains(k, u) and fam.contains(k, v) for k in range(len(fam))):
                return FailureReport(d, UNCOVERED_COMPARABILITY, {"u": u, "v": v})
    M = set(state.M)
    best = min((k, us[i]) for i, ks in enumerate(reversers) for k in ks if k not in M)
    cert = Certificate(best[1], state.M + (best[0],))
    if trace is not None:
        trace.append({"stage": d, "pairs": [[u, v] for u, v in zip(us, vs)], "reversers": reversers, "ple": best[0]})
    return cert


def run_adversary(n: int, d: int, ples, *, constructive: bool = False,
                  enforce_mu_bound: bool = True, targets: Sequence[int] | None = None) -> AdversaryRun:
    """Drive the stages to the end on ``CoreOrder(n, d)``.

    ``targets[m-1]`` is the box size requested at stage m (default: the
    schedule entry p_{d-m}).  With ``enforce_mu_bound`` any point in d or
    more ples stops the run at once; turning it off runs the stages on
    arbitrary families, which is how the invariants are exercised on valid
    realizers.
    """
    core = CoreOrder(n, d)
    fam = _Ples(core, ples)
    fam.check_orders()
    trace: list[dict] = []
    if enforce_mu_bound:
        bad = mu_check(core, fam, d)
        if bad is not None:
            return AdversaryRun(FailureReport(1, bad.reason, bad.witness), trace)
    if targets is None:
        p = schedule(d, constructive)
        targets = [p[d - m - 1] for m in range(1, d)]
    state = AdversaryState.initial(n, d)
    while state.m < d:
        target = targets[state.m - 1]
        if isinstance(target, str):
            target = n + 1
        out = adversary_step(state, core, fam, int(target), constructive=constructive,
                             enforce_mu_bound=enforce_mu_bound, trace=trace)
        if isinstance(out, FailureReport):
            return AdversaryRun(out, trace)
        state = out
    result = _final(state, core, fam, trace)
    if isinstance(result, Certificate) and not verify_certificate(core, ples, result):
        raise AssertionError("emitted certificate does not verify")
    return AdversaryRun(result, trace)


def verify_certificate(core: CoreOrder, ples, c: Certificate) -> bool:
    """True iff the indices are distinct, in range, and every listed ple
    contains the witness."""
    idx = list(c.ple_indices)
    if len(set(idx)) != len(idx) or len(idx) < core.d:
        return False
    if not all(0 <= k < len(ples) for k in idx):
        return False
    return all(c.witness in set(ples[k]) for k in idx)


def verify_failure(core: CoreOrder, ples, f: FailureReport, d: int | None = None) -> bool:
    """Re-check a failure witness from the core and the raw ples."""
    d = core.d if d is None else d
    fam = _Ples(core, ples)
    w = f.witness
    if f.reason == MU_PRECONDITION:
        return fam.mu()[w["u"]] == w["mu"] and w["mu"] > d - 1
    if f.reason == UNREVERSED_PAIR:
        u, v = w["u"], w["v"]
        if core.lt(u, v) or core.lt(v, u) or u == v:
            return False
        return not any(fam.reverses(k, u, v) for k in range(len(fam)))
    if f.reason == UNCOVERED_COMPARABILITY:
        u, v = w["u"], w["v"]
        if not core.lt(u, v):
            return False
        return not any(fam.contains(k, u) and fam.contains(k, v) for k in range(len(fam)))
    if f.reason == SIZE_INSUFFICIENT:
        if "axes" not in w:
            return w["part_size"] < w["target"] or w["part_size"] == 0
        v, axes, target = w["v"], [tuple(a) for a in w["axes"]], w["target"]
        prefix = core.indices_of(v)[1][:-1]
        h = core.indices_of(v)[1][-1]
        shape = tuple(len(a) for a in axes)
        W = {cell: core.min_id(prefix + (h,) + tuple(a[c] for a, c in zip(axes, cell))) for cell in np.ndindex(shape)}
        hits = []
        for k in w["candidates"]:
            grid = np.zeros(shape, dtype=np.int64)
            for cell, x in W.items():
                grid[cell] = fam.reverses(k, x, v)
            hits.append(grid)
        if w["mode"] == "exact":
            return all(find_mono_box_exact(GridColoring(axes, g, r=2), target, colors=[1]) is None for g in hits)
        stacked = np.stack(hits).astype(bool)
        first = stacked.argmax(axis=0)
        got = extract_mono_box(GridColoring(axes, first, r=len(hits)), target)
        return not isinstance(got, MonoBox)
    return False
