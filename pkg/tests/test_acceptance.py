"""The eleven acceptance criteria, one test each, with their runtime limits.

A summary line per criterion is printed at the end of the pytest run.
"""

import itertools
import time

import networkx as nx
import numpy as np
import pytest

from ordim.adversary import (
    MU_PRECONDITION,
    UNREVERSED_PAIR,
    AdversaryState,
    Certificate,
    adversary_step,
    run_adversary,
    verify_certificate,
    verify_failure,
)
from ordim.constructions import (
    CoreOrder,
    abstract_core,
    embed_core,
    kelly,
    kelly_rec,
    kelly_rec_covers,
    prop1_less,
    standard_example,
)
from ordim.poset import (
    Label,
    antichain,
    chain,
    disjoint_union,
    dual,
    find_order_embedding,
    height,
    is_isomorphic,
    random_poset,
    subposet,
)
from ordim.ramsey import (
    GridColoring,
    MonoBox,
    extract_mono_box,
    find_mono_box_exact,
    is_monochromatic,
    pigeonhole_bound,
    pram_bound,
)
from ordim.realizers import (
    kelly_boolean_realizer,
    kelly_local_realizer,
    verify_boolean_realizer,
    verify_local_realizer,
    verify_realizer,
)
from ordim.solvers import Budget, bdim_decide, bdim_exact, dim_exact, ldim_exact
from ordim.structure import blocks, cover_graph, is_planar, kelly_tree_decomposition, verify_tree_decomposition

from oracles import dim_bruteforce, natural_posets, random_realizer, transitive_closure


class Clock:
    def __init__(self, limit: float):
        self.limit = limit
        self.start = time.perf_counter()

    def check(self):
        elapsed = time.perf_counter() - self.start
        assert elapsed < self.limit, f"took {elapsed:.1f} s, limit {self.limit} s"


@pytest.mark.criterion(1)
def test_criterion_01_canned_realizers():
    clock = Clock(5)
    for n in range(3, 11):
        K = kelly(n)
        assert verify_boolean_realizer(K, kelly_boolean_realizer(n)).valid
        report = verify_local_realizer(K, kelly_local_realizer(n))
        assert report.valid and report.mu_max == 3
    clock.check()


@pytest.mark.criterion(2)
def test_criterion_02_exact_dimensions():
    clock = Clock(60)
    for n in range(2, 6):
        res = dim_exact(standard_example(n))
        assert res.value == n
        assert verify_realizer(standard_example(n), res.certificate).valid
    assert dim_exact(kelly(3)).value == 3
    res = dim_exact(kelly(4))
    assert res.value == 4
    assert verify_realizer(kelly(4), res.certificate).valid
    clock.check()


@pytest.mark.criterion(3)
def test_criterion_03_local_dimension():
    clock = Clock(120)
    assert ldim_exact(chain(10)).value == 1
    assert ldim_exact(antichain(5)).value == 2
    assert ldim_exact(kelly(2)).value == 2
    res = ldim_exact(standard_example(3))
    assert res.value == 3
    assert verify_local_realizer(standard_example(3), res.certificate).valid
    clock.check()


@pytest.mark.criterion(4)
def test_criterion_04_boolean_dimension():
    clock = Clock(300)
    S3 = standard_example(3)
    assert bdim_decide(S3, 2).status == "no"
    yes = bdim_decide(S3, 3)
    assert yes.status == "yes" and verify_boolean_realizer(S3, yes.certificate).valid
    assert bdim_exact(S3).value == 3
    one = bdim_decide(antichain(5), 1)
    assert one.status == "yes" and verify_boolean_realizer(antichain(5), one.certificate).valid
    clock.check()


@pytest.mark.criterion(5)
def test_criterion_05_core_correctness():
    clock = Clock(5)
    for n in range(2, 7):
        assert is_isomorphic(abstract_core(n, 1), standard_example(n))
    u = Label.of("a2", "a6", "a7", "a5", "a8", "a4")
    v = Label.of("a2", "a6", "b3")
    order = CoreOrder(8, 6)
    assert order.lt(order.index(u), order.index(v))
    assert prop1_less(u, v, 8, 6)
    C = abstract_core(3, 2)
    assert C.size == 21 and height(C) == 2
    clock.check()


@pytest.mark.criterion(6)
def test_criterion_06_embedding_and_discrepancy():
    clock = Clock(30)
    for n in (2, 3):
        for d in (1, 2, 3):
            image = embed_core(n, d)
            C = abstract_core(n, d)
            labels, covers = kelly_rec_covers(n + 1, d)
            K_less = transitive_closure(len(labels), covers)
            assert len(set(image)) == C.size
            idx = np.asarray(image)
            assert (K_less[np.ix_(idx, idx)] == C.less).all()
    assert prop1_less(("a1", "a3"), ("b2",), 3, 2)
    K = kelly_rec(3, 2)
    assert K.incomparable(K.index(Label.of("a1", "a3")), K.index("b2"))
    clock.check()


@pytest.mark.criterion(7)
def test_criterion_07_blocks():
    clock = Clock(120)
    P = kelly_rec(3, 2)
    dec = blocks(P)
    assert len(dec.blocks) == 20
    assert sorted(map(sorted, dec.blocks)) == sorted(sorted(c) for c in nx.biconnected_components(cover_graph(P)))
    K3 = kelly(3)
    for b in dec.blocks:
        B = subposet(P, b)
        assert find_order_embedding(B, K3) is not None
        assert ldim_exact(B).value <= 3
    clock.check()


@pytest.mark.criterion(8)
def test_criterion_08_width_and_planarity():
    clock = Clock(30)
    for n in range(3, 7):
        for d in range(1, 4):
            G = cover_graph(kelly_rec(n, d))
            report = verify_tree_decomposition(G, kelly_tree_decomposition(n, d))
            assert report.valid and report.width <= 3
            assert is_planar(G).planar
    res = is_planar(nx.complete_graph(5))
    assert not res.planar and res.kind == "K5"
    clock.check()


def _least_pigeonhole(r: int, m: int) -> int:
    n = 1
    while not all(max(np.bincount(c, minlength=r)) >= m for c in itertools.product(range(r), repeat=n)):
        n += 1
    return n


@pytest.mark.criterion(9)
def test_criterion_09_ramsey():
    clock = Clock(60)
    assert pigeonhole_bound(2, 2) == _least_pigeonhole(2, 2) == 3
    assert pigeonhole_bound(2, 3) == _least_pigeonhole(2, 3) == 5
    side = pram_bound(2, 2, 2)
    assert side == 9
    rng = np.random.default_rng(20240915)
    for _ in range(1000):
        g = GridColoring.from_sizes([side, side], rng.integers(0, 2, size=side * side), r=2)
        box = extract_mono_box(g, 2)
        assert isinstance(box, MonoBox) and is_monochromatic(g, box)
    # the extractor never claims a box the exhaustive search cannot find
    for a in range(1, 5):
        for b in range(1, 5):
            for code in range(1 << (a * b)):
                colors = [(code >> i) & 1 for i in range(a * b)]
                g = GridColoring.from_sizes([a, b], colors, r=2)
                for m in range(1, min(a, b) + 1):
                    got = extract_mono_box(g, m)
                    exact = find_mono_box_exact(g, m)
                    if isinstance(got, MonoBox):
                        assert is_monochromatic(g, got)
                        assert exact is not None
    clock.check()


@pytest.mark.criterion(10)
def test_criterion_10_adversary():
    clock = Clock(120)
    certificates = []
    # one global linear extension of abstract_core(3, 2)
    C = abstract_core(3, 2)
    L = sorted(range(C.size), key=lambda x: (C.less[:, x].any(), x))
    f = run_adversary(3, 2, [L]).result
    assert f.reason == UNREVERSED_PAIR and f.stage == 1
    assert verify_failure(CoreOrder(3, 2), [L], f)

    # a valid realizer with mu = 3 against d = 3
    C23 = abstract_core(2, 3)
    ples = ldim_exact(C23).certificate
    report = verify_local_realizer(C23, ples)
    assert report.valid and report.mu_max == 3
    f = run_adversary(2, 3, ples).result
    assert f.reason == MU_PRECONDITION and f.witness["mu"] == 3
    assert verify_failure(CoreOrder(2, 3), ples, f)

    # constant colorings: one ple reverses all of W over v
    for d in (2, 3):
        n = 4
        core = CoreOrder(n, d)
        v = core.max_id((), 1)
        W = [core.min_id((1,) + rest) for rest in itertools.product(range(1, n + 1), repeat=d - 1)]
        for target in range(1, n + 1):
            out = adversary_step(AdversaryState.initial(n, d), core, [[v] + W], target, enforce_mu_bound=False)
            assert isinstance(out, AdversaryState) and out.m == 2
            assert all(len(h) == target for h in out.H)

    # degenerate depth gives certificates
    run = run_adversary(3, 1, [[3, 0]])
    certificates.append((CoreOrder(3, 1), [[3, 0]], run.result))

    # disjointness on runs over valid realizers of abstract_core(n, 2)
    for n in range(2, 6):
        Cn = abstract_core(n, 2)
        core = CoreOrder(n, 2)
        fams = [dim_exact(Cn, Budget(1)).certificate] + [random_realizer(Cn, s) for s in range(3)]
        for fam in fams:
            assert verify_local_realizer(Cn, fam).valid
            run = run_adversary(n, 2, fam, enforce_mu_bound=False)
            for record in run.trace:
                for a, b in itertools.combinations(record.get("families", []), 2):
                    assert not set(a) & set(b)
            if isinstance(run.result, Certificate):
                certificates.append((core, fam, run.result))
            else:
                assert verify_failure(core, fam, run.result)
    assert certificates
    for core, fam, cert in certificates:
        assert isinstance(cert, Certificate)
        assert verify_certificate(core, fam, cert)
    clock.check()


@pytest.mark.criterion(11)
def test_criterion_11_property_suite():
    clock = Clock(600)
    rng = np.random.default_rng(11)
    for i in range(200):
        n = int(rng.integers(1, 9))
        P = random_poset(n, float(rng.uniform(0.1, 0.6)), seed=int(rng.integers(2**31)))
        d = dim_exact(P).value
        ld = ldim_exact(P).value
        assert ld <= d
        assert bdim_exact(P).value <= d
        assert ld == ldim_exact(dual(P)).value
    for i in range(100):
        parts = [random_poset(int(rng.integers(1, 5)), float(rng.uniform(0.1, 0.7)), seed=int(rng.integers(2**31)))
                 for _ in range(int(rng.integers(2, 4)))]
        U = disjoint_union(*parts)
        assert dim_exact(U).value == max(2, max(dim_exact(Q).value for Q in parts))
    for n in range(1, 7):
        for P in natural_posets(n):
            assert dim_exact(P).value == dim_bruteforce(P)
    clock.check()
