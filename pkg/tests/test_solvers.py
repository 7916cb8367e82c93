import numpy as np
import pytest

from ordim.constructions import kelly, standard_example
from ordim.errors import PairNotIncomparable
from ordim.poset import antichain, chain, disjoint_union, dual, random_poset, validate_order
from ordim.realizers import verify_boolean_realizer, verify_local_realizer, verify_realizer
from ordim.solvers import (
    Budget,
    bdim_decide,
    bdim_exact,
    critical_pairs,
    dim_exact,
    is_reversible,
    ldim_exact,
)

from oracles import bdim_bruteforce, dim_bruteforce, ldim_milp, natural_posets


def ids(P, *names):
    return [P.index(x) for x in names]


# -- reversibility and critical pairs --------------------------------------------

def test_empty_set_is_reversible():
    assert is_reversible(standard_example(3), []).ok


def test_single_pair_reversible_with_witness():
    S = standard_example(3)
    a1, b1 = ids(S, "a1", "b1")
    got = is_reversible(S, [(a1, b1)])
    assert got.ok
    assert validate_order(S, got.extension, "total").ok
    assert got.extension.index(a1) > got.extension.index(b1)


def test_two_pairs_of_s3_form_cycle():
    S = standard_example(3)
    a1, a2, b1, b2 = ids(S, "a1", "a2", "b1", "b2")
    got = is_reversible(S, [(a1, b1), (a2, b2)])
    assert not got.ok
    cyc = got.cycle
    assert sorted(cyc) == sorted([a1, a2, b1, b2])
    # consecutive entries are below each other after adding b_i < a_i
    forced = {(b1, a1), (b2, a2)}
    for x, y in zip(cyc, cyc[1:] + cyc[:1]):
        assert S.lt(x, y) or (x, y) in forced


def test_reversible_rejects_comparable_pair():
    S = standard_example(3)
    with pytest.raises(PairNotIncomparable):
        is_reversible(S, [tuple(ids(S, "a1", "b2"))])


def test_critical_pairs_examples():
    S = standard_example(3)
    assert sorted(critical_pairs(S)) == sorted(tuple(ids(S, f"a{i}", f"b{i}")) for i in range(1, 4))
    assert critical_pairs(chain(5)) == []
    assert sorted(critical_pairs(antichain(2))) == [(0, 1), (1, 0)]


def test_critical_pairs_match_definition():
    for seed in range(20):
        P = random_poset(7, 0.3, seed=seed)
        L = P.less
        expected = {
            (x, y)
            for x in range(P.size)
            for y in range(P.size)
            if x != y and not L[x, y] and not L[y, x]
            and (L[:, x] <= L[:, y]).all() and (L[y] <= L[x]).all()
        }
        assert set(critical_pairs(P)) == expected


# -- dimension ---------------------------------------------------------------------

def test_dim_chain():
    assert dim_exact(chain(10)).value == 1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_dim_standard_example(n):
    res = dim_exact(standard_example(n))
    assert res.value == n
    assert verify_realizer(standard_example(n), res.certificate).valid


def test_dim_kelly_three():
    assert dim_exact(kelly(3)).value == 3


def test_dim_budget_gives_bracket():
    res = dim_exact(standard_example(5), Budget(1))
    assert res.lo <= 5 <= res.hi
    assert verify_realizer(standard_example(5), res.certificate).valid


@pytest.mark.parametrize("n", [4, 5])
def test_dim_matches_bruteforce_on_all_small_posets(n):
    for P in natural_posets(n):
        assert dim_exact(P).value == dim_bruteforce(P)


def test_dim_is_deterministic():
    P = random_poset(8, 0.3, seed=11)
    assert dim_exact(P).certificate == dim_exact(P).certificate


@pytest.mark.parametrize("seed", range(8))
def test_dim_of_disjoint_union(seed):
    P = random_poset(5, 0.4, seed=seed)
    Q = random_poset(4, 0.5, seed=seed + 50)
    expected = max(2, dim_exact(P).value, dim_exact(Q).value)
    assert dim_exact(disjoint_union(P, Q)).value == expected


def test_dim_of_disjoint_chains_is_two():
    assert dim_exact(disjoint_union(chain(3), chain(2))).value == 2


# -- local dimension ----------------------------------------------------------------

def test_ldim_examples():
    assert ldim_exact(chain(10)).value == 1
    assert ldim_exact(antichain(5)).value == 2
    assert ldim_exact(kelly(2)).value == 2
    assert ldim_exact(standard_example(3)).value == 3


def test_ldim_oracle_values():
    assert ldim_milp(standard_example(3)) == 3
    assert ldim_milp(kelly(2)) == 2
    assert ldim_milp(antichain(4)) == 2


@pytest.mark.parametrize("seed", range(30))
def test_ldim_matches_milp(seed):
    P = random_poset(4 + seed % 3, 0.35, seed=seed)
    res = ldim_exact(P)
    assert res.value == ldim_milp(P)
    report = verify_local_realizer(P, res.certificate)
    assert report.valid and report.mu_max == res.value


def test_ldim_matches_milp_on_dimension_three_posets():
    hard = [P for P in natural_posets(6) if dim_bruteforce(P) == 3]
    assert hard
    for P in hard:
        assert ldim_exact(P).value == ldim_milp(P)


@pytest.mark.parametrize("seed", range(6))
def test_ldim_of_disjoint_union_bound(seed):
    P = random_poset(4, 0.4, seed=seed)
    Q = random_poset(4, 0.4, seed=seed + 100)
    bound = 2 + max(ldim_exact(P).value, ldim_exact(Q).value)
    assert ldim_exact(disjoint_union(P, Q)).value <= bound


def test_ldim_self_dual_examples():
    for P in [standard_example(3), kelly(3), random_poset(7, 0.3, seed=4)]:
        assert ldim_exact(P).value == ldim_exact(dual(P)).value


# -- Boolean dimension ------------------------------------------------------------------

def test_bdim_antichain_is_one():
    dec = bdim_decide(antichain(5), 1)
    assert dec.status == "yes"
    assert verify_boolean_realizer(antichain(5), dec.certificate).valid


def test_bdim_standard_example_three():
    S = standard_example(3)
    assert bdim_decide(S, 2).status == "no"
    yes = bdim_decide(S, 3)
    assert yes.status == "yes"
    assert verify_boolean_realizer(S, yes.certificate).valid
    assert bdim_exact(S).value == 3


def test_bdim_oracle_on_standard_example_three():
    S = standard_example(3)
    assert not bdim_bruteforce(S, 2)
    assert bdim_bruteforce(S, 3)


@pytest.mark.parametrize("seed", range(25))
@pytest.mark.parametrize("use_dimension", [True, False])
def test_bdim_decide_matches_bruteforce(seed, use_dimension):
    P = random_poset(4 + seed % 2, 0.3 + 0.1 * (seed % 3), seed=seed)
    for k in (1, 2):
        dec = bdim_decide(P, k, use_dimension=use_dimension)
        assert (dec.status == "yes") == bdim_bruteforce(P, k)
        if dec.status == "yes":
            assert verify_boolean_realizer(P, dec.certificate).valid


def test_bdim_two_is_refuted_on_dimension_three_posets():
    hard = [P for P in natural_posets(6) if dim_bruteforce(P) == 3]
    for P in hard[:10]:
        assert bdim_decide(P, 2, use_dimension=False).status == "no"
        assert not bdim_bruteforce(P, 2)


def test_bdim_chain_and_single_point():
    assert bdim_exact(chain(5)).value == 1
    assert bdim_exact(chain(1)).value == 1


def test_bdim_budget_unknown():
    dec = bdim_decide(standard_example(4), 3, Budget(5), use_dimension=False)
    assert dec.status == "unknown"
