import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cayleysum.additive import sample_dissociated
from cayleysum.errors import GroupError, InfeasibleError, TorsionError
from cayleysum.graphs import AdjacencyGraph
from cayleysum.groups import make_group
from cayleysum.lemmas import (
    TYPE_I,
    TYPE_II,
    check_binomial_lemmas,
    check_ell_d_relation,
    check_intersection_corollaries,
    check_k5_lemma,
    check_turan_consequence,
    classify_z4,
    components,
    ell_d_bounds_hold,
    find_all_z4,
    intersection_profile,
    spanning_forest,
    turan_bound_holds,
    vertices_outside_k5,
)
from cayleysum.rng import make_rng
from cayleysum.subsets import SubsetBitmap, restricted_sumset

Z1009 = make_group((1009,))


def S(ranks, g=Z1009):
    return SubsetBitmap.from_ranks(g, ranks)


@given(st.integers(0, 2**32), st.integers(2, 6))
def test_profile_of_X_with_itself(seed, k):
    X = sample_dissociated(Z1009, k, make_rng(seed))
    p = intersection_profile(Z1009, X, X)
    assert p.ell == math.comb(k, 2) == p.edge_count
    assert p.d == 1
    assert len(p.skeleton) == k - 1


@given(st.integers(0, 2**32), st.integers(2, 6))
def test_profile_invariants(seed, k):
    rng = make_rng(seed)
    X = sample_dissociated(Z1009, k, rng)
    Y = sample_dissociated(Z1009, k, rng)
    p = intersection_profile(Z1009, X, Y)
    assert p.ell == p.edge_count  # Y dissociated, so pair sums of Y are distinct
    assert len(p.skeleton) == k - p.d
    # skeleton is a forest with the components of gamma_y
    forest = AdjacencyGraph.from_edges(k, p.skeleton)
    assert components(forest.rows) == components(p.gamma_y.rows)
    for u, v in p.skeleton:
        assert p.gamma_y.has_edge(u, v)
    assert all(ell_d_bounds_hold(k, p.ell, p.d))


def test_profile_disjoint_sumsets():
    X = S([0, 1, 3])
    Y = S([500, 600, 800])
    assert not (restricted_sumset(Z1009, X) & restricted_sumset(Z1009, Y))
    p = intersection_profile(Z1009, X, Y)
    assert (p.ell, p.d, p.skeleton) == (0, 3, ())


def test_profile_total_order_and_errors():
    X = S([1, 5, 25, 125])
    order = list(range(1008, -1, -1))
    p = intersection_profile(Z1009, X, X, total_order=order)
    assert p.order == (125, 25, 5, 1)
    with pytest.raises(ValueError):
        intersection_profile(Z1009, X, S([1, 2]))


def test_forest_lowest_first():
    G = AdjacencyGraph.from_edges(5, [(0, 2), (2, 1), (0, 1), (3, 4)])
    assert spanning_forest(G.rows) == [(0, 1), (0, 2), (3, 4)]
    assert len(components(G.rows)) == 2


def test_ell_d_examples():
    assert ell_d_bounds_hold(5, 0, 5) == (True, True)
    assert ell_d_bounds_hold(5, 4, 1) == (True, True)
    assert 2 * 0 == (5 - 5 + 1) * (5 - 5)  # equality for the empty graph
    assert ell_d_bounds_hold(4, 6, 2) == (False, False)


def test_ell_d_exhaustive_k6():
    rep = check_ell_d_relation(k_max=6, trials=0, exhaustive_k=6)
    assert rep.summary["exhaustive_graphs"]["6"] == 32768
    assert rep.violations == 0


def test_turan_examples():
    full = AdjacencyGraph.complete(7).rows
    assert vertices_outside_k5(full) == 0
    assert turan_bound_holds(7, 21, 0)
    empty = AdjacencyGraph.empty(10).rows
    assert vertices_outside_k5(empty).bit_count() == 10
    # bound 5 sqrt(45) > 10, so the edgeless graph passes
    assert turan_bound_holds(10, 0, 10)


def test_turan_four_missing_edges_k20():
    rng = np.random.default_rng(0)
    iu, ju = np.triu_indices(20, 1)
    for _ in range(100):
        mat = ~np.eye(20, dtype=bool)
        pick = rng.choice(iu.size, 4, replace=False)
        mat[iu[pick], ju[pick]] = mat[ju[pick], iu[pick]] = False
        out = vertices_outside_k5(AdjacencyGraph.from_matrix(mat).rows).bit_count()
        assert out <= 10


def test_outside_k5_bruteforce():
    rng = np.random.default_rng(1)
    for _ in range(30):
        n = 8
        upper = np.triu(rng.random((n, n)) < 0.7, 1)
        G = AdjacencyGraph.from_matrix(upper | upper.T)
        inside = set()
        for c in itertools.combinations(range(n), 5):
            if all(G.has_edge(a, b) for a, b in itertools.combinations(c, 2)):
                inside.update(c)
        expect = sum(1 << v for v in range(n) if v not in inside)
        assert vertices_outside_k5(G.rows) == expect


def test_z4_worked_example():
    X = S([1, 5, 25, 125])
    found = dict(find_all_z4(Z1009, X))
    assert found[(1, 5, 25, 125)].kind == TYPE_I
    c = found[(53, 73, 77, 962)]
    assert c.kind == TYPE_II
    g_, *xs = c.witness
    assert g_ == 78 and (2 * g_) % 1009 == sum(xs) % 1009


def _z4_bruteforce(g, X):
    """Every 4-set with all six pair sums in E[X], by scanning z1 over G."""
    E = set(restricted_sumset(g, X).ranks.tolist())
    N = g.order
    out = set()
    for z1 in range(N):
        partners = sorted({(e - z1) % N for e in E} - {z1})
        for z2, z3, z4 in itertools.combinations(partners, 3):
            if (z2 + z3) % N in E and (z2 + z4) % N in E and (z3 + z4) % N in E:
                out.add(tuple(sorted((z1, z2, z3, z4))))
    return out


@pytest.mark.parametrize("seed", range(4))
def test_z4_matches_bruteforce_scan(seed):
    g = make_group((101,))
    X = sample_dissociated(g, 4, make_rng(seed))
    found = find_all_z4(g, X)
    assert {z for z, _ in found} == _z4_bruteforce(g, X)
    assert all(c.kind in (TYPE_I, TYPE_II) for _, c in found)


@given(st.integers(0, 2**32), st.integers(4, 6))
def test_z4_classification_total(seed, k):
    X = sample_dissociated(Z1009, k, make_rng(seed))
    found = find_all_z4(Z1009, X)
    subsets = {tuple(c) for c in itertools.combinations(X.ranks.tolist(), 4)}
    assert subsets <= {z for z, _ in found}
    for z, c in found:
        assert c.kind in (TYPE_I, TYPE_II)
        if c.kind == TYPE_I:
            assert set(z) <= set(X.ranks.tolist())
        else:
            g_, *xs = c.witness
            assert sorted((g_ - x) % 1009 for x in xs) == list(z)


def test_z4_errors():
    with pytest.raises(GroupError):
        find_all_z4(Z1009, S([1, 2, 3]))
    with pytest.raises(TorsionError):
        find_all_z4(make_group((15,)), S([1, 2], make_group((15,))))


def test_k5_feasible():
    rep = check_k5_lemma(Z1009, 6, 30, seed=3)
    assert rep.violations == 0
    assert rep.summary["z4_violation"] == 0
    assert rep.summary["type_ii_extended_to_dissociated_z5"] == 0
    # every 5-subset of X shows up
    assert rep.summary["z5_dissociated"] >= 30 * math.comb(6, 5)


def test_k5_infeasible_k8_in_z101():
    with pytest.raises(InfeasibleError):
        check_k5_lemma(make_group((101,)), 8, 1)


def test_corollaries_feasible():
    rep = check_intersection_corollaries(Z1009, 6, 100, seed=1)
    assert rep.violations == 0
    assert rep.summary["overlap_violations"] == 0
    assert not rep.summary["cap_asserted"]


def test_corollary_cap_is_hard_above_threshold():
    rep = check_intersection_corollaries(Z1009, 4, 20, seed=1, hard_k=4)
    assert rep.summary["cap_asserted"]
    assert rep.violations == rep.summary["overlap_violations"] + rep.summary["cap_violations"]


def test_binomial_small():
    rep = check_binomial_lemmas(64)
    assert rep.violations == 0
    assert rep.summary["c3_skipped_n_eq_k"] == sum(range(1, 65))


def test_binomial_examples():
    assert math.comb(20, 5) == 15504
    assert math.comb(20, 5) ** 2 > 2**5 * math.comb(10, 5) ** 2


def test_binomial_exact_direct_small():
    # direct big-integer check of every triple, independent of the log screen
    for n in range(1, 25):
        for k in range(1, n + 1):
            for d in range(1, k + 1):
                assert math.comb(n, d) ** k <= k ** (d * k) * math.comb(n, k) ** d
                if n > k:
                    assert math.comb(n, d) * (n - k) ** (k - d) <= k ** (k - d) * math.comb(n, k)


# Dissociated 8-sets do not exist in Z/101 and 12-sets do not exist in Z/1009
# (C(k+3, 4) distinct 4-fold sums are needed).  The same checks at those k run
# in a prime-order group large enough to hold them.
BIG = make_group((1000003,))


def test_k5_lemma_k8_large_prime():
    rep = check_k5_lemma(BIG, 8, 100, seed=11)
    s = rep.summary
    assert rep.violations == 0
    assert s["z4_violation"] == 0 and s["z4_total"] == s["z4_type_i"] + s["z4_type_ii"]
    assert s["type_ii_extended_to_dissociated_z5"] == 0


def test_corollaries_k12_large_prime():
    rep = check_intersection_corollaries(BIG, 12, 300, seed=12)
    assert rep.summary["overlap_violations"] == 0
    assert rep.summary["cap_violations"] == 0
    assert rep.summary["max_ell"] <= math.comb(12, 2) - 6
