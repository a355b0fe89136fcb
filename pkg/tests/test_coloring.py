import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cayleysum.cliques import clique_number, find_clique_of_size, max_clique_in
from cayleysum.coloring import (
    Coloring,
    dsatur_coloring,
    exact_chromatic_number,
    greedy_coloring,
    verify_coloring,
)
from cayleysum.errors import SizeLimitError
from cayleysum.graphs import AdjacencyGraph, build_cayley_sum_graph
from cayleysum.groups import make_group
from cayleysum.subsets import SubsetBitmap, paley_set, random_subset

from oracles import chi_bruteforce, omega_bruteforce


@st.composite
def graphs(draw, max_n=8):
    n = draw(st.integers(0, max_n))
    p = draw(st.floats(0.0, 1.0))
    seed = draw(st.integers(0, 2**32))
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < p, 1)
    return AdjacencyGraph.from_matrix(upper | upper.T)


def _adj(G):
    return G.to_matrix().tolist()


@given(graphs())
def test_clique_number_matches_bruteforce(G):
    res = clique_number(G)
    assert res.exact
    assert res.omega == omega_bruteforce(G.n, _adj(G))
    assert len(res.clique) == res.omega
    for i in res.clique:
        for j in res.clique:
            assert i == j or G.has_edge(i, j)


@given(graphs(max_n=7))
def test_exact_chi_matches_bruteforce(G):
    res = exact_chromatic_number(G)
    assert res.exact and res.lower == res.upper
    assert res.chi == chi_bruteforce(G.n, _adj(G))
    assert verify_coloring(G, res.coloring)
    assert res.coloring.num_colors == res.chi


@given(graphs(max_n=12))
def test_heuristics_valid_and_bounded(G):
    chi = exact_chromatic_number(G).chi
    for col in (greedy_coloring(G), dsatur_coloring(G)):
        assert verify_coloring(G, col)
        assert col.num_colors >= chi
    maxdeg = max((G.degree(v) for v in range(G.n)), default=-1)
    assert greedy_coloring(G).num_colors <= maxdeg + 1


@given(graphs(max_n=10))
def test_chi_times_complement_omega(G):
    if G.n == 0:
        return
    chi = exact_chromatic_number(G).chi
    om = clique_number(G.complement()).omega
    assert chi * om >= G.n


def test_named_graphs():
    assert exact_chromatic_number(AdjacencyGraph.complete(6)).chi == 6
    assert exact_chromatic_number(AdjacencyGraph.cycle(5)).chi == 3
    assert exact_chromatic_number(AdjacencyGraph.cycle(6)).chi == 2
    assert exact_chromatic_number(AdjacencyGraph.empty(4)).chi == 1
    g = make_group((5,))
    assert exact_chromatic_number(build_cayley_sum_graph(g, SubsetBitmap.from_ranks(g, [0]))).chi == 2


def test_paley_7_regression():
    g = make_group((7,))
    G = build_cayley_sum_graph(g, paley_set(g))
    assert exact_chromatic_number(G).chi == 3


def test_exact_size_guard():
    with pytest.raises(SizeLimitError):
        exact_chromatic_number(AdjacencyGraph.empty(65))
    assert exact_chromatic_number(AdjacencyGraph.empty(65), override=True).chi == 1


def test_budget_flags_inexact():
    g = make_group((61,))
    G = build_cayley_sum_graph(g, random_subset(g, 1))
    res = exact_chromatic_number(G, node_limit=5)
    assert not res.exact
    assert res.lower <= res.upper
    assert verify_coloring(G, res.coloring)
    cq = clique_number(G, node_limit=3)
    assert not cq.exact and cq.omega <= cq.upper


def test_verify_rejects_bad_coloring():
    G = AdjacencyGraph.complete(3)
    assert not verify_coloring(G, [0, 0, 1])
    assert verify_coloring(G, [2, 0, 1])
    with pytest.raises(ValueError):
        verify_coloring(G, [0, 1])


def test_coloring_helpers():
    c = Coloring.from_labels([5, 3, 5, 9])
    assert c.colors == (0, 1, 0, 2) and c.num_colors == 3
    assert c.to_csv() == "0,1,0,2"
    assert Coloring.from_classes(4, c.classes()) == c
    with pytest.raises(ValueError):
        Coloring.from_classes(3, [[0, 1], [1, 2]])
    with pytest.raises(ValueError):
        greedy_coloring(AdjacencyGraph.empty(3), order=[0, 0, 1])


def test_find_clique_of_size():
    G = AdjacencyGraph.from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
    assert find_clique_of_size(G.rows, G.all_mask, 3) == (0, 1, 2)
    assert find_clique_of_size(G.rows, G.all_mask, 4) is None
    assert max_clique_in(G.rows, G.all_mask)[0] in [(0, 1, 2), (2, 3, 4)]
