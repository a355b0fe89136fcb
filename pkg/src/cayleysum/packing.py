"""Packings of k-sets whose restricted sumsets are disjoint subsets of A.

The exact value is the packing number f(A): the maximum number r of k-sets
X_1..X_r inside S with every E[X_i] contained in A and the E[X_i] pairwise
disjoint.  The X_i themselves may overlap.  For k = 1 every singleton counts
(its sumset is empty), so f(A) = |S|.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .cliques import find_clique_of_size
from .errors import SizeLimitError
from .groups import GroupSpec
from .subsets import SubsetBitmap

EXACT_MAX_N = 16
EXACT_MAX_K = 4


@dataclass(frozen=True)
class PackingResult:
    cliques: tuple  # SubsetBitmaps of size k
    exact: bool
    value: int


def _sum_mask(g: GroupSpec, X) -> int:
    m = 0
    for i, j in combinations(X, 2):
        m |= 1 << int(g.add_ranks(i, j))
    return m


def packing_candidates(g: GroupSpec, A: SubsetBitmap, k: int, S: SubsetBitmap) -> list:
    """All (X, sum-mask) with X a k-subset of S and E[X] inside A."""
    out = []
    a = A.bits
    for X in combinations(S.ranks.tolist(), k):
        m = _sum_mask(g, X)
        if m & ~a == 0:
            out.append((X, m))
    return out


def _max_packing(cands: list, node_limit: Optional[int]) -> tuple:
    """Maximum family of candidates with pairwise disjoint masks."""
    best = [()]
    nodes = [0]

    def rec(chosen, pool):
        nodes[0] += 1
        if node_limit is not None and nodes[0] > node_limit:
            raise _Budget
        if len(chosen) > len(best[0]):
            best[0] = tuple(chosen)
        if not pool:
            return
        covered = 0
        for _, m in pool:
            covered |= m
        smallest = min(m.bit_count() for _, m in pool)
        if len(chosen) + covered.bit_count() // smallest <= len(best[0]):
            return
        # branch on the lowest element any remaining candidate uses
        e = covered & -covered
        with_e = [c for c in pool if c[1] & e]
        without_e = [c for c in pool if not c[1] & e]
        for X, m in with_e:
            chosen.append((X, m))
            rec(chosen, [c for c in without_e if not c[1] & m])
            chosen.pop()
        rec(chosen, without_e)

    rec([], cands)
    return best[0], nodes[0]


class _Budget(Exception):
    pass


def clique_packing(
    g: GroupSpec,
    A: SubsetBitmap,
    k: int,
    S: Optional[SubsetBitmap] = None,
    mode: str = "greedy",
    node_limit: Optional[int] = None,
) -> PackingResult:
    if k < 1:
        raise ValueError("k must be at least 1")
    if S is None:
        S = SubsetBitmap.full(g)
    if k == 1:
        cliques = tuple(SubsetBitmap.from_ranks(g, [v]) for v in S)
        return PackingResult(cliques, True, len(cliques))

    if mode == "exact":
        if g.order > EXACT_MAX_N or k > EXACT_MAX_K:
            raise SizeLimitError(
                f"exact packing limited to N <= {EXACT_MAX_N}, k <= {EXACT_MAX_K} (got N={g.order}, k={k})"
            )
        cands = packing_candidates(g, A, k, S)
        try:
            chosen, _ = _max_packing(cands, node_limit)
        except _Budget:
            # fall back to the greedy answer rather than a partial search state
            greedy = clique_packing(g, A, k, S, mode="greedy")
            return PackingResult(greedy.cliques, False, greedy.value)
        cliques = tuple(SubsetBitmap.from_ranks(g, X) for X, _ in chosen)
        return PackingResult(cliques, True, len(cliques))

    if mode != "greedy":
        raise ValueError(f"unknown packing mode {mode!r}")
    remaining = A.mask.copy()
    s_ranks = S.ranks
    s_bits = (1 << s_ranks.size) - 1
    cliques = []
    while True:
        adj = remaining[g.add_ranks(s_ranks[:, None], s_ranks[None, :])]
        np.fill_diagonal(adj, False)
        packed = np.packbits(adj, axis=1, bitorder="little")
        rows = [int.from_bytes(r.tobytes(), "little") for r in packed]
        found = find_clique_of_size(rows, s_bits, k)
        if found is None:
            break
        X = s_ranks[list(found)]
        cliques.append(SubsetBitmap.from_ranks(g, X))
        i, j = np.triu_indices(k, 1)
        remaining[g.add_ranks(X[i], X[j])] = False
    return PackingResult(tuple(cliques), False, len(cliques))
