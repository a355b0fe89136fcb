"""Colorings of Cayley sum graphs built from sum-free classes.

Both algorithms peel classes X with E[X] inside A^c (independent sets of
Gamma_A) off a shrinking pool, growing each class as a nested chain: pick the
pool vertex x with the most survivors x' (x + x' not in A), then continue
inside the survivor set.  Once the pool drops below ``tau`` the remaining
vertices become singleton classes.

``clique_partition_coloring`` works on the graph's bit rows;
``fourier_greedy_coloring`` counts survivors for all x at once as a
correlation computed with the FFT.  With the same tie-breaking (smallest
rank) they extract the same classes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cliques import max_clique_in
from .coloring import Coloring
from .graphs import build_cayley_sum_graph, iter_bits
from .groups import GroupSpec
from .subsets import SubsetBitmap


def default_tau(N: int) -> int:
    """N / ln(N)^2, floored and clamped to at least 1."""
    if N < 3:
        return 1
    return max(1, int(N / math.log(N) ** 2))


@dataclass(frozen=True)
class CliquePartition:
    """Classes X_1..X_r plus exceptional X_*; each E[X_i] lies in ``sum_set``."""

    classes: tuple
    exceptional: SubsetBitmap
    sum_set: SubsetBitmap

    def to_coloring(self) -> Coloring:
        g = self.sum_set.group
        groups = [list(X) for X in self.classes] + [[v] for v in self.exceptional]
        return Coloring.from_classes(g.order, groups)


def clique_partition_coloring(
    g: GroupSpec, A: SubsetBitmap, tau: Optional[int] = None, search_nodes: int = 0, graph=None
) -> tuple:
    """Partition G into classes with E[X] in A^c; returns (partition, coloring).

    ``search_nodes > 0`` lets a bounded maximum-independent-set search try to
    beat each greedy class inside the current pool.
    """
    if tau is None:
        tau = default_tau(g.order)
    if graph is None:
        graph = build_cayley_sum_graph(g, A)
    non = graph.complement().rows
    pool = graph.all_mask
    classes = []
    while pool and pool.bit_count() >= tau:
        chain = []
        cand = pool
        while cand:
            v = max(iter_bits(cand), key=lambda u: ((non[u] & cand).bit_count(), -u))
            chain.append(v)
            cand &= non[v]
        if search_nodes:
            better, _, _ = max_clique_in(non, pool, initial=tuple(sorted(chain)), node_limit=search_nodes)
            if len(better) > len(chain):
                chain = list(better)
        cls_mask = 0
        for v in chain:
            cls_mask |= 1 << v
        classes.append(SubsetBitmap.from_ranks(g, sorted(chain)))
        pool &= ~cls_mask
    partition = CliquePartition(
        tuple(classes), SubsetBitmap.from_ranks(g, iter_bits(pool)), A.complement()
    )
    return partition, partition.to_coloring()


class _Correlator:
    """h(x) = #{y in S : x + y in B} for every x, via the FFT on G."""

    def __init__(self, g: GroupSpec, B: np.ndarray):
        self.g = g
        self.shape = g.moduli
        self.FB = np.fft.fftn(B.reshape(self.shape).astype(float))

    def __call__(self, S: np.ndarray) -> np.ndarray:
        FS = np.fft.fftn(S.reshape(self.shape).astype(float))
        h = np.fft.ifftn(self.FB * np.conj(FS)).real.ravel()
        return np.rint(h).astype(np.int64)


def fourier_greedy_coloring(
    g: GroupSpec, A: SubsetBitmap, tau: Optional[int] = None, trace: Optional[list] = None
) -> Coloring:
    """Nested-chain extraction with FFT survivor counts.

    If ``trace`` is a list, one ``(pool_size, survivors)`` pair is appended
    per chain step.
    """
    if tau is None:
        tau = default_tau(g.order)
    N = g.order
    B = ~A.mask
    ranks = np.arange(N, dtype=np.int64)
    doubles_in_B = B[g.add_ranks(ranks, ranks)]
    corr = _Correlator(g, B)
    pool = np.ones(N, dtype=bool)
    classes = []
    while pool.any() and pool.sum() >= tau:
        S = pool.copy()
        chain = []
        while S.any():
            members = np.flatnonzero(S)
            if members.size <= 64:
                sums = g.add_ranks(members[:, None], members[None, :])
                hits = B[sums].sum(axis=1)
            else:
                hits = corr(S)[members]
            hits = hits - doubles_in_B[members]
            x = int(members[int(np.argmax(hits))])
            survivors = S & B[g.add_ranks(x, ranks)]
            survivors[x] = False
            if trace is not None:
                trace.append((int(members.size), int(survivors.sum())))
            chain.append(x)
            S = survivors
        classes.append(sorted(chain))
        pool[chain] = False
    classes.extend([int(v)] for v in np.flatnonzero(pool))
    return Coloring.from_classes(N, classes)
