"""Maximum clique by bit-parallel branch-and-bound (greedy-coloring bounds)."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

from .graphs import AdjacencyGraph


@dataclass(frozen=True)
class CliqueResult:
    omega: int  # best clique size found; exact iff ``exact``
    clique: tuple
    upper: int
    exact: bool
    nodes: int


class _Budget(Exception):
    pass


def _color_sort(rows, cand: int):
    """Greedy-color ``cand``; return vertices and their color numbers, ascending."""
    order, bounds = [], []
    uncolored = cand
    c = 0
    while uncolored:
        c += 1
        q = uncolored
        while q:
            low = q & -q
            v = low.bit_length() - 1
            q &= ~low & ~rows[v]
            uncolored &= ~low
            order.append(v)
            bounds.append(c)
    return order, bounds


def max_clique_in(
    rows,
    cand: int,
    initial: tuple = (),
    node_limit: Optional[int] = None,
    time_limit: Optional[float] = None,
) -> tuple:
    """Maximum clique among the vertices of bitmask ``cand``.

    Returns ``(clique, exact, nodes)``; ``initial`` seeds the incumbent.
    """
    best = [tuple(initial)]
    nodes = [0]
    deadline = None if time_limit is None else time.monotonic() + time_limit

    def expand(cur, cand):
        nodes[0] += 1
        if node_limit is not None and nodes[0] > node_limit:
            raise _Budget
        if deadline is not None and not nodes[0] & 1023 and time.monotonic() > deadline:
            raise _Budget
        order, bounds = _color_sort(rows, cand)
        for i in range(len(order) - 1, -1, -1):
            if len(cur) + bounds[i] <= len(best[0]):
                return
            v = order[i]
            nxt = cand & rows[v]
            cur.append(v)
            if nxt:
                expand(cur, nxt)
            elif len(cur) > len(best[0]):
                best[0] = tuple(sorted(cur))
            cur.pop()
            cand &= ~(1 << v)

    try:
        if cand:
            expand([], cand)
        exact = True
    except _Budget:
        exact = False
    return best[0], exact, nodes[0]


def clique_number(
    graph: AdjacencyGraph,
    node_limit: Optional[int] = 2_000_000,
    time_limit: Optional[float] = None,
) -> CliqueResult:
    """Exact omega with a witness clique; flagged bounds if the budget runs out."""
    if graph.n == 0:
        return CliqueResult(0, (), 0, True, 0)
    clique, exact, nodes = max_clique_in(
        graph.rows, graph.all_mask, node_limit=node_limit, time_limit=time_limit
    )
    if exact:
        upper = len(clique)
    else:
        _, bounds = _color_sort(graph.rows, graph.all_mask)
        upper = max(bounds)
    return CliqueResult(len(clique), clique, upper, exact, nodes)


def find_clique_of_size(rows, cand: int, k: int) -> Optional[tuple]:
    """Lexicographically first k-clique (by rank) inside ``cand``, or None."""
    if k == 0:
        return ()

    def rec(cur, cand):
        if len(cur) == k:
            return tuple(cur)
        while cand and cand.bit_count() >= k - len(cur):
            low = cand & -cand
            v = low.bit_length() - 1
            cand &= ~low
            cur.append(v)
            found = rec(cur, cand & rows[v])
            if found:
                return found
            cur.pop()
        return None

    return rec([], cand)
