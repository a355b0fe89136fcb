"""Colorings: greedy, DSATUR, exact branch-and-bound, verification."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence

from .cliques import clique_number
from .errors import SizeLimitError
from .graphs import AdjacencyGraph, iter_bits

EXACT_LIMIT = 64


@dataclass(frozen=True)
class Coloring:
    """Vertex rank -> color id, ids contiguous from 0."""

    colors: tuple
    num_colors: int

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Coloring":
        """Relabel arbitrary labels to 0, 1, ... in order of first appearance."""
        remap = {}
        out = []
        for c in labels:
            if c not in remap:
                remap[c] = len(remap)
            out.append(remap[c])
        return cls(tuple(out), len(remap))

    @classmethod
    def from_classes(cls, n: int, classes) -> "Coloring":
        labels = [-1] * n
        for c, members in enumerate(classes):
            for v in members:
                if labels[v] != -1:
                    raise ValueError(f"vertex {v} placed in two classes")
                labels[v] = c
        if -1 in labels:
            raise ValueError("classes do not cover every vertex")
        return cls(tuple(labels), len(classes))

    def classes(self) -> list:
        out = [[] for _ in range(self.num_colors)]
        for v, c in enumerate(self.colors):
            out[c].append(v)
        return out

    def to_csv(self) -> str:
        return ",".join(map(str, self.colors))


def verify_coloring(graph: AdjacencyGraph, coloring) -> bool:
    """True iff no edge is monochromatic."""
    colors = coloring.colors if isinstance(coloring, Coloring) else tuple(coloring)
    if len(colors) != graph.n:
        raise ValueError(f"coloring has {len(colors)} entries for {graph.n} vertices")
    masks = {}
    for v, c in enumerate(colors):
        masks[c] = masks.get(c, 0) | (1 << v)
    for v, c in enumerate(colors):
        if graph.rows[v] & masks[c]:
            return False
    return True


def greedy_coloring(graph: AdjacencyGraph, order: Optional[Sequence[int]] = None) -> Coloring:
    """First-fit coloring in ``order`` (default: rank order)."""
    n = graph.n
    if order is None:
        order = range(n)
    order = list(order)
    if sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of the vertices")
    class_masks = []
    labels = [0] * n
    for v in order:
        row = graph.rows[v]
        for c, mask in enumerate(class_masks):
            if not row & mask:
                class_masks[c] |= 1 << v
                labels[v] = c
                break
        else:
            labels[v] = len(class_masks)
            class_masks.append(1 << v)
    return Coloring.from_labels(labels)


def dsatur_coloring(graph: AdjacencyGraph) -> Coloring:
    """Brelaz's saturation-degree heuristic; ties by degree then rank."""
    n = graph.n
    labels = [-1] * n
    seen = [0] * n  # bitmask of neighbour colors
    deg = [graph.degree(v) for v in range(n)]
    uncolored = set(range(n))
    while uncolored:
        v = max(uncolored, key=lambda u: (seen[u].bit_count(), deg[u], -u))
        c = 0
        while (seen[v] >> c) & 1:
            c += 1
        labels[v] = c
        uncolored.discard(v)
        for u in iter_bits(graph.rows[v]):
            seen[u] |= 1 << c
    return Coloring.from_labels(labels)


@dataclass(frozen=True)
class ChromaticResult:
    lower: int
    upper: int
    coloring: Coloring  # proper, with ``upper`` colors
    clique: tuple  # clique certifying ``lower`` when exact
    exact: bool
    nodes: int

    @property
    def chi(self) -> int:
        return self.upper


class _Budget(Exception):
    pass


def exact_chromatic_number(
    graph: AdjacencyGraph,
    node_limit: Optional[int] = 2_000_000,
    time_limit: Optional[float] = None,
    exact_limit: int = EXACT_LIMIT,
    override: bool = False,
) -> ChromaticResult:
    """DSATUR branch-and-bound with the maximum clique as lower bound.

    On budget exhaustion the best bracket found is returned with
    ``exact=False``.
    """
    n = graph.n
    if n > exact_limit and not override:
        raise SizeLimitError(f"exact coloring limited to {exact_limit} vertices, got {n}")
    if n == 0:
        return ChromaticResult(0, 0, Coloring((), 0), (), True, 0)

    cq = clique_number(graph, node_limit=node_limit, time_limit=time_limit)
    lower = cq.omega
    best = dsatur_coloring(graph)
    if best.num_colors == lower:
        return ChromaticResult(lower, lower, best, cq.clique, cq.exact, cq.nodes)

    rows = graph.rows
    deg = [graph.degree(v) for v in range(n)]
    color = [-1] * n
    seen = [0] * n
    count = [[0] * n for _ in range(n)]
    state = {"best": best.num_colors, "labels": list(best.colors), "nodes": 0}
    deadline = None if time_limit is None else time.monotonic() + time_limit

    def assign(v, c):
        color[v] = c
        for u in iter_bits(rows[v]):
            count[u][c] += 1
            seen[u] |= 1 << c

    def unassign(v, c):
        color[v] = -1
        for u in iter_bits(rows[v]):
            count[u][c] -= 1
            if not count[u][c]:
                seen[u] &= ~(1 << c)

    def search(used, left):
        state["nodes"] += 1
        if node_limit is not None and state["nodes"] > node_limit:
            raise _Budget
        if deadline is not None and not state["nodes"] & 1023 and time.monotonic() > deadline:
            raise _Budget
        if left == 0:
            state["best"] = used
            state["labels"] = list(color)
            return state["best"] <= lower
        v, key = -1, None
        for u in range(n):
            if color[u] < 0:
                k = (seen[u].bit_count(), deg[u])
                if key is None or k > key:
                    v, key = u, k
        top = min(used + 1, state["best"] - 1)
        for c in range(top):
            if (seen[v] >> c) & 1:
                continue
            assign(v, c)
            done = search(max(used, c + 1), left - 1)
            unassign(v, c)
            if done:
                return True
            top = min(top, state["best"] - 1)
            if c + 1 >= top:
                break
        return False

    # symmetry breaking: the clique takes colors 0..w-1
    for c, v in enumerate(cq.clique):
        assign(v, c)
    try:
        search(len(cq.clique), n - len(cq.clique))
        exact = True
    except _Budget:
        exact = False
    coloring = Coloring.from_labels(state["labels"])
    if exact:
        # a completed search proves optimality even if the clique search was cut short
        lower = coloring.num_colors
    return ChromaticResult(lower, coloring.num_colors, coloring, cq.clique, exact, state["nodes"] + cq.nodes)
