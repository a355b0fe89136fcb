"""Dense simple graphs stored as bit rows, and the Cayley sum graph."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import GroupError
from .groups import GroupSpec
from .subsets import SubsetBitmap

DEFAULT_GRAPH_LIMIT = 2**14


def iter_bits(x: int):
    """Indices of set bits of ``x``, lowest first."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def pack_bool_rows(mat: np.ndarray) -> list:
    packed = np.packbits(mat, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


@dataclass(frozen=True)
class AdjacencyGraph:
    """Simple undirected graph on vertices ``0..n-1``.

    ``rows[i]`` is an int whose bit ``j`` is set iff ``{i, j}`` is an edge.
    """

    n: int
    rows: tuple
    edge_count: int = field(init=False)

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise ValueError(f"{len(self.rows)} rows for {self.n} vertices")
        object.__setattr__(self, "rows", tuple(int(r) for r in self.rows))
        total = sum(r.bit_count() for r in self.rows)
        object.__setattr__(self, "edge_count", total // 2)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "AdjacencyGraph":
        rows = [0] * n
        for i, j in edges:
            if i == j:
                raise ValueError("loops are not allowed")
            rows[i] |= 1 << j
            rows[j] |= 1 << i
        return cls(n, tuple(rows))

    @classmethod
    def from_matrix(cls, mat) -> "AdjacencyGraph":
        mat = np.asarray(mat, dtype=bool)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("adjacency matrix must be square")
        if not np.array_equal(mat, mat.T) or mat.diagonal().any():
            raise ValueError("adjacency matrix must be symmetric with zero diagonal")
        return cls(mat.shape[0], tuple(pack_bool_rows(mat)))

    @classmethod
    def complete(cls, n: int) -> "AdjacencyGraph":
        full = (1 << n) - 1
        return cls(n, tuple(full & ~(1 << i) for i in range(n)))

    @classmethod
    def empty(cls, n: int) -> "AdjacencyGraph":
        return cls(n, (0,) * n)

    @classmethod
    def cycle(cls, n: int) -> "AdjacencyGraph":
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    def has_edge(self, i: int, j: int) -> bool:
        return bool((self.rows[i] >> j) & 1)

    def degree(self, i: int) -> int:
        return self.rows[i].bit_count()

    def neighbors(self, i: int) -> list:
        return list(iter_bits(self.rows[i]))

    def edges(self):
        for i, row in enumerate(self.rows):
            for j in iter_bits(row >> (i + 1)):
                yield i, i + 1 + j

    @property
    def all_mask(self) -> int:
        return (1 << self.n) - 1

    def complement(self) -> "AdjacencyGraph":
        full = self.all_mask
        return AdjacencyGraph(self.n, tuple(full & ~r & ~(1 << i) for i, r in enumerate(self.rows)))

    def to_matrix(self) -> np.ndarray:
        width = (self.n + 7) // 8
        buf = np.frombuffer(b"".join(r.to_bytes(width, "little") for r in self.rows), dtype=np.uint8)
        return np.unpackbits(buf.reshape(self.n, width), axis=1, bitorder="little")[:, : self.n].astype(bool)

    def is_symmetric(self) -> bool:
        mat = self.to_matrix()
        return bool(np.array_equal(mat, mat.T)) and not mat.diagonal().any()


def build_cayley_sum_graph(g: GroupSpec, A: SubsetBitmap, limit: int = DEFAULT_GRAPH_LIMIT) -> AdjacencyGraph:
    """x ~ y iff x != y and x + y in A.  Vertices are element ranks."""
    if A.group != g:
        raise GroupError("subset is over a different group")
    if g.order > limit:
        raise GroupError(f"graph on {g.order} vertices exceeds the limit {limit}")
    n = g.order
    idx = np.arange(n, dtype=np.int64)
    rows = []
    block = max(1, (1 << 22) // n)
    for start in range(0, n, block):
        stop = min(n, start + block)
        sums = g.add_ranks(idx[start:stop, None], idx[None, :])
        mat = A.mask[sums]
        mat[np.arange(stop - start), np.arange(start, stop)] = False
        rows.extend(pack_bool_rows(mat))
    return AdjacencyGraph(n, tuple(rows))
