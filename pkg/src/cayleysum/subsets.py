"""Subsets of a finite abelian group and restricted sumsets."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import GroupError
from .groups import ElementLike, GroupSpec, is_prime
from .rng import random_bits


@dataclass(frozen=True, eq=False)
class SubsetBitmap:
    """Membership vector over G indexed by element rank.

    ``mask`` is a read-only boolean array; ``bits`` is the same set packed into
    a Python int (bit ``i`` = rank ``i``) for bit-parallel work.
    """

    group: GroupSpec
    mask: np.ndarray
    size: int = field(init=False)

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.shape != (self.group.order,):
            raise GroupError(f"mask of shape {mask.shape} does not match group order {self.group.order}")
        mask = mask.copy()
        mask.flags.writeable = False
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "size", int(mask.sum()))

    # -- constructors -------------------------------------------------------

    @classmethod
    def empty(cls, g: GroupSpec) -> "SubsetBitmap":
        return cls(g, np.zeros(g.order, dtype=bool))

    @classmethod
    def full(cls, g: GroupSpec) -> "SubsetBitmap":
        return cls(g, np.ones(g.order, dtype=bool))

    @classmethod
    def from_ranks(cls, g: GroupSpec, ranks: Iterable[int]) -> "SubsetBitmap":
        mask = np.zeros(g.order, dtype=bool)
        ranks = np.fromiter((int(r) for r in ranks), dtype=np.int64)
        if ranks.size and (ranks.min() < 0 or ranks.max() >= g.order):
            raise GroupError("rank out of range")
        mask[ranks] = True
        return cls(g, mask)

    @classmethod
    def from_elements(cls, g: GroupSpec, elements: Iterable[ElementLike]) -> "SubsetBitmap":
        return cls.from_ranks(g, (g.rank(x) for x in elements))

    @classmethod
    def from_bits(cls, g: GroupSpec, bits: int) -> "SubsetBitmap":
        if bits < 0 or bits >> g.order:
            raise GroupError("bit vector longer than the group")
        raw = bits.to_bytes((g.order + 7) // 8, "little")
        mask = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[: g.order]
        return cls(g, mask.astype(bool))

    # -- views --------------------------------------------------------------

    @cached_property
    def bits(self) -> int:
        packed = np.packbits(self.mask, bitorder="little")
        return int.from_bytes(packed.tobytes(), "little")

    @cached_property
    def ranks(self) -> np.ndarray:
        r = np.flatnonzero(self.mask).astype(np.int64)
        r.flags.writeable = False
        return r

    def elements(self) -> list:
        return [self.group.unrank(int(r)) for r in self.ranks]

    def __len__(self) -> int:
        return self.size

    def __contains__(self, x) -> bool:
        r = x if isinstance(x, (int, np.integer)) and len(self.group.moduli) == 1 else self.group.rank(x)
        return bool(self.mask[int(r) % self.group.order])

    def __iter__(self):
        return iter(int(r) for r in self.ranks)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SubsetBitmap):
            return NotImplemented
        return self.group == other.group and np.array_equal(self.mask, other.mask)

    def __hash__(self) -> int:
        return hash((self.group, self.bits))

    def __repr__(self) -> str:
        shown = list(self.ranks[:12])
        more = ", ..." if self.size > 12 else ""
        return f"SubsetBitmap({self.group}, size={self.size}, ranks={shown}{more})"

    # -- set algebra --------------------------------------------------------

    def _check(self, other: "SubsetBitmap") -> None:
        if other.group != self.group:
            raise GroupError("subsets live in different groups")

    def complement(self) -> "SubsetBitmap":
        return SubsetBitmap(self.group, ~self.mask)

    def __or__(self, other):
        self._check(other)
        return SubsetBitmap(self.group, self.mask | other.mask)

    def __and__(self, other):
        self._check(other)
        return SubsetBitmap(self.group, self.mask & other.mask)

    def __sub__(self, other):
        self._check(other)
        return SubsetBitmap(self.group, self.mask & ~other.mask)

    def __xor__(self, other):
        self._check(other)
        return SubsetBitmap(self.group, self.mask ^ other.mask)

    def issubset(self, other: "SubsetBitmap") -> bool:
        self._check(other)
        return not bool((self.mask & ~other.mask).any())

    def toggle(self, rank: int) -> "SubsetBitmap":
        """The set with membership of ``rank`` flipped (A symmetric-difference {g})."""
        mask = self.mask.copy()
        mask[rank] = not mask[rank]
        return SubsetBitmap(self.group, mask)

    # -- serialisation --------------------------------------------------------

    def to_hex(self) -> str:
        """``"N=<int>;<hex>"``; least significant bit is rank 0."""
        width = max(1, (self.group.order + 3) // 4)
        return f"N={self.group.order};{self.bits:0{width}x}"

    @classmethod
    def from_hex(cls, g: GroupSpec, text: str) -> "SubsetBitmap":
        head, sep, body = text.strip().partition(";")
        if not sep or not head.lower().startswith("n="):
            raise GroupError(f"subset literal must look like 'N=<int>;<hex>', got {text[:40]!r}")
        n = int(head[2:])
        if n != g.order:
            raise GroupError(f"subset literal is for N={n}, group has N={g.order}")
        return cls.from_bits(g, int(body, 16) if body else 0)


def random_subset(g: GroupSpec, seed: int) -> SubsetBitmap:
    """Each element kept independently with probability 1/2 (see :mod:`cayleysum.rng`)."""
    return SubsetBitmap(g, random_bits(seed, g.order))


def paley_set(g: GroupSpec) -> SubsetBitmap:
    """Nonzero quadratic residues of Z/p, p an odd prime."""
    if len(g.moduli) != 1 or not is_prime(g.order) or g.order == 2:
        raise GroupError(f"the Paley set needs a cyclic group of odd prime order, got {g}")
    p = g.order
    x = np.arange(1, p, dtype=np.int64)
    return SubsetBitmap.from_ranks(g, (x * x) % p)


def parse_subset(g: GroupSpec, text: str) -> SubsetBitmap:
    """CLI subset literal: hex ``N=..;..``, ``@file``, ``random:<seed>`` or ``paley``."""
    text = text.strip()
    low = text.lower()
    if low == "paley":
        return paley_set(g)
    if low.startswith("random:"):
        return random_subset(g, int(text.split(":", 1)[1], 0))
    if text.startswith("@"):
        return SubsetBitmap.from_hex(g, Path(text[1:]).read_text())
    return SubsetBitmap.from_hex(g, text)


def restricted_sumset(g: GroupSpec, X: SubsetBitmap) -> SubsetBitmap:
    """E[X] = {x + x' : x, x' in X, x != x'}."""
    r = X.ranks
    if r.size < 2:
        return SubsetBitmap.empty(g)
    i, j = np.triu_indices(r.size, k=1)
    return SubsetBitmap.from_ranks(g, np.unique(g.add_ranks(r[i], r[j])))


def is_clique_for(g: GroupSpec, A: SubsetBitmap, X: SubsetBitmap) -> bool:
    """True iff E[X] is contained in A."""
    r = X.ranks
    if r.size < 2:
        return True
    i, j = np.triu_indices(r.size, k=1)
    return bool(A.mask[g.add_ranks(r[i], r[j])].all())
