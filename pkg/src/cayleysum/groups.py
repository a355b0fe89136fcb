"""Finite abelian groups given as products of cyclic factors.

Elements are residue tuples.  Every element also has an integer *rank* in
``[0, N)``: the mixed-radix index with the last factor varying fastest (the
same convention as :func:`numpy.ravel_multi_index`).  All bitmaps, graphs and
spectra in the package are indexed by rank.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import GroupError, SizeLimitError

DEFAULT_SIZE_LIMIT = 2**20

GroupElement = tuple
ElementLike = Union[int, Sequence[int]]

_FACTOR_RE = re.compile(r"z(\d+)(?:\^(\d+))?")


@dataclass(frozen=True)
class GroupSpec:
    """Z/n1 x ... x Z/nm.  Build with :func:`make_group`."""

    moduli: tuple
    order: int = field(init=False)
    paper_assumption_ok: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "order", math.prod(self.moduli))
        object.__setattr__(self, "paper_assumption_ok", math.gcd(self.order, 6) == 1)

    # aliases read more naturally at call sites
    @property
    def N(self) -> int:
        return self.order

    @property
    def rank_count(self) -> int:
        return len(self.moduli)

    @property
    def is_cyclic_prime(self) -> bool:
        return len(self.moduli) == 1 and is_prime(self.moduli[0])

    def __str__(self) -> str:
        return format_group(self)

    # -- scalar element API -------------------------------------------------

    def element(self, x: ElementLike) -> GroupElement:
        """Coerce ``x`` to a reduced residue tuple.

        A bare int is accepted only for cyclic groups.
        """
        if isinstance(x, (int, np.integer)):
            if len(self.moduli) != 1:
                raise GroupError(f"integer element {x} given for non-cyclic group {self}")
            return (int(x) % self.moduli[0],)
        x = tuple(int(v) for v in x)
        if len(x) != len(self.moduli):
            raise GroupError(f"element {x} has {len(x)} residues, group {self} has {len(self.moduli)}")
        return tuple(v % n for v, n in zip(x, self.moduli))

    def identity(self) -> GroupElement:
        return (0,) * len(self.moduli)

    def add(self, a: ElementLike, b: ElementLike) -> GroupElement:
        a, b = self.element(a), self.element(b)
        return tuple((u + v) % n for u, v, n in zip(a, b, self.moduli))

    def neg(self, a: ElementLike) -> GroupElement:
        return tuple((-u) % n for u, n in zip(self.element(a), self.moduli))

    def scalar_mul(self, c: int, a: ElementLike) -> GroupElement:
        return tuple((c * u) % n for u, n in zip(self.element(a), self.moduli))

    def rank(self, a: ElementLike) -> int:
        r = 0
        for u, n in zip(self.element(a), self.moduli):
            r = r * n + u
        return r

    def unrank(self, i: int) -> GroupElement:
        if not 0 <= i < self.order:
            raise GroupError(f"rank {i} out of range for group of order {self.order}")
        out = []
        for n in reversed(self.moduli):
            i, u = divmod(i, n)
            out.append(u)
        return tuple(reversed(out))

    def elements(self) -> Iterable[GroupElement]:
        return (self.unrank(i) for i in range(self.order))

    def character_value(self, gamma: ElementLike, x: ElementLike) -> complex:
        """exp(2 pi i * sum_j gamma_j x_j / n_j)."""
        gamma, x = self.element(gamma), self.element(x)
        # exact phase mod 1 before going to floating point
        phase = sum(Fraction(gj * xj % n, n) for gj, xj, n in zip(gamma, x, self.moduli)) % 1
        return cmath.exp(2j * math.pi * float(phase))

    # -- vectorised rank arithmetic ----------------------------------------

    def residues_of(self, ranks) -> np.ndarray:
        """Array of shape ``(len(ranks), m)`` of residues."""
        ranks = np.asarray(ranks, dtype=np.int64)
        cols = np.unravel_index(ranks, self.moduli)
        return np.stack(cols, axis=-1)

    def ranks_of(self, residues) -> np.ndarray:
        residues = np.asarray(residues, dtype=np.int64)
        mods = np.asarray(self.moduli, dtype=np.int64)
        residues = residues % mods
        return np.ravel_multi_index(tuple(np.moveaxis(residues, -1, 0)), self.moduli).astype(np.int64)

    def add_ranks(self, a, b) -> np.ndarray:
        """Rank of a + b, broadcasting over rank arrays."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if len(self.moduli) == 1:
            return (a + b) % self.order
        ra, rb = self.residues_of(a), self.residues_of(b)
        return self.ranks_of(ra + rb)

    def sub_ranks(self, a, b) -> np.ndarray:
        return self.add_ranks(a, self.neg_ranks(b))

    def neg_ranks(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if len(self.moduli) == 1:
            return (-a) % self.order
        return self.ranks_of(-self.residues_of(a))

    def scale_ranks(self, c: int, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if len(self.moduli) == 1:
            return (c * a) % self.order
        return self.ranks_of(c * self.residues_of(a))

    def sum_ranks(self, ranks, axis=-1) -> np.ndarray:
        """Group sum along ``axis`` of an array of ranks."""
        ranks = np.asarray(ranks, dtype=np.int64)
        if len(self.moduli) == 1:
            return ranks.sum(axis=axis) % self.order
        res = self.residues_of(ranks)
        ax = axis if axis >= 0 else axis - 1
        return self.ranks_of(res.sum(axis=ax))

    def halve_ranks(self, a) -> np.ndarray:
        """The unique h with 2h = a.  Needs every modulus odd."""
        if any(n % 2 == 0 for n in self.moduli):
            raise GroupError(f"halving is not defined in {self} (2-torsion)")
        a = np.asarray(a, dtype=np.int64)
        if len(self.moduli) == 1:
            return (a * ((self.order + 1) // 2)) % self.order
        res = self.residues_of(a)
        inv2 = np.asarray([(n + 1) // 2 for n in self.moduli], dtype=np.int64)
        return self.ranks_of(res * inv2)

    def add_table(self) -> np.ndarray:
        """N x N table of rank sums.  Only sensible for modest N."""
        idx = np.arange(self.order, dtype=np.int64)
        return self.add_ranks(idx[:, None], idx[None, :])


def make_group(moduli: Sequence[int], limit: int = DEFAULT_SIZE_LIMIT) -> GroupSpec:
    moduli = tuple(int(n) for n in moduli)
    if not moduli:
        raise GroupError("a group needs at least one cyclic factor")
    if any(n < 2 for n in moduli):
        raise GroupError(f"every modulus must be >= 2, got {moduli}")
    order = math.prod(moduli)
    if order > limit:
        raise SizeLimitError(f"group order {order} exceeds the size limit {limit}")
    return GroupSpec(moduli)


def parse_group(text: str, limit: int = DEFAULT_SIZE_LIMIT) -> GroupSpec:
    """Parse ``"Z7"``, ``"Z5xZ25"`` or ``"Z2^4"`` (case-insensitive, no spaces)."""
    if not text or any(ch.isspace() for ch in text):
        raise GroupError(f"bad group spec {text!r}")
    moduli = []
    for part in text.lower().split("x"):
        m = _FACTOR_RE.fullmatch(part)
        if m is None:
            raise GroupError(f"bad group factor {part!r} in {text!r}")
        n = int(m.group(1))
        reps = int(m.group(2)) if m.group(2) else 1
        if reps < 1:
            raise GroupError(f"bad exponent in {text!r}")
        moduli.extend([n] * reps)
    return make_group(moduli, limit=limit)


def format_group(g: GroupSpec) -> str:
    parts = []
    i = 0
    mods = g.moduli
    while i < len(mods):
        j = i
        while j < len(mods) and mods[j] == mods[i]:
            j += 1
        parts.append(f"Z{mods[i]}" + (f"^{j - i}" if j - i > 1 else ""))
        i = j
    return "x".join(parts)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prev_prime(n: int) -> int:
    """Largest prime <= n."""
    while n >= 2 and not is_prime(n):
        n -= 1
    if n < 2:
        raise ValueError("no prime below 2")
    return n
