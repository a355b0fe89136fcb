"""Seeding conventions.

Two fixed, portable algorithms are used everywhere:

* SplitMix64 mixes a master seed with integer indices into a child seed
  (:func:`derive_seed`).  Trial ``j`` of group ``i`` in a sweep uses
  ``derive_seed(master, i, j)``.
* Random bits come from the raw output words of NumPy's PCG64 bit generator
  (:func:`random_bits`), whose stream is fixed by the PCG64 definition and does
  not depend on NumPy's distribution code.  Other sampling goes through
  ``numpy.random.Generator(PCG64(seed))``.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, *indices: int) -> int:
    """Stable 64-bit child seed for ``(master, i1, i2, ...)``."""
    h = splitmix64(int(master) & MASK64)
    for i in indices:
        h = splitmix64(h ^ (int(i) & MASK64))
    return h


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & MASK64))


def random_bits(seed: int, n: int) -> np.ndarray:
    """``n`` fair bits: bit ``i`` is bit ``i % 64`` of raw PCG64 word ``i // 64``."""
    words = np.random.PCG64(int(seed) & MASK64).random_raw((n + 63) // 64)
    words = np.asarray(words, dtype="<u8")
    bits = np.unpackbits(words.view(np.uint8), bitorder="little")
    return bits[:n].astype(bool)
