"""Fourier analysis of indicator functions on G.

Coefficients use the normalisation 1_A^(gamma) = E_x 1_A(x) conj(gamma(x)),
indexed by character rank (characters are labelled by residue tuples exactly
like group elements).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SizeLimitError
from .groups import DEFAULT_SIZE_LIMIT, GroupSpec
from .subsets import SubsetBitmap


@dataclass(frozen=True, eq=False)
class FourierSpectrum:
    group: GroupSpec
    coeffs: np.ndarray  # complex, length N

    def __getitem__(self, gamma) -> complex:
        return complex(self.coeffs[self.group.rank(gamma)])

    def parseval_error(self, set_size: int) -> float:
        return abs(float(np.sum(np.abs(self.coeffs) ** 2)) - set_size / self.group.order)

    def inverse(self) -> np.ndarray:
        """Reconstruct the function on G (real part), ranks as index."""
        shaped = self.coeffs.reshape(self.group.moduli)
        return (np.fft.ifftn(shaped) * self.group.order).real.ravel()


def dft_indicator(g: GroupSpec, A: SubsetBitmap, limit: int = DEFAULT_SIZE_LIMIT) -> FourierSpectrum:
    """All N coefficients of 1_A, one transform axis per cyclic factor."""
    if g.order > limit:
        raise SizeLimitError(f"transform of size {g.order} exceeds the limit {limit}")
    # numpy's forward transform sums f(x) exp(-2 pi i <gamma, x>), i.e. N * coefficient
    shaped = A.mask.reshape(g.moduli).astype(float)
    coeffs = np.fft.fftn(shaped).ravel() / g.order
    coeffs.flags.writeable = False
    return FourierSpectrum(g, coeffs)


def dft_direct(g: GroupSpec, f) -> np.ndarray:
    """O(N^2) character sum E_x f(x) conj(gamma(x)); reference for small N."""
    f = np.asarray(f, dtype=complex)
    res = g.residues_of(np.arange(g.order))
    mods = np.asarray(g.moduli, dtype=np.int64)
    # phase[gamma, x] = sum_j gamma_j x_j / n_j  (mod 1), exact integer numerators per factor
    phase = np.zeros((g.order, g.order))
    for j, n in enumerate(mods):
        phase += np.outer(res[:, j], res[:, j]) % n / n
    return np.exp(-2j * np.pi * phase) @ f / g.order


def sup_nontrivial(spectrum: FourierSpectrum) -> tuple:
    """(max |coefficient| over gamma != 0, first maximising character)."""
    g = spectrum.group
    mags = np.abs(spectrum.coeffs[1:])
    i = int(np.argmax(mags))
    return float(mags[i]), g.unrank(i + 1)


def pseudo_eta(g: GroupSpec, A: SubsetBitmap, spectrum: FourierSpectrum = None) -> float:
    """-log_N of the largest nontrivial coefficient; ``math.inf`` if it vanishes."""
    if spectrum is None:
        spectrum = dft_indicator(g, A)
    sup, _ = sup_nontrivial(spectrum)
    if sup <= 1e-12:
        return math.inf
    return -math.log(sup) / math.log(g.order)


def paley_sup_bound(p: int) -> float:
    """(sqrt(p) + 1) / (2p): Gauss sums have modulus sqrt(p)."""
    return (math.sqrt(p) + 1) / (2 * p)


def random_sup_bound(N: int) -> float:
    return 4 * math.sqrt(math.log(N) / N)
