"""Dissociativity, representation counts, additive quadruples and the
clique-count statistic F(k, M) = C(M, k) 2^-C(k, 2), plus the useful-set
pipeline built from them.

Pair counts are *ordered*: ``rep_counts(S)[xi]`` counts pairs ``(x, x')`` with
``x != x'``, both in S, ``x + x' = xi``.  With that convention the number of
additive quadruples is exactly ``sum(rep_counts(S) ** 2)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import InfeasibleError, SizeLimitError, TorsionError
from .groups import GroupSpec
from .rng import make_rng
from .subsets import SubsetBitmap

DISSOCIATIVITY_LIMIT = 64
USEFUL_RETRIES = 64


def require_torsion_free(g: GroupSpec, allow_torsion: bool) -> None:
    if not g.paper_assumption_ok and not allow_torsion:
        raise TorsionError(
            f"{g} has order divisible by 2 or 3; dissociativity arguments do not apply "
            "(pass allow_torsion=True to run anyway)"
        )


# -- dissociativity -----------------------------------------------------------


@dataclass(frozen=True)
class DissociativityVerdict:
    dissociated: bool
    witness: Optional[tuple] = None  # (4-tuple, 4-tuple) of group elements with equal sums

    def __bool__(self) -> bool:
        return self.dissociated


def max_dissociated_size(N: int) -> int:
    """Largest k with C(k+3, 4) <= N.

    A dissociated k-set has C(k+3, 4) distinct 4-fold sums, so no larger set
    can be dissociated in a group of order N.
    """
    k = 0
    while math.comb(k + 4, 4) <= N:
        k += 1
    return k


def is_dissociated(
    g: GroupSpec, X: SubsetBitmap, limit: int = DISSOCIATIVITY_LIMIT, allow_torsion: bool = False
) -> DissociativityVerdict:
    """Exact test that all 4-element multisets from X have distinct sums.

    Sums of 2-multisets are formed once and joined pairwise; equal 4-fold
    sums coming from different multisets are found by sorting.
    """
    require_torsion_free(g, allow_torsion)
    return dissociated_ranks(g, X.ranks, limit)


def dissociated_ranks(g: GroupSpec, r: np.ndarray, limit: int = DISSOCIATIVITY_LIMIT) -> DissociativityVerdict:
    """:func:`is_dissociated` on an array of distinct ranks (no torsion check)."""
    r = np.asarray(r, dtype=np.int64)
    k = int(r.size)
    if k > limit:
        raise SizeLimitError(f"dissociativity check limited to {limit} elements, got {k}")
    if k <= 1:
        return DissociativityVerdict(True)

    pi, pj = np.triu_indices(k)  # 2-multisets {i <= j}
    psum = g.add_ranks(r[pi], r[pj])
    a, b = np.triu_indices(pi.size)  # unordered pairs of 2-multisets
    sums = g.add_ranks(psum[a], psum[b])
    members = np.sort(np.stack([pi[a], pj[a], pi[b], pj[b]], axis=1), axis=1)
    key = ((members[:, 0] * k + members[:, 1]) * k + members[:, 2]) * k + members[:, 3]

    order = np.lexsort((key, sums))
    sums, key, members = sums[order], key[order], members[order]
    distinct = np.ones(sums.size, dtype=bool)
    distinct[1:] = (sums[1:] != sums[:-1]) | (key[1:] != key[:-1])
    sums, key, members = sums[distinct], key[distinct], members[distinct]
    clash = np.flatnonzero(sums[1:] == sums[:-1])
    if clash.size == 0:
        return DissociativityVerdict(True)
    i = int(clash[0])
    first = tuple(g.unrank(int(r[t])) for t in members[i])
    second = tuple(g.unrank(int(r[t])) for t in members[i + 1])
    return DissociativityVerdict(False, (first, second))


def sample_dissociated(
    g: GroupSpec,
    k: int,
    rng: np.random.Generator,
    attempts: int = 2000,
    allow_torsion: bool = False,
) -> SubsetBitmap:
    """Uniformly random dissociated k-subset of G, by rejection.

    Raises :class:`InfeasibleError` when C(k+3, 4) > N (no such set exists) or
    when ``attempts`` draws all fail.
    """
    require_torsion_free(g, allow_torsion)
    if k > max_dissociated_size(g.order):
        raise InfeasibleError(
            f"no dissociated {k}-set exists in {g}: C({k + 3},4) = {math.comb(k + 3, 4)} "
            f"distinct 4-fold sums would be needed but N = {g.order}"
        )
    for _ in range(attempts):
        X = SubsetBitmap.from_ranks(g, rng.choice(g.order, size=k, replace=False))
        if is_dissociated(g, X, allow_torsion=allow_torsion):
            return X
    raise InfeasibleError(f"no dissociated {k}-set of {g} found in {attempts} random draws")


# -- representation counts and quadruples ---------------------------------------


def rep_counts(g: GroupSpec, S: SubsetBitmap) -> np.ndarray:
    """Vector over G of ordered distinct-pair representation counts."""
    r = S.ranks
    N = g.order
    if r.size * r.size <= 4_000_000:
        sums = g.add_ranks(r[:, None], r[None, :]).ravel()
        counts = np.bincount(sums, minlength=N).astype(np.int64)
    else:
        f = S.mask.reshape(g.moduli).astype(float)
        F = np.fft.fftn(f)
        counts = np.rint(np.fft.ifftn(F * F).real).astype(np.int64).ravel()
    # drop the x = x' terms
    counts -= np.bincount(g.add_ranks(r, r), minlength=N).astype(np.int64)
    return counts


def rep_count(g: GroupSpec, S: SubsetBitmap, xi) -> int:
    target = g.rank(xi)
    r = S.ranks
    partner = g.sub_ranks(target, r)
    return int((S.mask[partner] & (partner != r)).sum())


def additive_quadruples(g: GroupSpec, S: SubsetBitmap) -> int:
    """Ordered (s1, s2, s3, s4) in S^4, s1 != s2, s3 != s4, s1 + s2 = s3 + s4."""
    counts = rep_counts(g, S)
    return int(np.dot(counts, counts))


def cross_quadruples(g: GroupSpec, X: SubsetBitmap, S: SubsetBitmap, s_counts=None) -> int:
    """Ordered (x1, x2, s1, s2) in X^2 x S^2 with x1 != x2, s1 != s2, equal sums.

    ``s_counts`` may carry a precomputed ``rep_counts(g, S)``.
    """
    if s_counts is None:
        s_counts = rep_counts(g, S)
    r = X.ranks
    if r.size < 2:
        return 0
    i, j = np.nonzero(~np.eye(r.size, dtype=bool))
    return int(s_counts[g.add_ranks(r[i], r[j])].sum())


def check_lack_of_structure(g: GroupSpec, X: SubsetBitmap, S: SubsetBitmap, budget: float) -> bool:
    """cross_quadruples(X, S) <= budget * |S|, for X a subset of S."""
    if not X.issubset(S):
        raise ValueError("X must be a subset of S")
    if math.isinf(budget) and budget > 0:
        return True
    return cross_quadruples(g, X, S) <= budget * S.size


# -- the statistic F(k, M) --------------------------------------------------------


def clique_stat_exact(M: int, k: int) -> Fraction:
    if not 0 <= k <= M:
        raise ValueError(f"need 0 <= k <= M, got k={k}, M={M}")
    return Fraction(math.comb(M, k), 2 ** math.comb(k, 2))


def clique_stat_log2(M: int, k: int) -> float:
    """log2 F(k, M) through log-gamma."""
    if not 0 <= k <= M:
        raise ValueError(f"need 0 <= k <= M, got k={k}, M={M}")
    if k == 0 or k == M:
        log_binom = 0.0
    else:
        log_binom = (math.lgamma(M + 1) - math.lgamma(k + 1) - math.lgamma(M - k + 1)) / math.log(2)
    return log_binom - k * (k - 1) / 2


def _log2_F(M: int, k: int) -> float:
    # big-integer log2 keeps full double precision at any M
    return math.log2(math.comb(M, k)) - math.comb(k, 2)


def find_clique_size(M: int, D_log2: float, min_M: int = 2**10) -> tuple:
    """Return ``(M', k)`` with D <= F(k, M') <= 2D and M' >= M / 2^10.

    First the largest k in [ceil(log2 M), floor(3 log2 M)] with
    F(k, M) >= M^2 is located (it then satisfies F(k, M) <= M^5).  With k
    fixed, F(k, .) is increasing, so M' is the largest value with
    F(k, M') <= 2D, found by bisection; the same M' the one-step descent
    would stop at.
    """
    if M < min_M:
        raise ValueError(f"M = {M} is below the configured minimum {min_M}")
    lg = math.log2(M)
    if not 0 <= D_log2 <= 2 * lg:
        raise ValueError(f"need 1 <= D <= M^2, got log2 D = {D_log2}")
    k_lo, k_hi = math.ceil(lg), math.floor(3 * lg)
    k = None
    for cand in range(k_hi, k_lo - 1, -1):
        if cand <= M and _log2_F(M, cand) >= 2 * lg:
            k = cand
            break
    if k is None or _log2_F(M, k) > 5 * lg:
        raise InfeasibleError(f"no k in [{k_lo}, {k_hi}] with M^2 <= F(k, M) <= M^5 for M = {M}")

    target = D_log2 + 1
    if _log2_F(M, k) <= target:
        M_prime = M
    else:
        lo, hi = k, M  # F(k, lo) <= 2D < F(k, hi)
        if _log2_F(lo, k) > target:
            raise InfeasibleError(f"F({k}, {k}) already exceeds 2D")
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if _log2_F(mid, k) <= target:
                lo = mid
            else:
                hi = mid
        M_prime = lo
    if _log2_F(M_prime, k) < D_log2:
        raise InfeasibleError(f"descent skipped the window [D, 2D] at M' = {M_prime}, k = {k}")
    if M_prime * 2**10 < M:
        raise InfeasibleError(f"M' = {M_prime} fell below M / 2^10 for M = {M}")
    return M_prime, k


# -- useful sets -----------------------------------------------------------------


@dataclass(frozen=True)
class UsefulParams:
    epsilon: float
    D_target_log2: float
    cardinality_low_log2: float
    cardinality_high_log2: float
    structure_budget: float
    sample_fraction_threshold: float = 0.9
    structure_samples: int = 200
    min_clique_pool: int = 2**10

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if not self.cardinality_low_log2 < self.cardinality_high_log2:
            raise ValueError("cardinality window is empty")

    @classmethod
    def asymptotic_defaults(cls, N: int) -> "UsefulParams":
        """Asymptotic choices evaluated at N (natural logs).  Vacuous at small N."""
        L = math.log(N)
        lg_N, lg_L = math.log2(N), math.log2(L)
        return cls(
            epsilon=min(1.0, 1 / (2 * L**18)),
            D_target_log2=lg_N - 8 * lg_L,
            cardinality_low_log2=lg_N - 20 * lg_L - 12,
            cardinality_high_log2=lg_N - 20 * lg_L,
            structure_budget=1 / L**15,
        )

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "UsefulParams":
        return cls(**json.loads(text))


@dataclass(frozen=True)
class UsefulSetReport:
    subset: SubsetBitmap
    k: int
    cardinality_ok: bool
    clique_size_ok: bool
    structure_ok: bool
    quadruple_count: int
    F_value_log2: float
    params: UsefulParams
    sample_size: int = 0
    retries: int = 0
    structure_fraction: float = field(default=float("nan"))


def quadruple_budget(epsilon: float, s: int) -> float:
    """Twice the expected number of additive quadruples in an epsilon-sample of an s-set."""
    return 2 * (epsilon**4 * s**3 + 2 * epsilon**2 * s**2)


def extract_useful_subset(g: GroupSpec, S: SubsetBitmap, params: UsefulParams, seed: int) -> UsefulSetReport:
    """Sample T from S, shrink it to S' with a good clique size, and report."""
    eps = params.epsilon
    s = S.size
    if s < 2 / eps:
        raise ValueError(f"|S| = {s} is below 2/epsilon = {2 / eps:g}")
    rng = make_rng(seed)
    budget = quadruple_budget(eps, s)
    for attempt in range(USEFUL_RETRIES):
        if eps >= 1:
            T = S
        else:
            T = SubsetBitmap.from_ranks(g, S.ranks[rng.random(s) < eps])
        if 0.5 * eps * s <= T.size <= 1.5 * eps * s and additive_quadruples(g, T) <= budget:
            break
    else:
        raise InfeasibleError(f"no admissible sample in {USEFUL_RETRIES} tries")

    M_prime, k = find_clique_size(T.size, params.D_target_log2 - 1, min_M=params.min_clique_pool)
    keep = np.sort(rng.choice(T.ranks, size=M_prime, replace=False))
    S_prime = SubsetBitmap.from_ranks(g, keep)
    F_log2 = _log2_F(M_prime, k)

    s_counts = rep_counts(g, S_prime)
    hits = 0
    n_samples = params.structure_samples if k <= M_prime else 0
    for _ in range(n_samples):
        X = SubsetBitmap.from_ranks(g, rng.choice(S_prime.ranks, size=k, replace=False))
        if cross_quadruples(g, X, S_prime, s_counts) <= params.structure_budget * M_prime:
            hits += 1
    fraction = hits / n_samples if n_samples else float("nan")

    lg_size = math.log2(M_prime)
    return UsefulSetReport(
        subset=S_prime,
        k=k,
        cardinality_ok=params.cardinality_low_log2 < lg_size <= params.cardinality_high_log2,
        clique_size_ok=params.D_target_log2 - 1 < F_log2 <= params.D_target_log2,
        structure_ok=bool(n_samples) and fraction >= params.sample_fraction_threshold,
        quadruple_count=int(np.dot(s_counts, s_counts)),
        F_value_log2=F_log2,
        params=params,
        sample_size=T.size,
        retries=attempt,
        structure_fraction=fraction,
    )
