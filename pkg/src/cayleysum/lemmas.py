"""Machine checks of the standalone combinatorial lemmas.

Every checker returns a :class:`LemmaReport` whose ``violations`` counts hard
failures; ``details`` holds (a capped list of) offending cases and ``summary``
holds counts and census data.  Comparisons are exact: irrational bounds are
squared or raised to integer powers before comparing.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .additive import dissociated_ranks, is_dissociated, require_torsion_free, sample_dissociated
from .cliques import find_clique_of_size
from .errors import GroupError
from .graphs import AdjacencyGraph, iter_bits
from .groups import GroupSpec
from .rng import derive_seed, make_rng
from .subsets import SubsetBitmap, restricted_sumset

MAX_DETAILS = 20
CAP_HARD_K = 60


@dataclass
class LemmaReport:
    lemma: str
    checked: int = 0
    violations: int = 0
    summary: dict = field(default_factory=dict)
    details: list = field(default_factory=list)

    def record(self, item: dict) -> None:
        self.violations += 1
        if len(self.details) < MAX_DETAILS:
            self.details.append(item)

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "lemma": self.lemma,
            "checked": self.checked,
            "violations": self.violations,
            "summary": self.summary,
            "details": self.details,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# -- graph helpers on int bitsets -------------------------------------------------


def components(rows: Sequence[int]) -> list:
    """Connected components as bitmasks, ordered by lowest vertex."""
    n = len(rows)
    left = (1 << n) - 1
    out = []
    while left:
        comp = left & -left
        frontier = comp
        while frontier:
            reach = 0
            for v in iter_bits(frontier):
                reach |= rows[v]
            frontier = reach & ~comp
            comp |= frontier
        out.append(comp)
        left &= ~comp
    return out


def spanning_forest(rows: Sequence[int]) -> list:
    """BFS forest, lowest vertex first, returned as (parent, child) edges."""
    n = len(rows)
    seen = 0
    edges = []
    for root in range(n):
        if seen >> root & 1:
            continue
        seen |= 1 << root
        queue = [root]
        for v in queue:
            new = rows[v] & ~seen
            for u in iter_bits(new):
                edges.append((v, u))
                queue.append(u)
            seen |= new
    return edges


def ell_d_bounds_hold(k: int, ell: int, d: int) -> tuple:
    """Both inequalities relating edge count and component count, doubled to stay integral."""
    first = 2 * ell <= (k - d + 1) * (k - d)
    second = 2 * (math.comb(k, 2) - ell) >= (d - 1) * (2 * k - d)
    return first, second


# -- intersection profiles ---------------------------------------------------------


@dataclass(frozen=True)
class IntersectionProfile:
    ell: int  # |E[X] & E[Y]|
    gamma_y: AdjacencyGraph
    d: int
    skeleton: tuple
    order: tuple  # y_1..y_k as ranks
    edge_count: int  # equals ell when Y is dissociated


def intersection_profile(
    g: GroupSpec, X: SubsetBitmap, Y: SubsetBitmap, total_order: Optional[Sequence[int]] = None
) -> IntersectionProfile:
    """Graph on the elements of Y joining y_i, y_j when y_i + y_j lies in E[X].

    ``total_order`` is a permutation of the ranks of G; Y is listed in that
    order (rank order by default).
    """
    if len(X) != len(Y):
        raise ValueError(f"|X| = {len(X)} but |Y| = {len(Y)}")
    ys = Y.ranks
    if total_order is not None:
        pos = np.empty(g.order, dtype=np.int64)
        pos[np.asarray(total_order, dtype=np.int64)] = np.arange(g.order)
        ys = ys[np.argsort(pos[ys], kind="stable")]
    EX = restricted_sumset(g, X)
    adj = EX.mask[g.add_ranks(ys[:, None], ys[None, :])]
    np.fill_diagonal(adj, False)
    gamma = AdjacencyGraph.from_matrix(adj)
    ell = len(EX & restricted_sumset(g, Y))
    d = len(components(gamma.rows))
    return IntersectionProfile(
        ell, gamma, d, tuple(spanning_forest(gamma.rows)), tuple(int(y) for y in ys), gamma.edge_count
    )


# -- lemma: edges versus components -------------------------------------------------


def _random_graph_rows(rng: np.random.Generator, k: int) -> list:
    kind = int(rng.integers(3))
    if kind == 0:
        # Erdos-Renyi with a random density
        p = float(rng.random())
        upper = np.triu(rng.random((k, k)) < p, 1)
        mat = upper | upper.T
    elif kind == 1:
        # disjoint cliques: the extremal shapes for both inequalities
        labels = rng.integers(int(rng.integers(1, k + 1)), size=k)
        mat = labels[:, None] == labels[None, :]
        np.fill_diagonal(mat, False)
    else:
        # disjoint cliques with random edges removed
        labels = rng.integers(int(rng.integers(1, k + 1)), size=k)
        keep = np.triu(rng.random((k, k)) < 0.8, 1)
        mat = (labels[:, None] == labels[None, :]) & (keep | keep.T)
        np.fill_diagonal(mat, False)
    return AdjacencyGraph.from_matrix(mat).rows


def check_ell_d_relation(k_max: int = 64, trials: int = 100_000, seed: int = 0, exhaustive_k: int = 6) -> LemmaReport:
    """Exhaustive over all labelled graphs with k <= exhaustive_k, random up to k_max."""
    if exhaustive_k > 9:
        raise ValueError("exhaustive enumeration limited to k <= 9")
    rep = LemmaReport("ell-d")
    exhaustive = {}
    for k in range(1, min(exhaustive_k, k_max) + 1):
        pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
        count = 0
        for m in range(1 << len(pairs)):
            rows = [0] * k
            ell = 0
            for t, (i, j) in enumerate(pairs):
                if m >> t & 1:
                    rows[i] |= 1 << j
                    rows[j] |= 1 << i
                    ell += 1
            d = len(components(rows))
            a, b = ell_d_bounds_hold(k, ell, d)
            if not (a and b):
                rep.record({"k": k, "edges": m, "ell": ell, "d": d})
            count += 1
        exhaustive[k] = count
        rep.checked += count
    rng = make_rng(seed)
    for _ in range(trials):
        k = int(rng.integers(1, k_max + 1))
        rows = _random_graph_rows(rng, k)
        ell = sum(r.bit_count() for r in rows) // 2
        d = len(components(rows))
        a, b = ell_d_bounds_hold(k, ell, d)
        if not (a and b):
            rep.record({"k": k, "ell": ell, "d": d, "rows": [hex(r) for r in rows]})
        rep.checked += 1
    rep.summary = {"exhaustive_graphs": {str(k): c for k, c in exhaustive.items()}, "random_graphs": trials}
    return rep


# -- lemma: vertices outside every K5 ---------------------------------------------------


def vertices_outside_k5(rows: Sequence[int]) -> int:
    """Bitmask of vertices lying in no K5 (v is in one iff its neighbourhood holds a K4)."""
    out = 0
    for v, r in enumerate(rows):
        if find_clique_of_size(rows, r, 4) is None:
            out |= 1 << v
    return out


def turan_bound_holds(k: int, ell: int, outside: int) -> bool:
    # outside <= 5 sqrt(C(k,2) - ell), squared
    return outside * outside <= 25 * (math.comb(k, 2) - ell)


def _turan_test_graph(rng: np.random.Generator, k: int) -> np.ndarray:
    total = math.comb(k, 2)
    kind = int(rng.integers(3))
    mat = np.ones((k, k), dtype=bool)
    np.fill_diagonal(mat, False)
    if kind == 0:
        # few missing edges: the regime where the bound is below k
        missing = int(rng.integers(0, max(1, k * k // 25) + 1))
    elif kind == 1:
        missing = int(rng.integers(0, total + 1))
    else:
        # complete except for a Turan graph T(|V|, 4) on a random block V, the K5-free extreme
        size = int(rng.integers(5, k + 1)) if k >= 5 and rng.random() < 0.5 else k
        V = rng.choice(k, size=size, replace=False)
        parts = rng.integers(4, size=size)
        same = parts[:, None] == parts[None, :]
        mat[np.ix_(V, V)] = ~same
        return mat
    if missing:
        iu, ju = np.triu_indices(k, 1)
        pick = rng.choice(total, size=missing, replace=False)
        mat[iu[pick], ju[pick]] = False
        mat[ju[pick], iu[pick]] = False
    return mat


def check_turan_consequence(k: int, trials: int = 1000, seed: int = 0) -> LemmaReport:
    """At most 5 sqrt(C(k,2) - ell) vertices of a k-vertex graph avoid every K5."""
    if not 1 <= k <= 40:
        raise ValueError("k must lie in [1, 40]")
    rep = LemmaReport("turan")
    rng = make_rng(derive_seed(seed, k))
    tight = 0
    for _ in range(trials):
        rows = AdjacencyGraph.from_matrix(_turan_test_graph(rng, k)).rows
        ell = sum(r.bit_count() for r in rows) // 2
        outside = vertices_outside_k5(rows).bit_count()
        if not turan_bound_holds(k, ell, outside):
            rep.record({"k": k, "ell": ell, "outside": outside})
        elif outside and outside * outside * 4 > 25 * (math.comb(k, 2) - ell):
            tight += 1  # within a factor 2 of the bound
        rep.checked += 1
    rep.summary = {"k": k, "trials": trials, "within_factor_2": tight}
    return rep


# -- four-element sets with E[Z] inside E[X] ---------------------------------------------

TYPE_I = "TypeI"
TYPE_II = "TypeII"
VIOLATION = "Violation"


@dataclass(frozen=True)
class Z4Classification:
    kind: str
    witness: tuple  # TypeII: (g, x_1..x_4) with z_i = g - x_i; Violation: the six pair sums
    dissociated: bool  # whether Z itself is dissociated


def _check_x(g: GroupSpec, X: SubsetBitmap) -> None:
    require_torsion_free(g, False)
    if not is_dissociated(g, X):
        raise GroupError("X must be dissociated")


def classify_z4(g: GroupSpec, X: SubsetBitmap, Z: Sequence[int]) -> Z4Classification:
    z = np.asarray(sorted(int(v) for v in Z), dtype=np.int64)
    zd = bool(dissociated_ranks(g, z))
    if X.mask[z].all():
        return Z4Classification(TYPE_I, (), zd)
    # z_i = g - x_i with 2g = sum x_i forces 2g = sum z_i; the halving is unique in odd order
    centre = int(g.halve_ranks(g.sum_ranks(z)))
    xs = g.sub_ranks(centre, z)
    if X.mask[xs].all():
        return Z4Classification(TYPE_II, (centre,) + tuple(int(v) for v in xs), zd)
    i, j = np.triu_indices(4, 1)
    return Z4Classification(VIOLATION, tuple(int(s) for s in g.add_ranks(z[i], z[j])), zd)


def _pairs_in(E_mask: np.ndarray, g: GroupSpec, rows: np.ndarray, cand: np.ndarray) -> np.ndarray:
    """For each row of ``rows`` and candidate in ``cand``: all sums with the row's entries lie in E."""
    ok = np.ones(cand.shape, dtype=bool)
    for c in range(rows.shape[1]):
        ok &= E_mask[g.add_ranks(rows[:, c : c + 1], cand)]
    return ok


def _dedupe_sets(rows: np.ndarray) -> np.ndarray:
    rows = np.sort(rows, axis=1)
    distinct = np.all(rows[:, 1:] != rows[:, :-1], axis=1)
    if rows.size == 0:
        return rows
    return np.unique(rows[distinct], axis=0)


def _triangles(g: GroupSpec, E: np.ndarray) -> np.ndarray:
    """All 3-sets {z1,z2,z3} whose three pair sums lie in E, one row each."""
    a, b, c = (m.ravel() for m in np.meshgrid(E, E, E, indexing="ij"))
    # z1 + z2 = a, z1 + z3 = b, z2 + z3 = c
    z1 = g.halve_ranks(g.sub_ranks(g.add_ranks(a, b), c))
    z2 = g.sub_ranks(a, z1)
    z3 = g.sub_ranks(b, z1)
    return _dedupe_sets(np.stack([z1, z2, z3], axis=1))


def _extend(g: GroupSpec, E: np.ndarray, E_mask: np.ndarray, sets: np.ndarray) -> np.ndarray:
    """All one-element extensions keeping every pair sum inside E."""
    if sets.shape[0] == 0:
        return np.empty((0, sets.shape[1] + 1), dtype=np.int64)
    out = []
    chunk = max(1, 200_000 // max(1, E.size))
    for s in range(0, sets.shape[0], chunk):
        rows = sets[s : s + chunk]
        cand = g.sub_ranks(E[None, :], rows[:, :1])  # new element w with z_1 + w in E
        ok = _pairs_in(E_mask, g, rows[:, 1:], cand)
        r, c = np.nonzero(ok)
        out.append(np.concatenate([rows[r], cand[r, c][:, None]], axis=1))
    return _dedupe_sets(np.concatenate(out))


def _z4_sets(g: GroupSpec, X: SubsetBitmap) -> tuple:
    EX = restricted_sumset(g, X)
    E = EX.ranks
    return E, EX.mask, _extend(g, E, EX.mask, _triangles(g, E))


def find_all_z4(g: GroupSpec, X: SubsetBitmap) -> list:
    """Every 4-set Z with E[Z] inside E[X], classified; requires X dissociated."""
    _check_x(g, X)
    if len(X) > 12:
        raise ValueError("find_all_z4 supports |X| <= 12")
    _, _, sets = _z4_sets(g, X)
    return [(tuple(int(v) for v in z), classify_z4(g, X, z)) for z in sets]


def check_k5_lemma(
    g: GroupSpec, k: int, trials: int, seed: int = 0, X_list: Optional[Sequence[SubsetBitmap]] = None
) -> LemmaReport:
    """Dissociated 5-sets Z with E[Z] inside E[X] must lie inside X.

    Samples ``trials`` dissociated k-sets X (or uses ``X_list``), finds all
    4-sets under E[X], classifies them, and extends each by a fifth element.
    """
    require_torsion_free(g, False)
    rep = LemmaReport("k5")
    census = {
        "z4_total": 0,
        "z4_type_i": 0,
        "z4_type_ii": 0,
        "z4_violation": 0,
        "z4_non_dissociated": 0,
        "z5_total": 0,
        "z5_dissociated": 0,
        "type_ii_extended_to_dissociated_z5": 0,
    }
    if X_list is None:
        X_list = [sample_dissociated(g, k, make_rng(derive_seed(seed, t))) for t in range(trials)]
    for X in X_list:
        _check_x(g, X)
        E, E_mask, z4 = _z4_sets(g, X)
        type_ii = set()
        for z in z4:
            cls = classify_z4(g, X, z)
            census["z4_total"] += 1
            census["z4_non_dissociated"] += not cls.dissociated
            if cls.kind == TYPE_I:
                census["z4_type_i"] += 1
            elif cls.kind == TYPE_II:
                census["z4_type_ii"] += 1
                type_ii.add(tuple(int(v) for v in z))
            else:
                census["z4_violation"] += 1
                rep.record({"X": X.ranks.tolist(), "Z": z.tolist(), "kind": VIOLATION, "sums": list(cls.witness)})
        for z in _extend(g, E, E_mask, z4):
            census["z5_total"] += 1
            if not dissociated_ranks(g, z):
                continue
            census["z5_dissociated"] += 1
            zs = tuple(int(v) for v in z)
            if any(tuple(w for w in zs if w != skip) in type_ii for skip in zs):
                census["type_ii_extended_to_dissociated_z5"] += 1
            if not X.mask[z].all():
                rep.record({"X": X.ranks.tolist(), "Z": list(zs), "kind": "Z5 not inside X"})
        rep.checked += 1
    rep.summary = {"group": str(g), "k": k, **census}
    return rep


# -- corollaries on intersecting sumsets ----------------------------------------------------


def _perturbed(g: GroupSpec, X: SubsetBitmap, rng: np.random.Generator, attempts: int = 2000) -> Optional[SubsetBitmap]:
    """A dissociated set differing from X in one or two elements."""
    k = len(X)
    r = X.ranks
    for _ in range(attempts):
        swap = int(rng.integers(1, min(2, k) + 1))
        keep = rng.choice(k, size=k - swap, replace=False)
        outside = np.flatnonzero(~X.mask)
        new = rng.choice(outside, size=swap, replace=False)
        Y = SubsetBitmap.from_ranks(g, np.concatenate([r[keep], new]))
        if is_dissociated(g, Y):
            return Y
    return None


def check_intersection_corollaries(
    g: GroupSpec, k: int, trials: int, seed: int = 0, hard_k: int = CAP_HARD_K
) -> LemmaReport:
    """Overlap of X, Y forced by a large |E[X] & E[Y]|, and the cap on that intersection.

    Half of the pairs are independent samples, half are small perturbations
    of X (where the intersection is large).  Cap violations count as hard
    violations only for k >= ``hard_k``; below that they are recorded in the
    summary.
    """
    require_torsion_free(g, False)
    rep = LemmaReport("cor")
    total = math.comb(k, 2)
    overlap_bad = cap_bad = 0
    max_ell = 0
    cap_cases = []
    for t in range(trials):
        rng = make_rng(derive_seed(seed, t))
        X = sample_dissociated(g, k, rng)
        Y = _perturbed(g, X, rng) if t % 2 else None
        while Y is None or Y == X:
            Y = sample_dissociated(g, k, rng)
        ell = len(restricted_sumset(g, X) & restricted_sumset(g, Y))
        max_ell = max(max_ell, ell)
        common = len(X & Y)
        gap = k - common
        if gap > 0 and gap * gap > 25 * (total - ell):
            overlap_bad += 1
            rep.record({"X": X.ranks.tolist(), "Y": Y.ranks.tolist(), "ell": ell, "common": common, "kind": "overlap"})
        if 2 * ell > 2 * total - k:
            cap_bad += 1
            case = {"X": X.ranks.tolist(), "Y": Y.ranks.tolist(), "ell": ell, "kind": "cap"}
            if k >= hard_k:
                rep.record(case)
            elif len(cap_cases) < MAX_DETAILS:
                cap_cases.append(case)
        rep.checked += 1
    rep.summary = {
        "group": str(g),
        "k": k,
        "overlap_violations": overlap_bad,
        "cap_violations": cap_bad,
        "cap_asserted": k >= hard_k,
        "cap_logged": cap_cases,
        "max_ell": max_ell,
        "ell_cap": total - k / 2,
    }
    return rep


# -- binomial coefficient bounds -------------------------------------------------------------


def _log_binom_table(n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1)
    lg = np.array([math.lgamma(i + 1) for i in range(n_max + 1)])
    table = np.full((n_max + 1, n_max + 1), -np.inf)
    for m in range(n_max + 1):
        table[m, : m + 1] = lg[m] - lg[: m + 1] - lg[m - n[: m + 1]]
    return table


def check_binomial_lemmas(n_max: int = 512, margin: float = 1e-9) -> LemmaReport:
    """Three binomial inequalities over every admissible (n, k[, d]) with n <= n_max.

    The first is checked exactly for every pair.  The two three-parameter
    inequalities are screened in logarithms; any triple whose log margin is
    below ``margin`` (relative) is re-checked with exact integers, so every
    verdict is exact.
    """
    if n_max > 512:
        raise ValueError("n_max is limited to 512")
    rep = LemmaReport("binom")
    comb = math.comb
    lb = _log_binom_table(n_max)
    counts = {"c1": 0, "c2": 0, "c3": 0, "c3_skipped_n_eq_k": 0, "exact_fallbacks": 0}

    for n in range(1, n_max + 1):
        for k in range(1, n + 1):
            # C(2n,k) > 2^(k/2) C(n,k), squared
            if not comb(2 * n, k) ** 2 > (1 << k) * comb(n, k) ** 2:
                rep.record({"lemma": "C.1", "n": n, "k": k})
            counts["c1"] += 1

            d = np.arange(1, k + 1)
            # C(n,d)^k <= k^(dk) C(n,k)^d
            lhs = k * lb[n, 1 : k + 1]
            rhs = d * (k * math.log(k) + lb[n, k])
            close = np.flatnonzero(rhs - lhs <= margin * np.maximum(1.0, np.abs(rhs)))
            for i in close:
                dd = int(d[i])
                counts["exact_fallbacks"] += 1
                if not comb(n, dd) ** k <= k ** (dd * k) * comb(n, k) ** dd:
                    rep.record({"lemma": "C.2", "n": n, "k": k, "d": dd})
            counts["c2"] += k

            if n == k:
                counts["c3_skipped_n_eq_k"] += k
                continue
            # C(n,d) (n-k)^(k-d) <= k^(k-d) C(n,k)
            lhs = lb[n, 1 : k + 1] + (k - d) * math.log(n - k)
            rhs = (k - d) * math.log(k) + lb[n, k]
            close = np.flatnonzero(rhs - lhs <= margin * np.maximum(1.0, np.abs(rhs)))
            for i in close:
                dd = int(d[i])
                counts["exact_fallbacks"] += 1
                if not comb(n, dd) * (n - k) ** (k - dd) <= k ** (k - dd) * comb(n, k):
                    rep.record({"lemma": "C.3", "n": n, "k": k, "d": dd})
            counts["c3"] += k
    rep.checked = counts["c1"] + counts["c2"] + counts["c3"]
    rep.summary = {"n_max": n_max, **counts}
    return rep
