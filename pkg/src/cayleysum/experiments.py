"""Seeded experiment harness: chromatic sweeps, group comparison, Lipschitz and Paley audits.

Trial seeds are ``derive_seed(master_seed, group_index, trial_index)`` (a
SplitMix64 chain, see :mod:`cayleysum.rng`), so every row is reproducible on
its own.  Rows are emitted in (group, trial, algo) order whatever the number of
worker processes.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Optional, Sequence

from .cliques import clique_number
from .coloring import (
    EXACT_LIMIT,
    dsatur_coloring,
    exact_chromatic_number,
    greedy_coloring,
    verify_coloring,
)
from .graphs import build_cayley_sum_graph
from .groups import GroupSpec, format_group, is_prime, make_group, parse_group
from .packing import clique_packing
from .partition import clique_partition_coloring, fourier_greedy_coloring
from .rng import derive_seed
from .spectral import dft_indicator, paley_sup_bound, pseudo_eta, sup_nontrivial
from .subsets import SubsetBitmap, paley_set, random_subset

ALGORITHMS = ("exact", "greedy", "clique-partition", "fourier-greedy")
PALEY_RTOL = 1e-12  # the Paley bound is attained for p = 1 mod 4


@dataclass
class SweepConfig:
    groups: list = field(default_factory=list)
    trials_per_group: int = 1
    master_seed: int = 0
    algorithms: list = field(default_factory=lambda: ["greedy"])
    node_limit: Optional[int] = 2_000_000
    time_limit: Optional[float] = None
    exact_limit: int = EXACT_LIMIT
    override_exact: bool = False
    omega_limit: int = EXACT_LIMIT  # exact omega of the complement only up to this N
    timing: bool = False
    workers: int = 1
    output: Optional[str] = None

    def __post_init__(self):
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ValueError(f"unknown algorithms {bad}; choose from {list(ALGORITHMS)}")
        if self.trials_per_group < 0:
            raise ValueError("trials_per_group must be non-negative")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")

    @classmethod
    def from_json(cls, text: str) -> "SweepConfig":
        data = json.loads(text)
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys {sorted(extra)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


@dataclass(frozen=True)
class SweepRow:
    group: str
    N: int
    seed: int
    algo: str
    chi_or_bound: int
    valid: bool
    omega_complement: Optional[int]
    lower_bound: Optional[int]
    ratio: float
    elapsed_ms: Optional[float]
    flags: str

    def as_csv_fields(self) -> list:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, bool):
                return "true" if v else "false"
            if isinstance(v, float):
                return f"{v:.6f}"
            return str(v)

        return [fmt(getattr(self, f.name)) for f in fields(self)]


CSV_HEADER = [f.name for f in fields(SweepRow)]


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.as_csv_fields())
    return buf.getvalue()


def chi_ratio(chi: int, N: int) -> float:
    """chi * 2 log2 N / N; the target is 1 asymptotically."""
    return chi * 2 * math.log2(N) / N if N > 1 else float(chi)


def _color(algo: str, g: GroupSpec, A: SubsetBitmap, graph, cfg: SweepConfig) -> tuple:
    flags = []
    if algo == "exact":
        res = exact_chromatic_number(
            graph,
            node_limit=cfg.node_limit,
            time_limit=cfg.time_limit,
            exact_limit=cfg.exact_limit,
            override=cfg.override_exact,
        )
        if not res.exact:
            flags.append(f"inexact:lower={res.lower}")
        return res.coloring, flags
    if algo == "greedy":
        return greedy_coloring(graph), flags
    if algo == "clique-partition":
        _, col = clique_partition_coloring(g, A, graph=graph)
        return col, flags
    if algo == "fourier-greedy":
        return fourier_greedy_coloring(g, A), flags
    raise ValueError(f"unknown algorithm {algo!r}")


def _trial(args) -> list:
    gtext, seed, cfg = args
    g = parse_group(gtext)
    A = random_subset(g, seed)
    graph = build_cayley_sum_graph(g, A)
    N = g.order
    base_flags = [] if g.paper_assumption_ok else ["torsion"]
    omega = lower = None
    if N <= cfg.omega_limit:
        cq = clique_number(graph.complement(), node_limit=cfg.node_limit, time_limit=cfg.time_limit)
        if cq.exact:
            omega = cq.omega
            lower = -(-N // omega)
        else:
            base_flags.append(f"omega-inexact:{cq.omega}-{cq.upper}")
    else:
        base_flags.append("omega-skipped")
    rows = []
    for algo in cfg.algorithms:
        t0 = time.perf_counter()
        col, flags = _color(algo, g, A, graph, cfg)
        ms = (time.perf_counter() - t0) * 1000.0
        valid = verify_coloring(graph, col)
        rows.append(
            SweepRow(
                format_group(g),
                N,
                seed,
                algo,
                col.num_colors,
                valid,
                omega,
                lower,
                chi_ratio(col.num_colors, N),
                ms if cfg.timing else None,
                ";".join(base_flags + flags),
            )
        )
    return rows


def _run_tasks(tasks: list, workers: int) -> list:
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            # map yields in submission order, so output order is fixed
            results = list(ex.map(_trial, tasks))
    else:
        results = [_trial(t) for t in tasks]
    return [row for rows in results for row in rows]


def run_sweep(config: SweepConfig) -> list:
    """One row per (group, trial, algo); writes CSV to ``config.output`` when set."""
    parsed = [parse_group(s) for s in config.groups]
    if "exact" in config.algorithms and not config.override_exact:
        big = [format_group(g) for g in parsed if g.order > config.exact_limit]
        if big:
            raise ValueError(f"exact coloring limited to N <= {config.exact_limit}: {big}")
    tasks = [
        (format_group(g), derive_seed(config.master_seed, gi, ti), config)
        for gi, g in enumerate(parsed)
        for ti in range(config.trials_per_group)
    ]
    rows = _run_tasks(tasks, config.workers)
    if config.output:
        with open(config.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(rows_to_csv(rows))
    return rows


# -- Z2^n against a cyclic group of prime order near 2^n ---------------------------------


def run_group_comparison(ns: Sequence[int] = (10,), trials: int = 10, seed: int = 0, timing: bool = False) -> dict:
    """Fourier-greedy colorings of Z2^n and Z/p (p the largest prime below 2^n) with shared seeds.

    Observational only; no direction of the difference is asserted.
    """
    from .groups import prev_prime

    rows = []
    for n in ns:
        if not 1 <= n <= 12:
            raise ValueError("n must lie in [1, 12] (N <= 4096)")
        pair = [f"Z2^{n}", f"Z{prev_prime(2**n)}"]
        cfg = SweepConfig(groups=pair, trials_per_group=trials, master_seed=seed, algorithms=["fourier-greedy"], timing=timing)
        # both families share the trial seed (group index fixed at n)
        tasks = [(gt, derive_seed(seed, n, t), cfg) for t in range(trials) for gt in pair]
        rows.extend(_run_tasks(tasks, 1))
    means = {}
    for r in rows:
        means.setdefault(r.group, []).append(r.chi_or_bound)
    violations = sum(
        (not r.valid) + (r.lower_bound is not None and r.chi_or_bound < r.lower_bound) for r in rows
    )
    return {
        "rows": rows,
        "mean_colors": {k: sum(v) / len(v) for k, v in means.items()},
        "violations": violations,
    }


# -- Lipschitz property of the packing number ------------------------------------------------


def run_lipschitz_check(N: int = 11, k: int = 3, trials: int = 50, seed: int = 0) -> dict:
    """Toggle every element of random A and compare exact packing numbers."""
    if N > 12 or k != 3:
        raise ValueError("Lipschitz check runs in the exact regime N <= 12, k = 3")
    g = make_group((N,))
    max_delta = 0
    violations = 0
    dist = {}
    inexact = 0
    cases = []
    for t in range(trials):
        A = random_subset(g, derive_seed(seed, t))
        base = clique_packing(g, A, k, mode="exact")
        inexact += not base.exact
        dist[base.value] = dist.get(base.value, 0) + 1
        for v in range(N):
            other = clique_packing(g, A.toggle(v), k, mode="exact")
            inexact += not other.exact
            delta = abs(other.value - base.value)
            max_delta = max(max_delta, delta)
            if delta > 1:
                violations += 1
                if len(cases) < 20:
                    cases.append({"A": A.to_hex(), "toggle": v, "f": base.value, "f_toggled": other.value})
    return {
        "N": N,
        "k": k,
        "trials": trials,
        "checked": trials * N,
        "max_delta": max_delta,
        "violations": violations,
        "inexact": inexact,
        "f_distribution": {str(key): dist[key] for key in sorted(dist)},
        "details": cases,
    }


# -- Paley sets -----------------------------------------------------------------------------


def run_paley_audit(primes: Sequence[int], node_limit: Optional[int] = 2_000_000, exact_limit: int = EXACT_LIMIT) -> dict:
    seen = []
    for p in primes:
        if not is_prime(p) or p == 2:
            raise ValueError(f"{p} is not an odd prime")
        if p not in seen:
            seen.append(p)
    rows = []
    violations = 0
    for p in seen:
        g = make_group((p,))
        Q = paley_set(g)
        spec = dft_indicator(g, Q)
        sup, _ = sup_nontrivial(spec)
        eta = pseudo_eta(g, Q, spec)
        bound = paley_sup_bound(p)
        sup_ok = sup <= bound * (1 + PALEY_RTOL)
        graph = build_cayley_sum_graph(g, Q)
        col = fourier_greedy_coloring(g, Q)
        valid = verify_coloring(graph, col)
        chi = None
        if p <= exact_limit:
            res = exact_chromatic_number(graph, node_limit=node_limit)
            chi = res.chi if res.exact else None
            valid = valid and verify_coloring(graph, res.coloring)
        shape = p / (eta * math.log2(p)) if math.isfinite(eta) and eta > 0 else None
        violations += (not sup_ok) + (not valid)
        rows.append(
            {
                "N": p,
                "set_size": len(Q),
                "sup_nontrivial": sup,
                "sup_bound": bound,
                "sup_ok": sup_ok,
                "eta": eta,
                "fourier_greedy_colors": col.num_colors,
                "valid": valid,
                "exact_chi": chi,
                "dsatur_colors": dsatur_coloring(graph).num_colors if p <= exact_limit else None,
                "density_shape": shape,
                "colors_over_shape": col.num_colors / shape if shape else None,
            }
        )
    return {"rows": rows, "violations": violations}
