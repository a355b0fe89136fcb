"""Command-line front end (``cayleysum`` / ``python -m cayleysum``).

Exit status: 0 when every checked assertion holds, 2 on an assertion
violation, 1 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict

from .additive import sample_dissociated
from .cliques import clique_number
from .coloring import exact_chromatic_number, greedy_coloring, verify_coloring
from .errors import CayleySumError
from .experiments import (
    ALGORITHMS,
    SweepConfig,
    rows_to_csv,
    run_group_comparison,
    run_lipschitz_check,
    run_paley_audit,
    run_sweep,
)
from .graphs import build_cayley_sum_graph
from .groups import format_group, parse_group
from .lemmas import (
    check_binomial_lemmas,
    check_ell_d_relation,
    check_intersection_corollaries,
    check_k5_lemma,
    check_turan_consequence,
    find_all_z4,
)
from .partition import clique_partition_coloring, fourier_greedy_coloring
from .rng import make_rng
from .spectral import dft_indicator, pseudo_eta, sup_nontrivial
from .subsets import parse_subset

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _ints(text: str) -> list:
    return [int(t) for t in text.split(",") if t]


def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed (default 0)")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", default=argparse.SUPPRESS)
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv", default=argparse.SUPPRESS)
    p.add_argument("--out", default=argparse.SUPPRESS, help="write output here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = _Parser(prog="cayleysum", description="Cayley sum graph experiments.", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common])

    def group_set(p, set_default=None):
        p.add_argument("--group", required=True, help='e.g. "Z41", "Z5xZ25", "Z2^4"')
        p.add_argument("--set", dest="subset", default=set_default, help="hex | @file | random:<seed> | paley")

    p = cmd("gen", "generate and serialize a subset")
    group_set(p)

    p = cmd("graph", "build the Cayley sum graph")
    group_set(p)

    p = cmd("color", "color the Cayley sum graph")
    group_set(p)
    p.add_argument("--algo", choices=ALGORITHMS, default="greedy")
    p.add_argument("--node-limit", type=int, default=2_000_000)
    p.add_argument("--override", action="store_true", help="allow exact coloring above 64 vertices")

    p = cmd("clique", "maximum clique of the Cayley sum graph")
    group_set(p)
    p.add_argument("--complement", action="store_true", help="use the complement graph")
    p.add_argument("--node-limit", type=int, default=2_000_000)

    p = cmd("fourier", "Fourier coefficients of the set indicator")
    group_set(p)

    p = cmd("lemmas", "run a lemma checker")
    p.add_argument("which", choices=["k5", "z4", "binom", "elld", "turan", "cor"])
    p.add_argument("--group", default="Z1009")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--nmax", type=int, default=512)
    p.add_argument("--kmax", type=int, default=64)
    p.add_argument("--set", dest="subset", default=None, help="X for z4 (else sampled)")

    p = cmd("sweep", "chromatic sweep over groups and seeds")
    p.add_argument("--config", help="JSON file with SweepConfig fields")
    p.add_argument("--groups", help="comma-separated group specs")
    p.add_argument("--trials", type=int)
    p.add_argument("--algos", help="comma-separated algorithms")
    p.add_argument("--workers", type=int)
    p.add_argument("--timing", action="store_true", help="fill elapsed_ms (breaks byte-identical output)")

    p = cmd("compare-groups", "Z2^n against Z/p with p the largest prime below 2^n")
    p.add_argument("--n", type=_ints, default=[10], help="comma-separated exponents")
    p.add_argument("--trials", type=int, default=10)

    p = cmd("lipschitz", "packing number changes by at most 1 under a toggle")
    p.add_argument("--N", type=int, default=11)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--trials", type=int, default=50)

    p = cmd("paley", "spectral and coloring audit of Paley sets")
    p.add_argument("--primes", type=_ints, default=[101, 1009])
    return parser


def _load(args):
    g = parse_group(args.group)
    text = args.subset if args.subset is not None else f"random:{args.seed}"
    return g, parse_subset(g, text)


def _emit(args, payload, csv_text=None):
    if args.fmt == "csv" and csv_text is not None:
        text = csv_text
    else:
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_gen(args):
    g, A = _load(args)
    _emit(args, {"group": format_group(g), "N": g.order, "size": len(A), "set": A.to_hex()}, A.to_hex() + "\n")
    return EXIT_OK


def _cmd_graph(args):
    g, A = _load(args)
    graph = build_cayley_sum_graph(g, A)
    degrees = [graph.degree(v) for v in range(graph.n)]
    edges = list(graph.edges())
    payload = {
        "group": format_group(g),
        "N": g.order,
        "set_size": len(A),
        "edges": len(edges),
        "min_degree": min(degrees),
        "max_degree": max(degrees),
    }
    csv_text = "u,v\n" + "".join(f"{u},{v}\n" for u, v in edges)
    _emit(args, payload, csv_text)
    return EXIT_OK


def _cmd_color(args):
    g, A = _load(args)
    graph = build_cayley_sum_graph(g, A)
    flags = []
    t0 = time.perf_counter()
    if args.algo == "exact":
        res = exact_chromatic_number(graph, node_limit=args.node_limit, override=args.override)
        col = res.coloring
        if not res.exact:
            flags.append(f"inexact:lower={res.lower}")
    elif args.algo == "greedy":
        col = greedy_coloring(graph)
    elif args.algo == "clique-partition":
        _, col = clique_partition_coloring(g, A, graph=graph)
    else:
        col = fourier_greedy_coloring(g, A)
    ms = (time.perf_counter() - t0) * 1000.0
    valid = verify_coloring(graph, col)
    payload = {
        "algo": args.algo,
        "N": g.order,
        "num_colors": col.num_colors,
        "valid": valid,
        "elapsed_ms": round(ms, 3),
        "flags": flags,
    }
    _emit(args, payload, col.to_csv() + "\n")
    return EXIT_OK if valid else EXIT_VIOLATION


def _cmd_clique(args):
    g, A = _load(args)
    graph = build_cayley_sum_graph(g, A)
    if args.complement:
        graph = graph.complement()
    res = clique_number(graph, node_limit=args.node_limit)
    payload = {
        "N": g.order,
        "complement": args.complement,
        "omega": res.omega,
        "upper": res.upper,
        "exact": res.exact,
        "clique": list(res.clique),
    }
    _emit(args, payload, ",".join(map(str, res.clique)) + "\n")
    return EXIT_OK


def _cmd_fourier(args):
    g, A = _load(args)
    spec = dft_indicator(g, A)
    sup, arg = sup_nontrivial(spec)
    eta = pseudo_eta(g, A, spec)
    payload = {
        "N": g.order,
        "set_size": len(A),
        "sup_nontrivial": sup,
        "eta": eta if eta != float("inf") else None,
        "argmax_character": list(arg) if isinstance(arg, tuple) else arg,
        "parseval_error": spec.parseval_error(len(A)),
    }
    _emit(args, payload)
    return EXIT_OK


def _cmd_lemmas(args):
    w = args.which
    if w == "binom":
        rep = check_binomial_lemmas(args.nmax)
    elif w == "elld":
        rep = check_ell_d_relation(args.kmax, args.trials if args.trials is not None else 100_000, args.seed)
    elif w == "turan":
        rep = check_turan_consequence(args.k or 20, args.trials or 1000, args.seed)
    else:
        g = parse_group(args.group)
        if w == "k5":
            rep = check_k5_lemma(g, args.k or 6, args.trials or 100, args.seed)
        elif w == "cor":
            rep = check_intersection_corollaries(g, args.k or 6, args.trials or 1000, args.seed)
        else:
            if args.subset is not None:
                X = parse_subset(g, args.subset)
            else:
                X = sample_dissociated(g, args.k or 6, make_rng(args.seed))
            found = find_all_z4(g, X)
            kinds = {}
            for _, c in found:
                kinds[c.kind] = kinds.get(c.kind, 0) + 1
            viol = kinds.get("Violation", 0)
            payload = {
                "lemma": "z4",
                "checked": len(found),
                "violations": viol,
                "summary": {"group": format_group(g), "X": X.ranks.tolist(), "kinds": kinds},
                "details": [{"Z": list(z), **asdict(c)} for z, c in found],
            }
            _emit(args, payload)
            return EXIT_VIOLATION if viol else EXIT_OK
    _emit(args, rep.to_dict())
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def _row_violations(rows) -> int:
    return sum((not r.valid) + (r.lower_bound is not None and r.chi_or_bound < r.lower_bound) for r in rows)


def _cmd_sweep(args):
    data = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            data = json.loads(fh.read())
    if args.groups is not None:
        data["groups"] = [s for s in args.groups.split(",") if s]
    if args.trials is not None:
        data["trials_per_group"] = args.trials
    if args.algos is not None:
        data["algorithms"] = [s for s in args.algos.split(",") if s]
    if args.workers is not None:
        data["workers"] = args.workers
    if args.timing:
        data["timing"] = True
    data.setdefault("master_seed", args.seed)
    data.pop("output", None)  # --out decides where output goes
    cfg = SweepConfig.from_json(json.dumps(data))
    rows = run_sweep(cfg)
    fmt_rows = [{k: v for k, v in asdict(r).items()} for r in rows]
    if args.fmt is None:
        args.fmt = "csv"
    _emit(args, fmt_rows, rows_to_csv(rows))
    return EXIT_VIOLATION if _row_violations(rows) else EXIT_OK


def _cmd_compare(args):
    rep = run_group_comparison(args.n, args.trials, args.seed)
    rows = rep["rows"]
    payload = {"mean_colors": rep["mean_colors"], "violations": rep["violations"], "rows": [asdict(r) for r in rows]}
    _emit(args, payload, rows_to_csv(rows))
    return EXIT_VIOLATION if rep["violations"] else EXIT_OK


def _cmd_lipschitz(args):
    rep = run_lipschitz_check(args.N, args.k, args.trials, args.seed)
    _emit(args, rep)
    return EXIT_VIOLATION if rep["violations"] else EXIT_OK


def _cmd_paley(args):
    rep = run_paley_audit(args.primes)
    _emit(args, rep)
    return EXIT_VIOLATION if rep["violations"] else EXIT_OK


COMMANDS = {
    "gen": _cmd_gen,
    "graph": _cmd_graph,
    "color": _cmd_color,
    "clique": _cmd_clique,
    "fourier": _cmd_fourier,
    "lemmas": _cmd_lemmas,
    "sweep": _cmd_sweep,
    "compare-groups": _cmd_compare,
    "lipschitz": _cmd_lipschitz,
    "paley": _cmd_paley,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"cayleysum: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for name, default in (("seed", 0), ("fmt", None), ("out", None)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        return COMMANDS[args.command](args)
    except (CayleySumError, ValueError, OSError) as exc:
        print(f"cayleysum: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
