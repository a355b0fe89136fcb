"""Cayley sum graphs on finite abelian groups: construction, coloring, additive structure."""
from .errors import CayleySumError, GroupError, InfeasibleError, SizeLimitError, TorsionError
from .groups import GroupSpec, format_group, make_group, parse_group
from .subsets import SubsetBitmap, paley_set, parse_subset, random_subset, restricted_sumset
from .graphs import AdjacencyGraph, build_cayley_sum_graph
from .additive import (
    UsefulParams,
    additive_quadruples,
    extract_useful_subset,
    find_clique_size,
    is_dissociated,
    sample_dissociated,
)
from .spectral import dft_indicator, pseudo_eta, sup_nontrivial
from .cliques import clique_number
from .coloring import Coloring, dsatur_coloring, exact_chromatic_number, greedy_coloring, verify_coloring
from .partition import clique_partition_coloring, fourier_greedy_coloring
from .packing import clique_packing
from .lemmas import (
    check_binomial_lemmas,
    check_ell_d_relation,
    check_intersection_corollaries,
    check_k5_lemma,
    check_turan_consequence,
    find_all_z4,
    intersection_profile,
)
from .experiments import SweepConfig, run_group_comparison, run_lipschitz_check, run_paley_audit, run_sweep

__version__ = "0.1.0"
