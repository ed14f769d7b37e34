"""Budgeted graph label selection.

Pick at most k vertices so that every cluster of unlabeled vertices is
well connected to the rest of the graph, by decomposing the graph into a
weighted binary tree and solving the tree problem exactly with a flow
dynamic program wrapped in an exact rational threshold search.
"""

from .graph import (
    WeightedGraph,
    cut_weight,
    induced_subgraph,
    laplacian_matvec,
    parse_edge_list,
    preprocess,
    serialize_edge_list,
)
from .rational import PSI_INF, Ratio, format_ratio, ratio_decimal
from .tree import INF, DecompTree, load_dt, parse_dt_text, save_dt, to_dt_text

__version__ = "0.1.0"

from .decomposition import (  # noqa: E402
    BisectMethod,
    Bisection,
    binarize,
    fiedler_vector,
    hierarchical_decomposition,
    perfect_tree_sparsifier,
    sampled_bisect,
    sweep_cut,
)
from .evaluation import (  # noqa: E402
    brute_force_objective,
    brute_force_opt,
    build_gadget,
    eval_graph_objective,
    eval_tree_objective,
    tree_leafset_mincut,
)
from .maxflow import FlowNetwork, max_flow  # noqa: E402
from .selector import ImportanceSpec, Selection, gls_pipeline, select_labels  # noqa: E402
from .sinkdp import (  # noqa: E402
    INFEASIBLE,
    NEG_INF,
    POS_INF,
    DPTable,
    ScaledInstance,
    backtrack,
    dp_solve,
    edge_bound,
    min_sinks,
)

__all__ = [
    "WeightedGraph",
    "parse_edge_list",
    "preprocess",
    "cut_weight",
    "induced_subgraph",
    "laplacian_matvec",
    "serialize_edge_list",
    "DecompTree",
    "INF",
    "load_dt",
    "save_dt",
    "parse_dt_text",
    "to_dt_text",
    "Ratio",
    "PSI_INF",
    "format_ratio",
    "ratio_decimal",
    "BisectMethod",
    "Bisection",
    "fiedler_vector",
    "sweep_cut",
    "sampled_bisect",
    "hierarchical_decomposition",
    "binarize",
    "perfect_tree_sparsifier",
    "ScaledInstance",
    "DPTable",
    "edge_bound",
    "dp_solve",
    "min_sinks",
    "backtrack",
    "NEG_INF",
    "POS_INF",
    "INFEASIBLE",
    "FlowNetwork",
    "max_flow",
    "build_gadget",
    "eval_tree_objective",
    "eval_graph_objective",
    "tree_leafset_mincut",
    "brute_force_objective",
    "brute_force_opt",
    "ImportanceSpec",
    "Selection",
    "select_labels",
    "gls_pipeline",
    "__version__",
]
