"""Selection of label sets: exact threshold search around the sink DP.

The best achievable tree objective is a fraction lam/f(S) with
denominator at most the total importance F, and the predicate
"min_sinks at threshold tau fits the budget" is monotone in tau, so the
optimum is recovered exactly by the rational boundary search. The
infinite-objective corner (labeling everything that matters) is detected
upfront by probing one threshold beyond every achievable value.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from .decomposition import BisectMethod, hierarchical_decomposition, perfect_tree_sparsifier
from .errors import DataError
from .evaluation import degree_importance, eval_graph_objective, uniform_importance
from .graph import WeightedGraph, is_tree
from .rational import PSI_INF, max_feasible_value
from .sinkdp import INFEASIBLE, ScaledInstance, backtrack, dp_solve, min_sinks
from .tree import DecompTree


@dataclass
class ImportanceSpec:
    """Per-vertex nonnegative integer importance.

    kind "uniform" weighs every vertex 1; "degree" uses unweighted degrees
    (turning sparsity into a conductance-style objective); "file" carries
    explicit values keyed by original vertex id.
    """

    kind: str = "uniform"
    file_values: dict[int, int] | None = None  # original id -> value

    def resolve(self, *, graph: WeightedGraph | None = None, orig_ids: list[int] | None = None) -> list[int]:
        if self.kind == "uniform":
            if orig_ids is None and graph is None:
                raise DataError("importance resolution needs a graph or a tree")
            n = graph.n if graph is not None else len(orig_ids)
            return uniform_importance(n)
        if self.kind == "degree":
            if graph is None:
                raise DataError("degree importance needs the graph")
            return degree_importance(graph)
        if self.kind == "file":
            if self.file_values is None:
                raise DataError("file importance carries no values")
            ids = orig_ids if orig_ids is not None else (graph.orig_id if graph else None)
            if ids is None:
                raise DataError("importance resolution needs a graph or a tree")
            missing = [orig for orig in ids if orig not in self.file_values]
            if missing:
                raise DataError(
                    f"importance file lacks values for {len(missing)} vertices (first: {missing[:5]})"
                )
            values = [self.file_values[orig] for orig in ids]
            for orig, f in zip(ids, values):
                if not isinstance(f, int) or f < 0:
                    raise DataError(f"importance of vertex {orig} must be a nonnegative integer")
            return values
        raise DataError(f"unknown importance kind {self.kind!r}")

    def describe(self) -> str:
        return self.kind


@dataclass
class Selection:
    """A chosen label set with its exact objective values and provenance."""

    labels: set[int]  # original vertex ids
    k_requested: int
    k_used: int
    tree_value: object  # Fraction or PSI_INF
    graph_value: object | None = None
    method: str = ""
    seed: int = 0
    timings_ms: dict[str, float] = field(default_factory=dict)
    tree: DecompTree | None = field(default=None, repr=False, compare=False)

    def summary_lines(self) -> list[str]:
        from .rational import format_ratio, ratio_decimal

        lines = [
            f"k_requested={self.k_requested}",
            f"k_used={self.k_used}",
            f"tree_value={format_ratio(self.tree_value)}",
            f"tree_value_decimal={ratio_decimal(self.tree_value)}",
        ]
        if self.graph_value is not None:
            lines.append(f"graph_value={format_ratio(self.graph_value)}")
            lines.append(f"graph_value_decimal={ratio_decimal(self.graph_value)}")
        lines.append(f"method={self.method}")
        lines.append(f"seed={self.seed}")
        for phase, ms in self.timings_ms.items():
            lines.append(f"{phase}_ms={ms:.3f}")
        return lines


def select_labels(tree: DecompTree, k: int, importance: list[int] | None = None) -> Selection:
    """Best selection of at most k leaves, with its exact tree objective.

    Maximizes the worst sparsity over unlabeled leaf sets. When k covers
    every leaf carrying importance the minimization domain empties and the
    value is the PSI_INF sentinel.
    """
    n = tree.num_leaves
    if k < 1:
        raise DataError(f"budget must be at least 1, got {k}")
    if importance is None:
        importance = uniform_importance(n)
    if len(importance) != n:
        raise DataError(f"importance has {len(importance)} entries, tree has {n} leaves")

    total_f = sum(importance)
    upper = Fraction(total_f * tree.total_finite_weight() + 1)
    k_cap = min(k, n)

    def feasible(tau: Fraction) -> bool:
        inst = ScaledInstance(tree=tree, tau=tau, importance=importance, k_max=k_cap)
        found = min_sinks(dp_solve(inst))
        return found is not INFEASIBLE and found <= k_cap

    start = time.perf_counter()
    if k >= n or feasible(upper):
        # no unlabeled importance needs to remain: infinite objective
        if k >= n:
            labels = set(range(n))
        else:
            inst = ScaledInstance(tree=tree, tau=upper, importance=importance, k_max=k_cap)
            table = dp_solve(inst)
            labels = backtrack(inst, table, min_sinks(table))
        value: object = PSI_INF
    else:
        value = max_feasible_value(feasible, max(total_f, 1), upper)
        inst = ScaledInstance(tree=tree, tau=value, importance=importance, k_max=k_cap)
        table = dp_solve(inst)
        needed = min_sinks(table)
        if needed is INFEASIBLE or needed > k_cap:
            raise AssertionError("search returned an infeasible threshold; exactness bug")
        labels = backtrack(inst, table, needed)
    elapsed = (time.perf_counter() - start) * 1000.0

    if len(labels) > k:
        raise AssertionError("selection exceeds the budget; backtracking bug")
    return Selection(
        labels={tree.orig_ids[v] for v in labels},
        k_requested=k,
        k_used=len(labels),
        tree_value=value,
        timings_ms={"select": elapsed},
    )


def gls_pipeline(
    g: WeightedGraph,
    k: int,
    method: BisectMethod | None = None,
    importance: ImportanceSpec | None = None,
    evaluate_graph: bool = False,
) -> Selection:
    """End-to-end selection on a graph: decompose, select, optionally evaluate.

    Tree-shaped inputs take the lossless construction, making the result
    exactly optimal; everything else goes through the heuristic
    decomposition named by `method`.
    """
    if not 1 <= k <= g.n:
        raise DataError(f"budget must lie in 1..{g.n}, got {k}")
    if method is None:
        method = BisectMethod()
    if importance is None:
        importance = ImportanceSpec()
    f_values = importance.resolve(graph=g)

    t0 = time.perf_counter()
    if is_tree(g):
        tree = perfect_tree_sparsifier(g)
        method_name = "tree-exact"
    else:
        tree = hierarchical_decomposition(g, method)
        method_name = method.describe()
    decompose_ms = (time.perf_counter() - t0) * 1000.0

    selection = select_labels(tree, k, f_values)
    selection.method = method_name
    selection.seed = method.seed
    selection.timings_ms = {"decompose": decompose_ms, "select": selection.timings_ms["select"]}
    selection.tree = tree

    if evaluate_graph:
        t0 = time.perf_counter()
        dense = g.dense_of_orig()
        label_dense = {dense[orig] for orig in selection.labels}
        selection.graph_value = eval_graph_objective(g, label_dense, f_values)
        selection.timings_ms["evaluate"] = (time.perf_counter() - t0) * 1000.0
        if not (selection.tree_value >= selection.graph_value):
            raise AssertionError(
                "tree objective fell below the graph objective; decomposition bug"
            )
    return selection
