"""Ground-truth machinery: flow gadgets, exact objective evaluators, oracles.

The gadget construction turns "does every unlabeled cluster have sparsity
at least tau" into a single s-t max-flow question: every vertex (leaf)
injects tau*f(v) units of demand and labeled vertices drain through
infinite sink edges; the threshold holds iff the whole demand routes.
Evaluators binary-search tau with exact rational arithmetic, so returned
objective values are exact fractions.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .errors import DataError, SizeGuardError
from .graph import WeightedGraph
from .maxflow import FlowNetwork, max_flow
from .rational import PSI_INF, max_feasible_value
from .sinkdp import fixed_selection_feasible
from .tree import INF, DecompTree, postorder

_OBJECTIVE_GUARD_N = 20
_OPT_GUARD_COMBINATIONS = 10**6


def uniform_importance(n: int) -> list[int]:
    return [1] * n


def degree_importance(g: WeightedGraph) -> list[int]:
    """f(v) = unweighted degree, so sum_{c in C} f(c) is the volume of C."""
    return [g.unweighted_degree(u) for u in range(g.n)]


def demand_target(tau: Fraction, importance: list[int]) -> int:
    """Scaled total demand: the max-flow value that certifies feasibility."""
    return tau.numerator * sum(importance)


def build_gadget(base, labels: set[int], tau: Fraction, importance: list[int]) -> FlowNetwork:
    """Flow network whose max-flow hits demand_target iff tau is feasible.

    base is a DecompTree (labels are leaf vertices) or a WeightedGraph
    (labels are any vertices). All capacities are scaled by tau's
    denominator so they stay integral.
    """
    p, q = tau.numerator, tau.denominator
    if isinstance(base, DecompTree):
        n_vertices = base.num_leaves
        if not set(labels) <= set(range(n_vertices)):
            raise DataError("labels must be leaf vertices of the tree")
        size = len(base.nodes)
        net = FlowNetwork(num_nodes=size + 2, source=size, sink=size + 1)
        for nid, node in enumerate(base.nodes):
            if node.parent is not None:
                w = node.parent_edge_weight
                net.add_edge(node.parent, nid, INF if w == INF else w * q)
        for vertex, leaf in base.leaf_of_vertex.items():
            net.add_arc(size, leaf, p * importance[vertex])
            if vertex in labels:
                net.add_arc(leaf, size + 1, INF)
    elif isinstance(base, WeightedGraph):
        n_vertices = base.n
        if not set(labels) <= set(range(n_vertices)):
            raise DataError("labels must be vertices of the graph")
        net = FlowNetwork(num_nodes=n_vertices + 2, source=n_vertices, sink=n_vertices + 1)
        for u, v, w in base.edges():
            net.add_edge(u, v, w * q)
        for v in range(n_vertices):
            net.add_arc(n_vertices, v, p * importance[v])
            if v in labels:
                net.add_arc(v, n_vertices + 1, INF)
    else:
        raise DataError(f"cannot build a gadget from {type(base).__name__}")
    if len(importance) != n_vertices:
        raise DataError("importance size does not match the gadget base")
    return net


def gadget_feasible(base, labels: set[int], tau: Fraction, importance: list[int]) -> bool:
    """Explicit-gadget feasibility via max-flow; the oracle route, independent
    of the tree DP."""
    value, _ = max_flow(build_gadget(base, labels, tau, importance))
    return value == demand_target(tau, importance)


def tree_leafset_mincut(tree: DecompTree, members) -> int | float:
    """Minimum total weight of tree edges separating the given vertices' leaves
    from all other leaves. INF edges force both endpoints to one side."""
    inside = set(members)
    if not inside <= set(range(tree.num_leaves)):
        raise DataError("member set contains non-vertices")
    # dp[node][side]: min cost in the subtree, node assigned to side
    # (side 1 = with the member leaves); cost counts cut parent edges of children.
    dp = [[0, 0] for _ in tree.nodes]
    for nid in postorder(tree):
        node = tree.nodes[nid]
        if not node.children:
            forced = 1 if node.leaf_label in inside else 0
            dp[nid][forced] = 0
            dp[nid][1 - forced] = INF
            continue
        for side in (0, 1):
            total = 0
            for c in node.children:
                w = tree.nodes[c].parent_edge_weight
                total += min(dp[c][side], dp[c][1 - side] + w)
            dp[nid][side] = total
    result = min(dp[tree.root])
    return result


def eval_tree_objective(tree: DecompTree, labels: set[int], importance: list[int] | None = None):
    """Exact tree objective of a fixed selection: the worst sparsity over
    unlabeled leaf sets. Returns a Fraction, or PSI_INF when no unlabeled
    importance remains."""
    n = tree.num_leaves
    if importance is None:
        importance = uniform_importance(n)
    if not set(labels) <= set(range(n)):
        raise DataError("labels must be leaf vertices of the tree")
    if not labels:
        # cluster candidates are proper subsets; the flow formulation cannot
        # exclude the all-leaves set, so reduce to single-label evaluations
        # (a set is proper iff it avoids some leaf)
        return min(
            (eval_tree_objective(tree, {v}, importance) for v in range(n)),
            default=PSI_INF,
        )
    total_f = sum(importance)
    upper = Fraction(total_f * tree.total_finite_weight() + 1)

    def pred(tau: Fraction) -> bool:
        return fixed_selection_feasible(tree, labels, tau, importance)

    if pred(upper):
        return PSI_INF
    return max_feasible_value(pred, max(total_f, 1), upper)


def eval_graph_objective(g: WeightedGraph, labels: set[int], importance: list[int] | None = None):
    """Exact graph objective of a fixed selection, via gadget max-flow."""
    if importance is None:
        importance = uniform_importance(g.n)
    if not set(labels) <= set(range(g.n)):
        raise DataError("labels must be graph vertices")
    if not labels:
        # see eval_tree_objective: proper cluster candidates only
        return min(
            (eval_graph_objective(g, {v}, importance) for v in range(g.n)),
            default=PSI_INF,
        )
    total_f = sum(importance)
    upper = Fraction(total_f * g.total_weight + 1)

    def pred(tau: Fraction) -> bool:
        return gadget_feasible(g, labels, tau, importance)

    if pred(upper):
        return PSI_INF
    return max_feasible_value(pred, max(total_f, 1), upper)


def _all_cut_weights(g: WeightedGraph) -> list[int]:
    """cut weight of every vertex subset, indexed by bitmask; n <= 20 only."""
    if g.n > _OBJECTIVE_GUARD_N:
        raise SizeGuardError(f"subset enumeration requires n <= {_OBJECTIVE_GUARD_N}, got {g.n}")
    n = g.n
    cuts = [0] * (1 << n)
    degree = [g.weighted_degree(u) for u in range(n)]
    for mask in range(1, 1 << n):
        v = (mask & -mask).bit_length() - 1
        prev = mask ^ (1 << v)
        adj = sum(w for u, w in g.adjacency[v] if prev & (1 << u))
        cuts[mask] = cuts[prev] + degree[v] - 2 * adj
    return cuts


def _mask_sums(values: list[int]) -> list[int]:
    """sum of values over every subset, indexed by bitmask."""
    n = len(values)
    sums = [0] * (1 << n)
    for mask in range(1, 1 << n):
        v = (mask & -mask).bit_length() - 1
        sums[mask] = sums[mask ^ (1 << v)] + values[v]
    return sums


def _min_ratio_over_submasks(comp: int, cuts: list[int], fsums: list[int], skip: int = -1):
    """min cuts[C]/fsums[C] over nonempty C subset of comp; PSI_INF if none.

    skip lets the caller exclude one subset (C = V when no vertex is
    labeled; the objective ranges over proper cluster candidates only).
    """
    best_num, best_den = None, None
    sub = comp
    while sub:
        fs = fsums[sub]
        if fs > 0 and sub != skip:
            cut = cuts[sub]
            if best_num is None or cut * best_den < best_num * fs:
                best_num, best_den = cut, fs
        sub = (sub - 1) & comp
    if best_num is None:
        return PSI_INF
    return Fraction(best_num, best_den)


def brute_force_objective(g: WeightedGraph, labels: set[int], importance: list[int] | None = None):
    """Objective by exhaustive enumeration of unlabeled subsets; the oracle."""
    if importance is None:
        importance = uniform_importance(g.n)
    if not set(labels) <= set(range(g.n)):
        raise DataError("labels must be graph vertices")
    cuts = _all_cut_weights(g)
    fsums = _mask_sums(list(importance))
    full = (1 << g.n) - 1
    comp = full
    for v in labels:
        comp ^= 1 << v
    # with nothing labeled, C = V is not a cluster candidate
    skip = full if comp == full else -1
    return _min_ratio_over_submasks(comp, cuts, fsums, skip=skip)


def brute_force_opt(g: WeightedGraph, k: int, importance: list[int] | None = None):
    """Exhaustive optimum over all selections of size <= k.

    Ties break toward the selection enumerated first (smaller size, then
    lexicographic order). Guarded: n <= 20 and at most 10^6 candidate
    selections.
    """
    if k < 1:
        raise DataError("budget must be at least 1")
    if importance is None:
        importance = uniform_importance(g.n)
    n = g.n
    count = 0
    comb = 1
    for size in range(1, min(k, n) + 1):
        comb = comb * (n - size + 1) // size
        count += comb
    if count > _OPT_GUARD_COMBINATIONS:
        raise SizeGuardError(
            f"{count} candidate selections exceed the {_OPT_GUARD_COMBINATIONS} oracle limit"
        )
    cuts = _all_cut_weights(g)
    fsums = _mask_sums(list(importance))

    full = (1 << n) - 1
    best_value = None
    best_labels: tuple[int, ...] | None = None
    for size in range(1, min(k, n) + 1):
        for combo in itertools.combinations(range(n), size):
            lmask = 0
            for v in combo:
                lmask |= 1 << v
            value = _min_ratio_over_submasks(full ^ lmask, cuts, fsums)
            if best_value is None or value > best_value:
                best_value = value
                best_labels = combo
    return set(best_labels), best_value
