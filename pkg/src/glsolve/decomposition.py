"""Building decomposition trees: spectral bisection and recursion.

The tree is grown top-down by repeatedly splitting clusters along sparse
cuts. Every tree edge is weighted with the boundary of its cluster in
the ORIGINAL graph (not the recursive subgraph); with that choice each
leaf-separating tree cut dominates the corresponding graph cut, which is
the one-sided guarantee the selection stage relies on. For graphs that
are themselves trees a lossless construction is available instead.
"""

from __future__ import annotations

import shlex
import subprocess
import tempfile
import zlib
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .errors import ConvergenceError, DataError, PartitionerError
from .graph import (
    WeightedGraph,
    connected_components,
    cut_weight,
    induced_subgraph,
    is_tree,
    write_dense_edge_list,
)
from .tree import INF, DecompTree, TreeNode, add_node, new_tree, validate_tree

_DENSE_EIG_LIMIT = 64  # below this, dense eigendecomposition beats iteration


@dataclass(frozen=True)
class BisectMethod:
    """Which sparse-cut heuristic drives the decomposition.

    variant: "fiedler", "fiedler-balanced" (requires beta in (0, 0.5)), or
    "sampled" (external partitioner command template plus sample count).
    """

    variant: str = "fiedler"
    beta: float = 0.0
    partitioner_cmd: str | None = None
    samples: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.variant not in ("fiedler", "fiedler-balanced", "sampled"):
            raise DataError(f"unknown bisection variant {self.variant!r}")
        if self.variant == "fiedler-balanced" and not 0.0 < self.beta < 0.5:
            raise DataError(f"beta must lie in (0, 0.5), got {self.beta}")
        if self.variant == "sampled":
            if not self.partitioner_cmd:
                raise DataError("sampled bisection needs a partitioner command template")
            if self.samples < 1:
                raise DataError(f"samples must be >= 1, got {self.samples}")

    def describe(self) -> str:
        if self.variant == "fiedler-balanced":
            return f"fiedler-balanced(beta={self.beta:g})"
        if self.variant == "sampled":
            return f"sampled(samples={self.samples})"
        return "fiedler"


@dataclass
class Bisection:
    side_a: set[int]
    side_b: set[int]
    score: Fraction  # cut weight / smaller side size


def fiedler_vector(g: WeightedGraph, tol: float = 1e-8, max_iter: int | None = None, seed: int = 0) -> np.ndarray:
    """Unit eigenvector for the second-smallest Laplacian eigenvalue.

    Deterministic for a fixed (graph, seed, tol). Small graphs use a dense
    solve; larger ones run LOBPCG with the all-ones direction deflated via
    an orthogonality constraint, verified against the relative residual
    ||Lv - lambda v|| <= tol * ||Lv|| and re-polished densely if the
    iteration stalls. Raises ConvergenceError when nothing converges.
    """
    n = g.n
    if n < 2:
        raise DataError("Fiedler vector needs at least two vertices")
    if max_iter is None:
        max_iter = 10 * n + 500

    lap = _laplacian_csr(g)

    def residual_ok(vec: np.ndarray) -> tuple[bool, np.ndarray]:
        lv = lap @ vec
        lam = float(vec @ lv)
        res = np.linalg.norm(lv - lam * vec)
        return res <= tol * max(np.linalg.norm(lv), 1e-300), vec

    if n <= _DENSE_EIG_LIMIT:
        vec = _dense_fiedler(lap, n)
        ok, vec = residual_ok(vec)
        if not ok:
            raise ConvergenceError("dense eigensolver produced an inaccurate pair")
        return _canonical_sign(vec)

    rng = np.random.default_rng(seed)
    ones = np.full((n, 1), 1.0 / np.sqrt(n))
    x = rng.standard_normal((n, 1))
    x -= ones * (ones.T @ x)
    # lobpcg's tol bounds the absolute residual, our contract the relative
    # one; rescale the request to the measured eigenvalue and warm-restart
    # when the first pass lands just above the target
    tol_abs = tol
    budget = max_iter
    for _ in range(3):
        if budget <= 0:
            break
        iters = min(1000, budget)
        budget -= iters
        try:
            _, vecs = scipy.sparse.linalg.lobpcg(
                lap, x, Y=ones, tol=tol_abs, maxiter=iters, largest=False
            )
        except Exception:
            break
        vec = vecs[:, 0]
        vec = vec - np.mean(vec)
        norm = np.linalg.norm(vec)
        if not norm > 0 or not np.all(np.isfinite(vec)):
            break
        vec = vec / norm
        ok, vec = residual_ok(vec)
        if ok:
            return _canonical_sign(vec)
        lam = float(vec @ (lap @ vec))
        tol_abs = max(tol * lam * 0.5, 1e-14)
        x = vec[:, None]

    if n <= 4096:
        vec = _dense_fiedler(lap, n)
        ok, vec = residual_ok(vec)
        if ok:
            return _canonical_sign(vec)
    raise ConvergenceError(f"Fiedler iteration did not reach tol={tol} within {max_iter} steps")


def _laplacian_csr(g: WeightedGraph) -> scipy.sparse.csr_matrix:
    indptr, indices, weights, degree = g.csr_arrays()
    adj = scipy.sparse.csr_matrix(
        (weights.astype(np.float64), indices, indptr), shape=(g.n, g.n)
    )
    return scipy.sparse.diags(degree.astype(np.float64)) - adj


def _dense_fiedler(lap, n: int) -> np.ndarray:
    dense = lap.toarray() if scipy.sparse.issparse(lap) else np.asarray(lap)
    _, vecs = np.linalg.eigh(dense)
    vec = vecs[:, 1]
    vec = vec - np.mean(vec)
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise ConvergenceError("degenerate Fiedler vector (disconnected graph?)")
    return vec / norm


def _canonical_sign(vec: np.ndarray) -> np.ndarray:
    for x in vec:
        if abs(x) > 1e-12:
            return vec if x > 0 else -vec
    return vec


def sweep_cut(g: WeightedGraph, vec: np.ndarray, beta: float = 0.0) -> Bisection:
    """Best threshold cut of a vertex-valued vector, scored cut/min(|A|,|B|).

    Candidates come from thresholds between consecutive distinct values;
    with beta > 0 candidates whose smaller side is at most n*beta vertices
    are skipped. Ties break toward the smaller low side, then the smaller
    maximum vertex id in it.
    """
    n = g.n
    if len(vec) != n:
        raise DataError(f"vector has {len(vec)} entries, graph has {n} vertices")
    order = sorted(range(n), key=lambda u: (vec[u], u))
    inside = np.zeros(n, dtype=bool)
    cut = 0
    max_id = -1
    best: tuple | None = None
    for idx, u in enumerate(order):
        delta = g.weighted_degree(u)
        for v, w in g.adjacency[u]:
            if inside[v]:
                delta -= 2 * w
        cut += delta
        inside[u] = True
        max_id = max(max_id, u)
        if idx == n - 1:
            break
        nxt = order[idx + 1]
        if vec[nxt] == vec[u]:
            continue  # threshold inside a tie group does not separate
        size_a = idx + 1
        small = min(size_a, n - size_a)
        if beta > 0.0 and small <= n * beta:
            continue
        score = Fraction(cut, small)
        key = (score, size_a, max_id)
        if best is None or key < best[0:3]:
            best = (score, size_a, max_id, idx + 1)
    if best is None:
        if beta > 0.0:
            raise DataError(f"every sweep candidate violates the balance floor beta={beta:g}")
        raise DataError("sweep vector is constant; no threshold separates the graph")
    side_a = set(order[: best[3]])
    return Bisection(side_a=side_a, side_b=set(range(n)) - side_a, score=best[0])


def sampled_bisect(
    g: WeightedGraph, partitioner_cmd: str, samples: int, seed: int = 0
) -> Bisection:
    """Pick the sparsest of `samples` external-partitioner cuts.

    Target part weights walk a geometric grid from 1 to n/2. The command
    template receives {graph} (an edge-list file with dense ids),
    {fraction} (target weight over n), and optionally {seed}; it must
    print two lines of vertex ids covering the graph.
    """
    if samples < 1:
        raise DataError(f"samples must be >= 1, got {samples}")
    grid = np.geomspace(1.0, max(g.n / 2.0, 1.0), samples)
    best: Bisection | None = None
    best_key = None
    with tempfile.TemporaryDirectory(prefix="glsolve-part-") as tmp:
        path = str(Path(tmp) / "subgraph.edges")
        write_dense_edge_list(g, path)
        for i, target in enumerate(grid):
            fraction = min(max(target / g.n, 0.0), 0.5)
            side_a, side_b = _run_partitioner(partitioner_cmd, path, fraction, seed + i, g.n)
            score = Fraction(cut_weight(g, side_a), min(len(side_a), len(side_b)))
            if len(side_b) < len(side_a) or (
                len(side_b) == len(side_a) and sorted(side_b) < sorted(side_a)
            ):
                side_a, side_b = side_b, side_a
            key = (score, len(side_a), max(side_a))
            if best_key is None or key < best_key:
                best_key = key
                best = Bisection(side_a=side_a, side_b=side_b, score=score)
    assert best is not None
    return best


def _run_partitioner(cmd_template: str, path: str, fraction: float, seed: int, n: int):
    cmd = cmd_template.format(graph=path, fraction=fraction, seed=seed)
    try:
        proc = subprocess.run(
            shlex.split(cmd), capture_output=True, text=True, timeout=3600, check=False
        )
    except OSError as exc:
        raise PartitionerError(f"could not launch partitioner: {exc}") from exc
    if proc.returncode != 0:
        raise PartitionerError(
            f"partitioner exited with {proc.returncode}: {proc.stderr.strip()[:500]}"
        )
    lines = [ln for ln in proc.stdout.splitlines() if ln.strip()]
    if len(lines) != 2:
        raise PartitionerError(f"partitioner printed {len(lines)} nonempty lines, expected 2")
    try:
        side_a = {int(tok) for tok in lines[0].split()}
        side_b = {int(tok) for tok in lines[1].split()}
    except ValueError:
        raise PartitionerError("partitioner output contains non-integer vertex ids") from None
    if not side_a or not side_b:
        raise PartitionerError("partitioner returned an empty side")
    if side_a & side_b or side_a | side_b != set(range(n)):
        raise PartitionerError("partitioner sides must partition the vertex set")
    return side_a, side_b


def _balanced_id_split(n: int) -> tuple[set[int], set[int]]:
    half = n // 2
    return set(range(half)), set(range(half, n))


def _fiedler_bisect(g: WeightedGraph, beta: float, seed: int) -> tuple[set[int], set[int]]:
    try:
        vec = fiedler_vector(g, seed=seed)
    except ConvergenceError:
        return _balanced_id_split(g.n)
    try:
        cut = sweep_cut(g, vec, beta)
    except DataError:
        if beta > 0.0:
            try:
                cut = sweep_cut(g, vec, 0.0)
            except DataError:
                return _balanced_id_split(g.n)
        else:
            return _balanced_id_split(g.n)
    return cut.side_a, cut.side_b


def _derive_seed(seed: int, cluster: list[int]) -> int:
    digest = zlib.crc32(np.asarray(sorted(cluster), dtype=np.int64).tobytes())
    return (seed * 0x9E3779B1 + digest) & 0x7FFFFFFF


def make_bisector(method: BisectMethod):
    """Turn a method description into a callable (subgraph, cluster) -> sides."""

    def bisect(sub: WeightedGraph, cluster: list[int]) -> tuple[set[int], set[int]]:
        seed = _derive_seed(method.seed, cluster)
        if method.variant == "sampled":
            cut = sampled_bisect(sub, method.partitioner_cmd, method.samples, seed)
            return cut.side_a, cut.side_b
        beta = method.beta if method.variant == "fiedler-balanced" else 0.0
        return _fiedler_bisect(sub, beta, seed)

    return bisect


def hierarchical_decomposition(g: WeightedGraph, method: BisectMethod) -> DecompTree:
    """Split the graph recursively along sparse cuts into a binary tree."""
    return decompose_with(g, make_bisector(method))


def decompose_with(g: WeightedGraph, bisect) -> DecompTree:
    """Decomposition driven by an arbitrary bisector callable.

    bisect(subgraph, cluster) gets the induced subgraph of the cluster and
    the cluster's original dense ids; it returns two nonempty sets of
    subgraph-local ids. Disconnected clusters are split along component
    boundaries without consulting the bisector. Uses an explicit work
    stack: beta=0 sweeps can peel one vertex per level, so recursion depth
    reaches n.
    """
    if g.n < 1:
        raise DataError("cannot decompose an empty graph")
    tree = new_tree(list(g.orig_id))
    if g.n == 1:
        add_node(tree, None, None, leaf_label=0)
        validate_tree(tree)
        return tree

    root = add_node(tree, None, None)
    # stack items: (cluster as sorted original dense ids, parent node id)
    stack: list[tuple[list[int], int]] = [(list(range(g.n)), -1)]
    while stack:
        cluster, parent = stack.pop()
        if parent == -1:
            node = root
        else:
            weight = cut_weight(g, cluster)
            node = add_node(tree, parent, weight)
        if len(cluster) == 1:
            tree.nodes[node].leaf_label = cluster[0]
            tree.leaf_of_vertex[cluster[0]] = node
            continue
        sub, back = induced_subgraph(g, cluster)
        comps = connected_components(sub)
        if len(comps) > 1:
            local_a = set(comps[0])
            local_b = {u for comp in comps[1:] for u in comp}
        else:
            local_a, local_b = bisect(sub, cluster)
            if (
                not local_a
                or not local_b
                or local_a & local_b
                or local_a | local_b != set(range(sub.n))
            ):
                raise DataError("bisector returned an invalid bisection")
        side_a = sorted(back[u] for u in local_a)
        side_b = sorted(back[u] for u in local_b)
        # push B first so A becomes the first child
        stack.append((side_b, node))
        stack.append((side_a, node))
    validate_tree(tree)
    return tree


def binarize(tree: DecompTree) -> DecompTree:
    """Split >2-ary nodes with infinite-weight auxiliary nodes, in place.

    Finite leaf-separating cuts never pay for an INF edge, so every such
    cut value is preserved exactly. Nodes with exactly one child are
    rejected; nothing in this package produces them.
    """
    for nid in range(len(tree.nodes)):
        node = tree.nodes[nid]
        if len(node.children) == 1:
            raise DataError(f"node {nid} has exactly one child; cannot binarize unary nodes")
    for nid in range(len(tree.nodes)):
        while len(tree.nodes[nid].children) > 2:
            children = tree.nodes[nid].children
            moved = children[-2:]
            del children[-2:]
            aux = len(tree.nodes)
            tree.nodes.append(TreeNode(parent=nid, parent_edge_weight=INF, children=list(moved)))
            children.append(aux)
            for c in moved:
                tree.nodes[c].parent = aux
    tree.invalidate_caches()
    validate_tree(tree)
    return tree


def perfect_tree_sparsifier(g: WeightedGraph) -> DecompTree:
    """Lossless decomposition tree for a graph that is itself a tree.

    Rooted at the smallest-id internal vertex; every node that keeps
    children gets an INF-weight twin leaf carrying its label. Every
    leaf-separating cut in the result equals the matching graph cut
    exactly, so selection on it is exact for tree inputs.
    """
    if not is_tree(g):
        raise DataError("perfect sparsifier construction requires a connected acyclic graph")
    tree = new_tree(list(g.orig_id))
    if g.n == 1:
        add_node(tree, None, None, leaf_label=0)
        validate_tree(tree)
        return tree

    root_vertex = next(
        (u for u in range(g.n) if g.unweighted_degree(u) >= 2),
        0,
    )
    # build the rooted copy of g
    node_of_vertex: dict[int, int] = {}
    root = add_node(tree, None, None)
    node_of_vertex[root_vertex] = root
    stack = [root_vertex]
    seen = {root_vertex}
    while stack:
        u = stack.pop()
        for v, w in sorted(g.adjacency[u]):
            if v in seen:
                continue
            seen.add(v)
            node_of_vertex[v] = add_node(tree, node_of_vertex[u], w)
            stack.append(v)
    # leaves of the rooted copy keep their own label; internal nodes get an
    # INF twin leaf
    for u, nid in node_of_vertex.items():
        if tree.nodes[nid].children:
            add_node(tree, nid, INF, leaf_label=u)
        else:
            tree.nodes[nid].leaf_label = u
            tree.leaf_of_vertex[u] = nid
    validate_tree(tree)
    return binarize(tree)
