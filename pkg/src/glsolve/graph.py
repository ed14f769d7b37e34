"""Undirected integer-weighted graphs: parsing, preprocessing, cut arithmetic.

Edge lists follow the common SNAP text convention: one edge per line as
"u v" or "u v w", '#' starts a comment line, vertex ids are arbitrary
nonnegative integers that get remapped to dense ids 0..n-1 in order of
first appearance. Weights must be positive integers (pre-scale fractional
weights before feeding them in; exact arithmetic downstream relies on
integrality).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import DataError

VertexSet = set  # dense vertex ids


@dataclass
class WeightedGraph:
    """Symmetric adjacency-list graph with dense ids and positive int weights.

    Treat instances as immutable after construction; all algorithms here
    share them without copying.
    """

    n: int
    adjacency: list[list[tuple[int, int]]]  # per vertex: (neighbor, weight)
    total_weight: int
    orig_id: list[int]  # dense id -> external id from the input file

    _csr_cache: tuple | None = field(default=None, repr=False, compare=False)

    @property
    def num_edges(self) -> int:
        loops = sum(1 for u in range(self.n) for v, _ in self.adjacency[u] if v == u)
        return (sum(len(a) for a in self.adjacency) + loops) // 2

    def weighted_degree(self, u: int) -> int:
        # a self-loop (u,u,w) contributes w once
        return sum(w for _, w in self.adjacency[u])

    def unweighted_degree(self, u: int) -> int:
        return sum(1 for v, _ in self.adjacency[u] if v != u)

    def edges(self) -> Iterable[tuple[int, int, int]]:
        """Yield each undirected edge once as (u, v, w) with u <= v."""
        for u in range(self.n):
            for v, w in self.adjacency[u]:
                if u <= v:
                    yield u, v, w

    def dense_of_orig(self) -> dict[int, int]:
        return {orig: dense for dense, orig in enumerate(self.orig_id)}

    def csr_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(indptr, indices, weights, weighted degrees) as numpy arrays."""
        if self._csr_cache is None:
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            for u in range(self.n):
                indptr[u + 1] = indptr[u] + len(self.adjacency[u])
            indices = np.empty(indptr[-1], dtype=np.int64)
            weights = np.empty(indptr[-1], dtype=np.int64)
            pos = 0
            for u in range(self.n):
                for v, w in self.adjacency[u]:
                    indices[pos] = v
                    weights[pos] = w
                    pos += 1
            degree = np.zeros(self.n, dtype=np.int64)
            for u in range(self.n):
                degree[u] = self.weighted_degree(u)
            self._csr_cache = (indptr, indices, weights, degree)
        return self._csr_cache


def _build_graph(n: int, edge_weights: dict[tuple[int, int], int], orig_id: list[int]) -> WeightedGraph:
    adjacency: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    total = 0
    for (u, v), w in sorted(edge_weights.items()):
        total += w
        adjacency[u].append((v, w))
        if u != v:
            adjacency[v].append((u, w))
    for a in adjacency:
        a.sort()
    return WeightedGraph(n=n, adjacency=adjacency, total_weight=total, orig_id=orig_id)


def parse_edge_list(text: str | bytes) -> WeightedGraph:
    """Parse edge-list text into a raw graph (self-loops kept, parallels merged).

    Raises DataError with the offending line number on malformed input,
    non-positive or fractional weights, and on empty input.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")

    dense: dict[int, int] = {}
    orig_id: list[int] = []
    edge_weights: dict[tuple[int, int], int] = {}

    def vertex(orig: int) -> int:
        if orig not in dense:
            dense[orig] = len(orig_id)
            orig_id.append(orig)
        return dense[orig]

    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) not in (2, 3):
            raise DataError(f"line {lineno}: expected 'u v' or 'u v w', got {stripped!r}")
        try:
            u_orig, v_orig = int(parts[0]), int(parts[1])
        except ValueError:
            raise DataError(f"line {lineno}: vertex ids must be integers, got {stripped!r}") from None
        if u_orig < 0 or v_orig < 0:
            raise DataError(f"line {lineno}: vertex ids must be nonnegative, got {stripped!r}")
        if len(parts) == 3:
            try:
                w = int(parts[2])
            except ValueError:
                raise DataError(
                    f"line {lineno}: weight must be a positive integer "
                    f"(pre-scale fractional weights), got {parts[2]!r}"
                ) from None
            if w <= 0:
                raise DataError(f"line {lineno}: weight must be positive, got {w}")
        else:
            w = 1
        u, v = vertex(u_orig), vertex(v_orig)
        key = (u, v) if u <= v else (v, u)
        edge_weights[key] = edge_weights.get(key, 0) + w

    if not orig_id:
        raise DataError("empty edge list: no edges found")
    return _build_graph(len(orig_id), edge_weights, orig_id)


def connected_components(g: WeightedGraph) -> list[list[int]]:
    """Components as sorted dense-id lists, ordered by smallest member."""
    seen = [False] * g.n
    comps: list[list[int]] = []
    for start in range(g.n):
        if seen[start]:
            continue
        comp = []
        queue = deque([start])
        seen[start] = True
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v, _ in g.adjacency[u]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        comps.append(sorted(comp))
    return comps


def is_connected(g: WeightedGraph) -> bool:
    return len(connected_components(g)) <= 1


def is_tree(g: WeightedGraph) -> bool:
    """Connected and acyclic (self-loops count as cycles)."""
    if any(v == u for u in range(g.n) for v, _ in g.adjacency[u]):
        return False
    return is_connected(g) and g.num_edges == g.n - 1


def preprocess(g: WeightedGraph) -> WeightedGraph:
    """Drop self-loops, keep the largest connected component, re-densify ids.

    Component-size ties break toward the component containing the smallest
    original id, so repeated runs see the same graph.
    """
    edge_weights = {
        (u, v): w for u in range(g.n) for v, w in g.adjacency[u] if u < v
    }
    stripped = _build_graph(g.n, edge_weights, list(g.orig_id))

    comps = connected_components(stripped)
    if not comps:
        raise DataError("graph is empty after preprocessing")
    best = max(comps, key=lambda c: (len(c), -min(g.orig_id[u] for u in c)))

    keep = sorted(best)
    remap = {old: new for new, old in enumerate(keep)}
    new_edges = {
        (remap[u], remap[v]): w
        for (u, v), w in edge_weights.items()
        if u in remap and v in remap
    }
    result = _build_graph(len(keep), new_edges, [g.orig_id[u] for u in keep])
    if result.n == 0:
        raise DataError("graph is empty after preprocessing")
    return result


def cut_weight(g: WeightedGraph, members: Iterable[int]) -> int:
    """Total weight of edges with exactly one endpoint in the given set."""
    inside = np.zeros(g.n, dtype=bool)
    for u in members:
        if not 0 <= u < g.n:
            raise DataError(f"vertex id {u} out of range 0..{g.n - 1}")
        inside[u] = True
    total = 0
    for u in np.flatnonzero(inside):
        for v, w in g.adjacency[u]:
            if not inside[v]:
                total += w
    return total


def induced_subgraph(g: WeightedGraph, members: Iterable[int]) -> tuple[WeightedGraph, list[int]]:
    """Subgraph on the given vertices plus the map sub-dense id -> g-dense id.

    The result may be disconnected; callers deal with that.
    """
    keep = sorted(set(members))
    if not keep:
        raise DataError("cannot take the subgraph induced by an empty vertex set")
    for u in keep:
        if not 0 <= u < g.n:
            raise DataError(f"vertex id {u} out of range 0..{g.n - 1}")
    remap = {old: new for new, old in enumerate(keep)}
    edge_weights: dict[tuple[int, int], int] = {}
    for u in keep:
        for v, w in g.adjacency[u]:
            if u <= v and v in remap:
                edge_weights[(remap[u], remap[v])] = w
    sub = _build_graph(len(keep), edge_weights, [g.orig_id[u] for u in keep])
    return sub, keep


def laplacian_matvec(g: WeightedGraph, x: np.ndarray) -> np.ndarray:
    """(Lx)_u = deg_w(u) * x_u - sum_v w(u,v) * x_v, in floating point."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise DataError(f"vector has shape {x.shape}, expected ({g.n},)")
    indptr, indices, weights, degree = g.csr_arrays()
    rows = np.repeat(np.arange(g.n), np.diff(indptr))
    out = degree.astype(np.float64) * x
    out -= np.bincount(rows, weights=weights * x[indices], minlength=g.n)
    return out


def serialize_edge_list(g: WeightedGraph) -> str:
    """Render as edge-list text using original ids; inverse of parse up to iso."""
    lines = [f"{g.orig_id[u]} {g.orig_id[v]} {w}" for u, v, w in g.edges()]
    return "\n".join(lines) + "\n"


def write_dense_edge_list(g: WeightedGraph, path: str) -> None:
    """Edge list with dense 0..n-1 ids, for handing to external partitioners."""
    with open(path, "w", encoding="utf-8") as fh:
        for u, v, w in g.edges():
            fh.write(f"{u} {v} {w}\n")
