"""Rooted leaf-labeled decomposition trees and their ".dt" text format.

Leaves biject with the vertices of the graph the tree was built from;
internal edges carry positive integer weights or INF (math.inf). INF
edges only ever come from binarization or the exact tree-to-tree
construction, and by design never participate in any finite minimum cut.

File format (".dt", UTF-8): header line "glstree 1 <num_nodes> <num_leaves>",
then one line per node "<node_id> <parent_id|-1> <parent_edge_weight|inf>
<leaf_vertex_orig_id|-1>". Node 0 is the root and every parent precedes
its children.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DataError

INF = math.inf  # edge-weight sentinel; never mixed into finite arithmetic


@dataclass
class TreeNode:
    parent: int | None
    parent_edge_weight: int | float | None  # None only at the root
    children: list[int] = field(default_factory=list)
    leaf_label: int | None = None  # dense graph vertex; set iff no children


@dataclass
class DecompTree:
    nodes: list[TreeNode]
    root: int
    leaf_of_vertex: dict[int, int]  # dense graph vertex -> leaf node id
    orig_ids: list[int]  # dense graph vertex -> original external id

    _soa_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def num_leaves(self) -> int:
        return len(self.leaf_of_vertex)

    def leaves(self) -> list[int]:
        return [nid for nid, nd in enumerate(self.nodes) if not nd.children]

    def max_arity(self) -> int:
        return max((len(nd.children) for nd in self.nodes), default=0)

    def total_finite_weight(self) -> int:
        return sum(
            nd.parent_edge_weight
            for nd in self.nodes
            if nd.parent is not None and nd.parent_edge_weight != INF
        )

    def invalidate_caches(self) -> None:
        self._soa_cache.clear()


def new_tree(orig_ids: list[int]) -> DecompTree:
    return DecompTree(nodes=[], root=-1, leaf_of_vertex={}, orig_ids=list(orig_ids))


def add_node(
    tree: DecompTree,
    parent: int | None,
    weight: int | float | None,
    leaf_label: int | None = None,
) -> int:
    nid = len(tree.nodes)
    tree.nodes.append(TreeNode(parent=parent, parent_edge_weight=weight, leaf_label=leaf_label))
    if parent is None:
        tree.root = nid
    else:
        tree.nodes[parent].children.append(nid)
    if leaf_label is not None:
        tree.leaf_of_vertex[leaf_label] = nid
    return nid


def validate_tree(tree: DecompTree) -> None:
    """Check structural invariants; raises DataError on the first violation."""
    n_nodes = len(tree.nodes)
    if n_nodes == 0:
        raise DataError("tree has no nodes")
    if not 0 <= tree.root < n_nodes or tree.nodes[tree.root].parent is not None:
        raise DataError("tree root is missing or has a parent")
    seen_leaves = {}
    reached = 0
    stack = [tree.root]
    visited = [False] * n_nodes
    while stack:
        nid = stack.pop()
        if visited[nid]:
            raise DataError(f"node {nid} reached twice; tree has a cycle")
        visited[nid] = True
        reached += 1
        node = tree.nodes[nid]
        if nid != tree.root:
            w = node.parent_edge_weight
            if w != INF and (not isinstance(w, int) or w <= 0):
                raise DataError(f"node {nid}: edge weight must be a positive integer or inf, got {w!r}")
        if node.children:
            if node.leaf_label is not None:
                raise DataError(f"node {nid} has both children and a leaf label")
            for c in node.children:
                if tree.nodes[c].parent != nid:
                    raise DataError(f"node {c}: parent link does not match child list of {nid}")
                stack.append(c)
        else:
            if node.leaf_label is None:
                raise DataError(f"node {nid} is a leaf without a label")
            if node.leaf_label in seen_leaves:
                raise DataError(f"vertex {node.leaf_label} labels two leaves")
            seen_leaves[node.leaf_label] = nid
    if reached != n_nodes:
        raise DataError("tree has unreachable nodes")
    if seen_leaves != tree.leaf_of_vertex:
        raise DataError("leaf_of_vertex map is inconsistent with the node array")
    n = len(tree.leaf_of_vertex)
    if sorted(tree.leaf_of_vertex) != list(range(n)):
        raise DataError("leaf labels must be exactly the dense ids 0..n-1")
    if len(tree.orig_ids) != n:
        raise DataError("orig_ids length does not match the number of leaves")


def to_dt_text(tree: DecompTree) -> str:
    """Serialize with nodes renumbered so the root is 0 and parents precede children."""
    order: list[int] = []
    stack = [tree.root]
    while stack:
        nid = stack.pop()
        order.append(nid)
        # reversed so children serialize in their child-list order
        stack.extend(reversed(tree.nodes[nid].children))
    renum = {old: new for new, old in enumerate(order)}

    lines = [f"glstree 1 {len(tree.nodes)} {tree.num_leaves}"]
    for old in order:
        node = tree.nodes[old]
        parent = -1 if node.parent is None else renum[node.parent]
        if node.parent is None:
            weight = "0"  # root carries no parent edge
        else:
            weight = "inf" if node.parent_edge_weight == INF else str(node.parent_edge_weight)
        label = -1 if node.leaf_label is None else tree.orig_ids[node.leaf_label]
        lines.append(f"{renum[old]} {parent} {weight} {label}")
    return "\n".join(lines) + "\n"


def parse_dt_text(text: str) -> DecompTree:
    """Parse and validate a ".dt" file.

    Dense vertex ids are assigned to leaf labels in node-id order; the
    original ids are kept in orig_ids so graphs can be matched up later.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DataError("empty tree file")
    header = lines[0].split()
    if len(header) != 4 or header[0] != "glstree" or header[1] != "1":
        raise DataError(f"bad header {lines[0]!r}; expected 'glstree 1 <nodes> <leaves>'")
    try:
        n_nodes, n_leaves = int(header[2]), int(header[3])
    except ValueError:
        raise DataError(f"bad header counts in {lines[0]!r}") from None
    if len(lines) - 1 != n_nodes:
        raise DataError(f"header promises {n_nodes} nodes, file has {len(lines) - 1}")

    nodes = [TreeNode(parent=None, parent_edge_weight=None) for _ in range(n_nodes)]
    leaf_orig: list[tuple[int, int]] = []  # (node id, original vertex id)
    seen = [False] * n_nodes
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 4:
            raise DataError(f"line {lineno}: expected 4 fields, got {line!r}")
        try:
            nid, parent = int(parts[0]), int(parts[1])
            label = int(parts[3])
        except ValueError:
            raise DataError(f"line {lineno}: malformed integer field in {line!r}") from None
        if not 0 <= nid < n_nodes or seen[nid]:
            raise DataError(f"line {lineno}: bad or repeated node id {nid}")
        seen[nid] = True
        if parent == -1:
            if nid != 0:
                raise DataError(f"line {lineno}: only node 0 may be the root")
        else:
            if not 0 <= parent < nid:
                raise DataError(f"line {lineno}: parent {parent} must precede node {nid}")
            if parts[2] == "inf":
                weight: int | float = INF
            else:
                try:
                    weight = int(parts[2])
                except ValueError:
                    raise DataError(f"line {lineno}: weight must be an integer or 'inf'") from None
                if weight <= 0:
                    raise DataError(f"line {lineno}: weight must be positive, got {weight}")
            nodes[nid].parent = parent
            nodes[nid].parent_edge_weight = weight
            nodes[parent].children.append(nid)
        if label != -1:
            leaf_orig.append((nid, label))

    if not all(seen):
        raise DataError("tree file is missing node lines")
    orig_ids = [orig for _, orig in leaf_orig]
    if len(set(orig_ids)) != len(orig_ids):
        raise DataError("duplicate leaf vertex ids in tree file")
    leaf_of_vertex = {}
    for dense, (nid, _) in enumerate(leaf_orig):
        nodes[nid].leaf_label = dense
        leaf_of_vertex[dense] = nid

    tree = DecompTree(nodes=nodes, root=0, leaf_of_vertex=leaf_of_vertex, orig_ids=orig_ids)
    validate_tree(tree)
    if n_leaves != tree.num_leaves:
        raise DataError(f"header promises {n_leaves} leaves, tree has {tree.num_leaves}")
    return tree


def save_dt(tree: DecompTree, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_dt_text(tree))


def load_dt(path: str) -> DecompTree:
    with open(path, encoding="utf-8") as fh:
        return parse_dt_text(fh.read())


def postorder(tree: DecompTree) -> list[int]:
    """Children-before-parent node order (iterative, safe for deep trees)."""
    out: list[int] = []
    stack: list[tuple[int, bool]] = [(tree.root, False)]
    while stack:
        nid, expanded = stack.pop()
        if expanded:
            out.append(nid)
        else:
            stack.append((nid, True))
            for c in tree.nodes[nid].children:
                stack.append((c, False))
    return out


def subtree_leaf_counts(tree: DecompTree) -> list[int]:
    counts = [0] * len(tree.nodes)
    for nid in postorder(tree):
        node = tree.nodes[nid]
        if not node.children:
            counts[nid] = 1
        else:
            counts[nid] = sum(counts[c] for c in node.children)
    return counts
