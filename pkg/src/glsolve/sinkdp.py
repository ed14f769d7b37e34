"""Exact sink-selection dynamic program on rooted binary trees.

Given a threshold tau = p/q, every leaf injects demand tau*f(v) and we
ask for the fewest leaves that, made into infinite sinks, let the whole
demand route through the tree's edge capacities. The DP cell (v, k) is
the largest extra flow that can be pushed into the subtree at v on top
of its own demand, using at most k sinks inside the subtree; the
threshold is feasible with k sinks iff the root cell at k is >= 0.

All values live in (1/q)-units, so after scaling edge weights by q and
leaf demands by p every finite cell is an integer and comparisons are
exact. The hot path packs these integers into int64 numpy arrays and
runs a numba kernel; a preflight bound computed in unbounded Python
integers guarantees the kernel cannot overflow, and instances that fail
the bound fall back to a pure-Python big-integer implementation with
identical semantics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DataError
from .tree import INF, DecompTree, postorder, subtree_leaf_counts

# Finite cell magnitudes are capped well below the sentinel codes so that
# sums of two finite values can never collide with them.
_FIN_LIMIT = 1 << 60
_NEG_CODE = -(1 << 62)
_POS_CODE = 1 << 62

INFEASIBLE = None  # min_sinks result when no budget within k_max works


class _Extreme:
    """Orderable +/- infinity sentinels for DP cell values."""

    __slots__ = ("_sign", "_name")

    def __init__(self, sign: int, name: str):
        self._sign = sign
        self._name = name

    def __repr__(self):
        return self._name

    def __lt__(self, other):
        if other is self:
            return False
        return self._sign < 0

    def __gt__(self, other):
        if other is self:
            return False
        return self._sign > 0

    def __le__(self, other):
        return self is other or self < other

    def __ge__(self, other):
        return self is other or self > other

    def __neg__(self):
        return POS_INF if self is NEG_INF else NEG_INF


NEG_INF = _Extreme(-1, "NEG_INF")
POS_INF = _Extreme(+1, "POS_INF")


def ext_add(x, y):
    """Sum with NEG_INF absorbing POS_INF: an over-capacity child cannot be
    repaired by its sibling."""
    if x is NEG_INF or y is NEG_INF:
        return NEG_INF
    if x is POS_INF or y is POS_INF:
        return POS_INF
    return x + y


def edge_bound(w, x):
    """Clamp the flow x across an edge of capacity w.

    Returns NEG_INF when x < -w (the edge cannot even drain the subtree's
    unmet demand), w when x > w, and x otherwise. Infinite capacity never
    clamps.
    """
    if x is NEG_INF:
        return NEG_INF
    if w == INF:
        return x
    if x is POS_INF:
        return w
    if x < -w:
        return NEG_INF
    if x > w:
        return w
    return x


@dataclass
class ScaledInstance:
    """A DP instance: tree, threshold tau >= 0, per-leaf importance, budget cap."""

    tree: DecompTree
    tau: Fraction
    importance: list[int]
    k_max: int

    def __post_init__(self):
        if self.tau < 0:
            raise DataError(f"threshold must be nonnegative, got {self.tau}")
        if self.k_max < 0:
            raise DataError(f"budget cap must be nonnegative, got {self.k_max}")
        n = self.tree.num_leaves
        if len(self.importance) != n:
            raise DataError(f"importance has {len(self.importance)} entries, tree has {n} leaves")
        for v, f in enumerate(self.importance):
            if not isinstance(f, int) or f < 0:
                raise DataError(f"importance of vertex {v} must be a nonnegative integer, got {f!r}")

    @property
    def tau_num(self) -> int:
        return self.tau.numerator

    @property
    def tau_den(self) -> int:
        return self.tau.denominator


class _TreeArrays:
    """Structure-of-arrays view of a binary tree in postorder, shared by
    every DP run on the same tree."""

    def __init__(self, tree: DecompTree):
        order = postorder(tree)
        counts = subtree_leaf_counts(tree)
        size = len(order)
        pos_of = {nid: i for i, nid in enumerate(order)}
        self.node_of_pos = order
        self.pos_of_node = pos_of
        self.left = np.full(size, -1, dtype=np.int64)
        self.right = np.full(size, -1, dtype=np.int64)
        self.wl = np.zeros(size, dtype=np.int64)  # -1 encodes INF
        self.wr = np.zeros(size, dtype=np.int64)
        self.leaf_vertex = np.full(size, -1, dtype=np.int64)
        self.nv = np.zeros(size, dtype=np.int64)
        self.total_finite_weight = 0
        for i, nid in enumerate(order):
            node = tree.nodes[nid]
            self.nv[i] = counts[nid]
            if node.children:
                if len(node.children) != 2:
                    raise DataError(
                        f"node {nid} has {len(node.children)} children; the DP requires a binary tree"
                    )
                c1, c2 = node.children
                self.left[i] = pos_of[c1]
                self.right[i] = pos_of[c2]
                w1 = tree.nodes[c1].parent_edge_weight
                w2 = tree.nodes[c2].parent_edge_weight
                self.wl[i] = -1 if w1 == INF else w1
                self.wr[i] = -1 if w2 == INF else w2
                for w in (w1, w2):
                    if w != INF:
                        self.total_finite_weight += w
            else:
                self.leaf_vertex[i] = node.leaf_label
        self.root_pos = size - 1
        self._cap_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def caps_offsets(self, k_max: int) -> tuple[np.ndarray, np.ndarray]:
        if k_max not in self._cap_cache:
            caps = np.minimum(self.nv, k_max) + 1
            offs = np.zeros(len(caps) + 1, dtype=np.int64)
            np.cumsum(caps, out=offs[1:])
            self._cap_cache[k_max] = (caps, offs)
        return self._cap_cache[k_max]


def _tree_arrays(tree: DecompTree) -> _TreeArrays:
    cached = tree._soa_cache.get("dp")
    if cached is None:
        cached = _TreeArrays(tree)
        tree._soa_cache["dp"] = cached
    return cached


@dataclass
class DPTable:
    """Computed DP cells plus everything backtracking needs."""

    instance: ScaledInstance
    arrays: _TreeArrays = field(repr=False)
    caps: np.ndarray = field(repr=False)
    offsets: np.ndarray = field(repr=False)
    backend: str = "i64"  # "i64" or "py"
    cells_i64: np.ndarray | None = field(default=None, repr=False)
    cells_py: list | None = field(default=None, repr=False)
    forced: np.ndarray | None = field(default=None, repr=False)
    scaled: tuple | None = field(default=None, repr=False)  # (base, wl, wr) int64

    def cell(self, node_id: int, k: int):
        """DP value at (tree node, budget k); int, NEG_INF, or POS_INF."""
        pos = self.arrays.pos_of_node[node_id]
        if not 0 <= k < self.caps[pos]:
            raise IndexError(f"budget {k} outside 0..{self.caps[pos] - 1} for node {node_id}")
        if self.backend == "i64":
            return _decode(int(self.cells_i64[self.offsets[pos] + k]))
        return self.cells_py[pos][k]

    def root_row(self) -> list:
        root = self.arrays.node_of_pos[self.arrays.root_pos]
        return [self.cell(root, k) for k in range(self.caps[self.arrays.root_pos])]


def _decode(code: int):
    if code == _NEG_CODE:
        return NEG_INF
    if code == _POS_CODE:
        return POS_INF
    return code


def _overflow_bound(p: int, q: int, total_importance: int, total_finite_weight: int) -> int:
    # Every finite cell is bounded by the total scaled demand plus the total
    # scaled finite capacity: values only enter through leaf bases (-p*f) and
    # clamps at +-q*w, and INF edges forward sums of those.
    return p * total_importance + q * total_finite_weight


def dp_solve(inst: ScaledInstance, forced_labels: set[int] | None = None) -> DPTable:
    """Fill the DP table bottom-up.

    forced_labels fixes the selection instead of optimizing it: forced
    leaves behave as already-chosen sinks at budget 0 (their base cell is
    POS_INF) and the budget dimension degenerates; pass k_max=0 for pure
    feasibility checks of a fixed selection.
    """
    arr = _tree_arrays(inst.tree)
    caps, offs = arr.caps_offsets(inst.k_max)
    p, q = inst.tau_num, inst.tau_den

    forced = None
    if forced_labels is not None:
        forced = np.zeros(len(arr.node_of_pos), dtype=np.int8)
        leaf_pos = {int(arr.leaf_vertex[i]): i for i in range(len(arr.node_of_pos)) if arr.leaf_vertex[i] >= 0}
        for v in forced_labels:
            if v not in leaf_pos:
                raise DataError(f"forced label {v} is not a leaf vertex of the tree")
            forced[leaf_pos[v]] = 1

    total_importance = sum(inst.importance)
    bound = _overflow_bound(p, q, total_importance, arr.total_finite_weight)
    if max(bound, p, q) <= _FIN_LIMIT and _kernels_available():
        base, wl, wr = _scaled_arrays(inst, arr, forced)
        cells = np.empty(int(offs[-1]), dtype=np.int64)
        from ._dpkernels import dp_fill

        dp_fill(arr.left, arr.right, wl, wr, base, caps, offs, cells)
        return DPTable(
            instance=inst, arrays=arr, caps=caps, offsets=offs,
            backend="i64", cells_i64=cells, forced=forced, scaled=(base, wl, wr),
        )

    cells_py = _dp_fill_python(inst, arr, caps, forced)
    return DPTable(
        instance=inst, arrays=arr, caps=caps, offsets=offs,
        backend="py", cells_py=cells_py, forced=forced,
    )


def _scaled_arrays(inst: ScaledInstance, arr: _TreeArrays, forced) -> tuple:
    """int64 leaf bases and scaled edge capacities (-1 keeps encoding INF)."""
    p, q = inst.tau_num, inst.tau_den
    imp = np.asarray(inst.importance, dtype=np.int64)
    base = np.zeros(len(arr.node_of_pos), dtype=np.int64)
    leaf_mask = arr.leaf_vertex >= 0
    base[leaf_mask] = -p * imp[arr.leaf_vertex[leaf_mask]]
    if forced is not None:
        base[forced.astype(bool)] = _POS_CODE
    wl = np.where(arr.wl < 0, np.int64(-1), arr.wl * np.int64(q))
    wr = np.where(arr.wr < 0, np.int64(-1), arr.wr * np.int64(q))
    return base, wl, wr


def _dp_fill_python(inst: ScaledInstance, arr: _TreeArrays, caps, forced) -> list:
    """Reference implementation over unbounded Python integers."""
    p, q = inst.tau_num, inst.tau_den
    size = len(arr.node_of_pos)
    cells: list = [None] * size
    for i in range(size):
        v = int(arr.leaf_vertex[i])
        cap = int(caps[i])
        if v >= 0:
            if forced is not None and forced[i]:
                row = [POS_INF] * cap
            else:
                row = [-p * inst.importance[v]] + [POS_INF] * (cap - 1)
            cells[i] = row
            continue
        li, ri = int(arr.left[i]), int(arr.right[i])
        wl = INF if arr.wl[i] < 0 else int(arr.wl[i]) * q
        wr = INF if arr.wr[i] < 0 else int(arr.wr[i]) * q
        bl = [edge_bound(wl, x) for x in cells[li]]
        br = [edge_bound(wr, x) for x in cells[ri]]
        row = []
        for k in range(cap):
            best = NEG_INF
            a_min = max(0, k - (len(br) - 1))
            a_max = min(k, len(bl) - 1)
            for a in range(a_min, a_max + 1):
                s = ext_add(bl[a], br[k - a])
                if best < s:
                    best = s
            row.append(best)
        cells[i] = row
    return cells


def _kernels_available() -> bool:
    try:
        from . import _dpkernels  # noqa: F401
        return True
    except ImportError:
        return False


def min_sinks(table: DPTable):
    """Smallest budget k with a nonnegative root cell, or INFEASIBLE (None)."""
    root_pos = table.arrays.root_pos
    cap = int(table.caps[root_pos])
    for k in range(cap):
        value = table.cell(table.arrays.node_of_pos[root_pos], k)
        if value is POS_INF or (value is not NEG_INF and value >= 0):
            return k
    return INFEASIBLE


def backtrack(inst: ScaledInstance, table: DPTable, k: int) -> set[int]:
    """Recover a selection achieving the root cell at budget k.

    Ties between budget splits resolve toward the smallest left-child
    share, so the result is deterministic. Returns dense leaf vertex ids;
    the result may be smaller than k.
    """
    root_pos = table.arrays.root_pos
    if not 0 <= k < table.caps[root_pos]:
        raise DataError(f"budget {k} outside the computed table")
    root_value = table.cell(table.arrays.node_of_pos[root_pos], k)
    if root_value is NEG_INF or (root_value is not POS_INF and root_value < 0):
        raise DataError(f"budget {k} is infeasible at this threshold; nothing to backtrack")

    if table.backend == "i64":
        from ._dpkernels import dp_backtrack

        arr = table.arrays
        base, wl, wr = table.scaled
        chosen = np.zeros(len(arr.node_of_pos), dtype=np.int8)
        ok = dp_backtrack(
            arr.left, arr.right, wl, wr, table.caps, table.offsets,
            table.cells_i64, arr.root_pos, k, chosen,
        )
        if ok != 0:
            raise AssertionError("no maximizing split found during backtracking")
        labels = {int(arr.leaf_vertex[i]) for i in np.flatnonzero(chosen) if arr.leaf_vertex[i] >= 0}
    else:
        labels = _backtrack_python(inst, table, k)

    if table.forced is not None:
        labels |= {int(v) for v in table.arrays.leaf_vertex[np.flatnonzero(table.forced)]}
    return labels


def _backtrack_python(inst: ScaledInstance, table: DPTable, k: int) -> set[int]:
    arr = table.arrays
    q = inst.tau_den
    cells = table.cells_py
    labels: set[int] = set()
    stack = [(arr.root_pos, k)]
    while stack:
        pos, budget = stack.pop()
        v = int(arr.leaf_vertex[pos])
        if v >= 0:
            if budget >= 1 and not (table.forced is not None and table.forced[pos]):
                labels.add(v)
            continue
        li, ri = int(arr.left[pos]), int(arr.right[pos])
        wl = INF if arr.wl[pos] < 0 else int(arr.wl[pos]) * q
        wr = INF if arr.wr[pos] < 0 else int(arr.wr[pos]) * q
        target = cells[pos][budget]
        found = False
        a_min = max(0, budget - (len(cells[ri]) - 1))
        a_max = min(budget, len(cells[li]) - 1)
        for a in range(a_min, a_max + 1):
            s = ext_add(edge_bound(wl, cells[li][a]), edge_bound(wr, cells[ri][budget - a]))
            if s is target or s == target:
                stack.append((li, a))
                stack.append((ri, budget - a))
                found = True
                break
        if not found:
            raise AssertionError("no maximizing split found during backtracking")
    return labels


def fixed_selection_feasible(
    tree: DecompTree, labels: set[int], tau: Fraction, importance: list[int]
) -> bool:
    """Does the fixed selection route the full demand at threshold tau?

    This is the budget-0 DP with the selected leaves forced to sinks; it
    is the fixed-L side of the threshold/flow equivalence and is used by
    the objective evaluators.
    """
    inst = ScaledInstance(tree=tree, tau=tau, importance=importance, k_max=0)
    table = dp_solve(inst, forced_labels=labels)
    root = table.arrays.node_of_pos[table.arrays.root_pos]
    value = table.cell(root, 0)
    return value is POS_INF or (value is not NEG_INF and value >= 0)
