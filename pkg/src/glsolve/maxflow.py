"""Exact integral s-t max-flow with a verified min-cut certificate.

Dinic's blocking-flow algorithm over integer capacities. Infinite
capacities are a reserved sentinel (math.inf), never a large finite
number: residual capacity of an INF arc stays INF no matter how much
flow it carries, so INF can never leak into a finite cut value. If t is
reachable from s through INF arcs alone, the flow value is INF and no
finite cut exists.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .errors import DataError

INF = math.inf


@dataclass
class FlowNetwork:
    """Directed arc list with residual bookkeeping. Undirected edges are
    added as two opposing arcs that share capacity through their reverse
    entries."""

    num_nodes: int
    source: int
    sink: int
    # parallel arrays: head, capacity (int or INF), flow, index of reverse arc
    head: list[int] = field(default_factory=list)
    cap: list = field(default_factory=list)
    out: list[list[int]] = field(default_factory=list)  # per node: arc indices

    def __post_init__(self):
        if not self.out:
            self.out = [[] for _ in range(self.num_nodes)]
        if not (0 <= self.source < self.num_nodes and 0 <= self.sink < self.num_nodes):
            raise DataError("source/sink out of range")
        if self.source == self.sink:
            raise DataError("source and sink must differ")

    def add_arc(self, u: int, v: int, capacity) -> None:
        """Directed arc u -> v. Capacity is a nonnegative int or INF."""
        self._check(u, v, capacity)
        self._push(u, v, capacity)
        self._push(v, u, 0)

    def add_edge(self, u: int, v: int, capacity) -> None:
        """Undirected edge: capacity available in both directions."""
        self._check(u, v, capacity)
        self._push(u, v, capacity)
        self._push(v, u, capacity)

    def _check(self, u: int, v: int, capacity) -> None:
        if not (0 <= u < self.num_nodes and 0 <= v < self.num_nodes):
            raise DataError(f"arc ({u},{v}) out of range")
        if capacity != INF and (not isinstance(capacity, int) or capacity < 0):
            raise DataError(f"capacity must be a nonnegative integer or INF, got {capacity!r}")

    def _push(self, u: int, v: int, capacity) -> None:
        self.out[u].append(len(self.head))
        self.head.append(v)
        self.cap.append(capacity)


@dataclass
class CutCertificate:
    source_side: set[int]
    value: int


def _residual(cap, used):
    return INF if cap == INF else cap - used


def max_flow(net: FlowNetwork):
    """Run Dinic; returns (value, certificate).

    value is an int, or INF when s reaches t over INF-only arcs (then the
    certificate is None). The certificate's capacity is recomputed from
    scratch and asserted equal to the flow value on every call.
    """
    n = net.num_nodes
    s, t = net.source, net.sink
    head, cap = net.head, net.cap
    flow = [0] * len(head)

    # INF-only reachability: if t is reachable, no finite cut exists.
    seen = [False] * n
    seen[s] = True
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for a in net.out[u]:
            if cap[a] == INF and not seen[head[a]]:
                seen[head[a]] = True
                queue.append(head[a])
    if seen[t]:
        return INF, None

    level = [0] * n
    it = [0] * n
    total = 0

    def bfs() -> bool:
        for i in range(n):
            level[i] = -1
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for a in net.out[u]:
                v = head[a]
                if level[v] < 0 and _residual(cap[a], flow[a]) > 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level[t] >= 0

    # Finite bound on any single augmentation: total finite capacity out of s
    # is itself a cut bound, so INF bottlenecks can be capped by it.
    s_bound = sum(c for a in net.out[s] for c in [cap[a]] if c != INF)
    inf_bound = s_bound + 1

    def augment() -> int:
        """One augmenting path in the level graph (iterative advance/retreat)."""
        path: list[tuple[int, int]] = []  # (tail node, arc index)
        u = s
        while True:
            if u == t:
                bottleneck = inf_bound
                for _, a in path:
                    res = _residual(cap[a], flow[a])
                    if res != INF and res < bottleneck:
                        bottleneck = res
                for _, a in path:
                    flow[a] += bottleneck
                    flow[a ^ 1] -= bottleneck
                return bottleneck
            advanced = False
            while it[u] < len(net.out[u]):
                a = net.out[u][it[u]]
                v = head[a]
                if level[v] == level[u] + 1 and _residual(cap[a], flow[a]) > 0:
                    path.append((u, a))
                    u = v
                    advanced = True
                    break
                it[u] += 1
            if not advanced:
                if u == s:
                    return 0
                u, _ = path.pop()
                it[u] += 1

    while bfs():
        for i in range(n):
            it[i] = 0
        while True:
            pushed = augment()
            if pushed == 0:
                break
            total += pushed

    # Min-cut certificate: residual-reachable side of s.
    reach = [False] * n
    reach[s] = True
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for a in net.out[u]:
            v = head[a]
            if not reach[v] and _residual(cap[a], flow[a]) > 0:
                reach[v] = True
                queue.append(v)
    assert not reach[t], "positive residual path after Dinic terminated"

    cut_value = 0
    for u in range(n):
        if not reach[u]:
            continue
        for a in net.out[u]:
            if not reach[head[a]] and cap[a] != INF and cap[a] > 0:
                cut_value += cap[a]
            assert not (cap[a] == INF and not reach[head[a]]), "INF arc crosses the certificate cut"
    assert cut_value == total, f"certificate capacity {cut_value} != flow value {total}"
    certificate = CutCertificate(source_side={u for u in range(n) if reach[u]}, value=cut_value)
    return total, certificate
