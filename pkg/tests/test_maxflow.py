import random

import pytest

from glsolve.errors import DataError
from glsolve.maxflow import INF, FlowNetwork, max_flow


def test_single_path_bottleneck():
    net = FlowNetwork(num_nodes=3, source=0, sink=2)
    net.add_arc(0, 1, 3)
    net.add_arc(1, 2, 5)
    value, cert = max_flow(net)
    assert value == 3
    assert cert.source_side == {0}
    assert cert.value == 3


def test_disconnected_sink():
    net = FlowNetwork(num_nodes=3, source=0, sink=2)
    net.add_arc(0, 1, 4)
    value, cert = max_flow(net)
    assert value == 0
    assert 2 not in cert.source_side


def test_infinite_path_reports_inf():
    net = FlowNetwork(num_nodes=3, source=0, sink=2)
    net.add_arc(0, 1, INF)
    net.add_arc(1, 2, INF)
    value, cert = max_flow(net)
    assert value == INF
    assert cert is None


def test_inf_edge_not_on_cut_side():
    # finite arc into an INF drain: flow limited by the finite arc
    net = FlowNetwork(num_nodes=4, source=0, sink=3)
    net.add_arc(0, 1, 7)
    net.add_arc(0, 2, 2)
    net.add_arc(1, 3, 4)
    net.add_arc(2, 3, INF)
    value, cert = max_flow(net)
    assert value == 6
    assert cert.value == 6


def test_undirected_edges_carry_flow_both_ways():
    net = FlowNetwork(num_nodes=4, source=0, sink=3)
    net.add_edge(0, 1, 1)
    net.add_edge(0, 2, 1)
    net.add_edge(1, 2, 5)
    net.add_edge(1, 3, 2)
    value, _ = max_flow(net)
    assert value == 2


def test_classic_diamond():
    net = FlowNetwork(num_nodes=4, source=0, sink=3)
    net.add_arc(0, 1, 10)
    net.add_arc(0, 2, 10)
    net.add_arc(1, 2, 1)
    net.add_arc(1, 3, 10)
    net.add_arc(2, 3, 10)
    value, cert = max_flow(net)
    assert value == 20
    assert cert.value == 20


def test_rejects_bad_capacity():
    net = FlowNetwork(num_nodes=2, source=0, sink=1)
    with pytest.raises(DataError):
        net.add_arc(0, 1, -1)
    with pytest.raises(DataError):
        net.add_arc(0, 1, 1.5)


def test_certificate_matches_flow_on_random_networks():
    rng = random.Random(21)
    for _ in range(60):
        n = rng.randint(4, 10)
        net = FlowNetwork(num_nodes=n, source=0, sink=n - 1)
        for _ in range(rng.randint(n, 3 * n)):
            u, v = rng.randrange(n), rng.randrange(n)
            if u == v or v == 0 or u == n - 1:
                continue
            if rng.random() < 0.5:
                net.add_arc(u, v, rng.randint(0, 9))
            else:
                net.add_edge(u, v, rng.randint(0, 9))
        value, cert = max_flow(net)
        assert value == cert.value  # re-verified inside max_flow as well
        assert 0 in cert.source_side and n - 1 not in cert.source_side


def test_matches_slow_reference_on_random_dags():
    # reference: brute-force min cut over all source-side subsets
    rng = random.Random(22)
    for _ in range(40):
        n = rng.randint(3, 7)
        arcs = []
        for u in range(n):
            for v in range(n):
                if u != v and rng.random() < 0.45:
                    arcs.append((u, v, rng.randint(0, 6)))
        net = FlowNetwork(num_nodes=n, source=0, sink=n - 1)
        for u, v, c in arcs:
            net.add_arc(u, v, c)
        value, _ = max_flow(net)
        best = None
        for mask in range(1 << n):
            if not mask & 1 or mask & (1 << (n - 1)):
                continue
            cut = sum(c for u, v, c in arcs if mask & (1 << u) and not mask & (1 << v))
            best = cut if best is None else min(best, cut)
        assert value == best
