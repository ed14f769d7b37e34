"""Shared generators for randomized tests; all seeded via random.Random."""

from __future__ import annotations

import random

from glsolve.graph import WeightedGraph, parse_edge_list, preprocess
from glsolve.tree import DecompTree, add_node, new_tree, validate_tree


def graph_from_edges(edges: list[tuple[int, int, int]]) -> WeightedGraph:
    text = "\n".join(f"{u} {v} {w}" for u, v, w in edges)
    return preprocess(parse_edge_list(text + "\n"))


def random_connected_graph(rng: random.Random, n: int, extra: int = 0, wmax: int = 4) -> WeightedGraph:
    """Random spanning tree plus `extra` extra edges, weights in 1..wmax."""
    edges = []
    for v in range(1, n):
        u = rng.randrange(v)
        edges.append((u, v, rng.randint(1, wmax)))
    present = {(u, v) for u, v, _ in edges}
    attempts = 0
    while extra > 0 and attempts < 50 * (extra + 1):
        attempts += 1
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in present:
            continue
        present.add(key)
        edges.append((key[0], key[1], rng.randint(1, wmax)))
        extra -= 1
    return graph_from_edges(edges)


def random_tree_graph(rng: random.Random, n: int, wmax: int = 8) -> WeightedGraph:
    return random_connected_graph(rng, n, extra=0, wmax=wmax)


def random_binary_tree(rng: random.Random, n_leaves: int, wmax: int = 4) -> DecompTree:
    """Random rooted binary DecompTree with integer weights in 1..wmax.

    Grown by splitting a random current leaf until n_leaves are present.
    """
    tree = new_tree(list(range(n_leaves)))
    root = add_node(tree, None, None)
    pending = [root]
    while len(pending) < n_leaves:
        node = pending.pop(rng.randrange(len(pending)))
        pending.append(add_node(tree, node, rng.randint(1, wmax)))
        pending.append(add_node(tree, node, rng.randint(1, wmax)))
    for label, nid in enumerate(sorted(pending)):
        tree.nodes[nid].leaf_label = label
        tree.leaf_of_vertex[label] = nid
    validate_tree(tree)
    return tree


def leaf_count(tree: DecompTree) -> int:
    return tree.num_leaves
