import random

import pytest

from glsolve.errors import DataError
from glsolve.tree import (
    INF,
    add_node,
    new_tree,
    parse_dt_text,
    postorder,
    subtree_leaf_counts,
    to_dt_text,
    validate_tree,
)

from util import random_binary_tree


def two_leaf_tree():
    t = new_tree([10, 20])
    root = add_node(t, None, None)
    add_node(t, root, 3, leaf_label=0)
    add_node(t, root, INF, leaf_label=1)
    return t


def test_round_trip_preserves_structure():
    t = two_leaf_tree()
    text = to_dt_text(t)
    back = parse_dt_text(text)
    assert back.num_leaves == 2
    assert back.orig_ids == [10, 20]
    weights = sorted(
        (nd.parent_edge_weight for nd in back.nodes if nd.parent is not None),
        key=lambda w: (w == INF, w),
    )
    assert weights == [3, INF]
    assert to_dt_text(back) == text


def test_round_trip_random_trees():
    rng = random.Random(11)
    for _ in range(25):
        t = random_binary_tree(rng, rng.randint(1, 12), wmax=9)
        text = to_dt_text(t)
        back = parse_dt_text(text)
        assert to_dt_text(back) == text
        assert back.num_leaves == t.num_leaves


def test_header_is_documented_format():
    t = two_leaf_tree()
    first = to_dt_text(t).splitlines()[0]
    assert first == "glstree 1 3 2"


@pytest.mark.parametrize(
    "text",
    [
        "",
        "glstree 2 1 1\n0 -1 0 0\n",
        "glstree 1 2 1\n0 -1 0 -1\n",  # node count mismatch
        "glstree 1 2 2\n0 -1 0 5\n1 0 0 6\n",  # nonpositive weight
        "glstree 1 2 2\n0 -1 0 5\n1 5 1 6\n",  # parent after child
        "glstree 1 3 2\n0 -1 0 -1\n1 0 2 7\n2 0 1 7\n",  # duplicate label
    ],
)
def test_parse_rejects_malformed(text):
    with pytest.raises(DataError):
        parse_dt_text(text)


def test_validate_catches_broken_links():
    t = two_leaf_tree()
    t.nodes[1].parent = 2
    with pytest.raises(DataError):
        validate_tree(t)


def test_postorder_children_first():
    rng = random.Random(12)
    t = random_binary_tree(rng, 9)
    seen = set()
    for nid in postorder(t):
        for c in t.nodes[nid].children:
            assert c in seen
        seen.add(nid)
    assert len(seen) == len(t.nodes)


def test_subtree_leaf_counts():
    rng = random.Random(13)
    t = random_binary_tree(rng, 7)
    counts = subtree_leaf_counts(t)
    assert counts[t.root] == 7
    for nid, node in enumerate(t.nodes):
        if node.children:
            assert counts[nid] == sum(counts[c] for c in node.children)
        else:
            assert counts[nid] == 1
