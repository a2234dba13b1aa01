import itertools
import math

import numpy as np
import pytest

from wsnfusion.errors import InputError
from wsnfusion.routing import (
    build_mst,
    euclidean_distance,
    receiver_counts,
    total_weight,
    transmission_schedule,
)
from wsnfusion.verify import brute_force_mst_weight, spanning_tree_parents


def kruskal_weight(pts):
    """Independent oracle: Kruskal with union-find over all pairs."""
    n = len(pts)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    total = 0.0
    for d, i, j in sorted((math.dist(pts[i], pts[j]), i, j) for i, j in itertools.combinations(range(n), 2)):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            total += d
    return total


def test_euclidean_distance():
    assert euclidean_distance((0, 0), (3, 4)) == 5.0
    assert euclidean_distance((2.5, -1), (2.5, -1)) == 0.0
    p, q = (1.2, 7.0), (-3.3, 0.4)
    assert euclidean_distance(p, q) == euclidean_distance(q, p)


def test_enumeration_oracle_counts_cayley():
    assert [len(spanning_tree_parents(n)) for n in range(2, 9)] == [n ** (n - 2) for n in range(2, 9)]


def test_two_nodes_single_edge():
    tree = build_mst({4: (0, 0), 9: (3, 4)}, root=9)
    assert tree.edges == ((9, 4, 5.0),)
    assert tree.depth == 1


def test_unit_square():
    square = [(0, 0), (1, 0), (1, 1), (0, 1)]
    tree = build_mst(dict(enumerate(square)), root=0)
    assert total_weight(tree) == pytest.approx(3.0)
    assert brute_force_mst_weight(square) == pytest.approx(3.0)
    assert all(length == 1.0 for _, _, length in tree.edges)


def test_single_node_and_colocated():
    assert build_mst({3: (1, 1)}, root=3).edges == ()
    assert total_weight(build_mst({3: (1, 1)}, root=3)) == 0.0
    tree = build_mst({0: (5, 5), 1: (5, 5), 2: (5, 5)}, root=0)
    assert len(tree.edges) == 2 and total_weight(tree) == 0.0


def test_input_errors():
    with pytest.raises(InputError):
        build_mst([(0, (0, 0)), (0, (1, 1))], root=0)
    with pytest.raises(InputError):
        build_mst({0: (0, 0)}, root=5)


def test_tie_breaking_prefers_lower_ids():
    # node 0 at the centre, 1..4 on a unit cross: all first edges weigh 1
    tree = build_mst({0: (0, 0), 2: (0, 1), 1: (1, 0), 3: (-1, 0), 4: (0, -1)}, root=0)
    assert [child for _, child, _ in tree.edges] == [1, 2, 3, 4]
    assert all(parent == 0 for parent, _, _ in tree.edges)


def test_prim_matches_enumeration_and_kruskal():
    rng = np.random.default_rng(2024)
    for _ in range(120):
        n = int(rng.integers(4, 9))
        pts = rng.uniform(0, 100, (n, 2))
        root = int(rng.integers(n))
        tree = build_mst(dict(enumerate(pts.tolist())), root)
        w = total_weight(tree)
        assert w == pytest.approx(brute_force_mst_weight(pts), abs=1e-9)
        assert w == pytest.approx(kruskal_weight(pts.tolist()), abs=1e-9)


def test_prim_matches_kruskal_on_larger_clusters():
    rng = np.random.default_rng(7)
    for _ in range(30):
        n = int(rng.integers(10, 60))
        pts = rng.uniform(0, 500, (n, 2)).tolist()
        assert total_weight(build_mst(dict(enumerate(pts)), 0)) == pytest.approx(kruskal_weight(pts), abs=1e-9)


def test_tree_is_spanning_and_connected():
    rng = np.random.default_rng(1)
    pts = dict(enumerate(rng.uniform(0, 50, (25, 2)).tolist()))
    tree = build_mst(pts, root=12)
    assert len(tree.edges) == len(pts) - 1
    parents = tree.parent_map()
    for v in pts:
        seen = set()
        while v != tree.root:
            assert v not in seen
            seen.add(v)
            v = parents[v][0]


def test_cut_property_on_small_instances():
    rng = np.random.default_rng(99)
    for _ in range(40):
        n = int(rng.integers(3, 7))
        pts = rng.uniform(0, 10, (n, 2))
        tree = build_mst(dict(enumerate(pts.tolist())), 0)
        in_tree = {frozenset((p, c)) for p, c, _ in tree.edges}
        for mask in range(1, 2 ** (n - 1)):
            side = {i for i in range(n) if mask >> i & 1}
            crossing = [(math.dist(pts[i], pts[j]), frozenset((i, j))) for i in side for j in range(n) if j not in side]
            best = min(d for d, _ in crossing)
            assert any(e in in_tree for d, e in crossing if d == pytest.approx(best, abs=1e-12))


def test_schedule_examples():
    assert transmission_schedule(build_mst({0: (0, 0)}, 0)) == []
    star = transmission_schedule(build_mst({0: (0, 0), 2: (1, 0), 1: (-1, 0)}, 0))
    assert star == [(1, 0, 1.0), (2, 0, 1.0)]
    chain = transmission_schedule(build_mst({10: (0, 0), 11: (1, 0), 12: (2, 0)}, 10))
    assert [s for s, _, _ in chain] == [12, 11]


def test_schedule_children_before_parents():
    rng = np.random.default_rng(4)
    pts = dict(enumerate(rng.uniform(0, 100, (40, 2)).tolist()))
    tree = build_mst(pts, 5)
    schedule = transmission_schedule(tree)
    senders = [s for s, _, _ in schedule]
    assert sorted(senders) == sorted(set(pts) - {5})
    position = {s: k for k, s in enumerate(senders)}
    for sender, receiver, _ in schedule:
        if receiver != tree.root:
            assert position[sender] < position[receiver]
    assert sum(receiver_counts(schedule).values()) == len(schedule)


def test_deterministic_edges():
    rng = np.random.default_rng(8)
    pts = dict(enumerate(np.round(rng.uniform(0, 10, (30, 2))).tolist()))  # many ties
    assert build_mst(pts, 0) == build_mst(dict(reversed(list(pts.items()))), 0)


def test_weight_scales_linearly():
    rng = np.random.default_rng(6)
    pts = rng.uniform(0, 10, (12, 2))
    w = total_weight(build_mst(dict(enumerate(pts.tolist())), 0))
    w3 = total_weight(build_mst(dict(enumerate((3 * pts).tolist())), 0))
    assert w3 == pytest.approx(3 * w, rel=1e-12)
