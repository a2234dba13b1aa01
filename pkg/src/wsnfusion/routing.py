"""Intra-cluster minimum spanning trees grown from the cluster head (Prim)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .errors import InputError


@dataclass(frozen=True)
class ClusterTree:
    root: int
    edges: tuple[tuple[int, int, float], ...]  # (parent, child, length)
    depth: int

    @property
    def nodes(self) -> list[int]:
        return [self.root] + [child for _, child, _ in self.edges]

    def parent_map(self) -> dict[int, tuple[int, float]]:
        return {child: (parent, length) for parent, child, length in self.edges}


def euclidean_distance(p, q) -> float:
    return math.sqrt((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2)


def _normalise_nodes(node_positions) -> dict[int, tuple[float, float]]:
    if isinstance(node_positions, Mapping):
        return {int(k): (float(v[0]), float(v[1])) for k, v in node_positions.items()}
    pairs = list(node_positions)
    ids = [int(i) for i, _ in pairs]
    if len(set(ids)) != len(ids):
        raise InputError(f"duplicate node ids in cluster: {sorted(ids)}")
    return {int(i): (float(p[0]), float(p[1])) for i, p in pairs}


def build_mst(node_positions, root: int) -> ClusterTree:
    """Prim's algorithm over the complete Euclidean graph of one cluster.

    ``node_positions`` is a mapping ``id -> (x, y)`` or an iterable of
    ``(id, (x, y))`` pairs. Equal-weight candidate edges are resolved by lower
    outside-node id, then lower inside-node id, so output is reproducible.
    """
    pos = _normalise_nodes(node_positions)
    if root not in pos:
        raise InputError(f"root {root} is not among the cluster nodes")

    outside = sorted(i for i in pos if i != root)
    # best[v] = (distance, tree node) of the cheapest known edge into v
    best = {v: (euclidean_distance(pos[v], pos[root]), root) for v in outside}
    hops = {root: 0}
    edges = []
    while outside:
        v = min(outside, key=lambda u: (best[u][0], u, best[u][1]))
        w, parent = best.pop(v)
        outside.remove(v)
        edges.append((parent, v, w))
        hops[v] = hops[parent] + 1
        for u in outside:
            d = euclidean_distance(pos[u], pos[v])
            if d < best[u][0] or (d == best[u][0] and v < best[u][1]):
                best[u] = (d, v)
    return ClusterTree(root=root, edges=tuple(edges), depth=max(hops.values()))


def total_weight(tree: ClusterTree) -> float:
    return math.fsum(length for _, _, length in tree.edges)


def transmission_schedule(tree: ClusterTree) -> list[tuple[int, int, float]]:
    """Leaf-to-root send order as ``(sender, receiver, distance)``.

    Deeper nodes send first, so every node has heard all its children before
    forwarding; within a depth level senders go in id order.
    """
    parents = tree.parent_map()
    depth = {tree.root: 0}
    for parent, child, _ in tree.edges:  # edges are in insertion order, parents first
        depth[child] = depth[parent] + 1
    order = sorted(parents, key=lambda v: (-depth[v], v))
    return [(v, parents[v][0], parents[v][1]) for v in order]


def receiver_counts(schedule) -> dict[int, int]:
    counts: dict[int, int] = {}
    for _, receiver, _ in schedule:
        counts[receiver] = counts.get(receiver, 0) + 1
    return counts
