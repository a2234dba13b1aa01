"""Cluster-head scoring, selection and member assignment.

Each alive node is scored on four normalised inputs (residual energy,
closeness to the base station, local density, neighbourhood tightness); the
score is their arithmetic mean. Nodes scoring strictly above a nearest-rank
percentile become cluster heads and every other alive node joins its nearest
head.

Node ids are positions in the ``positions`` array. Functions that work on a
subpopulation take ``node_ids`` explicitly; ties are always broken towards
the lower id.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError, DomainError, StateError


@dataclass(frozen=True)
class NodeScore:
    node_id: int
    e_norm: float
    d_norm: float
    c_norm: float
    theta_norm: float
    p_ch: float | None = None

    def with_probability(self) -> "NodeScore":
        return NodeScore(
            self.node_id, self.e_norm, self.d_norm, self.c_norm, self.theta_norm, ch_probability(self)
        )


@dataclass
class ClusterLayout:
    ch_ids: set[int]
    assignment: dict[int, int] = field(default_factory=dict)
    orphan_ids: set[int] = field(default_factory=set)

    def members_of(self, ch: int) -> list[int]:
        return sorted(m for m, c in self.assignment.items() if c == ch)

    def clusters(self) -> dict[int, list[int]]:
        """CH id -> sorted member ids (CH excluded)."""
        out: dict[int, list[int]] = {ch: [] for ch in sorted(self.ch_ids)}
        for member, ch in sorted(self.assignment.items()):
            out[ch].append(member)
        return out


@dataclass(frozen=True)
class TrapezoidParams:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not (self.a <= self.b <= self.c <= self.d):
            raise ConfigError(f"trapezoid breakpoints must satisfy a <= b <= c <= d, got {self}")


DEFAULT_FUZZY_SETS = {
    "low": TrapezoidParams(0.0, 0.0, 0.2, 0.4),
    "medium": TrapezoidParams(0.2, 0.4, 0.6, 0.8),
    "high": TrapezoidParams(0.6, 0.8, 1.0, 1.0),
}


def _as_points(positions) -> np.ndarray:
    pts = np.asarray(positions, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DomainError(f"positions must be an (n, 2) array, got shape {pts.shape}")
    return pts


def _check_radius(radius):
    if not radius > 0:
        raise ConfigError(f"radius must be > 0, got {radius!r}")


def _pairwise(pts: np.ndarray) -> np.ndarray:
    diff = pts[:, None, :] - pts[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def neighbor_sets(positions, radius: float) -> list[set[int]]:
    """Indices within ``radius`` of each node (boundary inclusive, self excluded)."""
    _check_radius(radius)
    pts = _as_points(positions)
    within = _pairwise(pts) <= radius
    np.fill_diagonal(within, False)
    return [set(np.flatnonzero(row).tolist()) for row in within]


def local_density_centrality(positions, radius: float) -> list[int]:
    _check_radius(radius)
    pts = _as_points(positions)
    if len(pts) == 0:
        raise DomainError("positions must be non-empty")
    within = _pairwise(pts) <= radius
    np.fill_diagonal(within, False)
    return within.sum(axis=1).astype(int).tolist()


def convergence_metric(positions, neighbors: Sequence[set[int]], radius: float) -> list[float]:
    """Neighbourhood tightness: ``1 - mean neighbour distance / radius``, 0 if isolated."""
    _check_radius(radius)
    pts = _as_points(positions)
    out = []
    for i, nbrs in enumerate(neighbors):
        if not nbrs:
            out.append(0.0)
            continue
        idx = sorted(nbrs)
        d = np.hypot(*(pts[idx] - pts[i]).T)
        out.append(float(min(1.0, max(0.0, 1.0 - d.mean() / radius))))
    return out


def _ratio(values: np.ndarray) -> np.ndarray:
    top = values.max()
    if top <= 0:
        return np.zeros_like(values)
    return values / top


def normalize_scores(energies, dists_to_bs, centralities, thetas, node_ids=None) -> list[NodeScore]:
    """Scale each criterion into [0, 1] by its maximum over the given nodes.

    Inputs must already be restricted to alive nodes. A criterion whose
    maximum is zero normalises to 0 everywhere.
    """
    e = np.asarray(energies, dtype=float)
    if e.size == 0:
        raise StateError("cannot score an empty alive population")
    d = np.asarray(dists_to_bs, dtype=float)
    c = np.asarray(centralities, dtype=float)
    t = np.asarray(thetas, dtype=float)
    if not (len(d) == len(c) == len(t) == len(e)):
        raise DomainError("score inputs must have equal lengths")
    ids = list(range(len(e))) if node_ids is None else [int(i) for i in node_ids]

    e_n = _ratio(e)
    d_max = d.max()
    d_n = 1.0 - d / d_max if d_max > 0 else np.zeros_like(d)
    c_n = _ratio(c)
    t_n = _ratio(t)
    return [
        NodeScore(ids[k], float(e_n[k]), float(d_n[k]), float(c_n[k]), float(t_n[k]))
        for k in range(len(e))
    ]


def ch_probability(score: NodeScore) -> float:
    parts = (score.e_norm, score.d_norm, score.c_norm, score.theta_norm)
    for p in parts:
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"normalised inputs must lie in [0, 1], got {parts}")
    # fsum then an exact division by 4: the correctly rounded mean
    return math.fsum(parts) / 4


def nearest_rank_quantile(values: Sequence[float], q: float) -> float:
    ordered = sorted(values)
    # round() absorbs binary noise in q * n, e.g. 0.95 * 100
    rank = max(1, math.ceil(round(q * len(ordered), 9)))
    return ordered[rank - 1]


def select_cluster_heads(scores: Sequence[NodeScore], percentile: float = 0.95) -> set[int]:
    """Nodes whose CH probability is strictly above the ``percentile`` quantile.

    Falls back to the single best node (lowest id on ties) when nobody clears
    the threshold, so the result is never empty.
    """
    if not scores:
        raise StateError("cannot select cluster heads from an empty population")
    if not 0 < percentile < 1:
        raise ConfigError(f"percentile must lie in (0, 1), got {percentile!r}")
    probs = [s.p_ch if s.p_ch is not None else ch_probability(s) for s in scores]
    threshold = nearest_rank_quantile(probs, percentile)
    chosen = {s.node_id for s, p in zip(scores, probs) if p > threshold}
    if not chosen:
        best = min(zip(scores, probs), key=lambda sp: (-sp[1], sp[0].node_id))
        chosen = {best[0].node_id}
    return chosen


def assign_members(
    positions, ch_ids, r_cluster: float, strict: bool = False, node_ids=None
) -> ClusterLayout:
    """Attach every non-CH node in ``node_ids`` to its nearest cluster head.

    In strict mode a node with no head inside ``r_cluster`` is orphaned.
    """
    if not ch_ids:
        raise StateError("assign_members needs at least one cluster head")
    _check_radius(r_cluster)
    pts = _as_points(positions)
    heads = sorted(int(c) for c in ch_ids)
    ids = range(len(pts)) if node_ids is None else sorted(int(i) for i in node_ids)
    head_pts = pts[heads]
    layout = ClusterLayout(ch_ids=set(heads))
    for i in ids:
        if i in layout.ch_ids:
            continue
        d = np.hypot(*(head_pts - pts[i]).T)
        k = int(np.argmin(d))  # first minimum = lowest CH id
        if strict and d[k] > r_cluster:
            layout.orphan_ids.add(i)
        else:
            layout.assignment[i] = heads[k]
    return layout


def trapezoid_membership(x: float, p: TrapezoidParams) -> float:
    """Trapezoidal membership grade. Coincident breakpoints give a step."""
    if p.b <= x <= p.c:
        return 1.0
    if x <= p.a or x >= p.d:
        return 0.0
    if x < p.b:
        return (x - p.a) / (p.b - p.a)
    return (p.d - x) / (p.d - p.c)


def fuzzy_grades(score: NodeScore, sets=None) -> dict[str, dict[str, float]]:
    """Grade each normalised input against the low/medium/high trapezoids.

    Diagnostic only; selection uses :func:`ch_probability`.
    """
    sets = DEFAULT_FUZZY_SETS if sets is None else sets
    inputs = {
        "energy": score.e_norm,
        "bs_proximity": score.d_norm,
        "centrality": score.c_norm,
        "convergence": score.theta_norm,
    }
    return {
        name: {label: trapezoid_membership(x, tp) for label, tp in sets.items()}
        for name, x in inputs.items()
    }


def fuzzy_labels(score: NodeScore, sets=None) -> dict[str, str]:
    """Strongest linguistic label per input (first label wins ties)."""
    grades = fuzzy_grades(score, sets)
    return {name: max(g, key=g.get) for name, g in grades.items()}
