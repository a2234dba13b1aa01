"""Self-checks: finite-difference gradients and brute-force spanning trees."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

from . import fusion, routing


@lru_cache(maxsize=None)
def spanning_tree_parents(n: int) -> np.ndarray:
    """Every labelled spanning tree of K_n, as parent arrays rooted at node 0.

    Row ``t`` gives the parent of nodes ``1..n-1`` in tree ``t``. Candidate
    parent functions are filtered to those where every node reaches 0, which
    leaves exactly ``n**(n-2)`` rows.
    """
    if n < 2:
        return np.zeros((1, 0), dtype=np.int64)
    choices = [[p for p in range(n) if p != v] for v in range(1, n)]
    parents = np.array(list(product(*choices)), dtype=np.int64)  # node v at column v-1
    full = np.concatenate([np.zeros((len(parents), 1), dtype=np.int64), parents], axis=1)
    cur = np.tile(np.arange(n), (len(parents), 1))
    for _ in range(n - 1):
        cur = np.take_along_axis(full, cur, axis=1)
    return parents[(cur == 0).all(axis=1)]


def brute_force_mst_weight(points) -> float:
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if n < 2:
        return 0.0
    dist = np.hypot(*(pts[:, None, :] - pts[None, :, :]).transpose(2, 0, 1))
    parents = spanning_tree_parents(n)
    weights = dist[np.arange(1, n), parents].sum(axis=1)
    return float(weights.min())


@dataclass
class MstCheckReport:
    clusters: int
    max_abs_error: float
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def mstcheck(seed=0, n_clusters=200, sizes=(4, 8), field_size=100.0, tol=1e-9) -> MstCheckReport:
    """Compare Prim's tree weight with the exhaustive minimum on random clusters."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    failures = []
    for k in range(n_clusters):
        n = int(rng.integers(sizes[0], sizes[1] + 1))
        pts = rng.uniform(0.0, field_size, size=(n, 2))
        tree = routing.build_mst(dict(enumerate(pts.tolist())), root=0)
        err = abs(routing.total_weight(tree) - brute_force_mst_weight(pts))
        worst = max(worst, err)
        if not err <= tol:
            failures.append({"cluster": k, "points": pts.tolist(), "error": err})
    return MstCheckReport(n_clusters, worst, failures)


def _half_sse(net, x, y_true) -> float:
    # per-sample loss whose output-layer gradient is (y - y_true)
    y, _ = fusion.forward(net, x)
    return 0.5 * (y - y_true) ** 2


def numeric_gradients(net: fusion.Mlp, x, y_true, h=1e-5) -> fusion.Gradients:
    dW, db = [], []
    for group, out in ((net.weights, dW), (net.biases, db)):
        for arr in group:
            g = np.zeros_like(arr)
            for idx in np.ndindex(arr.shape):
                keep = arr[idx]
                arr[idx] = keep + h
                up = _half_sse(net, x, y_true)
                arr[idx] = keep - h
                down = _half_sse(net, x, y_true)
                arr[idx] = keep
                g[idx] = (up - down) / (2 * h)
            out.append(g)
    return fusion.Gradients(dW, db)


@dataclass
class GradCheckReport:
    nets: int
    entries: int
    max_rel_error: float
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def gradcheck(seed=0, n_nets=50, max_width=8, max_hidden_layers=3, h=1e-5,
              rel_tol=1e-4, abs_tol=1e-7, backward=None) -> GradCheckReport:
    """Analytic vs central-difference gradients on random small networks.

    An entry passes when its absolute error is below ``abs_tol`` or its
    relative error is below ``rel_tol``. ``backward`` lets tests inject a
    faulty implementation.
    """
    backward = backward or fusion.backward
    rng = np.random.default_rng(seed)
    worst = 0.0
    entries = 0
    failures = []
    for k in range(n_nets):
        depth = int(rng.integers(1, max_hidden_layers + 1))
        sizes = [int(s) for s in rng.integers(1, max_width + 1, size=depth + 1)] + [1]
        net = fusion.init_weights(sizes, rng)
        for b in net.biases:
            b[:] = rng.normal(0.0, 0.5, size=b.shape)
        x = rng.normal(size=sizes[0])
        y_true = float(rng.normal())
        _, cache = fusion.forward(net, x)
        analytic = backward(net, cache, y_true)
        numeric = numeric_gradients(net, x, y_true, h)
        pairs = [("W", i, a, n) for i, (a, n) in enumerate(zip(analytic.dW, numeric.dW))]
        pairs += [("b", i, a, n) for i, (a, n) in enumerate(zip(analytic.db, numeric.db))]
        for kind, layer, a, n in pairs:
            diff = np.abs(a - n)
            rel = diff / np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-300)
            entries += diff.size
            ok = (diff < abs_tol) | (rel < rel_tol)
            scale = np.maximum(np.abs(a), np.abs(n))
            worst = max(worst, float(np.where(scale < abs_tol, 0.0, rel).max(initial=0.0)))
            for idx in zip(*np.nonzero(~ok)):
                failures.append({
                    "net": k, "param": f"{kind}{layer + 1}", "index": [int(i) for i in idx],
                    "analytic": float(a[idx]), "numeric": float(n[idx]),
                })
    return GradCheckReport(n_nets, entries, worst, failures)


def format_report(report) -> str:
    if isinstance(report, GradCheckReport):
        head = f"gradcheck nets={report.nets} entries={report.entries} max_rel_error={report.max_rel_error:.3e}"
    else:
        head = f"mstcheck clusters={report.clusters} max_abs_error={report.max_abs_error:.3e}"
    return head + (" OK" if report.ok else f" FAILED ({len(report.failures)})")

