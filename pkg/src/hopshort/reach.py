"""Single-source reachability by shortcutting first, then one BFS.

With the diameter loop's shortcuts merged in, the BFS needs few levels,
which is the whole point: the expensive flattening is reusable across
sources while the per-source part is a single sweep. estimate_diameter
rounds out the module as a scalable stand-in for exact_diameter; it
samples sources and is a lower bound, never reported as exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .graph import FORWARD, Digraph, VertexSet, bfs_limited, ceil_log2
from .parallel import DepthMetrics, _bulk_set_rows, parallel_diam
from .rng import STREAM_SOURCE, shuffle_order
from .shortcuts import ShortcutSet


@dataclass
class ReachResult:
    """Reachable set of one source plus the cost of getting it."""

    reached: VertexSet
    bfs_levels: int
    metrics: DepthMetrics


def reach_with_hopset(
    g: Digraph, s: int, k: Optional[int] = None, seed: int = 0
) -> ReachResult:
    """Reachability from s: run the diameter loop, then BFS on G plus F.

    k defaults to ceil(log2 n) (clamped to the minimum 2), the regime
    where the shortcut bound is near-linear. bfs_levels is the final
    BFS's max hop distance; the reached set always equals plain BFS on G,
    shortcuts only shorten the route.
    """
    if not 0 <= s < g.n:
        raise ValueError(f"source {s} out of range for n={g.n}")
    if k is None:
        k = max(2, ceil_log2(max(g.n, 2)))
    elif k < 2:
        raise ValueError(f"recursion-speed parameter k must be >= 2, got {k}")
    shortcuts, metrics = parallel_diam(g, k, seed)
    dist = hopset_bfs(g, shortcuts, s)
    return ReachResult(
        VertexSet(np.flatnonzero(dist >= 0)), int(dist.max()), metrics
    )


def hopset_bfs(g: Digraph, shortcuts: ShortcutSet, s: int) -> np.ndarray:
    """Forward BFS distances over G plus a shortcut set, -1 unreached."""
    ws = _kernels.make_workspace(g.n)
    if shortcuts.rows is not None and len(shortcuts):
        rows_f = shortcuts.rows
        rows_b = np.zeros_like(rows_f)
        edges = shortcuts.edges()
        _bulk_set_rows(rows_b, edges[:, 1], edges[:, 0])
        _kernels.set_graph(
            ws,
            g.indptr_f,
            g.indices_f,
            g.indptr_b,
            g.indices_b,
            extra_f=rows_f,
            extra_t=rows_b,
        )
    else:
        _kernels.set_graph(
            ws, g.indptr_f, g.indices_f, g.indptr_b, g.indices_b
        )
    return _kernels.bfs_hybrid(ws, s, _kernels.NO_LIMIT)["dist"]


def estimate_diameter(g: Digraph, samples: int, seed: int = 0) -> int:
    """Max BFS eccentricity over sampled sources.

    Sources are drawn uniformly without replacement; the estimate is a
    lower bound on the true hop diameter and matches exact_diameter once
    samples >= n.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if g.n == 0:
        return 0
    order = shuffle_order(seed, STREAM_SOURCE, np.arange(g.n, dtype=np.int64))
    best = 0
    for src in order[: min(samples, g.n)]:
        lv = bfs_limited(g, int(src), FORWARD).levels - 1
        if lv > best:
            best = lv
    return best
