"""Graph families used by the experiments and the test corpus.

Every family is deterministic in (parameters, seed). The families span the
regimes the shortcut machinery cares about: long induced paths, dense DAGs,
bounded-width layered structure, and a cycle for the non-acyclic case.
"""

from __future__ import annotations

import numpy as np

from . import rng
from .graph import Digraph


def path(n: int) -> Digraph:
    """0 -> 1 -> ... -> n-1."""
    if n <= 0:
        raise ValueError("path needs n >= 1")
    us = np.arange(n - 1, dtype=np.int64)
    return Digraph(n, np.column_stack([us, us + 1]))


def cycle(n: int) -> Digraph:
    """Directed n-cycle; a single strongly connected component."""
    if n <= 0:
        raise ValueError("cycle needs n >= 1")
    us = np.arange(n, dtype=np.int64)
    return Digraph(n, np.column_stack([us, (us + 1) % n]))


def complete_dag(n: int) -> Digraph:
    """All edges u -> v with u < v."""
    if n <= 0:
        raise ValueError("complete_dag needs n >= 1")
    us, vs = np.triu_indices(n, k=1)
    return Digraph(n, np.column_stack([us, vs]).astype(np.int64))


def random_dag(n: int, p: float, seed: int) -> Digraph:
    """Each forward pair u < v is an edge independently with probability p."""
    if n <= 0:
        raise ValueError("random_dag needs n >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must be in [0, 1], got {p}")
    us, vs = np.triu_indices(n, k=1)
    keep = rng.bernoulli_mask(seed, rng.STREAM_GEN, us.size, p)
    return Digraph(n, np.column_stack([us[keep], vs[keep]]).astype(np.int64))


def layered_grid(width: int, depth: int) -> Digraph:
    """`depth` layers of `width` vertices; (l, i) feeds (l+1, i-1..i+1).

    Vertex numbering is layer-major: v = l * width + i. Hop diameter grows
    with depth while width bounds the frontier, a shape the path family
    cannot produce.
    """
    if width <= 0 or depth <= 0:
        raise ValueError("layered_grid needs width >= 1 and depth >= 1")
    edges = []
    for layer in range(depth - 1):
        base = layer * width
        for i in range(width):
            for j in (i - 1, i, i + 1):
                if 0 <= j < width:
                    edges.append((base + i, base + width + j))
    return Digraph(width * depth, edges)


def path_plus_random(n: int, extra_edges: int, seed: int) -> Digraph:
    """The n-path plus `extra_edges` distinct random forward jumps.

    Keeps 0 -> n-1 at distance n-1 before shortcuts only when the extras
    happen not to help; the point is a designated long path with noise.
    """
    if n <= 1:
        raise ValueError("path_plus_random needs n >= 2")
    max_extra = (n - 1) * n // 2 - (n - 1)
    if extra_edges > max_extra:
        raise ValueError(
            f"at most {max_extra} non-path forward edges exist for n={n}"
        )
    us = np.arange(n - 1, dtype=np.int64)
    base = {(int(u), int(u) + 1) for u in us}
    chosen: set[tuple[int, int]] = set()
    attempt = 0
    while len(chosen) < extra_edges:
        u = rng.u64(seed, rng.STREAM_GEN, 2 * attempt) % (n - 1)
        span = n - 1 - u
        v = u + 1 + rng.u64(seed, rng.STREAM_GEN, 2 * attempt + 1) % span
        attempt += 1
        e = (int(u), int(v))
        if e not in base and e not in chosen:
            chosen.add(e)
    edges = np.array(
        sorted(base | chosen), dtype=np.int64
    )
    return Digraph(n, edges)


FAMILIES = {
    "path": path,
    "cycle": cycle,
    "complete_dag": complete_dag,
    "random_dag": random_dag,
    "layered_grid": layered_grid,
    "path_plus_random": path_plus_random,
}
