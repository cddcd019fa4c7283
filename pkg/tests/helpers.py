"""Independent reference implementations the suite checks the package against.

Everything here is deliberately naive: python dicts and deques, dense
boolean matrices, repeated squaring. Slow but obviously correct, and cheap
at corpus sizes. Nothing in this module may import from the modules it is
used to verify beyond the Digraph container itself.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from hopshort.graph import Digraph
from hopshort import generators


def adjacency(g: Digraph) -> list[list[int]]:
    out: list[list[int]] = [[] for _ in range(g.n)]
    for u, v in g.edges():
        out[u].append(v)
    return out


def bfs_dists(g: Digraph, src: int, forward: bool = True, limit: int | None = None) -> list[int]:
    """Hop distances by plain deque BFS; -1 for unreached."""
    adj: list[list[int]] = [[] for _ in range(g.n)]
    for u, v in g.edges():
        if forward:
            adj[u].append(v)
        else:
            adj[v].append(u)
    dist = [-1] * g.n
    dist[src] = 0
    q = deque([src])
    while q:
        u = q.popleft()
        if limit is not None and dist[u] >= limit:
            continue
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


def closure_squaring(g: Digraph) -> np.ndarray:
    """Reflexive transitive closure by boolean repeated squaring."""
    reach = np.eye(g.n, dtype=bool)
    e = g.edges()
    if e.size:
        reach[e[:, 0], e[:, 1]] = True
    while True:
        nxt = reach | (reach.astype(np.uint8) @ reach.astype(np.uint8) > 0)
        if np.array_equal(nxt, reach):
            return reach
        reach = nxt


def induced_closure(adj: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Closure of the subgraph induced on idx, as a |idx| x |idx| matrix."""
    sub = adj[np.ix_(idx, idx)] | np.eye(idx.size, dtype=bool)
    while True:
        nxt = sub | (sub.astype(np.uint8) @ sub.astype(np.uint8) > 0)
        if np.array_equal(nxt, sub):
            return sub
        sub = nxt


def union_with(g: Digraph, pairs) -> Digraph:
    """g plus extra edges, self-loops and duplicates tolerated."""
    extra = np.asarray([(u, v) for u, v in pairs if u != v], dtype=np.int64)
    if extra.size == 0:
        return g
    return Digraph(g.n, np.vstack([g.edges(), extra.reshape(-1, 2)]))


def dag_longest_path(g: Digraph) -> list[int]:
    """Longest path in a DAG by topological DP, as a vertex list."""
    n = g.n
    indeg = [0] * n
    adj = adjacency(g)
    for u, v in g.edges():
        indeg[v] += 1
    order = deque(v for v in range(n) if indeg[v] == 0)
    topo = []
    while order:
        u = order.popleft()
        topo.append(u)
        for w in adj[u]:
            indeg[w] -= 1
            if indeg[w] == 0:
                order.append(w)
    assert len(topo) == n, "not a DAG"
    best = [0] * n
    pred = [-1] * n
    for u in topo:
        for w in adj[u]:
            if best[u] + 1 > best[w]:
                best[w] = best[u] + 1
                pred[w] = u
    tail = int(np.argmax(best))
    path = [tail]
    while pred[path[-1]] >= 0:
        path.append(pred[path[-1]])
    return path[::-1]


def corpus_graph(i: int, n_max: int = 50) -> tuple[str, Digraph]:
    """Deterministic mixed-family corpus member i.

    Cycles through every generator family with sizes and densities spread
    across the index so a long prefix covers sparse and dense regimes of
    each one.
    """
    rg = np.random.default_rng(977 + i)
    n = int(rg.integers(2, n_max + 1))
    fam = i % 6
    if fam == 0:
        return f"path{n}", generators.path(n)
    if fam == 1:
        return f"cycle{n}", generators.cycle(n)
    if fam == 2:
        n = min(n, 30)
        return f"kdag{n}", generators.complete_dag(n)
    if fam == 3:
        p = float(rg.choice([0.02, 0.05, 0.1, 0.2, 0.4, 0.7, 0.95]))
        return f"rdag{n}p{p}", generators.random_dag(n, p, seed=1000 + i)
    if fam == 4:
        width = int(rg.integers(1, 8))
        depth = max(1, n // width)
        return f"grid{width}x{depth}", generators.layered_grid(width, depth)
    max_extra = (n - 1) * n // 2 - (n - 1)
    extra = min(int(rg.integers(0, max(1, n))), max_extra)
    return f"pathx{n}+{extra}", generators.path_plus_random(n, extra, seed=2000 + i)
