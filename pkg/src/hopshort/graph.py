"""Directed graph containers and the elementary reachability operations.

Everything downstream (shortcut construction, hopset reachability, the
congest simulator) goes through the Digraph/VertexSet/DistMap types defined
here. Graphs are immutable once built; adjacency is stored as CSR arrays in
both directions with neighbor lists in ascending vertex order so traversal
order is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

import numpy as np

FORWARD = "forward"
BACKWARD = "backward"

#: transitive_closure_oracle refuses graphs above this size; the dense
#: matrix route is a cross-check for small instances, not a scalable path.
CLOSURE_ORACLE_CAP = 512


class Digraph:
    """Immutable directed graph over vertices 0..n-1.

    Duplicate edges are collapsed at construction and self-loops are kept
    (they are harmless to reachability and some generators emit them).
    Out-of-range endpoints raise ValueError immediately rather than at
    first traversal.
    """

    __slots__ = (
        "n",
        "m",
        "indptr_f",
        "indices_f",
        "indptr_b",
        "indices_b",
    )

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] | np.ndarray):
        if n < 0:
            raise ValueError(f"vertex count must be nonnegative, got {n}")
        if isinstance(edges, np.ndarray):
            arr = edges.astype(np.int64, copy=False)
        else:
            arr = np.array(list(edges), dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("edges must be pairs (u, v)")
        if arr.size:
            bad = (arr < 0) | (arr >= n)
            if bad.any():
                i = int(np.flatnonzero(bad.any(axis=1))[0])
                raise ValueError(
                    f"edge {tuple(arr[i])} out of range for n={n}"
                )
            arr = np.unique(arr, axis=0)
        self.n = int(n)
        self.m = int(arr.shape[0])
        self.indptr_f, self.indices_f = _csr(n, arr[:, 0], arr[:, 1])
        self.indptr_b, self.indices_b = _csr(n, arr[:, 1], arr[:, 0])

    def out(self, v: int) -> np.ndarray:
        """Out-neighbors of v, ascending."""
        return self.indices_f[self.indptr_f[v] : self.indptr_f[v + 1]]

    def inn(self, v: int) -> np.ndarray:
        """In-neighbors of v, ascending."""
        return self.indices_b[self.indptr_b[v] : self.indptr_b[v + 1]]

    def out_degree(self, v: int) -> int:
        return int(self.indptr_f[v + 1] - self.indptr_f[v])

    def in_degree(self, v: int) -> int:
        return int(self.indptr_b[v + 1] - self.indptr_b[v])

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.out(u)
        i = int(np.searchsorted(nb, v))
        return i < nb.size and nb[i] == v

    def edges(self) -> np.ndarray:
        """All edges as an (m, 2) array, sorted by (u, v)."""
        us = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr_f))
        return np.column_stack([us, self.indices_f])

    def reverse(self) -> "Digraph":
        e = self.edges()
        return Digraph(self.n, e[:, ::-1])

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, m={self.m})"


def _csr(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((dst, src))
    src = src[order]
    dst = dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, np.ascontiguousarray(dst, dtype=np.int32)


def build_digraph(n: int, edges: Iterable[tuple[int, int]]) -> Digraph:
    """Construct a Digraph, validating ranges and collapsing duplicates."""
    return Digraph(n, list(edges))


def ceil_log2(x: int) -> int:
    """Smallest t with 2^t >= x; zero for x <= 1.

    Integer-exact on purpose: the level counts, budgets, and repetition
    defaults built from it must not wobble with libm rounding.
    """
    return (int(x) - 1).bit_length() if x > 1 else 0


class VertexSet:
    """A frozen set of vertices with O(1) membership and sorted iteration."""

    __slots__ = ("_ids", "_members")

    def __init__(self, ids: Iterable[int] | np.ndarray):
        arr = np.unique(np.asarray(list(ids) if not isinstance(ids, np.ndarray) else ids, dtype=np.int64))
        self._ids = arr
        self._members = frozenset(int(x) for x in arr)

    def __contains__(self, v: int) -> bool:
        return int(v) in self._members

    def __iter__(self) -> Iterator[int]:
        return iter(int(x) for x in self._ids)

    def __len__(self) -> int:
        return int(self._ids.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VertexSet):
            return NotImplemented
        return self._members == other._members

    def __hash__(self) -> int:
        return hash(self._members)

    @property
    def ids(self) -> np.ndarray:
        """Members as a sorted int64 array (do not mutate)."""
        return self._ids

    def __repr__(self) -> str:
        if len(self) <= 8:
            return f"VertexSet({list(self._ids)})"
        return f"VertexSet(<{len(self)} vertices>)"


UNREACHED = -1


@dataclass
class DistMap:
    """BFS distances from a single source, UNREACHED (-1) where not reached.

    edge_scans records how many adjacency entries the producing search
    examined; callers aggregate it into their work counters.
    """

    src: int
    dist: np.ndarray
    direction: str = FORWARD
    limit: Optional[int] = None
    edge_scans: int = 0

    def __call__(self, v: int) -> int:
        return int(self.dist[v])

    def reached(self) -> VertexSet:
        return VertexSet(np.flatnonzero(self.dist >= 0))

    @property
    def levels(self) -> int:
        """Number of BFS levels including the source level."""
        mx = int(self.dist.max()) if self.dist.size else -1
        return mx + 1

    def __repr__(self) -> str:
        return (
            f"DistMap(src={self.src}, {self.direction}, "
            f"reached={int((self.dist >= 0).sum())}/{self.dist.size})"
        )


@dataclass
class GraphPath:
    """A vertex sequence; valid when every consecutive pair is an edge."""

    vertices: list[int]

    def is_valid(self, g: Digraph) -> bool:
        return all(
            g.has_edge(u, v) for u, v in zip(self.vertices, self.vertices[1:])
        )

    def __len__(self) -> int:
        return len(self.vertices)


def bfs_limited(
    g: Digraph,
    src: int,
    direction: str = FORWARD,
    limit: Optional[int] = None,
) -> DistMap:
    """Breadth-first distances from src, stopping beyond `limit` hops.

    limit=None means unlimited. Neighbors are expanded in ascending order;
    the scan counter includes every adjacency entry looked at, whether or
    not it led to a new vertex.
    """
    if not 0 <= src < g.n:
        raise ValueError(f"source {src} out of range for n={g.n}")
    if direction not in (FORWARD, BACKWARD):
        raise ValueError(f"direction must be {FORWARD!r} or {BACKWARD!r}")
    indptr = g.indptr_f if direction == FORWARD else g.indptr_b
    indices = g.indices_f if direction == FORWARD else g.indices_b
    dist = np.full(g.n, UNREACHED, dtype=np.int64)
    dist[src] = 0
    cap = np.iinfo(np.int64).max if limit is None else int(limit)
    scans = 0
    frontier = [src]
    d = 0
    while frontier and d < cap:
        nxt = []
        for u in frontier:
            lo, hi = indptr[u], indptr[u + 1]
            scans += int(hi - lo)
            for v in indices[lo:hi]:
                if dist[v] == UNREACHED:
                    dist[v] = d + 1
                    nxt.append(int(v))
        frontier = nxt
        d += 1
    return DistMap(src=src, dist=dist, direction=direction, limit=limit, edge_scans=scans)


def reachable_set(
    g: Digraph, src: int, direction: str = FORWARD, limit: Optional[int] = None
) -> VertexSet:
    """Vertices within `limit` hops of src (all reachable if unlimited)."""
    return bfs_limited(g, src, direction, limit).reached()


def transitive_closure_oracle(g: Digraph, cap: int = CLOSURE_ORACLE_CAP) -> np.ndarray:
    """Reflexive transitive closure as a dense boolean matrix.

    Computed by column-driven row OR-ing, deliberately a different algorithm
    family from the BFS routines it is used to check. Refuses n > cap.
    """
    if g.n > cap:
        raise ValueError(f"closure oracle capped at n={cap}, got n={g.n}")
    reach = np.zeros((g.n, g.n), dtype=bool)
    np.fill_diagonal(reach, True)
    e = g.edges()
    if e.size:
        reach[e[:, 0], e[:, 1]] = True
    for k in range(g.n):
        col = reach[:, k]
        if col.any():
            reach[col] |= reach[k]
    return reach


def exact_diameter(g: Digraph) -> int:
    """Largest finite directed distance; 0 for edgeless graphs."""
    best = 0
    for s in range(g.n):
        d = bfs_limited(g, s).dist
        mx = int(d.max())
        if mx > best:
            best = mx
    return best


def strongly_connected_components(g: Digraph) -> np.ndarray:
    """Component id per vertex, ids dense in [0, #components).

    Iterative Tarjan; ids are assigned in order of component completion,
    then renumbered by first vertex occurrence so the labeling does not
    depend on stack internals.
    """
    n = g.n
    index = np.full(n, -1, dtype=np.int64)
    low = np.zeros(n, dtype=np.int64)
    on_stack = np.zeros(n, dtype=bool)
    comp = np.full(n, -1, dtype=np.int64)
    stack: list[int] = []
    next_index = 0
    next_comp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, ei = work.pop()
            if ei == 0:
                index[v] = low[v] = next_index
                next_index += 1
                stack.append(v)
                on_stack[v] = True
            nb = g.out(v)
            advanced = False
            while ei < nb.size:
                w = int(nb[ei])
                if index[w] == -1:
                    work.append((v, ei + 1))
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
                ei += 1
            if advanced:
                continue
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = next_comp
                    if w == v:
                        break
                next_comp += 1
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    # renumber by first occurrence for a canonical labeling
    remap = np.full(next_comp, -1, dtype=np.int64)
    fresh = 0
    for v in range(n):
        c = comp[v]
        if remap[c] == -1:
            remap[c] = fresh
            fresh += 1
    return remap[comp]
