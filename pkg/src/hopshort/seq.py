"""Sequential diameter-reducing shortcut construction.

One recursion level: elect a shortcutter set S (each vertex independently
with probability p_r), search forward and backward from every member of S
inside the current cell, shortcut every related pair, label every related
vertex, drop vertices related to some shortcutter in both directions, and
split the survivors into cells of identical label sets. Each cell recurses
with r+1; p_r grows by a factor k per level, so within ceil(log_k n)+1
levels everything is elected and self-eliminates.

The public operations (sample_shortcutters, label_from_shortcutter,
partition_by_labels) are direct single-step implementations used by tests
and small tools. seq_shortcut runs the same recursion through the compiled
kernels; the two are asserted equivalent in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .graph import BACKWARD, FORWARD, Digraph, VertexSet, ceil_log2, reachable_set
from .rng import STREAM_CELL, STREAM_REP, STREAM_SAMPLE, derive, threshold_for, u64_at
from .shortcuts import ANC, DES, ELIM, Label, ShortcutSet, WorkMetrics

#: numerator constant of the election probability p_r
SAMPLE_FACTOR = 20


def hard_stop_level(n_top: int, k: int) -> int:
    """Deepest recursion level ever entered: ceil(log_k n_top) + 1.

    p_r is certain to have clamped at 1 one level earlier; the extra level
    guards degenerate inputs (n_top = 1 has p_r = 0 at every level and
    would otherwise recurse forever on its unlabeled survivor).
    """
    if k < 2:
        raise ValueError(f"recursion-speed parameter k must be >= 2, got {k}")
    t = 0
    power = 1
    while power < n_top:
        power *= k
        t += 1
    return t + 1


def sample_probability(n_top: int, k: int, r: int) -> float:
    """Election probability p_r = min(1, 20 * k^(r+1) * log2(n_top) / n_top)."""
    if n_top <= 1:
        return 0.0
    return min(1.0, SAMPLE_FACTOR * k ** (r + 1) * np.log2(n_top) / n_top)


@dataclass(frozen=True)
class SeqCtx:
    """Where in the recursion a subproblem sits and what it draws from.

    n_top is the vertex count of the top-level input; the election
    probability deliberately references it, not the current cell size.
    """

    n_top: int
    k: int
    r: int
    seed: int

    def __post_init__(self) -> None:
        if self.n_top < 1:
            raise ValueError(f"n_top must be positive, got {self.n_top}")
        if self.k < 2:
            raise ValueError(f"recursion-speed parameter k must be >= 2, got {self.k}")
        stop = hard_stop_level(self.n_top, self.k)
        if not 0 <= self.r <= stop:
            raise ValueError(f"recursion level {self.r} outside [0, {stop}]")

    @property
    def p_r(self) -> float:
        return sample_probability(self.n_top, self.k, self.r)

    def child(self, cell_index: int) -> "SeqCtx":
        """Context for the cell_index-th cell (canonical order) one level down."""
        return SeqCtx(
            self.n_top,
            self.k,
            self.r + 1,
            derive(self.seed, STREAM_CELL, cell_index, self.r + 1),
        )


def sample_shortcutters(vertices: VertexSet, ctx: SeqCtx) -> VertexSet:
    """Elect each vertex independently with probability ctx.p_r.

    The draw for vertex v is keyed on (ctx.seed, v), so the outcome does
    not depend on how the surrounding cell is enumerated.
    """
    p = ctx.p_r
    ids = vertices.ids
    if ids.size == 0 or p <= 0.0:
        return VertexSet(np.zeros(0, dtype=np.int64))
    if p >= 1.0:
        return vertices
    keys = u64_at(ctx.seed, STREAM_SAMPLE, ids)
    return VertexSet(ids[keys < np.uint64(threshold_for(p))])


def label_from_shortcutter(
    g: Digraph, v: int
) -> tuple[list[Label], list[tuple[int, int]]]:
    """Labels and raw shortcut pairs contributed by one shortcutter.

    Two unlimited searches from v; every descendant w yields the pair
    (v, w), every ancestor the pair (w, v). The raw list keeps (v, v) --
    v sits in both sets -- and it is the ShortcutSet that refuses
    self-loops at insertion. Vertices in both sets get an Eliminated
    label, the rest Des or Anc.
    """
    des = reachable_set(g, v, FORWARD)
    anc = reachable_set(g, v, BACKWARD)
    pairs: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for w in des:
        if (v, w) not in seen:
            seen.add((v, w))
            pairs.append((v, w))
    for w in anc:
        if (w, v) not in seen:
            seen.add((w, v))
            pairs.append((w, v))
    labels: list[Label] = []
    for w in sorted(set(des) | set(anc)):
        if w in des and w in anc:
            kind = ELIM
        elif w in des:
            kind = DES
        else:
            kind = ANC
        labels.append(Label(w, v, kind))
    return labels, pairs


def partition_by_labels(
    vertices: VertexSet, labels: dict[int, list[Label]]
) -> list[VertexSet]:
    """Split vertices into cells of exactly equal label sets.

    Vertices carrying any Eliminated label are excluded. Cell order is
    canonical: each label encodes as (shortcutter, kind) with Anc before
    Des, label sets sort ascending, and cells order lexicographically by
    that key (the unlabeled cell, if any, comes first).
    """
    cells: dict[tuple, list[int]] = {}
    for v in vertices:
        labs = labels.get(v, [])
        if any(lab.kind == ELIM for lab in labs):
            continue
        key = tuple(sorted((lab.shortcutter, lab.kind) for lab in labs))
        cells.setdefault(key, []).append(v)
    return [VertexSet(cells[key]) for key in sorted(cells)]


def seq_shortcut(
    g: Digraph,
    k: int,
    seed: int,
    track_origins: Optional[bool] = None,
    subproblem_log: Optional[list] = None,
) -> tuple[ShortcutSet, WorkMetrics]:
    """Full recursive shortcut construction on g.

    track_origins overrides the ShortcutSet's own size-based default;
    sweeps at large n pass False to skip provenance bookkeeping.
    subproblem_log, when given a list, receives (r, members) for every
    subproblem entered -- the related-set decay checks replay those.
    """
    if k < 2:
        raise ValueError(f"recursion-speed parameter k must be >= 2, got {k}")
    shortcuts = ShortcutSet(g.n, track_origins=track_origins)
    metrics = WorkMetrics()
    _run_recursion(g, k, seed, shortcuts, metrics, subproblem_log)
    return shortcuts, metrics


def default_repetitions(n_top: int) -> int:
    """Repetition count of the whp wrapper: ceil(log2 n_top), at least 1."""
    return max(1, ceil_log2(n_top))


def seq_shortcut_whp(
    g: Digraph,
    k: int,
    repetitions: Optional[int] = None,
    seed: int = 0,
    track_origins: Optional[bool] = None,
) -> tuple[ShortcutSet, WorkMetrics]:
    """Union of independent seq_shortcut runs on derived seeds.

    Run i uses derive(seed, STREAM_REP, i). All runs share one ShortcutSet,
    so shortcuts_added counts distinct union edges; scan and label counters
    sum over runs. Also returns the merged metrics, which the acceptance
    sweeps regress against n and m.
    """
    if repetitions is None:
        repetitions = default_repetitions(g.n)
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    if k < 2:
        raise ValueError(f"recursion-speed parameter k must be >= 2, got {k}")
    shortcuts = ShortcutSet(g.n, track_origins=track_origins)
    metrics = WorkMetrics()
    for i in range(repetitions):
        _run_recursion(g, k, derive(seed, STREAM_REP, i), shortcuts, metrics, None)
    return shortcuts, metrics


def _run_recursion(
    g: Digraph,
    k: int,
    seed: int,
    shortcuts: ShortcutSet,
    metrics: WorkMetrics,
    subproblem_log: Optional[list],
) -> None:
    """One full recursion, accumulating into shortcuts and metrics.

    Subproblems never materialize induced subgraphs: the kernel restricts
    its searches to the member set over the top-level CSR. Dedup runs
    against the ShortcutSet's dense bitmap when available, so new_edges
    counts distinct edges across the whole run (and across earlier runs
    sharing the same set).
    """
    n = g.n
    if n == 0:
        return
    ws = _kernels.make_workspace(n)
    rows = shortcuts.rows
    _kernels.set_graph(
        ws, g.indptr_f, g.indices_f, g.indptr_b, g.indices_b, rows=rows
    )
    dedup_local = rows is None
    need_edges = dedup_local or shortcuts.tracks_origins
    stop = hard_stop_level(n, k)

    stack: list[tuple[np.ndarray, int, int]] = [
        (np.arange(n, dtype=np.int32), 0, seed)
    ]
    while stack:
        members, r, sub_seed = stack.pop()
        if r > metrics.max_r_reached:
            metrics.max_r_reached = r
        if subproblem_log is not None:
            subproblem_log.append((r, members))
        p = sample_probability(n, k, r)
        sample_all = p >= 1.0
        out = _kernels.level_sweep(
            ws,
            members,
            sub_seed,
            0 if sample_all else threshold_for(p),
            sample_all,
            _kernels.NO_LIMIT,
            _kernels.NO_LIMIT,
            _kernels.NO_LIMIT,
            dedup_local,
            False,
            need_edges,
            False,
            False,
        )
        metrics.edge_scans += out["edge_scans"]
        metrics.label_assignments += out["label_assignments"]
        if dedup_local:
            metrics.shortcuts_added += _insert_edges(
                shortcuts, out["edges_u"], out["edges_v"], out["s"], r
            )
        else:
            shortcuts.bulk_note(out["new_edges"])
            metrics.shortcuts_added += out["new_edges"]
            if shortcuts.tracks_origins and out["new_edges"]:
                u, v, sc = _attribute(out["edges_u"], out["edges_v"], out["s"])
                shortcuts.note_origins(u, v, r, sc)

        survivors = np.flatnonzero(out["elim"] == 0)
        ncells = 0
        cell_order: list[int] = []
        leaves = np.zeros(0, dtype=np.int64)
        groups = np.zeros(0, dtype=np.int64)
        if survivors.size:
            groups = out["group_of"][survivors]
            leaves = np.unique(groups)
            blob, offs = _kernels.chain_keys(
                out["grp_parent"], out["grp_hub"], out["grp_tag"], leaves
            )
            keys = [bytes(blob[offs[i] : offs[i + 1]]) for i in range(leaves.size)]
            cell_order = sorted(range(leaves.size), key=keys.__getitem__)
            ncells = int(leaves.size)
        metrics.comparisons += out["label_assignments"] + ncells * ceil_log2(
            ncells + 1
        )
        if ncells and r + 1 <= stop:
            # reversed so cells pop in canonical order
            for idx in range(ncells - 1, -1, -1):
                cell = members[survivors[groups == leaves[cell_order[idx]]]]
                stack.append(
                    (cell, r + 1, derive(sub_seed, STREAM_CELL, idx, r + 1))
                )


def _attribute(
    eu: np.ndarray, ev: np.ndarray, s: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Emitting shortcutter per edge: every edge touches at least one
    member of s, and when both endpoints are shortcutters the smaller id
    searched first and claimed the pair."""
    in_u = np.isin(eu, s)
    in_v = np.isin(ev, s)
    sc = np.where(in_u & in_v, np.minimum(eu, ev), np.where(in_u, eu, ev))
    return eu, ev, sc


def _insert_edges(
    shortcuts: ShortcutSet, eu: np.ndarray, ev: np.ndarray, s: np.ndarray, r: int
) -> int:
    """Sparse-mode insertion path: per-edge add() with provenance."""
    if eu.size == 0:
        return 0
    _, _, sc = _attribute(eu, ev, s)
    added = 0
    for u, v, w in zip(eu.tolist(), ev.tolist(), sc.tolist()):
        if shortcuts.add(u, v, r, w):
            added += 1
    return added
