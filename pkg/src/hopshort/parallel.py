"""Parallel shortcut construction with bounded searches and a diameter loop.

The parallel recursion mirrors the sequential one but caps every search at
a budget (kappa + 1) * D, labels within kappa * D, and collects a fringe
ring per shortcutter: vertices seen beyond (kappa - 1) * D in every
direction that reached them. Rings recurse sideways (same r, r_fringe + 1)
so truncation never loses a relation; survivor cells recurse down
(r + 1, 0) as usual. parallel_diam repeats whole runs in ceil(10 log2 n)
rounds of ceil(10 log2 n) parallel siblings, merging the survivors'
shortcuts into the working graph between rounds, and reports a logical
depth: per subproblem, BFS levels plus a log-factor for label sorting plus
a flat C_LOCAL charge; max over siblings, sum along chains.

Two engines back parallel_diam. The literal engine replays every sweep
through the kernels and accepts any input, including scale overrides that
shrink D and kappa to force fringe recursion. The saturated engine applies
when (kappa - 1) * D >= n and p_1 >= 1, which pins every search to its
full closure, empties every ring, and flattens runs to two levels; run
totals then follow from closure rows in O(|S| + cells) instead of
O(|S| * n). At the scales where kappa and D take their defined values the
saturated preconditions always hold, so the literal engine is in practice
the small-n and override engine. Both are asserted equal in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .graph import Digraph, VertexSet, ceil_log2
from .rng import (
    STREAM_CELL,
    STREAM_FRINGE,
    STREAM_KAPPA,
    STREAM_RUN,
    STREAM_SAMPLE,
    derive,
    threshold_for,
    u64_at,
    u64_vector,
    uniform_int,
)
from .seq import hard_stop_level
from .shortcuts import DENSE_MAX, Label, ShortcutSet

#: numerator constant of the parallel election probability p_r
SAMPLE_FACTOR = 10
#: base factor of the kappa interval bounds
KAPPA_SCALE = 10**6
#: flat depth charge per subproblem (election, kappa draw, bookkeeping)
C_LOCAL = 4

# seed of the survivor-signature hash keys; any fixed value works, the
# keys only have to be shared by every run of a call
_SIG_SEED = 0x51C3B70D


def sample_probability(n_top: int, k: int, r: int) -> float:
    """Election probability p_r = min(1, 10 * k^(r+1) * log2(n_top) / n_top)."""
    if n_top <= 1:
        return 0.0
    return min(1.0, SAMPLE_FACTOR * k ** (r + 1) * np.log2(n_top) / n_top)


def compute_search_scale(n_top: int, k: int) -> int:
    """Search budget unit D = ceil(100 * sqrt(2)^log_k(n) * sqrt(n) * log2(n)^2).

    The two square roots are folded into a single power of two,
    2^(log2(n)/2 * (1 + 1/log2(k))), so exact cases stay exact: n_top = 2,
    k = 2 gives precisely 200 instead of picking up float dust from
    sqrt(2) * sqrt(2).
    """
    if n_top < 2:
        raise ValueError(f"search scale needs n_top >= 2, got {n_top}")
    if k < 2:
        raise ValueError(f"recursion-speed parameter k must be >= 2, got {k}")
    log2n = math.log2(n_top)
    exponent = 0.5 * log2n * (1.0 + 1.0 / math.log2(k))
    return math.ceil(100.0 * 2.0**exponent * log2n**2)


def kappa_bound(n_top: int, k: int, i: int) -> float:
    """kappa_i = 10^6 * k^2 * log2(n_top)^5 * (1 + 1/(4 log2 n_top))^(-i)."""
    if n_top < 2:
        raise ValueError(f"kappa bounds need n_top >= 2, got {n_top}")
    if k < 2:
        raise ValueError(f"recursion-speed parameter k must be >= 2, got {k}")
    log2n = math.log2(n_top)
    decay = 1.0 + 1.0 / (4.0 * log2n)
    return KAPPA_SCALE * k * k * log2n**5 * decay**-i


def kappa_interval(n_top: int, k: int, r: int) -> tuple[int, int]:
    """Integer draw interval [ceil(kappa_{2r+1}), floor(kappa_{2r})]."""
    lo = math.ceil(kappa_bound(n_top, k, 2 * r + 1))
    hi = math.floor(kappa_bound(n_top, k, 2 * r))
    return lo, hi


class KappaDraw(NamedTuple):
    value: int
    degenerate: bool


def sample_kappa(n_top: int, k: int, r: int, seed: int) -> KappaDraw:
    """Uniform kappa from the level-r interval.

    An empty interval (possible only at degenerate n_top) falls back to
    max(1, floor(kappa_{2r})) and flags the draw; callers count the flag
    in their metrics rather than failing.
    """
    lo, hi = kappa_interval(n_top, k, r)
    if lo > hi:
        return KappaDraw(max(1, hi), True)
    return KappaDraw(uniform_int(seed, STREAM_KAPPA, lo, hi), False)


def depth_account(max_levels: int, max_labels: int, subproblem_size: int) -> int:
    """Depth charge of one subproblem's sweep.

    BFS levels are sequential; labels per vertex sort in
    ceil(log2 size) rounds each; C_LOCAL covers election, the kappa
    announcement and cell bookkeeping.
    """
    return max_levels + ceil_log2(max(subproblem_size, 1)) * max_labels + C_LOCAL


@dataclass(frozen=True)
class ScaleOverride:
    """Test hook pinning D and kappa to force truncation and fringe work."""

    D: int
    kappa: int

    def __post_init__(self) -> None:
        if self.D < 1:
            raise ValueError(f"override D must be >= 1, got {self.D}")
        if self.kappa < 1:
            raise ValueError(f"override kappa must be >= 1, got {self.kappa}")


@dataclass(frozen=True)
class ParCtx:
    """Coordinates of one parallel subproblem.

    n_top and k are global; r counts cell descents, r_fringe sideways
    fringe descents since the last cell descent. kappa and D are this
    subproblem's own search budgets; children redraw kappa from their
    derived seeds while D never changes within a call.
    """

    n_top: int
    k: int
    r: int
    r_fringe: int
    kappa: int
    D: int
    seed: int

    def __post_init__(self) -> None:
        if self.n_top < 2:
            raise ValueError(f"n_top must be >= 2, got {self.n_top}")
        if self.k < 2:
            raise ValueError(f"recursion-speed parameter k must be >= 2, got {self.k}")
        if not 0 <= self.r <= hard_stop_level(self.n_top, self.k):
            raise ValueError(f"level r={self.r} outside recursion bounds")
        if not 0 <= self.r_fringe <= ceil_log2(self.n_top):
            raise ValueError(f"fringe level {self.r_fringe} outside bounds")
        if self.kappa < 1:
            raise ValueError(f"kappa must be >= 1, got {self.kappa}")
        if self.D < 1:
            raise ValueError(f"D must be >= 1, got {self.D}")

    @property
    def p_r(self) -> float:
        return sample_probability(self.n_top, self.k, self.r)

    @classmethod
    def root(
        cls,
        n_top: int,
        k: int,
        seed: int,
        scale_override: Optional[ScaleOverride] = None,
    ) -> "ParCtx":
        """Top-level context: computed D, kappa drawn from the seed."""
        if scale_override is not None:
            return cls(n_top, k, 0, 0, scale_override.kappa, scale_override.D, seed)
        d = compute_search_scale(n_top, k)
        draw = sample_kappa(n_top, k, 0, seed)
        return cls(n_top, k, 0, 0, draw.value, d, seed)


@dataclass
class DepthMetrics:
    """Work and depth accounting of a parallel computation."""

    edge_scans: int = 0
    label_assignments: int = 0
    comparisons: int = 0
    shortcuts_added: int = 0
    logical_depth: int = 0
    fringe_vertex_visits: int = 0
    max_r_fringe: int = 0
    fringe_overflow: int = 0
    kappa_degenerate: int = 0
    aborted_runs: int = 0

    @property
    def work(self) -> int:
        return self.edge_scans + self.label_assignments + self.comparisons

    def as_dict(self) -> dict:
        return {
            "edge_scans": self.edge_scans,
            "label_assignments": self.label_assignments,
            "comparisons": self.comparisons,
            "work": self.work,
            "shortcuts_added": self.shortcuts_added,
            "logical_depth": self.logical_depth,
            "fringe_vertex_visits": self.fringe_vertex_visits,
            "max_r_fringe": self.max_r_fringe,
            "fringe_overflow": self.fringe_overflow,
            "kappa_degenerate": self.kappa_degenerate,
            "aborted_runs": self.aborted_runs,
        }


@dataclass(frozen=True)
class FringeRing:
    """Ring of one shortcutter: within (kappa+1)D, outside (kappa-1)D."""

    owner: int
    members: VertexSet


@dataclass
class ParallelSCResult:
    """One invocation's outputs: union shortcuts plus the root level's view."""

    shortcuts: ShortcutSet
    labels: list[Label]
    partition: list[VertexSet]
    fringes: list[FringeRing]
    metrics: DepthMetrics


# ---------------------------------------------------------------------------
# bit-row utilities shared by both engines


def _bits_of(ids: np.ndarray, words: int) -> np.ndarray:
    """Bitmap of sorted vertex ids as a uint64 word row."""
    out = np.zeros(words, dtype=np.uint64)
    if ids.size:
        arr = ids.astype(np.int64)
        wi = arr >> 6
        bit = np.uint64(1) << (arr & 63).astype(np.uint64)
        starts = np.flatnonzero(np.concatenate(([True], wi[1:] != wi[:-1])))
        out[wi[starts]] = np.bitwise_or.reduceat(bit, starts)
    return out


def _indices_of(row: np.ndarray) -> np.ndarray:
    """Set bit positions of a uint64 word row, ascending."""
    bits = np.unpackbits(row.view(np.uint8), bitorder="little")
    return np.flatnonzero(bits).astype(np.int64)


def _bulk_set_rows(rows: np.ndarray, us: np.ndarray, vs: np.ndarray) -> None:
    """OR the edge bits (us[i] -> vs[i]) into bitmap rows, vectorized.

    Groups by (row, word) with a sort so duplicate targets collapse into
    one fancy-indexed OR instead of a per-edge loop.
    """
    if us.size == 0:
        return
    u = us.astype(np.int64)
    v = vs.astype(np.int64)
    gk = (u << 26) | (v >> 6)
    order = np.argsort(gk, kind="stable")
    gk = gk[order]
    bit = np.uint64(1) << (v[order] & 63).astype(np.uint64)
    starts = np.flatnonzero(np.concatenate(([True], gk[1:] != gk[:-1])))
    orred = np.bitwise_or.reduceat(bit, starts)
    heads = gk[starts]
    rows[heads >> 26, heads & ((1 << 26) - 1)] |= orred


def _high_bit(vals: np.ndarray) -> np.ndarray:
    """Index of the highest set bit per uint64; -1 for zero."""
    v = vals.astype(np.uint64).copy()
    for s in (1, 2, 4, 8, 16, 32):
        v |= v >> np.uint64(s)
    return np.bitwise_count(v).astype(np.int64) - 1


def _ceil_log2_vec(sizes: np.ndarray) -> np.ndarray:
    """Vectorized ceil(log2 size); 0 for sizes 0 and 1."""
    return _high_bit(np.maximum(sizes.astype(np.int64) - 1, 0)) + 1


def _word_sums(deg: np.ndarray, words: int) -> np.ndarray:
    """Per-64-vertex-word degree totals, for all-ones scan shortcuts."""
    padded = np.zeros(words * 64, dtype=np.int64)
    padded[: deg.size] = deg
    return padded.reshape(words, 64).sum(axis=1)


# ---------------------------------------------------------------------------
# literal engine


@dataclass
class _Node:
    """One subproblem in a run's wave-ordered recursion tree."""

    members: np.ndarray
    r: int
    r_fringe: int
    seed: int
    kappa: Optional[int]
    parent: int
    local: int = 0
    offset: int = 0


@dataclass(eq=False)
class _RunOut:
    """Per-run results the diameter driver aggregates and merges."""

    metrics: DepthMetrics
    new_edges: int = 0
    aborted: bool = False
    edges_u: Optional[np.ndarray] = None
    edges_v: Optional[np.ndarray] = None
    s_merge_words: Optional[np.ndarray] = None
    unit_events: Optional[np.ndarray] = None
    root_labels: list = field(default_factory=list)
    root_partition: list = field(default_factory=list)
    root_fringes: list = field(default_factory=list)


def _literal_run(
    ws,
    n_top: int,
    k: int,
    d_scale: int,
    override: Optional[ScaleOverride],
    shortcuts: ShortcutSet,
    root_members: np.ndarray,
    root_seed: int,
    root_r: int = 0,
    root_rf: int = 0,
    root_kappa: Optional[int] = None,
    *,
    collect_root: bool = False,
    collect_edges: bool = False,
    collect_events: bool = False,
    subproblem_log: Optional[list] = None,
    work_limit: Optional[float] = None,
    shortcut_limit: Optional[float] = None,
) -> _RunOut:
    """One run, sweep by sweep through the kernels.

    Subproblems are processed in waves of equal tree depth, matching the
    parallel execution order; budget checkpoints sit between waves so an
    abort leaves a depth-consistent prefix. Dedup runs against the given
    ShortcutSet (per run in the diameter loop, global in parallel_sc), so
    new_edges counts the run's distinct emissions.
    """
    metrics = DepthMetrics()
    out = _RunOut(metrics=metrics)
    if root_members.size == 0:
        return out
    stop_r = hard_stop_level(n_top, k)
    cap_rf = ceil_log2(n_top)
    dedup_local = shortcuts.rows is None
    need_edges = dedup_local or collect_edges
    events: Optional[dict] = {} if collect_events else None
    eus: list[np.ndarray] = []
    evs: list[np.ndarray] = []

    nodes: list[_Node] = [
        _Node(root_members, root_r, root_rf, root_seed, root_kappa, -1)
    ]
    wave = [0]
    while wave:
        next_wave: list[int] = []
        for ni in wave:
            node = nodes[ni]
            members = node.members
            nn = int(members.size)
            if subproblem_log is not None:
                subproblem_log.append((node.r, node.r_fringe, members))
            if node.kappa is not None:
                kappa = node.kappa
            elif override is not None:
                kappa = override.kappa
            else:
                draw = sample_kappa(n_top, k, node.r, node.seed)
                kappa = draw.value
                metrics.kappa_degenerate += int(draw.degenerate)
            p = sample_probability(n_top, k, node.r)
            sample_all = p >= 1.0
            sw = _kernels.level_sweep(
                ws,
                members,
                node.seed,
                0 if sample_all else threshold_for(p),
                sample_all,
                (kappa + 1) * d_scale,
                kappa * d_scale,
                (kappa - 1) * d_scale,
                dedup_local,
                True,
                need_edges,
                collect_root and ni == 0,
                collect_events,
            )
            metrics.edge_scans += sw["edge_scans"]
            metrics.label_assignments += sw["label_assignments"]
            s = sw["s"]
            if dedup_local:
                added = _add_sparse(shortcuts, sw["edges_u"], sw["edges_v"], node.r)
            else:
                added = int(sw["new_edges"])
                shortcuts.bulk_note(added)
            metrics.shortcuts_added += added
            out.new_edges += added
            if collect_edges and added:
                eus.append(sw["edges_u"])
                evs.append(sw["edges_v"])

            lab = sw["labels_per_vertex"]
            lab_max = int(lab.max()) if lab.size else 0
            node.local = depth_account(int(sw["max_levels"]), lab_max, nn)
            if node.parent >= 0:
                parent = nodes[node.parent]
                node.offset = parent.offset + parent.local
            if collect_events:
                events[node.offset] = events.get(node.offset, 0) + s.size + 1
                for lvl, c in enumerate(sw["events"]):
                    if c:
                        key = node.offset + lvl
                        events[key] = events.get(key, 0) + int(c)

            # fringe children: same r, one ring level deeper
            metrics.fringe_vertex_visits += int(sw["fringe_enroll"])
            offs = sw["ring_offsets"]
            rv = sw["ring_vertices"]
            prev = 0
            for hi in range(s.size):
                end = int(offs[hi + 1])
                if end > prev:
                    ring = np.sort(rv[prev:end])
                    if collect_root and ni == 0:
                        out.root_fringes.append(
                            FringeRing(int(s[hi]), VertexSet(ring))
                        )
                    if node.r_fringe + 1 > cap_rf:
                        metrics.fringe_overflow += 1
                    else:
                        metrics.max_r_fringe = max(
                            metrics.max_r_fringe, node.r_fringe + 1
                        )
                        child_seed = derive(
                            node.seed, STREAM_FRINGE, int(s[hi]), node.r_fringe + 1
                        )
                        nodes.append(
                            _Node(ring, node.r, node.r_fringe + 1, child_seed, None, ni)
                        )
                        next_wave.append(len(nodes) - 1)
                prev = end

            # survivor cells in canonical label order: next level down
            survivors = np.flatnonzero(sw["elim"] == 0)
            ncells = 0
            cells: list[np.ndarray] = []
            if survivors.size:
                groups = sw["group_of"][survivors]
                leaves = np.unique(groups)
                blob, koffs = _kernels.chain_keys(
                    sw["grp_parent"], sw["grp_hub"], sw["grp_tag"], leaves
                )
                keys = [
                    bytes(blob[koffs[i] : koffs[i + 1]]) for i in range(leaves.size)
                ]
                order = sorted(range(leaves.size), key=keys.__getitem__)
                ncells = int(leaves.size)
                cells = [members[survivors[groups == leaves[i]]] for i in order]
            metrics.comparisons += sw["label_assignments"] + ncells * ceil_log2(
                ncells + 1
            )
            if collect_root and ni == 0:
                out.root_labels = [Label(*t) for t in sw["labels"]]
                out.root_partition = [VertexSet(c) for c in cells]
            if ncells and node.r + 1 <= stop_r:
                for idx, cell in enumerate(cells):
                    child_seed = derive(node.seed, STREAM_CELL, idx, node.r + 1)
                    nodes.append(_Node(cell, node.r + 1, 0, child_seed, None, ni))
                    next_wave.append(len(nodes) - 1)

        if (work_limit is not None and metrics.work > work_limit) or (
            shortcut_limit is not None and out.new_edges > shortcut_limit
        ):
            out.aborted = True
            metrics.aborted_runs = 1
            break
        wave = next_wave

    # depth: local charges, max over siblings, summed along chains
    below = [0] * len(nodes)
    for i in range(len(nodes) - 1, 0, -1):
        d_i = nodes[i].local + below[i]
        if d_i > below[nodes[i].parent]:
            below[nodes[i].parent] = d_i
    metrics.logical_depth = nodes[0].local + below[0]

    if collect_edges:
        out.edges_u = (
            np.concatenate(eus) if eus else np.zeros(0, dtype=np.int32)
        )
        out.edges_v = (
            np.concatenate(evs) if evs else np.zeros(0, dtype=np.int32)
        )
    if collect_events:
        vec = np.zeros(max(events) + 1 if events else 1, dtype=np.int64)
        for unit, c in events.items():
            vec[unit] = c
        out.unit_events = vec
    return out


def _add_sparse(shortcuts: ShortcutSet, eu: np.ndarray, ev: np.ndarray, r: int) -> int:
    """Insertion path for sparse-mode sets: per-edge add()."""
    added = 0
    for u, v in zip(eu.tolist(), ev.tolist()):
        if shortcuts.add(u, v, r):
            added += 1
    return added


def parallel_sc(
    g: Digraph,
    ctx: ParCtx,
    scale_override: Optional[ScaleOverride] = None,
    subproblem_log: Optional[list] = None,
) -> ParallelSCResult:
    """Full bounded-search recursion from the given coordinates.

    The root subproblem uses ctx's own kappa and D; recursive subproblems
    redraw kappa from seeds derived per cell index or per fringe owner.
    Root calls pass ctx = ParCtx.root(g.n, k, seed). The returned labels,
    partition and fringes describe the root level only; shortcuts and
    metrics cover the whole recursion. The optional subproblem_log gets a
    (r, r_fringe, members) triple per subproblem in parallel wave order.
    """
    shortcuts = ShortcutSet(g.n, track_origins=False)
    metrics = DepthMetrics()
    if g.n == 0:
        return ParallelSCResult(shortcuts, [], [], [], metrics)
    ws = _kernels.make_workspace(g.n)
    _kernels.set_graph(
        ws, g.indptr_f, g.indices_f, g.indptr_b, g.indices_b, rows=shortcuts.rows
    )
    run = _literal_run(
        ws,
        ctx.n_top,
        ctx.k,
        ctx.D,
        scale_override,
        shortcuts,
        np.arange(g.n, dtype=np.int32),
        ctx.seed,
        root_r=ctx.r,
        root_rf=ctx.r_fringe,
        root_kappa=ctx.kappa,
        collect_root=True,
        subproblem_log=subproblem_log,
    )
    return ParallelSCResult(
        shortcuts,
        run.root_labels,
        run.root_partition,
        run.root_fringes,
        run.metrics,
    )


# ---------------------------------------------------------------------------
# saturated engine


class _SatTables:
    """Closure rows and per-loop scan tables of the working graph.

    The closure itself never changes (shortcuts only realize existing
    reachability), so rows, relation sizes and signatures are computed
    once per call. Degrees, eccentricities and event tables depend on the
    merged edge set and refresh whenever a merge adds edges; once the
    bitmap hits the full closure pair count nothing can change and the
    refresh stops for good.
    """

    def __init__(self, g: Digraph, collect_events: bool) -> None:
        n = g.n
        self.n = n
        self.words = (n + 63) // 64
        self.collect_events = collect_events
        self.clos_f, self.ecc0_f = _kernels.closure_and_ecc(g.indptr_f, g.indices_f)
        self.clos_t, self.ecc0_b = _kernels.closure_and_ecc(g.indptr_b, g.indices_b)
        self.union_rows = self.clos_f | self.clos_t
        self.des = np.bitwise_count(self.clos_f).sum(axis=1).astype(np.int64)
        self.anc = np.bitwise_count(self.clos_t).sum(axis=1).astype(np.int64)
        both = (
            np.bitwise_count(self.clos_f & self.clos_t).sum(axis=1).astype(np.int64)
        )
        self.union_size = self.des + self.anc - both
        self.key_a = u64_vector(_SIG_SEED, 0, 2 * self.words)
        self.key_b = u64_vector(_SIG_SEED, 1, 2 * self.words)
        ids = np.arange(n, dtype=np.int64)
        self.all_ids = ids
        self.all_ids32 = ids.astype(np.int32)
        self.diag_w = ids >> 6
        self.diag_bit = np.uint64(1) << (ids & 63).astype(np.uint64)
        self.full_words = _bits_of(ids, self.words)
        self.csr_deg_f = np.diff(g.indptr_f)
        self.csr_deg_b = np.diff(g.indptr_b)
        self.csr_f_bits = np.zeros((n, self.words), dtype=np.uint64)
        _bulk_set_rows(
            self.csr_f_bits, np.repeat(ids, self.csr_deg_f), g.indices_f
        )
        self.csr_b_bits = np.zeros((n, self.words), dtype=np.uint64)
        _bulk_set_rows(
            self.csr_b_bits, np.repeat(ids, self.csr_deg_b), g.indices_b
        )
        # loop-refreshed
        self.deg_f = np.zeros(0, dtype=np.int64)
        self.deg_b = np.zeros(0, dtype=np.int64)
        self.wsum_f = np.zeros(0, dtype=np.int64)
        self.wsum_b = np.zeros(0, dtype=np.int64)
        self.ecc_f = self.ecc0_f
        self.ecc_b = self.ecc0_b
        self.ev_tables: Optional[dict] = None
        self.gen = 0

    def refresh(self, ws, F: np.ndarray, B: np.ndarray, pop: int) -> None:
        self.gen += 1
        self.deg_f = self.csr_deg_f + np.bitwise_count(F).sum(axis=1).astype(np.int64)
        self.deg_b = self.csr_deg_b + np.bitwise_count(B).sum(axis=1).astype(np.int64)
        self.wsum_f = _word_sums(self.deg_f, self.words)
        self.wsum_b = _word_sums(self.deg_b, self.words)
        if pop == 0:
            self.ecc_f = self.ecc0_f
            self.ecc_b = self.ecc0_b
        else:
            m1 = F | self.csr_f_bits
            m1[self.all_ids, self.diag_w] |= self.diag_bit
            self.ecc_f = self._ecc_rows(m1, self.clos_f, self.des)
            m1t = B | self.csr_b_bits
            m1t[self.all_ids, self.diag_w] |= self.diag_bit
            self.ecc_b = self._ecc_rows(m1t, self.clos_t, self.anc)
        if self.collect_events:
            cap = int(max(self.ecc_f.max(), self.ecc_b.max())) + 2
            self.ev_tables = _kernels.event_tables(ws, cap)

    def _ecc_rows(self, m1: np.ndarray, clos: np.ndarray, sizes: np.ndarray) -> np.ndarray:
        """Eccentricities from one-step rows; merged graphs are flat.

        Vertices whose one-step row covers their closure row have ecc 1
        (0 with no proper descendants); the few stragglers get a bit-row
        BFS each.
        """
        ecc = np.ones(self.n, dtype=np.int64)
        ecc[sizes == 1] = 0
        missing = (clos & ~m1).any(axis=1)
        for v in np.flatnonzero(missing):
            covered = m1[v].copy()
            frontier = covered
            lvl = 1
            target = clos[v]
            while (target & ~covered).any():
                step = np.bitwise_or.reduce(m1[_indices_of(frontier)], axis=0)
                frontier = step & ~covered
                covered |= step
                lvl += 1
            ecc[v] = lvl
        return ecc


def _kappa_floor(n_top: int, k: int) -> int:
    """Smallest kappa any level of the recursion can draw."""
    floor_v: Optional[int] = None
    for r in range(hard_stop_level(n_top, k) + 1):
        lo, hi = kappa_interval(n_top, k, r)
        v = lo if lo <= hi else max(1, hi)
        floor_v = v if floor_v is None else min(floor_v, v)
    return int(floor_v)


def _fast_run(
    n: int,
    k: int,
    run_seed: int,
    st: _SatTables,
    ws,
    *,
    collect_events: bool,
    work_limit: Optional[float],
    shortcut_limit: Optional[float],
) -> _RunOut:
    """Closed-form replay of one saturated run.

    Requires every search saturated ((kappa-1)D >= n, so rings are empty
    and labels are full relations) and p_1 >= 1 (so level-1 cells fully
    eliminate and the tree has at most two levels). Level 0 totals follow
    from closure rows; level-1 cells are small and go through the actual
    kernel sweeps via batch_cells.
    """
    metrics = DepthMetrics()
    out = _RunOut(metrics=metrics)
    draw0 = sample_kappa(n, k, 0, run_seed)
    metrics.kappa_degenerate += int(draw0.degenerate)
    p0 = sample_probability(n, k, 0)
    if p0 >= 1.0:
        s_list = st.all_ids32
        s_words = st.full_words
    else:
        mask = u64_at(run_seed, STREAM_SAMPLE, st.all_ids) < np.uint64(
            threshold_for(p0)
        )
        s_list = np.flatnonzero(mask).astype(np.int32)
        s_words = _bits_of(np.flatnonzero(mask), st.words)
    out.s_merge_words = s_words

    # level 0 totals from closure rows
    if s_list.size:
        lab, elim = _kernels.relation_stats(st.clos_f, st.clos_t, s_words)
        labels0 = int(lab.sum())
        lab_max0 = int(lab.max())
        hs = _kernels.saturated_hub_stats(
            st.clos_f,
            st.clos_t,
            s_list,
            s_words,
            st.deg_f,
            st.deg_b,
            st.wsum_f,
            st.wsum_b,
            st.des,
            st.anc,
        )
        scans0 = int(hs["edge_scans"])
        new0 = int(hs["new_edges"])
        lev0 = int(max(st.ecc_f[s_list].max(), st.ecc_b[s_list].max())) + 1
        survivors = np.flatnonzero(elim == 0).astype(np.int32)
    else:
        labels0 = scans0 = new0 = lab_max0 = lev0 = 0
        survivors = st.all_ids32

    cm = np.zeros(0, dtype=np.int32)
    sizes = np.zeros(0, dtype=np.int64)
    if survivors.size:
        if s_list.size == 0:
            cm = survivors
            sizes = np.array([survivors.size], dtype=np.int64)
        else:
            sg = _kernels.saturated_signatures(
                st.clos_f, st.clos_t, s_words, st.key_a, st.key_b, survivors
            )
            sa = sg["sig_a"].astype(np.int64)
            sb = sg["sig_b"].astype(np.int64)
            order = np.lexsort((sb, sa))
            gs = survivors[order]
            ga, gb = sa[order], sb[order]
            bnd = np.flatnonzero((np.diff(ga) != 0) | (np.diff(gb) != 0)) + 1
            starts = np.concatenate(([0], bnd))
            ends = np.concatenate((bnd, [gs.size]))
            reps = gs[starts].astype(np.int64)
            masked = st.union_rows[reps] & s_words[None, :]
            nz = masked != 0
            has = nz.any(axis=1)
            last_word = st.words - 1 - np.argmax(nz[:, ::-1], axis=1)
            top = masked[np.arange(reps.size), last_word]
            last = np.where(has, last_word * 64 + _high_bit(top), -1)
            co = _kernels.saturated_cell_order(
                st.clos_f, st.clos_t, s_words, reps, last
            )
            # gather the sorted survivors cell by cell in canonical order
            sizes = (ends - starts)[co]
            coffs = np.zeros(co.size + 1, dtype=np.int64)
            np.cumsum(sizes, out=coffs[1:])
            pos = (
                np.arange(gs.size, dtype=np.int64)
                - np.repeat(coffs[:-1], sizes)
                + np.repeat(starts[co], sizes)
            )
            cm = gs[pos]
    ncells = int(sizes.size)

    metrics.edge_scans += scans0
    metrics.label_assignments += labels0
    metrics.comparisons += labels0 + ncells * ceil_log2(ncells + 1)
    out.new_edges += new0
    local0 = depth_account(lev0, lab_max0, n)

    ev_units: Optional[dict] = None
    if collect_events:
        ev_units = {0: s_list.size + 1}
        if s_list.size:
            h = _kernels.run_hist(st.ev_tables, s_list, s_words)
            tot = h["visits"] + h["labels"] + h["edges"]
            for lvl in range(tot.size):
                if tot[lvl]:
                    ev_units[lvl] = ev_units.get(lvl, 0) + int(tot[lvl])

    aborted = (work_limit is not None and metrics.work > work_limit) or (
        shortcut_limit is not None and out.new_edges > shortcut_limit
    )
    depth = local0
    if not aborted and ncells:
        if _kappa_degenerate_level(n, k, 1):
            metrics.kappa_degenerate += ncells
        if s_list.size:
            offs = np.zeros(ncells + 1, dtype=np.int64)
            np.cumsum(sizes, out=offs[1:])
            bc = _kernels.batch_cells(ws, cm, offs, collect_events)
            metrics.edge_scans += int(bc["edge_scans"])
            metrics.label_assignments += int(bc["label_assignments"])
            metrics.comparisons += int(bc["label_assignments"])
            out.new_edges += int(bc["new_edges"])
            out.edges_u = bc["edges_u"]
            out.edges_v = bc["edges_v"]
            locals1 = (
                bc["cell_max_levels"]
                + _ceil_log2_vec(sizes) * bc["cell_max_lab"]
                + C_LOCAL
            )
            depth = local0 + int(locals1.max())
            if collect_events:
                ev_units[local0] = ev_units.get(local0, 0) + int(
                    (sizes + 1).sum()
                )
                bev = bc["events"]
                for lvl in range(bev.size):
                    if bev[lvl]:
                        key = local0 + lvl
                        ev_units[key] = ev_units.get(key, 0) + int(bev[lvl])
        else:
            # no shortcutters at level 0: everything survives as one cell
            # and p_1 >= 1 saturates it, which is the level-0 closed form
            # with S = V
            labels1 = int(st.union_size.sum())
            hs1 = _kernels.saturated_hub_stats(
                st.clos_f,
                st.clos_t,
                st.all_ids32,
                st.full_words,
                st.deg_f,
                st.deg_b,
                st.wsum_f,
                st.wsum_b,
                st.des,
                st.anc,
            )
            metrics.edge_scans += int(hs1["edge_scans"])
            metrics.label_assignments += labels1
            metrics.comparisons += labels1
            out.new_edges += int(hs1["new_edges"])
            out.s_merge_words = st.full_words
            lev1 = int(max(st.ecc_f.max(), st.ecc_b.max())) + 1
            depth = local0 + depth_account(lev1, int(st.union_size.max()), n)
            if collect_events:
                ev_units[local0] = ev_units.get(local0, 0) + n + 1
                h1 = _kernels.run_hist(st.ev_tables, st.all_ids32, st.full_words)
                tot1 = h1["visits"] + h1["labels"] + h1["edges"]
                for lvl in range(tot1.size):
                    if tot1[lvl]:
                        key = local0 + lvl
                        ev_units[key] = ev_units.get(key, 0) + int(tot1[lvl])
        aborted = (work_limit is not None and metrics.work > work_limit) or (
            shortcut_limit is not None and out.new_edges > shortcut_limit
        )
    metrics.logical_depth = depth
    if aborted:
        out.aborted = True
        metrics.aborted_runs = 1
    if collect_events:
        vec = np.zeros(max(ev_units) + 1, dtype=np.int64)
        for unit, c in ev_units.items():
            vec[unit] = c
        out.unit_events = vec
    return out


def _kappa_degenerate_level(n_top: int, k: int, r: int) -> bool:
    """Whether level r's kappa interval is empty (seed-independent)."""
    lo, hi = kappa_interval(n_top, k, r)
    return lo > hi


# ---------------------------------------------------------------------------
# diameter loop


def parallel_diam(
    g: Digraph,
    k: int,
    seed: int = 0,
    *,
    work_factor: float = 10.0,
    shortcut_factor: float = 10.0,
    work_limit: Optional[float] = None,
    shortcut_limit: Optional[float] = None,
    scale_override: Optional[ScaleOverride] = None,
    diagnostics: Optional[dict] = None,
) -> tuple[ShortcutSet, DepthMetrics]:
    """Repeated-run shortcut union until the working graph flattens.

    ceil(10 log2 n) outer rounds each launch ceil(10 log2 n) independent
    runs as parallel siblings on the current working graph; after every
    round the surviving runs' shortcuts merge into it. Runs whose work
    exceeds 10 * work_factor * (m k + n k^2) log2(n)^3, or whose shortcut
    count exceeds 10 * shortcut_factor * n k log2(n)^3, abort at the next
    wave boundary and are recorded, not merged (work_limit and
    shortcut_limit override the computed thresholds outright). Depth sums
    the per-round maxima. A diagnostics dict, when given, receives
    "outer_diameters" (hop diameter of the working graph after each round)
    and "aborted" (run coordinates).
    """
    shortcuts, metrics, _ = _diam_engine(
        g,
        k,
        seed,
        work_factor=work_factor,
        shortcut_factor=shortcut_factor,
        work_limit=work_limit,
        shortcut_limit=shortcut_limit,
        scale_override=scale_override,
        collect_events=False,
        diagnostics=diagnostics,
    )
    return shortcuts, metrics


def _diam_engine(
    g: Digraph,
    k: int,
    seed: int,
    *,
    work_factor: float = 10.0,
    shortcut_factor: float = 10.0,
    work_limit: Optional[float] = None,
    shortcut_limit: Optional[float] = None,
    scale_override: Optional[ScaleOverride] = None,
    collect_events: bool = False,
    diagnostics: Optional[dict] = None,
    _force_literal: bool = False,
) -> tuple[ShortcutSet, DepthMetrics, Optional[list[np.ndarray]]]:
    """Shared diameter loop; collect_events adds per-round depth-unit
    message histograms for the distributed simulation."""
    if k < 2:
        raise ValueError(f"recursion-speed parameter k must be >= 2, got {k}")
    n = g.n
    metrics = DepthMetrics()
    shortcuts = ShortcutSet(n, track_origins=False)
    events_out: Optional[list[np.ndarray]] = [] if collect_events else None
    if n <= 1:
        return shortcuts, metrics, events_out
    if n > DENSE_MAX:
        raise ValueError(
            f"diameter loop holds the working graph as dense bitmap rows, "
            f"capping n at {DENSE_MAX}; got {n}"
        )
    rounds = math.ceil(10 * math.log2(n))
    d_scale = (
        scale_override.D if scale_override is not None else compute_search_scale(n, k)
    )
    words = (n + 63) // 64
    F = np.zeros((n, words), dtype=np.uint64)
    B = np.zeros((n, words), dtype=np.uint64)
    log_cubed = math.log2(n) ** 3
    thr_s = (
        shortcut_limit
        if shortcut_limit is not None
        else 10.0 * shortcut_factor * n * k * log_cubed
    )
    fast = (
        not _force_literal
        and scale_override is None
        and sample_probability(n, k, 1) >= 1.0
        and (_kappa_floor(n, k) - 1) * d_scale >= n
    )
    collapse = fast and sample_probability(n, k, 0) >= 1.0
    ws = _kernels.make_workspace(n)
    st: Optional[_SatTables] = None
    if fast:
        st = _SatTables(g, collect_events)
        _kernels.set_graph(
            ws, g.indptr_f, g.indices_f, g.indptr_b, g.indices_b,
            extra_f=F, extra_t=B,
        )
    ids = np.arange(n, dtype=np.int64)
    diag_w = ids >> 6
    diag_bit = np.uint64(1) << (ids & 63).astype(np.uint64)
    if diagnostics is not None:
        diagnostics.setdefault("outer_diameters", [])
        diagnostics.setdefault("aborted", [])

    m_work = g.m
    last_pop = -1
    cached: Optional[_RunOut] = None
    cached_gen = -1
    for outer in range(rounds):
        thr_w = (
            work_limit
            if work_limit is not None
            else 10.0 * work_factor * (m_work * k + n * k * k) * log_cubed
        )
        if fast:
            pop = int(np.bitwise_count(F).sum())
            if pop != last_pop:
                st.refresh(ws, F, B, pop)
                last_pop = pop

        records: list[_RunOut]
        mult = 1
        if collapse:
            if cached is None or cached_gen != st.gen:
                cached = _fast_run(
                    n, k, derive(seed, STREAM_RUN, outer, 0), st, ws,
                    collect_events=collect_events,
                    work_limit=thr_w, shortcut_limit=thr_s,
                )
                cached_gen = st.gen
            records = [cached]
            mult = rounds
        elif fast:
            records = [
                _fast_run(
                    n, k, derive(seed, STREAM_RUN, outer, inner), st, ws,
                    collect_events=collect_events,
                    work_limit=thr_w, shortcut_limit=thr_s,
                )
                for inner in range(rounds)
            ]
        else:
            records = []
            for inner in range(rounds):
                run_set = ShortcutSet(n, track_origins=False)
                _kernels.set_graph(
                    ws, g.indptr_f, g.indices_f, g.indptr_b, g.indices_b,
                    rows=run_set.rows, extra_f=F, extra_t=B,
                )
                records.append(
                    _literal_run(
                        ws, n, k, d_scale, scale_override, run_set,
                        np.arange(n, dtype=np.int32),
                        derive(seed, STREAM_RUN, outer, inner),
                        collect_edges=True, collect_events=collect_events,
                        work_limit=thr_w, shortcut_limit=thr_s,
                    )
                )

        metrics.logical_depth += max(r.metrics.logical_depth for r in records)
        for idx, rec in enumerate(records):
            rm = rec.metrics
            metrics.edge_scans += rm.edge_scans * mult
            metrics.label_assignments += rm.label_assignments * mult
            metrics.comparisons += rm.comparisons * mult
            metrics.fringe_vertex_visits += rm.fringe_vertex_visits * mult
            metrics.fringe_overflow += rm.fringe_overflow * mult
            metrics.kappa_degenerate += rm.kappa_degenerate * mult
            metrics.aborted_runs += rm.aborted_runs * mult
            if rm.max_r_fringe > metrics.max_r_fringe:
                metrics.max_r_fringe = rm.max_r_fringe
            if rec.aborted and diagnostics is not None:
                # inner index -1: a collapsed round where all siblings
                # abort identically
                diagnostics["aborted"].append((outer, idx if mult == 1 else -1))

        # merge survivors into the working graph
        survivors = [rec for rec in records if not rec.aborted]
        if fast:
            us_words = np.zeros(words, dtype=np.uint64)
            for rec in survivors:
                us_words |= rec.s_merge_words
            hubs = _indices_of(us_words)
            if hubs.size:
                F[hubs] |= st.clos_f[hubs]
                F |= st.clos_f & us_words[None, :]
                B[hubs] |= st.clos_t[hubs]
                B |= st.clos_t & us_words[None, :]
                F[ids, diag_w] &= ~diag_bit
                B[ids, diag_w] &= ~diag_bit
        for rec in survivors:
            if rec.edges_u is not None and rec.edges_u.size:
                _bulk_set_rows(F, rec.edges_u, rec.edges_v)
                _bulk_set_rows(B, rec.edges_v, rec.edges_u)
        m_work = g.m + int(np.bitwise_count(F).sum())

        if collect_events:
            width = max(rec.unit_events.size for rec in records)
            vec = np.zeros(width, dtype=np.int64)
            for rec in records:
                vec[: rec.unit_events.size] += rec.unit_events * mult
            events_out.append(vec)
        if diagnostics is not None:
            diagnostics["outer_diameters"].append(
                _working_diameter(g, ws, F, B, fast, st)
            )
            if fast:
                # _working_diameter refreshed the tables for the merged
                # bitmap; keep the loop's refresh tracking in step
                last_pop = int(np.bitwise_count(F).sum())

    count = m_work - g.m
    if shortcuts.rows is not None:
        shortcuts.rows[:] = F
    shortcuts.bulk_note(count)
    metrics.shortcuts_added = count
    return shortcuts, metrics, events_out


def _working_diameter(
    g: Digraph, ws, F: np.ndarray, B: np.ndarray, fast: bool, st: Optional[_SatTables]
) -> int:
    """Hop diameter of the merged working graph (diagnostics only)."""
    if fast:
        pop = int(np.bitwise_count(F).sum())
        st.refresh(ws, F, B, pop)
        return int(st.ecc_f.max())
    _kernels.set_graph(
        ws, g.indptr_f, g.indices_f, g.indptr_b, g.indices_b, extra_f=F, extra_t=B
    )
    return int(_kernels.merged_ecc(ws).max())
