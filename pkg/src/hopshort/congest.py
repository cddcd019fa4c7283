"""Round-accurate simulation of skeleton-based distributed reachability.

The network is the directed graph plus one bidirectional communication
link per edge; each link direction carries at most one O(log n)-bit token
per round. The protocol follows the classic sample-and-skeleton shape:
every vertex joins a hub set T with probability ~10 alpha log2(n) / n
(the source always joins), a limited BFS floods one token per hub in each
direction so that every vertex learns which hubs sit within h =
ceil(10 n log2 n / alpha) hops, and hubs assemble a skeleton digraph whose
edge u -> v certifies a real path of at most h hops. The diameter loop
then runs over the skeleton, with every depth unit's freshly produced
events (elections and the leader's kappa draw, search visits, labels, new
shortcut edges) broadcast to the whole network; finally a bounded BFS over
the shortcut-augmented skeleton finds the hubs reachable from the source,
their bits are broadcast, and every vertex decides locally from its stored
hub relations.

Two kinds of round accounting coexist. Link-level phases (the hub floods,
broadcast_all) are simulated move by move and report the rounds that
actually elapsed. The diameter replay would be millions of broadcasts, so
each depth unit is charged the closed-form worst case broadcast_charge(K)
for its K tokens; units that produced nothing are local computation and
cost zero, exactly like broadcast_all on an empty holder map. Envelopes
from the analysis (2(K + 2 D_hop) per broadcast, ~(|T| + h) log n for the
flood) are asserted on top of the honest counts, never scheduled for.
"""

from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Union

import numpy as np

from . import _kernels
from .graph import (
    FORWARD,
    Digraph,
    VertexSet,
    bfs_limited,
    ceil_log2,
    reachable_set,
)
from .parallel import _diam_engine, compute_search_scale
from .rng import (
    STREAM_FLOOD,
    STREAM_SAMPLE,
    STREAM_TRIAL,
    bernoulli_mask,
    derive,
)

#: sentinel for the self-tuning alpha choice in distr_reach
AUTO = "auto"

#: asserted constant of the limited-BFS round envelope C * (|T| + h) * log2 n
BFS_ENVELOPE_FACTOR = 10

# sampling attempts before a ground-truth mismatch is treated as a bug
_MAX_REDRAWS = 32

_PHASES = ("sampling_bfs", "skeleton", "diam_simulation", "final_broadcast")

Trace = Optional[Callable[[str], None]]


class Network:
    """A directed graph plus the undirected communication links over it.

    Every directed edge (u, v) doubles as a bidirectional link {u, v}.
    The link graph must be connected, otherwise the hop diameter is
    infinite and no broadcast can finish; that is rejected here so the
    protocol phases never have to reason about unreachable nodes.

    Each node carries a knowledge store (a plain dict) that the protocol
    fills in: hub relations after the limited BFS, the reachability bit
    after distr_reach. Stores reflect the most recent invocation.
    """

    __slots__ = (
        "g",
        "links",
        "d_hop",
        "knowledge",
        "tree_parent",
        "tree_depth",
        "tree_order",
    )

    def __init__(self, g: Digraph):
        if g.n < 1:
            raise ValueError("a network needs at least one node")
        e = g.edges()
        links = Digraph(g.n, np.vstack([e, e[:, ::-1]]) if e.size else e)
        parent, depth, order = _link_tree(links, 0)
        if (depth < 0).any():
            missing = int(np.flatnonzero(depth < 0)[0])
            raise ValueError(
                f"communication graph is disconnected: node {missing} is "
                f"unreachable from node 0, so the hop diameter is infinite"
            )
        self.g = g
        self.links = links
        self.d_hop = int(_kernels.ecc_all(links.indptr_f, links.indices_f).max())
        self.knowledge: list[dict] = [{} for _ in range(g.n)]
        # fixed BFS spanning tree used by every broadcast; root is node 0
        self.tree_parent = parent
        self.tree_depth = depth
        self.tree_order = order

    @property
    def n(self) -> int:
        return self.g.n

    def __repr__(self) -> str:
        return f"Network(n={self.n}, m={self.g.m}, d_hop={self.d_hop})"


def _link_tree(links: Digraph, root: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """BFS spanning tree of the link graph: (parent, depth, visit order).

    parent[root] is -1; depth -1 marks nodes the root cannot reach, which
    the Network constructor turns into an error.
    """
    n = links.n
    parent = np.full(n, -1, dtype=np.int64)
    depth = np.full(n, -1, dtype=np.int64)
    depth[root] = 0
    order = [root]
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        for v in links.out(u):
            if depth[v] < 0:
                depth[v] = depth[u] + 1
                parent[v] = u
                order.append(int(v))
    return parent, depth, np.array(order, dtype=np.int64)


@dataclass(frozen=True)
class Message:
    """One O(log n)-bit token in flight on a link during one round.

    The payload is a token tag, not literal bits: everything the protocol
    sends (vertex ids, hub ids, per-unit event tokens) fits in O(log n)
    bits by construction, so the simulator counts tokens instead of
    encoding them.
    """

    payload: str
    src: int
    dst: int
    round_sent: int


@dataclass
class RoundLedger:
    """Per-phase round totals for one distr_reach invocation.

    The skeleton phase is listed for completeness but stays zero: edges
    are assembled locally from flood results, no link ever carries them.
    Redrawn attempts keep charging the same ledger, so the totals cover
    everything the network executed, not just the attempt whose answer
    was kept.
    """

    sampling_bfs: int = 0
    skeleton: int = 0
    diam_simulation: int = 0
    final_broadcast: int = 0
    messages_total: int = 0
    redraws: int = 0

    @property
    def total_rounds(self) -> int:
        return (
            self.sampling_bfs
            + self.skeleton
            + self.diam_simulation
            + self.final_broadcast
        )

    def charge(self, phase: str, rounds: int, messages: int = 0) -> None:
        if phase not in _PHASES:
            raise ValueError(f"unknown ledger phase {phase!r}")
        if rounds < 0 or messages < 0:
            raise ValueError("round and message charges must be nonnegative")
        setattr(self, phase, getattr(self, phase) + int(rounds))
        self.messages_total += int(messages)


@dataclass
class SkeletonGraph:
    """Hub digraph: edge (u, v) certifies a real path of at most h hops."""

    hubs: VertexSet
    edges: np.ndarray
    h: int

    def local(self) -> Digraph:
        """The skeleton over hub indices 0..|T|-1, in hub id order."""
        ids = self.hubs.ids
        if self.edges.size == 0:
            return Digraph(ids.size, np.zeros((0, 2), dtype=np.int64))
        return Digraph(ids.size, np.searchsorted(ids, self.edges))

    def index_of(self, v: int) -> int:
        ids = self.hubs.ids
        i = int(np.searchsorted(ids, v))
        if i >= ids.size or ids[i] != v:
            raise ValueError(f"vertex {v} is not a hub")
        return i


@dataclass
class HubRelations:
    """h-bounded reachability between every node and the hub set.

    anc[v, i] is True when hub t_ids[i] reaches v within h hops; des[v, i]
    when v reaches that hub. Membership comes from accepted flood tokens,
    so a True entry always certifies a real path.
    """

    t_ids: np.ndarray
    h: int
    anc: np.ndarray
    des: np.ndarray


def broadcast_all(
    net: Network,
    holders: Mapping[int, int],
    *,
    ledger: Optional[RoundLedger] = None,
    phase: str = "final_broadcast",
    trace: Trace = None,
    concurrent: bool = False,
) -> int:
    """Deliver every held token to every node; returns the rounds used.

    Upcast is simulated round by round over the spanning tree: each node
    forwards one queued token per round toward the root, so converging
    streams pay their real queueing delay, and every relay node keeps a
    copy of what passed through it. The downcast is the standard pipeline
    and is charged in closed form: the root streams all K tokens down
    every branch that still misses something, reaching the deepest such
    node after K - 1 + depth rounds; when the upcast already covered
    everyone (a chain with the holder at the far end) it costs nothing.
    Link capacity holds by construction, one token per node toward its
    unique parent; the 2(K + 2 D_hop) envelope is asserted on the sum.
    """
    k_total = 0
    origins = []
    for v in holders:
        c = int(holders[v])
        if not 0 <= int(v) < net.n:
            raise ValueError(f"holder {v} out of range for n={net.n}")
        if c < 0:
            raise ValueError(f"negative message count {c} at node {v}")
        if c:
            origins.append(int(v))
        k_total += c
    if k_total == 0:
        return 0
    parent = net.tree_parent
    root = int(net.tree_order[0])

    queues: dict[int, deque] = {}
    for v in sorted(origins):
        if v != root:
            queues[v] = deque((v, j) for j in range(int(holders[v])))

    rnd = 0
    moves = 0
    executor = ThreadPoolExecutor(max_workers=4) if concurrent else None
    try:
        while queues:
            rnd += 1
            senders = sorted(queues)
            heads = _map_ordered(executor, lambda u: queues[u][0], senders)
            for u, tok in zip(senders, heads):
                queues[u].popleft()
                p = int(parent[u])
                if trace is not None:
                    msg = Message(
                        payload=f"{tok[0]}.{tok[1]}", src=u, dst=p, round_sent=rnd
                    )
                    trace(
                        f"round={rnd} phase={phase} "
                        f"edge={msg.src}-{msg.dst} token={msg.payload}"
                    )
                if p != root:
                    queues.setdefault(p, deque()).append(tok)
            moves += len(senders)
            for u in senders:
                if u in queues and not queues[u]:
                    del queues[u]
    finally:
        if executor is not None:
            executor.shutdown()

    # after the upcast, token t sits exactly on the tree chain from its
    # origin up to the root; a node holds everything iff it lies on all
    # origin chains
    n_orig = len(set(origins))
    on_chains = np.zeros(net.n, dtype=np.int64)
    for v in set(origins):
        u = v
        while u != -1:
            on_chains[u] += 1
            u = int(parent[u])
    needy = on_chains < n_orig
    if needy.any():
        down_rounds = k_total - 1 + int(net.tree_depth[needy].max())
        # an edge carries the downward stream iff its subtree still
        # misses something; accumulate leaf-to-root over the BFS order
        sub = needy.copy()
        for u in net.tree_order[::-1]:
            if sub[u] and parent[u] != -1:
                sub[int(parent[u])] = True
        down_moves = k_total * int(sub.sum() - bool(sub[root]))
    else:
        down_rounds = 0
        down_moves = 0

    rounds = rnd + down_rounds
    assert rounds <= 2 * (k_total + 2 * net.d_hop), (
        f"broadcast of {k_total} tokens took {rounds} rounds, exceeding "
        f"2(K + 2 D_hop) = {2 * (k_total + 2 * net.d_hop)}"
    )
    if ledger is not None:
        ledger.charge(phase, rounds, moves + down_moves)
    return rounds


def broadcast_charge(net: Network, k_tokens: int) -> int:
    """Closed-form worst-case rounds to broadcast k_tokens, any placement.

    Pipelined upcast and downcast each take at most K - 1 + D_hop rounds.
    The diameter replay uses this instead of broadcast_all because it
    counts event tokens per depth unit without tracking which hub holds
    which token. Zero tokens charge zero rounds, matching broadcast_all
    on an empty holder map.
    """
    if k_tokens <= 0 or net.n <= 1:
        return 0
    return 2 * (k_tokens - 1 + net.d_hop)


def _map_ordered(executor, fn, items):
    """fn over items, preserving order; threaded when an executor is given.

    The reference path and the threaded path must be observationally
    identical, which holds because callers only pass read-only fn here and
    apply all mutations afterwards in the same deterministic order.
    """
    if executor is None or len(items) < 2:
        return [fn(x) for x in items]
    return list(executor.map(fn, items))


def limited_bfs_all(
    net: Network,
    T: VertexSet,
    h: int,
    *,
    seed: int = 0,
    ledger: Optional[RoundLedger] = None,
    trace: Trace = None,
    concurrent: bool = False,
) -> tuple[HubRelations, int]:
    """Every node learns which hubs lie within h hops, both directions.

    Simulated as one token flood per hub per direction over the real
    links: FIFO queue per link direction, one token per round, first
    arrival accepted and forwarded while the hop budget lasts. The two
    directions run as separate phases and their rounds add. Counts are
    the simulation's own; the (|T| + h) log n envelope is asserted on
    top rather than scheduled for.

    Returns (relations, rounds) and stores each node's hub id arrays
    under 'in_T_ancestors' / 'in_T_descendants' in its knowledge store.
    """
    if len(T) == 0:
        raise ValueError("hub set must be nonempty")
    if h < 0:
        raise ValueError(f"hop budget must be nonnegative, got {h}")
    g = net.g
    srcs = T.ids
    fseed = derive(seed, STREAM_FLOOD, 0)
    bseed = derive(seed, STREAM_FLOOD, 1)
    if trace is None and not concurrent:
        fwd = _kernels.flood(g.indptr_f, g.indices_f, srcs, h, fseed)
        bwd = _kernels.flood(g.indptr_b, g.indices_b, srcs, h, bseed)
    else:
        fwd = _flood_sim(
            g.indptr_f, g.indices_f, srcs, h, fseed,
            trace=trace, token_prefix="fwd", concurrent=concurrent,
        )
        bwd = _flood_sim(
            g.indptr_b, g.indices_b, srcs, h, bseed,
            trace=trace, token_prefix="bwd", concurrent=concurrent,
        )
    anc = np.ascontiguousarray((fwd["hops"] >= 0).T)
    des = np.ascontiguousarray((bwd["hops"] >= 0).T)
    rounds = int(fwd["rounds"]) + int(bwd["rounds"])
    messages = int(fwd["messages"]) + int(bwd["messages"])
    bound = BFS_ENVELOPE_FACTOR * (len(T) + h) * math.log2(max(g.n, 2))
    assert rounds <= bound, (
        f"limited BFS took {rounds} rounds, envelope {bound:.0f} "
        f"(|T|={len(T)}, h={h}, n={g.n})"
    )
    for v in range(g.n):
        store = net.knowledge[v]
        store["in_T_ancestors"] = srcs[anc[v]]
        store["in_T_descendants"] = srcs[des[v]]
    if ledger is not None:
        ledger.charge("sampling_bfs", rounds, messages)
    return HubRelations(t_ids=srcs, h=int(h), anc=anc, des=des), rounds


def _flood_sim(
    indptr: np.ndarray,
    indices: np.ndarray,
    sources: np.ndarray,
    h: int,
    seed: int,
    *,
    trace: Trace,
    token_prefix: str,
    concurrent: bool,
) -> dict:
    """Reference flood with tracing; move-for-move equal to the kernel.

    Parity hinges on three orderings the kernel fixes: links drain in slot
    order, destinations process in ascending id, and same-round arrivals
    at one destination sort by a key derived from (seed, round, dst). The
    concurrent mode only parallelizes the read-only link scan and applies
    every mutation in the same slot order as the reference.
    """
    nlinks = int(indices.size)
    n = int(indptr.size - 1)
    src_of = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    nt = int(sources.size)
    hops = np.full((nt, n), -1, dtype=np.int32)
    queues: list[deque] = [deque() for _ in range(nlinks)]
    rounds = 0
    messages = 0

    def push_out(u: int, ti: int, hop: int) -> None:
        if hop + 1 > h:
            return
        for slot in range(int(indptr[u]), int(indptr[u + 1])):
            queues[slot].append((ti, hop + 1))

    for i in range(nt):
        s = int(sources[i])
        hops[i, s] = 0
        push_out(s, i, 0)

    executor = ThreadPoolExecutor(max_workers=4) if concurrent else None
    step = max(256, nlinks // 4 + 1)
    chunks = [(lo, min(lo + step, nlinks)) for lo in range(0, nlinks, step)]

    def scan(span: tuple[int, int]) -> list[int]:
        return [slot for slot in range(span[0], span[1]) if queues[slot]]

    try:
        while True:
            busy: list[int] = []
            for part in _map_ordered(executor, scan, chunks):
                busy.extend(part)
            if not busy:
                break
            rounds += 1
            messages += len(busy)
            arrivals: dict[int, list[tuple[int, int]]] = {}
            for slot in busy:
                ti, hop = queues[slot].popleft()
                dst = int(indices[slot])
                arrivals.setdefault(dst, []).append((ti, hop))
                if trace is not None:
                    msg = Message(
                        payload=f"{token_prefix}:{int(sources[ti])}",
                        src=int(src_of[slot]),
                        dst=dst,
                        round_sent=rounds,
                    )
                    trace(
                        f"round={rounds} phase=sampling_bfs "
                        f"edge={msg.src}-{msg.dst} token={msg.payload}"
                    )
            # one pop per link per round: the capacity invariant is
            # structural, but cheap to state
            assert len(busy) == len(set(busy))
            for dst in sorted(arrivals):
                per_dst = derive(seed, rounds, dst)
                batch = sorted(
                    arrivals[dst], key=lambda th: derive(per_dst, th[0], th[1])
                )
                for ti, hop in batch:
                    if hops[ti, dst] < 0:
                        hops[ti, dst] = hop
                        push_out(dst, ti, hop)
    finally:
        if executor is not None:
            executor.shutdown()
    return {"hops": hops, "rounds": rounds, "messages": messages}


def _sample_hubs(net: Network, s: int, alpha: float, seed: int) -> VertexSet:
    """Pick T: independent coins at p = min(1, 10 alpha log2 n / n), s forced."""
    n = net.n
    p = min(1.0, 10.0 * float(alpha) * math.log2(n) / n) if n > 1 else 0.0
    mask = bernoulli_mask(seed, STREAM_SAMPLE, n, p)
    mask[s] = True
    return VertexSet(np.flatnonzero(mask))


def _build_skeleton_full(
    net: Network,
    s: int,
    alpha: float,
    seed: int,
    *,
    ledger: Optional[RoundLedger],
    trace: Trace,
    concurrent: bool,
) -> tuple[SkeletonGraph, HubRelations, int]:
    if not 0 <= s < net.n:
        raise ValueError(f"source {s} out of range for n={net.n}")
    if not 1 <= float(alpha) <= net.n:
        raise ValueError(f"alpha must lie in [1, n], got {alpha}")
    T = _sample_hubs(net, s, alpha, seed)
    h = math.ceil(10.0 * net.n * math.log2(net.n) / float(alpha)) if net.n > 1 else 0
    rel, rounds = limited_bfs_all(
        net, T, h, seed=seed, ledger=ledger, trace=trace, concurrent=concurrent
    )
    ids = T.ids
    sub = rel.anc[ids]
    np.fill_diagonal(sub, False)
    pairs = np.argwhere(sub)
    edges = np.column_stack([ids[pairs[:, 1]], ids[pairs[:, 0]]])
    return SkeletonGraph(hubs=T, edges=edges, h=h), rel, rounds


def build_skeleton(
    net: Network,
    s: int,
    alpha: Union[int, float],
    seed: int = 0,
    *,
    ledger: Optional[RoundLedger] = None,
    trace: Trace = None,
    concurrent: bool = False,
) -> tuple[SkeletonGraph, int]:
    """Sample hubs around s and assemble the skeleton; returns (skeleton, rounds).

    Edge u -> v appears when u's flood token reached v within h =
    ceil(10 n log2 n / alpha) hops, so every edge certifies a real path.
    All rounds come from the limited BFS; edge assembly itself is local.
    """
    skel, _, rounds = _build_skeleton_full(
        net, s, alpha, seed, ledger=ledger, trace=trace, concurrent=concurrent
    )
    return skel, rounds


def auto_alpha(n: int, d_hop: int) -> int:
    """Round-balancing choice of the sampling parameter alpha.

    ceil(sqrt(n)) while the hop diameter stays under n^(1/4); past that
    the diameter-weighted term dominates and ceil(n^(2/3) / D_hop^(2/3))
    balances it. Clamped into [1, n].
    """
    if n < 1:
        raise ValueError(f"need at least one node, got n={n}")
    if d_hop <= n**0.25:
        a = math.ceil(math.sqrt(n))
    else:
        a = math.ceil(n ** (2.0 / 3.0) / d_hop ** (2.0 / 3.0))
    return max(1, min(n, a))


def distr_reach(
    net: Network,
    s: int,
    alpha: Union[int, float, str, None] = AUTO,
    k: Optional[int] = None,
    seed: int = 0,
    *,
    check: bool = True,
    trace: Trace = None,
    concurrent: bool = False,
) -> tuple[np.ndarray, RoundLedger]:
    """Every node learns whether s reaches it; returns (bits, ledger).

    Step 1 builds the skeleton (rounds on the ledger as sampling_bfs).
    Step 2 replays the diameter loop on the skeleton digraph and charges
    broadcast_charge(K) for every depth unit that produced K > 0 event
    tokens; the per-unit token counts come straight from the replay, so
    label-sorting units and other purely local depth charge nothing.
    Step 3 runs a BFS over the shortcut-augmented skeleton, bounded by
    the same budget family as the search scale, broadcasting each level
    frontier as it appears; every hub then broadcasts its reachability
    bit and each node decides locally against its stored hub ancestors.
    Steps 2 and 3 leave no per-link trace lines: their rounds are closed
    forms and level broadcasts, not a relived transcript.

    With check=True (the default) the output is compared against a
    central BFS and a mismatching sampling is redrawn under the next
    derived seed; discarded attempts stay on the ledger and `redraws`
    counts them. check=False is the production mode: one attempt, no
    ground-truth access. k defaults to max(2, ceil_log2 |T|).
    """
    if not 0 <= s < net.n:
        raise ValueError(f"source {s} out of range for n={net.n}")
    if alpha is None or (isinstance(alpha, str) and alpha == AUTO):
        a: Union[int, float] = auto_alpha(net.n, net.d_hop)
    elif isinstance(alpha, str):
        raise ValueError(f"alpha must be a number or {AUTO!r}, got {alpha!r}")
    else:
        a = alpha
    truth: Optional[np.ndarray] = None
    if check:
        truth = np.zeros(net.n, dtype=bool)
        truth[reachable_set(net.g, s).ids] = True
    ledger = RoundLedger()
    for attempt in range(_MAX_REDRAWS):
        bits = _reach_attempt(
            net, s, a, k, derive(seed, STREAM_TRIAL, attempt),
            ledger, trace, concurrent,
        )
        if truth is None or np.array_equal(bits, truth):
            ledger.redraws = attempt
            for v in range(net.n):
                net.knowledge[v]["reachable_from_s"] = bool(bits[v])
            return bits, ledger
    raise RuntimeError(
        f"distr_reach missed ground truth {_MAX_REDRAWS} samplings in a "
        f"row; at h >= n the skeleton is exact, so this points at a bug "
        f"rather than bad luck"
    )


def _reach_attempt(
    net: Network,
    s: int,
    alpha: Union[int, float],
    k: Optional[int],
    seed: int,
    ledger: RoundLedger,
    trace: Trace,
    concurrent: bool,
) -> np.ndarray:
    skel, rel, _ = _build_skeleton_full(
        net, s, alpha, seed, ledger=ledger, trace=trace, concurrent=concurrent
    )
    ids = skel.hubs.ids
    nt = int(ids.size)
    kv = k if k is not None else max(2, ceil_log2(max(nt, 2)))
    gl = skel.local()
    shortcuts, _, unit_events = _diam_engine(gl, kv, seed, collect_events=True)

    # per depth unit: broadcast_charge for K > 0 tokens, vectorized over
    # each loop's unit histogram
    charge_r = 0
    charge_m = 0
    if net.n > 1:
        for vec in unit_events:
            pos = vec[vec > 0]
            if pos.size:
                charge_r += int(2 * pos.sum() + 2 * pos.size * (net.d_hop - 1))
                charge_m += 2 * int(pos.sum()) * (net.n - 1)
    ledger.charge("diam_simulation", charge_r, charge_m)

    sc = shortcuts.edges()
    aug = gl if sc.size == 0 else Digraph(nt, np.vstack([gl.edges(), sc]))
    s_local = skel.index_of(s)
    depth_cap = compute_search_scale(nt, kv) if nt >= 2 else 0
    dm = bfs_limited(aug, s_local, FORWARD, depth_cap)
    for lvl in range(1, dm.levels):
        frontier = ids[dm.dist == lvl]
        broadcast_all(
            net, {int(v): 1 for v in frontier},
            ledger=ledger, phase="final_broadcast",
            trace=trace, concurrent=concurrent,
        )
    broadcast_all(
        net, {int(v): 1 for v in ids},
        ledger=ledger, phase="final_broadcast",
        trace=trace, concurrent=concurrent,
    )
    return rel.anc[:, dm.dist >= 0].any(axis=1)


def round_report(ledger: RoundLedger) -> dict:
    """Flat summary of a ledger with stable keys for the metrics schema."""
    return {
        "sampling_bfs": ledger.sampling_bfs,
        "skeleton": ledger.skeleton,
        "diam_simulation": ledger.diam_simulation,
        "final_broadcast": ledger.final_broadcast,
        "total_rounds": ledger.total_rounds,
        "messages_total": ledger.messages_total,
        "redraws": ledger.redraws,
    }
