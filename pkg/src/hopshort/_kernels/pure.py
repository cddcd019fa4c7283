"""Reference implementations of the traversal and partition kernels.

This module defines the exact semantics; the compiled backend in _speed.pyx
is a port and must produce identical output for identical input, including
every counter. Any change here needs the same change there;
tests/test_kernels.py checks agreement.

Conventions shared by both backends:

- Graphs arrive as CSR arrays (indptr int64, indices int32), neighbor lists
  ascending. A subproblem is a `members` array of global vertex ids.
- A merged working graph is CSR plus implied bit-rows: vertex u also points
  at closure(u) when u is a recorded hub, at closure(u) & hubs always, and
  at extra_rows(u). Bit-derived neighbors are scanned after CSR neighbors,
  in ascending order.
- edge_scans counts every adjacency entry examined: the full CSR degree of
  each visited vertex plus the popcount of its assembled bit-row restricted
  to the subproblem, whether or not the target was new.
- A label event is charged at the vertex's BFS level, Eliminated at the max
  of its two levels; shortcut-edge events at the discovery level; election
  and kappa tokens are the driver's business, not charged here.
- The refinement forest has one node per (group, tag) split per
  shortcutter; the chain from the root spells a cell's label key.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "pure"

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB

#: limit value meaning "unlimited" (larger than any distance)
NO_LIMIT = 1 << 62

ANC = 0
DES = 1
ELIM = 2

_STREAM_SAMPLE = 1  # must equal rng.STREAM_SAMPLE


def _fin(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MUL1) & _MASK
    z = ((z ^ (z >> 27)) * _MUL2) & _MASK
    return z ^ (z >> 31)


def _derive2(seed: int, a: int, b: int) -> int:
    h = (seed + _GAMMA) & _MASK
    h = _fin(h ^ (a & _MASK))
    h = (h + _GAMMA) & _MASK
    h = _fin(h ^ (b & _MASK))
    return h


def _as_int(row) -> int:
    """uint64 word array -> python int with bit i == vertex i."""
    return int.from_bytes(np.ascontiguousarray(row).tobytes(), "little")


class Workspace:
    """Reusable per-graph scratch state shared by kernel calls.

    Create via make_workspace, bind a graph with set_graph. The compiled
    backend keeps C buffers here; this one keeps parsed bit masks.
    """

    def __init__(self, n: int):
        self.n = n
        self.mmap = np.full(n, -1, dtype=np.int32)
        self.indptr_f = None
        self.indices_f = None
        self.indptr_b = None
        self.indices_b = None
        self.rows = None
        self.hub_mask = 0
        self.clos_f = None
        self.clos_t = None
        self.extra_f = None
        self.extra_t = None
        self.bitmode = False


def make_workspace(n: int) -> Workspace:
    return Workspace(n)


def set_graph(
    ws: Workspace,
    indptr_f,
    indices_f,
    indptr_b,
    indices_b,
    rows=None,
    hub_words=None,
    clos_f=None,
    clos_t=None,
    extra_f=None,
    extra_t=None,
) -> None:
    ws.indptr_f = indptr_f
    ws.indices_f = indices_f
    ws.indptr_b = indptr_b
    ws.indices_b = indices_b
    ws.rows = rows
    ws.hub_mask = _as_int(hub_words) if hub_words is not None else 0
    ws.clos_f = clos_f
    ws.clos_t = clos_t
    ws.extra_f = extra_f
    ws.extra_t = extra_t
    ws.bitmode = clos_f is not None or extra_f is not None


def _row_bits(g: int, clos, extra, hub_mask: int) -> int:
    """Merged-graph bit-row of global vertex g, unmasked."""
    acc = 0
    if clos is not None:
        bits = _as_int(clos[g])
        if not (hub_mask >> g) & 1:
            bits &= hub_mask
        acc |= bits
    if extra is not None:
        acc |= _as_int(extra[g])
    return acc


def _bfs_member(
    src_rank, members, mmap, indptr, indices, clos, extra,
    hub_mask, member_mask, bitmode, dist, limit,
):
    """BFS from a member over the working graph, restricted to members.

    dist must read -1 on every member rank at entry; the caller resets the
    touched entries via the returned visit order. Returns
    (visit_order, edge_scans, level_count).
    """
    order = [src_rank]
    dist[src_rank] = 0
    scans = 0
    head = 0
    maxd = 0
    while head < len(order):
        u = order[head]
        head += 1
        du = int(dist[u])
        if du > maxd:
            maxd = du
        if du >= limit:
            continue
        g = int(members[u])
        lo, hi = int(indptr[g]), int(indptr[g + 1])
        scans += hi - lo
        for v in indices[lo:hi]:
            r = mmap[v]
            if r >= 0 and dist[r] < 0:
                dist[r] = du + 1
                order.append(int(r))
        if bitmode:
            bits = _row_bits(g, clos, extra, hub_mask) & member_mask
            scans += bin(bits).count("1")
            while bits:
                low = bits & -bits
                t = low.bit_length() - 1
                bits ^= low
                r = mmap[t]
                if r >= 0 and dist[r] < 0:
                    dist[r] = du + 1
                    order.append(int(r))
    return order, scans, maxd + 1


def level_sweep(
    ws: Workspace,
    members,
    seed: int,
    threshold: int,
    sample_all: bool,
    lim_shortcut: int,
    lim_label: int,
    lim_ring_lo: int,
    dedup_local: bool,
    collect_rings: bool,
    emit_edges: bool,
    collect_labels: bool,
    collect_events: bool,
) -> dict:
    """Process one subproblem level: elect, search, shortcut, label, refine.

    When ws.rows is set and dedup_local is false, shortcut dedup runs
    against the whole-run bitmap; otherwise against a call-local set.
    Output keys and dtypes are identical across backends.
    """
    nn = int(members.size)
    mmap = ws.mmap
    mmap[members] = np.arange(nn, dtype=np.int32)
    member_mask = 0
    if ws.bitmode:
        for g in members:
            member_mask |= 1 << int(g)

    if sample_all:
        s_ranks = range(nn)
    else:
        s_ranks = [
            i
            for i in range(nn)
            if _derive2(seed, _STREAM_SAMPLE, int(members[i])) < threshold
        ]

    rows = None if dedup_local else ws.rows
    local_set: set | None = set() if rows is None else None
    fdist = np.full(nn, -1, dtype=np.int32)
    bdist = np.full(nn, -1, dtype=np.int32)
    group_of = np.zeros(nn, dtype=np.int64)
    elim = np.zeros(nn, dtype=np.uint8)
    labels_per_vertex = np.zeros(nn, dtype=np.int64)
    grp_parent = [-1]
    grp_hub = [-1]
    grp_tag = [-1]

    edge_scans = 0
    label_assignments = 0
    new_edges = 0
    max_levels = 0
    fringe_enroll = 0
    ring_offsets = [0]
    ring_vertices: list[int] = []
    edges_u: list[int] = []
    edges_v: list[int] = []
    labels_out: list[tuple[int, int, int]] = []
    events: dict[int, int] = {}

    def bump(lvl: int) -> None:
        events[lvl] = events.get(lvl, 0) + 1

    def try_add(a: int, b: int, lvl: int) -> None:
        nonlocal new_edges
        if a == b:
            return
        if rows is not None:
            wi, bi = divmod(b, 64)
            bit = np.uint64(1 << bi)
            if rows[a, wi] & bit:
                return
            rows[a, wi] |= bit
        else:
            if (a, b) in local_set:
                return
            local_set.add((a, b))
        new_edges += 1
        if emit_edges:
            edges_u.append(a)
            edges_v.append(b)
        if collect_events:
            bump(lvl)

    for sr in s_ranks:
        v_global = int(members[sr])
        forder, fsc, flev = _bfs_member(
            int(sr), members, mmap, ws.indptr_f, ws.indices_f,
            ws.clos_f, ws.extra_f, ws.hub_mask, member_mask, ws.bitmode,
            fdist, lim_shortcut,
        )
        border, bsc, blev = _bfs_member(
            int(sr), members, mmap, ws.indptr_b, ws.indices_b,
            ws.clos_t, ws.extra_t, ws.hub_mask, member_mask, ws.bitmode,
            bdist, lim_shortcut,
        )
        edge_scans += fsc + bsc
        max_levels = max(max_levels, flev, blev)
        if collect_events:
            for u in forder:
                bump(int(fdist[u]))
            for u in border:
                bump(int(bdist[u]))

        refine_map: dict[tuple[int, int], int] = {}
        for w in range(nn):
            fd = int(fdist[w])
            bd = int(bdist[w])
            if fd < 0 and bd < 0:
                continue
            w_global = int(members[w])
            if fd >= 0:
                try_add(v_global, w_global, fd)
            if bd >= 0:
                try_add(w_global, v_global, bd)
            in_des = 0 <= fd <= lim_label
            in_anc = 0 <= bd <= lim_label
            if in_des or in_anc:
                label_assignments += 1
                labels_per_vertex[w] += 1
                if in_des and in_anc:
                    kind, lvl = ELIM, max(fd, bd)
                elif in_des:
                    kind, lvl = DES, fd
                else:
                    kind, lvl = ANC, bd
                if collect_events:
                    bump(lvl)
                if collect_labels:
                    labels_out.append((w_global, v_global, kind))
                if kind == ELIM:
                    elim[w] = 1
                elif not elim[w]:
                    key = (int(group_of[w]), kind)
                    gid = refine_map.get(key)
                    if gid is None:
                        gid = len(grp_parent)
                        grp_parent.append(key[0])
                        grp_hub.append(v_global)
                        grp_tag.append(kind)
                        refine_map[key] = gid
                    group_of[w] = gid
            if collect_rings:
                near = (0 <= fd <= lim_ring_lo) or (0 <= bd <= lim_ring_lo)
                if not near:
                    ring_vertices.append(w_global)
                    fringe_enroll += 1
                    if collect_events:
                        bump(fd if fd >= 0 else bd)
        if collect_rings:
            ring_offsets.append(len(ring_vertices))
        for u in forder:
            fdist[u] = -1
        for u in border:
            bdist[u] = -1

    mmap[members] = -1
    ev_arr = np.zeros(max(events, default=-1) + 1, dtype=np.int64)
    for lvl, c in events.items():
        ev_arr[lvl] = c

    s_global = np.array([int(members[i]) for i in s_ranks], dtype=np.int32)
    return {
        "s": s_global,
        "group_of": group_of,
        "elim": elim,
        "grp_parent": np.array(grp_parent, dtype=np.int64),
        "grp_hub": np.array(grp_hub, dtype=np.int64),
        "grp_tag": np.array(grp_tag, dtype=np.int64),
        "labels_per_vertex": labels_per_vertex,
        "new_edges": new_edges,
        "edge_scans": edge_scans,
        "label_assignments": label_assignments,
        "max_levels": max_levels,
        "ring_offsets": np.array(ring_offsets, dtype=np.int64),
        "ring_vertices": np.array(ring_vertices, dtype=np.int32),
        "fringe_enroll": fringe_enroll,
        "edges_u": np.array(edges_u, dtype=np.int32),
        "edges_v": np.array(edges_v, dtype=np.int32),
        "labels": labels_out,
        "events": ev_arr,
    }


def chain_keys(grp_parent, grp_hub, grp_tag, leaves) -> tuple[np.ndarray, np.ndarray]:
    """Label-key bytes per refinement leaf: (hub as big-endian u32, tag).

    Byte-wise comparison of the returned slices realizes the canonical cell
    order: labels ascending by hub, Anc before Des, strict prefixes first.
    """
    chunks: list[bytes] = []
    offsets = [0]
    total = 0
    for leaf in leaves:
        chain = []
        g = int(leaf)
        while g > 0:
            chain.append((int(grp_hub[g]), int(grp_tag[g])))
            g = int(grp_parent[g])
        chain.reverse()
        buf = bytearray()
        for hub, tag in chain:
            buf += hub.to_bytes(4, "big")
            buf.append(tag)
        chunks.append(bytes(buf))
        total += len(buf)
        offsets.append(total)
    blob = (
        np.frombuffer(b"".join(chunks), dtype=np.uint8).copy()
        if total
        else np.zeros(0, dtype=np.uint8)
    )
    return blob, np.array(offsets, dtype=np.int64)


def closure_and_ecc(indptr, indices) -> tuple[np.ndarray, np.ndarray]:
    """Reachability bitmap rows (reflexive) and per-source eccentricity."""
    n = int(indptr.size - 1)
    words = (n + 63) // 64
    rows = np.zeros((n, words), dtype=np.uint64)
    ecc = np.zeros(n, dtype=np.int64)
    dist = np.full(n, -1, dtype=np.int64)
    for s in range(n):
        order = [s]
        dist[s] = 0
        head = 0
        mx = 0
        while head < len(order):
            u = order[head]
            head += 1
            for v in indices[indptr[u] : indptr[u + 1]]:
                if dist[v] < 0:
                    d = dist[u] + 1
                    dist[v] = d
                    if d > mx:
                        mx = int(d)
                    order.append(int(v))
        for u in order:
            rows[s, u >> 6] |= np.uint64(1 << (u & 63))
            dist[u] = -1
        ecc[s] = mx
    return rows, ecc


def ecc_all(indptr, indices) -> np.ndarray:
    """Per-source eccentricity over plain CSR, no closure rows kept."""
    n = int(indptr.size - 1)
    ecc = np.zeros(n, dtype=np.int64)
    dist = np.full(n, -1, dtype=np.int64)
    for s in range(n):
        order = [s]
        dist[s] = 0
        head = 0
        mx = 0
        while head < len(order):
            u = order[head]
            head += 1
            for v in indices[indptr[u] : indptr[u + 1]]:
                if dist[v] < 0:
                    d = dist[u] + 1
                    dist[v] = d
                    if d > mx:
                        mx = int(d)
                    order.append(int(v))
        for u in order:
            dist[u] = -1
        ecc[s] = mx
    return ecc


def merged_ecc(ws: Workspace) -> np.ndarray:
    """Per-source eccentricity on the working graph of ws.

    Covered-set frontier expansion with an early exit once the closure row
    is covered; cheap on nearly saturated graphs where two levels suffice.
    """
    n = ws.n
    ecc = np.zeros(n, dtype=np.int64)
    for s in range(n):
        target = _as_int(ws.clos_f[s]) if ws.clos_f is not None else None
        covered = 1 << s
        frontier = [s]
        lvl = 0
        while True:
            if target is not None and not (target & ~covered):
                break
            bits_new = 0
            for u in frontier:
                acc = 0
                for v in ws.indices_f[ws.indptr_f[u] : ws.indptr_f[u + 1]]:
                    acc |= 1 << int(v)
                if ws.bitmode:
                    acc |= _row_bits(u, ws.clos_f, ws.extra_f, ws.hub_mask)
                bits_new |= acc & ~covered
            if not bits_new:
                break
            lvl += 1
            covered |= bits_new
            frontier = []
            while bits_new:
                low = bits_new & -bits_new
                frontier.append(low.bit_length() - 1)
                bits_new ^= low
        ecc[s] = lvl
    return ecc


def bfs_hybrid(ws: Workspace, src: int, limit: int) -> dict:
    """Distances from src over the working graph; -1 where unreached."""
    n = ws.n
    dist = np.full(n, -1, dtype=np.int64)
    dist[src] = 0
    order = [src]
    head = 0
    scans = 0
    maxd = 0
    while head < len(order):
        u = order[head]
        head += 1
        du = int(dist[u])
        if du > maxd:
            maxd = du
        if du >= limit:
            continue
        lo, hi = int(ws.indptr_f[u]), int(ws.indptr_f[u + 1])
        scans += hi - lo
        for v in ws.indices_f[lo:hi]:
            if dist[v] < 0:
                dist[v] = du + 1
                order.append(int(v))
        if ws.bitmode:
            acc = _row_bits(u, ws.clos_f, ws.extra_f, ws.hub_mask)
            scans += bin(acc).count("1")
            while acc:
                low = acc & -acc
                t = low.bit_length() - 1
                acc ^= low
                if dist[t] < 0:
                    dist[t] = du + 1
                    order.append(t)
    return {"dist": dist, "edge_scans": scans, "levels": maxd + 1}


def relation_stats(clos_f, clos_t, s_words) -> tuple[np.ndarray, np.ndarray]:
    """Per-vertex label count and elimination flag against shortcutters S.

    Vertex w is labeled by v in S when they are related either way, i.e.
    v in clos_f[w] | clos_t[w]; eliminated when v in clos_f[w] & clos_t[w].
    """
    n, words = clos_f.shape
    lab = np.zeros(n, dtype=np.int64)
    elim = np.zeros(n, dtype=np.uint8)
    for w in range(n):
        cnt = 0
        ele = 0
        for wi in range(words):
            fw = int(clos_f[w, wi])
            tw = int(clos_t[w, wi])
            sw = int(s_words[wi])
            cnt += bin((fw | tw) & sw).count("1")
            if fw & tw & sw:
                ele = 1
        lab[w] = cnt
        elim[w] = ele
    return lab, elim


def saturated_signatures(clos_f, clos_t, s_words, key_a, key_b, verts) -> dict:
    """Two independent hashes of each vertex's S-relation signature.

    hash = sum over words of anc_word*key[wi] + des_word*key[words+wi]
    mod 2^64, computed only for the given vertices (survivors).
    """
    words = clos_f.shape[1]
    m = int(verts.size)
    sig_a = np.zeros(m, dtype=np.uint64)
    sig_b = np.zeros(m, dtype=np.uint64)
    for i in range(m):
        w = int(verts[i])
        ha = hb = 0
        for wi in range(words):
            aw = int(clos_t[w, wi]) & int(s_words[wi])
            dw = int(clos_f[w, wi]) & int(s_words[wi])
            if aw or dw:
                ha = (ha + aw * int(key_a[wi]) + dw * int(key_a[words + wi])) & _MASK
                hb = (hb + aw * int(key_b[wi]) + dw * int(key_b[words + wi])) & _MASK
        sig_a[i] = ha
        sig_b[i] = hb
    return {"sig_a": sig_a, "sig_b": sig_b}


def saturated_hub_stats(
    clos_f, clos_t, s_list, s_words,
    deg_scan_f, deg_scan_b, word_sum_f, word_sum_b, des_size, anc_size,
) -> dict:
    """Whole-level scan and edge totals for a fully saturated sweep.

    edge_scans charges the scan degree of every vertex each shortcutter's
    searches visit (all of Des forward, all of Anc backward). new_edges is
    sum(|Des|-1 + |Anc|-1) minus ordered related shortcutter pairs, which
    undoes the double emission of edges between two shortcutters.
    """
    words = clos_f.shape[1]
    scans = 0
    raw_edges = 0
    hub_pairs = 0
    for v in s_list:
        v = int(v)
        for wi in range(words):
            fw = int(clos_f[v, wi])
            bw = int(clos_t[v, wi])
            if fw:
                scans += _masked_deg(fw, wi, deg_scan_f, word_sum_f)
                hub_pairs += bin(fw & int(s_words[wi])).count("1")
            if bw:
                scans += _masked_deg(bw, wi, deg_scan_b, word_sum_b)
        raw_edges += int(des_size[v]) - 1 + int(anc_size[v]) - 1
        hub_pairs -= 1  # v itself sits in Des(v) & S
    return {"edge_scans": scans, "new_edges": raw_edges - hub_pairs}


def _masked_deg(word: int, wi: int, deg, word_sum) -> int:
    if word == _MASK:
        return int(word_sum[wi])
    total = 0
    base = wi << 6
    while word:
        low = word & -word
        total += int(deg[base + (low.bit_length() - 1)])
        word &= word - 1
    return total


def saturated_cell_order(clos_f, clos_t, s_words, reps, last_label) -> np.ndarray:
    """Canonical order of survivor cells from representative rows.

    Cells compare at the first shortcutter where their relations differ
    (Anc < Des < unrelated); a strict prefix label sequence comes first.
    last_label holds each representative's highest related shortcutter,
    -1 when unrelated to all of S.
    """
    import functools

    words = clos_f.shape[1]

    def cmp(ia: int, ib: int) -> int:
        a, b = int(reps[ia]), int(reps[ib])
        la, lb = int(last_label[ia]), int(last_label[ib])
        shared = la if la < lb else lb
        for wi in range(words):
            base = wi << 6
            if base > shared:
                break
            aa = int(clos_f[a, wi]) & int(s_words[wi])
            da = int(clos_t[a, wi]) & int(s_words[wi])
            ab = int(clos_f[b, wi]) & int(s_words[wi])
            db = int(clos_t[b, wi]) & int(s_words[wi])
            diff = (aa ^ ab) | (da ^ db)
            while diff:
                low = diff & -diff
                off = low.bit_length() - 1
                h = base + off
                if h > shared:
                    break
                sa = 0 if (aa >> off) & 1 else (1 if (da >> off) & 1 else 2)
                sb = 0 if (ab >> off) & 1 else (1 if (db >> off) & 1 else 2)
                if sa != sb:
                    return -1 if sa < sb else 1
                diff ^= low
        if la != lb:
            return -1 if la < lb else 1
        return 0

    idx = list(range(len(reps)))
    idx.sort(key=functools.cmp_to_key(cmp))
    return np.array(idx, dtype=np.int64)


def batch_cells(ws: Workspace, cell_members, cell_offsets, collect_events: bool) -> dict:
    """Process every level-1 cell of a saturated run in one call.

    Precondition: the sampling probability at this level is 1, so every
    member is a shortcutter and no survivors remain. Cells are siblings;
    their event histograms align at unit 0 and sum.
    """
    ncells = int(cell_offsets.size) - 1
    edges_u: list[np.ndarray] = []
    edges_v: list[np.ndarray] = []
    edge_scans = 0
    label_assignments = 0
    new_edges = 0
    cell_max_levels = np.zeros(ncells, dtype=np.int64)
    cell_max_lab = np.zeros(ncells, dtype=np.int64)
    ev: dict[int, int] = {}
    for ci in range(ncells):
        cell = cell_members[int(cell_offsets[ci]) : int(cell_offsets[ci + 1])]
        out = level_sweep(
            ws, cell, 0, 0, True, NO_LIMIT, NO_LIMIT, NO_LIMIT,
            True, False, True, False, collect_events,
        )
        edges_u.append(out["edges_u"])
        edges_v.append(out["edges_v"])
        new_edges += out["new_edges"]
        edge_scans += out["edge_scans"]
        label_assignments += out["label_assignments"]
        cell_max_levels[ci] = out["max_levels"]
        lv = out["labels_per_vertex"]
        cell_max_lab[ci] = int(lv.max()) if lv.size else 0
        for lvl, c in enumerate(out["events"]):
            if c:
                ev[lvl] = ev.get(lvl, 0) + int(c)
    ev_arr = np.zeros(max(ev, default=-1) + 1, dtype=np.int64)
    for lvl, c in ev.items():
        ev_arr[lvl] = c
    return {
        "edges_u": np.concatenate(edges_u) if edges_u else np.zeros(0, np.int32),
        "edges_v": np.concatenate(edges_v) if edges_v else np.zeros(0, np.int32),
        "new_edges": new_edges,
        "edge_scans": edge_scans,
        "label_assignments": label_assignments,
        "cell_max_levels": cell_max_levels,
        "cell_max_lab": cell_max_lab,
        "events": ev_arr,
    }


def event_tables(ws: Workspace, cap: int) -> dict:
    """Per-vertex BFS level tables of the working graph, both directions.

    For every vertex v: counts_x[v, d] and masks_x[v, d] give the size and
    bitmask of the level-d frontier of v's search; both_min[v, d] counts
    vertices related to v both ways whose min(forward, backward) level is d
    (the label double-count correction). Arrays are padded to the largest
    level count; exceeding cap levels raises ValueError.
    """
    n = ws.n
    words = (n + 63) // 64
    per_f = [_level_masks_one(ws, v, cap, False) for v in range(n)]
    per_b = [_level_masks_one(ws, v, cap, True) for v in range(n)]
    L = max(max(len(m) for m in per_f), max(len(m) for m in per_b))
    counts_f = np.zeros((n, L), dtype=np.int64)
    counts_b = np.zeros((n, L), dtype=np.int64)
    masks_f = np.zeros((n, L, words), dtype=np.uint64)
    masks_b = np.zeros((n, L, words), dtype=np.uint64)
    both_min = np.zeros((n, L), dtype=np.int64)
    nlev_f = np.zeros(n, dtype=np.int32)
    nlev_b = np.zeros(n, dtype=np.int32)
    for v in range(n):
        nlev_f[v] = len(per_f[v])
        nlev_b[v] = len(per_b[v])
        pf = pb = 0
        prev = 0
        for d in range(L):
            mf = per_f[v][d] if d < len(per_f[v]) else 0
            mb = per_b[v][d] if d < len(per_b[v]) else 0
            counts_f[v, d] = bin(mf).count("1")
            counts_b[v, d] = bin(mb).count("1")
            for wi in range(words):
                masks_f[v, d, wi] = (mf >> (wi * 64)) & _MASK
                masks_b[v, d, wi] = (mb >> (wi * 64)) & _MASK
            pf |= mf
            pb |= mb
            cur = bin(pf & pb).count("1")
            both_min[v, d] = cur - prev
            prev = cur
    return {
        "counts_f": counts_f,
        "counts_b": counts_b,
        "masks_f": masks_f,
        "masks_b": masks_b,
        "both_min": both_min,
        "nlev_f": nlev_f,
        "nlev_b": nlev_b,
    }


def _level_masks_one(ws: Workspace, src: int, cap: int, backward: bool) -> list[int]:
    indptr = ws.indptr_b if backward else ws.indptr_f
    indices = ws.indices_b if backward else ws.indices_f
    clos = ws.clos_t if backward else ws.clos_f
    extra = ws.extra_t if backward else ws.extra_f
    covered = 1 << src
    frontier = 1 << src
    out = [frontier]
    while True:
        bits_new = 0
        f = frontier
        while f:
            low = f & -f
            u = low.bit_length() - 1
            f ^= low
            acc = 0
            for v in indices[indptr[u] : indptr[u + 1]]:
                acc |= 1 << int(v)
            if ws.bitmode:
                acc |= _row_bits(u, clos, extra, ws.hub_mask)
            bits_new |= acc & ~covered
        if not bits_new:
            return out
        covered |= bits_new
        frontier = bits_new
        out.append(frontier)
        if len(out) > cap:
            raise ValueError(f"level count exceeds cap {cap}")


def run_hist(tables: dict, s_list, s_words) -> dict:
    """Per-depth-unit event histograms for one saturated sweep over S.

    visits[d]: BFS visit tokens (every hub's forward and backward frontier
    members). labels[d]: one token per (vertex, hub) relation, Eliminated
    corrected to a single token via both_min. edges[d]: distinct shortcut
    edges discovered at level d, hub-hub pairs counted once.
    """
    counts_f = tables["counts_f"]
    counts_b = tables["counts_b"]
    masks_f = tables["masks_f"]
    both_min = tables["both_min"]
    nlev_f = tables["nlev_f"]
    nlev_b = tables["nlev_b"]
    L = counts_f.shape[1]
    words = masks_f.shape[2]
    visits = np.zeros(L, dtype=np.int64)
    labels = np.zeros(L, dtype=np.int64)
    edges = np.zeros(L, dtype=np.int64)
    max_levels = 0
    for v in s_list:
        v = int(v)
        if nlev_f[v] > max_levels:
            max_levels = int(nlev_f[v])
        if nlev_b[v] > max_levels:
            max_levels = int(nlev_b[v])
        for d in range(L):
            c = int(counts_f[v, d]) + int(counts_b[v, d])
            if c == 0 and both_min[v, d] == 0:
                continue
            visits[d] += c
            labels[d] += c - int(both_min[v, d])
            if d >= 1:
                dup = 0
                for wi in range(words):
                    dup += bin(int(masks_f[v, d, wi]) & int(s_words[wi])).count("1")
                edges[d] += c - dup
    return {"visits": visits, "labels": labels, "edges": edges, "max_levels": max_levels}


def flood(indptr_f, indices_f, sources, h: int, seed: int) -> dict:
    """Round-accurate token flood from each source along graph edges.

    One token per source. Each directed edge is a comm link carrying at
    most one token per round through a FIFO queue. A vertex accepts a token
    at first arrival, records the carried hop count, and forwards it on
    every out-link while the next hop stays within h. Same-round arrivals
    at one vertex are processed in seeded pseudo-random order.
    """
    nlinks = int(indices_f.size)
    n = int(indptr_f.size - 1)
    nt = int(sources.size)
    hops = np.full((nt, n), -1, dtype=np.int32)
    queues: list[list[tuple[int, int]]] = [[] for _ in range(nlinks)]
    heads = [0] * nlinks
    rounds = 0
    messages = 0

    def enqueue_out(u: int, ti: int, hop: int) -> None:
        if hop + 1 > h:
            return
        for slot in range(int(indptr_f[u]), int(indptr_f[u + 1])):
            queues[slot].append((ti, hop + 1))

    for i in range(nt):
        s = int(sources[i])
        hops[i, s] = 0
        enqueue_out(s, i, 0)

    while True:
        arrivals: dict[int, list[tuple[int, int]]] = {}
        moved = 0
        for slot in range(nlinks):
            if heads[slot] < len(queues[slot]):
                ti, hop = queues[slot][heads[slot]]
                heads[slot] += 1
                arrivals.setdefault(int(indices_f[slot]), []).append((ti, hop))
                moved += 1
        if not moved:
            break
        rounds += 1
        messages += moved
        for dst in sorted(arrivals):
            per_dst = _derive2(seed, rounds, dst)
            batch = sorted(
                arrivals[dst], key=lambda th: _derive2(per_dst, th[0], th[1])
            )
            for ti, hop in batch:
                if hops[ti, dst] < 0:
                    hops[ti, dst] = hop
                    enqueue_out(dst, ti, hop)
    return {"hops": hops, "rounds": rounds, "messages": messages}
