# cython: language_level=3, boundscheck=False, wraparound=False
# cython: initializedcheck=False, cdivision=True
"""Compiled port of the reference kernels in pure.py.

pure.py is the semantics authority; every function here must produce
identical output for identical input, including every counter. Any change
there needs the same change here; tests/test_kernels.py checks agreement.

Backend-specific restrictions (inputs drivers never produce): sampling
thresholds must fit in uint64, flood hop budgets in int32. Local shortcut
dedup uses a rank bitmap up to 8192 members and a set above, matching the
reference set semantics either way.
"""

import numpy as np

from cpython.mem cimport PyMem_Free, PyMem_Malloc, PyMem_Realloc
from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t
from libc.string cimport memset

BACKEND_NAME = "speed"

NO_LIMIT = 1 << 62

ANC = 0
DES = 1
ELIM = 2

_MASK = (1 << 64) - 1

cdef int64_t C_NO_LIMIT = <int64_t>1 << 62
cdef uint64_t GAMMA = <uint64_t>0x9E3779B97F4A7C15
cdef uint64_t MUL1 = <uint64_t>0xBF58476D1CE4E5B9
cdef uint64_t MUL2 = <uint64_t>0x94D049BB133111EB
cdef uint64_t STREAM_SAMPLE = 1
cdef uint64_t ALL_ONES = <uint64_t>0xFFFFFFFFFFFFFFFF

# local-dedup bitmap cap; beyond this a set is used, as in the reference
cdef Py_ssize_t BITMAP_MAX = 8192

cdef extern from *:
    """
    #define POPC64(x) __builtin_popcountll((unsigned long long)(x))
    #define CTZ64(x) __builtin_ctzll((unsigned long long)(x))
    """
    int POPC64(uint64_t x) nogil
    int CTZ64(uint64_t x) nogil


cdef inline uint64_t _fin(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * MUL1
    z = (z ^ (z >> 27)) * MUL2
    return z ^ (z >> 31)


cdef inline uint64_t _derive2(uint64_t seed, uint64_t a, uint64_t b) nogil:
    cdef uint64_t h = seed + GAMMA
    h = _fin(h ^ a)
    h = h + GAMMA
    h = _fin(h ^ b)
    return h


cdef struct GrowI64:
    int64_t* data
    Py_ssize_t size
    Py_ssize_t cap


cdef struct GrowI32:
    int32_t* data
    Py_ssize_t size
    Py_ssize_t cap


cdef int grow_i64(GrowI64* g, Py_ssize_t need) except -1:
    cdef Py_ssize_t cap = g.cap
    if need <= cap:
        return 0
    while cap < need:
        cap = cap * 2 if cap else 1024
    g.data = <int64_t*>PyMem_Realloc(g.data, cap * sizeof(int64_t))
    if g.data == NULL:
        raise MemoryError()
    g.cap = cap
    return 0


cdef int grow_i64_zero(GrowI64* g, Py_ssize_t need) except -1:
    """Like grow_i64 but zero-fills the newly added capacity."""
    cdef Py_ssize_t old = g.cap
    if need <= old:
        return 0
    grow_i64(g, need)
    memset(g.data + old, 0, (g.cap - old) * sizeof(int64_t))
    return 0


cdef inline int push_i64(GrowI64* g, int64_t v) except -1:
    if g.size == g.cap:
        grow_i64(g, g.size + 1)
    g.data[g.size] = v
    g.size += 1
    return 0


cdef int grow_i32(GrowI32* g, Py_ssize_t need) except -1:
    cdef Py_ssize_t cap = g.cap
    if need <= cap:
        return 0
    while cap < need:
        cap = cap * 2 if cap else 1024
    g.data = <int32_t*>PyMem_Realloc(g.data, cap * sizeof(int32_t))
    if g.data == NULL:
        raise MemoryError()
    g.cap = cap
    return 0


cdef inline int push_i32(GrowI32* g, int32_t v) except -1:
    if g.size == g.cap:
        grow_i32(g, g.size + 1)
    g.data[g.size] = v
    g.size += 1
    return 0


cdef object i64_to_np(GrowI64* g):
    cdef object out = np.empty(g.size, dtype=np.int64)
    cdef int64_t[::1] mv
    cdef Py_ssize_t i
    if g.size:
        mv = out
        for i in range(g.size):
            mv[i] = g.data[i]
    return out


cdef object i32_to_np(GrowI32* g):
    cdef object out = np.empty(g.size, dtype=np.int32)
    cdef int32_t[::1] mv
    cdef Py_ssize_t i
    if g.size:
        mv = out
        for i in range(g.size):
            mv[i] = g.data[i]
    return out


cdef class Workspace:
    """Reusable per-graph scratch state shared by kernel calls.

    Mirrors the reference Workspace; the extra fields are C buffers kept
    at their high-water marks between calls.
    """

    cdef Py_ssize_t n, words
    cdef int32_t* mmap
    cdef int32_t* fdist
    cdef int32_t* bdist
    cdef int32_t* forder
    cdef int32_t* border
    cdef int32_t* sbuf
    cdef int64_t* ev
    cdef uint64_t* member_words
    cdef GrowI64 grp_parent, grp_hub, grp_tag
    cdef GrowI64 slot_gid, slot_stamp
    cdef GrowI32 edges_u, edges_v, ring_v
    cdef GrowI64 ring_off, localrows
    cdef int64_t stamp
    cdef int64_t[::1] indptr_f, indptr_b
    cdef int32_t[::1] indices_f, indices_b
    cdef uint64_t[:, ::1] rows
    cdef uint64_t[::1] hub_words
    cdef uint64_t[:, ::1] clos_f, clos_t, extra_f, extra_t
    cdef bint has_rows, has_hubs, has_clos, has_extra, bitmode

    def __cinit__(self, Py_ssize_t n):
        self.n = n
        self.words = (n + 63) >> 6
        self.mmap = <int32_t*>PyMem_Malloc((n + 1) * sizeof(int32_t))
        self.fdist = <int32_t*>PyMem_Malloc((n + 1) * sizeof(int32_t))
        self.bdist = <int32_t*>PyMem_Malloc((n + 1) * sizeof(int32_t))
        self.forder = <int32_t*>PyMem_Malloc((n + 1) * sizeof(int32_t))
        self.border = <int32_t*>PyMem_Malloc((n + 1) * sizeof(int32_t))
        self.sbuf = <int32_t*>PyMem_Malloc((n + 1) * sizeof(int32_t))
        self.ev = <int64_t*>PyMem_Malloc((n + 2) * sizeof(int64_t))
        self.member_words = <uint64_t*>PyMem_Malloc(
            (self.words + 1) * sizeof(uint64_t))
        if (self.mmap == NULL or self.fdist == NULL or self.bdist == NULL
                or self.forder == NULL or self.border == NULL
                or self.sbuf == NULL or self.ev == NULL
                or self.member_words == NULL):
            raise MemoryError()
        cdef Py_ssize_t i
        for i in range(n):
            self.mmap[i] = -1
            self.fdist[i] = -1
            self.bdist[i] = -1
        memset(self.ev, 0, (n + 2) * sizeof(int64_t))
        self.stamp = 0

    def __dealloc__(self):
        PyMem_Free(self.mmap)
        PyMem_Free(self.fdist)
        PyMem_Free(self.bdist)
        PyMem_Free(self.forder)
        PyMem_Free(self.border)
        PyMem_Free(self.sbuf)
        PyMem_Free(self.ev)
        PyMem_Free(self.member_words)
        PyMem_Free(self.grp_parent.data)
        PyMem_Free(self.grp_hub.data)
        PyMem_Free(self.grp_tag.data)
        PyMem_Free(self.slot_gid.data)
        PyMem_Free(self.slot_stamp.data)
        PyMem_Free(self.edges_u.data)
        PyMem_Free(self.edges_v.data)
        PyMem_Free(self.ring_v.data)
        PyMem_Free(self.ring_off.data)
        PyMem_Free(self.localrows.data)


def make_workspace(n):
    return Workspace(n)


def set_graph(Workspace ws, indptr_f, indices_f, indptr_b, indices_b,
              rows=None, hub_words=None, clos_f=None, clos_t=None,
              extra_f=None, extra_t=None):
    ws.indptr_f = indptr_f
    ws.indices_f = indices_f
    ws.indptr_b = indptr_b
    ws.indices_b = indices_b
    ws.has_rows = rows is not None
    ws.rows = rows if ws.has_rows else None
    ws.has_hubs = hub_words is not None
    ws.hub_words = hub_words if ws.has_hubs else None
    ws.has_clos = clos_f is not None
    ws.clos_f = clos_f if ws.has_clos else None
    ws.clos_t = clos_t if ws.has_clos else None
    ws.has_extra = extra_f is not None
    ws.extra_f = extra_f if ws.has_extra else None
    ws.extra_t = extra_t if ws.has_extra else None
    ws.bitmode = ws.has_clos or ws.has_extra


cdef inline bint _is_hub(Workspace ws, Py_ssize_t g) nogil:
    if not ws.has_hubs:
        return False
    return (ws.hub_words[g >> 6] >> (g & 63)) & 1


cdef inline void _assemble(Workspace ws, bint backward, Py_ssize_t g,
                           uint64_t* out) nogil:
    """Merged-graph bit-row of global vertex g into out, unmasked."""
    cdef Py_ssize_t wi
    cdef uint64_t w
    cdef bint hub
    for wi in range(ws.words):
        out[wi] = 0
    if ws.has_clos:
        hub = _is_hub(ws, g)
        for wi in range(ws.words):
            if backward:
                w = ws.clos_t[g, wi]
            else:
                w = ws.clos_f[g, wi]
            if not hub:
                if ws.has_hubs:
                    w &= ws.hub_words[wi]
                else:
                    w = 0
            out[wi] |= w
    if ws.has_extra:
        for wi in range(ws.words):
            if backward:
                out[wi] |= ws.extra_t[g, wi]
            else:
                out[wi] |= ws.extra_f[g, wi]


cdef Py_ssize_t _bfs_c(Workspace ws, bint backward, int32_t src_rank,
                       int32_t[::1] members, int64_t limit,
                       int32_t* dist, int32_t* order, uint64_t* rowbuf,
                       int64_t* scans_out, int64_t* levels_out) except -1:
    """Member-restricted BFS; returns visit count, order holds the ranks."""
    cdef Py_ssize_t head = 0, size = 1, lo, hi, j, wi, g
    cdef int32_t u, r, v
    cdef int64_t du, scans = 0, maxd = 0
    cdef uint64_t w
    cdef int64_t[::1] indptr = ws.indptr_b if backward else ws.indptr_f
    cdef int32_t[::1] indices = ws.indices_b if backward else ws.indices_f
    order[0] = src_rank
    dist[src_rank] = 0
    while head < size:
        u = order[head]
        head += 1
        du = dist[u]
        if du > maxd:
            maxd = du
        if du >= limit:
            continue
        g = members[u]
        lo = indptr[g]
        hi = indptr[g + 1]
        scans += hi - lo
        for j in range(lo, hi):
            v = indices[j]
            r = ws.mmap[v]
            if r >= 0 and dist[r] < 0:
                dist[r] = <int32_t>(du + 1)
                order[size] = r
                size += 1
        if ws.bitmode:
            _assemble(ws, backward, g, rowbuf)
            for wi in range(ws.words):
                w = rowbuf[wi] & ws.member_words[wi]
                scans += POPC64(w)
                while w:
                    r = ws.mmap[(wi << 6) + CTZ64(w)]
                    w &= w - 1
                    if r >= 0 and dist[r] < 0:
                        dist[r] = <int32_t>(du + 1)
                        order[size] = r
                        size += 1
    scans_out[0] = scans
    levels_out[0] = maxd + 1
    return size


cdef int _pair_new(Workspace ws, bint use_rows, bint use_bitmap,
                   uint64_t* lrows, Py_ssize_t nnw, set local_set,
                   int64_t a_g, int64_t b_g,
                   Py_ssize_t a_r, Py_ssize_t b_r) except -1:
    """Shortcut dedup; 1 when (a, b) is new and now recorded, else 0."""
    cdef uint64_t bit
    cdef object key
    if a_g == b_g:
        return 0
    if use_rows:
        bit = (<uint64_t>1) << (b_g & 63)
        if ws.rows[a_g, b_g >> 6] & bit:
            return 0
        ws.rows[a_g, b_g >> 6] |= bit
        return 1
    if use_bitmap:
        bit = (<uint64_t>1) << (b_r & 63)
        if lrows[a_r * nnw + (b_r >> 6)] & bit:
            return 0
        lrows[a_r * nnw + (b_r >> 6)] |= bit
        return 1
    key = (a_g << 32) | b_g
    if key in local_set:
        return 0
    local_set.add(key)
    return 1


def level_sweep(Workspace ws, members_obj, seed, threshold, bint sample_all,
                lim_shortcut, lim_label, lim_ring_lo, bint dedup_local,
                bint collect_rings, bint emit_edges, bint collect_labels,
                bint collect_events):
    """Process one subproblem level: elect, search, shortcut, label, refine.

    See the reference implementation for the full contract.
    """
    cdef int32_t[::1] members = np.ascontiguousarray(members_obj, dtype=np.int32)
    cdef Py_ssize_t nn = members.shape[0]
    thr_int = int(threshold)
    if thr_int < 0 or thr_int > _MASK:
        raise ValueError("threshold must fit in uint64")
    cdef uint64_t c_seed = <uint64_t>(int(seed) & _MASK)
    cdef uint64_t c_thresh = <uint64_t>thr_int
    cdef int64_t c_lim_s = min(int(lim_shortcut), C_NO_LIMIT)
    cdef int64_t c_lim_l = min(int(lim_label), C_NO_LIMIT)
    cdef int64_t c_lim_r = min(int(lim_ring_lo), C_NO_LIMIT)

    cdef Py_ssize_t i, wi, g
    for i in range(nn):
        ws.mmap[members[i]] = <int32_t>i
    if ws.bitmode:
        memset(ws.member_words, 0, ws.words * sizeof(uint64_t))
        for i in range(nn):
            g = members[i]
            ws.member_words[g >> 6] |= (<uint64_t>1) << (g & 63)

    cdef Py_ssize_t ns = 0
    if sample_all:
        for i in range(nn):
            ws.sbuf[ns] = <int32_t>i
            ns += 1
    else:
        for i in range(nn):
            if _derive2(c_seed, STREAM_SAMPLE, <uint64_t>members[i]) < c_thresh:
                ws.sbuf[ns] = <int32_t>i
                ns += 1

    cdef bint use_rows = ws.has_rows and not dedup_local
    cdef bint use_bitmap = False
    cdef set local_set = None
    cdef uint64_t* lrows = NULL
    cdef Py_ssize_t nnw = (nn + 63) >> 6
    if not use_rows:
        if nn <= BITMAP_MAX:
            use_bitmap = True
            if nn:
                grow_i64(&ws.localrows, nn * nnw)
                memset(ws.localrows.data, 0, nn * nnw * sizeof(int64_t))
                lrows = <uint64_t*>ws.localrows.data
        else:
            local_set = set()

    group_of_np = np.zeros(nn, dtype=np.int64)
    elim_np = np.zeros(nn, dtype=np.uint8)
    lpv_np = np.zeros(nn, dtype=np.int64)
    cdef int64_t[::1] group_of = group_of_np
    cdef uint8_t[::1] elim = elim_np
    cdef int64_t[::1] lpv = lpv_np

    ws.grp_parent.size = 0
    ws.grp_hub.size = 0
    ws.grp_tag.size = 0
    push_i64(&ws.grp_parent, -1)
    push_i64(&ws.grp_hub, -1)
    push_i64(&ws.grp_tag, -1)
    ws.edges_u.size = 0
    ws.edges_v.size = 0
    ws.ring_v.size = 0
    ws.ring_off.size = 0
    push_i64(&ws.ring_off, 0)

    cdef int64_t edge_scans = 0, label_assignments = 0, new_edges = 0
    cdef int64_t max_levels = 0, fringe_enroll = 0, max_ev = -1
    cdef uint64_t* rowbuf = <uint64_t*>PyMem_Malloc(
        (ws.words + 1) * sizeof(uint64_t))
    if rowbuf == NULL:
        raise MemoryError()
    labels_out = []

    cdef Py_ssize_t si, fsize, bsize, w
    cdef int32_t sr
    cdef int64_t v_global, w_global, fsc, bsc, flev, blev, fd, bd
    cdef int64_t kind, lvl, old_g, gid, slot
    cdef int64_t[::1] ev_mv
    cdef int32_t[::1] s_mv

    try:
        for si in range(ns):
            sr = ws.sbuf[si]
            v_global = members[sr]
            fsize = _bfs_c(ws, False, sr, members, c_lim_s,
                           ws.fdist, ws.forder, rowbuf, &fsc, &flev)
            bsize = _bfs_c(ws, True, sr, members, c_lim_s,
                           ws.bdist, ws.border, rowbuf, &bsc, &blev)
            edge_scans += fsc + bsc
            if flev > max_levels:
                max_levels = flev
            if blev > max_levels:
                max_levels = blev
            if collect_events:
                for i in range(fsize):
                    lvl = ws.fdist[ws.forder[i]]
                    ws.ev[lvl] += 1
                    if lvl > max_ev:
                        max_ev = lvl
                for i in range(bsize):
                    lvl = ws.bdist[ws.border[i]]
                    ws.ev[lvl] += 1
                    if lvl > max_ev:
                        max_ev = lvl

            ws.stamp += 1
            for w in range(nn):
                fd = ws.fdist[w]
                bd = ws.bdist[w]
                if fd < 0 and bd < 0:
                    continue
                w_global = members[w]
                if fd >= 0 and _pair_new(ws, use_rows, use_bitmap, lrows, nnw,
                                         local_set, v_global, w_global, sr, w):
                    new_edges += 1
                    if emit_edges:
                        push_i32(&ws.edges_u, <int32_t>v_global)
                        push_i32(&ws.edges_v, <int32_t>w_global)
                    if collect_events:
                        ws.ev[fd] += 1
                        if fd > max_ev:
                            max_ev = fd
                if bd >= 0 and _pair_new(ws, use_rows, use_bitmap, lrows, nnw,
                                         local_set, w_global, v_global, w, sr):
                    new_edges += 1
                    if emit_edges:
                        push_i32(&ws.edges_u, <int32_t>w_global)
                        push_i32(&ws.edges_v, <int32_t>v_global)
                    if collect_events:
                        ws.ev[bd] += 1
                        if bd > max_ev:
                            max_ev = bd
                if (0 <= fd <= c_lim_l) or (0 <= bd <= c_lim_l):
                    label_assignments += 1
                    lpv[w] += 1
                    if 0 <= fd <= c_lim_l and 0 <= bd <= c_lim_l:
                        kind = 2
                        lvl = fd if fd > bd else bd
                    elif 0 <= fd <= c_lim_l:
                        kind = 1
                        lvl = fd
                    else:
                        kind = 0
                        lvl = bd
                    if collect_events:
                        ws.ev[lvl] += 1
                        if lvl > max_ev:
                            max_ev = lvl
                    if collect_labels:
                        labels_out.append(
                            (int(w_global), int(v_global), int(kind)))
                    if kind == 2:
                        elim[w] = 1
                    elif not elim[w]:
                        old_g = group_of[w]
                        slot = 2 * old_g + kind
                        grow_i64_zero(&ws.slot_gid, slot + 1)
                        grow_i64_zero(&ws.slot_stamp, slot + 1)
                        if ws.slot_stamp.data[slot] == ws.stamp:
                            gid = ws.slot_gid.data[slot]
                        else:
                            gid = ws.grp_parent.size
                            push_i64(&ws.grp_parent, old_g)
                            push_i64(&ws.grp_hub, v_global)
                            push_i64(&ws.grp_tag, kind)
                            ws.slot_gid.data[slot] = gid
                            ws.slot_stamp.data[slot] = ws.stamp
                        group_of[w] = gid
                if collect_rings:
                    if not ((0 <= fd <= c_lim_r) or (0 <= bd <= c_lim_r)):
                        push_i32(&ws.ring_v, <int32_t>w_global)
                        fringe_enroll += 1
                        if collect_events:
                            lvl = fd if fd >= 0 else bd
                            ws.ev[lvl] += 1
                            if lvl > max_ev:
                                max_ev = lvl
            if collect_rings:
                push_i64(&ws.ring_off, ws.ring_v.size)
            for i in range(fsize):
                ws.fdist[ws.forder[i]] = -1
            for i in range(bsize):
                ws.bdist[ws.border[i]] = -1
    finally:
        PyMem_Free(rowbuf)
        for i in range(nn):
            ws.mmap[members[i]] = -1

    ev_np = np.zeros(max_ev + 1, dtype=np.int64)
    if max_ev >= 0:
        ev_mv = ev_np
        for i in range(max_ev + 1):
            ev_mv[i] = ws.ev[i]
            ws.ev[i] = 0

    s_np = np.empty(ns, dtype=np.int32)
    if ns:
        s_mv = s_np
        for i in range(ns):
            s_mv[i] = members[ws.sbuf[i]]

    return {
        "s": s_np,
        "group_of": group_of_np,
        "elim": elim_np,
        "grp_parent": i64_to_np(&ws.grp_parent),
        "grp_hub": i64_to_np(&ws.grp_hub),
        "grp_tag": i64_to_np(&ws.grp_tag),
        "labels_per_vertex": lpv_np,
        "new_edges": int(new_edges),
        "edge_scans": int(edge_scans),
        "label_assignments": int(label_assignments),
        "max_levels": int(max_levels),
        "ring_offsets": i64_to_np(&ws.ring_off),
        "ring_vertices": i32_to_np(&ws.ring_v),
        "fringe_enroll": int(fringe_enroll),
        "edges_u": i32_to_np(&ws.edges_u),
        "edges_v": i32_to_np(&ws.edges_v),
        "labels": labels_out,
        "events": ev_np,
    }


def chain_keys(grp_parent_obj, grp_hub_obj, grp_tag_obj, leaves_obj):
    """Label-key bytes per refinement leaf: (hub as big-endian u32, tag)."""
    cdef int64_t[::1] grp_parent = np.ascontiguousarray(
        grp_parent_obj, dtype=np.int64)
    cdef int64_t[::1] grp_hub = np.ascontiguousarray(grp_hub_obj, dtype=np.int64)
    cdef int64_t[::1] grp_tag = np.ascontiguousarray(grp_tag_obj, dtype=np.int64)
    cdef int64_t[::1] leaves = np.ascontiguousarray(leaves_obj, dtype=np.int64)
    cdef Py_ssize_t nl = leaves.shape[0]
    offsets_np = np.zeros(nl + 1, dtype=np.int64)
    cdef int64_t[::1] offsets = offsets_np
    cdef Py_ssize_t i
    cdef int64_t g, depth, total = 0
    for i in range(nl):
        g = leaves[i]
        depth = 0
        while g > 0:
            depth += 1
            g = grp_parent[g]
        total += 5 * depth
        offsets[i + 1] = total
    blob_np = np.zeros(total, dtype=np.uint8)
    cdef uint8_t[::1] blob
    cdef int64_t pos, hub, tag
    if total:
        blob = blob_np
        for i in range(nl):
            g = leaves[i]
            pos = offsets[i + 1]
            while g > 0:
                hub = grp_hub[g]
                tag = grp_tag[g]
                pos -= 5
                blob[pos] = <uint8_t>((hub >> 24) & 0xFF)
                blob[pos + 1] = <uint8_t>((hub >> 16) & 0xFF)
                blob[pos + 2] = <uint8_t>((hub >> 8) & 0xFF)
                blob[pos + 3] = <uint8_t>(hub & 0xFF)
                blob[pos + 4] = <uint8_t>tag
                g = grp_parent[g]
    return blob_np, offsets_np


def closure_and_ecc(indptr_obj, indices_obj):
    """Reachability bitmap rows (reflexive) and per-source eccentricity."""
    cdef int64_t[::1] indptr = np.ascontiguousarray(indptr_obj, dtype=np.int64)
    cdef int32_t[::1] indices = np.ascontiguousarray(indices_obj, dtype=np.int32)
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t words = (n + 63) >> 6
    rows_np = np.zeros((n, words), dtype=np.uint64)
    ecc_np = np.zeros(n, dtype=np.int64)
    cdef uint64_t[:, ::1] rows = rows_np
    cdef int64_t[::1] ecc = ecc_np
    cdef int32_t* dist = <int32_t*>PyMem_Malloc((n + 1) * sizeof(int32_t))
    cdef int32_t* order = <int32_t*>PyMem_Malloc((n + 1) * sizeof(int32_t))
    if dist == NULL or order == NULL:
        PyMem_Free(dist)
        PyMem_Free(order)
        raise MemoryError()
    cdef Py_ssize_t s, head, size, j, i
    cdef int32_t u, v
    cdef int64_t d, mx
    for i in range(n):
        dist[i] = -1
    with nogil:
        for s in range(n):
            order[0] = <int32_t>s
            dist[s] = 0
            head = 0
            size = 1
            mx = 0
            while head < size:
                u = order[head]
                head += 1
                for j in range(indptr[u], indptr[u + 1]):
                    v = indices[j]
                    if dist[v] < 0:
                        d = dist[u] + 1
                        dist[v] = <int32_t>d
                        if d > mx:
                            mx = d
                        order[size] = v
                        size += 1
            for i in range(size):
                u = order[i]
                rows[s, u >> 6] |= (<uint64_t>1) << (u & 63)
                dist[u] = -1
            ecc[s] = mx
    PyMem_Free(dist)
    PyMem_Free(order)
    return rows_np, ecc_np


def ecc_all(indptr_obj, indices_obj):
    """Per-source eccentricity over plain CSR, no closure rows kept."""
    cdef int64_t[::1] indptr = np.ascontiguousarray(indptr_obj, dtype=np.int64)
    cdef int32_t[::1] indices = np.ascontiguousarray(indices_obj, dtype=np.int32)
    cdef Py_ssize_t n = indptr.shape[0] - 1
    ecc_np = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] ecc = ecc_np
    cdef int32_t* dist = <int32_t*>PyMem_Malloc((n + 1) * sizeof(int32_t))
    cdef int32_t* order = <int32_t*>PyMem_Malloc((n + 1) * sizeof(int32_t))
    if dist == NULL or order == NULL:
        PyMem_Free(dist)
        PyMem_Free(order)
        raise MemoryError()
    cdef Py_ssize_t s, head, size, j, i
    cdef int32_t u, v
    cdef int64_t d, mx
    for i in range(n):
        dist[i] = -1
    with nogil:
        for s in range(n):
            order[0] = <int32_t>s
            dist[s] = 0
            head = 0
            size = 1
            mx = 0
            while head < size:
                u = order[head]
                head += 1
                for j in range(indptr[u], indptr[u + 1]):
                    v = indices[j]
                    if dist[v] < 0:
                        d = dist[u] + 1
                        dist[v] = <int32_t>d
                        if d > mx:
                            mx = d
                        order[size] = v
                        size += 1
            for i in range(size):
                dist[order[i]] = -1
            ecc[s] = mx
    PyMem_Free(dist)
    PyMem_Free(order)
    return ecc_np


def merged_ecc(Workspace ws):
    """Per-source eccentricity on the working graph of ws."""
    cdef Py_ssize_t n = ws.n, words = ws.words
    ecc_np = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] ecc = ecc_np
    cdef uint64_t* cov = <uint64_t*>PyMem_Malloc((words + 1) * sizeof(uint64_t))
    cdef uint64_t* fro = <uint64_t*>PyMem_Malloc((words + 1) * sizeof(uint64_t))
    cdef uint64_t* nxt = <uint64_t*>PyMem_Malloc((words + 1) * sizeof(uint64_t))
    cdef uint64_t* rowbuf = <uint64_t*>PyMem_Malloc(
        (words + 1) * sizeof(uint64_t))
    if cov == NULL or fro == NULL or nxt == NULL or rowbuf == NULL:
        PyMem_Free(cov)
        PyMem_Free(fro)
        PyMem_Free(nxt)
        PyMem_Free(rowbuf)
        raise MemoryError()
    cdef Py_ssize_t s, wi, j, u
    cdef int64_t lvl
    cdef uint64_t w
    cdef bint pending, anynew
    with nogil:
        for s in range(n):
            memset(cov, 0, words * sizeof(uint64_t))
            memset(fro, 0, words * sizeof(uint64_t))
            cov[s >> 6] |= (<uint64_t>1) << (s & 63)
            fro[s >> 6] |= (<uint64_t>1) << (s & 63)
            lvl = 0
            while True:
                if ws.has_clos:
                    pending = False
                    for wi in range(words):
                        if ws.clos_f[s, wi] & ~cov[wi]:
                            pending = True
                            break
                    if not pending:
                        break
                memset(nxt, 0, words * sizeof(uint64_t))
                for wi in range(words):
                    w = fro[wi]
                    while w:
                        u = (wi << 6) + CTZ64(w)
                        w &= w - 1
                        for j in range(ws.indptr_f[u], ws.indptr_f[u + 1]):
                            nxt[ws.indices_f[j] >> 6] |= \
                                (<uint64_t>1) << (ws.indices_f[j] & 63)
                        if ws.bitmode:
                            _assemble(ws, False, u, rowbuf)
                            for j in range(words):
                                nxt[j] |= rowbuf[j]
                anynew = False
                for wi in range(words):
                    nxt[wi] &= ~cov[wi]
                    if nxt[wi]:
                        anynew = True
                if not anynew:
                    break
                lvl += 1
                for wi in range(words):
                    cov[wi] |= nxt[wi]
                    fro[wi] = nxt[wi]
            ecc[s] = lvl
    PyMem_Free(cov)
    PyMem_Free(fro)
    PyMem_Free(nxt)
    PyMem_Free(rowbuf)
    return ecc_np


def bfs_hybrid(Workspace ws, src, limit):
    """Distances from src over the working graph; -1 where unreached."""
    cdef Py_ssize_t n = ws.n
    cdef int64_t c_lim = min(int(limit), C_NO_LIMIT)
    cdef Py_ssize_t c_src = int(src)
    dist_np = np.full(n, -1, dtype=np.int64)
    cdef int64_t[::1] dist = dist_np
    cdef int32_t* order = <int32_t*>PyMem_Malloc((n + 1) * sizeof(int32_t))
    cdef uint64_t* rowbuf = <uint64_t*>PyMem_Malloc(
        (ws.words + 1) * sizeof(uint64_t))
    if order == NULL or rowbuf == NULL:
        PyMem_Free(order)
        PyMem_Free(rowbuf)
        raise MemoryError()
    cdef Py_ssize_t head = 0, size = 1, j, wi, t
    cdef int32_t u
    cdef int64_t du, scans = 0, maxd = 0
    cdef uint64_t w
    order[0] = <int32_t>c_src
    dist[c_src] = 0
    while head < size:
        u = order[head]
        head += 1
        du = dist[u]
        if du > maxd:
            maxd = du
        if du >= c_lim:
            continue
        scans += ws.indptr_f[u + 1] - ws.indptr_f[u]
        for j in range(ws.indptr_f[u], ws.indptr_f[u + 1]):
            if dist[ws.indices_f[j]] < 0:
                dist[ws.indices_f[j]] = du + 1
                order[size] = ws.indices_f[j]
                size += 1
        if ws.bitmode:
            _assemble(ws, False, u, rowbuf)
            for wi in range(ws.words):
                w = rowbuf[wi]
                scans += POPC64(w)
                while w:
                    t = (wi << 6) + CTZ64(w)
                    w &= w - 1
                    if dist[t] < 0:
                        dist[t] = du + 1
                        order[size] = <int32_t>t
                        size += 1
    PyMem_Free(order)
    PyMem_Free(rowbuf)
    return {"dist": dist_np, "edge_scans": int(scans), "levels": int(maxd + 1)}


def relation_stats(clos_f_obj, clos_t_obj, s_words_obj):
    """Per-vertex label count and elimination flag against shortcutters S."""
    cdef uint64_t[:, ::1] clos_f = clos_f_obj
    cdef uint64_t[:, ::1] clos_t = clos_t_obj
    cdef uint64_t[::1] s_words = s_words_obj
    cdef Py_ssize_t n = clos_f.shape[0], words = clos_f.shape[1]
    lab_np = np.zeros(n, dtype=np.int64)
    elim_np = np.zeros(n, dtype=np.uint8)
    cdef int64_t[::1] lab = lab_np
    cdef uint8_t[::1] elim = elim_np
    cdef Py_ssize_t w, wi
    cdef uint64_t fw, tw, sw
    cdef int64_t cnt
    cdef uint8_t ele
    with nogil:
        for w in range(n):
            cnt = 0
            ele = 0
            for wi in range(words):
                fw = clos_f[w, wi]
                tw = clos_t[w, wi]
                sw = s_words[wi]
                cnt += POPC64((fw | tw) & sw)
                if fw & tw & sw:
                    ele = 1
            lab[w] = cnt
            elim[w] = ele
    return lab_np, elim_np


def saturated_signatures(clos_f_obj, clos_t_obj, s_words_obj, key_a_obj,
                         key_b_obj, verts_obj):
    """Two independent hashes of each vertex's S-relation signature."""
    cdef uint64_t[:, ::1] clos_f = clos_f_obj
    cdef uint64_t[:, ::1] clos_t = clos_t_obj
    cdef uint64_t[::1] s_words = s_words_obj
    cdef uint64_t[::1] key_a = np.ascontiguousarray(key_a_obj, dtype=np.uint64)
    cdef uint64_t[::1] key_b = np.ascontiguousarray(key_b_obj, dtype=np.uint64)
    cdef int64_t[::1] verts = np.ascontiguousarray(verts_obj, dtype=np.int64)
    cdef Py_ssize_t words = clos_f.shape[1], m = verts.shape[0]
    sig_a_np = np.zeros(m, dtype=np.uint64)
    sig_b_np = np.zeros(m, dtype=np.uint64)
    cdef uint64_t[::1] sig_a = sig_a_np
    cdef uint64_t[::1] sig_b = sig_b_np
    cdef Py_ssize_t i, wi, w
    cdef uint64_t ha, hb, aw, dw
    with nogil:
        for i in range(m):
            w = verts[i]
            ha = 0
            hb = 0
            for wi in range(words):
                aw = clos_t[w, wi] & s_words[wi]
                dw = clos_f[w, wi] & s_words[wi]
                if aw or dw:
                    ha = ha + aw * key_a[wi] + dw * key_a[words + wi]
                    hb = hb + aw * key_b[wi] + dw * key_b[words + wi]
            sig_a[i] = ha
            sig_b[i] = hb
    return {"sig_a": sig_a_np, "sig_b": sig_b_np}


cdef inline int64_t _masked_deg_c(uint64_t word, Py_ssize_t wi,
                                  int64_t[::1] deg,
                                  int64_t[::1] word_sum) nogil:
    if word == ALL_ONES:
        return word_sum[wi]
    cdef int64_t total = 0
    cdef Py_ssize_t base = wi << 6
    while word:
        total += deg[base + CTZ64(word)]
        word &= word - 1
    return total


def saturated_hub_stats(clos_f_obj, clos_t_obj, s_list_obj, s_words_obj,
                        deg_scan_f_obj, deg_scan_b_obj, word_sum_f_obj,
                        word_sum_b_obj, des_size_obj, anc_size_obj):
    """Whole-level scan and edge totals for a fully saturated sweep."""
    cdef uint64_t[:, ::1] clos_f = clos_f_obj
    cdef uint64_t[:, ::1] clos_t = clos_t_obj
    cdef int32_t[::1] s_list = np.ascontiguousarray(s_list_obj, dtype=np.int32)
    cdef uint64_t[::1] s_words = s_words_obj
    cdef int64_t[::1] deg_f = deg_scan_f_obj
    cdef int64_t[::1] deg_b = deg_scan_b_obj
    cdef int64_t[::1] wsum_f = word_sum_f_obj
    cdef int64_t[::1] wsum_b = word_sum_b_obj
    cdef int64_t[::1] des_size = des_size_obj
    cdef int64_t[::1] anc_size = anc_size_obj
    cdef Py_ssize_t words = clos_f.shape[1], ns = s_list.shape[0]
    cdef int64_t scans = 0, raw_edges = 0, hub_pairs = 0
    cdef Py_ssize_t i, wi, v
    cdef uint64_t fw, bw
    with nogil:
        for i in range(ns):
            v = s_list[i]
            for wi in range(words):
                fw = clos_f[v, wi]
                bw = clos_t[v, wi]
                if fw:
                    scans += _masked_deg_c(fw, wi, deg_f, wsum_f)
                    hub_pairs += POPC64(fw & s_words[wi])
                if bw:
                    scans += _masked_deg_c(bw, wi, deg_b, wsum_b)
            raw_edges += des_size[v] - 1 + anc_size[v] - 1
            hub_pairs -= 1  # v itself sits in Des(v) & S
    return {"edge_scans": int(scans), "new_edges": int(raw_edges - hub_pairs)}


cdef uint64_t[:, ::1] _sco_clos_f
cdef uint64_t[:, ::1] _sco_clos_t
cdef uint64_t[::1] _sco_s
cdef int64_t[::1] _sco_reps
cdef int64_t[::1] _sco_last


cdef int _sco_cmp(int64_t ia, int64_t ib) nogil:
    cdef Py_ssize_t a = _sco_reps[ia], b = _sco_reps[ib]
    cdef int64_t la = _sco_last[ia], lb = _sco_last[ib]
    cdef int64_t shared = la if la < lb else lb
    cdef Py_ssize_t words = _sco_clos_f.shape[1]
    cdef Py_ssize_t wi, off
    cdef int64_t base, h
    cdef uint64_t aa, da, ab, db, diff
    cdef int sa, sb
    for wi in range(words):
        base = <int64_t>wi << 6
        if base > shared:
            break
        aa = _sco_clos_f[a, wi] & _sco_s[wi]
        da = _sco_clos_t[a, wi] & _sco_s[wi]
        ab = _sco_clos_f[b, wi] & _sco_s[wi]
        db = _sco_clos_t[b, wi] & _sco_s[wi]
        diff = (aa ^ ab) | (da ^ db)
        while diff:
            off = CTZ64(diff)
            h = base + off
            if h > shared:
                break
            sa = 0 if (aa >> off) & 1 else (1 if (da >> off) & 1 else 2)
            sb = 0 if (ab >> off) & 1 else (1 if (db >> off) & 1 else 2)
            if sa != sb:
                return -1 if sa < sb else 1
            diff &= diff - 1
    if la != lb:
        return -1 if la < lb else 1
    return 0


def saturated_cell_order(clos_f_obj, clos_t_obj, s_words_obj, reps_obj,
                         last_label_obj):
    """Canonical order of survivor cells from representative rows."""
    global _sco_clos_f, _sco_clos_t, _sco_s, _sco_reps, _sco_last
    _sco_clos_f = clos_f_obj
    _sco_clos_t = clos_t_obj
    _sco_s = s_words_obj
    _sco_reps = np.ascontiguousarray(reps_obj, dtype=np.int64)
    _sco_last = np.ascontiguousarray(last_label_obj, dtype=np.int64)
    cdef Py_ssize_t m = _sco_reps.shape[0]
    idx_np = np.arange(m, dtype=np.int64)
    if m < 2:
        return idx_np
    tmp_np = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] src_v = idx_np
    cdef int64_t[::1] dst_v = tmp_np
    cdef int64_t[::1] swap
    cdef Py_ssize_t width = 1, lo, mid, hi, i, j, k
    cdef bint flipped = False
    # bottom-up stable merge sort, ties keep the left element
    while width < m:
        lo = 0
        while lo < m:
            mid = lo + width
            if mid > m:
                mid = m
            hi = lo + 2 * width
            if hi > m:
                hi = m
            i = lo
            j = mid
            k = lo
            while i < mid and j < hi:
                if _sco_cmp(src_v[j], src_v[i]) < 0:
                    dst_v[k] = src_v[j]
                    j += 1
                else:
                    dst_v[k] = src_v[i]
                    i += 1
                k += 1
            while i < mid:
                dst_v[k] = src_v[i]
                i += 1
                k += 1
            while j < hi:
                dst_v[k] = src_v[j]
                j += 1
                k += 1
            lo = hi
        swap = src_v
        src_v = dst_v
        dst_v = swap
        flipped = not flipped
        width *= 2
    return tmp_np if flipped else idx_np


def batch_cells(Workspace ws, cell_members_obj, cell_offsets_obj,
                bint collect_events):
    """Process every level-1 cell of a saturated run in one call.

    Same contract as the reference: sampling probability 1 in every cell,
    cells are siblings, events align at unit 0 and sum. Cells above the
    bitmap cap are delegated to level_sweep; small ones run a trimmed
    inline loop whose only omission is the refinement bookkeeping no
    caller reads.
    """
    cdef int32_t[::1] cell_members = np.ascontiguousarray(
        cell_members_obj, dtype=np.int32)
    cdef int64_t[::1] cell_offsets = np.ascontiguousarray(
        cell_offsets_obj, dtype=np.int64)
    cdef Py_ssize_t ncells = cell_offsets.shape[0] - 1
    cell_max_levels_np = np.zeros(ncells, dtype=np.int64)
    cell_max_lab_np = np.zeros(ncells, dtype=np.int64)
    cdef int64_t[::1] cell_max_levels = cell_max_levels_np
    cdef int64_t[::1] cell_max_lab = cell_max_lab_np
    ev_hist_np = np.zeros(ws.n + 2, dtype=np.int64)
    cdef int64_t[::1] ev_hist = ev_hist_np
    cdef GrowI32 eu, evv
    eu.data = NULL
    eu.size = 0
    eu.cap = 0
    evv.data = NULL
    evv.size = 0
    evv.cap = 0
    cdef int64_t edge_scans = 0, label_assignments = 0, new_edges = 0
    cdef int64_t max_ev = -1
    cdef uint64_t* rowbuf = <uint64_t*>PyMem_Malloc(
        (ws.words + 1) * sizeof(uint64_t))
    cdef int32_t* labcnt = NULL
    cdef Py_ssize_t biggest = 1, span
    cdef Py_ssize_t ci, nn, nnw, i, g, w, sr, fsize, bsize
    cdef int32_t[::1] cell
    cdef int64_t fsc, bsc, flev, blev, fd, bd, lvl, mlab
    cdef int64_t v_global, w_global
    cdef uint64_t* lrows
    cdef int32_t[::1] sub_u, sub_v
    cdef int64_t[::1] sub_ev, sub_lpv
    cdef int64_t[::1] ev_mv
    cdef object out, ev_np, out_u, out_v
    if rowbuf == NULL:
        raise MemoryError()
    for ci in range(ncells):
        span = cell_offsets[ci + 1] - cell_offsets[ci]
        if span > biggest:
            biggest = span
    if biggest > BITMAP_MAX:
        biggest = BITMAP_MAX
    labcnt = <int32_t*>PyMem_Malloc(biggest * sizeof(int32_t))
    if labcnt == NULL:
        PyMem_Free(rowbuf)
        raise MemoryError()

    try:
        for ci in range(ncells):
            cell = cell_members[cell_offsets[ci]:cell_offsets[ci + 1]]
            nn = cell.shape[0]
            if nn > BITMAP_MAX:
                # rare huge cell: full reference-path call, outputs merged
                out = level_sweep(
                    ws, np.asarray(cell), 0, 0, True,
                    NO_LIMIT, NO_LIMIT, NO_LIMIT,
                    True, False, True, False, collect_events,
                )
                sub_u = out["edges_u"]
                sub_v = out["edges_v"]
                for i in range(sub_u.shape[0]):
                    push_i32(&eu, sub_u[i])
                    push_i32(&evv, sub_v[i])
                new_edges += out["new_edges"]
                edge_scans += out["edge_scans"]
                label_assignments += out["label_assignments"]
                cell_max_levels[ci] = out["max_levels"]
                sub_lpv = out["labels_per_vertex"]
                mlab = 0
                for i in range(sub_lpv.shape[0]):
                    if sub_lpv[i] > mlab:
                        mlab = sub_lpv[i]
                cell_max_lab[ci] = mlab
                sub_ev = out["events"]
                for i in range(sub_ev.shape[0]):
                    if sub_ev[i]:
                        ev_hist[i] += sub_ev[i]
                        if i > max_ev:
                            max_ev = i
                continue
            nnw = (nn + 63) >> 6
            for i in range(nn):
                ws.mmap[cell[i]] = <int32_t>i
                labcnt[i] = 0
            if ws.bitmode:
                memset(ws.member_words, 0, ws.words * sizeof(uint64_t))
                for i in range(nn):
                    g = cell[i]
                    ws.member_words[g >> 6] |= (<uint64_t>1) << (g & 63)
            if nn:
                grow_i64(&ws.localrows, nn * nnw)
                memset(ws.localrows.data, 0, nn * nnw * sizeof(int64_t))
            lrows = <uint64_t*>ws.localrows.data
            mlab = 0
            for sr in range(nn):
                v_global = cell[sr]
                fsize = _bfs_c(ws, False, <int32_t>sr, cell, C_NO_LIMIT,
                               ws.fdist, ws.forder, rowbuf, &fsc, &flev)
                bsize = _bfs_c(ws, True, <int32_t>sr, cell, C_NO_LIMIT,
                               ws.bdist, ws.border, rowbuf, &bsc, &blev)
                edge_scans += fsc + bsc
                if flev > cell_max_levels[ci]:
                    cell_max_levels[ci] = flev
                if blev > cell_max_levels[ci]:
                    cell_max_levels[ci] = blev
                if collect_events:
                    for i in range(fsize):
                        lvl = ws.fdist[ws.forder[i]]
                        ev_hist[lvl] += 1
                        if lvl > max_ev:
                            max_ev = lvl
                    for i in range(bsize):
                        lvl = ws.bdist[ws.border[i]]
                        ev_hist[lvl] += 1
                        if lvl > max_ev:
                            max_ev = lvl
                for w in range(nn):
                    fd = ws.fdist[w]
                    bd = ws.bdist[w]
                    if fd < 0 and bd < 0:
                        continue
                    w_global = cell[w]
                    if fd >= 0 and _pair_new(ws, False, True, lrows, nnw,
                                             None, v_global, w_global, sr, w):
                        new_edges += 1
                        push_i32(&eu, <int32_t>v_global)
                        push_i32(&evv, <int32_t>w_global)
                        if collect_events:
                            ev_hist[fd] += 1
                            if fd > max_ev:
                                max_ev = fd
                    if bd >= 0 and _pair_new(ws, False, True, lrows, nnw,
                                             None, w_global, v_global, w, sr):
                        new_edges += 1
                        push_i32(&eu, <int32_t>w_global)
                        push_i32(&evv, <int32_t>v_global)
                        if collect_events:
                            ev_hist[bd] += 1
                            if bd > max_ev:
                                max_ev = bd
                    # unlimited label radius: every reached vertex gets one
                    label_assignments += 1
                    labcnt[w] += 1
                    if labcnt[w] > mlab:
                        mlab = labcnt[w]
                    if collect_events:
                        if fd >= 0 and bd >= 0:
                            lvl = fd if fd > bd else bd
                        elif fd >= 0:
                            lvl = fd
                        else:
                            lvl = bd
                        ev_hist[lvl] += 1
                        if lvl > max_ev:
                            max_ev = lvl
                for i in range(fsize):
                    ws.fdist[ws.forder[i]] = -1
                for i in range(bsize):
                    ws.bdist[ws.border[i]] = -1
            cell_max_lab[ci] = mlab
            for i in range(nn):
                ws.mmap[cell[i]] = -1

        ev_np = np.zeros(max_ev + 1, dtype=np.int64)
        if max_ev >= 0:
            ev_mv = ev_np
            for i in range(max_ev + 1):
                ev_mv[i] = ev_hist[i]
        out_u = i32_to_np(&eu)
        out_v = i32_to_np(&evv)
    finally:
        PyMem_Free(rowbuf)
        PyMem_Free(labcnt)
        PyMem_Free(eu.data)
        PyMem_Free(evv.data)
    return {
        "edges_u": out_u,
        "edges_v": out_v,
        "new_edges": int(new_edges),
        "edge_scans": int(edge_scans),
        "label_assignments": int(label_assignments),
        "cell_max_levels": cell_max_levels_np,
        "cell_max_lab": cell_max_lab_np,
        "events": ev_np,
    }


cdef Py_ssize_t _mask_bfs(Workspace ws, bint backward, Py_ssize_t src,
                          uint64_t* cov, uint64_t* fro, uint64_t* nxt,
                          uint64_t* rowbuf, uint64_t* store,
                          Py_ssize_t cap) except -1:
    """Level frontiers of src; frontier d occupies store[d*words:].

    Returns the level count; pass store NULL for a counting-only pass.
    """
    cdef Py_ssize_t words = ws.words, wi, j, u, nlev = 1
    cdef uint64_t w
    cdef bint anynew
    cdef int64_t[::1] indptr = ws.indptr_b if backward else ws.indptr_f
    cdef int32_t[::1] indices = ws.indices_b if backward else ws.indices_f
    memset(cov, 0, words * sizeof(uint64_t))
    memset(fro, 0, words * sizeof(uint64_t))
    cov[src >> 6] |= (<uint64_t>1) << (src & 63)
    fro[src >> 6] |= (<uint64_t>1) << (src & 63)
    if store != NULL:
        memset(store, 0, cap * words * sizeof(uint64_t))
        store[src >> 6] |= (<uint64_t>1) << (src & 63)
    while True:
        memset(nxt, 0, words * sizeof(uint64_t))
        for wi in range(words):
            w = fro[wi]
            while w:
                u = (wi << 6) + CTZ64(w)
                w &= w - 1
                for j in range(indptr[u], indptr[u + 1]):
                    nxt[indices[j] >> 6] |= (<uint64_t>1) << (indices[j] & 63)
                if ws.bitmode:
                    _assemble(ws, backward, u, rowbuf)
                    for j in range(words):
                        nxt[j] |= rowbuf[j]
        anynew = False
        for wi in range(words):
            nxt[wi] &= ~cov[wi]
            if nxt[wi]:
                anynew = True
        if not anynew:
            return nlev
        if nlev >= cap:
            raise ValueError(f"level count exceeds cap {cap}")
        for wi in range(words):
            cov[wi] |= nxt[wi]
            fro[wi] = nxt[wi]
            if store != NULL:
                store[nlev * words + wi] = nxt[wi]
        nlev += 1


cdef int _fill_tables(Workspace ws, uint64_t* cov, uint64_t* fro,
                      uint64_t* nxt, uint64_t* rowbuf, counts_f_np,
                      counts_b_np, masks_f_np, masks_b_np, both_min_np,
                      Py_ssize_t L) except -1:
    cdef int64_t[:, ::1] counts_f = counts_f_np
    cdef int64_t[:, ::1] counts_b = counts_b_np
    cdef uint64_t[:, :, ::1] masks_f = masks_f_np
    cdef uint64_t[:, :, ::1] masks_b = masks_b_np
    cdef int64_t[:, ::1] both_min = both_min_np
    cdef Py_ssize_t n = ws.n, words = ws.words
    cdef uint64_t* store_f = <uint64_t*>PyMem_Malloc(
        (L * words + 1) * sizeof(uint64_t))
    cdef uint64_t* store_b = <uint64_t*>PyMem_Malloc(
        (L * words + 1) * sizeof(uint64_t))
    cdef uint64_t* pf = <uint64_t*>PyMem_Malloc((words + 1) * sizeof(uint64_t))
    cdef uint64_t* pb = <uint64_t*>PyMem_Malloc((words + 1) * sizeof(uint64_t))
    if store_f == NULL or store_b == NULL or pf == NULL or pb == NULL:
        PyMem_Free(store_f)
        PyMem_Free(store_b)
        PyMem_Free(pf)
        PyMem_Free(pb)
        raise MemoryError()
    cdef Py_ssize_t v, d, wi
    cdef int64_t prev, cur
    try:
        for v in range(n):
            _mask_bfs(ws, False, v, cov, fro, nxt, rowbuf, store_f, L)
            _mask_bfs(ws, True, v, cov, fro, nxt, rowbuf, store_b, L)
            memset(pf, 0, words * sizeof(uint64_t))
            memset(pb, 0, words * sizeof(uint64_t))
            prev = 0
            for d in range(L):
                cur = 0
                for wi in range(words):
                    masks_f[v, d, wi] = store_f[d * words + wi]
                    masks_b[v, d, wi] = store_b[d * words + wi]
                    counts_f[v, d] += POPC64(store_f[d * words + wi])
                    counts_b[v, d] += POPC64(store_b[d * words + wi])
                    pf[wi] |= store_f[d * words + wi]
                    pb[wi] |= store_b[d * words + wi]
                    cur += POPC64(pf[wi] & pb[wi])
                both_min[v, d] = cur - prev
                prev = cur
    finally:
        PyMem_Free(store_f)
        PyMem_Free(store_b)
        PyMem_Free(pf)
        PyMem_Free(pb)
    return 0


def event_tables(Workspace ws, cap):
    """Per-vertex BFS level tables of the working graph, both directions."""
    cdef Py_ssize_t n = ws.n, words = ws.words
    cdef Py_ssize_t c_cap = int(cap)
    cdef uint64_t* cov = <uint64_t*>PyMem_Malloc((words + 1) * sizeof(uint64_t))
    cdef uint64_t* fro = <uint64_t*>PyMem_Malloc((words + 1) * sizeof(uint64_t))
    cdef uint64_t* nxt = <uint64_t*>PyMem_Malloc((words + 1) * sizeof(uint64_t))
    cdef uint64_t* rowbuf = <uint64_t*>PyMem_Malloc(
        (words + 1) * sizeof(uint64_t))
    if cov == NULL or fro == NULL or nxt == NULL or rowbuf == NULL:
        PyMem_Free(cov)
        PyMem_Free(fro)
        PyMem_Free(nxt)
        PyMem_Free(rowbuf)
        raise MemoryError()
    nlev_f_np = np.zeros(n, dtype=np.int32)
    nlev_b_np = np.zeros(n, dtype=np.int32)
    cdef int32_t[::1] nlev_f = nlev_f_np
    cdef int32_t[::1] nlev_b = nlev_b_np
    cdef Py_ssize_t v, L = 1
    cdef object counts_f_np, counts_b_np, masks_f_np, masks_b_np, both_min_np
    try:
        for v in range(n):
            nlev_f[v] = <int32_t>_mask_bfs(ws, False, v, cov, fro, nxt,
                                           rowbuf, NULL, c_cap)
            nlev_b[v] = <int32_t>_mask_bfs(ws, True, v, cov, fro, nxt,
                                           rowbuf, NULL, c_cap)
            if nlev_f[v] > L:
                L = nlev_f[v]
            if nlev_b[v] > L:
                L = nlev_b[v]
        counts_f_np = np.zeros((n, L), dtype=np.int64)
        counts_b_np = np.zeros((n, L), dtype=np.int64)
        masks_f_np = np.zeros((n, L, words), dtype=np.uint64)
        masks_b_np = np.zeros((n, L, words), dtype=np.uint64)
        both_min_np = np.zeros((n, L), dtype=np.int64)
        _fill_tables(ws, cov, fro, nxt, rowbuf, counts_f_np, counts_b_np,
                     masks_f_np, masks_b_np, both_min_np, L)
    finally:
        PyMem_Free(cov)
        PyMem_Free(fro)
        PyMem_Free(nxt)
        PyMem_Free(rowbuf)
    return {
        "counts_f": counts_f_np,
        "counts_b": counts_b_np,
        "masks_f": masks_f_np,
        "masks_b": masks_b_np,
        "both_min": both_min_np,
        "nlev_f": nlev_f_np,
        "nlev_b": nlev_b_np,
    }


def run_hist(tables, s_list_obj, s_words_obj):
    """Per-depth-unit event histograms for one saturated sweep over S."""
    cdef int64_t[:, ::1] counts_f = tables["counts_f"]
    cdef int64_t[:, ::1] counts_b = tables["counts_b"]
    cdef uint64_t[:, :, ::1] masks_f = tables["masks_f"]
    cdef int64_t[:, ::1] both_min = tables["both_min"]
    cdef int32_t[::1] nlev_f = tables["nlev_f"]
    cdef int32_t[::1] nlev_b = tables["nlev_b"]
    cdef int32_t[::1] s_list = np.ascontiguousarray(s_list_obj, dtype=np.int32)
    cdef uint64_t[::1] s_words = s_words_obj
    cdef Py_ssize_t L = counts_f.shape[1], words = masks_f.shape[2]
    cdef Py_ssize_t ns = s_list.shape[0]
    visits_np = np.zeros(L, dtype=np.int64)
    labels_np = np.zeros(L, dtype=np.int64)
    edges_np = np.zeros(L, dtype=np.int64)
    cdef int64_t[::1] visits = visits_np
    cdef int64_t[::1] labels = labels_np
    cdef int64_t[::1] edges = edges_np
    cdef int64_t max_levels = 0, c, dup
    cdef Py_ssize_t i, v, d, wi
    with nogil:
        for i in range(ns):
            v = s_list[i]
            if nlev_f[v] > max_levels:
                max_levels = nlev_f[v]
            if nlev_b[v] > max_levels:
                max_levels = nlev_b[v]
            for d in range(L):
                c = counts_f[v, d] + counts_b[v, d]
                if c == 0 and both_min[v, d] == 0:
                    continue
                visits[d] += c
                labels[d] += c - both_min[v, d]
                if d >= 1:
                    dup = 0
                    for wi in range(words):
                        dup += POPC64(masks_f[v, d, wi] & s_words[wi])
                    edges[d] += c - dup
    return {
        "visits": visits_np,
        "labels": labels_np,
        "edges": edges_np,
        "max_levels": int(max_levels),
    }


cdef struct Arrival:
    int64_t dst
    uint64_t key
    int64_t app
    int64_t ti
    int64_t hop


cdef void _merge_arr(Arrival* src, Arrival* dst, Py_ssize_t lo, Py_ssize_t mid,
                     Py_ssize_t hi) nogil:
    cdef Py_ssize_t i = lo, j = mid, k = lo
    cdef bint take_i
    while i < mid and j < hi:
        if src[j].dst != src[i].dst:
            take_i = src[i].dst < src[j].dst
        elif src[j].key != src[i].key:
            take_i = src[i].key < src[j].key
        else:
            take_i = src[i].app <= src[j].app
        if take_i:
            dst[k] = src[i]
            i += 1
        else:
            dst[k] = src[j]
            j += 1
        k += 1
    while i < mid:
        dst[k] = src[i]
        i += 1
        k += 1
    while j < hi:
        dst[k] = src[j]
        j += 1
        k += 1


def flood(indptr_obj, indices_obj, sources_obj, h, seed):
    """Round-accurate token flood from each source along graph edges.

    Same protocol as the reference: FIFO link queues, one token per link
    per round, first arrival accepted, same-round arrivals at a vertex
    processed in seeded pseudo-random order.
    """
    cdef int64_t[::1] indptr = np.ascontiguousarray(indptr_obj, dtype=np.int64)
    cdef int32_t[::1] indices = np.ascontiguousarray(indices_obj, dtype=np.int32)
    cdef int32_t[::1] sources = np.ascontiguousarray(sources_obj, dtype=np.int32)
    cdef Py_ssize_t nlinks = indices.shape[0]
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t nt = sources.shape[0]
    cdef int64_t c_h = int(h)
    if c_h > 0x7FFFFFFF:
        raise ValueError("hop budget too large for this backend")
    cdef uint64_t c_seed = <uint64_t>(int(seed) & _MASK)
    hops_np = np.full((nt, n), -1, dtype=np.int32)
    cdef int32_t[:, ::1] hops = hops_np
    cdef GrowI64* queues = <GrowI64*>PyMem_Malloc(
        (nlinks + 1) * sizeof(GrowI64))
    cdef int64_t* heads = <int64_t*>PyMem_Malloc((nlinks + 1) * sizeof(int64_t))
    if queues == NULL or heads == NULL:
        PyMem_Free(queues)
        PyMem_Free(heads)
        raise MemoryError()
    memset(queues, 0, (nlinks + 1) * sizeof(GrowI64))
    memset(heads, 0, (nlinks + 1) * sizeof(int64_t))
    cdef Arrival* arr = NULL
    cdef Arrival* tmp = NULL
    cdef Py_ssize_t arr_cap = 0
    cdef int64_t rounds = 0, messages = 0
    cdef Py_ssize_t i, slot, na, width, lo, mid, hi2
    cdef int64_t s, ti, hop, packed, dst
    cdef Arrival* srcp
    cdef Arrival* dstp
    cdef Arrival* swp

    try:
        for i in range(nt):
            s = sources[i]
            hops[i, s] = 0
            if 1 <= c_h:
                for slot in range(indptr[s], indptr[s + 1]):
                    push_i64(&queues[slot], (<int64_t>i << 32) | 1)
        while True:
            na = 0
            for slot in range(nlinks):
                if heads[slot] < queues[slot].size:
                    packed = queues[slot].data[heads[slot]]
                    heads[slot] += 1
                    if na >= arr_cap:
                        arr_cap = arr_cap * 2 if arr_cap else 4096
                        arr = <Arrival*>PyMem_Realloc(
                            arr, arr_cap * sizeof(Arrival))
                        tmp = <Arrival*>PyMem_Realloc(
                            tmp, arr_cap * sizeof(Arrival))
                        if arr == NULL or tmp == NULL:
                            raise MemoryError()
                    arr[na].dst = indices[slot]
                    arr[na].ti = packed >> 32
                    arr[na].hop = packed & 0x7FFFFFFF
                    arr[na].app = na
                    na += 1
            if na == 0:
                break
            rounds += 1
            messages += na
            for i in range(na):
                arr[i].key = _derive2(
                    _derive2(c_seed, <uint64_t>rounds, <uint64_t>arr[i].dst),
                    <uint64_t>arr[i].ti, <uint64_t>arr[i].hop)
            width = 1
            srcp = arr
            dstp = tmp
            while width < na:
                lo = 0
                while lo < na:
                    mid = lo + width
                    if mid > na:
                        mid = na
                    hi2 = lo + 2 * width
                    if hi2 > na:
                        hi2 = na
                    _merge_arr(srcp, dstp, lo, mid, hi2)
                    lo = hi2
                swp = srcp
                srcp = dstp
                dstp = swp
                width *= 2
            for i in range(na):
                dst = srcp[i].dst
                ti = srcp[i].ti
                hop = srcp[i].hop
                if hops[ti, dst] < 0:
                    hops[ti, dst] = <int32_t>hop
                    if hop + 1 <= c_h:
                        for slot in range(indptr[dst], indptr[dst + 1]):
                            push_i64(&queues[slot], (ti << 32) | (hop + 1))
    finally:
        for slot in range(nlinks):
            PyMem_Free(queues[slot].data)
        PyMem_Free(queues)
        PyMem_Free(heads)
        PyMem_Free(arr)
        PyMem_Free(tmp)
    return {"hops": hops_np, "rounds": int(rounds), "messages": int(messages)}
