"""Protocol layer over the message-passing network model.

Round counts for the frozen examples are pinned exactly; everything
sized randomly is checked against central BFS or the closed-form round
envelopes instead.
"""

import numpy as np
import pytest

from hopshort import _kernels
import hopshort.congest as congest_mod
from hopshort.congest import (
    AUTO,
    Network,
    RoundLedger,
    _flood_sim,
    auto_alpha,
    broadcast_all,
    broadcast_charge,
    build_skeleton,
    distr_reach,
    limited_bfs_all,
    round_report,
)
from hopshort.generators import (
    complete_dag,
    cycle,
    layered_grid,
    path,
    path_plus_random,
)
from hopshort.graph import (
    BACKWARD,
    FORWARD,
    Digraph,
    VertexSet,
    bfs_limited,
    reachable_set,
)
from hopshort.rng import derive


@pytest.fixture(scope="module")
def p10():
    return Network(path(10))


class TestBroadcastAll:
    def test_star_center_tokens(self):
        net = Network(Digraph(6, [(0, i) for i in range(1, 6)]))
        assert net.d_hop == 2
        assert broadcast_all(net, {0: 5}) == 5

    def test_zero_tokens_zero_rounds(self):
        net = Network(Digraph(6, [(0, i) for i in range(1, 6)]))
        assert broadcast_all(net, {0: 0, 3: 0}) == 0

    def test_path_endpoints(self, p10):
        assert p10.d_hop == 9
        assert broadcast_all(p10, {0: 1}) == 9
        assert broadcast_all(p10, {9: 1}) == 9

    def test_ledger_charged(self, p10):
        led = RoundLedger()
        rounds = broadcast_all(p10, {9: 1}, ledger=led, phase="final_broadcast")
        assert rounds == 9
        assert led.final_broadcast == 9
        assert led.messages_total == 9

    @pytest.mark.parametrize(
        "holders", [{3: 2, 7: 1}, {1: 4, 2: 1, 9: 3}, {5: 10}]
    )
    def test_deterministic_within_envelope(self, p10, holders):
        r1 = broadcast_all(p10, holders)
        r2 = broadcast_all(p10, holders)
        total = sum(holders.values())
        assert r1 == r2
        assert r1 <= 2 * (total + 2 * p10.d_hop)

    def test_charge_formula(self, p10):
        assert broadcast_charge(p10, 5) == 2 * (5 - 1 + 9)
        assert broadcast_charge(p10, 0) == 0

    def test_concurrent_identical_with_trace(self, p10):
        t_seq, t_par = [], []
        r1 = broadcast_all(p10, {4: 3, 8: 2}, trace=t_seq.append)
        r2 = broadcast_all(p10, {4: 3, 8: 2}, trace=t_par.append, concurrent=True)
        assert r1 == r2
        assert t_seq == t_par
        assert t_seq[0].startswith("round=1 phase=final_broadcast edge=")


_FLOOD_GRAPHS = [
    path(17),
    cycle(12),
    complete_dag(9),
    path_plus_random(24, 30, seed=3),
    layered_grid(4, 5),
]


@pytest.mark.parametrize("gi", range(len(_FLOOD_GRAPHS)))
@pytest.mark.parametrize("ti", range(3))
def test_flood_sim_matches_kernel(gi, ti):
    g = _FLOOD_GRAPHS[gi]
    T_ids = [[0], [0, g.n - 1], list(range(0, g.n, 3))][ti]
    for h in [0, 1, 3, g.n]:
        seed = derive(99, gi, ti, h)
        sources = np.asarray(T_ids, dtype=np.int64)
        kf = _kernels.flood(g.indptr_f, g.indices_f, sources, h, seed)
        sf = _flood_sim(
            g.indptr_f, g.indices_f, sources, h, seed,
            trace=None, token_prefix="fwd", concurrent=False,
        )
        assert np.array_equal(kf["hops"], sf["hops"]), h
        assert kf["rounds"] == sf["rounds"], h
        assert kf["messages"] == sf["messages"], h
        cf = _flood_sim(
            g.indptr_f, g.indices_f, sources, h, seed,
            trace=None, token_prefix="fwd", concurrent=True,
        )
        assert np.array_equal(kf["hops"], cf["hops"]), h
        assert kf["rounds"] == cf["rounds"], h


class TestLimitedBfsAll:
    @pytest.fixture(scope="class")
    def net(self):
        return Network(path_plus_random(30, 25, seed=7))

    def test_exact_at_full_budget(self, net):
        g = net.g
        T = VertexSet([0, 5, 11, 29])
        rel, _ = limited_bfs_all(net, T, h=g.n, seed=5)
        for i, t in enumerate(T.ids):
            fd = bfs_limited(g, int(t), FORWARD, g.n).dist
            bd = bfs_limited(g, int(t), BACKWARD, g.n).dist
            assert np.array_equal(rel.anc[:, i], fd >= 0), f"anc hub {t}"
            assert np.array_equal(rel.des[:, i], bd >= 0), f"des hub {t}"
        assert np.array_equal(
            net.knowledge[12]["in_T_ancestors"], T.ids[rel.anc[12]]
        )

    def test_zero_budget_reaches_only_self(self, net):
        T = VertexSet([0, 5, 11, 29])
        rel0, _ = limited_bfs_all(net, T, h=0, seed=5)
        expect = np.zeros((net.n, 4), dtype=bool)
        for i, t in enumerate(T.ids):
            expect[int(t), i] = True
        assert np.array_equal(rel0.anc, expect)
        assert np.array_equal(rel0.des, expect)

    def test_singleton_hub_exact(self, net):
        rel, _ = limited_bfs_all(net, VertexSet([4]), h=net.d_hop, seed=1)
        fd = bfs_limited(net.g, 4, FORWARD, net.d_hop).dist
        assert np.array_equal(rel.anc[:, 0], fd >= 0)

    def test_tight_budget_sound(self, net):
        # contention can delay tokens past h, never invent relations
        T = VertexSet([0, 5, 11, 29])
        rel, _ = limited_bfs_all(net, T, h=3, seed=5)
        for i, t in enumerate(T.ids):
            fd = bfs_limited(net.g, int(t), FORWARD, 3).dist
            assert not (rel.anc[:, i] & ~(fd >= 0)).any()

    def test_empty_hub_set_rejected(self, net):
        with pytest.raises(ValueError):
            limited_bfs_all(net, VertexSet([]), 5)


class TestBuildSkeleton:
    @pytest.fixture(scope="class")
    def net(self):
        return Network(path_plus_random(40, 30, seed=11))

    def test_alpha_n_samples_everyone(self, net):
        skel, _ = build_skeleton(net, s=2, alpha=40, seed=3)
        assert len(skel.hubs) == 40
        clo = {
            int(t): reachable_set(net.g, int(t), FORWARD, skel.h)
            for t in skel.hubs
        }
        want = {
            (u, v)
            for u in skel.hubs
            for v in skel.hubs
            if u != v and v in clo[u]
        }
        assert set(map(tuple, skel.edges.tolist())) == want

    def test_source_reach_agrees_through_skeleton(self, net):
        skel, _ = build_skeleton(net, s=2, alpha=5, seed=3)
        gl = skel.local()
        sl = skel.index_of(2)
        on_skel = skel.hubs.ids[bfs_limited(gl, sl, FORWARD).dist >= 0]
        on_g = [int(t) for t in skel.hubs if t in reachable_set(net.g, 2)]
        assert sorted(map(int, on_skel)) == sorted(on_g)

    def test_alpha_out_of_range_rejected(self, net):
        with pytest.raises(ValueError):
            build_skeleton(net, 0, alpha=0)


def test_auto_alpha_rule():
    assert auto_alpha(256, 4) == 16
    assert auto_alpha(256, 255) == int(np.ceil(256 ** (2 / 3) / 255 ** (2 / 3)))
    assert auto_alpha(1, 0) == 1


_REACH_CORPUS = [
    path(33),
    cycle(20),
    complete_dag(12),
    path_plus_random(41, 35, seed=2),
    path_plus_random(50, 12, seed=9),
    layered_grid(5, 7),
]


class TestDistrReach:
    def test_single_vertex(self):
        bits, led = distr_reach(Network(Digraph(1, [])), 0, seed=4)
        assert bits.tolist() == [True]
        assert led.redraws == 0

    def test_source_is_sink(self):
        # every edge points away from what s can see: only s marks itself
        net = Network(Digraph(5, [(1, 0), (2, 0), (3, 2), (4, 3)]))
        bits, _ = distr_reach(net, 0, seed=4)
        assert bits.tolist() == [True, False, False, False, False]

    @pytest.mark.parametrize("gi", range(len(_REACH_CORPUS)))
    def test_exact_on_corpus(self, gi):
        g = _REACH_CORPUS[gi]
        net = Network(g)
        for s in [0, g.n // 2, g.n - 1]:
            for seed in [0, 1]:
                bits, led = distr_reach(net, s, seed=seed)
                truth = np.zeros(g.n, dtype=bool)
                truth[reachable_set(g, s).ids] = True
                assert np.array_equal(bits, truth), (s, seed)
                assert led.redraws == 0, (s, seed)
                rep = round_report(led)
                assert rep["total_rounds"] == (
                    rep["sampling_bfs"]
                    + rep["skeleton"]
                    + rep["diam_simulation"]
                    + rep["final_broadcast"]
                )

    def test_deterministic_and_production_mode(self):
        net = Network(path_plus_random(41, 35, seed=2))
        b1, l1 = distr_reach(net, 3, alpha=6, k=3, seed=8)
        b2, l2 = distr_reach(net, 3, alpha=6, k=3, seed=8)
        assert np.array_equal(b1, b2)
        assert round_report(l1) == round_report(l2)
        b3, _ = distr_reach(net, 3, alpha=6, k=3, seed=8, check=False)
        assert np.array_equal(b1, b3)

    def test_concurrent_identical_with_trace(self):
        net = Network(path_plus_random(41, 35, seed=2))
        tr_a, tr_b = [], []
        ba, la = distr_reach(net, 3, alpha=6, k=3, seed=8, trace=tr_a.append)
        bb, lb = distr_reach(
            net, 3, alpha=6, k=3, seed=8, trace=tr_b.append, concurrent=True
        )
        assert np.array_equal(ba, bb)
        assert round_report(la) == round_report(lb)
        assert tr_a == tr_b
        assert len(tr_a) > 0
        assert all(ln.startswith("round=") and " token=" in ln for ln in tr_a)
        assert net.knowledge[7]["reachable_from_s"] == bool(ba[7])

    def test_alpha_string_rejected(self):
        net = Network(path(4))
        with pytest.raises(ValueError, match="alpha"):
            distr_reach(net, 0, alpha="half")

    def test_redraw_exhaustion_raises(self, monkeypatch):
        # a ground truth nothing can match burns all redraws, then raises
        net = Network(path(6))
        monkeypatch.setattr(
            congest_mod, "reachable_set", lambda g, s: VertexSet([])
        )
        with pytest.raises(RuntimeError, match="missed ground truth"):
            distr_reach(net, 0, seed=1)


def test_disconnected_network_rejected():
    with pytest.raises(ValueError, match="disconnected"):
        Network(Digraph(4, [(0, 1)]))
