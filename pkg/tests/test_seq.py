"""Sequential shortcut recursion: single-step pieces, then whole runs.

The single-step functions (election, labeling, partition) get exact
expected values on tiny graphs; whole runs are checked against the
closure oracle and against each other (whp wrapper vs plain runs).
"""

import numpy as np
import pytest

from hopshort.generators import path, random_dag
from hopshort.graph import Digraph, VertexSet
from hopshort.rng import STREAM_CELL, STREAM_REP, derive
from hopshort.seq import (
    SAMPLE_FACTOR,
    SeqCtx,
    default_repetitions,
    hard_stop_level,
    label_from_shortcutter,
    partition_by_labels,
    sample_probability,
    sample_shortcutters,
    seq_shortcut,
    seq_shortcut_whp,
)
from hopshort.shortcuts import ANC, DES, ELIM, Label

from helpers import bfs_dists, closure_squaring, union_with


class TestRecursionParameters:
    @pytest.mark.parametrize(
        "n_top,k,expect",
        [(1, 2, 1), (2, 2, 2), (8, 2, 4), (9, 3, 3), (27, 3, 4), (50, 7, 3)],
    )
    def test_hard_stop_level(self, n_top, k, expect):
        assert hard_stop_level(n_top, k) == expect

    def test_hard_stop_level_rejects_small_k(self):
        with pytest.raises(ValueError):
            hard_stop_level(8, 1)

    def test_sample_probability(self):
        assert SAMPLE_FACTOR == 20
        expect = 20 * 2 * np.log2(1000) / 1000
        assert sample_probability(1000, 2, 0) == pytest.approx(expect)
        assert sample_probability(8, 2, 0) == 1.0
        assert sample_probability(1, 2, 0) == 0.0
        # each level multiplies the numerator by k
        p0 = sample_probability(10**6, 3, 0)
        p1 = sample_probability(10**6, 3, 1)
        assert p1 == pytest.approx(3 * p0)

    def test_ctx_validation(self):
        with pytest.raises(ValueError):
            SeqCtx(0, 2, 0, 1)
        with pytest.raises(ValueError):
            SeqCtx(8, 1, 0, 1)
        with pytest.raises(ValueError):
            SeqCtx(8, 2, 5, 1)  # past hard stop 4

    def test_ctx_child_derivation(self):
        ctx = SeqCtx(100, 2, 0, seed=9)
        child = ctx.child(3)
        assert child.r == 1
        assert child.seed == derive(9, STREAM_CELL, 3, 1)
        assert child.n_top == 100 and child.k == 2


class TestSampling:
    def test_election_ignores_cell_enumeration(self):
        ctx = SeqCtx(1000, 2, 0, seed=5)
        assert 0.0 < ctx.p_r < 1.0
        full = sample_shortcutters(VertexSet(np.arange(200)), ctx)
        sub_ids = [3, 7, 11, 42, 99]
        sub = sample_shortcutters(VertexSet(sub_ids), ctx)
        want = {v for v in sub_ids if v in full}
        assert {int(v) for v in sub} == want

    def test_certain_election_returns_input(self):
        ctx = SeqCtx(8, 2, 0, seed=0)
        vs = VertexSet([1, 4, 6])
        assert list(sample_shortcutters(vs, ctx)) == list(vs)

    def test_empty_input(self):
        ctx = SeqCtx(1000, 2, 0, seed=5)
        assert len(sample_shortcutters(VertexSet([]), ctx)) == 0


class TestSingleStep:
    def test_labels_and_pairs_mid_path(self):
        g = path(5)
        labels, pairs = label_from_shortcutter(g, 2)
        assert labels == [
            Label(0, 2, ANC),
            Label(1, 2, ANC),
            Label(2, 2, ELIM),
            Label(3, 2, DES),
            Label(4, 2, DES),
        ]
        assert pairs == [(2, 2), (2, 3), (2, 4), (0, 2), (1, 2)]

    def test_bridge_pairs_give_two_hop_endpoints(self):
        g = path(6)
        _, pairs = label_from_shortcutter(g, 3)
        assert bfs_dists(union_with(g, pairs), 0)[5] <= 2

    def test_partition_canonical_order(self):
        g = path(5)
        labels, _ = label_from_shortcutter(g, 2)
        by_vertex = {lab.vertex: [lab] for lab in labels}
        cells = partition_by_labels(VertexSet(np.arange(5)), by_vertex)
        assert [list(c) for c in cells] == [[0, 1], [3, 4]]  # elim 2 dropped

    def test_partition_unlabeled_cell_first(self):
        labels = {1: [Label(1, 7, DES)], 2: [Label(2, 7, DES)]}
        cells = partition_by_labels(VertexSet([0, 1, 2]), labels)
        assert [list(c) for c in cells] == [[0], [1, 2]]


@pytest.mark.parametrize("stride", [0, 1, 2])
def test_seq_shortcut_sound_on_corpus(small_corpus, stride):
    for name, g in small_corpus[stride::3]:
        shortcuts, metrics = seq_shortcut(g, 2, seed=11)
        clos = closure_squaring(g)
        edges = shortcuts.edges()
        for u, v in edges:
            assert clos[u, v], (name, u, v)
        # sound edges can never grow the closure
        assert np.array_equal(closure_squaring(union_with(g, edges)), clos), name
        assert metrics.shortcuts_added == len(shortcuts)


def test_seq_shortcut_deterministic():
    g = random_dag(40, 0.1, seed=3)
    e1 = seq_shortcut(g, 3, seed=5)[0].edges()
    e2 = seq_shortcut(g, 3, seed=5)[0].edges()
    assert np.array_equal(e1, e2)


def test_seq_shortcut_empty_graph():
    shortcuts, metrics = seq_shortcut(Digraph(4, []), 2, seed=0)
    assert len(shortcuts) == 0
    assert metrics.edge_scans == 0


def test_subproblem_log_structure():
    g = random_dag(30, 0.1, seed=7)
    log = []
    seq_shortcut(g, 2, seed=4, subproblem_log=log)
    assert log[0][0] == 0
    assert sorted(int(v) for v in log[0][1]) == list(range(30))
    by_level = {}
    for r, members in log:
        assert 0 <= r <= hard_stop_level(30, 2)
        by_level.setdefault(r, []).append({int(v) for v in members})
    for r, groups in by_level.items():
        seen = set()
        for grp in groups:
            assert not (grp & seen), f"level {r} cells overlap"
            seen |= grp
        if r + 1 in by_level:
            nxt = set().union(*by_level[r + 1])
            assert nxt <= seen, f"level {r + 1} leaks new vertices"


class TestWhpWrapper:
    def test_first_repetition_matches_plain_run(self):
        g = random_dag(35, 0.12, seed=1)
        whp = seq_shortcut_whp(g, 2, repetitions=1, seed=6)[0].edges()
        plain = seq_shortcut(g, 2, derive(6, STREAM_REP, 0))[0].edges()
        assert np.array_equal(whp, plain)

    def test_more_repetitions_grow_the_union(self):
        g = random_dag(35, 0.12, seed=1)
        s1, m1 = seq_shortcut_whp(g, 2, repetitions=1, seed=6)
        s2, m2 = seq_shortcut_whp(g, 2, repetitions=3, seed=6)
        one = set(map(tuple, s1.edges().tolist()))
        three = set(map(tuple, s2.edges().tolist()))
        assert one <= three
        assert m2.edge_scans > m1.edge_scans

    def test_default_repetitions(self):
        assert default_repetitions(1024) == 10
        assert default_repetitions(3) == 2
        assert default_repetitions(1) == 1

    def test_validation(self):
        g = path(4)
        with pytest.raises(ValueError):
            seq_shortcut_whp(g, 1)
        with pytest.raises(ValueError):
            seq_shortcut_whp(g, 2, repetitions=0)
        with pytest.raises(ValueError):
            seq_shortcut(g, 1, seed=0)
