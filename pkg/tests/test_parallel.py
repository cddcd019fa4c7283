"""Bounded-search recursion and the repeated-run diameter loop.

The two engines behind parallel_diam (closure-driven fast path, literal
kernel replay) must agree on edges, metrics and per-unit event tables;
that equality is the strongest check here and runs on both DAG and
cyclic inputs. Soundness always goes through the closure oracle.
"""

import math

import numpy as np
import pytest

from hopshort import generators as gen
from hopshort.graph import (
    BACKWARD,
    FORWARD,
    Digraph,
    reachable_set,
    transitive_closure_oracle,
)
from hopshort.parallel import (
    C_LOCAL,
    KAPPA_SCALE,
    ParCtx,
    ScaleOverride,
    _diam_engine,
    compute_search_scale,
    depth_account,
    kappa_bound,
    kappa_interval,
    parallel_diam,
    parallel_sc,
    sample_kappa,
    sample_probability,
)


class TestBudgetParameters:
    def test_search_scale_exact_power_of_two_case(self):
        # sqrt(2)^log_2(2) * sqrt(2) * log2(2)^2 = 2, no float dust
        assert compute_search_scale(2, 2) == 200

    def test_search_scale_rejects_degenerate(self):
        with pytest.raises(ValueError):
            compute_search_scale(1, 2)
        with pytest.raises(ValueError):
            compute_search_scale(8, 1)

    def test_kappa_bound_at_zero(self):
        assert kappa_bound(1024, 16, 0) == KAPPA_SCALE * 16 * 16 * 10.0**5

    def test_kappa_bound_decays(self):
        vals = [kappa_bound(1024, 16, i) for i in range(6)]
        assert all(a > b > 0 for a, b in zip(vals, vals[1:]))

    def test_kappa_interval_ordering(self):
        for r in range(4):
            lo, hi = kappa_interval(4096, 8, r)
            assert 1 <= lo <= hi

    def test_sample_kappa_in_interval_and_deterministic(self):
        lo, hi = kappa_interval(1024, 16, 1)
        d1 = sample_kappa(1024, 16, 1, seed=42)
        d2 = sample_kappa(1024, 16, 1, seed=42)
        assert d1 == d2
        assert not d1.degenerate
        assert lo <= d1.value <= hi

    def test_sample_probability(self):
        assert sample_probability(1024, 16, 0) == 1.0
        expect = 10 * 2 * 20 / 2**20
        assert sample_probability(2**20, 2, 0) == pytest.approx(expect)
        assert sample_probability(1, 5, 0) == 0.0

    def test_depth_account(self):
        assert depth_account(5, 2, 8) == 5 + 3 * 2 + C_LOCAL
        assert depth_account(0, 0, 1) == C_LOCAL
        assert depth_account(7, 3, 1) == 7 + C_LOCAL

    def test_scale_override_validation(self):
        with pytest.raises(ValueError):
            ScaleOverride(D=0, kappa=1)
        with pytest.raises(ValueError):
            ScaleOverride(D=1, kappa=0)

    def test_root_context(self):
        ctx = ParCtx.root(1024, 16, seed=3)
        assert (ctx.r, ctx.r_fringe) == (0, 0)
        assert ctx.D == compute_search_scale(1024, 16)
        assert ctx.kappa == sample_kappa(1024, 16, 0, 3).value
        ov = ScaleOverride(D=5, kappa=7)
        ctx2 = ParCtx.root(1024, 16, seed=3, scale_override=ov)
        assert (ctx2.D, ctx2.kappa) == (5, 7)


@pytest.mark.parametrize("trial", range(30))
def test_parallel_sc_sound_on_random_dags(trial):
    rng = np.random.default_rng(trial)
    n = int(rng.integers(2, 21))
    p = float(rng.uniform(0.05, 0.3))
    g = gen.random_dag(n, p, int(rng.integers(0, 10**6)))
    res = parallel_sc(g, ParCtx.root(max(g.n, 2), 2, seed=trial))
    clos = transitive_closure_oracle(g)
    for u, v in res.shortcuts.edges():
        assert clos[u, v], f"unsound {u}->{v}"


def test_override_ring_invariant_on_cycle():
    g = gen.cycle(32)
    ov = ScaleOverride(D=2, kappa=2)
    res = parallel_sc(
        g, ParCtx.root(32, 2, seed=3, scale_override=ov), scale_override=ov
    )
    assert len(res.fringes) > 0
    for fr in res.fringes:
        v = fr.owner
        hi_f = reachable_set(g, v, FORWARD, (ov.kappa + 1) * ov.D)
        hi_b = reachable_set(g, v, BACKWARD, (ov.kappa + 1) * ov.D)
        lo_f = reachable_set(g, v, FORWARD, (ov.kappa - 1) * ov.D)
        lo_b = reachable_set(g, v, BACKWARD, (ov.kappa - 1) * ov.D)
        for w in fr.members:
            assert (w in hi_f) or (w in hi_b), f"{w} beyond outer radius of {v}"
            assert (w not in lo_f) and (w not in lo_b), f"{w} inside core of {v}"
    clos = transitive_closure_oracle(g)
    for u, v in res.shortcuts.edges():
        assert clos[u, v]


@pytest.mark.parametrize(
    "family,n,k,sd",
    [
        ("mixed", 12, 2, 1),
        ("mixed", 16, 3, 2),
        ("mixed", 24, 2, 3),
        ("mixed", 32, 4, 4),
        ("cycle", 14, 2, 9),
        ("cycle", 20, 3, 11),
    ],
)
def test_fast_engine_matches_literal(family, n, k, sd):
    if family == "mixed":
        g = gen.path_plus_random(n, max(2, n // 4), sd)
    else:
        g = gen.cycle(n)
    sA, mA, eA = _diam_engine(g, k, seed=sd, collect_events=True)
    sB, mB, eB = _diam_engine(
        g, k, seed=sd, collect_events=True, _force_literal=True
    )
    assert np.array_equal(sA.edges(), sB.edges())
    assert mA.as_dict() == mB.as_dict()
    assert len(eA) == len(eB)
    for va, vb in zip(eA, eB):
        # event vectors stop at each engine's own deepest unit; pad out
        top = max(va.size, vb.size)
        pa = np.zeros(top, dtype=np.int64)
        pa[: va.size] = va
        pb = np.zeros(top, dtype=np.int64)
        pb[: vb.size] = vb
        assert np.array_equal(pa, pb)


class TestParallelDiam:
    def test_deterministic_and_sound(self):
        g = gen.path_plus_random(40, 12, 5)
        s1, m1 = parallel_diam(g, 2, seed=9)
        s2, m2 = parallel_diam(g, 2, seed=9)
        assert np.array_equal(s1.edges(), s2.edges())
        assert m1.as_dict() == m2.as_dict()
        clos = transitive_closure_oracle(g)
        for u, v in s1.edges():
            assert clos[u, v]

    def test_diagnostics_show_monotone_collapse(self):
        g = gen.path_plus_random(40, 12, 5)
        diag = {}
        parallel_diam(g, 2, seed=10, diagnostics=diag)
        dd = diag["outer_diameters"]
        assert all(dd[i + 1] <= dd[i] for i in range(len(dd) - 1))
        assert dd[-1] == 1
        assert diag["aborted"] == []

    def test_work_limit_aborts_every_run(self):
        g = gen.path(16)
        diag = {}
        s, m = parallel_diam(g, 2, seed=0, work_limit=0.5, diagnostics=diag)
        assert m.aborted_runs > 0
        assert len(diag["aborted"]) == m.aborted_runs
        assert len(s) == 0

    def test_shortcut_limit_aborts(self):
        g = gen.path(16)
        _, m = parallel_diam(g, 2, seed=0, shortcut_limit=0.5)
        assert m.aborted_runs > 0

    def test_depth_positive_and_accounted(self):
        g = gen.path(24)
        _, m = parallel_diam(g, 2, seed=1)
        assert m.logical_depth >= C_LOCAL
        assert m.work == m.edge_scans + m.label_assignments + m.comparisons
