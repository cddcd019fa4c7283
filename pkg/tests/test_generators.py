"""Generator families: exact small instances, structure, determinism."""

import numpy as np
import pytest

from hopshort import generators
from hopshort.graph import exact_diameter, strongly_connected_components


def edge_set(g):
    return {tuple(e) for e in g.edges()}


def test_path_exact():
    g = generators.path(5)
    assert edge_set(g) == {(0, 1), (1, 2), (2, 3), (3, 4)}
    assert exact_diameter(g) == 4
    assert generators.path(1).m == 0


def test_cycle_exact():
    g = generators.cycle(4)
    assert edge_set(g) == {(0, 1), (1, 2), (2, 3), (3, 0)}
    assert exact_diameter(g) == 3
    assert len(set(strongly_connected_components(g).tolist())) == 1


def test_complete_dag():
    g = generators.complete_dag(6)
    assert g.m == 15
    assert exact_diameter(g) == 1
    assert edge_set(generators.complete_dag(3)) == {(0, 1), (0, 2), (1, 2)}


def test_random_dag_extremes():
    assert generators.random_dag(10, 0.0, seed=3).m == 0
    g = generators.random_dag(6, 1.0, seed=3)
    assert g.m == 15 and exact_diameter(g) == 1


def test_random_dag_is_acyclic_and_seeded():
    for seed in range(8):
        g = generators.random_dag(25, 0.2, seed=seed)
        comp = strongly_connected_components(g)
        assert len(set(comp.tolist())) == g.n
        same = generators.random_dag(25, 0.2, seed=seed)
        assert np.array_equal(g.edges(), same.edges())
    a = generators.random_dag(25, 0.2, seed=0)
    b = generators.random_dag(25, 0.2, seed=1)
    assert not np.array_equal(a.edges(), b.edges())


def test_random_dag_edges_point_forward():
    g = generators.random_dag(15, 0.3, seed=7)
    e = g.edges()
    assert (e[:, 0] < e[:, 1]).all()


def test_layered_grid_shape():
    g = generators.layered_grid(3, 4)
    assert g.n == 12
    # every edge goes to the next layer
    e = g.edges()
    assert ((e[:, 1] // 3) - (e[:, 0] // 3) == 1).all()
    assert exact_diameter(g) == 3
    assert generators.layered_grid(1, 6).m == 5


def test_path_plus_random_contains_backbone():
    g = generators.path_plus_random(12, 5, seed=4)
    es = edge_set(g)
    for u in range(11):
        assert (u, u + 1) in es
    assert g.m == 11 + 5
    assert np.array_equal(
        g.edges(), generators.path_plus_random(12, 5, seed=4).edges()
    )


def test_path_plus_random_extras_skip_existing():
    # extras never duplicate the backbone, stay in forward direction
    g = generators.path_plus_random(10, 8, seed=1)
    e = g.edges()
    assert (e[:, 0] < e[:, 1]).all()
    assert g.m == 9 + 8


def test_families_registry():
    assert set(generators.FAMILIES) == {
        "path", "cycle", "complete_dag", "random_dag",
        "layered_grid", "path_plus_random",
    }
    assert generators.FAMILIES["path"] is generators.path


def test_single_vertex_edge_cases():
    assert generators.path(1).m == 0
    assert generators.complete_dag(1).m == 0
    # the 1-cycle is the self-loop, which Digraph keeps
    assert generators.cycle(1).m == 1
    with pytest.raises(ValueError):
        generators.path(0)
    with pytest.raises(ValueError):
        generators.random_dag(5, 1.5, seed=0)
    with pytest.raises(ValueError):
        generators.path_plus_random(3, 99, seed=0)
