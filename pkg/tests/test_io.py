"""Edge-list round trips and malformed-input rejection."""

import numpy as np
import pytest

from helpers import corpus_graph
from hopshort.io import read_edge_list, write_edge_list
from hopshort import generators


def test_round_trip(tmp_path):
    for i in range(12):
        _, g = corpus_graph(i)
        p = tmp_path / f"g{i}.txt"
        write_edge_list(g, p)
        back = read_edge_list(p)
        assert back.n == g.n
        assert np.array_equal(back.edges(), g.edges())


def test_format_is_header_then_edges(tmp_path):
    p = tmp_path / "g.txt"
    write_edge_list(generators.path(3), p)
    assert p.read_text() == "3 2\n0 1\n1 2\n"


def test_comments_and_blank_lines_ignored(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# a graph\n3 2\n\n0 1  # forward\n1 2\n")
    g = read_edge_list(p)
    assert g.n == 3 and g.m == 2


@pytest.mark.parametrize(
    "text,match",
    [
        ("", "empty"),
        ("3\n0 1\n", "header"),
        ("3 2\n0 1\n", "announces"),
        ("3 1\n0 1\n1 2\n", "announces"),
        ("3 1\n0 one\n", "integer"),
        ("3 1\n0 7\n", "out of range"),
    ],
)
def test_malformed_inputs_rejected(tmp_path, text, match):
    p = tmp_path / "bad.txt"
    p.write_text(text)
    with pytest.raises(ValueError, match=match):
        read_edge_list(p)
