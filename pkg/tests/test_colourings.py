import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bipramsey.colourings import (
    HostColouring,
    colour_subgraph,
    extremal_three_split,
    monochromatic,
    random_colouring,
    read_colouring,
    write_colouring,
)
from bipramsey.errors import FormatError, InvalidColourError, InvalidSizeError


def test_three_split_sizes():
    c = extremal_three_split(4)
    assert (c.L, c.R, c.r) == (3, 3, 3)
    # colour depends only on the right vertex
    assert all(len(set(c.colour[:, v])) == 1 for v in range(3))
    assert sorted(c.colour[0]) == [1, 2, 3]
    c6 = extremal_three_split(6)
    assert (c6.L, c6.R) == (6, 6)
    assert [int(x) for x in c6.colour[0]] == [1, 1, 2, 2, 3, 3]


def test_three_split_odd_rejected():
    with pytest.raises(InvalidSizeError):
        extremal_three_split(5)


def test_three_split_colour_one_is_a_star():
    edges = colour_subgraph(extremal_three_split(4), 1)
    assert len(edges) == 3
    assert {v for _, v in edges} == {0}


@pytest.mark.parametrize("n", [4, 6, 8])
def test_three_split_components_small(n):
    import networkx as nx

    c = extremal_three_split(n)
    for s in (1, 2, 3):
        G = nx.Graph()
        G.add_edges_from((("l", u), ("r", v)) for u, v in colour_subgraph(c, s))
        for comp in nx.connected_components(G):
            assert sum(1 for side, _ in comp if side == "r") <= n // 2 - 1


def test_random_colouring_single_edge():
    c = random_colouring(1, 1, 0)
    assert c.colour.tolist() == [[1]]


def test_random_colouring_deterministic():
    assert random_colouring(3, 3, 7) == random_colouring(3, 3, 7)
    assert random_colouring(12, 3, 7) != random_colouring(12, 3, 8)


def test_random_colouring_density():
    c = random_colouring(50, 3, 1)
    for s in (1, 2, 3):
        dens = len(colour_subgraph(c, s)) / 2500
        assert abs(dens - 1 / 3) <= 0.05


def test_colour_subgraph_partition_and_errors():
    c = random_colouring(7, 3, 2)
    parts = [colour_subgraph(c, s) for s in (1, 2, 3)]
    assert sum(map(len, parts)) == 49
    assert len(frozenset().union(*parts)) == 49
    assert colour_subgraph(monochromatic(3, 3, 3, 1), 2) == frozenset()
    with pytest.raises(InvalidColourError):
        colour_subgraph(c, 4)
    with pytest.raises(InvalidColourError):
        colour_subgraph(c, 0)


def test_host_colouring_rejects_bad_colours():
    with pytest.raises(InvalidColourError):
        HostColouring(2, 2, 2, np.array([[1, 3], [1, 1]]))


def test_colouring_is_read_only():
    c = random_colouring(3, 2, 0)
    with pytest.raises(ValueError):
        c.colour[0, 0] = 2


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 4), st.integers(0, 10**6))
def test_colouring_round_trip(L, R, r, seed):
    rng = np.random.default_rng(seed)
    c = HostColouring(L, R, r, rng.integers(1, r + 1, size=(L, R)))
    text = write_colouring(c)
    assert read_colouring(text) == c
    assert write_colouring(read_colouring(text)) == text


def test_colouring_writer_order():
    text = write_colouring(HostColouring(2, 2, 2, np.array([[1, 2], [2, 1]])))
    assert text == "bipcol 2 2 2\n1 1 1\n1 2 2\n2 1 2\n2 2 1\n"


@pytest.mark.parametrize("text", [
    "bipcol 1 2 2\n1 1 1\n",  # missing pair
    "bipcol 1 1 2\n1 1 1\n1 1 2\n",  # duplicate pair
    "bipcol 1 1 2\n1 1 3\n",  # colour out of range
    "bipcol 1 1 2\n2 1 1\n",  # pair out of range
    "bicol 1 1 2\n1 1 1\n",  # header
    "",
])
def test_colouring_reader_rejects(text):
    with pytest.raises(FormatError):
        read_colouring(text)


def test_reader_skips_certificate_header():
    c = extremal_three_split(4)
    assert read_colouring("certificate ramsey-lower 4 3\n" + write_colouring(c)) == c
