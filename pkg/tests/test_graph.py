import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphacons.graph import (
    GraphError,
    build_graph,
    complete_graph,
    fig6_graph,
    format_edge_list,
    is_connected,
    laplacian,
    parse_edge_list,
    path_graph,
    random_connected_graph,
    worst_case_graph,
)


def test_path_of_three():
    g = build_graph(3, [(1, 2), (2, 3)])
    assert g.degrees == (1, 2, 1)
    assert g.neighbors_of(2) == (1, 3)


def test_fig6_degrees():
    g = build_graph(6, [(1, 3), (2, 3), (3, 4), (4, 5), (4, 6)])
    assert g.degrees == (1, 1, 3, 3, 1, 1)
    assert g == fig6_graph()


@pytest.mark.parametrize("edges", [[(1, 1)], [(0, 1)], [(1, 3)]])
def test_rejects_bad_edges(edges):
    with pytest.raises(GraphError):
        build_graph(2, edges)


def test_duplicates_and_orientation_merge():
    g = build_graph(3, [(1, 2), (2, 1), (1, 2), (3, 2)])
    assert g.edges == ((1, 2), (2, 3))


def test_connectivity():
    assert is_connected(path_graph(3))
    assert not is_connected(build_graph(4, [(1, 2), (3, 4)]))
    assert is_connected(fig6_graph())


def test_laplacian_examples():
    assert laplacian(path_graph(3)).tolist() == [[1, -1, 0], [-1, 2, -1], [0, -1, 1]]
    assert laplacian(complete_graph(3)).tolist() == [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]
    # node 3 of the six-agent graph touches 1, 2 and 4
    assert laplacian(fig6_graph())[2].tolist() == [-1, -1, 3, -1, 0, 0]


def test_worst_case_graph_structure():
    g = worst_case_graph(5, 2)
    assert g.neighbors_of(1) == (2, 3)
    for i in range(2, 6):
        assert set(g.neighbors_of(i)) - {1} == set(range(2, 6)) - {i}
    assert worst_case_graph(3, 1).degrees == (1, 2, 1)
    degs = worst_case_graph(21, 6).degrees
    assert degs[0] == 6
    assert set(degs[1:7]) == {20}
    assert set(degs[7:]) == {19}


@pytest.mark.parametrize("n,r", [(3, 0), (3, 3), (2, 1)])
def test_worst_case_graph_rejects(n, r):
    with pytest.raises(GraphError):
        worst_case_graph(n, r)


@given(st.integers(3, 12).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n - 1))))
def test_worst_case_graph_connected(nr):
    n, r = nr
    g = worst_case_graph(n, r)
    assert is_connected(g)
    assert g.degree(1) == r


edge_lists = st.integers(2, 8).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.tuples(st.integers(1, n), st.integers(1, n)).filter(lambda e: e[0] != e[1]), max_size=20),
    )
)


@given(edge_lists, st.randoms(use_true_random=False))
def test_permutation_invariance(data, rnd):
    n, edges = data
    shuffled = list(edges)
    rnd.shuffle(shuffled)
    assert build_graph(n, edges) == build_graph(n, shuffled)


@given(edge_lists)
def test_laplacian_properties(data):
    g = build_graph(*data)
    lap = laplacian(g)
    assert (lap.sum(axis=1) == 0).all()
    assert (lap == lap.T).all()
    for i in range(1, g.n + 1):
        assert all(i in g.neighbors_of(j) for j in g.neighbors_of(i))


def test_edge_list_round_trip():
    text = "# six agents\n6\n1 3\n3 2  # trailing comment\n3 4\n4 5\n\n4 6\n"
    g = parse_edge_list(text)
    assert g == fig6_graph()
    assert parse_edge_list(format_edge_list(g)) == g


@pytest.mark.parametrize("text", ["", "3 4\n1 2\n", "3\n1\n", "3\n1 x\n"])
def test_edge_list_errors(text):
    with pytest.raises(GraphError):
        parse_edge_list(text)


@settings(max_examples=30)
@given(st.integers(1, 12), st.integers(0, 10_000))
def test_random_connected_graph(n, seed):
    g = random_connected_graph(n, random.Random(seed))
    assert g.n == n and is_connected(g)


def test_laplacian_dtype():
    assert laplacian(fig6_graph()).dtype == np.int64
