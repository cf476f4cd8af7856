import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import graph_from_documents
from rchm.dowker import (
    DowkerComplex,
    center,
    connected_components,
    degree_histogram,
    degree_values,
    enumerate_simplices,
    simplex_degree,
)


def test_single_document_triangle():
    cx = enumerate_simplices(graph_from_documents([[0, 1, 2]]), 2)
    expected = [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]
    assert sorted(s for s, _ in cx) == sorted(expected)
    assert all(c == 1 for _, c in cx)


def test_repeated_pair_counts_witnesses():
    cx = enumerate_simplices(graph_from_documents([[0, 1], [0, 1]]), 1)
    assert cx.witness_count((1, 0)) == 2


def test_author_cap_excludes_document():
    g = graph_from_documents([list(range(25)), [0, 30]])
    cx = enumerate_simplices(g, 1, max_witness_arity=20)
    assert cx.count(0) == 2 and cx.count(1) == 1
    assert cx.n_excluded_witnesses == 1
    assert enumerate_simplices(g, 1, max_witness_arity=None).count(1) == 300 + 1


def _brute_force(docs, max_dim):
    found = {}
    authors = sorted({a for d in docs for a in d})
    for k in range(1, max_dim + 2):
        for combo in itertools.combinations(authors, k):
            w = sum(1 for d in docs if set(combo) <= set(d))
            if w:
                found[combo] = w
    return found


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(0, 7), min_size=1, max_size=5, unique=True), max_size=8),
       st.integers(0, 3))
def test_matches_brute_force(docs, max_dim):
    g = graph_from_documents(docs, n_authors=8)
    cx = enumerate_simplices(g, max_dim, max_witness_arity=None)
    assert dict(cx) == _brute_force(docs, max_dim)
    # downward closure, with faces witnessed at least as often as cofaces
    for s, c in cx:
        for f in itertools.combinations(s, len(s) - 1):
            if f:
                assert cx.witness_count(f) >= c
    assert cx.count(0) == int(np.count_nonzero(g.p_degrees()))


def test_simplex_degree():
    g = graph_from_documents([[0, 1], [0, 2], [0, 1, 2]])
    assert simplex_degree(g, (0,)) == 3
    assert simplex_degree(g, (0, 1)) == 2
    assert simplex_degree(g, (1, 2)) == 1
    assert simplex_degree(graph_from_documents([[0], [1]]), (0, 1)) == 0


def test_center_rules():
    g = graph_from_documents([[0, 1, 2]])
    cx = enumerate_simplices(g, 2, vertex_marks=[0.5, 0.2, 0.9], vertex_positions=[3.0, 7.0, 1.0])
    assert center(cx, (0, 1, 2)) == 7.0
    assert center(cx, (2,)) == 1.0
    tied = enumerate_simplices(g, 2, vertex_marks=[0.2, 0.2, 0.9], vertex_positions=[3.0, 7.0, 1.0])
    assert center(tied, (0, 1)) == 3.0


def test_degree_kinds():
    single = graph_from_documents([[0], [1], [2, 3], [4]])
    assert degree_histogram(single, "Delta0").counts == {1: 5}
    cx = enumerate_simplices(graph_from_documents([[0, 1, 2]]), 2)
    assert degree_histogram(cx, "coface1").counts == {1: 3}
    assert sorted(degree_values(cx, "coface0")) == [2, 2, 2]
    assert sorted(degree_values(cx, "Delta0_prime")) == [3]
    with pytest.raises(ValueError):
        degree_values(cx, "Delta7")


def test_components():
    assert connected_components(graph_from_documents([[0, 1], [2, 3, 4]])) == (2, 3)
    assert connected_components(graph_from_documents([[0, 1], [1, 2], [2, 3]])) == (1, 4)
    cx = enumerate_simplices(graph_from_documents([[0, 1], [2, 3, 4]]), 1)
    assert connected_components(cx) == (2, 3)


def test_complex_file_round_trip(tmp_path):
    cx = enumerate_simplices(graph_from_documents([[0, 1, 2], [1, 3]]), 2)
    cx.write(tmp_path / "c.csv")
    back = DowkerComplex.read(tmp_path / "c.csv", max_dim=2)
    assert dict(back) == dict(cx)
    hist = degree_histogram(cx, "Delta0")
    hist.write(tmp_path / "h.csv")
    assert (tmp_path / "h.csv").read_text() == "value,count\n1,3\n2,1\n"
