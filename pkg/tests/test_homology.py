import numpy as np
import pytest

from conftest import closure, dense_betti, graph_from_documents, random_documents
from rchm.dowker import DowkerComplex, enumerate_simplices
from rchm.homology import (
    betti_numbers,
    betti_numbers_by_rank,
    boundary_matrix,
    essential_counts,
    filtered_complex,
    persistence_diagram,
    read_diagram,
    write_diagram,
)

SQUARE = [[0, 1], [1, 2], [2, 3], [0, 3]]


def test_filled_triangle():
    assert betti_numbers(enumerate_simplices(graph_from_documents([[0, 1, 2]]), 2), 1) == [1, 0]


def test_hollow_square():
    cx = enumerate_simplices(graph_from_documents(SQUARE), 2)
    assert betti_numbers(cx, 1) == [1, 1]
    assert dense_betti(closure(SQUARE, 2), 1) == [1, 1]


def test_empty_complex():
    cx = DowkerComplex(2, [{}, {}, {}])
    assert betti_numbers(cx, 1) == [0, 0]


def test_requires_enough_dimensions():
    with pytest.raises(ValueError):
        betti_numbers(enumerate_simplices(graph_from_documents(SQUARE), 1), 1)


def test_boundary_squares_to_zero(rng):
    docs = random_documents(rng, 8, 6, 4)
    cx = enumerate_simplices(graph_from_documents(docs), 3, None)
    d1 = boundary_matrix(cx, 1).to_dense().astype(int)
    d2 = boundary_matrix(cx, 2).to_dense().astype(int)
    d3 = boundary_matrix(cx, 3).to_dense().astype(int)
    assert not np.any((d1 @ d2) % 2)
    assert not np.any((d2 @ d3) % 2)


def test_random_complexes_against_dense_rank(rng):
    for _ in range(60):
        docs = random_documents(rng, int(rng.integers(3, 9)), int(rng.integers(1, 7)), 4)
        cx = enumerate_simplices(graph_from_documents(docs), 3, None)
        expected = dense_betti(closure(docs, 3), 2)
        assert betti_numbers(cx, 2) == expected
        assert betti_numbers_by_rank(cx, 2) == expected


def test_euler_characteristic(rng):
    for _ in range(30):
        docs = random_documents(rng, 7, int(rng.integers(1, 6)), 5)
        cx = enumerate_simplices(graph_from_documents(docs), 5, None)
        chi = sum((-1) ** m * cx.count(m) for m in range(6))
        assert chi == sum((-1) ** m * b for m, b in enumerate(betti_numbers(cx, 4)))


def test_dowker_duality(rng):
    for _ in range(30):
        docs = random_documents(rng, int(rng.integers(3, 8)), int(rng.integers(2, 8)), 4)
        g = graph_from_documents(docs)
        left = betti_numbers(enumerate_simplices(g, 2, None), 1)
        right = betti_numbers(enumerate_simplices(g.transpose(), 2, None), 1)
        assert left == right


def test_persistence_of_pair_and_square(tmp_path):
    g = graph_from_documents([[0, 1]] * 3)
    filt = filtered_complex(g, 1)
    assert set(filt.values) == {3}
    pairs = persistence_diagram(filt)
    assert [(p.dimension, p.birth, p.death) for p in pairs if p.birth != p.death] == [(0, 3, 0)]

    square = filtered_complex(graph_from_documents(SQUARE * 2), 1)
    pairs = persistence_diagram(square)
    assert essential_counts(pairs, 1) == [1, 1]
    loop = [p for p in pairs if p.dimension == 1]
    assert [(p.birth, p.death) for p in loop] == [(2, 0)]

    write_diagram(pairs, tmp_path / "d.csv")
    assert (tmp_path / "d.csv").read_text().splitlines()[0] == "birth,death,dimension"
    assert read_diagram(tmp_path / "d.csv") == [
        type(p)(p.dimension, float(p.birth), float(p.death)) for p in pairs
    ]


def test_filling_kills_loop_at_lower_count():
    # outer edges reach count 3, the diagonal 2 and both triangles 1: the square
    # appears at 3, the diagonal splits it at 2 and the triangles fill both halves
    docs = SQUARE * 2 + [[0, 1, 2], [0, 2, 3]]
    pairs = persistence_diagram(filtered_complex(graph_from_documents(docs), 1))
    loop = [(p.birth, p.death) for p in pairs if p.dimension == 1 and p.birth != p.death]
    assert loop == [(3, 1), (2, 1)]


def test_essential_counts_match_betti(rng):
    for _ in range(20):
        docs = random_documents(rng, 7, 6, 3)
        g = graph_from_documents(docs + docs[:2])
        pairs = persistence_diagram(filtered_complex(g, 1, None))
        assert essential_counts(pairs, 1) == betti_numbers(enumerate_simplices(g, 2, None), 1)
