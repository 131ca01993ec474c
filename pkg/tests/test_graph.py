from __future__ import annotations

import gzip

import numpy as np
import pytest

from cograd.graph import (
    Graph,
    GsetFormatError,
    generate_d_regular,
    generate_erdos_renyi,
    load_gset,
    parse_gset,
    renormalized_adjacency,
    sample_observed_subgraph,
    write_gset,
)


def test_edges_are_canonical():
    g = Graph(4, [(2, 1), (3, 0), (0, 1, 2.5)])
    assert g.edges == ((0, 1, 2.5), (0, 3, 1.0), (1, 2, 1.0))
    assert g.m == 3
    assert list(g.neighbors(1)) == [0, 2]
    assert g.has_edge(1, 0) and g.has_edge(0, 3) and not g.has_edge(2, 3)


def test_degree_is_weighted():
    g = Graph(3, [(0, 1, 2.0), (1, 2, -1.0)])
    assert np.allclose(g.degree, [2.0, 1.0, -1.0])


def test_construction_rejects_bad_edges():
    with pytest.raises(ValueError, match="self-loop"):
        Graph(3, [(1, 1)])
    with pytest.raises(ValueError, match="out of range"):
        Graph(3, [(0, 3)])
    with pytest.raises(ValueError, match="duplicate"):
        Graph(3, [(0, 1), (1, 0)])


def test_adjacency_matches_edges():
    g = Graph(3, [(0, 1, 2.0), (1, 2, 3.0)])
    a = g.adjacency().toarray()
    assert np.array_equal(a, [[0, 2, 0], [2, 0, 3], [0, 3, 0]])


def test_parse_gset_basic():
    g = parse_gset("3 2\n1 2 5\n2 3 -1\n")
    assert g.n == 3
    assert g.edges == ((0, 1, 5.0), (1, 2, -1.0))


def test_parse_gset_default_weight():
    g = parse_gset("2 1\n1 2\n")
    assert g.edges == ((0, 1, 1.0),)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("", "line 1"),
        ("3\n", "line 1"),
        ("2 1\n1 2 3 4\n", "line 2"),
        ("2 1\n1 1\n", "self-loop"),
        ("2 1\n1 3\n", "out of range"),
        ("2 2\n1 2\n2 1\n", "duplicate"),
        ("2 2\n1 2\n", "declares 2 edges"),
        ("2 1\n1 x\n", "line 2"),
    ],
)
def test_parse_gset_errors(text, fragment):
    with pytest.raises(GsetFormatError, match=fragment):
        parse_gset(text)


def test_write_parse_round_trip():
    for seed in range(5):
        rng = np.random.default_rng(seed)
        g = generate_erdos_renyi(30, 0.2, seed=seed)
        # reweight to random integers, negative allowed
        w = rng.integers(-5, 6, g.m)
        w[w == 0] = 1
        g = Graph(g.n, zip(g.edge_u, g.edge_v, w))
        assert parse_gset(write_gset(g)) == g


def test_write_parse_round_trip_fractional_weights():
    g = Graph(3, [(0, 1, 0.125), (1, 2, -2.5)])
    assert "1 2 0.125" in write_gset(g)
    assert parse_gset(write_gset(g)) == g


def test_load_gset_gzip(tmp_path):
    g = generate_d_regular(12, 3, seed=0)
    plain = tmp_path / "g.txt"
    plain.write_text(write_gset(g))
    zipped = tmp_path / "g.txt.gz"
    zipped.write_bytes(gzip.compress(write_gset(g).encode()))
    assert load_gset(plain) == g
    assert load_gset(zipped) == g


def test_d_regular_degrees_and_determinism():
    for n, d, seed in [(20, 3, 0), (50, 5, 1), (11, 4, 2)]:
        g = generate_d_regular(n, d, seed)
        assert g.n == n and g.m == n * d // 2
        assert np.all(g.degree == d)
        assert generate_d_regular(n, d, seed) == g
    assert generate_d_regular(10, 3, seed=0) != generate_d_regular(10, 3, seed=1)


def test_d_regular_complete_graph():
    # d = n-1 leaves exactly one simple graph; restarts must find it
    for seed in range(3):
        g = generate_d_regular(4, 3, seed)
        assert g.edges == (
            (0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0),
            (1, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0),
        )


def test_d_regular_edge_cases():
    assert generate_d_regular(5, 0, seed=0).m == 0
    with pytest.raises(ValueError, match="odd"):
        generate_d_regular(5, 3, seed=0)
    with pytest.raises(ValueError):
        generate_d_regular(4, 4, seed=0)


def test_erdos_renyi_extremes():
    assert generate_erdos_renyi(10, 0.0, seed=0).m == 0
    assert generate_erdos_renyi(10, 1.0, seed=0).m == 45
    g = generate_erdos_renyi(40, 0.3, seed=7)
    assert g == generate_erdos_renyi(40, 0.3, seed=7)


def test_sample_observed_full_fraction_is_identity():
    g = generate_d_regular(16, 3, seed=4)
    s = sample_observed_subgraph(g, 1.0, seed=9)
    assert np.array_equal(s.kept_nodes, np.arange(16))
    assert s.observed_graph == g
    assert s.original_n == 16


def test_sample_observed_induces_exact_edges():
    for seed in range(4):
        g = generate_erdos_renyi(25, 0.3, seed=seed)
        s = sample_observed_subgraph(g, 0.6, seed=seed + 100)
        k = len(s.kept_nodes)
        assert k == round(0.6 * 25)
        assert np.all(np.diff(s.kept_nodes) > 0)
        kept = set(int(v) for v in s.kept_nodes)
        want = sorted(
            (int(np.searchsorted(s.kept_nodes, u)), int(np.searchsorted(s.kept_nodes, v)), w)
            for u, v, w in g.edges
            if u in kept and v in kept
        )
        assert list(s.observed_graph.edges) == want
        # determinism
        s2 = sample_observed_subgraph(g, 0.6, seed=seed + 100)
        assert np.array_equal(s2.kept_nodes, s.kept_nodes)
        assert s2.observed_graph == s.observed_graph


def test_sample_observed_rejects_bad_fraction():
    g = generate_d_regular(10, 3, seed=0)
    with pytest.raises(ValueError):
        sample_observed_subgraph(g, 0.0, seed=0)
    with pytest.raises(ValueError):
        sample_observed_subgraph(g, 1.5, seed=0)
    with pytest.raises(ValueError, match="zero"):
        sample_observed_subgraph(Graph(20), 0.01, seed=0)


def test_renormalized_adjacency_two_nodes():
    # A + I on a single edge has all row sums 2, so every entry becomes 1/2.
    g = Graph(2, [(0, 1)])
    ah = renormalized_adjacency(g).toarray()
    assert np.allclose(ah, 0.5)


def test_renormalized_adjacency_symmetric_and_bounded():
    for seed in range(4):
        g = generate_erdos_renyi(30, 0.2, seed=seed)
        ah = renormalized_adjacency(g)
        dense = ah.toarray()
        assert np.allclose(dense, dense.T)
        # spectral radius of the normalized operator is at most 1
        eigs = np.linalg.eigvalsh(dense)
        assert np.max(np.abs(eigs)) <= 1.0 + 1e-9
        # isolated nodes keep a well-defined unit self-weight
    g = Graph(3, [(0, 1)])
    ah = renormalized_adjacency(g).toarray()
    assert ah[2, 2] == 1.0


def test_renormalized_adjacency_rejects_nonpositive_rowsum():
    g = Graph(2, [(0, 1, -3.0)])
    with pytest.raises(ValueError, match="positive"):
        renormalized_adjacency(g)
