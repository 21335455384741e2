import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from botsage import (
    DataError,
    DimensionError,
    build_graph,
    cosine_similarity,
    graph_stats,
    load_graph,
    save_graph,
    sweep_threshold,
)


def brute_force_edges(matrix, tau):
    """Literal pairwise double loop: the independent oracle for build_graph."""
    matrix = np.asarray(matrix, dtype=np.float64)
    n = matrix.shape[0]
    norms = [np.sqrt(np.dot(matrix[i], matrix[i])) for i in range(n)]
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            if norms[i] == 0.0 or norms[j] == 0.0:
                sim = 0.0
            else:
                sim = np.dot(matrix[i], matrix[j]) / (norms[i] * norms[j])
                sim = min(1.0, max(-1.0, sim))
            if sim >= tau:
                edges.add((i, j))
    return edges


class TestCosineSimilarity:
    def test_self_similarity(self):
        v = np.array([1.0, 2.0, 3.0])
        assert cosine_similarity(v, v) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal(self):
        assert cosine_similarity([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_forty_five_degrees(self):
        assert cosine_similarity([1.0, 0.0], [1.0, 1.0]) == pytest.approx(
            0.70710678, abs=1e-8
        )

    def test_zero_norm_convention(self):
        assert cosine_similarity([0.0, 0.0], [1.0, 2.0]) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            cosine_similarity([1.0], [1.0, 2.0])

    def test_non_finite_rejected(self):
        with pytest.raises(DataError):
            cosine_similarity([np.nan, 0.0], [1.0, 0.0])

    @given(
        arrays(np.float64, 4, elements=st.floats(-10, 10)),
        arrays(np.float64, 4, elements=st.floats(-10, 10)),
        st.floats(0.01, 100.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_symmetry_and_scale_invariance(self, a, b, c):
        assert cosine_similarity(a, b) == cosine_similarity(b, a)
        assert abs(cosine_similarity(c * a, b) - cosine_similarity(a, b)) < 1e-9


class TestBuildGraph:
    def test_identical_rows_connected(self):
        matrix = np.array([[1.0, 2.0], [1.0, 2.0]])
        g = build_graph(matrix, tau=0.9)
        assert g.edge_set() == {(0, 1)}

    def test_orthogonal_rows_disconnected(self):
        matrix = np.array([[1.0, 0.0], [0.0, 1.0]])
        assert build_graph(matrix, tau=0.5).edge_count == 0

    def test_oracle_equivalence_small_random(self):
        rng = np.random.default_rng(42)
        for dim, tau in [(3, 0.0), (8, 0.5), (5, -0.3), (8, 0.9)]:
            matrix = rng.normal(size=(60, dim))
            assert build_graph(matrix, tau).edge_set() == brute_force_edges(matrix, tau)

    def test_oracle_equivalence_with_zero_rows(self):
        rng = np.random.default_rng(7)
        matrix = rng.normal(size=(30, 4))
        matrix[[3, 17]] = 0.0
        for tau in (-1.0, -0.1, 0.0, 0.4):
            assert build_graph(matrix, tau).edge_set() == brute_force_edges(matrix, tau)

    def test_tau_minus_one_complete(self):
        rng = np.random.default_rng(1)
        matrix = rng.normal(size=(10, 3))
        g = build_graph(matrix, tau=-1.0)
        assert g.edge_count == 45

    def test_symmetry_and_no_self_loops(self):
        rng = np.random.default_rng(2)
        g = build_graph(rng.normal(size=(40, 5)), tau=0.3)
        for i in range(g.n):
            nbrs = g.neighbors(i)
            assert i not in nbrs
            assert np.all(np.diff(nbrs) > 0)  # sorted, no duplicates
            for j in nbrs:
                assert i in g.neighbors(int(j))

    def test_monotonicity(self):
        rng = np.random.default_rng(3)
        matrix = rng.normal(size=(50, 4))
        e_low = build_graph(matrix, 0.2).edge_set()
        e_high = build_graph(matrix, 0.6).edge_set()
        assert e_high <= e_low

    def test_determinism(self):
        rng = np.random.default_rng(4)
        matrix = rng.normal(size=(30, 6))
        assert build_graph(matrix, 0.4) == build_graph(matrix, 0.4)

    def test_non_finite_rejected(self):
        matrix = np.array([[1.0, np.inf], [0.0, 1.0]])
        with pytest.raises(DataError):
            build_graph(matrix, 0.5)

    def test_bad_tau_rejected(self):
        with pytest.raises(ValueError):
            build_graph(np.ones((2, 2)), 1.5)

    def test_dense_export_matches_edges(self):
        rng = np.random.default_rng(5)
        g = build_graph(rng.normal(size=(15, 3)), 0.2)
        dense = g.to_dense()
        assert np.array_equal(dense, dense.T)
        assert not dense.diagonal().any()
        assert dense.sum() == 2 * g.edge_count


class TestGraphStats:
    def test_empty_graph(self):
        g = build_graph(np.eye(5), tau=0.5)
        stats = graph_stats(g)
        assert stats.edge_count == 0
        assert stats.isolated_node_count == 5
        assert stats.connected_component_count == 5

    def test_complete_graph(self):
        g = build_graph(np.tile([1.0, 1.0], (4, 1)), tau=0.9)
        stats = graph_stats(g)
        assert stats.density == 1.0
        assert stats.connected_component_count == 1

    def test_path_graph_histogram(self):
        # rows 0 and 2 are orthogonal; row 1 is the 45-degree mix, so edges 0-1, 1-2
        matrix = np.array([[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
        g = build_graph(matrix, tau=0.5)
        assert g.edge_set() == {(0, 1), (1, 2)}
        stats = graph_stats(g)
        assert stats.degree_histogram == {1: 2, 2: 1}
        assert stats.connected_component_count == 1


class TestSweepThreshold:
    def test_matches_per_tau_build(self):
        rng = np.random.default_rng(6)
        matrix = rng.normal(size=(40, 5))
        taus = [0.85, 0.9, 0.95]
        swept = sweep_threshold(matrix, taus)
        for tau, stats in swept:
            assert stats == graph_stats(build_graph(matrix, tau))

    def test_edge_counts_nonincreasing(self):
        rng = np.random.default_rng(8)
        matrix = rng.normal(size=(60, 4))
        taus = [-1.0, -0.5, 0.0, 0.3, 0.6, 0.9]
        counts = [stats.edge_count for _, stats in sweep_threshold(matrix, taus)]
        assert all(a >= b for a, b in zip(counts, counts[1:]))

    def test_tau_minus_one_complete(self):
        matrix = np.random.default_rng(9).normal(size=(12, 3))
        (_, stats), = sweep_threshold(matrix, [-1.0])
        assert stats.edge_count == 66 and stats.density == 1.0

    def test_empty_taus_rejected(self):
        with pytest.raises(ValueError):
            sweep_threshold(np.ones((2, 2)), [])


class TestEdgeListFormat:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(10)
        g = build_graph(rng.normal(size=(25, 4)), tau=0.31)
        path = tmp_path / "graph.txt"
        save_graph(g, path)
        assert load_graph(path) == g

    def test_file_layout(self, tmp_path):
        g = build_graph(np.array([[1.0, 2.0], [1.0, 2.0]]), tau=0.5)
        path = tmp_path / "graph.txt"
        save_graph(g, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "2" and float(lines[1]) == 0.5 and lines[2] == "0 1"
