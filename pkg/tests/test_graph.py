import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockgossip import graph as gr


def random_graph_strategy(max_nodes: int = 10):
    """Random small graphs: node count plus a bitmask over all node pairs."""

    @st.composite
    def build(draw):
        n = draw(st.integers(min_value=1, max_value=max_nodes))
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
        edges = tuple(e for e, keep in zip(pairs, mask) if keep)
        return gr.Graph(n, edges)

    return build()


class TestGraphValidation:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            gr.Graph(3, ((1, 1),))

    def test_rejects_duplicate(self):
        with pytest.raises(ValueError):
            gr.Graph(3, ((0, 1), (0, 1)))

    def test_rejects_unordered_pair(self):
        with pytest.raises(ValueError):
            gr.Graph(3, ((2, 1),))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            gr.Graph(3, ((0, 3),))

    def test_edge_ids_are_positions(self):
        g = gr.Graph(4, ((0, 2), (1, 3), (0, 1)))
        assert g.edges[1] == (1, 3)
        assert g.edge_id_map()[(0, 1)] == 2


class TestGenerators:
    def test_er_p_zero(self):
        assert gr.generate_erdos_renyi(5, 0.0, 1).edge_count == 0

    def test_er_p_one_is_complete(self):
        g = gr.generate_erdos_renyi(5, 1.0, 1)
        assert g.edge_count == 10
        assert g.edges == gr.generate_complete(5).edges

    @pytest.mark.parametrize("seed", [0, 1, 2026])
    def test_er_edge_count_within_binomial_bounds(self, seed):
        # Oracle: Bin(19900, 0.6) has mean 11940, sigma ~= 69.11; +-5 sigma.
        g = gr.generate_erdos_renyi(200, 0.6, seed)
        assert 11595 <= g.edge_count <= 12285

    def test_er_reproducible(self):
        a = gr.generate_erdos_renyi(40, 0.3, 7)
        b = gr.generate_erdos_renyi(40, 0.3, 7)
        assert a.edges == b.edges

    def test_er_rejects_bad_p(self):
        with pytest.raises(ValueError):
            gr.generate_erdos_renyi(5, 1.2, 0)

    def test_lattice_1x2_single_edge(self):
        g = gr.generate_square_lattice(1, 2)
        assert g.edges == ((0, 1),)

    def test_lattice_2x2_cycle(self):
        g = gr.generate_square_lattice(2, 2)
        assert g.node_count == 4
        assert g.edge_count == 4

    def test_lattice_10x10_counts(self):
        g = gr.generate_square_lattice(10, 10)
        assert g.node_count == 100
        assert g.edge_count == 180  # rows*(cols-1) + cols*(rows-1)

    @pytest.mark.parametrize("rows,cols", [(1, 1), (3, 5), (4, 1)])
    def test_lattice_edge_formula(self, rows, cols):
        g = gr.generate_square_lattice(rows, cols)
        assert g.edge_count == rows * (cols - 1) + cols * (rows - 1)

    def test_complete_counts(self):
        assert gr.generate_complete(3).edge_count == 3
        assert gr.generate_complete(1).edge_count == 0

    def test_path_edges(self):
        assert gr.generate_path(4).edges == ((0, 1), (1, 2), (2, 3))

    def test_generator_edges_sorted(self):
        for g in (
            gr.generate_erdos_renyi(20, 0.4, 3),
            gr.generate_square_lattice(4, 5),
            gr.generate_complete(6),
            gr.generate_path(6),
        ):
            assert list(g.edges) == sorted(g.edges)


class TestMatrices:
    def test_single_edge_incidence(self):
        g = gr.Graph(2, ((0, 1),))
        assert gr.incidence_matrix(g).tolist() == [[1, -1]]

    def test_triangle_gram_is_laplacian(self):
        # Oracle: hand-built L(K3).
        g = gr.generate_complete(3)
        q = gr.incidence_matrix(g)
        expected = np.array([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])
        assert np.array_equal(q.T @ q, expected)
        assert np.array_equal(gr.laplacian(g), expected)

    def test_edgeless_incidence_shape(self):
        g = gr.Graph(3, ())
        assert gr.incidence_matrix(g).shape == (0, 3)

    def test_single_edge_laplacian(self):
        g = gr.Graph(2, ((0, 1),))
        assert gr.laplacian(g).tolist() == [[1, -1], [-1, 1]]

    def test_star_degrees(self):
        g = gr.Graph(4, ((0, 1), (0, 2), (0, 3)))
        lap = gr.laplacian(g)
        assert np.array_equal(np.diag(lap), [3, 1, 1, 1])

    @settings(max_examples=60, deadline=None)
    @given(random_graph_strategy())
    def test_gram_identity_and_row_sums(self, g):
        q = gr.incidence_matrix(g)
        lap = gr.laplacian(g)
        assert np.array_equal(q.T @ q, lap)
        assert np.all(q.sum(axis=1) == 0)
        assert np.all(lap.sum(axis=1) == 0)

    @settings(max_examples=40, deadline=None)
    @given(random_graph_strategy())
    def test_laplacian_psd(self, g):
        eigs = np.linalg.eigvalsh(gr.laplacian(g).astype(float))
        scale = max(eigs[-1], 1.0)
        assert eigs[0] >= -1e-10 * scale


class TestComponentsAndForests:
    def test_single_edge_component(self):
        g = gr.generate_complete(4)
        assert gr.connected_components(g, {0}) == [{0, 1}]

    def test_two_disjoint_edges(self):
        g = gr.Graph(4, ((0, 1), (2, 3)))
        assert gr.connected_components(g, {0, 1}) == [{0, 1}, {2, 3}]

    def test_chain_merges(self):
        g = gr.generate_path(3)
        assert gr.connected_components(g, {0, 1}) == [{0, 1, 2}]

    def test_untouched_nodes_excluded(self):
        g = gr.generate_complete(5)
        comps = gr.connected_components(g, {0})  # edge (0, 1)
        assert comps == [{0, 1}]

    def test_subset_id_validated(self):
        g = gr.generate_path(3)
        with pytest.raises(ValueError):
            gr.connected_components(g, {5})

    def test_spanning_forest_of_triangle(self):
        # Oracle: any 2 of the 3 triangle edges span; DFS walks 0-1-2.
        g = gr.generate_complete(3)
        forest = gr.spanning_forest(g, {0, 1, 2})
        assert len(forest) == 2
        assert forest == frozenset({0, 2})

    def test_spanning_forest_of_tree_is_identity(self):
        g = gr.generate_path(5)
        subset = frozenset(range(g.edge_count))
        assert gr.spanning_forest(g, subset) == subset

    def test_spanning_forest_two_triangles(self):
        # Oracle: each triangle needs exactly 2 of its 3 edges.
        g = gr.Graph(6, ((0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)))
        forest = gr.spanning_forest(g, range(6))
        assert len(forest) == 4
        assert len(forest & {0, 1, 2}) == 2
        assert len(forest & {3, 4, 5}) == 2

    @settings(max_examples=50, deadline=None)
    @given(random_graph_strategy(), st.randoms(use_true_random=False))
    def test_spanning_forest_preserves_partition(self, g, rnd):
        if g.edge_count == 0:
            return
        subset = frozenset(l for l in range(g.edge_count) if rnd.random() < 0.6)
        if not subset:
            subset = frozenset({0})
        forest = gr.spanning_forest(g, subset)
        assert forest <= subset
        assert gr.connected_components(g, forest) == gr.connected_components(g, subset)

    @settings(max_examples=40, deadline=None)
    @given(random_graph_strategy())
    def test_subset_gram_spectrum_matches_block_laplacian(self, g):
        # Nonzero spectra of Q_tau Q_tau^T and L_tau agree up to zeros.
        if g.edge_count == 0:
            return
        subset = frozenset(range(0, g.edge_count, 2))
        q = gr.incidence_matrix(g).astype(float)
        q_tau = q[sorted(subset)]
        gram_eigs = np.linalg.eigvalsh(q_tau @ q_tau.T)
        touched = sorted({v for l in subset for v in g.edges[l]})
        sub = gr.Graph(
            g.node_count,
            tuple(sorted(g.edges[l] for l in subset)),
        )
        lap = gr.laplacian(sub)[np.ix_(touched, touched)]
        lap_eigs = np.linalg.eigvalsh(lap.astype(float))
        scale = max(gram_eigs[-1], 1.0)
        nz_gram = gram_eigs[gram_eigs > 1e-9 * scale]
        nz_lap = lap_eigs[lap_eigs > 1e-9 * scale]
        assert nz_gram.size == nz_lap.size
        assert np.allclose(nz_gram, nz_lap, atol=1e-9 * scale)


class TestConnectivitySpectra:
    @pytest.mark.parametrize("n", [2, 3, 5, 8])
    def test_complete_graph_connectivity_is_n(self, n):
        # Oracle: K_n Laplacian spectrum is {0, n (n-1 times)}.
        assert gr.algebraic_connectivity(gr.generate_complete(n)) == pytest.approx(n, abs=1e-9)

    def test_p2_connectivity(self):
        assert gr.algebraic_connectivity(gr.generate_path(2)) == pytest.approx(2.0, abs=1e-12)

    def test_p4_connectivity_matches_cosine_formula(self):
        expected = 2 - 2 * np.cos(np.pi / 4)
        assert gr.algebraic_connectivity(gr.generate_path(4)) == pytest.approx(expected, abs=1e-9)

    def test_disconnected_rejected(self):
        g = gr.Graph(4, ((0, 1), (2, 3)))
        assert not gr.is_connected(g)
        with pytest.raises(ValueError):
            gr.algebraic_connectivity(g)

    def test_single_node_connected_but_no_spectrum(self):
        g = gr.Graph(1, ())
        assert gr.is_connected(g)
        with pytest.raises(ValueError):
            gr.algebraic_connectivity(g)


class TestGraphFile:
    def test_round_trip(self, tmp_path):
        g = gr.generate_erdos_renyi(25, 0.3, 9)
        path = tmp_path / "g.txt"
        gr.save_graph(g, path)
        loaded = gr.load_graph(path)
        assert loaded == g
        gr.save_graph(loaded, tmp_path / "g2.txt")
        assert (tmp_path / "g.txt").read_bytes() == (tmp_path / "g2.txt").read_bytes()

    def test_format_header(self, tmp_path):
        g = gr.generate_path(3)
        path = tmp_path / "g.txt"
        gr.save_graph(g, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "3 2"
        assert lines[1:] == ["0 1", "1 2"]

    def test_load_rejects_truncated(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("3 2\n0 1\n")
        with pytest.raises(ValueError):
            gr.load_graph(path)
