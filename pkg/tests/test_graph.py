import math

import numpy as np
import pytest

from planarlearn import (
    DirectedEdgeIndex,
    Graph,
    NotPlanarError,
    PlanarEmbedding,
    faces,
    is_planar,
    planar_candidates,
    straight_line_embed,
    turning_angle,
)

from util import assert_valid_drawing, random_connected_planar_graph


def complete_graph(n):
    return Graph.make(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


class TestGraphType:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError, match="self-loop"):
            Graph(3, ((1, 1),))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Graph(3, ((0, 3),))

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError, match="duplicate"):
            Graph(3, ((0, 1), (0, 1)))

    def test_make_canonicalizes(self):
        g = Graph.make(4, [(2, 0), (1, 0), (0, 2)])
        assert g.edges == ((0, 1), (0, 2))

    def test_components(self):
        g = Graph.make(5, [(0, 1), (3, 4)])
        assert g.components() == [[0, 1], [2], [3, 4]]


class TestIsPlanar:
    def test_k4_planar(self):
        assert is_planar(complete_graph(4))

    def test_k5_not_planar(self):
        assert not is_planar(complete_graph(5))

    def test_k5_minus_edge_planar(self):
        g = Graph.make(5, [e for e in complete_graph(5).edges if e != (0, 4)])
        assert is_planar(g)

    def test_k33_not_planar(self):
        g = Graph.make(6, [(i, j) for i in range(3) for j in range(3, 6)])
        assert not is_planar(g)

    def test_edge_bound_rejection(self):
        # any graph with more than 3n - 6 edges must be rejected
        g = complete_graph(6)
        assert len(g.edges) > 3 * 6 - 6
        assert not is_planar(g)


class TestPlanarCandidates:
    def test_empty_graph_all_pairs(self):
        g = Graph(4, ())
        assert len(planar_candidates(g)) == 6

    def test_k5_minus_edge_has_no_candidates(self):
        g = Graph.make(5, [e for e in complete_graph(5).edges if e != (0, 4)])
        assert planar_candidates(g) == []

    def test_maximal_planar_graph_empty(self):
        # octahedron: 6 vertices, 12 = 3n - 6 edges, maximal planar
        g = Graph.make(
            6,
            [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (2, 3), (3, 4), (4, 1),
             (5, 1), (5, 2), (5, 3), (5, 4)],
        )
        assert len(g.edges) == 12
        assert is_planar(g)
        assert planar_candidates(g) == []

    def test_rejects_non_planar_input(self):
        with pytest.raises(NotPlanarError):
            planar_candidates(complete_graph(5))

    def test_consistency_with_is_planar(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            g = random_connected_planar_graph(int(rng.integers(4, 9)), rng)
            cands = set(planar_candidates(g))
            for e in g.non_edges():
                assert (e in cands) == is_planar(g.add_edge(*e))


class TestStraightLineEmbed:
    def test_single_edge(self):
        emb = straight_line_embed(Graph.make(2, [(0, 1)]))
        assert not np.array_equal(emb.coords[0], emb.coords[1])

    def test_triangle_not_collinear(self):
        emb = straight_line_embed(Graph.make(3, [(0, 1), (1, 2), (0, 2)]))
        a, b, c = emb.coords
        area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        assert area != 0

    def test_grid_has_no_crossings(self):
        from planarlearn import grid_graph

        assert_valid_drawing(straight_line_embed(grid_graph(7, 7)))

    def test_disconnected_and_isolated(self):
        g = Graph.make(9, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (5, 6), (3, 6)])
        emb = straight_line_embed(g)
        assert_valid_drawing(emb)
        # all 9 vertices (incl. isolated 7, 8) at distinct positions
        assert len({tuple(p) for p in emb.coords}) == 9

    def test_rejects_non_planar(self):
        with pytest.raises(NotPlanarError):
            straight_line_embed(complete_graph(5))

    def test_rotation_matches_angular_order(self):
        rng = np.random.default_rng(3)
        g = random_connected_planar_graph(10, rng)
        emb = straight_line_embed(g)
        rebuilt = PlanarEmbedding.from_coords(g, emb.coords)
        assert rebuilt.rotation == emb.rotation


class TestTurningAngle:
    @pytest.fixture
    def path_embedding(self):
        g = Graph.make(3, [(0, 1), (1, 2)])
        return PlanarEmbedding.from_coords(g, np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]))

    def test_collinear_continuation_is_zero(self, path_embedding):
        assert turning_angle(path_embedding, 0, 1, 2) == 0.0

    def test_reversal_is_plus_pi(self, path_embedding):
        assert turning_angle(path_embedding, 0, 1, 0) == math.pi

    def test_axis_aligned_quarter_turns(self):
        g = Graph.make(3, [(0, 1), (1, 2)])
        # (1,0) -> (0,0) -> (0,1): direction (-1,0) turns to (0,1), clockwise
        emb = PlanarEmbedding.from_coords(
            g, np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]])
        )
        assert turning_angle(emb, 0, 1, 2) == pytest.approx(-math.pi / 2)
        # and the mirrored walk turns counterclockwise
        emb2 = PlanarEmbedding.from_coords(
            g, np.array([[1.0, 0.0], [0.0, 0.0], [0.0, -1.0]])
        )
        assert turning_angle(emb2, 0, 1, 2) == pytest.approx(math.pi / 2)

    def test_missing_edge_raises(self, path_embedding):
        with pytest.raises(ValueError):
            turning_angle(path_embedding, 0, 2, 1)

    def test_face_turning_sums_to_two_pi(self):
        rng = np.random.default_rng(11)
        for _ in range(8):
            g = random_connected_planar_graph(int(rng.integers(4, 12)), rng)
            emb = straight_line_embed(g)
            for walk in faces(emb):
                verts = [d[0] for d in walk]
                if len(set(verts)) != len(verts):
                    continue  # walks through cut vertices are not simple polygons
                total = 0.0
                for (i, j), (_, l) in zip(walk, walk[1:] + walk[:1]):
                    total += turning_angle(emb, i, j, l)
                assert abs(abs(total) - 2 * math.pi) < 1e-9


class TestDirectedEdgeIndex:
    def test_bijection_and_involution(self):
        rng = np.random.default_rng(5)
        g = random_connected_planar_graph(8, rng)
        idx = DirectedEdgeIndex.from_graph(g)
        assert len(idx.index) == idx.size == 2 * len(g.edges)
        assert sorted(idx.index.values()) == list(range(idx.size))
        rev = idx.reversal
        assert np.array_equal(rev[rev], np.arange(idx.size))
        for (i, j), k in idx.index.items():
            assert idx.index[(j, i)] == rev[k]
