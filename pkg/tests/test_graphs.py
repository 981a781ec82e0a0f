from __future__ import annotations

import pickle
import unittest

from pebblekit.graphs import (
    edge_distance,
    generate_family,
    line_neighbors,
    preserves_structure,
    symmetry_generators,
)
from pebblekit.labeling import builtin_labeling
from pebblekit.models import (
    EdgePermutation,
    Family,
    FamilySpec,
    Graph,
    InvalidInstanceError,
)

# (vertex count, edge count) as functions of n
SHAPES = {
    Family.COMB: (lambda n: 2 * n, lambda n: 2 * n - 1),
    Family.STAR: (lambda n: n + 1, lambda n: n),
    Family.SUBDIVIDED_STAR: (lambda n: 2 * n + 1, lambda n: 2 * n),
    Family.BISTAR: (lambda n: 2 * n + 2, lambda n: 2 * n + 1),
    Family.SUBDIVIDED_BISTAR: (lambda n: 4 * n + 3, lambda n: 4 * n + 2),
    Family.TWO_STARS_DELTA: (lambda n: 2 * n + 3, lambda n: 2 * n + 3),
    Family.DEGREE_SPLIT_BISTAR: (lambda n: 2 * n + 4, lambda n: 4 * n + 3),
    Family.STAR_OF_STARS: (lambda n: 3 * n + 4, lambda n: 3 * n + 3),
}


class GraphModelTests(unittest.TestCase):
    def test_from_edges_canonicalizes(self) -> None:
        graph = Graph.from_edges(3, [(2, 1), (1, 0)])
        self.assertEqual(graph.edges, ((0, 1), (1, 2)))
        self.assertEqual(graph.edge_count, 2)

    def test_rejects_loop(self) -> None:
        with self.assertRaises(InvalidInstanceError):
            Graph.from_edges(2, [(0, 1), (1, 1)])

    def test_rejects_missing_vertex(self) -> None:
        with self.assertRaises(InvalidInstanceError):
            Graph.from_edges(2, [(0, 2)])

    def test_rejects_duplicate(self) -> None:
        with self.assertRaises(InvalidInstanceError):
            Graph.from_edges(2, [(0, 1), (1, 0)])

    def test_rejects_disconnected(self) -> None:
        with self.assertRaisesRegex(InvalidInstanceError, "not connected"):
            Graph.from_edges(4, [(0, 1), (2, 3)])

    def test_rejects_too_few_edges_before_building(self) -> None:
        with self.assertRaisesRegex(InvalidInstanceError, "not connected"):
            Graph.from_edges(3_000_000, [(0, 1)])

    def test_pickle_drops_cached_views(self) -> None:
        graph = generate_family(FamilySpec(Family.COMB, 3))
        self.assertTrue(graph.edge_distances)
        state = graph.__getstate__()
        self.assertNotIn("nx_graph", state)
        self.assertNotIn("edge_distances", state)
        restored = pickle.loads(pickle.dumps(graph))
        self.assertEqual(restored, graph)
        self.assertEqual(restored.line_adjacency, graph.line_adjacency)

    def test_rejects_unsorted_edges(self) -> None:
        with self.assertRaises(InvalidInstanceError):
            Graph(vertex_count=3, edges=((1, 2), (0, 1)))

    def test_family_spec_bounds(self) -> None:
        with self.assertRaises(InvalidInstanceError):
            FamilySpec(Family.COMB, 1)
        with self.assertRaises(InvalidInstanceError):
            FamilySpec(Family.STAR, 0)
        self.assertEqual(FamilySpec(Family.STAR, 3).label, "star(3)")


class FamilyShapeTests(unittest.TestCase):
    def test_vertex_and_edge_counts(self) -> None:
        for family, (vertices, edges) in SHAPES.items():
            for n in range(1, 5):
                if family is Family.COMB and n < 2:
                    continue
                with self.subTest(family=family.value, n=n):
                    graph = generate_family(FamilySpec(family, n))
                    self.assertEqual(graph.vertex_count, vertices(n))
                    self.assertEqual(graph.edge_count, edges(n))

    def test_comb_edge_order(self) -> None:
        graph = generate_family(FamilySpec(Family.COMB, 4))
        self.assertEqual(graph.edge_name(0), "a_1~a_2")
        self.assertEqual(graph.edge_name(1), "a_1~b_1")
        self.assertEqual(graph.edge_name(6), "a_4~b_4")
        self.assertEqual(graph.edge_id("b_2", "a_2"), 3)

    def test_edge_id_rejects_non_adjacent(self) -> None:
        graph = generate_family(FamilySpec(Family.COMB, 3))
        with self.assertRaises(InvalidInstanceError):
            graph.edge_id("b_1", "b_2")
        with self.assertRaises(InvalidInstanceError):
            graph.edge_id("a_1", "zz")

    def test_line_neighbors(self) -> None:
        graph = generate_family(FamilySpec(Family.COMB, 4))
        self.assertEqual(line_neighbors(graph, 0), frozenset({1, 2, 3}))
        self.assertEqual(line_neighbors(graph, 6), frozenset({4, 5}))
        with self.assertRaises(InvalidInstanceError):
            line_neighbors(graph, 7)

    def test_edge_distance(self) -> None:
        comb = generate_family(FamilySpec(Family.COMB, 4))
        self.assertEqual(edge_distance(comb, 1, 6), 4)
        self.assertEqual(edge_distance(comb, 3, 3), 0)
        star = generate_family(FamilySpec(Family.STAR, 3))
        self.assertEqual(edge_distance(star, 0, 2), 1)


class SymmetryTests(unittest.TestCase):
    def _generators(self, family: Family, n: int) -> tuple:
        spec = FamilySpec(family, n)
        return symmetry_generators(spec, builtin_labeling(spec))

    def test_star_swaps_same_label_leaves(self) -> None:
        generators = self._generators(Family.STAR, 4)
        self.assertEqual(
            set(generators),
            {
                EdgePermutation((2, 1, 0, 3)),
                EdgePermutation((0, 3, 2, 1)),
            },
        )

    def test_comb_reversal(self) -> None:
        generators = self._generators(Family.COMB, 3)
        self.assertEqual(len(generators), 1)

    def test_bistar_side_swap(self) -> None:
        generators = self._generators(Family.BISTAR, 1)
        self.assertEqual(len(generators), 1)

    def test_generators_preserve_labels_and_adjacency(self) -> None:
        for family in Family:
            spec = FamilySpec(family, 3)
            graph = generate_family(spec)
            labeling = builtin_labeling(spec)
            for perm in symmetry_generators(spec, labeling):
                with self.subTest(family=family.value, perm=perm.mapping):
                    self.assertTrue(
                        preserves_structure(graph, labeling, perm)
                    )

    def test_label_breaking_map_is_rejected(self) -> None:
        spec = FamilySpec(Family.STAR, 2)
        graph = generate_family(spec)
        swap = EdgePermutation((1, 0))
        self.assertFalse(
            preserves_structure(graph, builtin_labeling(spec), swap)
        )


if __name__ == "__main__":  # pragma: no cover
    unittest.main()
