from __future__ import annotations

from collections.abc import Callable

import networkx as nx

from .models import (
    EdgeLabeling,
    EdgePermutation,
    Family,
    FamilySpec,
    Graph,
    InvalidInstanceError,
)

_Builder = Callable[[int], tuple[list[str], list[tuple[str, str]]]]


def _comb(n: int) -> tuple[list[str], list[tuple[str, str]]]:
    names = [f"a_{r}" for r in range(1, n + 1)]
    names += [f"b_{r}" for r in range(1, n + 1)]
    edges = [(f"a_{r}", f"a_{r + 1}") for r in range(1, n)]
    edges += [(f"a_{r}", f"b_{r}") for r in range(1, n + 1)]
    return names, edges


def _star(n: int) -> tuple[list[str], list[tuple[str, str]]]:
    names = ["a"] + [f"a_{r}" for r in range(1, n + 1)]
    return names, [("a", f"a_{r}") for r in range(1, n + 1)]


def _subdivided_star(n: int) -> tuple[list[str], list[tuple[str, str]]]:
    names = ["a"] + [f"a_{r}" for r in range(1, n + 1)]
    names += [f"b_{r}" for r in range(1, n + 1)]
    edges = [("a", f"a_{r}") for r in range(1, n + 1)]
    edges += [(f"a_{r}", f"b_{r}") for r in range(1, n + 1)]
    return names, edges


def _bistar(n: int) -> tuple[list[str], list[tuple[str, str]]]:
    names = ["a", "b"] + [f"a_{r}" for r in range(1, n + 1)]
    names += [f"b_{r}" for r in range(1, n + 1)]
    edges = [("a", "b")]
    edges += [("a", f"a_{r}") for r in range(1, n + 1)]
    edges += [("b", f"b_{r}") for r in range(1, n + 1)]
    return names, edges


def _subdivided_bistar(n: int) -> tuple[list[str], list[tuple[str, str]]]:
    names = ["a", "a'", "b"]
    names += [f"a'_{r}" for r in range(1, n + 1)]
    names += [f"a_{r}" for r in range(1, n + 1)]
    names += [f"b'_{r}" for r in range(1, n + 1)]
    names += [f"b_{r}" for r in range(1, n + 1)]
    edges = [("a", "a'"), ("a'", "b")]
    for r in range(1, n + 1):
        edges += [("a", f"a'_{r}"), (f"a'_{r}", f"a_{r}")]
        edges += [("b", f"b'_{r}"), (f"b'_{r}", f"b_{r}")]
    return names, edges


def _two_stars_delta(n: int) -> tuple[list[str], list[tuple[str, str]]]:
    names = ["a", "b", "x"] + [f"a_{r}" for r in range(1, n + 1)]
    names += [f"b_{r}" for r in range(1, n + 1)]
    edges = [("a", "b"), ("a", "x"), ("b", "x")]
    edges += [("a", f"a_{r}") for r in range(1, n + 1)]
    edges += [("b", f"b_{r}") for r in range(1, n + 1)]
    return names, edges


def _degree_split_bistar(n: int) -> tuple[list[str], list[tuple[str, str]]]:
    names = ["u", "v", "w_1", "w_2"] + [f"u_{r}" for r in range(1, n + 1)]
    names += [f"v_{r}" for r in range(1, n + 1)]
    edges = [("u", "v"), ("u", "w_2"), ("v", "w_2")]
    for r in range(1, n + 1):
        edges += [("u", f"u_{r}"), (f"u_{r}", "w_1")]
        edges += [("v", f"v_{r}"), (f"v_{r}", "w_1")]
    return names, edges


def _star_of_stars(n: int) -> tuple[list[str], list[tuple[str, str]]]:
    names = ["x", "u", "v", "w"]
    for hub in ("u", "v", "w"):
        names += [f"{hub}_{r}" for r in range(1, n + 1)]
    edges = [("x", "u"), ("x", "v"), ("x", "w")]
    for hub in ("u", "v", "w"):
        edges += [(hub, f"{hub}_{r}") for r in range(1, n + 1)]
    return names, edges


_BUILDERS: dict[Family, _Builder] = {
    Family.COMB: _comb,
    Family.STAR: _star,
    Family.SUBDIVIDED_STAR: _subdivided_star,
    Family.BISTAR: _bistar,
    Family.SUBDIVIDED_BISTAR: _subdivided_bistar,
    Family.TWO_STARS_DELTA: _two_stars_delta,
    Family.DEGREE_SPLIT_BISTAR: _degree_split_bistar,
    Family.STAR_OF_STARS: _star_of_stars,
}


def generate_family(spec: FamilySpec) -> Graph:
    names, named_edges = _BUILDERS[spec.family](spec.n)
    index = {name: i for i, name in enumerate(names)}
    edges = [(index[u], index[v]) for u, v in named_edges]
    return Graph.from_edges(len(names), edges, names)


def line_neighbors(graph: Graph, e: int) -> frozenset[int]:
    return frozenset(graph.line_adjacency[graph.check_edge(e)])


def edge_distance(graph: Graph, e: int, f: int) -> int:
    """Shortest path length between two edges in the line graph."""
    return graph.edge_distances[graph.check_edge(e)][graph.check_edge(f)]


def _swap(names_a: list[str], names_b: list[str]) -> dict[str, str]:
    mapping: dict[str, str] = {}
    for left, right in zip(names_a, names_b):
        mapping[left] = right
        mapping[right] = left
    return mapping


def _leaf_swaps(hub: str, n: int, step: int) -> list[dict[str, str]]:
    return [
        _swap([f"{hub}_{r}"], [f"{hub}_{r + step}"])
        for r in range(1, n + 1 - step)
    ]


def _branch_swaps(prefixes: tuple[str, ...], n: int) -> list[dict[str, str]]:
    return [
        _swap(
            [f"{p}_{r}" for p in prefixes],
            [f"{p}_{r + 1}" for p in prefixes],
        )
        for r in range(1, n)
    ]


def _candidate_vertex_maps(spec: FamilySpec) -> list[dict[str, str]]:
    n = spec.n
    match spec.family:
        case Family.COMB:
            return [
                _swap(
                    [f"{p}_{r}" for p in ("a", "b") for r in range(1, n + 1)],
                    [
                        f"{p}_{n + 1 - r}"
                        for p in ("a", "b")
                        for r in range(1, n + 1)
                    ],
                )
            ]
        case Family.STAR:
            return _leaf_swaps("a", n, 2)
        case Family.SUBDIVIDED_STAR:
            return _branch_swaps(("a", "b"), n)
        case Family.BISTAR:
            sides = _swap(
                ["a"] + [f"a_{r}" for r in range(1, n + 1)],
                ["b"] + [f"b_{r}" for r in range(1, n + 1)],
            )
            return _leaf_swaps("a", n, 2) + _leaf_swaps("b", n, 2) + [sides]
        case Family.SUBDIVIDED_BISTAR:
            return _branch_swaps(("a'", "a"), n) + _branch_swaps(
                ("b'", "b"), n
            )
        case Family.TWO_STARS_DELTA:
            return _leaf_swaps("a", n, 2) + _leaf_swaps("b", n, 2)
        case Family.DEGREE_SPLIT_BISTAR:
            return _leaf_swaps("u", n, 1) + _leaf_swaps("v", n, 1)
        case Family.STAR_OF_STARS:
            return (
                _leaf_swaps("u", n, 2)
                + _leaf_swaps("v", n, 2)
                + _leaf_swaps("w", n, 2)
            )
    return []


def _edge_permutation(
    graph: Graph,
    vertex_map: dict[int, int],
) -> EdgePermutation | None:
    index = {edge: i for i, edge in enumerate(graph.edges)}
    mapping: list[int] = []
    for u, v in graph.edges:
        pu, pv = vertex_map.get(u, u), vertex_map.get(v, v)
        image = index.get((min(pu, pv), max(pu, pv)))
        if image is None:
            return None
        mapping.append(image)
    if sorted(mapping) != list(range(graph.edge_count)):
        return None
    return EdgePermutation(tuple(mapping))


def preserves_structure(
    graph: Graph,
    labeling: EdgeLabeling,
    perm: EdgePermutation,
) -> bool:
    """True when ``perm`` keeps both line adjacency and edge labels."""
    mapping = perm.mapping
    for e, image in enumerate(mapping):
        if labeling.labels[e] != labeling.labels[image]:
            return False
        mapped = frozenset(mapping[f] for f in graph.line_adjacency[e])
        if mapped != frozenset(graph.line_adjacency[image]):
            return False
    return True


def symmetry_generators(
    spec: FamilySpec,
    labeling: EdgeLabeling,
) -> tuple[EdgePermutation, ...]:
    graph = generate_family(spec)
    if len(labeling.labels) != graph.edge_count:
        raise InvalidInstanceError(
            f"labeling has {len(labeling.labels)} edges, "
            f"{spec.label} has {graph.edge_count}"
        )
    names = {name: i for i, name in enumerate(graph.vertex_names or ())}
    generators: list[EdgePermutation] = []
    for candidate in _candidate_vertex_maps(spec):
        vertex_map = {names[k]: names[v] for k, v in candidate.items()}
        if not nx.utils.graphs_equal(
            graph.nx_graph,
            nx.relabel_nodes(graph.nx_graph, vertex_map, copy=True),
        ):
            continue
        perm = _edge_permutation(graph, vertex_map)
        if perm is None or perm.mapping == tuple(range(graph.edge_count)):
            continue
        if preserves_structure(graph, labeling, perm):
            generators.append(perm)
    return tuple(generators)
