from __future__ import annotations

import logging
from collections.abc import Sequence
from functools import lru_cache

from .graphs import generate_family
from .models import (
    EdgeLabeling,
    Family,
    FamilySpec,
    Graph,
    InvalidInstanceError,
    SearchBudgetExceeded,
    VertexAssignment,
)

logger = logging.getLogger(__name__)

DEFAULT_SEARCH_BUDGET = 1_000_000


class LabelingReconstructionError(RuntimeError):
    """Raised when no bijection realizes a family's printed edge pattern."""


def derive_edge_labels(
    graph: Graph,
    assignment: VertexAssignment,
) -> EdgeLabeling:
    if len(assignment.values) != graph.vertex_count:
        raise InvalidInstanceError(
            f"assignment has {len(assignment.values)} values, graph has "
            f"{graph.vertex_count} vertices"
        )
    if not assignment.is_bijection(graph.vertex_count):
        raise InvalidInstanceError(
            f"assignment is not a bijection onto 1..{graph.vertex_count}"
        )
    g = assignment.values
    labels = tuple(1 if (g[u] + g[v]) % 2 == 0 else 0 for u, v in graph.edges)
    return EdgeLabeling.from_labels(labels, assignment)


def is_sdc(
    graph: Graph,
    assignment: VertexAssignment,
) -> tuple[bool, EdgeLabeling]:
    labeling = derive_edge_labels(graph, assignment)
    return labeling.is_balanced, labeling


def _alternating(n: int, odd: int, even: int) -> list[int]:
    return [odd if r % 2 == 1 else even for r in range(1, n + 1)]


def _named_pattern(spec: FamilySpec) -> dict[tuple[str, str], int]:
    """Published edge labels for each family, keyed by vertex names."""
    n = spec.n
    rs = range(1, n + 1)
    match spec.family:
        case Family.COMB:
            labels = {(f"a_{r}", f"a_{r + 1}"): 1 for r in range(1, n)}
            labels |= {(f"a_{r}", f"b_{r}"): 0 for r in rs}
        case Family.STAR:
            labels = {
                ("a", f"a_{r}"): bit
                for r, bit in zip(rs, _alternating(n, 0, 1))
            }
        case Family.SUBDIVIDED_STAR:
            labels = {("a", f"a_{r}"): 1 for r in rs}
            labels |= {(f"a_{r}", f"b_{r}"): 0 for r in rs}
        case Family.BISTAR:
            labels = {("a", "b"): 0}
            for hub in ("a", "b"):
                labels |= {
                    (hub, f"{hub}_{r}"): bit
                    for r, bit in zip(rs, _alternating(n, 1, 0))
                }
        case Family.SUBDIVIDED_BISTAR:
            labels = {("a", "a'"): 1, ("a'", "b"): 0}
            for r in rs:
                labels[("a", f"a'_{r}")] = 1
                labels[(f"a'_{r}", f"a_{r}")] = 0
                labels[("b", f"b'_{r}")] = 1
                labels[(f"b'_{r}", f"b_{r}")] = 0
        case Family.TWO_STARS_DELTA:
            # the printed list also names an edge a'b that this graph
            # does not have; it is skipped
            labels = {("a", "x"): 0, ("b", "x"): 0, ("a", "b"): 1}
            labels |= {
                ("a", f"a_{r}"): bit
                for r, bit in zip(rs, _alternating(n, 0, 1))
            }
            labels |= {
                ("b", f"b_{r}"): bit
                for r, bit in zip(rs, _alternating(n, 1, 0))
            }
        case Family.DEGREE_SPLIT_BISTAR:
            labels = {("u", "v"): 1, ("u", "w_2"): 0, ("v", "w_2"): 0}
            for r in rs:
                labels[("u", f"u_{r}")] = 1
                labels[(f"u_{r}", "w_1")] = 0
                labels[("v", f"v_{r}")] = 0
                labels[(f"v_{r}", "w_1")] = 1
        case Family.STAR_OF_STARS:
            labels = {("x", "u"): 1, ("x", "v"): 0, ("x", "w"): 0}
            for hub, odd, even in (("u", 1, 0), ("v", 1, 0), ("w", 0, 1)):
                labels |= {
                    (hub, f"{hub}_{r}"): bit
                    for r, bit in zip(rs, _alternating(n, odd, even))
                }
    return labels


def paper_edge_pattern(spec: FamilySpec) -> tuple[int, ...]:
    graph = generate_family(spec)
    pattern = [-1] * graph.edge_count
    for (u, v), bit in _named_pattern(spec).items():
        pattern[graph.edge_id(u, v)] = bit
    if -1 in pattern:
        missing = graph.edge_name(pattern.index(-1))
        raise LabelingReconstructionError(
            f"{spec.label}: no printed label for edge {missing}"
        )
    return tuple(pattern)


def assignment_from_parities(odd: Sequence[bool]) -> VertexAssignment:
    """Hand out 1, 3, 5, ... to odd vertices and 2, 4, ... to the rest."""
    next_odd, next_even = 1, 2
    values: list[int] = []
    for is_odd in odd:
        if is_odd:
            values.append(next_odd)
            next_odd += 2
        else:
            values.append(next_even)
            next_even += 2
    return VertexAssignment(tuple(values))


def search_sdc(
    graph: Graph,
    pattern: Sequence[int] | None = None,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> VertexAssignment | None:
    """Search vertex parities for an SDC labeling.

    Labels only depend on parities, so the search fixes odd/even per vertex
    (index order, odd first) and turns the first feasible parity vector
    into a concrete bijection. Returns None when no labeling exists and
    raises SearchBudgetExceeded when ``budget`` nodes were not enough.
    """
    if budget <= 0:
        raise InvalidInstanceError("search budget must be positive")
    if pattern is not None and len(pattern) != graph.edge_count:
        raise InvalidInstanceError(
            f"pattern has {len(pattern)} entries, graph has "
            f"{graph.edge_count} edges"
        )
    vertex_count = graph.vertex_count
    odd_slots = (vertex_count + 1) // 2
    even_slots = vertex_count // 2

    # edges whose later endpoint is v are decided when v is placed
    closing: list[list[tuple[int, int]]] = [[] for _ in range(vertex_count)]
    for e, (u, v) in enumerate(graph.edges):
        closing[v].append((u, e))

    parity = [False] * vertex_count
    nodes = 0

    def place(v: int, odds: int, evens: int, ones: int, zeros: int) -> bool:
        nonlocal nodes
        if v == vertex_count:
            return abs(ones - zeros) <= 1
        for is_odd in (True, False):
            if is_odd and odds == odd_slots:
                continue
            if not is_odd and evens == even_slots:
                continue
            nodes += 1
            if nodes > budget:
                raise SearchBudgetExceeded(
                    f"labeling search exceeded {budget} nodes"
                )
            parity[v] = is_odd
            new_ones, new_zeros, ok = ones, zeros, True
            for u, e in closing[v]:
                bit = 1 if parity[u] == is_odd else 0
                if pattern is not None and pattern[e] != bit:
                    ok = False
                    break
                if bit:
                    new_ones += 1
                else:
                    new_zeros += 1
            if not ok:
                continue
            remaining = graph.edge_count - new_ones - new_zeros
            if abs(new_ones - new_zeros) - remaining > 1:
                continue
            if place(
                v + 1,
                odds + int(is_odd),
                evens + int(not is_odd),
                new_ones,
                new_zeros,
            ):
                return True
        return False

    if not place(0, 0, 0, 0, 0):
        logger.debug("no SDC labeling after %d nodes", nodes)
        return None
    logger.debug("SDC labeling found after %d nodes", nodes)
    return assignment_from_parities(parity)


def _closed_form_assignment(spec: FamilySpec) -> VertexAssignment | None:
    n = spec.n
    match spec.family:
        case Family.COMB:
            values = [2 * r - 1 for r in range(1, n + 1)]
            values += [2 * r for r in range(1, n + 1)]
        case Family.STAR:
            values = [1] + [r + 1 for r in range(1, n + 1)]
        case Family.SUBDIVIDED_STAR:
            values = [1] + [2 * r + 1 for r in range(1, n + 1)]
            values += [2 * r for r in range(1, n + 1)]
        case _:
            return None
    return VertexAssignment(tuple(values))


@lru_cache(maxsize=None)
def builtin_assignment(spec: FamilySpec) -> VertexAssignment:
    graph = generate_family(spec)
    pattern = paper_edge_pattern(spec)
    assignment = _closed_form_assignment(spec)
    if assignment is None:
        assignment = search_sdc(graph, pattern)
    if assignment is None:
        raise LabelingReconstructionError(
            f"{spec.family.value}: no bijection realizes the printed "
            f"pattern for n={spec.n}"
        )
    balanced, labeling = is_sdc(graph, assignment)
    if labeling.labels != pattern or not balanced:
        raise LabelingReconstructionError(
            f"{spec.family.value}: builtin assignment for n={spec.n} does "
            "not reproduce a balanced printed pattern"
        )
    return assignment


def builtin_labeling(spec: FamilySpec) -> EdgeLabeling:
    return derive_edge_labels(generate_family(spec), builtin_assignment(spec))
