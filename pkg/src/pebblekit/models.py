from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any

import networkx as nx


class InvalidInstanceError(ValueError):
    """Raised when an input violates a precondition of an operation."""


class SearchBudgetExceeded(RuntimeError):
    """Raised when a search exceeds its node or memo budget."""


class Family(str, Enum):
    COMB = "comb"
    STAR = "star"
    SUBDIVIDED_STAR = "subdivided-star"
    BISTAR = "bistar"
    SUBDIVIDED_BISTAR = "subdivided-bistar"
    TWO_STARS_DELTA = "two-stars-delta"
    DEGREE_SPLIT_BISTAR = "degree-split-bistar"
    STAR_OF_STARS = "star-of-stars"


@dataclass(slots=True, frozen=True)
class FamilySpec:
    family: Family
    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise InvalidInstanceError(
                f"{self.family.value}: n must be a positive integer, "
                f"got {self.n!r}"
            )
        if self.family is Family.COMB and self.n < 2:
            raise InvalidInstanceError("comb: n must be at least 2")

    @property
    def label(self) -> str:
        return f"{self.family.value}({self.n})"


@dataclass(frozen=True)
class Graph:
    """Simple connected undirected graph with canonically ordered edges.

    Edge ``i`` of ``edges`` is EdgeId ``i``; every per-edge vector in the
    package is aligned to this order.
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    vertex_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.vertex_count < 1:
            raise InvalidInstanceError("graph needs at least one vertex")
        # a connected graph on n vertices has at least n - 1 edges
        if len(self.edges) < self.vertex_count - 1:
            raise InvalidInstanceError("graph is not connected")
        seen: set[tuple[int, int]] = set()
        for index, (u, v) in enumerate(self.edges):
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise InvalidInstanceError(
                    f"edge {index} ({u},{v}) references a missing vertex"
                )
            if u == v:
                raise InvalidInstanceError(f"edge {index} is a loop at {u}")
            if u > v:
                raise InvalidInstanceError(
                    f"edge {index} ({u},{v}) is not stored as (min, max)"
                )
            if (u, v) in seen:
                raise InvalidInstanceError(
                    f"edge {index} ({u},{v}) is a duplicate"
                )
            seen.add((u, v))
        if list(self.edges) != sorted(self.edges):
            raise InvalidInstanceError("edges are not in canonical order")
        if self.vertex_names is not None:
            if len(self.vertex_names) != self.vertex_count:
                raise InvalidInstanceError(
                    "vertex_names must name every vertex exactly once"
                )
        if not nx.is_connected(self.nx_graph):
            raise InvalidInstanceError("graph is not connected")

    @classmethod
    def from_edges(
        cls,
        vertex_count: int,
        edges: Any,
        names: Any = None,
    ) -> Graph:
        """Build a graph from edges in any order and orientation."""
        canonical = sorted(
            (min(int(u), int(v)), max(int(u), int(v))) for u, v in edges
        )
        return cls(
            vertex_count=vertex_count,
            edges=tuple(canonical),
            vertex_names=tuple(names) if names is not None else None,
        )

    def __getstate__(self) -> dict[str, Any]:
        # cached views are rebuilt on first use after unpickling
        return {
            "vertex_count": self.vertex_count,
            "edges": self.edges,
            "vertex_names": self.vertex_names,
        }

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def nx_graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.vertex_count))
        graph.add_edges_from(self.edges)
        return graph

    @cached_property
    def line_adjacency(self) -> tuple[tuple[int, ...], ...]:
        index = {edge: i for i, edge in enumerate(self.edges)}
        line = nx.line_graph(self.nx_graph)
        adjacency: list[tuple[int, ...]] = []
        for edge in self.edges:
            neighbors = (
                index[(min(f), max(f))] for f in line.neighbors(edge)
            )
            adjacency.append(tuple(sorted(neighbors)))
        return tuple(adjacency)

    @cached_property
    def edge_distances(self) -> tuple[tuple[int, ...], ...]:
        line = nx.Graph()
        line.add_nodes_from(range(self.edge_count))
        for e, neighbors in enumerate(self.line_adjacency):
            line.add_edges_from((e, f) for f in neighbors)
        rows: list[tuple[int, ...]] = []
        for e in range(self.edge_count):
            lengths = nx.single_source_shortest_path_length(line, e)
            rows.append(tuple(lengths[f] for f in range(self.edge_count)))
        return tuple(rows)

    def check_edge(self, e: int) -> int:
        if not isinstance(e, int) or not 0 <= e < self.edge_count:
            raise InvalidInstanceError(
                f"edge id {e!r} out of range [0, {self.edge_count})"
            )
        return e

    def degree(self, v: int) -> int:
        return self.nx_graph.degree(v)

    def vertex_name(self, v: int) -> str:
        if self.vertex_names is None:
            return str(v)
        return self.vertex_names[v]

    def edge_name(self, e: int) -> str:
        u, v = self.edges[self.check_edge(e)]
        return f"{self.vertex_name(u)}~{self.vertex_name(v)}"

    def edge_id(self, name_u: str, name_v: str) -> int:
        names = self.vertex_names or tuple(
            str(v) for v in range(self.vertex_count)
        )
        try:
            u, v = names.index(name_u), names.index(name_v)
        except ValueError as exc:
            raise InvalidInstanceError(
                f"no vertex named {name_u!r} or {name_v!r}"
            ) from exc
        try:
            return self.edges.index((min(u, v), max(u, v)))
        except ValueError as exc:
            raise InvalidInstanceError(
                f"{name_u} and {name_v} are not adjacent"
            ) from exc


@dataclass(slots=True, frozen=True)
class EdgePermutation:
    mapping: tuple[int, ...]

    def apply(self, counts: tuple[int, ...]) -> tuple[int, ...]:
        permuted = [0] * len(counts)
        for e, image in enumerate(self.mapping):
            permuted[image] = counts[e]
        return tuple(permuted)


@dataclass(slots=True, frozen=True)
class VertexAssignment:
    """Position ``v`` holds g(v)."""

    values: tuple[int, ...]

    def is_bijection(self, vertex_count: int) -> bool:
        return sorted(self.values) == list(range(1, vertex_count + 1))


@dataclass(slots=True, frozen=True)
class EdgeLabeling:
    assignment: VertexAssignment | None
    labels: tuple[int, ...]
    e0_count: int
    e1_count: int
    sdc1: frozenset[int]
    sdc0: frozenset[int]

    @classmethod
    def from_labels(
        cls,
        labels: tuple[int, ...],
        assignment: VertexAssignment | None = None,
    ) -> EdgeLabeling:
        labels = tuple(int(bit) for bit in labels)
        if any(bit not in (0, 1) for bit in labels):
            raise InvalidInstanceError("edge labels must be 0 or 1")
        ones = frozenset(e for e, bit in enumerate(labels) if bit == 1)
        zeros = frozenset(e for e, bit in enumerate(labels) if bit == 0)
        return cls(
            assignment=assignment,
            labels=labels,
            e0_count=len(zeros),
            e1_count=len(ones),
            sdc1=ones,
            sdc0=zeros,
        )

    @property
    def is_balanced(self) -> bool:
        return abs(self.e0_count - self.e1_count) <= 1


@dataclass(slots=True, frozen=True)
class Distribution:
    counts: tuple[int, ...]
    total: int = field(init=False)

    def __post_init__(self) -> None:
        if any(c < 0 for c in self.counts):
            raise InvalidInstanceError("pebble counts must be nonnegative")
        object.__setattr__(self, "total", sum(self.counts))

    @classmethod
    def concentrated(cls, edge_count: int, e: int, count: int) -> Distribution:
        counts = [0] * edge_count
        counts[e] = count
        return cls(tuple(counts))


class CoverRule(str, Enum):
    RESTING_COUNTS = "resting"
    MUST_RECEIVE = "must-receive"


class ParityRule(str, Enum):
    INITIAL_ONLY = "initial"
    ALWAYS = "always"


class Quantifier(str, Enum):
    EXACT_SIZE = "exact"
    ALL_SIZES_AT_LEAST = "at-least"


@dataclass(slots=True, frozen=True)
class GameSemantics:
    cover_rule: CoverRule = CoverRule.RESTING_COUNTS
    parity_rule: ParityRule = ParityRule.INITIAL_ONLY
    quantifier: Quantifier = Quantifier.EXACT_SIZE

    @property
    def slug(self) -> str:
        return (
            f"{self.cover_rule.value}-{self.parity_rule.value}-"
            f"{self.quantifier.value}"
        )


@dataclass(slots=True, frozen=True)
class Move:
    source: int
    target: int

    def as_pair(self) -> list[int]:
        return [self.source, self.target]


@dataclass(slots=True, frozen=True)
class SolveOutcome:
    solvable: bool
    certificate: tuple[Move, ...] | None
    nodes_explored: int
    memo_hits: int


@dataclass(slots=True, frozen=True)
class ReplayResult:
    ok: bool
    final: Distribution
    failed_step: int | None = None


class PsiStatus(str, Enum):
    DETERMINED = "determined"
    UNDETERMINED_AT_CAP = "undetermined-at-cap"
    UNDETERMINED = "undetermined"


@dataclass(slots=True, frozen=True)
class PsiQuery:
    graph: Graph
    labeling: EdgeLabeling
    semantics: GameSemantics = GameSemantics()
    m_cap: int = 8
    use_symmetry: bool = False
    generators: tuple[EdgePermutation, ...] = ()
    workers: int = 1
    memo_cap: int = 50_000_000

    def __post_init__(self) -> None:
        if self.m_cap < 1:
            raise InvalidInstanceError("m_cap must be at least 1")
        if self.workers < 1:
            raise InvalidInstanceError("workers must be at least 1")


@dataclass(slots=True, frozen=True)
class Certificate:
    start: Distribution
    moves: tuple[Move, ...]


@dataclass(slots=True, frozen=True)
class PsiResult:
    value: int | None
    status: PsiStatus
    witness: tuple[int, Distribution] | None
    solvable_certificates_checked: int
    convention: GameSemantics
    certificates: tuple[Certificate, ...] = ()
    sizes_scanned: tuple[int, ...] = ()


@dataclass(slots=True, frozen=True)
class PaperWitnessCheck:
    edge: int
    witness: Distribution
    witness_solvable: bool
    raised: Distribution
    raised_solvable: bool
    raised_certificate: tuple[Move, ...] | None

    @property
    def consistent(self) -> bool:
        return not self.witness_solvable and self.raised_solvable


@dataclass(slots=True)
class VerificationCell:
    semantics: GameSemantics
    result: PsiResult | None
    status: PsiStatus
    match: bool
    evidence_file: str | None = None
    runtime_ms: int = 0
    paper_witness: PaperWitnessCheck | None = None


@dataclass(slots=True)
class VerificationRow:
    spec: FamilySpec
    paper_value: int
    m_cap: int
    cells: list[VerificationCell] = field(default_factory=list)

    @property
    def oracle_values(self) -> dict[str, int | None]:
        return {
            cell.semantics.slug: (
                cell.result.value if cell.result is not None else None
            )
            for cell in self.cells
        }

    @property
    def match_flags(self) -> dict[str, bool]:
        return {cell.semantics.slug: cell.match for cell in self.cells}
