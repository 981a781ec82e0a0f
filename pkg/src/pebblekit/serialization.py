from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import yaml

from .models import (
    Distribution,
    Graph,
    InvalidInstanceError,
    Move,
    VertexAssignment,
)


class FormatError(ValueError):
    """Raised when a graph, labeling, distribution or certificate file is
    malformed."""


def _parse(text: str, what: str) -> Any:
    # YAML is a superset of JSON, so hand-edited files in either syntax load
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = (
            f" at line {mark.line + 1}, column {mark.column + 1}"
            if mark is not None
            else ""
        )
        raise FormatError(f"{what} is not valid structured text{where}") from exc


def _mapping(text: str, what: str) -> dict[str, Any]:
    parsed = _parse(text, what)
    if not isinstance(parsed, dict):
        raise FormatError(f"{what} root document must be a mapping")
    return parsed


def _int_list(value: Any, what: str, field: str) -> list[int]:
    if not isinstance(value, list):
        raise FormatError(f"{what}: '{field}' must be an array")
    for index, item in enumerate(value):
        if not isinstance(item, int) or isinstance(item, bool):
            raise FormatError(
                f"{what}: '{field}[{index}]' must be an integer, "
                f"got {item!r}"
            )
    return value


def _dump(payload: Any) -> str:
    return json.dumps(payload, indent=2) + "\n"


def load_graph(text: str) -> Graph:
    data = _mapping(text, "graph file")
    vertex_count = data.get("vertex_count")
    if not isinstance(vertex_count, int) or isinstance(vertex_count, bool):
        raise FormatError("graph file: 'vertex_count' must be an integer")
    raw_edges = data.get("edges")
    if not isinstance(raw_edges, list):
        raise FormatError("graph file: 'edges' must be an array")
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for index, pair in enumerate(raw_edges):
        pair = _int_list(pair, "graph file", f"edges[{index}]")
        if len(pair) != 2:
            raise FormatError(
                f"graph file: 'edges[{index}]' must have two endpoints"
            )
        u, v = pair
        if u == v:
            raise FormatError(f"graph file: 'edges[{index}]' is a loop")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise FormatError(
                f"graph file: 'edges[{index}]' duplicates an earlier edge"
            )
        seen.add(key)
        edges.append(key)
    names = data.get("names")
    if names is not None and (
        not isinstance(names, list)
        or not all(isinstance(name, str) for name in names)
    ):
        raise FormatError("graph file: 'names' must be an array of strings")
    try:
        return Graph.from_edges(vertex_count, edges, names)
    except InvalidInstanceError as exc:
        raise FormatError(f"graph file: {exc}") from exc


def save_graph(graph: Graph) -> str:
    payload: dict[str, Any] = {
        "vertex_count": graph.vertex_count,
        "edges": [list(edge) for edge in graph.edges],
    }
    if graph.vertex_names is not None:
        payload["names"] = list(graph.vertex_names)
    return _dump(payload)


def load_assignment(text: str) -> VertexAssignment:
    data = _mapping(text, "labeling file")
    values = _int_list(data.get("assignment"), "labeling file", "assignment")
    return VertexAssignment(tuple(values))


def save_assignment(
    assignment: VertexAssignment,
    labels: tuple[int, ...] | None = None,
) -> str:
    payload: dict[str, Any] = {"assignment": list(assignment.values)}
    if labels is not None:
        payload["labels"] = list(labels)
    return _dump(payload)


def load_distribution(text: str) -> Distribution:
    data = _mapping(text, "distribution file")
    counts = _int_list(data.get("counts"), "distribution file", "counts")
    for index, count in enumerate(counts):
        if count < 0:
            raise FormatError(
                f"distribution file: 'counts[{index}]' is negative"
            )
    return Distribution(tuple(counts))


def save_distribution(d: Distribution) -> str:
    return _dump({"counts": list(d.counts)})


def load_certificate(text: str) -> tuple[Move, ...]:
    data = _parse(text, "certificate file")
    if not isinstance(data, list):
        raise FormatError("certificate file root must be an array")
    moves: list[Move] = []
    for index, pair in enumerate(data):
        pair = _int_list(pair, "certificate file", f"[{index}]")
        if len(pair) != 2:
            raise FormatError(f"certificate file: move {index} needs 2 ids")
        moves.append(Move(pair[0], pair[1]))
    return tuple(moves)


def save_certificate(moves: tuple[Move, ...]) -> str:
    return json.dumps([move.as_pair() for move in moves]) + "\n"


def read_text(path: Path, what: str) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"Failed to read {what} at {path}") from exc


def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
