from __future__ import annotations

import json
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from jinja2 import Environment, FileSystemLoader, select_autoescape

from .models import VerificationCell, VerificationRow

_ENV: Environment | None = None


def _environment() -> Environment:
    global _ENV
    if _ENV is None:
        template_dir = Path(__file__).resolve().parent / "templates"
        _ENV = Environment(
            loader=FileSystemLoader(str(template_dir)),
            autoescape=select_autoescape(["html", "xml"]),
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
        )
        _ENV.filters["jsonify"] = _jsonify
    return _ENV


def _jsonify(value: Any) -> str:
    return json.dumps(value, separators=(",", ":"))


def _cell_context(cell: VerificationCell) -> dict[str, Any]:
    result = cell.result
    witness = None
    if result is not None and result.witness is not None:
        size, distribution = result.witness
        witness = {"size": size, "counts": list(distribution.counts)}
    check = cell.paper_witness
    return {
        "semantics": cell.semantics.slug,
        "value": result.value if result is not None else None,
        "status": cell.status.value,
        "match": cell.match,
        "witness": witness,
        "checked": (
            result.solvable_certificates_checked if result is not None else 0
        ),
        "evidence": cell.evidence_file,
        "paper_witness": (
            None
            if check is None
            else {
                "counts": list(check.witness.counts),
                "unsolvable": not check.witness_solvable,
                "raised_solvable": check.raised_solvable,
            }
        ),
    }


def render_summary(rows: Sequence[VerificationRow]) -> str:
    template = _environment().get_template("summary.md.j2")
    context_rows = [
        {
            "label": row.spec.label,
            "paper_value": row.paper_value,
            "m_cap": row.m_cap,
            "cells": [_cell_context(cell) for cell in row.cells],
        }
        for row in rows
    ]
    cells = [cell for row in rows for cell in row.cells]
    return template.render(
        rows=context_rows,
        cell_count=len(cells),
        match_count=sum(cell.match for cell in cells),
    )
