from __future__ import annotations

import csv
import io
import json
import logging
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .engine import DEFAULT_MEMO_CAP
from .graphs import generate_family, symmetry_generators
from .labeling import builtin_labeling
from .models import (
    Certificate,
    Family,
    FamilySpec,
    GameSemantics,
    InvalidInstanceError,
    PaperWitnessCheck,
    PsiQuery,
    PsiResult,
    PsiStatus,
    SearchBudgetExceeded,
    VerificationCell,
    VerificationRow,
)
from .psi import check_paper_witness, closed_form, psi_ec
from .renderers import render_summary
from .utils import all_semantics, sanitize_path_segment

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    "family",
    "n",
    "paper_value",
    "semantics",
    "oracle_value",
    "status",
    "match",
    "witness_file",
    "runtime_ms",
)


@dataclass(slots=True)
class VerifyConfig:
    families: list[Family] = field(default_factory=lambda: list(Family))
    n_values: Sequence[int] = range(1, 3)
    report_dir: Path = Path("report")
    semantics: list[GameSemantics] = field(default_factory=all_semantics)
    cap_margin: int = 4
    workers: int = 1
    memo_cap: int = DEFAULT_MEMO_CAP
    use_symmetry: bool = False
    timings: bool = False

    def resolved_report_dir(self) -> Path:
        return self.report_dir.expanduser().resolve()

    def specs(self) -> list[FamilySpec]:
        specs: list[FamilySpec] = []
        for family in self.families:
            for n in self.n_values:
                if family is Family.COMB and n < 2:
                    continue
                if n >= 1:
                    specs.append(FamilySpec(family, n))
        return specs


def verify_family(
    spec: FamilySpec,
    semantics_list: Sequence[GameSemantics],
    m_cap: int | None = None,
    *,
    workers: int = 1,
    memo_cap: int = DEFAULT_MEMO_CAP,
    use_symmetry: bool = False,
) -> VerificationRow:
    """Compute psi under each reading and compare with the closed form.

    A mismatch is a finding, not an error; budget overruns become
    ``undetermined`` cells.
    """
    paper_value = closed_form(spec)
    cap = m_cap if m_cap is not None else paper_value + 4
    graph = generate_family(spec)
    labeling = builtin_labeling(spec)
    generators = symmetry_generators(spec, labeling) if use_symmetry else ()
    row = VerificationRow(spec=spec, paper_value=paper_value, m_cap=cap)

    for semantics in semantics_list:
        started = time.perf_counter()
        query = PsiQuery(
            graph=graph,
            labeling=labeling,
            semantics=semantics,
            m_cap=cap,
            use_symmetry=use_symmetry,
            generators=generators,
            workers=workers,
            memo_cap=memo_cap,
        )
        try:
            result: PsiResult | None = psi_ec(query)
            status = result.status
        except SearchBudgetExceeded as exc:
            logger.warning("%s %s: %s", spec.label, semantics.slug, exc)
            result = None
            status = PsiStatus.UNDETERMINED
        try:
            witness_check = check_paper_witness(
                spec, labeling, semantics, memo_cap=memo_cap
            )
        except SearchBudgetExceeded as exc:
            logger.warning(
                "%s %s lower-bound witness: %s", spec.label, semantics.slug, exc
            )
            witness_check = None
        elapsed = int((time.perf_counter() - started) * 1000)
        match = result is not None and result.value == paper_value
        row.cells.append(
            VerificationCell(
                semantics=semantics,
                result=result,
                status=status,
                match=match,
                runtime_ms=elapsed,
                paper_witness=witness_check,
            )
        )
        logger.info(
            "%s %s: oracle=%s closed form=%d",
            spec.label,
            semantics.slug,
            result.value if result is not None else "?",
            paper_value,
        )
    return row


def run_verification(
    config: VerifyConfig,
    progress: Callable[[str], None] | None = None,
) -> dict[str, Any]:
    if config.cap_margin < 0:
        raise InvalidInstanceError("cap margin must be nonnegative")
    out_dir = config.resolved_report_dir()
    out_dir.mkdir(parents=True, exist_ok=True)

    rows: list[VerificationRow] = []
    for spec in config.specs():
        if progress is not None:
            progress(f"verifying {spec.label} ...")
        row = verify_family(
            spec,
            config.semantics,
            closed_form(spec) + config.cap_margin,
            workers=config.workers,
            memo_cap=config.memo_cap,
            use_symmetry=config.use_symmetry,
        )
        _write_evidence(out_dir, row)
        rows.append(row)

    csv_text = render_csv(rows, timings=config.timings)
    (out_dir / "report.csv").write_text(csv_text, encoding="utf-8")
    (out_dir / "summary.md").write_text(
        render_summary(rows), encoding="utf-8"
    )
    return {
        "out_dir": out_dir,
        "row_count": len(rows),
        "cell_count": sum(len(row.cells) for row in rows),
        "match_count": sum(
            cell.match for row in rows for cell in row.cells
        ),
    }


def evidence_name(spec: FamilySpec, semantics: GameSemantics) -> str:
    stem = sanitize_path_segment(
        f"{spec.family.value}-{spec.n}-{semantics.slug}", "cell"
    )
    return f"evidence/{stem}.json"


def certificate_payload(cert: Certificate) -> dict[str, Any]:
    return {
        "counts": list(cert.start.counts),
        "moves": [move.as_pair() for move in cert.moves],
    }


def _paper_witness_payload(
    check: PaperWitnessCheck | None,
) -> dict[str, Any] | None:
    if check is None:
        return None
    return {
        "edge": check.edge,
        "witness_counts": list(check.witness.counts),
        "witness_solvable": check.witness_solvable,
        "raised_counts": list(check.raised.counts),
        "raised_solvable": check.raised_solvable,
        "raised_certificate": (
            [move.as_pair() for move in check.raised_certificate]
            if check.raised_certificate is not None
            else None
        ),
        "consistent": check.consistent,
    }


def evidence_payload(
    row: VerificationRow,
    cell: VerificationCell,
) -> dict[str, Any]:
    result = cell.result
    witness = None
    if result is not None and result.witness is not None:
        size, distribution = result.witness
        witness = {"size": size, "counts": list(distribution.counts)}
    return {
        "family": row.spec.family.value,
        "n": row.spec.n,
        "semantics": cell.semantics.slug,
        "m_cap": row.m_cap,
        "paper_value": row.paper_value,
        "oracle_value": result.value if result is not None else None,
        "status": cell.status.value,
        "sizes_scanned": list(result.sizes_scanned) if result else [],
        "witness": witness,
        "certificates": (
            [certificate_payload(c) for c in result.certificates]
            if result is not None
            else []
        ),
        "paper_witness": _paper_witness_payload(cell.paper_witness),
    }


def _write_evidence(out_dir: Path, row: VerificationRow) -> None:
    for cell in row.cells:
        relative = evidence_name(row.spec, cell.semantics)
        path = out_dir / relative
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps(evidence_payload(row, cell), indent=2) + "\n",
            encoding="utf-8",
        )
        cell.evidence_file = relative


def render_csv(rows: Sequence[VerificationRow], *, timings: bool) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        for cell in row.cells:
            value = cell.result.value if cell.result is not None else None
            writer.writerow(
                [
                    row.spec.family.value,
                    row.spec.n,
                    row.paper_value,
                    cell.semantics.slug,
                    "" if value is None else value,
                    cell.status.value,
                    "true" if cell.match else "false",
                    cell.evidence_file or "",
                    cell.runtime_ms if timings else "",
                ]
            )
    return buffer.getvalue()
