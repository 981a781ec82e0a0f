from __future__ import annotations

import csv
import json
import tempfile
import unittest
from pathlib import Path

from pebblekit.engine import replay, solve
from pebblekit.graphs import generate_family
from pebblekit.labeling import builtin_labeling
from pebblekit.models import (
    Distribution,
    Family,
    FamilySpec,
    GameSemantics,
    Move,
    PsiStatus,
    Quantifier,
)
from pebblekit.utils import all_semantics, parse_semantics
from pebblekit.verify import (
    CSV_COLUMNS,
    VerifyConfig,
    evidence_name,
    evidence_payload,
    run_verification,
    verify_family,
)

READINGS = [
    parse_semantics("resting-initial-exact"),
    parse_semantics("must-receive-initial-exact"),
]


class VerifyFamilyTests(unittest.TestCase):
    def test_star_four_row(self) -> None:
        row = verify_family(FamilySpec(Family.STAR, 4), [GameSemantics()])
        self.assertEqual(row.paper_value, 4)
        self.assertEqual(row.m_cap, 8)
        cell = row.cells[0]
        self.assertEqual(cell.result.value, 3)
        self.assertEqual(cell.status, PsiStatus.DETERMINED)
        self.assertFalse(cell.match)
        self.assertTrue(cell.paper_witness.consistent)
        self.assertEqual(row.oracle_values, {"resting-initial-exact": 3})
        self.assertEqual(row.match_flags, {"resting-initial-exact": False})

    def test_cyclic_family_row_evidence(self) -> None:
        spec = FamilySpec(Family.TWO_STARS_DELTA, 1)
        graph = generate_family(spec)
        labeling = builtin_labeling(spec)
        row = verify_family(spec, all_semantics())
        self.assertEqual(row.paper_value, 6)
        self.assertEqual(row.m_cap, 10)
        self.assertEqual(len(row.cells), 8)
        for cell in row.cells:
            semantics = cell.semantics
            payload = evidence_payload(row, cell)
            with self.subTest(semantics=semantics.slug):
                self.assertEqual(payload["family"], "two-stars-delta")
                self.assertEqual(payload["n"], 1)
                self.assertEqual(payload["semantics"], semantics.slug)
                self.assertEqual(payload["m_cap"], 10)
                self.assertEqual(payload["paper_value"], 6)
                self.assertIn(
                    payload["status"],
                    ("determined", "undetermined-at-cap"),
                )
                scanned = payload["sizes_scanned"]
                if semantics.quantifier is Quantifier.EXACT_SIZE:
                    self.assertEqual(scanned, list(range(1, len(scanned) + 1)))
                else:
                    self.assertEqual(scanned[0], 10)
                    self.assertEqual(scanned, sorted(scanned, reverse=True))

                value = payload["oracle_value"]
                self.assertEqual(
                    value is not None, bool(payload["certificates"])
                )
                self.assertEqual(cell.match, value == 6)
                for cert in payload["certificates"]:
                    self.assertEqual(sum(cert["counts"]), value)
                    start = Distribution(tuple(cert["counts"]))
                    moves = [Move(*pair) for pair in cert["moves"]]
                    self.assertTrue(
                        replay(graph, labeling, start, moves, semantics).ok
                    )

                witness = payload["witness"]
                if witness is not None:
                    self.assertEqual(sum(witness["counts"]), witness["size"])
                    if value is not None:
                        self.assertEqual(witness["size"], value - 1)
                    counterexample = Distribution(tuple(witness["counts"]))
                    self.assertFalse(
                        solve(graph, labeling, counterexample, semantics)
                        .solvable
                    )

                lower = payload["paper_witness"]
                self.assertEqual(sum(lower["witness_counts"]), 4)
                self.assertEqual(sum(lower["raised_counts"]), 6)
                raised = Distribution(tuple(lower["raised_counts"]))
                self.assertEqual(
                    lower["raised_solvable"],
                    solve(graph, labeling, raised, semantics).solvable,
                )
                if lower["raised_certificate"] is not None:
                    moves = [Move(*p) for p in lower["raised_certificate"]]
                    self.assertTrue(
                        replay(graph, labeling, raised, moves, semantics).ok
                    )
        resting = row.cells[0].paper_witness
        self.assertEqual(row.cells[0].semantics, GameSemantics())
        self.assertTrue(resting.consistent)

    def test_cap_reached_cells_carry_a_witness(self) -> None:
        readings = [
            parse_semantics("must-receive-always-exact"),
            parse_semantics("must-receive-always-at-least"),
        ]
        row = verify_family(FamilySpec(Family.STAR, 2), readings)
        self.assertEqual(row.m_cap, 6)
        exact, at_least = (evidence_payload(row, c) for c in row.cells)
        for payload in (exact, at_least):
            with self.subTest(semantics=payload["semantics"]):
                self.assertEqual(payload["status"], "undetermined-at-cap")
                self.assertIsNone(payload["oracle_value"])
                self.assertEqual(payload["certificates"], [])
                self.assertEqual(
                    payload["witness"], {"size": 6, "counts": [0, 6]}
                )
        self.assertEqual(exact["sizes_scanned"], [1, 2, 3, 4, 5, 6])
        self.assertEqual(at_least["sizes_scanned"], [6])
        self.assertEqual(row.match_flags, {
            "must-receive-always-exact": False,
            "must-receive-always-at-least": False,
        })

    def test_budget_overrun_becomes_undetermined(self) -> None:
        row = verify_family(
            FamilySpec(Family.STAR, 4), [GameSemantics()], memo_cap=1
        )
        cell = row.cells[0]
        self.assertIsNone(cell.result)
        self.assertEqual(cell.status, PsiStatus.UNDETERMINED)
        self.assertFalse(cell.match)

    def test_evidence_name(self) -> None:
        self.assertEqual(
            evidence_name(FamilySpec(Family.STAR_OF_STARS, 2), GameSemantics()),
            "evidence/star-of-stars-2-resting-initial-exact.json",
        )

    def test_config_skips_single_tooth_comb(self) -> None:
        config = VerifyConfig(families=[Family.COMB], n_values=range(1, 3))
        self.assertEqual(config.specs(), [FamilySpec(Family.COMB, 2)])


class RunVerificationTests(unittest.TestCase):
    def _run(self, out_dir: Path, workers: int) -> dict:
        config = VerifyConfig(
            families=[Family.STAR],
            n_values=range(2, 4),
            report_dir=out_dir,
            semantics=READINGS,
            cap_margin=2,
            workers=workers,
        )
        return run_verification(config)

    def test_writes_report_summary_and_evidence(self) -> None:
        with tempfile.TemporaryDirectory() as tmpdir:
            out_dir = Path(tmpdir) / "report"
            messages: list[str] = []
            config = VerifyConfig(
                families=[Family.STAR],
                n_values=range(2, 4),
                report_dir=out_dir,
                semantics=READINGS,
                cap_margin=2,
            )
            result = run_verification(config, progress=messages.append)

            self.assertEqual(result["row_count"], 2)
            self.assertEqual(result["cell_count"], 4)
            self.assertEqual(messages, ["verifying star(2) ...",
                                        "verifying star(3) ..."])

            with (out_dir / "report.csv").open(encoding="utf-8") as handle:
                rows = list(csv.DictReader(handle))
            self.assertEqual(tuple(rows[0].keys()), CSV_COLUMNS)
            self.assertEqual(len(rows), 4)
            first = rows[0]
            self.assertEqual(first["family"], "star")
            self.assertEqual(first["n"], "2")
            self.assertEqual(first["paper_value"], "2")
            self.assertEqual(first["semantics"], "resting-initial-exact")
            self.assertEqual(first["oracle_value"], "1")
            self.assertEqual(first["status"], "determined")
            self.assertEqual(first["match"], "false")
            self.assertEqual(first["runtime_ms"], "")

            for row in rows:
                evidence = out_dir / row["witness_file"]
                self.assertTrue(evidence.exists(), row["witness_file"])
            payload = json.loads((out_dir / first["witness_file"]).read_text())
            self.assertEqual(payload["oracle_value"], 1)
            self.assertEqual(payload["semantics"], "resting-initial-exact")
            self.assertEqual(payload["sizes_scanned"], [1])
            self.assertIsNone(payload["paper_witness"])

            summary = (out_dir / "summary.md").read_text(encoding="utf-8")
            self.assertIn("## star(2)", summary)
            self.assertIn("resting-initial-exact", summary)

    def test_output_independent_of_worker_count(self) -> None:
        with tempfile.TemporaryDirectory() as tmpdir:
            serial = Path(tmpdir) / "serial"
            pooled = Path(tmpdir) / "pooled"
            self._run(serial, workers=1)
            self._run(pooled, workers=2)
            names = sorted(
                p.relative_to(serial).as_posix()
                for p in serial.rglob("*")
                if p.is_file()
            )
            self.assertIn("report.csv", names)
            for name in names:
                with self.subTest(file=name):
                    self.assertEqual(
                        (serial / name).read_bytes(),
                        (pooled / name).read_bytes(),
                    )

    def test_timings_fill_runtime_column(self) -> None:
        with tempfile.TemporaryDirectory() as tmpdir:
            config = VerifyConfig(
                families=[Family.STAR],
                n_values=range(2, 3),
                report_dir=Path(tmpdir),
                semantics=READINGS[:1],
                timings=True,
            )
            run_verification(config)
            with (Path(tmpdir) / "report.csv").open(encoding="utf-8") as fh:
                row = next(csv.DictReader(fh))
            self.assertTrue(row["runtime_ms"].isdigit())


if __name__ == "__main__":  # pragma: no cover
    unittest.main()
