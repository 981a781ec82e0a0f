from __future__ import annotations

import json
import logging
import os
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Optional

import click

from .engine import DEFAULT_MEMO_CAP, is_restricted, replay, solve
from .graphs import generate_family, symmetry_generators
from .labeling import (
    LabelingReconstructionError,
    builtin_assignment,
    derive_edge_labels,
    is_sdc,
    paper_edge_pattern,
)
from .models import (
    CoverRule,
    FamilySpec,
    GameSemantics,
    InvalidInstanceError,
    ParityRule,
    PsiQuery,
    Quantifier,
    SearchBudgetExceeded,
)
from .psi import classic_cover_number, closed_form, psi_ec
from .serialization import (
    FormatError,
    load_assignment,
    load_certificate,
    load_distribution,
    load_graph,
    read_text,
    save_assignment,
    save_certificate,
    save_distribution,
    save_graph,
    write_text,
)
from .utils import (
    all_semantics,
    parse_families,
    parse_family,
    parse_n_range,
    parse_semantics,
)
from .verify import VerifyConfig, certificate_payload, run_verification

EXIT_INPUT_ERROR = 1
EXIT_BUDGET_ERROR = 2


class BudgetError(click.ClickException):
    exit_code = EXIT_BUDGET_ERROR


class _Group(click.Group):
    """Report usage mistakes with the input-error exit status."""

    def make_context(self, *args: Any, **kwargs: Any) -> click.Context:
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as exc:
            exc.exit_code = EXIT_INPUT_ERROR
            raise

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except click.UsageError as exc:
            exc.exit_code = EXIT_INPUT_ERROR
            raise


@contextmanager
def _reported_errors() -> Iterator[None]:
    try:
        yield
    except SearchBudgetExceeded as exc:
        raise BudgetError(str(exc)) from exc
    except (
        FormatError,
        InvalidInstanceError,
        LabelingReconstructionError,
    ) as exc:
        raise click.ClickException(str(exc)) from exc


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        write_text(out, text)
        click.echo(f"Wrote {out}", err=True)


def _family_spec(family: str, n: int) -> FamilySpec:
    return FamilySpec(parse_family(family), n)


def _semantics(
    cover_rule: str,
    parity: str,
    quantifier: str = Quantifier.EXACT_SIZE.value,
) -> GameSemantics:
    return GameSemantics(
        CoverRule(cover_rule), ParityRule(parity), Quantifier(quantifier)
    )


_family_option = click.option(
    "--family",
    required=True,
    help="Graph family, e.g. comb, star, bistar, star-of-stars.",
)
_n_option = click.option(
    "--n",
    "n",
    type=int,
    required=True,
    help="Family parameter.",
)
_cover_option = click.option(
    "--cover-rule",
    type=click.Choice([rule.value for rule in CoverRule]),
    default=CoverRule.RESTING_COUNTS.value,
    show_default=True,
    help="Whether resting pebbles cover label-1 edges.",
)
_parity_option = click.option(
    "--parity",
    type=click.Choice([rule.value for rule in ParityRule]),
    default=ParityRule.INITIAL_ONLY.value,
    show_default=True,
    help="Keep label-0 edges even in the start state only, or always.",
)
_workers_option = click.option(
    "--workers",
    type=click.IntRange(min=1),
    default=lambda: os.cpu_count() or 1,
    show_default="machine parallelism",
    help="Worker processes for per-size solving.",
)


@click.group(
    cls=_Group,
    help=(
        "Restricted SDC edge cover pebbling: labelings, solvability and "
        "psi_EC values."
    ),
)
@click.option(
    "--memo-cap",
    type=click.IntRange(min=1),
    envvar="PEBBLEKIT_MEMO_CAP",
    default=DEFAULT_MEMO_CAP,
    show_default=True,
    help="Failed-state memo entries per solve before giving up.",
)
@click.option("-v", "--verbose", count=True, help="Log progress to stderr.")
@click.pass_context
def cli(ctx: click.Context, memo_cap: int, verbose: int) -> None:
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    ctx.obj = {"memo_cap": memo_cap}


@cli.command("generate", help="Write a family graph file.")
@_family_option
@_n_option
@click.option("--out", type=click.Path(path_type=Path), default=None)
def generate_command(family: str, n: int, out: Path | None) -> None:
    with _reported_errors():
        graph = generate_family(_family_spec(family, n))
    _emit(save_graph(graph), out)


@cli.command("label", help="Write or check a family's SDC labeling.")
@_family_option
@_n_option
@click.option(
    "--check",
    "check_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Assignment file to check instead of the builtin labeling.",
)
@click.option("--out", type=click.Path(path_type=Path), default=None)
def label_command(
    family: str,
    n: int,
    check_path: Path | None,
    out: Path | None,
) -> None:
    with _reported_errors():
        spec = _family_spec(family, n)
        graph = generate_family(spec)
        if check_path is None:
            assignment = builtin_assignment(spec)
            labeling = derive_edge_labels(graph, assignment)
        else:
            assignment = load_assignment(read_text(check_path, "labeling"))
            balanced, labeling = is_sdc(graph, assignment)
            pattern = labeling.labels == paper_edge_pattern(spec)
            click.echo(
                f"e0={labeling.e0_count} e1={labeling.e1_count} "
                f"sdc={'yes' if balanced else 'no'} "
                f"printed-pattern={'yes' if pattern else 'no'}",
                err=True,
            )
            if not balanced:
                raise click.ClickException(
                    f"{check_path} is not an SDC labeling of {spec.label}"
                )
    _emit(save_assignment(assignment, labeling.labels), out)


@cli.command("solve", help="Decide one restricted distribution.")
@click.option("--graph", "graph_path", type=click.Path(path_type=Path),
              required=True)
@click.option("--labeling", "labeling_path", type=click.Path(path_type=Path),
              required=True)
@click.option("--dist", "dist_path", type=click.Path(path_type=Path),
              required=True)
@_cover_option
@_parity_option
@click.option(
    "--certificate",
    "certificate_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Where to write the move sequence when solvable.",
)
@click.option(
    "--replay",
    "replay_path",
    type=click.Path(path_type=Path),
    default=None,
    help="Check a saved move sequence instead of searching.",
)
@click.pass_obj
def solve_command(
    obj: dict[str, Any],
    graph_path: Path,
    labeling_path: Path,
    dist_path: Path,
    cover_rule: str,
    parity: str,
    certificate_path: Path | None,
    replay_path: Path | None,
) -> None:
    with _reported_errors():
        graph = load_graph(read_text(graph_path, "graph"))
        assignment = load_assignment(read_text(labeling_path, "labeling"))
        labeling = derive_edge_labels(graph, assignment)
        dist = load_distribution(read_text(dist_path, "distribution"))
        if len(dist.counts) != graph.edge_count:
            raise InvalidInstanceError(
                f"distribution has {len(dist.counts)} counts, graph has "
                f"{graph.edge_count} edges"
            )
        if not is_restricted(dist, labeling):
            raise InvalidInstanceError(
                "distribution puts an odd count on a label-0 edge"
            )
        if replay_path is not None:
            moves = load_certificate(read_text(replay_path, "certificate"))
            checked = replay(
                graph, labeling, dist, moves, _semantics(cover_rule, parity)
            )
            if not checked.ok:
                raise click.ClickException(
                    f"certificate fails at step {checked.failed_step} "
                    f"of {len(moves)}"
                )
            click.echo(f"certificate ok: {len(moves)} moves")
            return
        outcome = solve(
            graph,
            labeling,
            dist,
            _semantics(cover_rule, parity),
            memo_cap=obj["memo_cap"],
        )
    click.echo(
        f"nodes={outcome.nodes_explored} memo_hits={outcome.memo_hits}",
        err=True,
    )
    if not outcome.solvable:
        click.echo("unsolvable")
        return
    click.echo(f"solvable in {len(outcome.certificate or ())} moves")
    if certificate_path is not None:
        write_text(certificate_path, save_certificate(outcome.certificate))
        click.echo(f"certificate: {certificate_path}")


@cli.command("psi", help="Compute psi_EC for a family under one reading.")
@_family_option
@_n_option
@_cover_option
@_parity_option
@click.option(
    "--quantifier",
    type=click.Choice([q.value for q in Quantifier]),
    default=Quantifier.EXACT_SIZE.value,
    show_default=True,
)
@click.option(
    "--cap",
    type=click.IntRange(min=1),
    default=None,
    help="Largest size scanned (default: closed form + 4).",
)
@click.option(
    "--symmetry",
    type=click.Choice(["on", "off"]),
    default="off",
    show_default=True,
)
@_workers_option
@click.option(
    "--out",
    "out_dir",
    type=click.Path(path_type=Path),
    default=Path("psi-out"),
    show_default=True,
    help="Directory for the witness and certificates.",
)
@click.pass_obj
def psi_command(
    obj: dict[str, Any],
    family: str,
    n: int,
    cover_rule: str,
    parity: str,
    quantifier: str,
    cap: int | None,
    symmetry: str,
    workers: int,
    out_dir: Path,
) -> None:
    with _reported_errors():
        spec = _family_spec(family, n)
        graph = generate_family(spec)
        assignment = builtin_assignment(spec)
        labeling = derive_edge_labels(graph, assignment)
        use_symmetry = symmetry == "on"
        query = PsiQuery(
            graph=graph,
            labeling=labeling,
            semantics=_semantics(cover_rule, parity, quantifier),
            m_cap=cap if cap is not None else closed_form(spec) + 4,
            use_symmetry=use_symmetry,
            generators=(
                symmetry_generators(spec, labeling) if use_symmetry else ()
            ),
            workers=workers,
            memo_cap=obj["memo_cap"],
        )
        click.echo(f"Scanning {spec.label} up to {query.m_cap} ...", err=True)
        result = psi_ec(query)

    value = "-" if result.value is None else str(result.value)
    click.echo(f"value: {value} ({result.status.value})")
    click.echo(f"closed form: {closed_form(spec)}")
    if result.witness is not None:
        size, distribution = result.witness
        witness_path = out_dir / "witness.json"
        write_text(witness_path, save_distribution(distribution))
        click.echo(f"witness (size {size}): {witness_path}")
    certificates_path = out_dir / "certificates.json"
    payload = [certificate_payload(cert) for cert in result.certificates]
    write_text(certificates_path, json.dumps(payload, indent=2) + "\n")
    click.echo(
        f"certificates ({result.solvable_certificates_checked} replayed): "
        f"{certificates_path}"
    )


@cli.command("cover", help="Compute the unrestricted cover edge pebbling number.")
@click.option("--family", default=None)
@click.option("--n", "n", type=int, default=None)
@click.option("--graph", "graph_path", type=click.Path(path_type=Path),
              default=None)
@click.option("--cap", type=click.IntRange(min=1), default=32,
              show_default=True)
@_workers_option
@click.pass_obj
def cover_command(
    obj: dict[str, Any],
    family: str | None,
    n: int | None,
    graph_path: Path | None,
    cap: int,
    workers: int,
) -> None:
    with _reported_errors():
        if graph_path is not None:
            graph = load_graph(read_text(graph_path, "graph"))
        elif family is not None and n is not None:
            graph = generate_family(_family_spec(family, n))
        else:
            raise click.UsageError("give --graph or both --family and --n")
        value = classic_cover_number(
            graph, cap, workers=workers, memo_cap=obj["memo_cap"]
        )
    click.echo(f"cover number: {'-' if value is None else value}")


@cli.command(
    "verify-formulas",
    help="Check the closed-form values across families and readings.",
)
@click.option("--families", default="all", show_default=True,
              help="Comma-separated family names, or 'all'.")
@click.option("--n-range", default="1..3", show_default=True,
              help="Inclusive parameter range a..b.")
@click.option(
    "--report",
    "report_dir",
    type=click.Path(path_type=Path),
    default=Path("report"),
    show_default=True,
)
@click.option(
    "--semantics-only",
    "semantics_only",
    multiple=True,
    help="Restrict to readings such as resting-initial-exact (repeatable).",
)
@click.option("--cap-margin", type=click.IntRange(min=0), default=4,
              show_default=True, help="Scan up to closed form + margin.")
@click.option(
    "--symmetry",
    type=click.Choice(["on", "off"]),
    default="off",
    show_default=True,
)
@click.option("--timings/--no-timings", default=False, show_default=True,
              help="Fill the runtime_ms column (breaks byte-identity).")
@_workers_option
@click.pass_obj
def verify_command(
    obj: dict[str, Any],
    families: str,
    n_range: str,
    report_dir: Path,
    semantics_only: tuple[str, ...],
    cap_margin: int,
    symmetry: str,
    timings: bool,
    workers: int,
) -> None:
    with _reported_errors():
        config = VerifyConfig(
            families=parse_families(families),
            n_values=parse_n_range(n_range),
            report_dir=report_dir,
            semantics=(
                [parse_semantics(slug) for slug in semantics_only]
                if semantics_only
                else all_semantics()
            ),
            cap_margin=cap_margin,
            workers=workers,
            memo_cap=obj["memo_cap"],
            use_symmetry=symmetry == "on",
            timings=timings,
        )
        result = run_verification(
            config, progress=lambda text: click.echo(text, err=True)
        )
    click.echo(
        f"Wrote {result['cell_count']} cells for {result['row_count']} "
        f"instances into {result['out_dir']} "
        f"({result['match_count']} match the closed form)"
    )


def main(argv: Optional[list[str]] = None) -> None:
    cli.main(args=argv, prog_name="pebblekit")
