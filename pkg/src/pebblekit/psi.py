from __future__ import annotations

import logging
import multiprocessing
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from multiprocessing.pool import Pool

from .engine import DEFAULT_MEMO_CAP, replay, solve
from .graphs import generate_family
from .models import (
    Certificate,
    CoverRule,
    Distribution,
    EdgeLabeling,
    EdgePermutation,
    Family,
    FamilySpec,
    GameSemantics,
    Graph,
    InvalidInstanceError,
    Move,
    PaperWitnessCheck,
    PsiQuery,
    PsiResult,
    PsiStatus,
    Quantifier,
)

logger = logging.getLogger(__name__)


def _restricted_counts(
    labels: tuple[int, ...],
    m: int,
) -> Iterator[tuple[int, ...]]:
    """Every count vector of total ``m`` with even entries on label-0 edges.

    Vectors come out in reverse lexicographic order.
    """
    # odd_tail[e]: some edge at index >= e may hold an odd count
    odd_tail = [False] * (len(labels) + 1)
    for e in range(len(labels) - 1, -1, -1):
        odd_tail[e] = labels[e] == 1 or odd_tail[e + 1]

    def fill(e: int, remaining: int) -> Iterator[list[int]]:
        if e == len(labels):
            if remaining == 0:
                yield []
            return
        step = 2 if labels[e] == 0 else 1
        for here in range(remaining - remaining % step, -1, -step):
            rest = remaining - here
            if rest % 2 and not odd_tail[e + 1]:
                continue
            for tail in fill(e + 1, rest):
                yield [here, *tail]

    for counts in fill(0, m):
        yield tuple(counts)


def orbit_is_canonical(
    counts: tuple[int, ...],
    generators: Iterable[EdgePermutation],
) -> bool:
    """True when ``counts`` is the smallest vector of its orbit."""
    generators = tuple(generators)
    seen = {counts}
    frontier = [counts]
    while frontier:
        current = frontier.pop()
        for perm in generators:
            image = perm.apply(current)
            if image < counts:
                return False
            if image not in seen:
                seen.add(image)
                frontier.append(image)
    return True


def enumerate_restricted(
    graph: Graph,
    labeling: EdgeLabeling,
    m: int,
    symmetry: Iterable[EdgePermutation] | None = None,
) -> Iterator[Distribution]:
    if m < 0:
        raise InvalidInstanceError("distribution size must be nonnegative")
    if len(labeling.labels) != graph.edge_count:
        raise InvalidInstanceError("labeling does not match graph")
    generators = tuple(symmetry or ())
    for counts in _restricted_counts(labeling.labels, m):
        if generators and not orbit_is_canonical(counts, generators):
            continue
        yield Distribution(counts)


@dataclass(slots=True, frozen=True)
class _SolveJob:
    graph: Graph
    labeling: EdgeLabeling
    semantics: GameSemantics
    memo_cap: int


def _solve_counts(
    job: _SolveJob,
    counts: tuple[int, ...],
) -> tuple[bool, tuple[Move, ...] | None]:
    outcome = solve(
        job.graph,
        job.labeling,
        Distribution(counts),
        job.semantics,
        memo_cap=job.memo_cap,
    )
    return outcome.solvable, outcome.certificate


# set once per worker process by the pool initializer
_worker_job: _SolveJob | None = None

_CHUNKSIZE = 16


def _init_worker(job: _SolveJob) -> None:
    global _worker_job
    _worker_job = job


def _solve_in_worker(
    counts: tuple[int, ...],
) -> tuple[bool, tuple[Move, ...] | None]:
    if _worker_job is None:
        raise RuntimeError("worker process started without a solve job")
    return _solve_counts(_worker_job, counts)


def _pooled(
    pool: Pool,
    batch: list[tuple[int, ...]],
    window: int,
) -> Iterator[tuple[tuple[int, ...], tuple[bool, tuple[Move, ...] | None]]]:
    # at most one window is in flight when a counterexample stops the scan
    for start in range(0, len(batch), window):
        part = batch[start:start + window]
        yield from zip(
            part, pool.imap(_solve_in_worker, part, chunksize=_CHUNKSIZE)
        )


@dataclass(slots=True)
class _SizeCheck:
    size: int
    all_solvable: bool
    counterexample: Distribution | None
    certificates: list[Certificate]


def _check_size(
    query: PsiQuery,
    m: int,
    pool: Pool | None = None,
) -> _SizeCheck:
    generators = query.generators if query.use_symmetry else ()
    stream = (
        d.counts
        for d in enumerate_restricted(
            query.graph, query.labeling, m, generators
        )
    )
    certificates: list[Certificate] = []

    def consume(results: Iterable[tuple[tuple[int, ...], tuple]]) -> _SizeCheck:
        for counts, (solvable, moves) in results:
            if not solvable:
                return _SizeCheck(m, False, Distribution(counts), [])
            certificates.append(Certificate(Distribution(counts), moves))
        return _SizeCheck(m, True, None, certificates)

    if pool is None:
        job = _SolveJob(
            query.graph, query.labeling, query.semantics, query.memo_cap
        )
        return consume((counts, _solve_counts(job, counts)) for counts in stream)

    # imap keeps enumeration order, so the first unsolvable vector does not
    # depend on the worker count
    window = query.workers * _CHUNKSIZE * 4
    return consume(_pooled(pool, list(stream), window))


def _verified(query: PsiQuery, certificates: list[Certificate]) -> int:
    for cert in certificates:
        result = replay(
            query.graph,
            query.labeling,
            cert.start,
            cert.moves,
            query.semantics,
        )
        if not result.ok:
            raise RuntimeError(
                f"certificate for {cert.start.counts} failed at step "
                f"{result.failed_step}"
            )
    return len(certificates)


def psi_ec(query: PsiQuery) -> PsiResult:
    """Least m whose restricted distributions are all solvable.

    ExactSize scans 1, 2, ... and stops at the first size where every
    distribution is solvable. AllSizesAtLeast scans m_cap downward and stops
    at the first failing size; the answer is only vouched for up to m_cap.
    """
    if not query.labeling.is_balanced:
        raise InvalidInstanceError(
            f"labeling is not SDC: e0={query.labeling.e0_count}, "
            f"e1={query.labeling.e1_count}"
        )
    return _scan(query)


def _scan(query: PsiQuery) -> PsiResult:
    if query.workers == 1:
        return _scan_sizes(query, None)
    job = _SolveJob(
        query.graph, query.labeling, query.semantics, query.memo_cap
    )
    with multiprocessing.Pool(
        query.workers, initializer=_init_worker, initargs=(job,)
    ) as pool:
        return _scan_sizes(query, pool)


def _scan_sizes(query: PsiQuery, pool: Pool | None) -> PsiResult:
    semantics = query.semantics
    if semantics.quantifier is Quantifier.EXACT_SIZE:
        sizes = range(1, query.m_cap + 1)
    else:
        sizes = range(query.m_cap, 0, -1)

    scanned: list[int] = []
    previous_failure: _SizeCheck | None = None
    passing: _SizeCheck | None = None
    for m in sizes:
        check = _check_size(query, m, pool)
        scanned.append(m)
        logger.debug(
            "size %d: %s",
            m,
            "all solvable" if check.all_solvable else "counterexample found",
        )
        if semantics.quantifier is Quantifier.EXACT_SIZE:
            if check.all_solvable:
                passing = check
                break
            previous_failure = check
        else:
            if not check.all_solvable:
                previous_failure = check
                break
            passing = check

    if passing is None:
        witness = None
        if previous_failure is not None:
            witness = (previous_failure.size, previous_failure.counterexample)
        return PsiResult(
            value=None,
            status=PsiStatus.UNDETERMINED_AT_CAP,
            witness=witness,
            solvable_certificates_checked=0,
            convention=semantics,
            sizes_scanned=tuple(scanned),
        )

    value = passing.size
    witness = None
    if previous_failure is not None and previous_failure.size == value - 1:
        witness = (previous_failure.size, previous_failure.counterexample)
    checked = _verified(query, passing.certificates)
    status = (
        PsiStatus.DETERMINED
        if semantics.quantifier is Quantifier.EXACT_SIZE
        else PsiStatus.UNDETERMINED_AT_CAP
    )
    return PsiResult(
        value=value,
        status=status,
        witness=witness,
        solvable_certificates_checked=checked,
        convention=semantics,
        certificates=tuple(passing.certificates),
        sizes_scanned=tuple(scanned),
    )


def closed_form(spec: FamilySpec) -> int:
    n = spec.n
    odd = n % 2 == 1
    match spec.family:
        case Family.COMB:
            return 2**n - 2
        case Family.STAR:
            return n - 1 if odd else n
        case Family.SUBDIVIDED_STAR:
            return 4 * n - 2
        case Family.BISTAR:
            return 3 * n + 3 if odd else 3 * n
        case Family.SUBDIVIDED_BISTAR:
            return 20 * n + 6
        case Family.TWO_STARS_DELTA:
            return 3 * n + 3 if odd else 3 * n + 2
        case Family.DEGREE_SPLIT_BISTAR:
            return 8 * n + 2
        case Family.STAR_OF_STARS:
            return 9 * n + 11 if odd else 9 * n + 4
    raise InvalidInstanceError(f"unknown family {spec.family!r}")


def _witness_edge(spec: FamilySpec) -> tuple[str, str] | None:
    n = spec.n
    match spec.family:
        case Family.COMB | Family.SUBDIVIDED_STAR:
            return (f"a_{n}", f"b_{n}")
        case Family.STAR:
            return ("a", "a_1")
        case Family.BISTAR:
            if n % 2 == 0:
                return ("b", f"b_{n}")
            return ("b", f"b_{n - 1}") if n >= 3 else None
        case Family.SUBDIVIDED_BISTAR:
            return ("b'_1", "b_1")
        case Family.TWO_STARS_DELTA:
            return ("a", "a_1")
        case Family.DEGREE_SPLIT_BISTAR:
            return ("v", "w_2")
        case Family.STAR_OF_STARS:
            return ("w", "w_1")
    return None


def paper_witness(spec: FamilySpec) -> tuple[int, int] | None:
    """Concentrated distribution that bounds psi from below for ``spec``.

    Returns (edge id, pebble count); the count is two short of the
    closed-form value.
    """
    names = _witness_edge(spec)
    count = closed_form(spec) - 2
    if names is None or count <= 0:
        return None
    graph = generate_family(spec)
    return graph.edge_id(*names), count


def check_paper_witness(
    spec: FamilySpec,
    labeling: EdgeLabeling,
    semantics: GameSemantics = GameSemantics(),
    memo_cap: int = DEFAULT_MEMO_CAP,
) -> PaperWitnessCheck | None:
    located = paper_witness(spec)
    if located is None:
        return None
    edge, count = located
    graph = generate_family(spec)
    witness = Distribution.concentrated(graph.edge_count, edge, count)
    raised = Distribution.concentrated(
        graph.edge_count, edge, closed_form(spec)
    )
    low = solve(graph, labeling, witness, semantics, memo_cap=memo_cap)
    high = solve(graph, labeling, raised, semantics, memo_cap=memo_cap)
    return PaperWitnessCheck(
        edge=edge,
        witness=witness,
        witness_solvable=low.solvable,
        raised=raised,
        raised_solvable=high.solvable,
        raised_certificate=high.certificate,
    )


def classic_cover_number(
    graph: Graph,
    m_cap: int,
    workers: int = 1,
    memo_cap: int = DEFAULT_MEMO_CAP,
) -> int | None:
    """Unrestricted cover edge pebbling number, or None above ``m_cap``.

    Every edge is a target, no edge must end empty and resting pebbles
    count, which is the restricted game with all labels equal to 1.
    """
    labeling = EdgeLabeling.from_labels((1,) * graph.edge_count)
    query = PsiQuery(
        graph=graph,
        labeling=labeling,
        semantics=GameSemantics(cover_rule=CoverRule.RESTING_COUNTS),
        m_cap=m_cap,
        workers=workers,
        memo_cap=memo_cap,
    )
    return _scan(query).value
