from __future__ import annotations

import logging
from collections.abc import Iterator, Sequence

from .models import (
    CoverRule,
    Distribution,
    EdgeLabeling,
    GameSemantics,
    Graph,
    InvalidInstanceError,
    Move,
    ParityRule,
    ReplayResult,
    SearchBudgetExceeded,
    SolveOutcome,
)

logger = logging.getLogger(__name__)

DEFAULT_MEMO_CAP = 50_000_000


def _check_sizes(graph: Graph, labeling: EdgeLabeling, d: Distribution) -> None:
    if len(labeling.labels) != graph.edge_count:
        raise InvalidInstanceError(
            f"labeling covers {len(labeling.labels)} edges, graph has "
            f"{graph.edge_count}"
        )
    if len(d.counts) != graph.edge_count:
        raise InvalidInstanceError(
            f"distribution covers {len(d.counts)} edges, graph has "
            f"{graph.edge_count}"
        )


def is_restricted(d: Distribution, labeling: EdgeLabeling) -> bool:
    if len(d.counts) != len(labeling.labels):
        raise InvalidInstanceError(
            f"distribution has {len(d.counts)} entries, labeling has "
            f"{len(labeling.labels)}"
        )
    return all(d.counts[e] % 2 == 0 for e in labeling.sdc0)


def apply_move(graph: Graph, d: Distribution, move: Move) -> Distribution:
    source = graph.check_edge(move.source)
    target = graph.check_edge(move.target)
    if target not in graph.line_adjacency[source]:
        raise InvalidInstanceError(
            f"edges {graph.edge_name(source)} and {graph.edge_name(target)} "
            "are not adjacent"
        )
    if d.counts[source] < 2:
        raise InvalidInstanceError(
            f"edge {graph.edge_name(source)} holds {d.counts[source]} "
            "pebbles, a move needs 2"
        )
    counts = list(d.counts)
    counts[source] -= 2
    counts[target] += 1
    return Distribution(tuple(counts))


def legal_moves(
    graph: Graph,
    d: Distribution,
    labeling: EdgeLabeling,
    semantics: GameSemantics,
) -> list[Move]:
    keep_even = semantics.parity_rule is ParityRule.ALWAYS
    moves: list[Move] = []
    for source, count in enumerate(d.counts):
        if count < 2:
            continue
        for target in graph.line_adjacency[source]:
            if keep_even and target in labeling.sdc0:
                continue
            moves.append(Move(source, target))
    return moves


def is_goal(
    d: Distribution,
    labeling: EdgeLabeling,
    semantics: GameSemantics,
    received: Sequence[bool] | None = None,
) -> bool:
    counts = d.counts
    if any(counts[e] != 0 for e in labeling.sdc0):
        return False
    if any(counts[e] < 1 for e in labeling.sdc1):
        return False
    if semantics.cover_rule is CoverRule.MUST_RECEIVE:
        if received is None:
            return False
        return all(received[e] for e in labeling.sdc1)
    return True


class _Search:
    """Depth-first search over (counts, received-mask) states.

    Only failed states are memoized. A state is cut early when it fails one
    of the weight bounds: moving two pebbles one step closer to a target
    never raises sum(c_e * 2^-d(e, t)), and a final cover needs that sum to
    be at least 1 for every label-1 edge t.
    """

    def __init__(
        self,
        graph: Graph,
        labeling: EdgeLabeling,
        semantics: GameSemantics,
        memo_cap: int,
    ) -> None:
        self.edge_count = graph.edge_count
        self.adjacency = graph.line_adjacency
        self.must_receive = semantics.cover_rule is CoverRule.MUST_RECEIVE
        self.keep_even = semantics.parity_rule is ParityRule.ALWAYS
        self.zeros = tuple(sorted(labeling.sdc0))
        self.ones = tuple(sorted(labeling.sdc1))
        self.zero_set = labeling.sdc0
        self.target_mask = sum(1 << e for e in self.ones)
        self.memo_cap = memo_cap
        self.failed: set[tuple[tuple[int, ...], int]] = set()
        self.nodes = 0
        self.memo_hits = 0

        distances = graph.edge_distances
        finite = max((max(row) for row in distances), default=0)
        self.scale_exp = max(finite, 2)
        self.scale = 1 << self.scale_exp
        self.cover_weights = tuple(
            tuple(1 << (self.scale_exp - distances[e][t])
                  for e in range(self.edge_count))
            for t in self.ones
        )
        # a pebble arriving on t comes from a neighbor, so a pebble already
        # on t counts as if it sat two steps away
        self.arrival_weights = tuple(
            tuple(
                1 << (self.scale_exp - (2 if e == t else distances[e][t]))
                for e in range(self.edge_count)
            )
            for t in self.ones
        )

    def _hopeless(self, counts: list[int], received: int) -> bool:
        if sum(counts) < len(self.ones):
            return True
        for i, t in enumerate(self.ones):
            weights = self.cover_weights[i]
            if sum(c * w for c, w in zip(counts, weights)) < self.scale:
                return True
            if self.must_receive and not received >> t & 1:
                weights = self.arrival_weights[i]
                total = sum(c * w for c, w in zip(counts, weights))
                if total < self.scale:
                    return True
        return False

    def _is_goal(self, counts: list[int], received: int) -> bool:
        for e in self.zeros:
            if counts[e]:
                return False
        for e in self.ones:
            if not counts[e]:
                return False
        if self.must_receive:
            return received & self.target_mask == self.target_mask
        return True

    def _moves(self, counts: list[int], received: int) -> Iterator[Move]:
        # read lazily; counts are restored before the frame resumes
        if self._hopeless(counts, received):
            return
        for source in range(self.edge_count):
            if counts[source] < 2:
                continue
            for target in self.adjacency[source]:
                if self.keep_even and target in self.zero_set:
                    continue
                yield Move(source, target)

    def _record_failure(self, key: tuple[tuple[int, ...], int]) -> None:
        if len(self.failed) >= self.memo_cap:
            raise SearchBudgetExceeded(
                f"memo table reached {self.memo_cap} entries"
            )
        self.failed.add(key)

    def run(self, counts: list[int]) -> list[Move] | None:
        """Return a move sequence reaching the goal from ``counts``, or None.

        ``counts`` is mutated during the search and restored on failure.
        """
        if self._is_goal(counts, 0):
            return []
        self.nodes += 1
        stack = [((tuple(counts), 0), self._moves(counts, 0))]
        path: list[Move] = []
        while stack:
            key, moves = stack[-1]
            move = next(moves, None)
            if move is None:
                stack.pop()
                self._record_failure(key)
                if path:
                    done = path.pop()
                    counts[done.source] += 2
                    counts[done.target] -= 1
                continue
            received = key[1]
            if self.must_receive:
                received |= (1 << move.target) & self.target_mask
            counts[move.source] -= 2
            counts[move.target] += 1
            path.append(move)
            if self._is_goal(counts, received):
                return path
            child = (tuple(counts), received)
            if child in self.failed:
                self.memo_hits += 1
                path.pop()
                counts[move.source] += 2
                counts[move.target] -= 1
                continue
            self.nodes += 1
            stack.append((child, self._moves(counts, received)))
        return None


def solve(
    graph: Graph,
    labeling: EdgeLabeling,
    d0: Distribution,
    semantics: GameSemantics = GameSemantics(),
    memo_cap: int = DEFAULT_MEMO_CAP,
) -> SolveOutcome:
    _check_sizes(graph, labeling, d0)
    if not is_restricted(d0, labeling):
        raise InvalidInstanceError(
            "start distribution puts an odd count on a label-0 edge"
        )
    search = _Search(graph, labeling, semantics, memo_cap)
    path = search.run(list(d0.counts))
    solvable = path is not None
    logger.debug(
        "solve %s: %s after %d nodes (%d memo hits)",
        d0.counts,
        "solvable" if solvable else "unsolvable",
        search.nodes,
        search.memo_hits,
    )
    return SolveOutcome(
        solvable=solvable,
        certificate=tuple(path) if solvable else None,
        nodes_explored=search.nodes,
        memo_hits=search.memo_hits,
    )


def replay(
    graph: Graph,
    labeling: EdgeLabeling,
    d0: Distribution,
    moves: Sequence[Move],
    semantics: GameSemantics = GameSemantics(),
) -> ReplayResult:
    _check_sizes(graph, labeling, d0)
    current = d0
    received = [False] * graph.edge_count
    for step, move in enumerate(moves):
        allowed = legal_moves(graph, current, labeling, semantics)
        if move not in allowed:
            return ReplayResult(ok=False, final=current, failed_step=step)
        current = apply_move(graph, current, move)
        received[move.target] = True
    if not is_goal(current, labeling, semantics, received):
        return ReplayResult(ok=False, final=current, failed_step=len(moves))
    return ReplayResult(ok=True, final=current)
