"""Exact game evaluation: memoized search, optimal moves, and policy verification."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

from relgame.cayley import CayleyGraph, Letter
from relgame.engine import (
    GameKind,
    GameState,
    IllegalMoveError,
    Outcome,
    apply_move,
    format_move_line,
    format_result_line,
    initial_state,
    legal_moves,
    outcome_if_no_moves,
)

__all__ = [
    "BudgetExceededError",
    "CheckResult",
    "DEFAULT_BUDGET_MULTIPLAYER",
    "DEFAULT_BUDGET_TWO_PLAYER",
    "MoveChoice",
    "PolicyMoveError",
    "SolveResult",
    "SolveStats",
    "adversarial_strategy_check",
    "best_move",
    "no_suicide_filter",
    "solve",
]

DEFAULT_BUDGET_TWO_PLAYER = 24
DEFAULT_BUDGET_MULTIPLAYER = 16

Policy = Callable[[GameState], Letter]
OpponentFilter = Callable[[GameState, list[Letter]], list[Letter]]


class BudgetExceededError(RuntimeError):
    """Raised when an instance exceeds the configured search budget."""


class PolicyMoveError(ValueError):
    """Raised when a policy or opponent filter produces an illegal selection."""


@dataclass(frozen=True)
class SolveStats:
    """Search effort counters."""

    states_explored: int
    memo_hits: int
    elapsed: float


@dataclass(frozen=True)
class SolveResult:
    """Root value of an instance under optimal play."""

    winner: int
    ranking: tuple[int, ...]
    optimal_first: Letter | None
    stats: SolveStats


@dataclass(frozen=True)
class MoveChoice:
    """Optimal letter at a state and the value it achieves."""

    letter: Letter
    winner: int
    ranking: tuple[int, ...]


@dataclass(frozen=True)
class CheckResult:
    """Result of an adversarial policy check; trace is empty when ok."""

    ok: bool
    trace: tuple[str, ...]
    states_explored: int = 0


def _budget_for(kind: GameKind, budget: int | None) -> int:
    if budget is not None:
        return budget
    return DEFAULT_BUDGET_TWO_PLAYER if kind.players == 2 else DEFAULT_BUDGET_MULTIPLAYER


def _require_budget(graph: CayleyGraph, kind: GameKind, budget: int | None) -> None:
    limit = _budget_for(kind, budget)
    if graph.order > limit:
        raise BudgetExceededError(
            f"{graph.group.name}: order {graph.order} exceeds the "
            f"{kind.players}-player search budget {limit}"
        )


def _cyclic_ranking(winner: int, players: int) -> tuple[int, ...]:
    return tuple((winner + k) % players for k in range(players))


def _make_searcher(graph: CayleyGraph, kind: GameKind, use_memo: bool):
    """Return (rec, stats) where rec(visited, current, last, mover) -> winning seat."""
    alphabet = graph.alphabet
    nletters = len(alphabet)
    nbr = graph.neighbors
    inv_of = tuple(letter.inverse_index for letter in alphabet)
    players = kind.players
    is_rel = kind.is_rel
    cur_bits = max(graph.order.bit_length(), 1)
    last_bits = (nletters + 1).bit_length()
    memo: dict[int, int] = {}
    stats = [0, 0]

    def rec(visited: int, current: int, last: int, mover: int) -> int:
        key = (((visited << cur_bits) | current) << last_bits) | (last + 1)
        if use_memo:
            cached = memo.get(key, -1)
            if cached >= 0:
                stats[1] += 1
                return cached
        stats[0] += 1
        row = nbr[current]
        ban = inv_of[last] if last >= 0 else -1
        nxt = mover + 1
        if nxt == players:
            nxt = 0
        if is_rel:
            for li in range(nletters):
                if li != ban and (visited >> row[li]) & 1:
                    if use_memo:
                        memo[key] = mover
                    return mover
            best_w = -1
            best_r = players
            for li in range(nletters):
                if li == ban:
                    continue
                target = row[li]
                w = rec(visited | (1 << target), target, li, nxt)
                r = (mover - w) % players
                if r < best_r:
                    best_r = r
                    best_w = w
                    if r == 0:
                        break
            if best_w < 0:
                best_w = nxt
        else:
            best_w = nxt
            for li in range(nletters):
                if li == ban:
                    continue
                target = row[li]
                bit = 1 << target
                if visited & bit:
                    continue
                if rec(visited | bit, target, li, nxt) == mover:
                    best_w = mover
                    break
        if use_memo:
            memo[key] = best_w
        return best_w

    return rec, stats


def solve(
    graph: CayleyGraph, kind: GameKind, *, budget: int | None = None, memo: bool = True
) -> SolveResult:
    """Evaluate an instance from the empty word under rank-optimal play."""
    _require_budget(graph, kind, budget)
    rec, stats = _make_searcher(graph, kind, memo)
    players = kind.players
    start = time.perf_counter()
    best_letter: Letter | None = None
    best_w = 1 % players
    best_r = players
    for letter in graph.alphabet:
        target = graph.neighbors[graph.group.identity][letter.index]
        w = rec((1 << graph.group.identity) | (1 << target), target, letter.index, 1 % players)
        r = (0 - w) % players
        if r < best_r:
            best_r = r
            best_w = w
            best_letter = letter
            if r == 0:
                break
    elapsed = time.perf_counter() - start
    return SolveResult(
        winner=best_w,
        ranking=_cyclic_ranking(best_w, players),
        optimal_first=best_letter,
        stats=SolveStats(states_explored=stats[0], memo_hits=stats[1], elapsed=elapsed),
    )


def best_move(state: GameState, *, budget: int | None = None) -> MoveChoice:
    """The mover's rank-optimal letter at a non-terminal state."""
    moves = legal_moves(state)
    if not moves:
        raise IllegalMoveError("best_move called on a state with no legal moves")
    graph, kind = state.graph, state.kind
    _require_budget(graph, kind, budget)
    rec, _ = _make_searcher(graph, kind, True)
    players = kind.players
    mover = state.mover
    nxt = (mover + 1) % players
    best: tuple[int, int, Letter] | None = None
    for letter in moves:
        target = graph.neighbors[state.current][letter.index]
        bit = 1 << target
        if state.visited & bit:
            w = mover if kind.is_rel else nxt
        else:
            w = rec(state.visited | bit, target, letter.index, nxt)
        r = (mover - w) % players
        if best is None or r < best[0]:
            best = (r, w, letter)
            if r == 0:
                break
    assert best is not None
    return MoveChoice(letter=best[2], winner=best[1], ranking=_cyclic_ranking(best[1], players))


def no_suicide_filter(state: GameState, moves: list[Letter]) -> list[Letter]:
    """Drop moves that hand the next player an immediate relator-completing reply.

    Game-ending moves are kept, and if every move is a hand-over the full list
    is returned, so the filtered branching is never empty.
    """
    graph = state.graph
    nletters = len(graph.alphabet)
    keep: list[Letter] = []
    for letter in moves:
        target = graph.neighbors[state.current][letter.index]
        bit = 1 << target
        if state.visited & bit:
            keep.append(letter)
            continue
        visited = state.visited | bit
        row = graph.neighbors[target]
        ban = letter.inverse_index
        if not any(li != ban and (visited >> row[li]) & 1 for li in range(nletters)):
            keep.append(letter)
    return keep or list(moves)


def adversarial_strategy_check(
    policy: Policy,
    graph: CayleyGraph,
    kind: GameKind,
    seat: int,
    *,
    opponent_moves: OpponentFilter | None = None,
    budget: int | None = None,
) -> CheckResult:
    """Verify that a policy for one seat wins against all opposing play.

    The policy seat follows `policy`; every other seat branches over all its
    legal moves (or the `opponent_moves` selection). True means every leaf
    ranks the policy seat first; otherwise one losing trace is returned.
    """
    _require_budget(graph, kind, budget)
    if not 0 <= seat < kind.players:
        raise PolicyMoveError(f"seat {seat} out of range for {kind.players} players")
    labels = graph.group.labels
    cur_bits = max(graph.order.bit_length(), 1)
    last_bits = (len(graph.alphabet) + 1).bit_length()
    ok_memo: set[int] = set()
    lines: list[str] = []
    nodes = [0]

    def describe(state: GameState) -> str:
        return (
            f"at {labels[state.current]} (move {state.move_count}, "
            f"player {state.mover + 1}, visited {state.visited_count})"
        )

    def walk(state: GameState) -> bool:
        nodes[0] += 1
        moves_all = legal_moves(state)
        if not moves_all:
            outcome = outcome_if_no_moves(state)
            if outcome.winner == seat:
                return True
            lines.append(format_result_line(outcome))
            return False
        last = -1 if state.last is None else state.last.index
        key = (((state.visited << cur_bits) | state.current) << last_bits) | (last + 1)
        if key in ok_memo:
            return True
        if state.mover == seat:
            chosen = policy(state)
            if not any(chosen == m for m in moves_all):
                raise PolicyMoveError(
                    f"policy returned illegal letter "
                    f"{getattr(chosen, 'name', chosen)!r} {describe(state)}"
                )
            moves = [chosen]
        else:
            moves = moves_all
            if opponent_moves is not None:
                moves = opponent_moves(state, moves_all)
                if not moves or any(m not in moves_all for m in moves):
                    raise PolicyMoveError(f"opponent filter returned an illegal selection {describe(state)}")
        for letter in moves:
            target = graph.neighbors[state.current][letter.index]
            result = apply_move(state, letter)
            if isinstance(result, Outcome):
                lines.append(
                    format_move_line(
                        state.move_count + 1, state.mover, letter, labels[target], state.visited_count
                    )
                )
                if result.winner == seat:
                    lines.pop()
                    continue
                lines.append(format_result_line(result))
                return False
            lines.append(
                format_move_line(
                    state.move_count + 1, state.mover, letter, labels[target], result.visited_count
                )
            )
            if not walk(result):
                return False
            lines.pop()
        ok_memo.add(key)
        return True

    if walk(initial_state(graph, kind)):
        return CheckResult(ok=True, trace=(), states_explored=nodes[0])
    return CheckResult(ok=False, trace=tuple(lines), states_explored=nodes[0])
