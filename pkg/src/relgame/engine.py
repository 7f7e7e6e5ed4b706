"""Game rules: states, legal moves, move application, outcomes, and traces."""

from __future__ import annotations

from dataclasses import dataclass

from relgame.cayley import CayleyGraph, Letter

__all__ = [
    "GameKind",
    "GameState",
    "IllegalMoveError",
    "Outcome",
    "RAV",
    "REL",
    "apply_move",
    "format_move_line",
    "format_result_line",
    "initial_state",
    "legal_moves",
    "outcome_if_no_moves",
    "rel_n",
]

CAUSE_RELATOR = "RelatorFormed"
CAUSE_NO_MOVES = "NoLegalMove"


class IllegalMoveError(ValueError):
    """Raised when a move or state transition violates the game rules."""


@dataclass(frozen=True)
class GameKind:
    """Which game is played (rel or rav) and for how many players."""

    game: str
    players: int = 2

    def __post_init__(self) -> None:
        if self.game not in ("rel", "rav"):
            raise IllegalMoveError(f"game must be 'rel' or 'rav', got {self.game!r}")
        if self.players < 2:
            raise IllegalMoveError(f"player count must be >= 2, got {self.players}")
        if self.game == "rav" and self.players != 2:
            raise IllegalMoveError("rav is defined for exactly 2 players")

    @property
    def is_rel(self) -> bool:
        """True for the achievement game."""
        return self.game == "rel"


REL = GameKind("rel", 2)
RAV = GameKind("rav", 2)


def rel_n(players: int) -> GameKind:
    """The achievement game for the given player count."""
    return GameKind("rel", players)


@dataclass(frozen=True)
class Outcome:
    """Terminal result: cause, the player who acted (or was stuck), and the ranking."""

    cause: str
    actor: int
    winner: int
    players: int

    @property
    def ranking(self) -> tuple[int, ...]:
        """Seats in rank order: the winner, then seats in cyclic order after them."""
        return tuple((self.winner + k) % self.players for k in range(self.players))

    def rank_of(self, seat: int) -> int:
        """1-based rank of a seat."""
        return (seat - self.winner) % self.players + 1


@dataclass(frozen=True)
class GameState:
    """Snapshot of a game in progress; visited is a bitmask over element indices."""

    graph: CayleyGraph
    kind: GameKind
    visited: int
    current: int
    last: Letter | None
    mover: int
    move_count: int

    @property
    def visited_count(self) -> int:
        """Number of distinct vertices visited so far."""
        return self.visited.bit_count()


def initial_state(graph: CayleyGraph, kind: GameKind) -> GameState:
    """The empty-word start: only the identity visited, player 1 to move."""
    return GameState(
        graph=graph,
        kind=kind,
        visited=1 << graph.group.identity,
        current=graph.group.identity,
        last=None,
        mover=0,
        move_count=0,
    )


def legal_moves(state: GameState) -> list[Letter]:
    """Alphabet letters minus the inverse of the previous letter, in alphabet order."""
    if state.last is None:
        return list(state.graph.alphabet)
    banned = state.last.inverse_index
    return [letter for letter in state.graph.alphabet if letter.index != banned]


def _relator_outcome(kind: GameKind, actor: int) -> Outcome:
    winner = actor if kind.is_rel else (actor + 1) % kind.players
    return Outcome(cause=CAUSE_RELATOR, actor=actor, winner=winner, players=kind.players)


def apply_move(state: GameState, letter: Letter) -> GameState | Outcome:
    """Apply a legal letter: a terminal Outcome on a revisit, else the next state."""
    if state.last is not None and letter.index == state.last.inverse_index:
        raise IllegalMoveError(f"letter {letter.name} backtracks the previous move")
    if state.graph.alphabet[letter.index] != letter:
        raise IllegalMoveError(f"letter {letter.name} does not belong to this graph")
    target = state.graph.neighbors[state.current][letter.index]
    bit = 1 << target
    if state.visited & bit:
        return _relator_outcome(state.kind, state.mover)
    return GameState(
        graph=state.graph,
        kind=state.kind,
        visited=state.visited | bit,
        current=target,
        last=letter,
        mover=(state.mover + 1) % state.kind.players,
        move_count=state.move_count + 1,
    )


def outcome_if_no_moves(state: GameState) -> Outcome:
    """The mover loses when stuck; others rank in seat order after the next player."""
    if legal_moves(state):
        raise IllegalMoveError("outcome_if_no_moves called on a state with legal moves")
    winner = (state.mover + 1) % state.kind.players
    return Outcome(
        cause=CAUSE_NO_MOVES, actor=state.mover, winner=winner, players=state.kind.players
    )


def format_move_line(turn: int, player: int, letter: Letter, label: str, visited: int) -> str:
    """One trace line for a move; player is the 0-based seat of the mover."""
    return f"turn={turn} player={player + 1} letter={letter.name} to={label} visited={visited}"


def format_result_line(outcome: Outcome) -> str:
    """The trace terminal line."""
    ranking = ",".join(f"P{seat + 1}" for seat in outcome.ranking)
    return f"result cause={outcome.cause} winner=P{outcome.winner + 1} ranking=[{ranking}]"
