"""Closed-form move policies and the predicted-winner table for game instances."""

from __future__ import annotations

from dataclasses import dataclass

from relgame.cayley import CayleyGraph, Letter, is_complete, is_complete_bipartite
from relgame.engine import GameKind, GameState
from relgame.groups import (
    Cyclic,
    Dicyclic,
    DicyclicTriangle,
    Dihedral,
    DihedralCoxeter,
    GeneralizedDihedral,
    GroupSpec,
    ProductCyclic,
    Quaternion,
)
from relgame.solver import Policy, PolicyMoveError, best_move

__all__ = [
    "AlwaysInvolution",
    "DicyclicRavToggleB",
    "DicyclicRavToggleX",
    "DihedralRelOddP1",
    "Mirror",
    "POLICY_TOKENS",
    "PolicyBindError",
    "PolicyId",
    "Prediction",
    "ProductAlternateP1",
    "ProductAlternateP2",
    "ProductZ4P2",
    "Rel3AlwaysS",
    "SolverOracle",
    "bind_policy",
    "parse_policy_token",
    "policy_move",
    "predicted_outcome",
    "square_of",
]


class PolicyBindError(ValueError):
    """Raised when a policy is bound to an instance outside its declared scope."""


@dataclass(frozen=True)
class AlwaysInvolution:
    """Avoidance-game first-player policy: play one involution letter every turn."""

    genname: str


@dataclass(frozen=True)
class DihedralRelOddP1:
    """Opening-player policy for the achievement game on odd dihedral groups."""


@dataclass(frozen=True)
class Mirror:
    """Second-player policy: repeat the opponent's previous letter."""


@dataclass(frozen=True)
class ProductAlternateP1:
    """Opening-player alternation for two-generator abelian products."""

    first: str

    def __post_init__(self) -> None:
        if self.first not in ("a", "b"):
            raise PolicyBindError(f"opening letter must be 'a' or 'b', got {self.first!r}")


@dataclass(frozen=True)
class ProductAlternateP2:
    """Second-player alternation for two-generator abelian products."""


@dataclass(frozen=True)
class ProductZ4P2:
    """Second-player copy-then-alternate policy for products with an order-4 factor."""


@dataclass(frozen=True)
class Rel3AlwaysS:
    """Three-player achievement policy: play s until a winning move appears."""

    seat: int = 0


@dataclass(frozen=True)
class DicyclicRavToggleX:
    """Avoidance first-player policy on dicyclic {a, x}: flip the x-coordinate."""


@dataclass(frozen=True)
class DicyclicRavToggleB:
    """Avoidance first-player policy on dicyclic {a, b, c}: flip via b."""


@dataclass(frozen=True)
class SolverOracle:
    """Play the exact-solver best move at every turn."""


PolicyId = (
    AlwaysInvolution
    | DihedralRelOddP1
    | Mirror
    | ProductAlternateP1
    | ProductAlternateP2
    | ProductZ4P2
    | Rel3AlwaysS
    | DicyclicRavToggleX
    | DicyclicRavToggleB
    | SolverOracle
)

POLICY_TOKENS: dict[str, PolicyId] = {
    "always-s": AlwaysInvolution("s"),
    "dihedral-rel-odd-p1": DihedralRelOddP1(),
    "mirror": Mirror(),
    "prod-alt-p1-a": ProductAlternateP1("a"),
    "prod-alt-p1-b": ProductAlternateP1("b"),
    "prod-alt-p2": ProductAlternateP2(),
    "prod-z4-p2": ProductZ4P2(),
    "rel3-always-s": Rel3AlwaysS(0),
    "dic-rav-x": DicyclicRavToggleX(),
    "dic-rav-b": DicyclicRavToggleB(),
    "oracle": SolverOracle(),
}


def parse_policy_token(token: str) -> PolicyId:
    """Map a command-line policy token to its policy id."""
    try:
        return POLICY_TOKENS[token]
    except KeyError:
        known = ", ".join(sorted(POLICY_TOKENS))
        raise PolicyBindError(f"unknown policy token {token!r}; expected one of: {known}") from None


def _letter(state: GameState, name: str) -> Letter:
    letter = state.graph.letter_by_name(name)
    if letter is None:
        raise PolicyMoveError(f"graph {state.graph.group.name} has no letter named {name!r}")
    return letter


def _winning_letter(state: GameState) -> Letter | None:
    """The smallest-index legal letter that closes a relator, if any."""
    row = state.graph.neighbors[state.current]
    ban = -1 if state.last is None else state.last.inverse_index
    for letter in state.graph.alphabet:
        if letter.index != ban and (state.visited >> row[letter.index]) & 1:
            return letter
    return None


def _require_last(state: GameState, what: str) -> Letter:
    if state.last is None:
        raise PolicyMoveError(f"{what} needs a previous opponent letter but none was played")
    return state.last


def _partner_name(state: GameState, last: Letter) -> str:
    base = state.graph.gens.names[last.gen_index]
    if base not in ("a", "b"):
        raise PolicyMoveError(f"alternation expects letters over generators a and b, got {base!r}")
    return "b" if base == "a" else "a"


def _path_vertices(state: GameState) -> tuple[int, ...]:
    """Reconstruct the move path from the visited set, current vertex, and last letter.

    A live position's walk has visited a fresh vertex on every move (revisiting
    ends the game), so the path is a simple cover of the visited set ending at
    `current` along the `last` edge; a deterministic backward search recovers it.
    """
    graph = state.graph
    if state.last is None:
        return (state.current,)
    prev = graph.neighbors[state.current][state.last.inverse_index]
    tail = [state.current, prev]
    seen = (1 << state.current) | (1 << prev)
    total = state.move_count + 1

    def extend(vertex: int) -> bool:
        nonlocal seen
        if len(tail) == total:
            return vertex == graph.group.identity
        row = graph.neighbors[vertex]
        for letter in graph.alphabet:
            nxt = row[letter.index]
            if (seen >> nxt) & 1 or not (state.visited >> nxt) & 1:
                continue
            tail.append(nxt)
            seen |= 1 << nxt
            if extend(nxt):
                return True
            tail.pop()
            seen &= ~(1 << nxt)
        return False

    if not extend(prev):
        raise PolicyMoveError("no move path covers the visited set; state is not reachable")
    return tuple(reversed(tail))


def _class_letter(state: GameState, name: str) -> Letter:
    """The letter over the named generator, signed to keep that generator's latest direction.

    Moving a commuting generator against its established direction opens an
    immediate four-cycle return for the opponent, so the sound continuation
    repeats the sign of the most recent move over the same generator; a
    generator not yet played moves positively (the two directions are then
    interchangeable by symmetry).
    """
    graph = state.graph
    base = _letter(state, name)
    path = _path_vertices(state)
    for k in range(len(path) - 1, 0, -1):
        u, v = path[k - 1], path[k]
        step = next(l for l in graph.alphabet if graph.neighbors[u][l.index] == v)
        if step.gen_index == base.gen_index:
            return base if step.sign > 0 else graph.alphabet[base.inverse_index]
    return base


def policy_move(pid: PolicyId, state: GameState) -> Letter:
    """The letter the policy plays at this state."""
    if isinstance(pid, AlwaysInvolution):
        return _letter(state, pid.genname)
    if isinstance(pid, DihedralRelOddP1):
        win = _winning_letter(state)
        if win is not None:
            return win
        half = state.graph.order // 2
        return _letter(state, "r" if state.current < half else "r^-1")
    if isinstance(pid, Mirror):
        return _require_last(state, "mirror policy")
    if isinstance(pid, ProductAlternateP1):
        if state.move_count == 0:
            return _letter(state, pid.first)
        win = _winning_letter(state)
        if win is not None:
            return win
        return _class_letter(state, _partner_name(state, _require_last(state, "alternation policy")))
    if isinstance(pid, ProductAlternateP2):
        win = _winning_letter(state)
        if win is not None:
            return win
        return _class_letter(state, _partner_name(state, _require_last(state, "alternation policy")))
    if isinstance(pid, ProductZ4P2):
        win = _winning_letter(state)
        if win is not None:
            return win
        last = _require_last(state, "copy-then-alternate policy")
        if state.move_count == 1:
            return last
        return _class_letter(state, _partner_name(state, last))
    if isinstance(pid, Rel3AlwaysS):
        win = _winning_letter(state)
        if win is not None:
            return win
        return _letter(state, "s")
    if isinstance(pid, DicyclicRavToggleX):
        flipped = state.current >= state.graph.order // 2
        return _letter(state, "x^-1" if flipped else "x")
    if isinstance(pid, DicyclicRavToggleB):
        flipped = state.current >= state.graph.order // 2
        return _letter(state, "b^-1" if flipped else "b")
    if isinstance(pid, SolverOracle):
        return best_move(state).letter
    raise TypeError(f"unknown policy id {pid!r}")


def _bind_require(ok: bool, pid: PolicyId, why: str) -> None:
    if not ok:
        raise PolicyBindError(f"{type(pid).__name__} does not apply: {why}")


def _require_letters(graph: CayleyGraph, pid: PolicyId, *names: str) -> None:
    for name in names:
        _bind_require(graph.letter_by_name(name) is not None, pid, f"graph lacks letter {name!r}")


def _order_four(graph: CayleyGraph, name: str) -> bool:
    letter = graph.letter_by_name(name)
    if letter is None:
        return False
    group = graph.group
    sq = group.mul(letter.element, letter.element)
    return sq != group.identity and group.mul(sq, sq) == group.identity


def bind_policy(
    pid: PolicyId, graph: CayleyGraph, kind: GameKind, seat: int, *, budget: int | None = None
) -> Policy:
    """Validate that a policy applies to (graph, kind, seat) and return it as a callable."""
    if not 0 <= seat < kind.players:
        raise PolicyBindError(f"seat {seat} out of range for {kind.players} players")
    if isinstance(pid, SolverOracle):
        return lambda state: best_move(state, budget=budget).letter
    if isinstance(pid, AlwaysInvolution):
        _bind_require(not kind.is_rel, pid, "declared for the avoidance game")
        _bind_require(seat == 0, pid, "declared for the opening seat")
        letter = graph.letter_by_name(pid.genname)
        _bind_require(letter is not None, pid, f"graph lacks letter {pid.genname!r}")
        assert letter is not None
        _bind_require(letter.is_involution, pid, f"letter {pid.genname!r} is not an involution")
    elif isinstance(pid, DihedralRelOddP1):
        _bind_require(kind.is_rel and kind.players == 2, pid, "declared for the two-player achievement game")
        _bind_require(seat == 0, pid, "declared for the opening seat")
        _require_letters(graph, pid, "r", "r^-1", "s")
        s = graph.letter_by_name("s")
        assert s is not None
        _bind_require(s.is_involution, pid, "letter s must be an involution")
        _bind_require(graph.order % 4 == 2, pid, "declared for dihedral groups of odd index")
    elif isinstance(pid, Mirror):
        _bind_require(kind.is_rel and kind.players == 2, pid, "declared for the two-player achievement game")
        _bind_require(seat == 1, pid, "declared for the replying seat")
        _bind_require(
            all(not letter.is_involution for letter in graph.alphabet),
            pid,
            "an involution letter would make the mirrored reply a banned backtrack",
        )
    elif isinstance(pid, (ProductAlternateP1, ProductAlternateP2, ProductZ4P2)):
        _bind_require(kind.is_rel and kind.players == 2, pid, "declared for the two-player achievement game")
        want = 0 if isinstance(pid, ProductAlternateP1) else 1
        _bind_require(seat == want, pid, f"declared for seat {want + 1}")
        _require_letters(graph, pid, "a", "a^-1", "b", "b^-1")
        _bind_require(graph.gens.names == ("a", "b"), pid, "declared for two-generator products")
        if isinstance(pid, ProductZ4P2):
            _bind_require(_order_four(graph, "b"), pid, "generator b must have order 4")
    elif isinstance(pid, Rel3AlwaysS):
        _bind_require(kind.is_rel and kind.players == 3, pid, "declared for the three-player achievement game")
        _bind_require(seat == pid.seat, pid, f"declared for seat {pid.seat + 1}")
        _require_letters(graph, pid, "r", "r^-1", "s")
        s = graph.letter_by_name("s")
        assert s is not None
        _bind_require(s.is_involution, pid, "letter s must be an involution")
    elif isinstance(pid, DicyclicRavToggleX):
        _bind_require(not kind.is_rel, pid, "declared for the avoidance game")
        _bind_require(seat == 0, pid, "declared for the opening seat")
        _require_letters(graph, pid, "x", "x^-1")
        _bind_require(_order_four(graph, "x"), pid, "generator x must have order 4")
        _bind_require(graph.order % 4 == 0, pid, "declared for groups of order 4n")
    elif isinstance(pid, DicyclicRavToggleB):
        _bind_require(not kind.is_rel, pid, "declared for the avoidance game")
        _bind_require(seat == 0, pid, "declared for the opening seat")
        _require_letters(graph, pid, "b", "b^-1")
        _bind_require(_order_four(graph, "b"), pid, "generator b must have order 4")
        _bind_require(graph.order % 4 == 0, pid, "declared for groups of order 4n")
    else:
        raise TypeError(f"unknown policy id {pid!r}")
    return lambda state: policy_move(pid, state)


@dataclass(frozen=True)
class Prediction:
    """A claimed winner (0-based seat) plus the rule that produced it."""

    winner: int
    rule: str


def square_of(element: int, n: int) -> frozenset[int]:
    """The 1-based indices of the four-cycles through a dihedral vertex.

    Vertices are indexed j*n + i for the normal form r^i s^j; square k is the
    four-cycle on {r^(k-1), r^(k-1)s, r^k, r^k s} and every vertex lies on
    squares k = i and k = i+1, wrapped into 1..n.
    """
    i = element % n
    return frozenset(((k - 1) % n) + 1 for k in (i, i + 1))


def _cycle_prediction(order: int, rel: bool) -> Prediction:
    if rel:
        return Prediction(0 if order % 2 else 1, "cycle-rel")
    return Prediction(0 if order % 2 == 0 else 1, "cycle-rav")


def _dihedral_rel(n: int) -> Prediction:
    return Prediction(0 if (n % 2 == 1 or n % 6 == 2) else 1, "dihedral-rel")


def _rel2_family(spec: GroupSpec, graph: CayleyGraph, names: tuple[str, ...]) -> Prediction | None:
    if isinstance(spec, Cyclic) and names == ("1",) and spec.n >= 3:
        return _cycle_prediction(spec.n, rel=True)
    if isinstance(spec, ProductCyclic) and names == ("a", "b"):
        big, small = max(spec.n, spec.m), min(spec.n, spec.m)
        if small == 2:
            return _cycle_prediction(4, rel=True) if big == 2 else _dihedral_rel(big)
        if big % small == 0:
            return Prediction(1, "product-rel")
        if big % small in (1, small - 1):
            return Prediction(0, "product-rel")
        if small == 4 and big % 4 == 2:
            return Prediction(1, "product-z4-rel")
        return None
    if isinstance(spec, Dihedral) and names == ("r", "s"):
        return _dihedral_rel(spec.n)
    if isinstance(spec, DihedralCoxeter) and names == ("s", "t"):
        return _cycle_prediction(2 * spec.n, rel=True)
    if isinstance(spec, Dicyclic) and names == ("a", "x"):
        return Prediction(0 if spec.n % 2 else 1, "dicyclic-rel")
    if isinstance(spec, DicyclicTriangle) and names == ("a", "b", "c"):
        return Prediction(1, "dicyclic-triangle-rel")
    if isinstance(spec, Quaternion) and names == ("i", "j"):
        return Prediction(1, "dicyclic-rel")
    if isinstance(spec, GeneralizedDihedral) and len(spec.factors) == 1 and names == ("a", "s"):
        k = spec.factors[0]
        return _cycle_prediction(4, rel=True) if k == 2 else _dihedral_rel(k)
    return None


def _rav_family(spec: GroupSpec, graph: CayleyGraph, names: tuple[str, ...]) -> Prediction | None:
    if isinstance(spec, Cyclic) and names == ("1",) and spec.n >= 3:
        return _cycle_prediction(spec.n, rel=False)
    if isinstance(spec, Dicyclic) and names == ("a", "x"):
        return Prediction(0, "dicyclic-rav")
    if isinstance(spec, DicyclicTriangle) and names == ("a", "b", "c"):
        return Prediction(0, "dicyclic-rav")
    if isinstance(spec, Quaternion) and names == ("i", "j"):
        return Prediction(0, "dicyclic-rav")
    return None


def _is_cycle(graph: CayleyGraph) -> bool:
    return graph.order >= 3 and all(len(row - {v}) == 2 for v, row in enumerate(graph.adjacency))


def _rel2_shape(graph: CayleyGraph) -> Prediction | None:
    if is_complete(graph):
        return Prediction(0, "complete-rel")
    bipartite, _ = is_complete_bipartite(graph)
    if bipartite:
        return Prediction(1, "bipartite-rel")
    if _is_cycle(graph):
        return _cycle_prediction(graph.order, rel=True)
    return None


def _rav_shape(graph: CayleyGraph) -> Prediction | None:
    if is_complete(graph):
        return Prediction(0 if graph.order % 2 == 0 else 1, "complete-rav")
    bipartite, _ = is_complete_bipartite(graph)
    if bipartite:
        return Prediction(0, "bipartite-rav")
    if _is_cycle(graph):
        return _cycle_prediction(graph.order, rel=False)
    return None


def predicted_outcome(spec: GroupSpec, graph: CayleyGraph, kind: GameKind) -> Prediction | None:
    """The claimed winner for an instance, or None when no rule covers it.

    Family rules fire only on the family's canonical generating set; other
    instances fall back to graph-shape rules (complete, complete bipartite,
    cycle). Avoidance games with an involution letter go to the opener first.
    """
    names = graph.gens.names
    if not kind.is_rel:
        if any(letter.is_involution for letter in graph.alphabet):
            return Prediction(0, "involution-rav")
        family = _rav_family(spec, graph, names)
        return family if family is not None else _rav_shape(graph)
    if kind.players == 2:
        family = _rel2_family(spec, graph, names)
        return family if family is not None else _rel2_shape(graph)
    if kind.players == 3 and isinstance(spec, Dihedral) and names == ("r", "s") and spec.n >= 3:
        return Prediction(0 if spec.n % 2 else 2, "dihedral-rel3")
    return None
