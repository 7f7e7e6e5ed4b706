"""Command-line front end: solve instances, run suites, play games, export graphs."""

from __future__ import annotations

import argparse
import json
import os
import sys

from relgame.cayley import CayleyGraph, IsomorphismLimitError, build_cayley, export_dot
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
)
from relgame.groups import (
    Cyclic,
    Dicyclic,
    DicyclicTriangle,
    Dihedral,
    DihedralCoxeter,
    FromTable,
    GeneralizedDihedral,
    GeneratingSetError,
    GroupAxiomError,
    GroupSpec,
    GroupTableError,
    ProductCyclic,
    Quaternion,
    build_group,
)
from relgame.solver import BudgetExceededError, PolicyMoveError, best_move, solve
from relgame.strategies import PolicyBindError, bind_policy, parse_policy_token
from relgame.verify import (
    ALL_SUITES,
    POLICY_SUITE_NAMES,
    SuiteConfig,
    SuiteConfigError,
    run_policy_suite,
    run_suite,
    solve_case,
)

__all__ = ["GroupTokenError", "main", "parse_group_token"]

BUDGET_ENV = "RELGAME_STATE_BUDGET"


class GroupTokenError(ValueError):
    """Raised when a group token does not parse."""


def parse_group_token(token: str) -> GroupSpec:
    """Parse `cyclic:N | product:NxM | dihedral:N[:coxeter] | dicyclic:N[:abc] |
    quaternion | gendih:F1,F2,... | table:PATH` into a group spec."""
    if token == "quaternion":
        return Quaternion()
    head, sep, rest = token.partition(":")
    if not sep or not rest:
        raise GroupTokenError(f"unrecognized group token {token!r}")
    if head == "table":
        return FromTable(rest)
    if head == "cyclic":
        return Cyclic(_int_field(token, rest))
    if head == "product":
        n, sep, m = rest.partition("x")
        if not sep:
            raise GroupTokenError(f"product token must look like product:NxM, got {token!r}")
        return ProductCyclic(_int_field(token, n), _int_field(token, m))
    if head == "dihedral":
        n, sep, variant = rest.partition(":")
        if not sep:
            return Dihedral(_int_field(token, n))
        if variant == "coxeter":
            return DihedralCoxeter(_int_field(token, n))
        raise GroupTokenError(f"unknown dihedral variant {variant!r} in {token!r}")
    if head == "dicyclic":
        n, sep, variant = rest.partition(":")
        if not sep:
            return Dicyclic(_int_field(token, n))
        if variant == "abc":
            return DicyclicTriangle(_int_field(token, n))
        raise GroupTokenError(f"unknown dicyclic variant {variant!r} in {token!r}")
    if head == "gendih":
        return GeneralizedDihedral(tuple(_int_field(token, part) for part in rest.split(",")))
    raise GroupTokenError(f"unrecognized group token {token!r}")


def _int_field(token: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise GroupTokenError(f"expected an integer in group token {token!r}, got {text!r}") from None


def _build_graph(token: str) -> tuple[GroupSpec, CayleyGraph]:
    spec = parse_group_token(token)
    group, gens = build_group(spec)
    return spec, build_cayley(group, gens)


def _game_kind(game: str, players: int) -> GameKind:
    return GameKind(game, players)


def _env_budget() -> int | None:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise SuiteConfigError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None


def _effective_budget(flag: int | None) -> int | None:
    return flag if flag is not None else _env_budget()


def _cmd_solve(args: argparse.Namespace) -> int:
    spec, graph = _build_graph(args.group)
    kind = _game_kind(args.game, args.players)
    budget = _effective_budget(args.budget)
    record = solve_case(spec, graph, kind, budget=budget)
    if args.json:
        print(json.dumps(record.to_json()))
        return 0 if record.error is None else 1
    if record.error is not None:
        print(f"error: {record.error}", file=sys.stderr)
        return 1
    result = solve(graph, kind, budget=budget)
    first = "none" if result.optimal_first is None else result.optimal_first.name
    ranking = ",".join(f"P{seat + 1}" for seat in result.ranking)
    print(
        f"winner={record.solved} ranking=[{ranking}] first={first} "
        f"predicted={record.predicted} states={result.stats.states_explored} "
        f"ms={int(result.stats.elapsed * 1000)}"
    )
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    names = ALL_SUITES if args.suite == "all" else (args.suite,)
    exit_code = 0
    for name in names:
        config = SuiteConfig(
            suite=name,
            max_n=args.max_n,
            extended=args.extended,
            budget=_effective_budget(args.budget),
            parallelism=args.parallelism,
            out=args.out if args.suite != "all" else None,
        )
        runner = run_policy_suite if name in POLICY_SUITE_NAMES else run_suite
        report = runner(config)
        verdict = "pass" if report.passed else "FAIL"
        print(f"suite={name} cases={len(report.cases)} {verdict}")
        for case in report.cases:
            if not case.match or case.error is not None:
                print(f"  mismatch: {json.dumps(case.to_json())}")
        if not report.passed:
            exit_code = 1
    if args.suite == "all" and args.out is not None:
        merged = {
            "suite": "all",
            "cases": [],
            "summary": {"total": 0, "matched": 0, "failed": 0},
            "pass": exit_code == 0,
        }
        for name in names:
            config = SuiteConfig(
                suite=name,
                max_n=args.max_n,
                extended=args.extended,
                budget=_effective_budget(args.budget),
                parallelism=args.parallelism,
            )
            runner = run_policy_suite if name in POLICY_SUITE_NAMES else run_suite
            report = runner(config)
            data = report.to_json()
            merged["cases"].extend(data["cases"])
            for key in ("total", "matched", "failed"):
                merged["summary"][key] += data["summary"][key]
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(merged, handle, indent=2)
            handle.write("\n")
    return exit_code


def _human_move(state: GameState) -> object:
    moves = legal_moves(state)
    names = ", ".join(letter.name for letter in moves)
    label = state.graph.group.labels[state.current]
    while True:
        prompt = (
            f"player {state.mover + 1} at {label} | visited {state.visited_count}/"
            f"{state.graph.order} | legal: {names}\n> "
        )
        try:
            raw = input(prompt).strip()
        except EOFError:
            raise
        for letter in moves:
            if letter.name == raw:
                return letter
        print(f"illegal or unknown letter {raw!r}; choose one of: {names}")


def _cmd_play(args: argparse.Namespace) -> int:
    spec, graph = _build_graph(args.group)
    kind = _game_kind(args.game, args.players)
    budget = _effective_budget(args.budget)
    controllers = []
    seats = (args.seat_1, args.seat_2, args.seat_3, args.seat_4)[: kind.players]
    for seat, control in enumerate(seats):
        if control is None:
            raise GroupTokenError(f"--seat-{seat + 1} is required for {kind.players} players")
        if control == "human":
            controllers.append(None)
        else:
            pid = parse_policy_token("oracle" if control == "oracle" else control)
            controllers.append(bind_policy(pid, graph, kind, seat, budget=budget))
    state = initial_state(graph, kind)
    lines: list[str] = []
    while True:
        controller = controllers[state.mover]
        if controller is None:
            letter = _human_move(state)
        else:
            letter = controller(state)
        turn = state.move_count + 1
        mover = state.mover
        nxt = apply_move(state, letter)
        if isinstance(nxt, Outcome):
            target = graph.neighbors[state.current][letter.index]
            visited = state.visited | (1 << target)
            line = format_move_line(turn, mover, letter, graph.group.labels[target], visited)
            lines.append(line)
            print(line)
            result = format_result_line(nxt)
            lines.append(result)
            print(result)
            break
        line = format_move_line(turn, mover, letter, graph.group.labels[nxt.current], nxt.visited)
        lines.append(line)
        print(line)
        state = nxt
        moves = legal_moves(state)
        if not moves:
            from relgame.engine import outcome_if_no_moves

            outcome = outcome_if_no_moves(state)
            result = format_result_line(outcome)
            lines.append(result)
            print(result)
            break
    if args.trace:
        print("trace:")
        for line in lines:
            print(f"  {line}")
    return 0


def _cmd_export(args: argparse.Namespace) -> int:
    _, graph = _build_graph(args.group)
    text = export_dot(graph)
    if args.out is None:
        print(text, end="")
        return 0
    try:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return 1
    return 0


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relgame",
        description="Exact engine for relator achievement and avoidance games on Cayley graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one instance and print the winner")
    p_solve.add_argument("group", help="group token, e.g. dihedral:5 or product:6x3")
    p_solve.add_argument("--game", choices=("rel", "rav"), default="rel")
    p_solve.add_argument("--players", type=int, choices=(2, 3, 4), default=2)
    p_solve.add_argument("--budget", type=int, default=None, help="state budget override")
    p_solve.add_argument("--json", action="store_true", help="emit a verify case record")
    p_solve.set_defaults(func=_cmd_solve)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("--suite", default="all", choices=("all",) + ALL_SUITES)
    p_verify.add_argument("--max-n", dest="max_n", type=int, default=None)
    p_verify.add_argument("--extended", action="store_true", help="include long-running cases")
    p_verify.add_argument("--budget", type=int, default=None)
    p_verify.add_argument("--parallelism", type=int, default=1)
    p_verify.add_argument("--out", default=None, help="write the JSON report here")
    p_verify.set_defaults(func=_cmd_verify)

    p_play = sub.add_parser("play", help="play one game interactively or policy vs policy")
    p_play.add_argument("group")
    p_play.add_argument("--game", choices=("rel", "rav"), default="rel")
    p_play.add_argument("--players", type=int, choices=(2, 3, 4), default=2)
    p_play.add_argument("--budget", type=int, default=None)
    for seat in (1, 2, 3, 4):
        p_play.add_argument(
            f"--seat-{seat}",
            dest=f"seat_{seat}",
            default=None,
            help="human, oracle, or a policy token",
        )
    p_play.add_argument("--trace", action="store_true", help="reprint the full trace at the end")
    p_play.set_defaults(func=_cmd_play)

    p_export = sub.add_parser("export", help="write the Cayley graph in DOT format")
    p_export.add_argument("group")
    p_export.add_argument("--out", default=None, help="output path (default: stdout)")
    p_export.set_defaults(func=_cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    """Entry point; returns the process exit code."""
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (
        GroupTokenError,
        GroupTableError,
        GroupAxiomError,
        GeneratingSetError,
        SuiteConfigError,
        PolicyBindError,
        PolicyMoveError,
        IllegalMoveError,
        IsomorphismLimitError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EOFError:
        print("aborted", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
