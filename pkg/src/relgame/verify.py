"""Verification suites: solver outcomes vs the claim table, policy checks, isomorphism pairs."""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

from relgame.cayley import CayleyGraph, build_cayley, undirected_isomorphic
from relgame.engine import RAV, REL, GameKind, rel_n
from relgame.groups import (
    Cyclic,
    Dicyclic,
    DicyclicTriangle,
    Dihedral,
    DihedralCoxeter,
    GeneralizedDihedral,
    Group,
    GroupSpec,
    ProductCyclic,
    Quaternion,
    build_group,
    generating_set,
)
from relgame.solver import (
    BudgetExceededError,
    adversarial_strategy_check,
    no_suicide_filter,
    solve,
)
from relgame.strategies import bind_policy, parse_policy_token, predicted_outcome

__all__ = [
    "ALL_SUITES",
    "CaseRecord",
    "Instance",
    "POLICY_SUITE_NAMES",
    "Report",
    "SOLVE_SUITE_NAMES",
    "SuiteConfig",
    "SuiteConfigError",
    "build_instance",
    "catalog_instances",
    "run_policy_suite",
    "run_suite",
    "solve_case",
]


class SuiteConfigError(ValueError):
    """Raised for an unknown suite name or an invalid configuration."""


@dataclass(frozen=True)
class SuiteConfig:
    """Which suite to run and under what limits.

    `max_n` trims each family's default parameter range, `extended` adds the
    long-running optional cases, `budget` overrides the solver state guard,
    `parallelism` bounds concurrent case execution, and `out` is an optional
    JSON report path.
    """

    suite: str
    max_n: int | None = None
    extended: bool = False
    budget: int | None = None
    parallelism: int = 1
    out: str | None = None

    def __post_init__(self) -> None:
        if self.max_n is not None and self.max_n < 2:
            raise SuiteConfigError(f"max_n must be at least 2, got {self.max_n}")
        if self.parallelism < 1:
            raise SuiteConfigError(f"parallelism must be at least 1, got {self.parallelism}")


@dataclass(frozen=True)
class CaseRecord:
    """One verified instance: the claimed winner, the solved winner, and effort."""

    group: str
    gens: str
    game: str
    players: int
    predicted: str
    solved: str
    match: bool
    states: int
    ms: int
    error: str | None = None
    policy: str | None = None

    def to_json(self) -> dict:
        """The case as a JSON-ready mapping."""
        record = {
            "group": self.group,
            "gens": self.gens,
            "game": self.game,
            "players": self.players,
            "predicted": self.predicted,
            "solved": self.solved,
            "match": self.match,
            "states": self.states,
            "ms": self.ms,
        }
        if self.error is not None:
            record["error"] = self.error
        if self.policy is not None:
            record["policy"] = self.policy
        return record


@dataclass(frozen=True)
class Report:
    """All case records for one suite plus the aggregate verdict."""

    suite: str
    cases: tuple[CaseRecord, ...]

    @property
    def passed(self) -> bool:
        """True when every case matched and none errored."""
        return all(case.match and case.error is None for case in self.cases)

    def to_json(self) -> dict:
        """The report as a JSON-ready mapping."""
        matched = sum(1 for case in self.cases if case.match and case.error is None)
        return {
            "suite": self.suite,
            "cases": [case.to_json() for case in self.cases],
            "summary": {
                "total": len(self.cases),
                "matched": matched,
                "failed": len(self.cases) - matched,
            },
            "pass": self.passed,
        }

    def write(self, path: str) -> None:
        """Serialize the report to a JSON file."""
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self.to_json(), handle, indent=2)
            handle.write("\n")


@dataclass(frozen=True)
class Instance:
    """A catalog entry: a group spec plus which generating set to play on.

    `genset` is `canonical` for the family's own generators, `complete` for
    all non-identity elements, or `index2-complement` for the complement of
    the cyclic subgroup generated by the first canonical generator.
    """

    spec: GroupSpec
    genset: str = "canonical"

    def __post_init__(self) -> None:
        if self.genset not in ("canonical", "complete", "index2-complement"):
            raise SuiteConfigError(f"unknown generating-set mode {self.genset!r}")


def _element_name(group: Group, element: int) -> str:
    return group.labels[element].replace("^", "").replace(" ", "")


def build_instance(instance: Instance) -> tuple[GroupSpec, CayleyGraph]:
    """Materialize an instance as its spec and Cayley graph."""
    group, gens = build_group(instance.spec)
    if instance.genset == "complete":
        elements = tuple(g for g in range(group.order) if g != group.identity)
        gens = generating_set(group, tuple(_element_name(group, g) for g in elements), elements)
    elif instance.genset == "index2-complement":
        subgroup = {group.identity}
        g = gens.elements[0]
        while g not in subgroup:
            subgroup.add(g)
            g = group.mul(g, gens.elements[0])
        elements = tuple(g for g in range(group.order) if g not in subgroup)
        gens = generating_set(group, tuple(_element_name(group, g) for g in elements), elements)
    return instance.spec, build_cayley(group, gens)


def catalog_instances() -> tuple[Instance, ...]:
    """Every instance the verification suites draw from, in family order."""
    entries: list[Instance] = []
    entries.extend(Instance(Cyclic(n)) for n in range(2, 13))
    entries.extend(Instance(ProductCyclic(n, 2)) for n in range(2, 9))
    entries.append(Instance(ProductCyclic(3, 3)))
    entries.extend(Instance(ProductCyclic(n, 3)) for n in range(4, 8))
    entries.extend(Instance(ProductCyclic(n, 4)) for n in range(4, 8))
    entries.extend(Instance(Dihedral(n)) for n in range(3, 10))
    entries.extend(Instance(DihedralCoxeter(n)) for n in range(3, 7))
    entries.extend(Instance(Dicyclic(n)) for n in range(2, 5))
    entries.extend(Instance(DicyclicTriangle(n)) for n in range(2, 4))
    entries.append(Instance(Quaternion()))
    entries.append(Instance(GeneralizedDihedral((2,))))
    entries.append(Instance(GeneralizedDihedral((6,))))
    entries.append(Instance(GeneralizedDihedral((2, 2))))
    entries.append(Instance(GeneralizedDihedral((3, 3))))
    entries.extend(Instance(Cyclic(n), "complete") for n in range(3, 7))
    entries.append(Instance(Dihedral(3), "complete"))
    entries.append(Instance(Dihedral(4), "index2-complement"))
    return tuple(entries)


def solve_case(
    spec: GroupSpec,
    graph: CayleyGraph,
    kind: GameKind,
    *,
    budget: int | None = None,
) -> CaseRecord:
    """Solve one instance and compare the winner against the claim table."""
    prediction = predicted_outcome(spec, graph, kind)
    predicted = "n/a" if prediction is None else f"P{prediction.winner + 1}"
    started = time.perf_counter()
    try:
        result = solve(graph, kind, budget=budget)
    except BudgetExceededError as exc:
        return CaseRecord(
            group=graph.group.name,
            gens=",".join(graph.gens.names),
            game=kind.game,
            players=kind.players,
            predicted=predicted,
            solved="n/a",
            match=False,
            states=0,
            ms=int((time.perf_counter() - started) * 1000),
            error=str(exc),
        )
    solved = f"P{result.winner + 1}"
    return CaseRecord(
        group=graph.group.name,
        gens=",".join(graph.gens.names),
        game=kind.game,
        players=kind.players,
        predicted=predicted,
        solved=solved,
        match=True if prediction is None else solved == predicted,
        states=result.stats.states_explored,
        ms=int((time.perf_counter() - started) * 1000),
    )


CaseThunk = Callable[[], CaseRecord]


def _solve_thunk(instance: Instance, kind: GameKind, budget: int | None = None) -> CaseThunk:
    def run() -> CaseRecord:
        spec, graph = build_instance(instance)
        return solve_case(spec, graph, kind, budget=budget)

    return run


def _policy_thunk(
    token: str,
    instance: Instance,
    kind: GameKind,
    seat: int,
    *,
    restricted: bool = False,
    budget: int | None = None,
) -> CaseThunk:
    def run() -> CaseRecord:
        _, graph = build_instance(instance)
        started = time.perf_counter()
        policy = bind_policy(parse_policy_token(token), graph, kind, seat, budget=budget)
        opponent = no_suicide_filter if restricted else None
        try:
            result = adversarial_strategy_check(
                policy, graph, kind, seat, opponent_moves=opponent, budget=budget
            )
        except BudgetExceededError as exc:
            return CaseRecord(
                group=graph.group.name,
                gens=",".join(graph.gens.names),
                game=kind.game,
                players=kind.players,
                predicted=f"P{seat + 1}",
                solved="n/a",
                match=False,
                states=0,
                ms=int((time.perf_counter() - started) * 1000),
                error=str(exc),
                policy=token,
            )
        return CaseRecord(
            group=graph.group.name,
            gens=",".join(graph.gens.names),
            game=kind.game,
            players=kind.players,
            predicted=f"P{seat + 1}",
            solved=f"P{seat + 1}" if result.ok else "n/a",
            match=result.ok,
            states=result.states_explored,
            ms=int((time.perf_counter() - started) * 1000),
            policy=token,
        )

    return run


def _iso_thunk(left: Instance, right: Instance, kind: GameKind) -> CaseThunk:
    def run() -> CaseRecord:
        started = time.perf_counter()
        _, graph_a = build_instance(left)
        _, graph_b = build_instance(right)
        isomorphic = undirected_isomorphic(graph_a, graph_b)
        result_a = solve(graph_a, kind)
        result_b = solve(graph_b, kind)
        return CaseRecord(
            group=f"{graph_a.group.name} ~ {graph_b.group.name}",
            gens=f"{','.join(graph_a.gens.names)} ~ {','.join(graph_b.gens.names)}",
            game=kind.game,
            players=kind.players,
            predicted=f"P{result_a.winner + 1}",
            solved=f"P{result_b.winner + 1}",
            match=isomorphic and result_a.winner == result_b.winner,
            states=result_a.stats.states_explored + result_b.stats.states_explored,
            ms=int((time.perf_counter() - started) * 1000),
        )

    return run


def _range_top(config: SuiteConfig, default: int) -> int:
    return default if config.max_n is None else min(config.max_n, default)


def _cyclic_cases(config: SuiteConfig) -> list[CaseThunk]:
    top = _range_top(config, 12)
    thunks = []
    for n in range(3, top + 1):
        thunks.append(_solve_thunk(Instance(Cyclic(n)), REL, config.budget))
        thunks.append(_solve_thunk(Instance(Cyclic(n)), RAV, config.budget))
    return thunks


def _dihedral_rel_cases(config: SuiteConfig) -> list[CaseThunk]:
    top = _range_top(config, 9)
    return [_solve_thunk(Instance(Dihedral(n)), REL, config.budget) for n in range(3, top + 1)]


def _dihedral_rav_cases(config: SuiteConfig) -> list[CaseThunk]:
    top = _range_top(config, 9)
    return [_solve_thunk(Instance(Dihedral(n)), RAV, config.budget) for n in range(3, top + 1)]


def _rav_order2_cases(config: SuiteConfig) -> list[CaseThunk]:
    thunks = []
    for instance in catalog_instances():
        _, graph = build_instance(instance)
        if graph.order <= 24 and any(letter.is_involution for letter in graph.alphabet):
            thunks.append(_solve_thunk(instance, RAV, config.budget))
    return thunks


def _complete_cases(config: SuiteConfig) -> list[CaseThunk]:
    instances = [Instance(Cyclic(n), "complete") for n in range(3, 7)]
    instances.append(Instance(Dihedral(3), "complete"))
    thunks = []
    for instance in instances:
        thunks.append(_solve_thunk(instance, REL, config.budget))
        thunks.append(_solve_thunk(instance, RAV, config.budget))
    return thunks


def _bipartite_cases(config: SuiteConfig) -> list[CaseThunk]:
    thunks = []
    for instance in (Instance(Quaternion()), Instance(Dihedral(4), "index2-complement")):
        thunks.append(_solve_thunk(instance, REL, config.budget))
        thunks.append(_solve_thunk(instance, RAV, config.budget))
    return thunks


def _dicyclic_rel_cases(config: SuiteConfig) -> list[CaseThunk]:
    top = _range_top(config, 4)
    thunks = [_solve_thunk(Instance(Dicyclic(n)), REL, config.budget) for n in range(2, top + 1)]
    if config.extended:
        thunks.append(_solve_thunk(Instance(Dicyclic(5)), REL, config.budget))
    thunks.extend(
        _solve_thunk(Instance(DicyclicTriangle(n)), REL, config.budget)
        for n in range(2, min(_range_top(config, 3), 3) + 1)
    )
    thunks.append(_solve_thunk(Instance(Quaternion()), REL, config.budget))
    return thunks


def _dicyclic_rav_cases(config: SuiteConfig) -> list[CaseThunk]:
    top = _range_top(config, 4)
    thunks = [_solve_thunk(Instance(Dicyclic(n)), RAV, config.budget) for n in range(2, top + 1)]
    thunks.extend(
        _solve_thunk(Instance(DicyclicTriangle(n)), RAV, config.budget)
        for n in range(2, min(_range_top(config, 3), 3) + 1)
    )
    thunks.append(_solve_thunk(Instance(Quaternion()), RAV, config.budget))
    return thunks


def _product_cases(config: SuiteConfig) -> list[CaseThunk]:
    pairs = [(n, 2) for n in range(2, 9)]
    pairs.append((3, 3))
    pairs.extend((n, 3) for n in range(4, 8))
    pairs.extend((n, 4) for n in range(4, 8))
    thunks = []
    for n, m in pairs:
        if n * m > 24:
            # Above the default two-player guard: run only the claimed game
            # with a widened budget so the 28-vertex case stays covered.
            budget = config.budget if config.budget is not None else n * m
            thunks.append(_solve_thunk(Instance(ProductCyclic(n, m)), REL, budget))
            continue
        thunks.append(_solve_thunk(Instance(ProductCyclic(n, m)), REL, config.budget))
        thunks.append(_solve_thunk(Instance(ProductCyclic(n, m)), RAV, config.budget))
    return thunks


def _rel3_cases(config: SuiteConfig) -> list[CaseThunk]:
    top = _range_top(config, 7)
    return [_solve_thunk(Instance(Dihedral(n)), rel_n(3), config.budget) for n in range(3, top + 1)]


def _iso_cases(config: SuiteConfig) -> list[CaseThunk]:
    thunks = []
    for n in range(3, _range_top(config, 6) + 1):
        for kind in (REL, RAV):
            thunks.append(_iso_thunk(Instance(DihedralCoxeter(n)), Instance(Cyclic(2 * n)), kind))
    for n in range(3, _range_top(config, 5) + 1):
        for kind in (REL, RAV):
            thunks.append(_iso_thunk(Instance(Dihedral(n)), Instance(ProductCyclic(n, 2)), kind))
    return thunks


def _policy_always_s_cases(config: SuiteConfig) -> list[CaseThunk]:
    top = _range_top(config, 9)
    return [
        _policy_thunk("always-s", Instance(Dihedral(n)), RAV, 0, budget=config.budget)
        for n in range(3, top + 1)
    ]


def _policy_dic_rav_cases(config: SuiteConfig) -> list[CaseThunk]:
    top = _range_top(config, 4)
    thunks = [
        _policy_thunk("dic-rav-x", Instance(Dicyclic(n)), RAV, 0, budget=config.budget)
        for n in range(2, top + 1)
    ]
    thunks.extend(
        _policy_thunk("dic-rav-b", Instance(DicyclicTriangle(n)), RAV, 0, budget=config.budget)
        for n in range(2, min(_range_top(config, 3), 3) + 1)
    )
    return thunks


def _policy_mirror_cases(config: SuiteConfig) -> list[CaseThunk]:
    return [
        _policy_thunk("mirror", Instance(Dicyclic(n)), REL, 1, budget=config.budget)
        for n in (2, 4)
    ]


def _policy_product_cases(config: SuiteConfig) -> list[CaseThunk]:
    cases = [
        ("prod-alt-p1-a", ProductCyclic(4, 3), 0),
        ("prod-alt-p1-b", ProductCyclic(5, 3), 0),
        ("prod-alt-p2", ProductCyclic(6, 3), 1),
        ("prod-alt-p1-a", ProductCyclic(7, 3), 0),
        ("prod-alt-p2", ProductCyclic(4, 4), 1),
        ("prod-alt-p1-a", ProductCyclic(5, 4), 0),
        ("prod-z4-p2", ProductCyclic(6, 4), 1),
        ("prod-alt-p1-b", ProductCyclic(7, 4), 0),
    ]
    thunks = []
    for token, spec, seat in cases:
        budget = config.budget
        if budget is None and spec.n * spec.m > 24:
            budget = spec.n * spec.m
        thunks.append(_policy_thunk(token, Instance(spec), REL, seat, budget=budget))
    return thunks


def _policy_rel3_cases(config: SuiteConfig) -> list[CaseThunk]:
    top = _range_top(config, 7)
    # The seat-1 strategy is checked against opponents restricted to moves
    # that do not immediately lose for the mover; unrestricted opponents can
    # throw the game to the third player, which no fixed seat-1 policy
    # survives for n >= 5.
    return [
        _policy_thunk(
            "rel3-always-s",
            Instance(Dihedral(n)),
            rel_n(3),
            0,
            restricted=True,
            budget=config.budget,
        )
        for n in range(3, top + 1, 2)
    ]


_SOLVE_SUITES: dict[str, Callable[[SuiteConfig], list[CaseThunk]]] = {
    "cyclic": _cyclic_cases,
    "dihedral-rel": _dihedral_rel_cases,
    "dihedral-rav": _dihedral_rav_cases,
    "rav-order2": _rav_order2_cases,
    "complete": _complete_cases,
    "bipartite": _bipartite_cases,
    "dicyclic-rel": _dicyclic_rel_cases,
    "dicyclic-rav": _dicyclic_rav_cases,
    "products": _product_cases,
    "rel3-dihedral": _rel3_cases,
    "iso-equivalence": _iso_cases,
}

_POLICY_SUITES: dict[str, Callable[[SuiteConfig], list[CaseThunk]]] = {
    "policy-rav-always-s": _policy_always_s_cases,
    "policy-dic-rav": _policy_dic_rav_cases,
    "policy-mirror": _policy_mirror_cases,
    "policy-products": _policy_product_cases,
    "policy-rel3": _policy_rel3_cases,
}

SOLVE_SUITE_NAMES = tuple(_SOLVE_SUITES)
POLICY_SUITE_NAMES = tuple(_POLICY_SUITES)
ALL_SUITES = SOLVE_SUITE_NAMES + POLICY_SUITE_NAMES


def _run_cases(config: SuiteConfig, thunks: list[CaseThunk]) -> Report:
    if config.parallelism == 1:
        cases = tuple(thunk() for thunk in thunks)
    else:
        with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
            cases = tuple(pool.map(lambda thunk: thunk(), thunks))
    report = Report(suite=config.suite, cases=cases)
    if config.out is not None:
        report.write(config.out)
    return report


def run_suite(config: SuiteConfig) -> Report:
    """Run one solve suite: compare solver winners to the claim table per case."""
    try:
        builder = _SOLVE_SUITES[config.suite]
    except KeyError:
        known = ", ".join(ALL_SUITES)
        raise SuiteConfigError(f"unknown solve suite {config.suite!r}; expected one of: {known}") from None
    return _run_cases(config, builder(config))


def run_policy_suite(config: SuiteConfig) -> Report:
    """Run one policy suite: adversarial strategy checks for each claimed seat."""
    try:
        builder = _POLICY_SUITES[config.suite]
    except KeyError:
        known = ", ".join(POLICY_SUITE_NAMES)
        raise SuiteConfigError(
            f"unknown policy suite {config.suite!r}; expected one of: {known}"
        ) from None
    return _run_cases(config, builder(config))
