"""Finite groups as explicit multiplication tables with normal-form labels."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iter_product
from pathlib import Path
from typing import ClassVar

__all__ = [
    "AxiomReport",
    "Cyclic",
    "Dicyclic",
    "DicyclicTriangle",
    "Dihedral",
    "DihedralCoxeter",
    "FromTable",
    "GeneralizedDihedral",
    "GeneratingSet",
    "GeneratingSetError",
    "Group",
    "GroupAxiomError",
    "GroupSpec",
    "GroupTableError",
    "ProductCyclic",
    "Quaternion",
    "build_group",
    "check_group_axioms",
    "format_group_table",
    "generating_set",
    "load_group_table",
]

TABLE_HEADER = "relgame-table v1"

_FACTOR_NAMES = "abcdefghijklmnopqr"


class GroupTableError(ValueError):
    """Raised when a group-table file cannot be parsed."""


class GroupAxiomError(ValueError):
    """Raised when a multiplication table violates the group axioms."""


class GeneratingSetError(ValueError):
    """Raised when a declared generating set is invalid for its group."""


@dataclass(frozen=True)
class Cyclic:
    """Z_n under addition."""

    n: int


@dataclass(frozen=True)
class ProductCyclic:
    """Z_n x Z_m with generators a = (1,0) and b = (0,1)."""

    n: int
    m: int


@dataclass(frozen=True)
class Dihedral:
    """D_n of order 2n with generators r (rotation) and s (reflection)."""

    n: int


@dataclass(frozen=True)
class DihedralCoxeter:
    """D_n of order 2n generated by the two reflections s and t."""

    n: int


@dataclass(frozen=True)
class Dicyclic:
    """Dic_n of order 4n with generators a (order 2n) and x (order 4)."""

    n: int


@dataclass(frozen=True)
class DicyclicTriangle:
    """Dic_n with the length-three-relator generators a, b, c."""

    n: int


@dataclass(frozen=True)
class Quaternion:
    """The quaternion group Q_8 with generators i and j."""


@dataclass(frozen=True)
class GeneralizedDihedral:
    """(Z_f1 x ... x Z_fk) semidirect Z_2 where the Z_2 factor inverts."""

    factors: tuple[int, ...]


@dataclass(frozen=True)
class FromTable:
    """A group loaded from a multiplication-table file."""

    path: str


GroupSpec = (
    Cyclic
    | ProductCyclic
    | Dihedral
    | DihedralCoxeter
    | Dicyclic
    | DicyclicTriangle
    | Quaternion
    | GeneralizedDihedral
    | FromTable
)


@dataclass(frozen=True)
class Group:
    """Finite group on dense element indices 0..order-1 with identity 0."""

    name: str
    order: int
    mul_table: tuple[tuple[int, ...], ...]
    inv_table: tuple[int, ...]
    labels: tuple[str, ...]

    identity: ClassVar[int] = 0

    def mul(self, g: int, h: int) -> int:
        """Return the element index of g*h."""
        return self.mul_table[g][h]

    def inv(self, g: int) -> int:
        """Return the element index of g^-1."""
        return self.inv_table[g]


@dataclass(frozen=True)
class GeneratingSet:
    """Ordered generator names and their element indices."""

    names: tuple[str, ...]
    elements: tuple[int, ...]


@dataclass(frozen=True)
class AxiomReport:
    """Diagnostic result of checking the group axioms on a table."""

    identity_ok: bool
    associativity_ok: bool
    inverses_ok: bool
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        """True when every axiom check passed."""
        return self.identity_ok and self.associativity_ok and self.inverses_ok


def check_group_axioms(group: Group) -> AxiomReport:
    """Scan the full table for identity, associativity, and inverse failures."""
    failures: list[str] = []
    order = group.order
    table = group.mul_table

    identity_ok = True
    for g in range(order):
        if table[0][g] != g or table[g][0] != g:
            identity_ok = False
            failures.append(f"element 0 is not a two-sided identity at {g}")
            break

    associativity_ok = True
    for a in range(order):
        for b in range(order):
            ab = table[a][b]
            row_b = table[b]
            for c in range(order):
                if table[ab][c] != table[a][row_b[c]]:
                    associativity_ok = False
                    failures.append(
                        f"associativity fails at ({a},{b},{c}): "
                        f"({a}*{b})*{c}={table[ab][c]} but {a}*({b}*{c})={table[a][row_b[c]]}"
                    )
                    break
            if not associativity_ok:
                break
        if not associativity_ok:
            break

    inverses_ok = True
    for g in range(order):
        try:
            h = table[g].index(0)
        except ValueError:
            inverses_ok = False
            failures.append(f"element {g} has no right inverse")
            break
        if table[h][g] != 0:
            inverses_ok = False
            failures.append(f"element {g} has no two-sided inverse")
            break

    return AxiomReport(identity_ok, associativity_ok, inverses_ok, tuple(failures))


def _pow_label(symbol: str, k: int) -> str:
    if k == 0:
        return ""
    if k == 1:
        return symbol
    return f"{symbol}^{k}"


def _join_label(*parts: str) -> str:
    label = "".join(parts)
    return label or "e"


def _materialize(name: str, order: int, rule, labels: tuple[str, ...]) -> Group:
    table = tuple(tuple(rule(g, h) for h in range(order)) for g in range(order))
    for g in range(order):
        for h in range(order):
            if not 0 <= table[g][h] < order:
                raise GroupAxiomError(f"{name}: product {g}*{h} out of range")
    inv: list[int] = []
    for g in range(order):
        try:
            inv.append(table[g].index(0))
        except ValueError:
            raise GroupAxiomError(f"{name}: element {g} has no inverse") from None
    if len(labels) != order or len(set(labels)) != order:
        raise GroupAxiomError(f"{name}: labels must be {order} distinct strings")
    group = Group(name=name, order=order, mul_table=table, inv_table=tuple(inv), labels=labels)
    report = check_group_axioms(group)
    if not report.ok:
        raise GroupAxiomError(f"{name}: {report.failures[0]}")
    return group


def _generating_set(group: Group, names: tuple[str, ...], elements: tuple[int, ...]) -> GeneratingSet:
    if len(names) != len(elements) or not names:
        raise GeneratingSetError(f"{group.name}: generator names and elements must align and be non-empty")
    if len(set(names)) != len(names):
        raise GeneratingSetError(f"{group.name}: duplicate generator names in {names}")
    if len(set(elements)) != len(elements):
        raise GeneratingSetError(f"{group.name}: duplicate generator elements in {elements}")
    for name, el in zip(names, elements):
        if not 0 <= el < group.order:
            raise GeneratingSetError(f"{group.name}: generator {name} index {el} out of range")
        if el == group.identity:
            raise GeneratingSetError(f"{group.name}: generator {name} is the identity")
    reached = {group.identity}
    frontier = [group.identity]
    while frontier:
        g = frontier.pop()
        for el in elements:
            nxt = group.mul(g, el)
            if nxt not in reached:
                reached.add(nxt)
                frontier.append(nxt)
    if len(reached) != group.order:
        raise GeneratingSetError(
            f"{group.name}: generators {names} reach only {len(reached)} of {group.order} elements"
        )
    return GeneratingSet(names=names, elements=elements)


def generating_set(group: Group, names: tuple[str, ...], elements: tuple[int, ...]) -> GeneratingSet:
    """Validate and build a custom generating set (distinct non-identity generators)."""
    return _generating_set(group, names, elements)


def _empty_generating_set(group: Group) -> GeneratingSet:
    if group.order != 1:
        raise GeneratingSetError(f"{group.name}: empty generating set only generates the trivial group")
    return GeneratingSet(names=(), elements=())


def _check_relators(group: Group, gens: GeneratingSet, relators: dict[str, str]) -> None:
    index = dict(zip(gens.names, gens.elements))
    for desc, word in relators.items():
        acc = group.identity
        for token in word.split():
            if token.endswith("^-1"):
                acc = group.mul(acc, group.inv(index[token[:-3]]))
            else:
                acc = group.mul(acc, index[token])
        if acc != group.identity:
            raise GroupAxiomError(f"{group.name}: relator {desc} does not reduce to the identity")


def _build_cyclic(spec: Cyclic) -> tuple[Group, GeneratingSet]:
    n = spec.n
    if n < 1:
        raise GroupAxiomError(f"cyclic order must be >= 1, got {n}")
    labels = tuple(str(i) for i in range(n))
    group = _materialize(f"cyclic:{n}", n, lambda g, h: (g + h) % n, labels)
    if n == 1:
        raise GeneratingSetError("cyclic:1 admits no generating set: the identity is excluded")
    gens = _generating_set(group, ("1",), (1,))
    _check_relators(group, gens, {"1^n": " ".join(["1"] * n)})
    return group, gens


def _build_product(spec: ProductCyclic) -> tuple[Group, GeneratingSet]:
    n, m = spec.n, spec.m
    if n < 2 or m < 2:
        raise GroupAxiomError(f"product factors must be >= 2, got {n}x{m}")
    order = n * m

    def rule(g: int, h: int) -> int:
        return ((g // m + h // m) % n) * m + (g % m + h % m) % m

    labels = tuple(_join_label(_pow_label("a", g // m), _pow_label("b", g % m)) for g in range(order))
    group = _materialize(f"product:{n}x{m}", order, rule, labels)
    gens = _generating_set(group, ("a", "b"), (m, 1))
    _check_relators(
        group,
        gens,
        {
            "a^n": " ".join(["a"] * n),
            "b^m": " ".join(["b"] * m),
            "aba^-1b^-1": "a b a^-1 b^-1",
        },
    )
    return group, gens


def _dihedral_parts(name: str, n: int) -> Group:
    order = 2 * n

    def rule(g: int, h: int) -> int:
        i1, j1 = g % n, g // n
        i2, j2 = h % n, h // n
        i = (i1 + i2) % n if j1 == 0 else (i1 - i2) % n
        return (j1 ^ j2) * n + i

    labels = tuple(
        _join_label(_pow_label("r", g % n), "s" if g >= n else "") for g in range(order)
    )
    return _materialize(name, order, rule, labels)


def _build_dihedral(spec: Dihedral) -> tuple[Group, GeneratingSet]:
    n = spec.n
    if n < 3:
        raise GroupAxiomError(f"dihedral index must be >= 3, got {n}")
    group = _dihedral_parts(f"dihedral:{n}", n)
    gens = _generating_set(group, ("r", "s"), (1, n))
    _check_relators(group, gens, {"r^n": " ".join(["r"] * n), "s^2": "s s", "(rs)^2": "r s r s"})
    return group, gens


def _build_coxeter(spec: DihedralCoxeter) -> tuple[Group, GeneratingSet]:
    n = spec.n
    if n < 3:
        raise GroupAxiomError(f"dihedral index must be >= 3, got {n}")
    group = _dihedral_parts(f"dihedral:{n}:coxeter", n)
    gens = _generating_set(group, ("s", "t"), (n, n + 1))
    _check_relators(group, gens, {"s^2": "s s", "t^2": "t t", "(st)^n": " ".join(["s t"] * n)})
    return group, gens


def _dicyclic_parts(name: str, n: int) -> Group:
    m = 2 * n

    def rule(g: int, h: int) -> int:
        i1, j1 = g % m, g // m
        i2, j2 = h % m, h // m
        if j1 == 0:
            return j2 * m + (i1 + i2) % m
        if j2 == 0:
            return m + (i1 - i2) % m
        return (i1 - i2 + n) % m

    labels = tuple(
        _join_label(_pow_label("a", g % m), "x" if g >= m else "") for g in range(2 * m)
    )
    return _materialize(name, 4 * n, rule, labels)


def _build_dicyclic(spec: Dicyclic) -> tuple[Group, GeneratingSet]:
    n = spec.n
    if n < 2:
        raise GroupAxiomError(f"dicyclic index must be >= 2, got {n}")
    group = _dicyclic_parts(f"dicyclic:{n}", n)
    gens = _generating_set(group, ("a", "x"), (1, 2 * n))
    _check_relators(
        group,
        gens,
        {"a^2n": " ".join(["a"] * 2 * n), "x^4": "x x x x", "x^-1axa": "x^-1 a x a"},
    )
    return group, gens


def _build_triangle(spec: DicyclicTriangle) -> tuple[Group, GeneratingSet]:
    n = spec.n
    if n < 2:
        raise GroupAxiomError(f"dicyclic index must be >= 2, got {n}")
    m = 2 * n
    base = _dicyclic_parts(f"dicyclic:{n}:abc", n)
    labels = tuple(
        _join_label(_pow_label("a", g % m if g < m else (g - m - n) % m), "b" if g >= m else "")
        for g in range(4 * n)
    )
    group = Group(
        name=base.name,
        order=base.order,
        mul_table=base.mul_table,
        inv_table=base.inv_table,
        labels=labels,
    )
    # b = x^-1 = a^n x and c = a x^-1 = a^{n+1} x in a^i x^j indexing.
    gens = _generating_set(group, ("a", "b", "c"), (1, m + n, m + n + 1))
    _check_relators(
        group,
        gens,
        {
            "a^n b^-2": " ".join(["a"] * n) + " b^-1 b^-1",
            "a^n c^-2": " ".join(["a"] * n) + " c^-1 c^-1",
            "a^n (abc)^-1": " ".join(["a"] * n) + " c^-1 b^-1 a^-1",
        },
    )
    return group, gens


_QUATERNION_LABELS = ("1", "i", "-1", "-i", "j", "k", "-j", "-k")


def _build_quaternion(spec: Quaternion) -> tuple[Group, GeneratingSet]:
    base = _dicyclic_parts("quaternion", 2)
    group = Group(
        name=base.name,
        order=base.order,
        mul_table=base.mul_table,
        inv_table=base.inv_table,
        labels=_QUATERNION_LABELS,
    )
    gens = _generating_set(group, ("i", "j"), (1, 4))
    _check_relators(group, gens, {"i^4": "i i i i", "j^4": "j j j j", "j^-1iji": "j^-1 i j i"})
    return group, gens


def _build_gendih(spec: GeneralizedDihedral) -> tuple[Group, GeneratingSet]:
    factors = tuple(spec.factors)
    if not factors or any(f < 2 for f in factors):
        raise GroupAxiomError(f"generalized dihedral factors must all be >= 2, got {factors}")
    if len(factors) > len(_FACTOR_NAMES):
        raise GroupAxiomError(f"at most {len(_FACTOR_NAMES)} factors supported, got {len(factors)}")
    hsize = math.prod(factors)
    order = 2 * hsize
    tuples = [t for t in iter_product(*(range(f) for f in factors))]
    encode = {t: i for i, t in enumerate(tuples)}

    def rule(g: int, h: int) -> int:
        h1, e1 = tuples[g % hsize], g // hsize
        h2, e2 = tuples[h % hsize], h // hsize
        sign = 1 if e1 == 0 else -1
        t = tuple((u + sign * v) % f for u, v, f in zip(h1, h2, factors))
        return (e1 ^ e2) * hsize + encode[t]

    names = tuple(_FACTOR_NAMES[i] for i in range(len(factors)))
    labels = tuple(
        _join_label(
            *(_pow_label(names[i], tuples[g % hsize][i]) for i in range(len(factors))),
            "s" if g >= hsize else "",
        )
        for g in range(order)
    )
    name = "gendih:" + ",".join(str(f) for f in factors)
    group = _materialize(name, order, rule, labels)
    unit_elements = tuple(encode[tuple(1 if j == i else 0 for j in range(len(factors)))] for i in range(len(factors)))
    gens = _generating_set(group, names + ("s",), unit_elements + (hsize,))
    relators = {"s^2": "s s"}
    for fname, f in zip(names, factors):
        relators[f"{fname}^{f}"] = " ".join([fname] * f)
        relators[f"s{fname}s{fname}"] = f"s {fname} s {fname}"
    _check_relators(group, gens, relators)
    return group, gens


def build_group(spec: GroupSpec) -> tuple[Group, GeneratingSet]:
    """Construct a group and its canonical generating set from a family spec."""
    if isinstance(spec, Cyclic):
        return _build_cyclic(spec)
    if isinstance(spec, ProductCyclic):
        return _build_product(spec)
    if isinstance(spec, Dihedral):
        return _build_dihedral(spec)
    if isinstance(spec, DihedralCoxeter):
        return _build_coxeter(spec)
    if isinstance(spec, Dicyclic):
        return _build_dicyclic(spec)
    if isinstance(spec, DicyclicTriangle):
        return _build_triangle(spec)
    if isinstance(spec, Quaternion):
        return _build_quaternion(spec)
    if isinstance(spec, GeneralizedDihedral):
        return _build_gendih(spec)
    if isinstance(spec, FromTable):
        return load_group_table(spec.path)
    raise TypeError(f"unknown group spec {spec!r}")


def _strip_comments(text: str) -> list[str]:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return lines


def load_group_table(path: str | Path) -> tuple[Group, GeneratingSet]:
    """Load a group and generating set from a table file."""
    path = Path(path)
    lines = _strip_comments(path.read_text(encoding="utf-8"))
    if not lines or lines[0] != TABLE_HEADER:
        raise GroupTableError(f"{path}: first line must be '{TABLE_HEADER}'")
    if len(lines) < 2 or not lines[1].startswith("order "):
        raise GroupTableError(f"{path}: second line must be 'order N'")
    try:
        order = int(lines[1].split()[1])
    except (IndexError, ValueError):
        raise GroupTableError(f"{path}: unreadable order line {lines[1]!r}") from None
    if order < 1:
        raise GroupTableError(f"{path}: order must be >= 1, got {order}")

    pos = 2
    labels = tuple(f"g{i}" for i in range(order))
    if pos < len(lines) and lines[pos].startswith("labels"):
        tokens = tuple(lines[pos].split()[1:])
        if len(tokens) != order or len(set(tokens)) != order:
            raise GroupTableError(f"{path}: labels line must hold {order} distinct labels")
        labels = tokens
        pos += 1

    rows: list[tuple[int, ...]] = []
    for i in range(order):
        if pos >= len(lines):
            raise GroupTableError(f"{path}: missing table row {i}")
        try:
            row = tuple(int(tok) for tok in lines[pos].split())
        except ValueError:
            raise GroupTableError(f"{path}: row {i} holds a non-integer") from None
        if len(row) != order or any(not 0 <= v < order for v in row):
            raise GroupTableError(f"{path}: row {i} must hold {order} indices in 0..{order - 1}")
        rows.append(row)
        pos += 1

    if pos >= len(lines) or not lines[pos].split() or lines[pos].split()[0] != "gens":
        raise GroupTableError(f"{path}: expected final 'gens i1 i2 ...' line")
    try:
        gen_indices = tuple(int(tok) for tok in lines[pos].split()[1:])
    except ValueError:
        raise GroupTableError(f"{path}: gens line holds a non-integer") from None
    if pos + 1 != len(lines):
        raise GroupTableError(f"{path}: unexpected content after the gens line")

    inv: list[int] = []
    for g in range(order):
        try:
            inv.append(rows[g].index(0))
        except ValueError:
            raise GroupAxiomError(f"{path}: element {g} has no inverse") from None
    group = Group(
        name=f"table:{path.stem}",
        order=order,
        mul_table=tuple(rows),
        inv_table=tuple(inv),
        labels=labels,
    )
    report = check_group_axioms(group)
    if not report.ok:
        raise GroupAxiomError(f"{path}: {report.failures[0]}")

    if not gen_indices:
        return group, _empty_generating_set(group)
    for idx in gen_indices:
        if not 0 <= idx < order:
            raise GroupTableError(f"{path}: generator index {idx} out of range")
    names = tuple(labels[idx] for idx in gen_indices)
    return group, _generating_set(group, names, gen_indices)


def format_group_table(group: Group, gens: GeneratingSet) -> str:
    """Serialize a group and generating set in the table file format."""
    lines = [TABLE_HEADER, f"order {group.order}"]
    if any(" " in label for label in group.labels):
        raise GroupTableError(f"{group.name}: labels with spaces cannot be serialized")
    lines.append("labels " + " ".join(group.labels))
    for row in group.mul_table:
        lines.append(" ".join(str(v) for v in row))
    lines.append(("gens " + " ".join(str(el) for el in gens.elements)).strip())
    return "\n".join(lines) + "\n"
