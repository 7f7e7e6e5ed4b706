"""Cayley graphs: letter alphabets, adjacency, shape predicates, and DOT export."""

from __future__ import annotations

from dataclasses import dataclass

from relgame.groups import GeneratingSet, Group

__all__ = [
    "CayleyGraph",
    "IsomorphismLimitError",
    "Letter",
    "build_cayley",
    "export_dot",
    "is_complete",
    "is_complete_bipartite",
    "undirected_isomorphic",
]

ISOMORPHISM_ORDER_LIMIT = 16


class IsomorphismLimitError(ValueError):
    """Raised when an isomorphism check exceeds the brute-force order limit."""


@dataclass(frozen=True)
class Letter:
    """One move symbol: a generator or its inverse, resolved to an element."""

    index: int
    gen_index: int
    name: str
    sign: int
    element: int
    inverse_index: int

    @property
    def is_involution(self) -> bool:
        """True when the letter is its own inverse."""
        return self.inverse_index == self.index


@dataclass(frozen=True)
class CayleyGraph:
    """Labeled graph on group elements; one arc per (vertex, letter)."""

    group: Group
    gens: GeneratingSet
    alphabet: tuple[Letter, ...]
    neighbors: tuple[tuple[int, ...], ...]
    adjacency: tuple[frozenset[int], ...]

    @property
    def order(self) -> int:
        """Number of vertices."""
        return self.group.order

    def letter_by_name(self, name: str) -> Letter | None:
        """Return the alphabet letter with the given name, if any."""
        for letter in self.alphabet:
            if letter.name == name:
                return letter
        return None


def build_cayley(group: Group, gens: GeneratingSet) -> CayleyGraph:
    """Build the Cayley graph of (G, S) with one letter per distinct element of S u S^-1."""
    declared = set(gens.elements)
    seen: dict[int, int] = {}
    specs: list[tuple[int, str, int, int]] = []
    for gi, (name, el) in enumerate(zip(gens.names, gens.elements)):
        el_inv = group.inv(el)
        if el not in seen:
            seen[el] = len(specs)
            specs.append((gi, name, 1, el))
        if el_inv != el and el_inv not in seen and el_inv not in declared:
            seen[el_inv] = len(specs)
            specs.append((gi, f"{name}^-1", -1, el_inv))

    alphabet = tuple(
        Letter(
            index=i,
            gen_index=gi,
            name=name,
            sign=sign,
            element=el,
            inverse_index=seen[group.inv(el)],
        )
        for i, (gi, name, sign, el) in enumerate(specs)
    )
    neighbors = tuple(
        tuple(group.mul(v, letter.element) for letter in alphabet) for v in range(group.order)
    )
    adjacency = tuple(frozenset(row) for row in neighbors)
    return CayleyGraph(
        group=group,
        gens=gens,
        alphabet=alphabet,
        neighbors=neighbors,
        adjacency=adjacency,
    )


def is_complete(graph: CayleyGraph) -> bool:
    """True when every distinct vertex pair is adjacent."""
    n = graph.order
    return all(len(graph.adjacency[v] - {v}) == n - 1 for v in range(n))


def is_complete_bipartite(
    graph: CayleyGraph,
) -> tuple[bool, tuple[frozenset[int], frozenset[int]] | None]:
    """Check for a complete bipartition; returns it (identity side first) when present."""
    n = graph.order
    color = [-1] * n
    color[0] = 0
    queue = [0]
    while queue:
        v = queue.pop()
        for w in graph.adjacency[v]:
            if color[w] == -1:
                color[w] = 1 - color[v]
                queue.append(w)
            elif color[w] == color[v]:
                return False, None
    part_a = frozenset(v for v in range(n) if color[v] == 0)
    part_b = frozenset(v for v in range(n) if color[v] == 1)
    if not part_b:
        return False, None
    for v in part_a:
        if graph.adjacency[v] != part_b:
            return False, None
    for v in part_b:
        if graph.adjacency[v] != part_a:
            return False, None
    return True, (part_a, part_b)


def _multiplicity_matrix(graph: CayleyGraph) -> tuple[tuple[int, ...], ...]:
    # Letter deduplication makes every built graph simple, so the edge
    # multiplicity between two vertices is the adjacency indicator.
    n = graph.order
    return tuple(tuple(int(w in graph.adjacency[v]) for w in range(n)) for v in range(n))


def undirected_isomorphic(graph_a: CayleyGraph, graph_b: CayleyGraph) -> bool:
    """Exhaustively test undirected graph isomorphism for orders <= 16."""
    if graph_a.order > ISOMORPHISM_ORDER_LIMIT or graph_b.order > ISOMORPHISM_ORDER_LIMIT:
        raise IsomorphismLimitError(
            f"isomorphism check limited to order {ISOMORPHISM_ORDER_LIMIT}, "
            f"got {graph_a.order} and {graph_b.order}"
        )
    n = graph_a.order
    if n != graph_b.order:
        return False
    mat_a = _multiplicity_matrix(graph_a)
    mat_b = _multiplicity_matrix(graph_b)
    sig_a = sorted(sorted(row) for row in mat_a)
    sig_b = sorted(sorted(row) for row in mat_b)
    if sig_a != sig_b:
        return False

    mapping = [-1] * n
    used = [False] * n

    def assign(v: int) -> bool:
        if v == n:
            return True
        row_sig = sorted(mat_a[v])
        for cand in range(n):
            if used[cand] or sorted(mat_b[cand]) != row_sig:
                continue
            if any(
                mapping[u] != -1 and mat_b[cand][mapping[u]] != mat_a[v][u] for u in range(n)
            ):
                continue
            mapping[v] = cand
            used[cand] = True
            if assign(v + 1):
                return True
            mapping[v] = -1
            used[cand] = False
        return False

    return assign(0)


def export_dot(graph: CayleyGraph) -> str:
    """Serialize the graph in DOT with one line per undirected edge occurrence."""
    lines = [f'graph "{graph.group.name}" {{']
    for v in range(graph.order):
        lines.append(f'  {v} [label="{graph.group.labels[v]}"];')
    for name, el in zip(graph.gens.names, graph.gens.elements):
        involution = graph.group.inv(el) == el
        for v in range(graph.order):
            w = graph.group.mul(v, el)
            if involution and v >= w:
                continue
            lines.append(f'  {v} -- {w} [label="{name}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
