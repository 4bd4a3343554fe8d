"""Conditional-independence lists read off a maximal ancestral graph:
the complete and refined power DAGs over heads, Markov blankets, and the
refined ordered, ordered local, and pairwise Markov properties.

All three properties emit lists of CIStatement that are sound for
m-separation; the refined variant keeps exactly one marginalization edge
per non-maximal head and therefore yields the shortest list.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DomainError
from .graph import MixedGraph, induced_subgraph
from .heads import enumerate_heads, is_head, tail


@dataclass(frozen=True)
class CIStatement:
    """A conditional independence A _||_ B | C with disjoint vertex sets."""

    A: frozenset[int]
    B: frozenset[int]
    C: frozenset[int]

    @staticmethod
    def make(A: Iterable[int], B: Iterable[int], C: Iterable[int]) -> "CIStatement | None":
        """Canonicalize (min(A) <= min(B)); returns None for a null triple."""
        A, B, C = frozenset(A), frozenset(B), frozenset(C)
        if not A or not B:
            return None
        if A & B or A & C or B & C:
            raise DomainError("CI statement sets must be disjoint")
        if min(B) < min(A):
            A, B = B, A
        return CIStatement(A, B, C)

    def as_dict(self) -> dict:
        return {"A": sorted(self.A), "B": sorted(self.B), "C": sorted(self.C)}


@dataclass
class PowerDAGComponent:
    """Heads sharing a maximal vertex ``anchor``, with marginalization
    edges (H, k, H')."""

    anchor: int
    nodes: list[frozenset[int]]
    edges: list[tuple[frozenset[int], int, frozenset[int]]]


def _order_pos(order: Sequence[int]) -> dict[int, int]:
    return {v: i for i, v in enumerate(order)}


def _max_vertex(H: Iterable[int], pos: dict[int, int]) -> int:
    return max(H, key=lambda v: pos[v])


def marginalize_head(
    g: MixedGraph, H: Iterable[int], k: int, order: Sequence[int]
) -> frozenset[int]:
    """The head H' with H ->k H': remove k from an(H), take the barren set
    of the district of i = max(H) in the reduced graph."""
    H = frozenset(H)
    pos = _order_pos(order)
    i = _max_vertex(H, pos)
    if k not in H or k == i:
        raise DomainError("marginalization vertex must be a non-maximal head element")
    if not is_head(g, H):
        raise DomainError("H is not a head")
    sub = induced_subgraph(g, g.ancestors_of(H) - {k})
    dis = sub.district(i)
    return frozenset(w for w in dis if sub.descendants(w) & dis == {w})


def ci_from_marginalization(
    g: MixedGraph, H: Iterable[int], k: int, order: Sequence[int]
) -> CIStatement | None:
    """The independence carried by the edge H ->k H':
    i _||_ (H u T) \\ (H' u T' u {k}) | (H' u T') \\ {i}."""
    H = frozenset(H)
    pos = _order_pos(order)
    i = _max_vertex(H, pos)
    Hp = marginalize_head(g, H, k, order)
    T, Tp = tail(g, H), tail(g, Hp)
    left = (H | T) - (Hp | Tp | {k})
    return CIStatement.make({i}, left, (Hp | Tp) - {i})


def complete_power_dag(g: MixedGraph, order: Sequence[int]) -> list[PowerDAGComponent]:
    """One component per vertex i holding every head whose order-maximal
    element is i, with all marginalization edges."""
    pos = _order_pos(order)
    comps = {i: PowerDAGComponent(i, [], []) for i in range(g.n)}
    for H, _T in enumerate_heads(g):
        i = _max_vertex(H, pos)
        comps[i].nodes.append(H)
    for comp in comps.values():
        node_set = set(comp.nodes)
        for H in comp.nodes:
            i = comp.anchor
            for k in sorted(H - {i}):
                Hp = marginalize_head(g, H, k, order)
                if Hp in node_set:
                    comp.edges.append((H, k, Hp))
    return [comps[i] for i in sorted(comps)]


def ceiling(g: MixedGraph, W: Iterable[int]) -> frozenset[int]:
    """{w in W : W & an(w) == {w}}."""
    W = frozenset(W)
    return frozenset(w for w in W if g.ancestors(w) & W == {w})


def hamlet(g: MixedGraph, H: Iterable[int]) -> frozenset[int]:
    """sib(dis_{an(H)}(H)) \\ dis_{an(H)}(H), siblings taken in the full
    graph."""
    H = frozenset(H)
    sub = induced_subgraph(g, g.ancestors_of(H))
    dis = sub.district(min(H))
    return frozenset(g.siblings_of(dis) - dis)


def refined_power_dag(g: MixedGraph, order: Sequence[int]) -> list[PowerDAGComponent]:
    """Complete power DAG thinned so each non-maximal head keeps one
    incoming edge: marginalization vertex k* = order-minimal element of
    ceil(ham(H')), parent head maximal under ancestral-set inclusion
    (ties broken by lexicographically smallest sorted vertex list)."""
    pos = _order_pos(order)
    out = []
    for comp in complete_power_dag(g, order):
        incoming: dict[frozenset[int], list[tuple[frozenset[int], int]]] = {}
        for H, k, Hp in comp.edges:
            incoming.setdefault(Hp, []).append((H, k))
        kept = []
        for Hp, options in incoming.items():
            ham = hamlet(g, Hp)
            cands = options
            if ham:
                ceil = ceiling(g, ham)
                k_star = min(ceil, key=lambda v: pos[v])
                filtered = [(H, k) for H, k in options if k == k_star]
                if filtered:
                    cands = filtered
            # parent maximal under an(.)-inclusion among the candidates
            maximal = []
            for H, k in cands:
                anH = g.ancestors_of(H)
                if not any(
                    g.ancestors_of(H2) > anH for H2, _k2 in cands if H2 != H
                ):
                    maximal.append((H, k))
            best = min(maximal, key=lambda item: (sorted(item[0]), item[1]))
            kept.append((best[0], best[1], Hp))
        out.append(PowerDAGComponent(comp.anchor, comp.nodes, kept))
    return out


def markov_blanket(g: MixedGraph, i: int, A: Iterable[int]) -> frozenset[int]:
    """(dis_{G_A}(i) | pa(dis_{G_A}(i))) \\ {i} for an ancestral set A
    containing i."""
    A = frozenset(A)
    if i not in A:
        raise DomainError("A must contain i")
    if g.ancestors_of(A) != A:
        raise DomainError("A must be an ancestral set")
    sub = induced_subgraph(g, A)
    dis = sub.district(i)
    return frozenset((dis | sub.parents_of(dis)) - {i})


def _prefix_statements(g: MixedGraph, order: Sequence[int]) -> list[CIStatement]:
    """Statement (a) per vertex: i _||_ [i-1] \\ mb | mb over the order
    prefix [i] = {order[0..pos(i)]}."""
    out = []
    prefix: set[int] = set()
    for i in order:
        prefix.add(i)
        mb = markov_blanket(g, i, frozenset(prefix))
        rest = prefix - {i} - mb
        st = CIStatement.make({i}, rest, mb)
        if st is not None:
            out.append(st)
    return out


def _dedup(statements: Iterable[CIStatement | None]) -> list[CIStatement]:
    seen: set[CIStatement] = set()
    out = []
    for st in statements:
        if st is not None and st not in seen:
            seen.add(st)
            out.append(st)
    return out


def refined_markov_property(g: MixedGraph, order: Sequence[int]) -> list[CIStatement]:
    stmts = _prefix_statements(g, order)
    for comp in refined_power_dag(g, order):
        for H, k, _Hp in comp.edges:
            stmts.append(ci_from_marginalization(g, H, k, order))
    return _dedup(stmts)


def ordered_local_markov_property(g: MixedGraph, order: Sequence[int]) -> list[CIStatement]:
    stmts = _prefix_statements(g, order)
    for comp in complete_power_dag(g, order):
        for H, k, _Hp in comp.edges:
            stmts.append(ci_from_marginalization(g, H, k, order))
    return _dedup(stmts)


def pairwise_markov_property(g: MixedGraph, order: Sequence[int] | None = None) -> list[CIStatement]:
    """a _||_ b | an({a,b}) \\ {a,b} per nonadjacent pair; the order is
    accepted for interface uniformity but unused."""
    stmts = []
    for a in range(g.n):
        for b in range(a + 1, g.n):
            if not g.has_edge(a, b):
                C = (g.ancestors(a) | g.ancestors(b)) - {a, b}
                stmts.append(CIStatement.make({a}, {b}, C))
    return _dedup(stmts)


PROPERTY_FUNCS = {
    "refined": refined_markov_property,
    "local": ordered_local_markov_property,
    "pairwise": pairwise_markov_property,
}
