"""Heads, tails, barren sets and parametrizing sets of maximal ancestral
graphs, plus the Markov-equivalence test built on them.

A head H is a set that equals its own barren subset and is contained in a
single district of the induced subgraph on an(H).  Its tail is the rest of
that district plus the district's parents.  The parametrizing set collects
every head together with all subsets of its tail; two MAGs are Markov
equivalent exactly when their parametrizing sets coincide.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Iterator

from .errors import DomainError
from .graph import MixedGraph, districts, induced_subgraph


def barren(g: MixedGraph, W: Iterable[int]) -> frozenset[int]:
    """{w in W : de(w) & W == {w}}."""
    W = frozenset(W)
    return frozenset(w for w in W if g.descendants(w) & W == {w})


def is_head(g: MixedGraph, H: Iterable[int]) -> bool:
    """Barren within itself and bidirected-connected inside G_{an(H)}."""
    H = frozenset(H)
    if not H or barren(g, H) != H:
        return False
    sub = induced_subgraph(g, g.ancestors_of(H))
    return sub.district(min(H)) >= H


def tail(g: MixedGraph, H: Iterable[int]) -> frozenset[int]:
    """(dis_{an(H)}(H) \\ H) | pa(dis_{an(H)}(H))."""
    H = frozenset(H)
    sub = induced_subgraph(g, g.ancestors_of(H))
    dis = sub.district(min(H))
    return (dis - H) | sub.parents_of(dis)


def enumerate_heads(
    g: MixedGraph, max_head_size: int | None = None
) -> Iterator[tuple[frozenset[int], frozenset[int]]]:
    """All (head, tail) pairs, heads within a district enumerated in
    ascending size then lexicographic order.

    Heads live inside a single district of the full graph, so subsets are
    drawn per district; with a bounded head size this is polynomial for
    bounded district size.
    """
    for block in districts(g):
        members = sorted(block)
        cap = len(members) if max_head_size is None else min(max_head_size, len(members))
        for size in range(1, cap + 1):
            for combo in combinations(members, size):
                H = frozenset(combo)
                if is_head(g, H):
                    yield H, tail(g, H)


def max_head_size(g: MixedGraph, cap: int | None = None) -> int:
    """Size of the largest head.

    With ``cap`` given, only sizes up to cap + 1 are examined and the
    result saturates at cap + 1; that is enough for accept/reject
    decisions against a head-size budget.
    """
    best = 0 if g.n == 0 else 1
    for block in districts(g):
        members = sorted(block)
        top = len(members) if cap is None else min(cap + 1, len(members))
        for size in range(top, best, -1):
            if any(is_head(g, frozenset(c)) for c in combinations(members, size)):
                best = size
                break
    return best


def _undirected_cliques(g: MixedGraph) -> Iterator[frozenset[int]]:
    """Cliques of size >= 2 in the undirected part (Bron-Kerbosch-free
    brute force per connected component; components are small)."""
    from .graph import TAIL

    adj: dict[int, set[int]] = {}
    for a, b, ma, mb in g.edges():
        if (ma, mb) == (TAIL, TAIL):
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
    seen: set[int] = set()
    for v in sorted(adj):
        if v in seen:
            continue
        comp, stack = [v], [v]
        seen.add(v)
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        for size in range(2, len(comp) + 1):
            for combo in combinations(sorted(comp), size):
                if all(y in adj[x] for x, y in combinations(combo, 2)):
                    yield frozenset(combo)


def parametrizing_set(g: MixedGraph, max_head_size: int | None = None) -> frozenset[frozenset[int]]:
    """Union over heads H of {H | A : A subset of tail(H)}, together with
    the cliques of the undirected part (which parametrize the undirected
    component exactly as head-tail pairs parametrize the directed part)."""
    out: set[frozenset[int]] = set()
    for H, T in enumerate_heads(g, max_head_size):
        T = sorted(T)
        for r in range(len(T) + 1):
            for A in combinations(T, r):
                out.add(H | frozenset(A))
    out.update(_undirected_cliques(g))
    return frozenset(out)


def in_parametrizing_set(g: MixedGraph, W: Iterable[int]) -> bool:
    """Membership test without building the whole set: W belongs iff it is
    a clique of the undirected part, or some head H within W has W \\ H
    inside its tail."""
    from .graph import TAIL

    W = frozenset(W)
    if not W:
        return False
    if len(W) >= 2 and all(
        g.has_edge(a, b) and g.mark(a, b) == TAIL and g.mark(b, a) == TAIL
        for a, b in combinations(sorted(W), 2)
    ):
        return True
    for size in range(1, len(W) + 1):
        for combo in combinations(sorted(W), size):
            H = frozenset(combo)
            if is_head(g, H) and (W - H) <= tail(g, H):
                return True
    return False


def restricted_parametrizing_set(
    g: MixedGraph, k: int, reduced: bool = False
) -> frozenset[frozenset[int]]:
    """S_k: parametrizing-set members of size 2..k.

    With ``reduced`` and k = 3, keeps only the size-2 members (adjacencies)
    and size-3 members whose vertices span 1 or 2 adjacencies; triples with
    3 adjacencies are redundant given the pairs.
    """
    if k < 2:
        raise DomainError("k must be at least 2")
    full = {W for W in parametrizing_set(g) if 2 <= len(W) <= k}
    if not reduced:
        return frozenset(full)
    out = set()
    for W in full:
        if len(W) == 2:
            out.add(W)
        else:
            adj = sum(1 for a, b in combinations(sorted(W), 2) if g.has_edge(a, b))
            if adj <= 2:
                out.add(W)
    return frozenset(out)


def markov_equivalent(g1: MixedGraph, g2: MixedGraph) -> bool:
    if g1.n != g2.n:
        raise DomainError("graphs must share a vertex set")
    if g1.skeleton() != g2.skeleton():
        return False
    return parametrizing_set(g1) == parametrizing_set(g2)
