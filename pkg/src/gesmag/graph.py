"""Mixed graphs (ADMG / MAG / PAG) and the graph-theoretic primitives the
rest of the package is built on: vertex relations, m-separation,
ancestrality and maximality checks, projection to a maximal ancestral
graph, and a plain-text serialization format.

Vertices are dense integers ``0..n-1``; column ``j`` of a data matrix
always corresponds to vertex ``j``.  An edge between ``a`` and ``b``
carries one mark at each endpoint; ``a -> b`` is (TAIL at a, ARROW at b),
``a <-> b`` is (ARROW, ARROW), ``a -- b`` is (TAIL, TAIL) and circle marks
are only allowed in partial graphs.
"""

from __future__ import annotations

import heapq
from collections import deque
from typing import Iterable, Iterator

from .errors import CycleError, DomainError, GraphKindError

TAIL = 0
ARROW = 1
CIRCLE = 2

MARK_NAMES = {TAIL: "tail", ARROW: "arrow", CIRCLE: "circle"}

# edge-symbol table for the text format, keyed by (mark_at_left, mark_at_right)
_SYMBOL = {
    (TAIL, ARROW): "->",
    (ARROW, ARROW): "<->",
    (TAIL, TAIL): "--",
    (CIRCLE, ARROW): "o->",
    (CIRCLE, CIRCLE): "o-o",
    (CIRCLE, TAIL): "o--",
}
_SYMBOL_MARKS = {v: k for k, v in _SYMBOL.items()}


class MixedGraph:
    """A graph with marked edge endpoints.

    ``kind`` is one of ``"ADMG"``, ``"MAG"``, ``"PAG"``, ``"PMG"``; circle
    marks may only appear when the kind is partial.  At most one edge per
    vertex pair.  Instances are treated as immutable once fully built;
    mutation invalidates internal relation caches.
    """

    __slots__ = ("n", "kind", "_edges", "_adj", "_cache")

    def __init__(self, n: int, kind: str = "ADMG"):
        if n < 0:
            raise DomainError("vertex count must be nonnegative")
        self.n = n
        self.kind = kind
        # canonical key (a, b) with a < b -> (mark_at_a, mark_at_b)
        self._edges: dict[tuple[int, int], tuple[int, int]] = {}
        self._adj: list[set[int]] = [set() for _ in range(n)]
        self._cache: dict = {}

    # -- construction -----------------------------------------------------

    def add_edge(self, a: int, b: int, mark_a: int, mark_b: int) -> None:
        self._check_vertex(a)
        self._check_vertex(b)
        if a == b:
            raise DomainError("self loops are not allowed")
        key = (a, b) if a < b else (b, a)
        if key in self._edges:
            raise DomainError(f"duplicate edge between {a} and {b}")
        self._edges[key] = (mark_a, mark_b) if a < b else (mark_b, mark_a)
        self._adj[a].add(b)
        self._adj[b].add(a)
        self._cache.clear()

    def add_directed(self, a: int, b: int) -> None:
        """Add ``a -> b``."""
        self.add_edge(a, b, TAIL, ARROW)

    def add_bidirected(self, a: int, b: int) -> None:
        """Add ``a <-> b``."""
        self.add_edge(a, b, ARROW, ARROW)

    def add_undirected(self, a: int, b: int) -> None:
        """Add ``a -- b``."""
        self.add_edge(a, b, TAIL, TAIL)

    def remove_edge(self, a: int, b: int) -> None:
        key = (a, b) if a < b else (b, a)
        if key not in self._edges:
            raise DomainError(f"no edge between {a} and {b}")
        del self._edges[key]
        self._adj[a].discard(b)
        self._adj[b].discard(a)
        self._cache.clear()

    def set_mark(self, a: int, b: int, mark_at_a: int) -> None:
        """Set the mark at endpoint ``a`` of the edge ``{a, b}``."""
        key = (a, b) if a < b else (b, a)
        if key not in self._edges:
            raise DomainError(f"no edge between {a} and {b}")
        ma, mb = self._edges[key]
        if a < b:
            self._edges[key] = (mark_at_a, mb)
        else:
            self._edges[key] = (ma, mark_at_a)
        self._cache.clear()

    def copy(self, kind: str | None = None) -> "MixedGraph":
        g = MixedGraph(self.n, kind or self.kind)
        g._edges = dict(self._edges)
        g._adj = [set(s) for s in self._adj]
        return g

    # -- queries -----------------------------------------------------------

    def has_edge(self, a: int, b: int) -> bool:
        return b in self._adj[a]

    def mark(self, a: int, b: int) -> int:
        """The mark at endpoint ``a`` of edge ``{a, b}``."""
        key = (a, b) if a < b else (b, a)
        ma, mb = self._edges[key]
        return ma if a < b else mb

    def adjacent(self, v: int) -> set[int]:
        return self._adj[v]

    def edges(self) -> Iterator[tuple[int, int, int, int]]:
        """Iterate ``(a, b, mark_at_a, mark_at_b)`` with ``a < b`` ascending."""
        for (a, b) in sorted(self._edges):
            ma, mb = self._edges[(a, b)]
            yield a, b, ma, mb

    def num_edges(self) -> int:
        return len(self._edges)

    def skeleton(self) -> frozenset[tuple[int, int]]:
        return frozenset(self._edges)

    def edge_key(self) -> tuple:
        """Hashable identity: vertex count plus every edge with marks."""
        return (self.n, tuple(sorted(self._edges.items())))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MixedGraph)
            and self.n == other.n
            and self._edges == other._edges
        )

    def __hash__(self) -> int:
        return hash(self.edge_key())

    def __repr__(self) -> str:
        return f"MixedGraph(n={self.n}, edges={sorted(self._edges.items())})"

    def has_circle_marks(self) -> bool:
        return any(CIRCLE in m for m in self._edges.values())

    # -- relations (directed mixed graphs only) -----------------------------

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise DomainError(f"vertex {v} out of range [0, {self.n})")

    def _check_directed(self) -> None:
        if self.has_circle_marks():
            raise GraphKindError("operation requires a graph without circle marks")

    def parents(self, v: int) -> set[int]:
        self._check_directed()
        return {w for w in self._adj[v] if self.mark(w, v) == TAIL and self.mark(v, w) == ARROW}

    def children(self, v: int) -> set[int]:
        self._check_directed()
        return {w for w in self._adj[v] if self.mark(v, w) == TAIL and self.mark(w, v) == ARROW}

    def siblings(self, v: int) -> set[int]:
        self._check_directed()
        return {w for w in self._adj[v] if self.mark(v, w) == ARROW and self.mark(w, v) == ARROW}

    def undirected_neighbours(self, v: int) -> set[int]:
        self._check_directed()
        return {w for w in self._adj[v] if self.mark(v, w) == TAIL and self.mark(w, v) == TAIL}

    def _closure(self, v: int, step) -> frozenset[int]:
        seen = {v}
        stack = [v]
        while stack:
            w = stack.pop()
            for u in step(w):
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return frozenset(seen)

    def ancestors(self, v: int) -> frozenset[int]:
        """an(v), including v itself."""
        cache = self._cache.setdefault("an", {})
        if v not in cache:
            cache[v] = self._closure(v, self.parents)
        return cache[v]

    def descendants(self, v: int) -> frozenset[int]:
        """de(v), including v itself."""
        cache = self._cache.setdefault("de", {})
        if v not in cache:
            cache[v] = self._closure(v, self.children)
        return cache[v]

    def district(self, v: int) -> frozenset[int]:
        """dis(v): the bidirected-connected component containing v."""
        cache = self._cache.setdefault("dis", {})
        if v not in cache:
            block = self._closure(v, self.siblings)
            for w in block:
                cache[w] = block
        return cache[v]

    def ancestors_of(self, W: Iterable[int]) -> frozenset[int]:
        out: set[int] = set()
        for w in W:
            out |= self.ancestors(w)
        return frozenset(out)

    def descendants_of(self, W: Iterable[int]) -> frozenset[int]:
        out: set[int] = set()
        for w in W:
            out |= self.descendants(w)
        return frozenset(out)

    def parents_of(self, W: Iterable[int]) -> set[int]:
        out: set[int] = set()
        for w in W:
            out |= self.parents(w)
        return out

    def siblings_of(self, W: Iterable[int]) -> set[int]:
        out: set[int] = set()
        for w in W:
            out |= self.siblings(w)
        return out


def relations(g: MixedGraph, v: int) -> dict[str, set[int]]:
    """Parents, siblings, ancestors, descendants and district of ``v``."""
    return {
        "parents": g.parents(v),
        "siblings": g.siblings(v),
        "ancestors": set(g.ancestors(v)),
        "descendants": set(g.descendants(v)),
        "district": set(g.district(v)),
    }


def districts(g: MixedGraph) -> list[frozenset[int]]:
    """Partition of the vertex set into bidirected-connected components,
    ordered by smallest member."""
    g._check_directed()
    seen: set[int] = set()
    out = []
    for v in range(g.n):
        if v not in seen:
            block = g.district(v)
            seen |= block
            out.append(block)
    return out


def induced_subgraph(g: MixedGraph, W: Iterable[int]) -> MixedGraph:
    """Subgraph on ``W``: vertex identities preserved, edges restricted.

    The result keeps the original vertex count so indices stay stable;
    vertices outside ``W`` simply become isolated.
    """
    W = set(W)
    for w in W:
        g._check_vertex(w)
    h = MixedGraph(g.n, g.kind)
    for a, b, ma, mb in g.edges():
        if a in W and b in W:
            h.add_edge(a, b, ma, mb)
    return h


def m_separated(
    g: MixedGraph,
    A: Iterable[int],
    B: Iterable[int],
    C: Iterable[int] = (),
) -> bool:
    """True iff A and B are m-separated given C.

    Implemented as a reachability traversal over (vertex, entering-mark)
    states; a walk exists iff a path exists, so this is equivalent to path
    enumeration but polynomial.
    """
    A, B, C = set(A), set(B), set(C)
    if not A or not B:
        raise DomainError("A and B must be nonempty")
    if A & B or A & C or B & C:
        raise DomainError("A, B, C must be pairwise disjoint")
    g._check_directed()
    an_c = g.ancestors_of(C)

    # state (v, m): v was entered along an edge whose mark at v is m
    queue: deque[tuple[int, int]] = deque()
    seen: set[tuple[int, int]] = set()
    for a in A:
        for x in g.adjacent(a):
            if x in B:
                return False
            state = (x, g.mark(x, a))
            if state not in seen:
                seen.add(state)
                queue.append(state)
    while queue:
        v, m_in = queue.popleft()
        for x in g.adjacent(v):
            m_out = g.mark(v, x)
            collider = m_in == ARROW and m_out == ARROW
            if collider:
                if v not in an_c:
                    continue
            elif v in C:
                continue
            if x in B:
                return False
            state = (x, g.mark(x, v))
            if state not in seen:
                seen.add(state)
                queue.append(state)
    return True


def is_ancestral(g: MixedGraph) -> bool:
    """No vertex has a sibling among its ancestors, the directed part is
    acyclic, and vertices with undirected edges have no arrowheads
    pointing at them."""
    g._check_directed()
    if _has_directed_cycle(g):
        return False
    for v in range(g.n):
        if g.siblings(v) & g.ancestors(v):
            return False
        if g.undirected_neighbours(v) and (g.parents(v) or g.siblings(v)):
            return False
    return True


def _has_directed_cycle(g: MixedGraph) -> bool:
    try:
        topological_order(g)
    except CycleError:
        return True
    return False


def _inducing_path_exists(g: MixedGraph, a: int, b: int) -> bool:
    """A primitive inducing path between nonadjacent a, b: a collider path
    whose every nonendpoint lies in an({a, b})."""
    anchor = g.ancestors(a) | g.ancestors(b)
    queue: deque[tuple[int, int]] = deque()
    seen: set[tuple[int, int]] = set()
    for x in g.adjacent(a):
        state = (x, g.mark(x, a))
        seen.add(state)
        queue.append(state)
    while queue:
        v, m_in = queue.popleft()
        if v == b:
            return True
        if m_in != ARROW or v not in anchor:
            continue
        for x in g.adjacent(v):
            if g.mark(v, x) != ARROW:
                continue
            state = (x, g.mark(x, v))
            if state not in seen:
                seen.add(state)
                queue.append(state)
    return False


def is_maximal(g: MixedGraph) -> bool:
    """Every nonadjacent pair is m-separable by some set; checked via
    primitive inducing paths."""
    if not is_ancestral(g):
        raise DomainError("maximality is only defined for ancestral graphs")
    for a in range(g.n):
        for b in range(a + 1, g.n):
            if not g.has_edge(a, b) and _inducing_path_exists(g, a, b):
                return False
    return True


def is_mag(g: MixedGraph) -> bool:
    g._check_directed()
    return is_ancestral(g) and is_maximal(g)


def project_to_mag(g: MixedGraph) -> MixedGraph:
    """Project an ADMG to the Markov equivalent MAG with the same ancestral
    relations: a, b adjacent iff inseparable, ``a -> b`` iff a is an
    ancestor of b, bidirected otherwise."""
    g._check_directed()
    if _has_directed_cycle(g):
        raise CycleError("projection requires an acyclic input")
    out = MixedGraph(g.n, "MAG")
    for a in range(g.n):
        for b in range(a + 1, g.n):
            if g.has_edge(a, b) or _inducing_path_exists(g, a, b):
                if a in g.ancestors(b):
                    out.add_directed(a, b)
                elif b in g.ancestors(a):
                    out.add_directed(b, a)
                else:
                    out.add_bidirected(a, b)
    return out


def directify_undirected(g: MixedGraph) -> MixedGraph:
    """Replace every undirected edge by a directed one along a
    maximum-cardinality-search order of its component.

    For chordal components this yields a Markov equivalent graph (the
    orientation is acyclic and collider-free).  Non-chordal components have
    no such orientation, so a DomainError is raised.
    """
    adj: dict[int, set[int]] = {}
    for a, b, ma, mb in g.edges():
        if (ma, mb) == (TAIL, TAIL):
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
    if not adj:
        return g
    h = g.copy()
    seen: set[int] = set()
    for start in sorted(adj):
        if start in seen:
            continue
        comp, stack = [start], [start]
        seen.add(start)
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        # maximum cardinality search; simultaneously a chordality check:
        # each vertex's already-ordered neighbours must form a clique
        remaining = set(comp)
        weight = {v: 0 for v in comp}
        placed: list[int] = []
        while remaining:
            v = min(remaining, key=lambda u: (-weight[u], u))
            earlier = adj[v] & set(placed)
            for x in earlier:
                for y in earlier:
                    if x < y and y not in adj[x]:
                        raise DomainError(
                            "undirected component is not chordal; no Markov "
                            "equivalent directed orientation exists"
                        )
            placed.append(v)
            remaining.discard(v)
            for w in adj[v]:
                if w in remaining:
                    weight[w] += 1
        pos = {u: i for i, u in enumerate(placed)}
        for u in comp:
            for w in adj[u]:
                if pos[u] < pos[w]:
                    h.set_mark(u, w, TAIL)
                    h.set_mark(w, u, ARROW)
    return h


def topological_order(g: MixedGraph) -> list[int]:
    """Deterministic topological order of the directed part
    (lowest-index-first tie-break)."""
    g._check_directed()
    indeg = [len(g.parents(v)) for v in range(g.n)]
    heap = [v for v in range(g.n) if indeg[v] == 0]
    heapq.heapify(heap)
    out: list[int] = []
    while heap:
        v = heapq.heappop(heap)
        out.append(v)
        for c in sorted(g.children(v)):
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, c)
    if len(out) != g.n:
        raise CycleError("directed part of the graph is cyclic")
    return out


# -- text format ------------------------------------------------------------


def format_graph(g: MixedGraph) -> str:
    """Serialize in the one-edge-per-line text format.

    Canonical form: header, then edges sorted by (min, max) endpoints;
    asymmetric edges are printed in the orientation their symbol allows
    (e.g. ``(ARROW, TAIL)`` on ``(a, b)`` prints ``b -> a``).
    """
    lines = [f"vertices: {g.n}"]
    for a, b, ma, mb in g.edges():
        if (ma, mb) in _SYMBOL:
            lines.append(f"{a} {_SYMBOL[(ma, mb)]} {b}")
        elif (mb, ma) in _SYMBOL:
            lines.append(f"{b} {_SYMBOL[(mb, ma)]} {a}")
        else:
            raise DomainError(f"no symbol for marks {ma}, {mb}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str, kind: str | None = None) -> MixedGraph:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("vertices:"):
        raise DomainError("graph text must start with a 'vertices: n' header")
    n = int(lines[0].split(":", 1)[1])
    g = MixedGraph(n, kind or "PMG")
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3 or parts[1] not in _SYMBOL_MARKS:
            raise DomainError(f"cannot parse edge line: {ln!r}")
        a, sym, b = int(parts[0]), parts[1], int(parts[2])
        ma, mb = _SYMBOL_MARKS[sym]
        g.add_edge(a, b, ma, mb)
    if kind is None:
        g.kind = "PMG" if g.has_circle_marks() else "MAG"
    return g
