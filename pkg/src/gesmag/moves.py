"""Neighboring Markov equivalence classes of a PAG: single-adjacency
additions and deletions and the turning phase.

Each move fixes the new skeleton, reuses every orientation the current
PAG already pins down (unshielded triples that stay unshielded keep their
status; invariant edge marks settle many discriminating paths without
branching), enumerates the genuinely uncertain unshielded colliders, and
drains an R4 branch worklist until all candidates are arrow-complete.
Invalid candidates (no representative MAG realizes them) are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import chain, combinations
from typing import Iterable

from .errors import DomainError, InvalidMecError
from .graph import ARROW, CIRCLE, TAIL, MixedGraph
from .heads import in_parametrizing_set
from .pag import (
    BRANCH,
    COLLIDER,
    DEFAULT_PATH_CAP,
    NONCOLLIDER,
    all_circle_graph,
    apply_r0,
    complete_with_branching,
    pag_to_mag,
    unshielded_triples,
)


@dataclass(frozen=True)
class UCTriple:
    """An unshielded triple, stored as (centre, two end vertices)."""

    centre: int
    ends: frozenset[int]

    def sorted_tuple(self) -> tuple[int, int, int]:
        return tuple(sorted(self.ends | {self.centre}))

    def r0_form(self) -> tuple[int, int, int]:
        a, c = sorted(self.ends)
        return a, self.centre, c


class MecContext:
    """Lazy parametrizing-set membership for the MEC of a PAG, memoized
    per move batch."""

    def __init__(self, p: MixedGraph):
        self.p = p
        self._mag: MixedGraph | None = None
        self._memo: dict[frozenset[int], bool] = {}

    def in_s(self, W: Iterable[int]) -> bool:
        W = frozenset(W)
        if W not in self._memo:
            if self._mag is None:
                self._mag = pag_to_mag(self.p)
            self._memo[W] = in_parametrizing_set(self._mag, W)
        return self._memo[W]


def _is_collider(p: MixedGraph, a: int, b: int, c: int) -> bool:
    return p.mark(b, a) == ARROW and p.mark(b, c) == ARROW


def _shared_colliders(p: MixedGraph, pnew: MixedGraph) -> list[tuple[int, int, int]]:
    """Triples unshielded in both graphs that are colliders in p."""
    out = []
    for a, b, c in unshielded_triples(pnew):
        if (
            p.has_edge(a, b)
            and p.has_edge(b, c)
            and not p.has_edge(a, c)
            and _is_collider(p, a, b, c)
        ):
            out.append((a, b, c))
    return out


def uc_triples_add(
    p: MixedGraph, i: int, j: int
) -> tuple[MixedGraph, dict[int, list[UCTriple]], dict[int, list[UCTriple]]]:
    """New-edge skeleton with shared colliders oriented, plus the new
    unshielded triples centred on i and on j split into definite and
    possible collider sets."""
    if p.has_edge(i, j):
        raise DomainError(f"{i} and {j} are already adjacent")
    pnew = all_circle_graph(p.n, list(p.skeleton()) + [(min(i, j), max(i, j))])
    apply_r0(pnew, _shared_colliders(p, pnew))
    definite: dict[int, list[UCTriple]] = {i: [], j: []}
    possible: dict[int, list[UCTriple]] = {i: [], j: []}
    for a, b in ((i, j), (j, i)):
        for k in sorted(p.adjacent(a)):
            if k == b or pnew.has_edge(k, b):
                continue
            mark_at_a = p.mark(a, k)
            if mark_at_a == TAIL:
                continue  # noncollider at a is forced
            t = UCTriple(a, frozenset({b, k}))
            if mark_at_a == ARROW:
                definite[a].append(t)
            else:
                possible[a].append(t)
    return pnew, definite, possible


def uc_triples_delete(
    p: MixedGraph, i: int, j: int
) -> tuple[MixedGraph, list[UCTriple]]:
    """Deleted-edge skeleton with shared colliders oriented and colliders
    i *-> a <-* j preserved; returns the uncertain new triples centred on
    common neighbours."""
    if not p.has_edge(i, j):
        raise DomainError(f"{i} and {j} are not adjacent")
    skel = [e for e in p.skeleton() if e != (min(i, j), max(i, j))]
    pnew = all_circle_graph(p.n, skel)
    apply_r0(pnew, _shared_colliders(p, pnew))
    uncertain: list[UCTriple] = []
    for a in sorted(p.adjacent(i) & p.adjacent(j)):
        if p.mark(a, i) == ARROW and p.mark(a, j) == ARROW:
            pnew.set_mark(a, i, ARROW)
            pnew.set_mark(a, j, ARROW)
        elif p.mark(a, i) == TAIL or p.mark(a, j) == TAIL:
            continue  # noncollider at a is forced
        else:
            uncertain.append(UCTriple(a, frozenset({i, j})))
    return pnew, uncertain


def _add_decider(p: MixedGraph, ctx: MecContext):
    def decide(path: tuple[int, ...], b: int, c: int) -> str:
        d = path[0]
        if p.has_edge(b, c) and p.mark(b, c) == ARROW:
            return COLLIDER
        if ctx.in_s({d, b, c}):
            return COLLIDER
        if p.has_edge(b, c) and p.mark(b, c) == TAIL:
            return NONCOLLIDER
        return BRANCH

    return decide


def _delete_decider(p: MixedGraph, ctx: MecContext):
    def decide(path: tuple[int, ...], b: int, c: int) -> str:
        d = path[0]
        if ctx.in_s({d, b, c}):
            return COLLIDER
        if p.has_edge(b, c) and p.mark(b, c) == TAIL:
            return NONCOLLIDER
        return BRANCH

    return decide


def _turn_decider(path: tuple[int, ...], b: int, c: int) -> str:
    return BRANCH


def _subsets(items: list[UCTriple], max_size: int | None = None):
    top = len(items) if max_size is None else min(max_size, len(items))
    return chain.from_iterable(combinations(items, r) for r in range(top + 1))


def _finish(
    variants: list[MixedGraph],
    decider,
    branch_cap: int,
    path_cap: int,
    events: list | None,
) -> list[MixedGraph]:
    """Drain branches for each variant, deduplicate by the full mark
    pattern, drop candidates without a valid representative MAG."""
    out: list[MixedGraph] = []
    seen: set[tuple] = set()
    for v in variants:
        for q in complete_with_branching(v, decider, branch_cap, path_cap, events):
            key = q.edge_key()
            if key in seen:
                continue
            seen.add(key)
            try:
                pag_to_mag(q, validate=True)
            except InvalidMecError:
                if events is not None:
                    events.append({"event": "invalid-proposal"})
                continue
            q.kind = "PAG"
            out.append(q)
    return out


def _variants_from_collider_sets(
    base: MixedGraph, collider_sets: Iterable[Iterable[UCTriple]]
) -> list[MixedGraph]:
    variants = []
    seen: set[tuple] = set()
    for triples in collider_sets:
        v = base.copy()
        apply_r0(v, [t.r0_form() for t in triples])
        key = v.edge_key()
        if key not in seen:
            seen.add(key)
            variants.append(v)
    return variants


def add_adjacency(
    p: MixedGraph,
    i: int,
    j: int,
    branch_cap: int = 256,
    path_cap: int = DEFAULT_PATH_CAP,
    events: list | None = None,
) -> list[MixedGraph]:
    """All arrow-complete PAGs reachable by adding the adjacency {i, j}."""
    base, definite, possible = uc_triples_add(p, i, j)
    collider_sets: list[list[UCTriple]] = [[]]
    for uc in _subsets(possible[i]):
        collider_sets.append(list(uc) + definite[i])
    for uc in _subsets(possible[j]):
        collider_sets.append(list(uc) + definite[j])
    for uc in _subsets(possible[i] + possible[j]):
        collider_sets.append(list(uc) + definite[i] + definite[j])
    variants = _variants_from_collider_sets(base, collider_sets)
    ctx = MecContext(p)
    return _finish(variants, _add_decider(p, ctx), branch_cap, path_cap, events)


def delete_adjacency(
    p: MixedGraph,
    i: int,
    j: int,
    branch_cap: int = 256,
    path_cap: int = DEFAULT_PATH_CAP,
    events: list | None = None,
) -> list[MixedGraph]:
    """All arrow-complete PAGs reachable by deleting the adjacency {i, j}."""
    base, uncertain = uc_triples_delete(p, i, j)
    collider_sets = [list(uc) for uc in _subsets(uncertain)]
    variants = _variants_from_collider_sets(base, collider_sets)
    ctx = MecContext(p)
    return _finish(variants, _delete_decider(p, ctx), branch_cap, path_cap, events)


def turning_moves(
    p: MixedGraph,
    t: int,
    branch_cap: int = 256,
    path_cap: int = DEFAULT_PATH_CAP,
    events: list | None = None,
) -> list[MixedGraph]:
    """Arrow-complete PAGs with the same skeleton and at most t unshielded
    triples flipped between collider and noncollider status."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    triples = [UCTriple(b, frozenset({a, c})) for a, b, c in unshielded_triples(p)]
    colliders = {
        tr for tr in triples if _is_collider(p, *tr.r0_form())
    }
    variants = []
    seen: set[tuple] = set()
    for flip in _subsets(triples, t):
        flip = set(flip)
        new_colliders = (colliders - flip) | (flip - colliders)
        v = all_circle_graph(p.n, list(p.skeleton()))
        apply_r0(v, [tr.r0_form() for tr in new_colliders])
        key = v.edge_key()
        if key not in seen:
            seen.add(key)
            variants.append(v)
    return _finish(variants, _turn_decider, branch_cap, path_cap, events)
