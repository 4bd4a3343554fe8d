"""Partial ancestral graphs: the orientation rule engine (R0-R10 and the
set-based variants R0'/R4'), discriminating-path search, MAG-to-PAG and
PAG-to-MAG conversion, and PAG construction from a parametrizing set.

Conventions: a PAG is a MixedGraph with kind "PAG"/"PMG"; arrowhead rules
are R0-R4 (a PAG is arrow-complete once they reach a fixpoint), tail rules
are R5-R10.  R4 decisions that cannot be settled locally are delegated to
a caller-supplied decider so the same engine serves conversion (consult
the source MAG), set-based construction (consult S) and move enumeration
(branch).
"""

from __future__ import annotations

from typing import Callable, Iterable, Iterator, Sequence

from .errors import DomainError, GraphKindError, InvalidMecError
from .graph import (
    ARROW,
    CIRCLE,
    TAIL,
    MixedGraph,
    is_ancestral,
    is_maximal,
)
from .heads import restricted_parametrizing_set

# decider verdicts for an R4 trigger
COLLIDER = "collider"
NONCOLLIDER = "noncollider"
BRANCH = "branch"

DEFAULT_PATH_CAP = 10_000


def all_circle_graph(n: int, adjacencies: Iterable[tuple[int, int]]) -> MixedGraph:
    p = MixedGraph(n, "PMG")
    for a, b in adjacencies:
        p.add_edge(a, b, CIRCLE, CIRCLE)
    return p


def unshielded_triples(p: MixedGraph) -> Iterator[tuple[int, int, int]]:
    """(a, b, c) with a < c, b the centre, a-b and b-c edges, a,c
    nonadjacent."""
    for b in range(p.n):
        nbrs = sorted(p.adjacent(b))
        for i, a in enumerate(nbrs):
            for c in nbrs[i + 1:]:
                if not p.has_edge(a, c):
                    yield a, b, c


def apply_r0(p: MixedGraph, colliders: Iterable[tuple[int, int, int]]) -> None:
    """Orient each (a, b, c) as a *-> b <-* c."""
    for a, b, c in colliders:
        p.set_mark(b, a, ARROW)
        p.set_mark(b, c, ARROW)


def _orient_into(p: MixedGraph, b: int, c: int) -> bool:
    """Set arrow at c on edge b-c; True if that changed anything."""
    if p.mark(c, b) != ARROW:
        p.set_mark(c, b, ARROW)
        return True
    return False


def _orient_directed(p: MixedGraph, b: int, c: int) -> bool:
    """Orient b -> c (tail at b, arrow at c)."""
    changed = False
    if p.mark(b, c) != TAIL:
        p.set_mark(b, c, TAIL)
        changed = True
    if p.mark(c, b) != ARROW:
        p.set_mark(c, b, ARROW)
        changed = True
    return changed


def _is_directed(p: MixedGraph, a: int, b: int) -> bool:
    return p.has_edge(a, b) and p.mark(a, b) == TAIL and p.mark(b, a) == ARROW


def _r1(p: MixedGraph) -> bool:
    # a *-> b o-* c, a and c nonadjacent  =>  b -> c
    changed = False
    for a, b, c in unshielded_triples(p):
        for x, y in ((a, c), (c, a)):
            if p.mark(b, x) == ARROW and p.mark(b, y) == CIRCLE:
                changed |= _orient_directed(p, b, y)
    return changed


def _r2(p: MixedGraph) -> bool:
    # a -> b *-> c or a *-> b -> c, with a o-* c at the c end  =>  a *-> c
    changed = False
    for b in range(p.n):
        for a in p.adjacent(b):
            for c in p.adjacent(b):
                if a == c or not p.has_edge(a, c) or p.mark(c, a) != CIRCLE:
                    continue
                first = _is_directed(p, a, b) and p.mark(c, b) == ARROW
                second = p.mark(b, a) == ARROW and _is_directed(p, b, c)
                if first or second:
                    changed |= _orient_into(p, a, c)
    return changed


def _r3(p: MixedGraph) -> bool:
    # a *-> b <-* c, a *-o d o-* c, a,c nonadjacent, d *-o b  =>  d *-> b
    changed = False
    for a, d, c in unshielded_triples(p):
        if p.mark(d, a) != CIRCLE or p.mark(d, c) != CIRCLE:
            continue
        for b in p.adjacent(d):
            if b in (a, c) or p.mark(b, d) != CIRCLE:
                continue
            if (
                p.has_edge(a, b)
                and p.has_edge(c, b)
                and p.mark(b, a) == ARROW
                and p.mark(b, c) == ARROW
            ):
                changed |= _orient_into(p, d, b)
    return changed


def find_discriminating_paths(
    p: MixedGraph,
    b: int,
    c: int,
    cap: int = DEFAULT_PATH_CAP,
    events: list | None = None,
) -> list[tuple[int, ...]]:
    """All discriminating paths <d, ..., a, b, c> for b and c.

    Every vertex strictly between d and b must be a collider on the path
    and a parent of c; d and c are nonadjacent.  Search extends collider
    paths backwards from b; enumeration stops at ``cap`` paths with a
    logged event.
    """
    if not p.has_edge(b, c):
        return []
    out: list[tuple[int, ...]] = []

    def extend(front: int, path: tuple[int, ...]) -> bool:
        # front is an intermediate still missing the arrow on its d side
        for x in sorted(p.adjacent(front)):
            if x in path or x == c:
                continue
            if p.mark(front, x) != ARROW:
                continue
            if not p.has_edge(x, c):
                out.append((x,) + path)
                if len(out) >= cap:
                    if events is not None:
                        events.append(
                            {"event": "discriminating-path-cap", "b": b, "c": c, "cap": cap}
                        )
                    return False
            elif _is_directed(p, x, c) and p.mark(x, front) == ARROW:
                if not extend(x, (x,) + path):
                    return False
        return True

    for a in sorted(p.adjacent(b)):
        if a == c or not p.has_edge(a, c):
            continue
        if _is_directed(p, a, c) and p.mark(a, b) == ARROW:
            if not extend(a, (a, b, c)):
                break
    return out


def count_discriminating_paths(p: MixedGraph, cap: int = DEFAULT_PATH_CAP) -> int:
    total = 0
    for a, b, ma, mb in list(p.edges()):
        total += len(find_discriminating_paths(p, a, b, cap))
        total += len(find_discriminating_paths(p, b, a, cap))
    return total


def _find_r4_trigger(
    p: MixedGraph, cap: int, events: list | None
) -> tuple[tuple[int, ...], int, int] | None:
    """First (path, b, c) with b o-* c and a discriminating path, scanning
    edges in canonical order."""
    for x, y, mx, my in list(p.edges()):
        for b, c in ((x, y), (y, x)):
            if p.mark(b, c) != CIRCLE:
                continue
            paths = find_discriminating_paths(p, b, c, cap, events)
            if paths:
                return paths[0], b, c
    return None


Decider = Callable[[tuple[int, ...], int, int], str]


def saturate_arrowheads(
    p: MixedGraph,
    decider: Decider,
    cap: int = DEFAULT_PATH_CAP,
    events: list | None = None,
) -> tuple[int, int] | None:
    """Run R1-R4 to fixpoint, mutating p.

    ``decider(path, b, c)`` resolves each R4 trigger: COLLIDER orients
    a <-> b <-> c, NONCOLLIDER orients b -> c, BRANCH aborts and returns
    the undecided trigger (path, b, c) to the caller.  Returns None once
    arrow-complete.
    """
    while True:
        while _r1(p) or _r2(p) or _r3(p):
            pass
        trig = _find_r4_trigger(p, cap, events)
        if trig is None:
            return None
        path, b, c = trig
        verdict = decider(path, b, c)
        if verdict == NONCOLLIDER:
            _orient_directed(p, b, c)
        elif verdict == COLLIDER:
            a = path[-3]
            p.set_mark(b, a, ARROW)
            p.set_mark(a, b, ARROW)
            p.set_mark(c, b, ARROW)
            p.set_mark(b, c, ARROW)
        elif verdict == BRANCH:
            return trig
        else:
            raise DomainError(f"unknown R4 verdict {verdict!r}")


def complete_with_branching(
    p: MixedGraph,
    decider: Decider,
    branch_cap: int = 256,
    path_cap: int = DEFAULT_PATH_CAP,
    events: list | None = None,
) -> list[MixedGraph]:
    """Drain an R4 branch worklist depth-first (collider branch first)
    until every graph is arrow-complete; exceeding ``branch_cap`` leaves
    is a logged truncation, not an error."""
    done: list[MixedGraph] = []
    stack = [p]
    while stack:
        if len(done) + len(stack) > branch_cap:
            if events is not None:
                events.append({"event": "branch-cap", "cap": branch_cap})
            break
        q = stack.pop()
        undecided = saturate_arrowheads(q, decider, path_cap, events)
        if undecided is None:
            done.append(q)
            continue
        path, b, c = undecided
        a = path[-3]
        non = q.copy()
        _orient_directed(non, b, c)
        stack.append(non)
        col = q.copy()
        col.set_mark(b, a, ARROW)
        col.set_mark(a, b, ARROW)
        col.set_mark(c, b, ARROW)
        col.set_mark(b, c, ARROW)
        stack.append(col)
    return done


# -- tail rules R5-R10 --------------------------------------------------------


def _uncovered_circle_path_exists(p: MixedGraph, a: int, b: int) -> list[int] | None:
    """Uncovered circle path <a, c, ..., d, b> with a,d and b,c
    nonadjacent; returns the full path (including a and b) or None."""
    def dfs(path: list[int]) -> list[int] | None:
        v = path[-1]
        for x in sorted(p.adjacent(v)):
            if x in path:
                continue
            if p.mark(v, x) != CIRCLE or p.mark(x, v) != CIRCLE:
                continue
            if p.has_edge(path[-2], x):
                continue  # covered at v
            if x == b:
                if not p.has_edge(a, v):
                    return path + [b]
                continue
            got = dfs(path + [x])
            if got is not None:
                return got
        return None

    for c in sorted(p.adjacent(a)):
        if c == b or p.has_edge(c, b):
            continue
        if p.mark(a, c) != CIRCLE or p.mark(c, a) != CIRCLE:
            continue
        got = dfs([a, c])
        if got is not None:
            return got
    return None


def _r5(p: MixedGraph) -> bool:
    changed = False
    for x, y, mx, my in list(p.edges()):
        if mx != CIRCLE or my != CIRCLE:
            continue
        path = _uncovered_circle_path_exists(p, x, y)
        if path is None:
            continue
        pairs = list(zip(path, path[1:])) + [(x, y)]
        for u, v in pairs:
            if p.mark(u, v) != TAIL:
                p.set_mark(u, v, TAIL)
                changed = True
            if p.mark(v, u) != TAIL:
                p.set_mark(v, u, TAIL)
                changed = True
    return changed


def _r6(p: MixedGraph) -> bool:
    # a - b o-* c  =>  tail at b on b-c
    changed = False
    for b in range(p.n):
        has_undirected = any(
            p.mark(b, a) == TAIL and p.mark(a, b) == TAIL for a in p.adjacent(b)
        )
        if not has_undirected:
            continue
        for c in p.adjacent(b):
            if p.mark(b, c) == CIRCLE:
                ok = any(
                    a != c and p.mark(b, a) == TAIL and p.mark(a, b) == TAIL
                    for a in p.adjacent(b)
                )
                if ok:
                    p.set_mark(b, c, TAIL)
                    changed = True
    return changed


def _r7(p: MixedGraph) -> bool:
    # a -o b o-* c, a,c nonadjacent  =>  tail at b on b-c
    changed = False
    for a, b, c in unshielded_triples(p):
        for x, y in ((a, c), (c, a)):
            if (
                p.mark(x, b) == TAIL
                and p.mark(b, x) == CIRCLE
                and p.mark(b, y) == CIRCLE
            ):
                p.set_mark(b, y, TAIL)
                changed = True
    return changed


def _r8(p: MixedGraph) -> bool:
    # a -> b -> c or a -o b -> c, with a o-> c  =>  a -> c
    changed = False
    for a in range(p.n):
        for c in p.adjacent(a):
            if not (p.mark(a, c) == CIRCLE and p.mark(c, a) == ARROW):
                continue
            for b in p.adjacent(a):
                if b == c or not p.has_edge(b, c):
                    continue
                ab_dir = _is_directed(p, a, b)
                ab_tail_circle = p.mark(a, b) == TAIL and p.mark(b, a) == CIRCLE
                if (ab_dir or ab_tail_circle) and _is_directed(p, b, c):
                    p.set_mark(a, c, TAIL)
                    changed = True
    return changed


def _pd_step_ok(p: MixedGraph, u: int, v: int) -> bool:
    # potentially directed: not u <-* v and not u *- v
    return p.mark(u, v) != ARROW and p.mark(v, u) != TAIL


def _uncovered_pd_path(
    p: MixedGraph, a: int, target: int, first_nonadjacent_to: int | None
) -> list[int] | None:
    """Uncovered potentially-directed path from a to target; optionally the
    first inner vertex must be nonadjacent to ``first_nonadjacent_to``."""
    def dfs(path: list[int]) -> list[int] | None:
        v = path[-1]
        if v == target:
            return path
        for x in sorted(p.adjacent(v)):
            if x in path:
                continue
            if not _pd_step_ok(p, v, x):
                continue
            if len(path) >= 2 and p.has_edge(path[-2], x):
                continue
            got = dfs(path + [x])
            if got is not None:
                return got
        return None

    for b in sorted(p.adjacent(a)):
        if not _pd_step_ok(p, a, b):
            continue
        if first_nonadjacent_to is not None:
            if b == first_nonadjacent_to or p.has_edge(b, first_nonadjacent_to):
                continue
        got = dfs([a, b])
        if got is not None:
            return got
    return None


def _r9(p: MixedGraph) -> bool:
    changed = False
    for a in range(p.n):
        for c in sorted(p.adjacent(a)):
            if not (p.mark(a, c) == CIRCLE and p.mark(c, a) == ARROW):
                continue
            if _uncovered_pd_path(p, a, c, first_nonadjacent_to=c) is not None:
                p.set_mark(a, c, TAIL)
                changed = True
    return changed


def _r10(p: MixedGraph) -> bool:
    changed = False
    for a in range(p.n):
        for c in sorted(p.adjacent(a)):
            if not (p.mark(a, c) == CIRCLE and p.mark(c, a) == ARROW):
                continue
            parents = [b for b in p.adjacent(c) if _is_directed(p, b, c) and b != a]
            fired = False
            for b in parents:
                for d in parents:
                    if b >= d or fired:
                        continue
                    p1 = _uncovered_pd_path(p, a, b, None)
                    p2 = _uncovered_pd_path(p, a, d, None)
                    if p1 is None or p2 is None:
                        continue
                    x, y = p1[1], p2[1]
                    if x != y and not p.has_edge(x, y):
                        p.set_mark(a, c, TAIL)
                        changed = True
                        fired = True
            if fired:
                continue
    return changed


def orient_tails(p: MixedGraph, decider: Decider | None = None) -> None:
    """Apply R5-R10 (interleaved with R1-R4 re-saturation) to fixpoint."""
    if decider is None:
        decider = lambda path, b, c: COLLIDER  # unused when arrow-complete
    while True:
        saturate_arrowheads(p, decider)
        if not (_r5(p) or _r6(p) or _r7(p) or _r8(p) or _r9(p) or _r10(p)):
            break


# -- conversions --------------------------------------------------------------


def mag_decider(g: MixedGraph) -> Decider:
    """R4 against the source MAG: if b -> c there, the triple is a
    noncollider; otherwise a collider."""
    def decide(path: tuple[int, ...], b: int, c: int) -> str:
        if _is_directed(g, b, c):
            return NONCOLLIDER
        return COLLIDER

    return decide


def set_decider(s: frozenset[frozenset[int]]) -> Decider:
    """R4': collider iff {d, b, c} is in the parametrizing set."""
    def decide(path: tuple[int, ...], b: int, c: int) -> str:
        d = path[0]
        if frozenset({d, b, c}) in s:
            return COLLIDER
        return NONCOLLIDER

    return decide


def mag_to_pag(g: MixedGraph, tails: bool = True) -> MixedGraph:
    """PAG of the MEC of MAG g: all-circle skeleton, R0 from g's
    unshielded colliders, R1-R4 with R4 answered by g, then R5-R10 when
    ``tails``."""
    if g.has_circle_marks():
        raise GraphKindError("mag_to_pag expects a MAG")
    p = all_circle_graph(g.n, [(a, b) for a, b, _x, _y in g.edges()])
    colliders = [
        (a, b, c)
        for a, b, c in unshielded_triples(g)
        if g.mark(b, a) == ARROW and g.mark(b, c) == ARROW
    ]
    apply_r0(p, colliders)
    decider = mag_decider(g)
    saturate_arrowheads(p, decider)
    if tails:
        orient_tails(p, decider)
    p.kind = "PAG"
    return p


def pag_from_parametrizing_set(
    s: Iterable[Iterable[int]],
    n: int,
    tails: bool = True,
    one_adjacency_shortcut: bool = False,
) -> MixedGraph:
    """PAG from a restricted parametrizing set (adjacencies, unshielded
    colliders and one-adjacency triples): R0'/R4' replace R0/R4."""
    s = frozenset(frozenset(x) for x in s)
    adjacencies = [tuple(sorted(W)) for W in s if len(W) == 2]
    p = all_circle_graph(n, adjacencies)
    colliders = [
        (a, b, c) for a, b, c in unshielded_triples(p) if frozenset({a, b, c}) in s
    ]
    apply_r0(p, colliders)
    if one_adjacency_shortcut:
        for W in s:
            if len(W) == 3:
                adj = [
                    (x, y)
                    for x in sorted(W)
                    for y in sorted(W)
                    if x < y and p.has_edge(x, y)
                ]
                if len(adj) == 1:
                    a, b = adj[0]
                    p.set_mark(a, b, ARROW)
                    p.set_mark(b, a, ARROW)
    decider = set_decider(s)
    saturate_arrowheads(p, decider)
    if tails:
        orient_tails(p, decider)
    p.kind = "PAG"
    return p


def _mcs_order(p: MixedGraph, component: Sequence[int]) -> list[int]:
    """Maximum-cardinality-search order of a circle component; smallest
    index breaks weight ties."""
    comp = set(component)
    weight = {v: 0 for v in comp}
    order: list[int] = []
    remaining = set(comp)
    while remaining:
        v = min(remaining, key=lambda u: (-weight[u], u))
        order.append(v)
        remaining.discard(v)
        for w in p.adjacent(v):
            if w in remaining and p.mark(v, w) == CIRCLE and p.mark(w, v) == CIRCLE:
                weight[w] += 1
    return order


def pag_to_mag(p: MixedGraph, validate: bool = True) -> MixedGraph:
    """Representative MAG of an arrow-complete PAG: circle-arrow edges
    become directed, each circle component is oriented along a
    maximum-cardinality-search order (earlier -> later), undirected edges
    are kept.  Raises InvalidMecError when the result fails validation."""
    g = p.copy("MAG")
    circle_adj: dict[int, set[int]] = {}
    for a, b, ma, mb in list(g.edges()):
        if ma == CIRCLE and mb == CIRCLE:
            circle_adj.setdefault(a, set()).add(b)
            circle_adj.setdefault(b, set()).add(a)
    # orient each circle component; MCS yields a collider-free DAG
    # exactly when the component is chordal
    seen: set[int] = set()
    for v in sorted(circle_adj):
        if v in seen:
            continue
        comp = [v]
        stack = [v]
        seen.add(v)
        while stack:
            u = stack.pop()
            for w in circle_adj[u]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        order = _mcs_order(p, comp)
        pos = {u: i for i, u in enumerate(order)}
        for u in comp:
            for w in circle_adj[u]:
                if pos[u] < pos[w]:
                    g.set_mark(u, w, TAIL)
                    g.set_mark(w, u, ARROW)
    # remaining single circle marks sit on o-> or o-- edges
    for a, b, ma, mb in list(g.edges()):
        if ma == CIRCLE:
            g.set_mark(a, b, TAIL)
        if mb == CIRCLE:
            g.set_mark(b, a, TAIL)
    if validate:
        validate_mag_against_pag(g, p)
    return g


def validate_mag_against_pag(g: MixedGraph, p: MixedGraph) -> None:
    """Check g is a MAG whose MEC matches p; InvalidMecError otherwise.

    A MEC is determined by the skeleton together with the invariant
    arrowheads, so the rebuilt arrow-complete PAG of g must place arrows
    exactly where p does; circle-versus-tail differences are allowed
    because p may or may not have had its invariant tails oriented.
    """
    if not is_ancestral(g) or not is_maximal(g):
        raise InvalidMecError("representative graph is not a valid MAG")
    rebuilt = mag_to_pag(g, tails=False)
    def arrows(q: MixedGraph) -> set:
        out = set()
        for a, b, ma, mb in q.edges():
            out.add((a, b, ma == ARROW, mb == ARROW))
        return out
    if arrows(rebuilt) != arrows(p):
        raise InvalidMecError("representative MAG does not reproduce the PAG")
