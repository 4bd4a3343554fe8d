"""Graph core: construction, relations, m-separation, ancestrality,
maximality, projection, serialization."""

import numpy as np
import pytest

from gesmag.errors import CycleError, DomainError, GraphKindError
from gesmag.graph import (
    ARROW,
    CIRCLE,
    TAIL,
    MixedGraph,
    districts,
    format_graph,
    induced_subgraph,
    is_ancestral,
    is_mag,
    is_maximal,
    m_separated,
    parse_graph,
    project_to_mag,
    relations,
    topological_order,
)

from oracles import msep_oracle, random_mag, separation_model


def test_edge_construction_and_marks():
    g = MixedGraph(3)
    g.add_directed(0, 1)
    g.add_bidirected(1, 2)
    assert g.mark(0, 1) == TAIL and g.mark(1, 0) == ARROW
    assert g.mark(1, 2) == ARROW and g.mark(2, 1) == ARROW
    assert g.has_edge(1, 0) and not g.has_edge(0, 2)
    assert g.num_edges() == 2
    with pytest.raises(DomainError):
        g.add_directed(1, 0)  # duplicate pair
    with pytest.raises(DomainError):
        g.add_directed(0, 0)
    with pytest.raises(DomainError):
        g.add_directed(0, 5)
    g.remove_edge(2, 1)
    assert not g.has_edge(1, 2)
    with pytest.raises(DomainError):
        g.remove_edge(1, 2)


def test_set_mark_and_copy_independence():
    g = MixedGraph(2, "PMG")
    g.add_edge(0, 1, CIRCLE, CIRCLE)
    h = g.copy()
    h.set_mark(0, 1, ARROW)
    assert g.mark(0, 1) == CIRCLE and h.mark(0, 1) == ARROW


def test_relations_on_dense_mag(dense_mag):
    rel = relations(dense_mag, 3)
    assert rel["parents"] == {0}
    assert rel["siblings"] == {1, 2}
    assert rel["district"] == {0, 1, 2, 3}
    assert rel["ancestors"] == {0, 3}
    assert rel["descendants"] == {3}
    assert districts(dense_mag) == [frozenset({0, 1, 2, 3})]


def test_relations_reject_circle_marks():
    g = MixedGraph(2, "PAG")
    g.add_edge(0, 1, CIRCLE, ARROW)
    with pytest.raises(GraphKindError):
        g.parents(1)
    with pytest.raises(GraphKindError):
        m_separated(g, {0}, {1})


def test_m_separation_on_dense_mag(dense_mag):
    # the one missing adjacency {0, 2} is separated exactly by {1}
    assert m_separated(dense_mag, {0}, {2}, {1})
    assert not m_separated(dense_mag, {0}, {2}, set())
    assert not m_separated(dense_mag, {0}, {2}, {3})
    assert not m_separated(dense_mag, {0}, {2}, {1, 3})
    assert separation_model(dense_mag) == frozenset({(0, 2, (1,))})


def test_m_separation_input_validation(dense_mag):
    with pytest.raises(DomainError):
        m_separated(dense_mag, set(), {1})
    with pytest.raises(DomainError):
        m_separated(dense_mag, {0}, {0})
    with pytest.raises(DomainError):
        m_separated(dense_mag, {0}, {1}, {0})


def test_m_separation_collider_ancestor_opening():
    # 0 -> 2 <- 1 with 2 -> 3: conditioning on the collider's descendant opens it
    g = MixedGraph(4)
    g.add_directed(0, 2)
    g.add_directed(1, 2)
    g.add_directed(2, 3)
    assert m_separated(g, {0}, {1})
    assert not m_separated(g, {0}, {1}, {2})
    assert not m_separated(g, {0}, {1}, {3})


def test_m_separation_matches_oracle_randomized():
    rng = np.random.default_rng(101)
    for _ in range(150):
        g = random_mag(rng)
        for _ in range(12):
            a, b = map(int, rng.choice(g.n, 2, replace=False))
            rest = [v for v in range(g.n) if v not in (a, b)]
            C = {int(v) for v in rest if rng.random() < 0.4}
            assert m_separated(g, {a}, {b}, C) == msep_oracle(g, a, b, C)


def test_ancestrality(four_cycle_admg, almost_directed_cycle, dense_mag):
    assert is_ancestral(four_cycle_admg)
    assert not is_ancestral(almost_directed_cycle)  # 0 -> 1 -> 2 <-> 0
    assert is_mag(dense_mag)
    # undirected edges forbid arrowheads at their endpoints
    g = MixedGraph(3)
    g.add_undirected(0, 1)
    g.add_directed(2, 1)
    assert not is_ancestral(g)
    h = MixedGraph(3)
    h.add_undirected(0, 1)
    h.add_directed(1, 2)
    assert is_ancestral(h) and is_maximal(h)


def test_maximality(four_cycle_admg):
    assert not is_maximal(four_cycle_admg)
    with pytest.raises(DomainError):
        g = MixedGraph(3)
        g.add_bidirected(0, 2)
        g.add_directed(0, 1)
        g.add_directed(1, 2)
        is_maximal(g)  # not ancestral


def test_projection_preserves_model(four_cycle_admg, almost_directed_cycle):
    mag = project_to_mag(four_cycle_admg)
    assert is_mag(mag)
    # the inseparable pair {2, 3} gains a bidirected edge
    assert mag.has_edge(2, 3)
    assert mag.mark(2, 3) == ARROW and mag.mark(3, 2) == ARROW
    assert separation_model(mag) == separation_model(four_cycle_admg)

    mag2 = project_to_mag(almost_directed_cycle)
    assert is_mag(mag2)
    # 0 is an ancestor of 2, so the projected edge is directed
    assert mag2.mark(0, 2) == TAIL and mag2.mark(2, 0) == ARROW
    assert separation_model(mag2) == separation_model(almost_directed_cycle)


def test_projection_randomized_model_equality():
    rng = np.random.default_rng(77)
    from gesmag.simulate import random_admg

    for _ in range(60):
        n = int(rng.integers(3, 6))
        g = random_admg(n, min(2.5, n - 1.2), 0.5, rng)
        mag = project_to_mag(g)
        assert is_mag(mag)
        assert separation_model(mag) == separation_model(g)


def test_projection_rejects_cycles():
    g = MixedGraph(3)
    g.add_directed(0, 1)
    g.add_directed(1, 2)
    g.add_directed(2, 0)  # closes the directed cycle
    with pytest.raises(CycleError):
        topological_order(g)
    with pytest.raises(CycleError):
        project_to_mag(g)
    assert not is_ancestral(g)


def test_topological_order(dense_mag):
    order = topological_order(dense_mag)
    pos = {v: i for i, v in enumerate(order)}
    for a, b, ma, mb in dense_mag.edges():
        if (ma, mb) == (TAIL, ARROW):
            assert pos[a] < pos[b]
        if (ma, mb) == (ARROW, TAIL):
            assert pos[b] < pos[a]


def test_induced_subgraph(dense_mag):
    sub = induced_subgraph(dense_mag, {0, 1, 2})
    assert sub.n == dense_mag.n  # vertex identities preserved
    assert sub.has_edge(0, 1) and sub.has_edge(1, 2)
    assert not sub.has_edge(0, 3) and not sub.has_edge(2, 3)


def test_serialization_round_trip(dense_mag, recovery_pag):
    for g in (dense_mag, recovery_pag):
        text = format_graph(g)
        h = parse_graph(text)
        assert h.edge_key() == g.edge_key()
        assert format_graph(h) == text
    # circle marks survive
    p = MixedGraph(2, "PAG")
    p.add_edge(0, 1, CIRCLE, ARROW)
    assert "o->" in format_graph(p)
    assert parse_graph(format_graph(p)).mark(0, 1) == CIRCLE


def test_parse_errors():
    with pytest.raises(DomainError):
        parse_graph("0 -> 1\n")
    with pytest.raises(DomainError):
        parse_graph("vertices: 2\n0 => 1\n")
    with pytest.raises(DomainError):
        parse_graph("vertices: 2\n0 -> 5\n")
