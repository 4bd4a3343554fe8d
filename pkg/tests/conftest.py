"""Shared graph fixtures (all vertex labels 0-based)."""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gesmag.graph import ARROW, CIRCLE, MixedGraph


@pytest.fixture
def four_cycle_admg():
    """Ancestral but not maximal: 0<->2, 1<->3, 0<->1, 1->2, 0->3."""
    g = MixedGraph(4, "ADMG")
    g.add_bidirected(0, 2)
    g.add_bidirected(1, 3)
    g.add_bidirected(0, 1)
    g.add_directed(1, 2)
    g.add_directed(0, 3)
    return g


@pytest.fixture
def almost_directed_cycle():
    """Maximal but not ancestral: 0<->2, 0->1, 1->2."""
    g = MixedGraph(3, "ADMG")
    g.add_bidirected(0, 2)
    g.add_directed(0, 1)
    g.add_directed(1, 2)
    return g


def make_dense_mag():
    """A 4-vertex MAG with one missing adjacency {0, 2}; its only
    conditional independence is 0 _||_ 2 | 1."""
    g = MixedGraph(4, "MAG")
    g.add_bidirected(0, 1)
    g.add_bidirected(1, 3)
    g.add_bidirected(2, 3)
    g.add_directed(1, 2)
    g.add_directed(0, 3)
    return g


@pytest.fixture
def dense_mag():
    return make_dense_mag()


def make_recovery_pset():
    """Restricted parametrizing set (triples of size <= 3 with 1-2
    adjacencies) of an 8-vertex MEC whose PAG is fully orientable."""
    adjacencies = [(0, 1), (0, 2), (1, 3), (2, 3), (1, 4), (4, 5), (4, 6),
                   (5, 6), (5, 7), (6, 7)]
    colliders = [(1, 4, 5), (4, 5, 7), (4, 6, 7)]
    one_adjacency = [(1, 6, 7)]
    s = {frozenset([v]) for v in range(8)}
    for t in adjacencies + colliders + one_adjacency:
        s.add(frozenset(t))
    return frozenset(s)


def make_recovery_pag():
    """The PAG recovered from make_recovery_pset: an undirected 4-cycle
    component feeding a bidirected cluster."""
    p = MixedGraph(8, "PAG")
    p.add_undirected(0, 1)
    p.add_undirected(0, 2)
    p.add_undirected(1, 3)
    p.add_undirected(2, 3)
    p.add_directed(1, 4)
    p.add_bidirected(4, 5)
    p.add_directed(4, 6)
    p.add_directed(5, 6)
    p.add_bidirected(5, 7)
    p.add_bidirected(6, 7)
    return p


@pytest.fixture
def recovery_pset():
    return make_recovery_pset()


@pytest.fixture
def recovery_pag():
    return make_recovery_pag()


def make_chain_pag():
    """PAG 0 o-> 1 <-> 2 <-> 3 <-> 4 <-o 5 used for the add-adjacency
    worked example (the new adjacency is {1, 4})."""
    p = MixedGraph(6, "PAG")
    p.add_edge(0, 1, CIRCLE, ARROW)
    p.add_bidirected(1, 2)
    p.add_bidirected(2, 3)
    p.add_bidirected(3, 4)
    p.add_edge(4, 5, ARROW, CIRCLE)
    return p


@pytest.fixture
def chain_pag():
    return make_chain_pag()
