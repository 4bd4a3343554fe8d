"""Heads, tails, parametrizing sets and Markov equivalence."""

from itertools import combinations

import numpy as np
import pytest

from gesmag.errors import DomainError
from gesmag.graph import MixedGraph
from gesmag.heads import (
    barren,
    enumerate_heads,
    in_parametrizing_set,
    is_head,
    markov_equivalent,
    max_head_size,
    parametrizing_set,
    restricted_parametrizing_set,
    tail,
)

from conftest import make_recovery_pset
from oracles import head_oracle, pset_oracle, random_mag, separation_model


def test_barren(dense_mag):
    assert barren(dense_mag, {0, 1, 2, 3}) == {2, 3}
    assert barren(dense_mag, {0, 1}) == {0, 1}
    assert barren(dense_mag, {1, 2}) == {2}


def test_heads_and_tails_enumeration(dense_mag):
    got = {H: T for H, T in enumerate_heads(dense_mag)}
    expected = {
        frozenset({0}): frozenset(),
        frozenset({1}): frozenset(),
        frozenset({2}): frozenset({1}),
        frozenset({3}): frozenset({0}),
        frozenset({0, 1}): frozenset(),
        frozenset({1, 3}): frozenset({0}),
        frozenset({2, 3}): frozenset({0, 1}),
    }
    assert got == expected
    assert max_head_size(dense_mag) == 2


def test_max_head_size_cap_saturates():
    # 3-chain of bidirected edges has a head of size 3
    g = MixedGraph(3, "MAG")
    g.add_bidirected(0, 1)
    g.add_bidirected(1, 2)
    assert max_head_size(g) == 3
    assert max_head_size(g, 2) == 3  # examines cap + 1 and saturates there
    assert max_head_size(g, 1) == 2


def test_head_oracle_agreement_randomized():
    rng = np.random.default_rng(21)
    for _ in range(80):
        g = random_mag(rng)
        for r in range(1, g.n + 1):
            for W in combinations(range(g.n), r):
                assert is_head(g, frozenset(W)) == head_oracle(g, W)


def test_parametrizing_set_oracle_agreement_randomized():
    rng = np.random.default_rng(22)
    for _ in range(40):
        g = random_mag(rng, n_hi=5)
        po = pset_oracle(g)
        assert parametrizing_set(g) == po
        for r in range(1, g.n + 1):
            for W in combinations(range(g.n), r):
                assert in_parametrizing_set(g, frozenset(W)) == (frozenset(W) in po)


def test_restricted_parametrizing_set(recovery_pag, recovery_pset):
    from gesmag.pag import pag_to_mag

    mag = pag_to_mag(recovery_pag)
    got = restricted_parametrizing_set(mag, 3, reduced=True)
    table = frozenset(W for W in recovery_pset if len(W) >= 2)
    assert got == table
    # non-reduced S_3 additionally keeps triples spanning three adjacencies
    full3 = restricted_parametrizing_set(mag, 3, reduced=False)
    assert got <= full3
    with pytest.raises(DomainError):
        restricted_parametrizing_set(mag, 1)


def test_markov_equivalence_basic():
    # 0 -> 1 and 0 -- 1 and 0 <-> 1 are all saturated on two vertices
    a = MixedGraph(2, "MAG"); a.add_directed(0, 1)
    b = MixedGraph(2, "MAG"); b.add_undirected(0, 1)
    c = MixedGraph(2, "MAG"); c.add_bidirected(0, 1)
    assert markov_equivalent(a, b)
    assert markov_equivalent(a, c)
    # colliders distinguish: 0 -> 1 <- 2 vs 0 -> 1 -> 2
    col = MixedGraph(3, "MAG"); col.add_directed(0, 1); col.add_directed(2, 1)
    chain = MixedGraph(3, "MAG"); chain.add_directed(0, 1); chain.add_directed(1, 2)
    assert not markov_equivalent(col, chain)
    with pytest.raises(DomainError):
        markov_equivalent(a, col)


def test_markov_equivalence_matches_model_equality():
    rng = np.random.default_rng(23)
    mags = [random_mag(rng, n_lo=4, n_hi=4) for _ in range(40)]
    models = [separation_model(g) for g in mags]
    agree = 0
    for i in range(len(mags)):
        for j in range(i + 1, len(mags)):
            assert markov_equivalent(mags[i], mags[j]) == (models[i] == models[j])
            agree += models[i] == models[j]
    assert agree > 0  # the corpus contains genuinely equivalent pairs
