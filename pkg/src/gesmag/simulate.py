"""Random ADMG generation and linear Gaussian sampling.

A random ADMG draws a uniformly random vertex order, a uniform edge set
of size round(n * avg_degree / 2), and directs each edge along the order
with probability p_directed (bidirected otherwise), so the result is
acyclic by construction.  The linear SEM is X = B^T X + eps with
eps ~ N(0, Omega), giving Sigma = (I - B)^{-T} Omega (I - B)^{-1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DomainError
from .graph import ARROW, TAIL, MixedGraph, project_to_mag
from .heads import max_head_size


def random_admg(
    n: int,
    avg_degree: float,
    p_directed: float,
    rng: np.random.Generator,
) -> MixedGraph:
    """Random ADMG with round(n * avg_degree / 2) edges."""
    m = int(round(n * avg_degree / 2.0))
    pairs = list(combinations(range(n), 2))
    if m > len(pairs) or m < 0:
        raise DomainError(f"cannot place {m} edges on {n} vertices")
    if not 0.0 < p_directed <= 1.0:
        raise DomainError("p_directed must be in (0, 1]")
    order = rng.permutation(n)
    pos = {int(v): i for i, v in enumerate(order)}
    chosen = rng.choice(len(pairs), size=m, replace=False)
    g = MixedGraph(n, "ADMG")
    for idx in sorted(chosen):
        a, b = pairs[idx]
        if pos[a] > pos[b]:
            a, b = b, a
        if rng.random() < p_directed:
            g.add_directed(a, b)
        else:
            g.add_bidirected(a, b)
    return g


@dataclass
class LinearGaussianSEM:
    graph: MixedGraph
    B: np.ndarray  # B[p, c] is the coefficient on p -> c
    Omega: np.ndarray  # noise covariance; off-diagonal iff bidirected

    def implied_covariance(self) -> np.ndarray:
        n = self.graph.n
        inv = np.linalg.inv(np.eye(n) - self.B)
        return inv.T @ self.Omega @ inv


def _draw_coef(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(rng.uniform(lo, hi) * rng.choice([-1.0, 1.0]))


def sem_from_graph(
    g: MixedGraph,
    rng: np.random.Generator,
    coef_range: tuple[float, float] = (0.1, 1.0),
) -> LinearGaussianSEM:
    """Coefficients for directed edges and bidirected noise covariances
    drawn uniformly from +-[lo, hi]; the Omega diagonal is made dominant
    (1 + row sum of absolute off-diagonals) to force positive
    definiteness."""
    lo, hi = coef_range
    if lo <= 0 or hi < lo:
        raise DomainError("coefficient range must satisfy 0 < lo <= hi")
    n = g.n
    B = np.zeros((n, n))
    Omega = np.zeros((n, n))
    for a, b, ma, mb in g.edges():
        if (ma, mb) == (TAIL, ARROW):
            B[a, b] = _draw_coef(rng, lo, hi)
        elif (ma, mb) == (ARROW, TAIL):
            B[b, a] = _draw_coef(rng, lo, hi)
        elif (ma, mb) == (ARROW, ARROW):
            w = _draw_coef(rng, lo, hi)
            Omega[a, b] = Omega[b, a] = w
        else:
            raise DomainError("SEM generation needs a directed mixed graph")
    for v in range(n):
        Omega[v, v] = 1.0 + float(np.sum(np.abs(Omega[v, :])))
    return LinearGaussianSEM(g, B, Omega)


def sample_data(sem: LinearGaussianSEM, N: int, rng: np.random.Generator) -> np.ndarray:
    """N rows from N(0, (I - B)^{-T} Omega (I - B)^{-1})."""
    n = sem.graph.n
    chol = np.linalg.cholesky(sem.Omega)
    eps = rng.standard_normal((N, n)) @ chol.T
    inv = np.linalg.inv(np.eye(n) - sem.B)
    return eps @ inv


def head_size_histogram(
    ns, p_directeds, reps: int, avg_degree: float = 3.0, seed: int = 0
) -> dict[tuple[int, float], dict[int, int]]:
    """Distribution of the maximal head size of projected MAGs per
    (n, p_directed) cell."""
    out: dict[tuple[int, float], dict[int, int]] = {}
    root = np.random.default_rng(seed)
    for n in ns:
        for pd in p_directeds:
            rng = np.random.default_rng(root.integers(2**63))
            hist: dict[int, int] = {}
            for _ in range(reps):
                mag = project_to_mag(random_admg(n, avg_degree, pd, rng))
                k = max_head_size(mag)
                hist[k] = hist.get(k, 0) + 1
            out[(n, pd)] = dict(sorted(hist.items()))
    return out
