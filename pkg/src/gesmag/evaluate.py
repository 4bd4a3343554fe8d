"""Evaluation: structural metrics between an estimated and a true graph,
maximum-likelihood fitting of Gaussian MAG models by residual iterative
conditional fitting (RICF), and the signed log BIC difference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .graph import ARROW, CIRCLE, TAIL, MixedGraph, directify_undirected
from .imset import model_dimension
from .pag import pag_to_mag


def edge_mark_accuracy(est: MixedGraph, truth: MixedGraph) -> float:
    """Fraction of matching endpoint marks over shared adjacencies; the
    divisor is twice the number of edges present in either graph."""
    if est.n != truth.n:
        raise DomainError("graphs must share a vertex set")
    union = est.skeleton() | truth.skeleton()
    if not union:
        return 1.0
    correct = 0
    for a, b in est.skeleton() & truth.skeleton():
        if est.mark(a, b) == truth.mark(a, b):
            correct += 1
        if est.mark(b, a) == truth.mark(b, a):
            correct += 1
    return correct / (2 * len(union))


_EDGE_TYPES = ("adjacency", "directed", "bidirected", "circle_arrow", "circle_circle")


def _edge_instances(g: MixedGraph, kind: str) -> set[tuple[int, int]]:
    out = set()
    for a, b, ma, mb in g.edges():
        if kind == "adjacency":
            out.add((a, b))
        elif kind == "directed":
            if (ma, mb) == (TAIL, ARROW):
                out.add((a, b))
            elif (ma, mb) == (ARROW, TAIL):
                out.add((b, a))
        elif kind == "bidirected":
            if (ma, mb) == (ARROW, ARROW):
                out.add((a, b))
        elif kind == "circle_arrow":
            if (ma, mb) == (CIRCLE, ARROW):
                out.add((a, b))
            elif (ma, mb) == (ARROW, CIRCLE):
                out.add((b, a))
        elif kind == "circle_circle":
            if (ma, mb) == (CIRCLE, CIRCLE):
                out.add((a, b))
    return out


def _universe_size(n: int, kind: str) -> int:
    pairs = n * (n - 1) // 2
    return n * (n - 1) if kind in ("directed", "circle_arrow") else pairs


def edge_type_rates(est: MixedGraph, truth: MixedGraph) -> dict[str, dict]:
    """Per-edge-type confusion counts with TPR/FPR; undefined rates are
    reported as None, not zero."""
    if est.n != truth.n:
        raise DomainError("graphs must share a vertex set")
    out = {}
    for kind in _EDGE_TYPES:
        e, t = _edge_instances(est, kind), _edge_instances(truth, kind)
        universe = _universe_size(est.n, kind)
        tp = len(e & t)
        fp = len(e - t)
        fn = len(t - e)
        tn = universe - tp - fp - fn
        out[kind] = {
            "tp": tp,
            "fp": fp,
            "fn": fn,
            "tn": tn,
            "tpr": tp / len(t) if t else None,
            "fpr": fp / (universe - len(t)) if universe > len(t) else None,
        }
    return out


@dataclass
class GaussianFit:
    B: np.ndarray
    Omega: np.ndarray
    loglik: float
    iterations: int
    converged: bool


def gaussian_loglik(B: np.ndarray, Omega: np.ndarray, S: np.ndarray, N: int) -> float:
    n = S.shape[0]
    imb = np.eye(n) - B
    sigma = np.linalg.inv(imb).T @ Omega @ np.linalg.inv(imb)
    sign, logdet = np.linalg.slogdet(sigma)
    if sign <= 0:
        raise DomainError("model covariance is not positive definite")
    return -0.5 * N * (n * np.log(2 * np.pi) + logdet + float(np.trace(np.linalg.solve(sigma, S))))


def ricf_fit(
    g: MixedGraph,
    data: np.ndarray,
    tol: float = 1e-8,
    max_iter: int = 500,
) -> GaussianFit:
    """Maximum-likelihood B, Omega for the Gaussian model of MAG g.

    Block-coordinate ascent: each step regresses one vertex on its
    parents and on pseudo-variables built from its siblings' residuals;
    the log-likelihood is nondecreasing across sweeps.  Uses the MLE
    (1/N) sample covariance.
    """
    g = directify_undirected(g)
    data = np.asarray(data, dtype=float)
    N, n = data.shape
    if n != g.n:
        raise DomainError("data and graph dimensions differ")
    centered = data - data.mean(axis=0)
    S = centered.T @ centered / N
    B = np.zeros((n, n))
    Omega = np.diag(np.diag(S)).astype(float)
    ll_prev = -np.inf
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        max_delta = 0.0
        for i in range(n):
            pa = sorted(g.parents(i))
            sp = sorted(g.siblings(i))
            rest = [v for v in range(n) if v != i]
            if not pa and not sp:
                delta = abs(Omega[i, i] - S[i, i])
                Omega[i, i] = S[i, i]
                max_delta = max(max_delta, delta)
                continue
            # covariance algebra: eps = (I - B)^T X, Z = Omega_{-i,-i}^{-1} eps_{-i}
            imb = np.eye(n) - B
            cov_x_eps = S @ imb  # Cov(X, eps)
            cov_ee = imb.T @ S @ imb  # Cov(eps, eps)
            A = np.linalg.inv(Omega[np.ix_(rest, rest)])
            sp_pos = [rest.index(v) for v in sp]
            # regressor covariance matrix M over [X_pa, Z_sp] and the
            # cross-covariance vector with X_i
            dim = len(pa) + len(sp)
            M = np.zeros((dim, dim))
            cvec = np.zeros(dim)
            if pa:
                M[: len(pa), : len(pa)] = S[np.ix_(pa, pa)]
                cvec[: len(pa)] = S[i, pa]
            if sp:
                x_z = cov_x_eps[:, rest] @ A  # Cov(X, Z)
                z_z = (A @ cov_ee[np.ix_(rest, rest)] @ A)[np.ix_(sp_pos, sp_pos)]
                M[len(pa):, len(pa):] = z_z
                cvec[len(pa):] = x_z[i, sp_pos]
                if pa:
                    M[: len(pa), len(pa):] = x_z[np.ix_(pa, sp_pos)]
                    M[len(pa):, : len(pa)] = M[: len(pa), len(pa):].T
            gamma = np.linalg.solve(M, cvec)
            lam = float(S[i, i] - cvec @ gamma)
            new_b = np.zeros(n)
            new_b[pa] = gamma[: len(pa)]
            max_delta = max(max_delta, float(np.max(np.abs(new_b - B[:, i]))))
            B[:, i] = new_b
            new_om_row = np.zeros(n)
            if sp:
                new_om_row[sp] = gamma[len(pa):]
            old_row = Omega[i, :].copy()
            Omega[i, rest] = new_om_row[rest]
            Omega[rest, i] = new_om_row[rest]
            if sp:
                Asp = A[np.ix_(sp_pos, sp_pos)]
                corr = float(gamma[len(pa):] @ Asp @ gamma[len(pa):])
            else:
                corr = 0.0
            new_oii = lam + corr
            Omega[i, i] = new_oii
            max_delta = max(max_delta, float(np.max(np.abs(Omega[i, :] - old_row))))
        ll = gaussian_loglik(B, Omega, S, N)
        if ll < ll_prev - 1e-6 * (1 + abs(ll_prev)):
            raise DomainError("likelihood decreased during fitting")
        ll_prev = ll
        if max_delta < tol:
            converged = True
            break
    return GaussianFit(B, Omega, ll_prev, it, converged)


def bic(g: MixedGraph, data: np.ndarray, dim_kind: str = "gaussian") -> float:
    fit = ricf_fit(g, data)
    N = data.shape[0]
    return -2.0 * fit.loglik + model_dimension(g, dim_kind) * np.log(N)


def bic_diff(
    est_pag: MixedGraph,
    truth: MixedGraph,
    data: np.ndarray,
    dim_kind: str = "gaussian",
) -> float:
    """sign(BIC_est - BIC_true) * log(|difference| + 1); positive when the
    estimated model fits worse."""
    est_mag = pag_to_mag(est_pag, validate=False) if est_pag.has_circle_marks() else est_pag
    true_mag = pag_to_mag(truth, validate=False) if truth.has_circle_marks() else truth
    delta = bic(est_mag, data, dim_kind) - bic(true_mag, data, dim_kind)
    return float(np.sign(delta) * np.log(abs(delta) + 1.0))


def metric_report(
    est: MixedGraph,
    truth: MixedGraph,
    data: np.ndarray | None = None,
    dim_kind: str = "gaussian",
) -> dict:
    report = {
        "edge_mark_accuracy": edge_mark_accuracy(est, truth),
        "edge_type_rates": edge_type_rates(est, truth),
    }
    if data is not None:
        report["log_bic_diff"] = bic_diff(est, truth, data, dim_kind)
    return report
