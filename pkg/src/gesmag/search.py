"""Greedy score-based search over Markov equivalence classes of MAGs.

The driver starts from the empty PAG and repeats add, delete and turn
phases until a full cycle yields no improvement.  Each phase runs
best-of-sweep greedy steps: every candidate MEC produced by the move
generators is scored once (deduplicated by its arrow-complete mark
pattern) through a representative MAG, and the best strictly-lower score
is accepted.  Tails (rules R5-R10) are oriented only on the final output;
they never affect arrow-complete scoring.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InsufficientSampleError
from .graph import MixedGraph
from .heads import max_head_size
from .imset import EntropyCache, ScoreReport, score_mag
from .moves import add_adjacency, delete_adjacency, turning_moves
from .pag import all_circle_graph, mag_to_pag, pag_to_mag


@dataclass
class SearchConfig:
    max_head_size: int | None = None
    turn: int = 1
    property_kind: str = "refined"
    dim_kind: str = "gaussian"
    estimator: str = "plugin"
    skeleton_restriction: frozenset[tuple[int, int]] | None = None
    branch_cap: int = 256
    path_cap: int = 10_000
    max_sweeps_per_phase: int = 200
    seed: int | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.max_head_size is not None and self.max_head_size < 1:
            raise DomainError("max_head_size must be at least 1")
        if self.turn < 0:
            raise DomainError("turn budget must be nonnegative")
        if self.jobs < 1:
            raise DomainError("jobs must be at least 1")


@dataclass
class SearchResult:
    pag: MixedGraph
    score: ScoreReport
    events: list = field(default_factory=list)
    trajectory: list = field(default_factory=list)
    counters: dict = field(default_factory=dict)

    def report(self) -> dict:
        return {
            "score": self.score.total,
            "saturated": self.score.saturated,
            "penalty": self.score.penalty,
            "dimension": self.score.dimension,
            "trajectory": self.trajectory,
            "counters": self.counters,
            "events": self.events,
        }


class _Scorer:
    """Scores arrow-complete PAGs via a representative MAG, rejecting
    candidates whose representative exceeds the head-size budget."""

    def __init__(self, cache: EntropyCache, cfg: SearchConfig, events: list, counters: dict):
        import threading

        self.cache = cache
        self.cfg = cfg
        self.events = events
        self.counters = counters
        self._lock = threading.Lock()  # counters stay exact under --jobs

    def score(self, q: MixedGraph) -> float | None:
        with self._lock:
            self.counters["scored_candidates"] += 1
        mag = pag_to_mag(q, validate=False)
        cap = self.cfg.max_head_size
        if cap is not None and max_head_size(mag, cap) > cap:
            with self._lock:
                self.counters["head_size_rejections"] += 1
                self.events.append({"event": "head-size-rejection", "cap": cap})
            return None
        report = score_mag(
            mag,
            self.cache,
            property_kind=self.cfg.property_kind,
            dim_kind=self.cfg.dim_kind,
        )
        return report.total


def _candidate_moves(p: MixedGraph, phase: str, cfg: SearchConfig, events: list):
    if phase == "add":
        for i in range(p.n):
            for j in range(i + 1, p.n):
                if p.has_edge(i, j):
                    continue
                if (
                    cfg.skeleton_restriction is not None
                    and (i, j) not in cfg.skeleton_restriction
                ):
                    continue
                yield from add_adjacency(p, i, j, cfg.branch_cap, cfg.path_cap, events)
    elif phase == "delete":
        for i, j in sorted(p.skeleton()):
            yield from delete_adjacency(p, i, j, cfg.branch_cap, cfg.path_cap, events)
    elif phase == "turn":
        yield from turning_moves(p, cfg.turn, cfg.branch_cap, cfg.path_cap, events)
    else:
        raise DomainError(f"unknown phase {phase!r}")


def _phase_sweep(
    p: MixedGraph,
    current_total: float,
    phase: str,
    cfg: SearchConfig,
    scorer: _Scorer,
    events: list,
) -> tuple[MixedGraph, float] | None:
    """One best-improvement sweep; None when no candidate improves.

    With ``cfg.jobs > 1`` the deduplicated candidates are scored on a
    thread pool; the winner (lowest total, then lowest mark pattern) is
    independent of scoring order either way.
    """
    seen: set[tuple] = {p.edge_key()}
    candidates: list[tuple[tuple, MixedGraph]] = []
    for q in _candidate_moves(p, phase, cfg, events):
        key = q.edge_key()
        if key in seen:
            continue
        seen.add(key)
        candidates.append((key, q))
    if cfg.jobs > 1 and len(candidates) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            totals = list(pool.map(lambda kq: scorer.score(kq[1]), candidates))
    else:
        totals = [scorer.score(q) for _key, q in candidates]
    best: tuple[float, tuple, MixedGraph] | None = None
    for (key, q), total in zip(candidates, totals):
        if total is None:
            continue
        if total < current_total and (best is None or (total, key) < (best[0], best[1])):
            best = (total, key, q)
    if best is None:
        return None
    return best[2], best[0]


def gesmag(data: np.ndarray, cfg: SearchConfig | None = None) -> SearchResult:
    """Learn a PAG from data; see the module docstring for the schedule."""
    cfg = cfg or SearchConfig()
    cache = EntropyCache(data, cfg.estimator)
    if cache.N <= cache.n + 2:
        raise InsufficientSampleError("need N > n + 2 samples")
    events: list = []
    counters = {
        "scored_candidates": 0,
        "head_size_rejections": 0,
        "sweeps": 0,
        "accepted_moves": 0,
        "phase_move_counts": {"add": 0, "delete": 0, "turn": 0},
    }
    scorer = _Scorer(cache, cfg, events, counters)
    p = all_circle_graph(cache.n, [])
    p.kind = "PAG"
    current = score_mag(
        pag_to_mag(p, validate=False),
        cache,
        property_kind=cfg.property_kind,
        dim_kind=cfg.dim_kind,
    )
    current_total = current.total
    trajectory = [current_total]
    t0 = time.perf_counter()

    cycle_changed = True
    while cycle_changed:
        cycle_changed = False
        for phase in ("add", "delete", "turn"):
            if phase == "turn" and cfg.turn == 0:
                continue
            for _ in range(cfg.max_sweeps_per_phase):
                counters["sweeps"] += 1
                before = counters["scored_candidates"]
                step = _phase_sweep(p, current_total, phase, cfg, scorer, events)
                counters["phase_move_counts"][phase] += (
                    counters["scored_candidates"] - before
                )
                if step is None:
                    break
                p, current_total = step
                counters["accepted_moves"] += 1
                trajectory.append(current_total)
                events.append({"event": "accept", "phase": phase, "score": current_total})
                cycle_changed = True
            else:
                events.append({"event": "sweep-cap", "phase": phase})

    mag = pag_to_mag(p, validate=False)
    final_pag = mag_to_pag(mag, tails=True)
    final_score = score_mag(
        mag, cache, property_kind=cfg.property_kind, dim_kind=cfg.dim_kind
    )
    counters["runtime_seconds"] = time.perf_counter() - t0
    counters["entropy_cache"] = {"hits": cache.hits, "misses": cache.misses}
    return SearchResult(final_pag, final_score, events, trajectory, counters)


def complexity_probe(
    sizes=(5, 10, 15, 20),
    avg_degree: float = 3.0,
    p_directed: float = 0.6,
    N: int = 2000,
    seed: int = 0,
    cfg: SearchConfig | None = None,
) -> list[dict]:
    """Run the search on simulated inputs of growing size and report
    add+delete move counts and wall time per n."""
    from .simulate import random_admg, sample_data, sem_from_graph

    base = SearchConfig(max_head_size=2, turn=0) if cfg is None else cfg
    rows = []
    rng = np.random.default_rng(seed)
    for n in sizes:
        g = random_admg(n, avg_degree, p_directed, rng)
        sem = sem_from_graph(g, rng)
        data = sample_data(sem, N, rng)
        t0 = time.perf_counter()
        result = gesmag(data, base)
        elapsed = time.perf_counter() - t0
        pm = result.counters["phase_move_counts"]
        rows.append(
            {
                "n": n,
                "add_delete_moves": pm["add"] + pm["delete"],
                "scored_candidates": result.counters["scored_candidates"],
                "runtime_seconds": elapsed,
            }
        )
    return rows
