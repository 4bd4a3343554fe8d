"""Command-line interface.

Subcommands: simulate, learn, score, eval, convert, markov, heads, probe.
Graphs travel in the one-edge-per-line text format, reports as JSON, data
as CSV with a header row.  Exit codes: 0 success, 1 runtime error, 2
usage error.  GESMAG_LOG in {error, info, trace} controls logging.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time

import numpy as np

from . import __version__
from .errors import GesmagError
from .evaluate import metric_report
from .graph import format_graph, parse_graph, project_to_mag, topological_order
from .heads import enumerate_heads, parametrizing_set
from .imset import EntropyCache, score_mag
from .markov import PROPERTY_FUNCS
from .pag import mag_to_pag, pag_to_mag
from .search import SearchConfig, complexity_probe, gesmag
from .simulate import random_admg, sample_data, sem_from_graph

log = logging.getLogger("gesmag")


def _read_csv(path: str) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.size == 0:
        raise GesmagError(f"no data rows in {path}")
    return data


def _write_csv(path: str, data: np.ndarray) -> None:
    header = ",".join(f"X{j}" for j in range(data.shape[1]))
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.10g")


def _read_graph(path: str):
    with open(path) as fh:
        return parse_graph(fh.read())


def _write_graph(path: str, g) -> None:
    with open(path, "w") as fh:
        fh.write(format_graph(g))


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_path: str, args: argparse.Namespace, inputs: list[str], t0: float) -> None:
    manifest = {
        "tool": "gesmag",
        "version": __version__,
        "command": vars(args).copy(),
        "inputs": {p: _sha256(p) for p in inputs if p and os.path.exists(p)},
        "elapsed_seconds": time.perf_counter() - t0,
    }
    manifest["command"].pop("func", None)
    with open(out_path + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, default=str)


def _cmd_simulate(args) -> int:
    t0 = time.perf_counter()
    os.makedirs(args.out_dir, exist_ok=True)
    root = np.random.default_rng(args.seed)
    for k in range(args.reps):
        rng = np.random.default_rng(root.integers(2**63))
        admg = random_admg(args.n, args.avg_degree, args.pd, rng)
        mag = project_to_mag(admg)
        sem = sem_from_graph(admg, rng)
        data = sample_data(sem, args.N, rng)
        gpath = os.path.join(args.out_dir, f"graph_{k}.graph")
        dpath = os.path.join(args.out_dir, f"data_{k}.csv")
        _write_graph(gpath, mag)
        _write_csv(dpath, data)
        _write_manifest(gpath, args, [], t0)
    log.info("wrote %d replications to %s", args.reps, args.out_dir)
    return 0


def _search_config(args) -> SearchConfig:
    skel = None
    if getattr(args, "skeleton", None):
        sg = _read_graph(args.skeleton)
        skel = frozenset(sg.skeleton())
    return SearchConfig(
        max_head_size=args.max_head_size,
        turn=args.turn,
        property_kind=args.property,
        dim_kind=args.dimension,
        estimator=args.estimator,
        skeleton_restriction=skel,
        branch_cap=args.branch_cap,
        seed=args.seed,
        jobs=args.jobs,
    )


def _cmd_learn(args) -> int:
    t0 = time.perf_counter()
    data = _read_csv(args.data)
    result = gesmag(data, _search_config(args))
    _write_graph(args.out, result.pag)
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(result.report(), fh, indent=2, default=str)
    _write_manifest(args.out, args, [args.data, getattr(args, "skeleton", None)], t0)
    print(f"score {result.score.total:.6f} edges {result.pag.num_edges()}")
    return 0


def _cmd_score(args) -> int:
    data = _read_csv(args.data)
    g = _read_graph(args.graph)
    if g.has_circle_marks():
        g = pag_to_mag(g, validate=False)
    cache = EntropyCache(data, args.estimator)
    report = score_mag(g, cache, property_kind=args.property, dim_kind=args.dimension)
    print(json.dumps(report.as_dict(), indent=2))
    return 0


def _flatten_metrics(rep: dict) -> dict:
    row = {"edge_mark_accuracy": rep["edge_mark_accuracy"]}
    for kind, r in rep["edge_type_rates"].items():
        row[f"{kind}_tpr"] = r["tpr"]
        row[f"{kind}_fpr"] = r["fpr"]
    if "log_bic_diff" in rep:
        row["log_bic_diff"] = rep["log_bic_diff"]
    return row


def _cmd_eval_batch(args, t0: float) -> int:
    """Directory convention: est_<k>.graph vs graph_<k>.graph, optional
    data_<k>.csv; one CSV row per replication plus a mean row."""
    import csv as csv_mod
    import re

    rows = []
    for name in sorted(os.listdir(args.batch)):
        m = re.fullmatch(r"est_(\w+)\.graph", name)
        if not m:
            continue
        k = m.group(1)
        truth_path = os.path.join(args.batch, f"graph_{k}.graph")
        if not os.path.exists(truth_path):
            raise GesmagError(f"missing truth graph for replication {k}")
        data_path = os.path.join(args.batch, f"data_{k}.csv")
        data = _read_csv(data_path) if os.path.exists(data_path) else None
        rep = metric_report(
            _read_graph(os.path.join(args.batch, name)), _read_graph(truth_path), data
        )
        rows.append({"rep": k, **_flatten_metrics(rep)})
    if not rows:
        raise GesmagError(f"no est_*.graph files in {args.batch}")
    fields = ["rep"] + [f for f in rows[0] if f != "rep"]
    numeric = [f for f in fields if f != "rep"]
    mean_row = {"rep": "mean"}
    for f in numeric:
        vals = [r[f] for r in rows if r.get(f) is not None]
        mean_row[f] = sum(vals) / len(vals) if vals else None
    with open(args.report, "w", newline="") as fh:
        w = csv_mod.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        for r in rows + [mean_row]:
            w.writerow(r)
    _write_manifest(args.report, args, [], t0)
    print(json.dumps({"replications": len(rows), "mean": mean_row}))
    return 0


def _cmd_eval(args) -> int:
    t0 = time.perf_counter()
    if args.batch:
        return _cmd_eval_batch(args, t0)
    if not args.est or not args.truth:
        raise GesmagError("eval needs --est and --truth (or --batch DIR)")
    est = _read_graph(args.est)
    truth = _read_graph(args.truth)
    data = _read_csv(args.data) if args.data else None
    report = metric_report(est, truth, data)
    with open(args.report, "w") as fh:
        json.dump(report, fh, indent=2, default=str)
    _write_manifest(args.report, args, [args.est, args.truth, args.data], t0)
    print(json.dumps({"edge_mark_accuracy": report["edge_mark_accuracy"]}))
    return 0


def _cmd_convert(args) -> int:
    t0 = time.perf_counter()
    g = _read_graph(args.infile)
    if args.mag_to_pag:
        out = mag_to_pag(g, tails=not args.no_tails)
    elif args.pag_to_mag:
        out = pag_to_mag(g)
    elif args.admg_to_mag:
        out = project_to_mag(g)
    else:
        raise GesmagError("choose one of --mag-to-pag, --pag-to-mag, --admg-to-mag")
    _write_graph(args.out, out)
    _write_manifest(args.out, args, [args.infile], t0)
    return 0


def _cmd_markov(args) -> int:
    g = _read_graph(args.graph)
    order = topological_order(g)
    for st in PROPERTY_FUNCS[args.property](g, order):
        print(json.dumps(st.as_dict()))
    return 0


def _cmd_heads(args) -> int:
    g = _read_graph(args.graph)
    heads = [
        {"head": sorted(H), "tail": sorted(T)}
        for H, T in enumerate_heads(g, args.max_head_size)
    ]
    out = {"heads": heads, "parametrizing_set_size": len(parametrizing_set(g))}
    print(json.dumps(out, indent=2))
    return 0


def _cmd_probe(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    rows = complexity_probe(sizes=sizes, N=args.N, seed=args.seed)
    print(json.dumps(rows, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gesmag", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def scoring_flags(sp):
        sp.add_argument("--estimator", choices=["plugin", "debiased"], default="plugin")
        sp.add_argument("--property", choices=["refined", "local", "pairwise"], default="refined")
        sp.add_argument("--dimension", choices=["gaussian", "pset"], default="gaussian")

    sp = sub.add_parser("simulate", help="generate random MAGs and Gaussian data")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--pd", type=float, default=0.6)
    sp.add_argument("--avg-degree", type=float, default=3.0)
    sp.add_argument("--reps", type=int, default=1)
    sp.add_argument("--N", type=int, default=5000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out-dir", required=True)
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("learn", help="greedy MEC search on CSV data")
    sp.add_argument("--data", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--report")
    sp.add_argument("--max-head-size", type=int, default=None)
    sp.add_argument("--turn", type=int, default=1)
    sp.add_argument("--skeleton")
    sp.add_argument("--branch-cap", type=int, default=256)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=1,
                    help="sweep-level scoring parallelism")
    scoring_flags(sp)
    sp.set_defaults(func=_cmd_learn)

    sp = sub.add_parser("score", help="score one graph against data")
    sp.add_argument("--data", required=True)
    sp.add_argument("--graph", required=True)
    scoring_flags(sp)
    sp.set_defaults(func=_cmd_score)

    sp = sub.add_parser("eval", help="compare an estimated graph to the truth")
    sp.add_argument("--est")
    sp.add_argument("--truth")
    sp.add_argument("--data")
    sp.add_argument("--batch", help="directory of est_<k>.graph / graph_<k>.graph"
                    " / data_<k>.csv replications; emits a CSV of metrics")
    sp.add_argument("--report", required=True)
    sp.set_defaults(func=_cmd_eval)

    sp = sub.add_parser("convert", help="convert between graph kinds")
    sp.add_argument("--mag-to-pag", action="store_true")
    sp.add_argument("--pag-to-mag", action="store_true")
    sp.add_argument("--admg-to-mag", action="store_true")
    sp.add_argument("--no-tails", action="store_true")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_convert)

    sp = sub.add_parser("markov", help="print the CI list of a MAG as JSON lines")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--property", choices=["refined", "local", "pairwise"], default="refined")
    sp.set_defaults(func=_cmd_markov)

    sp = sub.add_parser("heads", help="print heads and tails as JSON")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--max-head-size", type=int, default=None)
    sp.set_defaults(func=_cmd_heads)

    sp = sub.add_parser("probe", help="empirical complexity scaling of the search")
    sp.add_argument("--sizes", default="5,10,15,20")
    sp.add_argument("--N", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=_cmd_probe)
    return ap


def main(argv: list[str] | None = None) -> int:
    levels = {"error": logging.ERROR, "info": logging.INFO, "trace": logging.DEBUG}
    logging.basicConfig(level=levels.get(os.environ.get("GESMAG_LOG", "error"), logging.ERROR))
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except GesmagError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
