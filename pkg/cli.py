#!/usr/bin/env python3
"""
Spectral Gap Lab — Command Line
===============================

Front end for every library operation plus the desk-scale scan of
Poincaré constants of random regular graphs against random regular
hosts.  Every subcommand writes one JSON document (to stdout or --out)
with the active caps echoed under "config"; progress goes to stderr.

Exit codes:
    0   success / check passed
    1   error (bad input file, cap exceeded, solver failure)
    2   a verdict failed (property, sandwich, certificate)
    64  usage error

Usage:
    ./cli.py gen -n 10 -d 3 --seed 7 --out g.json
    ./cli.py gamma brute --graph g.json --host h.json -p 1
    ./cli.py gamma search --graph g.json --host h.json --restarts 50 --seed 1
    ./cli.py check-d --graph g.json --alpha 0.05
    ./cli.py trace --graph g.json --host h.json --map f.json --eps 0.1 --seed 3
    ./cli.py scan --d 3 --delta 3 --sizes 6,8,10 --seed 1 --csv scan.csv
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
import pandas as pd

from approximator import (approximator_spread, build_universal_approximator,
                          ln_universal_factor, quotient_identity_check, two_sided_check)
from compression import compress, compression_trace, decompose, dyadic
from config import DEFAULT_CAPS, Caps, worker_count
from constants import constants_table, ln_gamma
from cut_embed import metric_from_points, min_l1_distortion, verify_embedding
from errors import DegenerateError, ResourceError, SglError
from graph_core import (Graph, MetricMatrix, all_pairs_distances, derive_seed,
                        enumerate_regular_graphs, load_graph, load_multigraph, metric_summary,
                        sample_regular_graph, save_multigraph)
from poincare import (VertexMap, distortion_lower_bound, gamma_bruteforce, gamma_local_search,
                      gamma_upper_certificate, min_distortion_bruteforce)
from regularity_properties import (check_property_D, check_property_R, edge_density_check,
                                   max_alpha)
from spectral import adjacency_spectrum, cheeger_cut, cheeger_sandwich_check, classical_gamma


EXIT_OK, EXIT_ERROR, EXIT_FAIL, EXIT_USAGE = 0, 1, 2, 64

_QUIET = False


def log(msg: str) -> None:
    if not _QUIET:
        print(msg, file=sys.stderr)


class UsageParser(argparse.ArgumentParser):
    """ArgumentParser that exits 64 on usage errors."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class MissingSeed(Exception):
    """A randomized step was reached without an explicit --seed."""


# ---------------------------------------------------------------------------
#  JSON helpers
# ---------------------------------------------------------------------------

def jsonable(obj: Any) -> Any:
    """Plain JSON types; infinities become "inf"/"-inf"."""
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(v) for v in items]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    return obj


def emit(doc: dict[str, Any], args: argparse.Namespace, caps: Caps) -> None:
    doc = dict(doc)
    doc["config"] = caps.to_dict()
    text = json.dumps(jsonable(doc), indent=2)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        log(f"  [out] wrote {args.out}")
    else:
        print(text)


def load_host(path: str) -> tuple[Graph | None, MetricMatrix]:
    """A host file is either a graph ({"n", "edges"}) or a metric ({"dist"})."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if "dist" in data:
        return None, MetricMatrix(np.array(data["dist"], dtype=float))
    g = Graph.from_dict(data)
    return g, all_pairs_distances(g)


def load_map(args: argparse.Namespace, m: int | None = None) -> VertexMap:
    if args.values:
        values = [int(x) for x in args.values.split(",")]
        return VertexMap.of(values, m if m is not None else max(values) + 1)
    with open(args.map, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return VertexMap(int(data["n"]), int(data.get("m", m or 0)), tuple(data["values"]))


def parse_ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


# ---------------------------------------------------------------------------
#  Scan
# ---------------------------------------------------------------------------

@dataclass
class ExperimentRecord:
    n: int
    m: int
    d: int
    delta: int
    p: float
    seed: int
    trial: int
    mode: str                             # brute | search
    lower: float = 0.0
    upper: float | None = None
    exact: bool = False
    witness: list[int] = field(default_factory=list)
    graph_seed: int = 0
    host_seed: int = 0
    properties: dict[str, Any] = field(default_factory=dict)
    ln_gamma: float = 0.0
    wall_time: float = 0.0
    notes: list[str] = field(default_factory=list)

    @property
    def sandwich(self) -> bool:
        return self.upper is None or self.lower <= self.upper + 1e-6

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n, "m": self.m, "d": self.d, "delta": self.delta, "p": self.p,
            "seed": self.seed, "trial": self.trial,
            "graph_seed": self.graph_seed, "host_seed": self.host_seed,
            "mode": self.mode,
            "lower": self.lower, "upper": self.upper, "exact": self.exact,
            "sandwich": self.sandwich,
            "witness": self.witness,
            "properties": self.properties,
            "ln_Gamma": self.ln_gamma,
            "wall_time": round(self.wall_time, 3),
            "notes": self.notes,
        }

    def row(self) -> dict[str, Any]:
        return {
            "n": self.n, "m": self.m, "d": self.d, "delta": self.delta, "p": self.p,
            "trial": self.trial, "mode": self.mode,
            "lower": self.lower,
            "upper": self.upper if self.upper is not None else float("nan"),
            "exact": self.exact,
            "lambda2": self.properties.get("lambda2", float("nan")),
            "wall_time": self.wall_time,
        }


def _scan_trial(job: tuple[int, int, int, int, int, float, int, Caps]) -> ExperimentRecord:
    size, trial, d, delta, seed, p, restarts, caps = job
    start = time.time()
    trial_seed = derive_seed(seed, size, trial)
    rec = ExperimentRecord(n=size, m=size, d=d, delta=delta, p=p, seed=seed, trial=trial,
                           mode="brute", ln_gamma=ln_gamma(d, p),
                           graph_seed=derive_seed(trial_seed, 0),
                           host_seed=derive_seed(trial_seed, 1))
    G = sample_regular_graph(size, d, rec.graph_seed)
    H = sample_regular_graph(size, delta, rec.host_seed)
    host = all_pairs_distances(H)
    if not host.is_finite:
        rec.notes.append("host disconnected: gamma is infinite")
        rec.mode, rec.lower = "none", math.inf
        rec.wall_time = time.time() - start
        return rec

    maps = float(size) ** size
    if maps <= caps.brute_map_cap:
        est = gamma_bruteforce(G, host, p, caps)
        rec.exact = True
    else:
        rec.mode = "search"
        rec.notes.append(f"brute {size}^{size} maps exceed {caps.brute_map_cap}; local search")
        est = gamma_local_search(G, host, p, restarts=restarts, seed=trial_seed)
    rec.lower = est.lower
    rec.witness = list(est.witness.values) if est.witness else []

    if p != 1:
        rec.notes.append("certificate covers p = 1 only")
    elif size <= caps.lp_point_cap:
        try:
            rec.upper = gamma_upper_certificate(G, H, caps=caps).upper
        except DegenerateError as exc:
            rec.notes.append(f"no certificate: {exc}")
    else:
        rec.notes.append(f"no certificate: m = {size} exceeds LP cap {caps.lp_point_cap}")

    spec = adjacency_spectrum(G, caps=caps)
    rec.properties = {
        "lambda2": spec.lambda2,
        "ramanujan_like": spec.lambda2 <= 2.1 * math.sqrt(d - 1),
    }
    if size <= caps.property_exact_cap:
        rec.properties["max_alpha"] = max_alpha(G, caps)
    rec.wall_time = time.time() - start
    return rec


def kleinberg_scan(d: int, delta: int, sizes: Sequence[int], trials: int = 1, seed: int = 0,
                   p: float = 1.0, restarts: int = 50, caps: Caps = DEFAULT_CAPS,
                   workers: int | None = None) -> list[ExperimentRecord]:
    """gamma(G, dist_H^p) for G in G(n, d), H in G(n, delta) at each size.

    Trials get seeds derived from (seed, size, trial) and are returned in
    (size, trial) order whatever the worker schedule.
    """
    jobs = [(n, t, d, delta, seed, p, restarts, caps) for n in sizes for t in range(trials)]
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_scan_trial, jobs))
    else:
        records = [_scan_trial(job) for job in jobs]
    for rec in records:
        log(f"  [scan] n={rec.n} trial {rec.trial} {rec.mode:<6} "
            f"lower={rec.lower:.6f} upper={rec.upper if rec.upper is not None else '-'} "
            f"({rec.wall_time:.1f}s)")
    return records


def scan_summary(records: Sequence[ExperimentRecord]) -> dict[str, Any]:
    by_size: dict[int, float] = {}
    for rec in records:
        by_size[rec.n] = max(by_size.get(rec.n, -math.inf), rec.lower)
    return {
        "max_lower_by_size": {str(n): v for n, v in sorted(by_size.items())},
        "max_lower": max(by_size.values()) if by_size else None,
        "sandwich_ok": all(r.sandwich for r in records),
    }


def scan_frame(records: Sequence[ExperimentRecord]) -> pd.DataFrame:
    return pd.DataFrame([r.row() for r in records])


# ---------------------------------------------------------------------------
#  Subcommands
# ---------------------------------------------------------------------------

def cmd_gen(args, caps):
    g = sample_regular_graph(args.n, args.d, args.seed)
    log(f"  [gen] G({args.n},{args.d}) seed {args.seed}: {g.num_edges} edges")
    emit(g.to_dict(), args, caps)
    return EXIT_OK


def cmd_enum(args, caps):
    graphs = enumerate_regular_graphs(args.n, args.d, caps)
    doc: dict[str, Any] = {"n": args.n, "d": args.d, "count": len(graphs)}
    if not args.count_only:
        doc["graphs"] = [g.to_dict()["edges"] for g in graphs]
    emit(doc, args, caps)
    return EXIT_OK


def cmd_metric(args, caps):
    g = load_graph(args.graph)
    emit({"summary": metric_summary(g), "dist": all_pairs_distances(g).dist}, args, caps)
    return EXIT_OK


def cmd_spectrum(args, caps):
    g = load_graph(args.graph)
    spec = adjacency_spectrum(g, caps=caps)
    doc: dict[str, Any] = {"spectrum": spec, "lambda2": spec.lambda2}
    if g.degree is not None:
        try:
            doc["classical_gamma"] = classical_gamma(g, caps)
        except DegenerateError as exc:
            doc["classical_gamma"] = math.inf
            doc["notes"] = [str(exc)]
    emit(doc, args, caps)
    return EXIT_OK


def cmd_cheeger(args, caps):
    g = load_graph(args.graph)
    cut = cheeger_cut(g, caps)
    doc: dict[str, Any] = {"cut": cut}
    ok = True
    if g.degree is not None:
        sandwich = cheeger_sandwich_check(g, caps)
        doc["sandwich"] = sandwich
        ok = sandwich.passed
    emit(doc, args, caps)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_gamma(args, caps):
    g = load_graph(args.graph)
    host_graph, host = load_host(args.host)
    if args.method == "brute":
        est = gamma_bruteforce(g, host, args.p, caps, start=args.start, stop=args.stop)
    elif args.method == "search":
        est = gamma_local_search(g, host, args.p, restarts=args.restarts, seed=args.seed)
    else:
        if host_graph is None:
            raise SglError("gamma certify needs a host graph, not a bare metric")
        est = gamma_upper_certificate(g, host_graph, eps=args.eps, caps=caps)
        emit({"gamma_upper": est.upper, "estimate": est}, args, caps)
        return EXIT_OK
    log(f"  [gamma] {est.provenance}: {est.lower:.9f} ({est.evaluated} evaluated)")
    emit({"gamma": est.lower, "estimate": est}, args, caps)
    return EXIT_OK


def cmd_distort(args, caps):
    if args.method == "lp":
        if args.points:
            with open(args.points, "r", encoding="utf-8") as fh:
                M = metric_from_points(json.load(fh))
        else:
            _, M = load_host(args.graph)
        D, emb = min_l1_distortion(M, caps)
        check = verify_embedding(M, emb, caps.certificate_tol)
        emit({"distortion": D, "certificate": emb, "verified": bool(check),
              "violation": {"pair": check.pair, "side": check.side} if not check else None},
             args, caps)
        return EXIT_OK if check else EXIT_FAIL
    g = load_graph(args.graph)
    if args.method == "brute":
        emit({"distortion": min_distortion_bruteforce(g, load_graph(args.host), caps)}, args, caps)
    else:
        emit({"distortion_lower_bound": distortion_lower_bound(g, args.gamma_upper)}, args, caps)
    return EXIT_OK


@contextmanager
def _seed_hint(args: argparse.Namespace, caps: Caps):
    """Turn a capped exact subset scan run without --seed into a usage error."""
    try:
        yield
    except ResourceError as exc:
        if args.seed is None and args.mode == "exact" and exc.cap == caps.subset_scan_cap:
            raise MissingSeed(f"{exc}; pass --seed to sample instead") from exc
        raise


def cmd_check_d(args, caps):
    g = load_graph(args.graph)
    report = check_property_D(g, args.alpha, mode=args.mode, seed=args.seed,
                              samples=args.samples, caps=caps)
    emit({"report": report}, args, caps)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_check_r(args, caps):
    h = load_graph(args.graph)
    with _seed_hint(args, caps):
        report = check_property_R(h, args.eps, size_cap=args.size_cap, mode=args.mode,
                                  seed=args.seed, samples=args.samples, caps=caps)
    emit({"report": report}, args, caps)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_edge_density(args, caps):
    h = load_graph(args.graph)
    subsets = None
    if args.subsets:
        with open(args.subsets, "r", encoding="utf-8") as fh:
            subsets = json.load(fh)
    with _seed_hint(args, caps):
        report = edge_density_check(h, args.eps, subsets=subsets, size_cap=args.size_cap,
                                    mode=args.mode, seed=args.seed, samples=args.samples,
                                    caps=caps)
    emit({"report": report}, args, caps)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_decompose(args, caps):
    f = load_map(args, args.m)
    emit({"decomposition": decompose(f, args.m, args.eps, caps),
          "dyadic": dyadic(f, args.m, args.eps, caps)}, args, caps)
    return EXIT_OK


def cmd_compress(args, caps):
    f = load_map(args, args.m)
    dy = dyadic(f, args.m, args.eps, caps)
    F, pivot = compress(f, dy, args.seed)
    emit({"dyadic": dy, "pivot": pivot, "compressed": F}, args, caps)
    return EXIT_OK


def cmd_trace(args, caps):
    g = load_graph(args.graph)
    h = load_graph(args.host)
    f = load_map(args, h.n)
    trace = compression_trace(g, h, f, args.eps, alpha=args.alpha, seed=args.seed, caps=caps)
    emit({"trace": trace}, args, caps)
    return EXIT_OK


def cmd_approx(args, caps):
    if args.action == "build":
        g = load_graph(args.graph)
        U, pairing = build_universal_approximator(g, seed=args.pairing_seed)
        if args.multigraph_out:
            save_multigraph(args.multigraph_out, U)
        emit({"multigraph": U, "pairing": pairing, "edges": U.num_edges}, args, caps)
        return EXIT_OK
    U = load_multigraph(args.multigraph)
    _, M = load_host(args.host)
    if args.action == "spread":
        if args.seed is None and M.k ** U.k > caps.tuple_enum_cap:
            raise MissingSeed(f"approx spread samples tuples when {M.k}^{U.k} > "
                              f"{caps.tuple_enum_cap} and requires --seed")
        ln_D = math.log(args.D) if args.D else ln_universal_factor(args.p)
        report = approximator_spread(U, M, args.p, trials=args.trials, seed=args.seed,
                                     ln_D=ln_D, caps=caps)
        emit({"report": report}, args, caps)
        return EXIT_OK if report.verdict else EXIT_FAIL
    points = parse_ints(args.points)
    doc: dict[str, Any] = {}
    ok = True
    if args.source:
        g = load_graph(args.source)
        pairing = [tuple(pair) for pair in json.loads(args.pairing)] if args.pairing else \
            [(2 * i, 2 * i + 1) for i in range(U.k)]
        doc["quotient_identity"] = quotient_identity_check(g, U, pairing, points, M, args.p)
    if args.s is not None and args.D is not None:
        check = two_sided_check(U, M, args.p, args.D, args.s, points)
        doc["two_sided"] = check
        ok = check.passed
    emit(doc, args, caps)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_constants(args, caps):
    table = constants_table(args.d, args.eps, alpha=args.alpha, p=args.p,
                            m=args.m, delta=args.delta, caps=caps)
    emit({"constants": table}, args, caps)
    return EXIT_OK


def cmd_scan(args, caps):
    sizes = parse_ints(args.sizes)
    log(f"  [scan] d={args.d} delta={args.delta} sizes={sizes} trials={args.trials} "
        f"workers={worker_count()}")
    records = kleinberg_scan(args.d, args.delta, sizes, trials=args.trials, seed=args.seed,
                             p=args.p, restarts=args.restarts, caps=caps)
    if args.csv:
        os.makedirs(os.path.dirname(os.path.abspath(args.csv)), exist_ok=True)
        scan_frame(records).to_csv(args.csv, index=False)
        log(f"  [scan] table -> {args.csv}")
    summary = scan_summary(records)
    emit({"records": records, "summary": summary}, args, caps)
    return EXIT_OK if summary["sandwich_ok"] else EXIT_FAIL


# ---------------------------------------------------------------------------
#  Parser
# ---------------------------------------------------------------------------

def build_parser() -> UsageParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--quiet", action="store_true", help="no progress on stderr")

    parser = UsageParser(description="Spectral Gap Lab — nonlinear Poincaré constants "
                                     "of random regular graphs")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=UsageParser)

    p = sub.add_parser("gen", parents=[common], help="sample G(n, d)")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-d", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("enum", parents=[common], help="enumerate labeled d-regular graphs")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-d", type=int, required=True)
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(func=cmd_enum)

    for name, func, text in (("metric", cmd_metric, "all-pairs distances"),
                             ("spectrum", cmd_spectrum, "adjacency spectrum"),
                             ("cheeger", cmd_cheeger, "exact Cheeger constant")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--graph", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("gamma", parents=[common], help="Poincaré constant gamma(G, dist_H^p)")
    p.add_argument("method", choices=["brute", "search", "certify"])
    p.add_argument("--graph", required=True)
    p.add_argument("--host", required=True, help="host graph or metric JSON")
    p.add_argument("-p", "--p", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--stop", type=int, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("distort", parents=[common], help="L1 and graph-to-graph distortion")
    p.add_argument("method", choices=["lp", "brute", "lower-bound"])
    p.add_argument("--graph")
    p.add_argument("--points", help="JSON list of coordinate vectors (lp)")
    p.add_argument("--host")
    p.add_argument("--gamma-upper", type=float)
    p.set_defaults(func=cmd_distort)

    p = sub.add_parser("check-d", parents=[common], help="property D(alpha)")
    p.add_argument("--graph", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_check_d)

    for name, func, text in (("check-r", cmd_check_r, "property R(eps)"),
                             ("edge-density", cmd_edge_density, "edge density of small sets")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--graph", required=True)
        p.add_argument("--eps", type=float, required=True)
        p.add_argument("--size-cap", type=int)
        p.add_argument("--mode", choices=["exact", "sampled"], default="exact")
        p.add_argument("--seed", type=int)
        p.add_argument("--samples", type=int)
        if name == "edge-density":
            p.add_argument("--subsets", help="JSON list of vertex lists")
        p.set_defaults(func=func)

    for name, func, text in (("decompose", cmd_decompose, "M0/M1/M2 and dyadic classes"),
                             ("compress", cmd_compress, "one random compression")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--map", help="VertexMap JSON")
        p.add_argument("--values", help="comma-separated map values")
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--eps", type=float, required=True)
        if name == "compress":
            p.add_argument("--seed", type=int, required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("trace", parents=[common], help="compression ledger and diagnostics")
    p.add_argument("--graph", required=True)
    p.add_argument("--host", required=True)
    p.add_argument("--map")
    p.add_argument("--values")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("approx", parents=[common], help="universal approximators")
    p.add_argument("action", choices=["build", "spread", "check"])
    p.add_argument("--graph", help="3-regular source graph (build)")
    p.add_argument("--pairing-seed", type=int)
    p.add_argument("--multigraph-out")
    p.add_argument("--multigraph")
    p.add_argument("--host")
    p.add_argument("-p", "--p", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, help="required when tuples are sampled")
    p.add_argument("--D", type=float)
    p.add_argument("--s", type=float)
    p.add_argument("--points", default="")
    p.add_argument("--source", help="source graph for the quotient identity")
    p.add_argument("--pairing", help="JSON list of vertex pairs")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("constants", parents=[common], help="log-space constants table")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--alpha", type=float)
    p.add_argument("-p", "--p", type=float, default=1.0)
    p.add_argument("--m", type=int)
    p.add_argument("--delta", type=int)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("scan", parents=[common], help="gamma across sizes (n = m)")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--delta", type=int, default=3)
    p.add_argument("--sizes", default="6,8,10")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("-p", "--p", type=float, default=1.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--csv", help="also write the record table as CSV")
    p.set_defaults(func=cmd_scan)
    return parser


def _check_usage(parser: UsageParser, args: argparse.Namespace) -> None:
    if args.command == "gamma" and args.method == "search" and args.seed is None:
        parser.error("gamma search requires --seed")
    if args.command in ("check-d", "check-r", "edge-density") and args.mode == "sampled" \
            and args.seed is None:
        parser.error(f"{args.command} --mode sampled requires --seed")
    if args.command in ("decompose", "compress", "trace") and not (args.map or args.values):
        parser.error(f"{args.command} requires --map or --values")
    if args.command == "distort":
        if args.method == "lp" and not (args.graph or args.points):
            parser.error("distort lp requires --graph or --points")
        if args.method == "brute" and not (args.graph and args.host):
            parser.error("distort brute requires --graph and --host")
        if args.method == "lower-bound" and not (args.graph and args.gamma_upper):
            parser.error("distort lower-bound requires --graph and --gamma-upper")
    if args.command == "approx":
        if args.action == "build" and not args.graph:
            parser.error("approx build requires --graph")
        if args.action != "build" and not (args.multigraph and args.host):
            parser.error(f"approx {args.action} requires --multigraph and --host")


def main(argv: Sequence[str] | None = None) -> int:
    global _QUIET
    parser = build_parser()
    args = parser.parse_args(argv)
    _QUIET = args.quiet
    _check_usage(parser, args)
    caps = DEFAULT_CAPS
    try:
        return args.func(args, caps)
    except MissingSeed as exc:
        parser.error(str(exc))
    except (SglError, OSError, ValueError, KeyError) as exc:
        print(f"  [error] {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
