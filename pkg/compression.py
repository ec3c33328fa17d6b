"""
Spectral Gap Lab — Compression
==============================

Fiber-size decomposition of a map f: [n] -> [m], its dyadic refinement
and the random compression used to bound Poincaré ratios of maps that
are close to injective on a large part of the domain.

    M0 = {v : |f^-1(f(v))| <= (n/m) m^(2 eps)}
    M1 = {v : (n/m) m^(2 eps) < |f^-1(f(v))| <= (n/m) m^(4 eps)}
    M2 = {v : |f^-1(f(v))| > (n/m) m^(4 eps)}

    M_{0,r} = {v in M0 : 2^(r-1) <= |f^-1(f(v))| < 2^r},  r* = max r
    M0'  = union of M_{0,r}, r* - 2 log2 m <= r <= r*, |f(M_{0,r})| >= m^(1 - 2 eps)
    M0'' = union of M_{0,r}, r < r* - 2 log2 m

f_hat sends M0'' to target 0; the compression then sends all of M0' to
f_hat(pivot) for a uniform pivot in M0'.

Algebraic facts (the expectation identity, the pair-mass retention bound
when |M0'| <= 7 (n - |M0'|), the image-size bound and the size bound on
M0'') are asserted and raise VerificationError when broken.  The
asymptotic inequalities are only reported, each with its hypotheses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from config import DEFAULT_CAPS, Caps
from constants import constants_table, log_base, m2_satisfied
from errors import DegenerateError, ParameterError, VerificationError
from graph_core import Graph, MetricMatrix, bfs_levels, make_rng, require_connected
from poincare import VertexMap


# ---------------------------------------------------------------------------
#  Reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecompositionReport:
    n: int
    m: int
    eps: float
    M0: frozenset[int]
    M1: frozenset[int]
    M2: frozenset[int]
    fiber_sizes: tuple[int, ...]
    threshold_low: float                  # (n/m) m^(2 eps)
    threshold_high: float                 # (n/m) m^(4 eps)
    regime: str                           # small-M2 | large-M2
    proof_regime: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n, "m": self.m, "eps": self.eps,
            "M0": sorted(self.M0), "M1": sorted(self.M1), "M2": sorted(self.M2),
            "fiber_sizes": list(self.fiber_sizes),
            "thresholds": [self.threshold_low, self.threshold_high],
            "regime": self.regime,
            "proof_regime": self.proof_regime,
        }


@dataclass(frozen=True)
class DyadicReport:
    decomposition: DecompositionReport
    classes: dict[int, frozenset[int]]
    r_star: int | None
    M0_prime: frozenset[int]
    M0_double_prime: frozenset[int]
    window_low: float | None
    image_threshold: float
    empty: bool = False

    def class_image(self, f: VertexMap, r: int) -> int:
        return len({f[v] for v in self.classes.get(r, ())})

    def to_dict(self) -> dict[str, Any]:
        return {
            "classes": {str(r): sorted(c) for r, c in sorted(self.classes.items())},
            "r_star": self.r_star,
            "M0_prime": sorted(self.M0_prime),
            "M0_double_prime": sorted(self.M0_double_prime),
            "window_low": self.window_low,
            "image_threshold": self.image_threshold,
            "empty": self.empty,
        }


@dataclass(frozen=True)
class IdentityCheck:
    lhs: float
    rhs: float
    passed: bool
    trivial: bool = False

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.passed))

    def to_dict(self) -> dict[str, Any]:
        return {"lhs": self.lhs, "rhs": self.rhs, "pass": self.passed, "trivial": self.trivial}


@dataclass(frozen=True)
class ImageBoundCheck:
    image_size: int
    bound: float
    passed: bool
    m2_met: bool
    target: float                         # m^(1 - eps)

    def __iter__(self):
        return iter((self.image_size, self.bound, self.passed))

    def to_dict(self) -> dict[str, Any]:
        return {"image_size": self.image_size, "bound": self.bound, "pass": self.passed,
                "m2_met": self.m2_met, "target": self.target}


@dataclass(frozen=True)
class InequalityRecord:
    name: str
    lhs: float
    rhs: float
    holds: bool
    asserted: bool
    ln_rhs: float | None = None
    hypotheses: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "ln_rhs": self.ln_rhs,
                "holds": self.holds, "asserted": self.asserted, "hypotheses": self.hypotheses}


@dataclass(frozen=True)
class CompressionTrace:
    f: VertexMap
    f_hat: VertexMap
    compressed: VertexMap
    pivot: int | None
    dyadic: DyadicReport
    ledger: dict[str, float]
    inequalities: tuple[InequalityRecord, ...]
    diagnostics: dict[str, Any]
    flags: dict[str, Any]

    def inequality(self, name: str) -> InequalityRecord:
        for rec in self.inequalities:
            if rec.name == name:
                return rec
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "f": list(self.f.values),
            "f_hat": list(self.f_hat.values),
            "compressed": list(self.compressed.values),
            "pivot": self.pivot,
            "decomposition": self.dyadic.decomposition.to_dict(),
            "dyadic": self.dyadic.to_dict(),
            "ledger": self.ledger,
            "inequalities": [rec.to_dict() for rec in self.inequalities],
            "diagnostics": self.diagnostics,
            "flags": self.flags,
        }


# ---------------------------------------------------------------------------
#  Decompositions
# ---------------------------------------------------------------------------

def _check_eps(eps: float, caps: Caps) -> None:
    if not 0 < eps < caps.max_eps:
        raise ParameterError(f"eps must lie in (0, {caps.max_eps}), got {eps}")


def decompose(f: VertexMap, m: int, eps: float, caps: Caps = DEFAULT_CAPS) -> DecompositionReport:
    _check_eps(eps, caps)
    if f.m > m:
        raise ParameterError(f"map targets 0..{f.m - 1} but m = {m}")
    n = f.n
    fibers = np.bincount(f.as_array(), minlength=m)
    low = (n / m) * m ** (2 * eps)
    high = (n / m) * m ** (4 * eps)
    M0, M1, M2 = set(), set(), set()
    for v, x in enumerate(f.values):
        size = fibers[x]
        if size <= low:
            M0.add(v)
        elif size <= high:
            M1.add(v)
        else:
            M2.add(v)
    return DecompositionReport(
        n=n, m=m, eps=eps,
        M0=frozenset(M0), M1=frozenset(M1), M2=frozenset(M2),
        fiber_sizes=tuple(int(s) for s in fibers),
        threshold_low=low, threshold_high=high,
        regime="small-M2" if len(M2) <= n / 8 else "large-M2",
        proof_regime=eps <= caps.proof_eps,
    )


def dyadic(f: VertexMap, m: int, eps: float, caps: Caps = DEFAULT_CAPS) -> DyadicReport:
    deco = decompose(f, m, eps, caps)
    image_threshold = m ** (1 - 2 * eps)
    if not deco.M0:
        return DyadicReport(deco, {}, None, frozenset(), frozenset(), None, image_threshold,
                            empty=True)
    classes: dict[int, set[int]] = {}
    for v in deco.M0:
        r = int(deco.fiber_sizes[f[v]]).bit_length()
        classes.setdefault(r, set()).add(v)
    r_top = math.log2(m ** (2 * eps - 1) * f.n) + 1
    for r in classes:
        if r <= 0 or r > r_top + 1e-9:
            raise VerificationError(f"dyadic class r={r} outside (0, {r_top}]")
    r_star = max(classes)
    window_low = r_star - 2 * math.log2(m)
    prime, double_prime = set(), set()
    for r, members in classes.items():
        if r < window_low:
            double_prime |= members
        elif len({f[v] for v in members}) >= image_threshold:
            prime |= members
    return DyadicReport(
        decomposition=deco,
        classes={r: frozenset(c) for r, c in sorted(classes.items())},
        r_star=r_star,
        M0_prime=frozenset(prime),
        M0_double_prime=frozenset(double_prime),
        window_low=window_low,
        image_threshold=image_threshold,
    )


def hat_f(f: VertexMap, dy: DyadicReport) -> VertexMap:
    """f with M0'' sent to target 0."""
    return VertexMap(f.n, f.m, tuple(0 if v in dy.M0_double_prime else x
                                     for v, x in enumerate(f.values)))


def _realisation(fh: VertexMap, prime: frozenset[int], pivot: int | None) -> VertexMap:
    if pivot is None:
        return fh
    target = fh[pivot]
    return VertexMap(fh.n, fh.m, tuple(target if v in prime else x
                                       for v, x in enumerate(fh.values)))


def compress(f: VertexMap, dy: DyadicReport, seed: int) -> tuple[VertexMap, int | None]:
    """One realisation of the random compression; the pivot is uniform on
    sorted(M0') under ``make_rng(seed)``.  With M0' empty this is f_hat."""
    fh = hat_f(f, dy)
    if not dy.M0_prime:
        return fh, None
    prime = sorted(dy.M0_prime)
    pivot = prime[int(make_rng(seed).integers(len(prime)))]
    return _realisation(fh, dy.M0_prime, pivot), pivot


# ---------------------------------------------------------------------------
#  Sums
# ---------------------------------------------------------------------------

def pair_sum(dist: np.ndarray, f: VertexMap, subset: frozenset[int] | None = None) -> float:
    """sum over ordered (v, u) in subset^2 of dist(f(v), f(u))."""
    vals = f.as_array() if subset is None else f.as_array()[sorted(subset)]
    counts = np.bincount(vals, minlength=dist.shape[0]).astype(float)
    return float(counts @ dist @ counts)


def edge_sum(dist: np.ndarray, G: Graph, f: VertexMap,
             touching: frozenset[int] | None = None) -> float:
    edges = G.edge_array()
    if touching is not None:
        keep = [i for i, (u, v) in enumerate(G.edges) if u in touching or v in touching]
        edges = edges[keep]
    vals = f.as_array()
    return math.fsum(dist[vals[edges[:, 0]], vals[edges[:, 1]]].tolist())


def _pairs_touching(dist: np.ndarray, f: VertexMap, subset: frozenset[int]) -> float:
    outside = frozenset(range(f.n)) - subset
    return pair_sum(dist, f) - pair_sum(dist, f, outside)


def _finite_host(H_metric: MetricMatrix, f: VertexMap) -> np.ndarray:
    vals = sorted(f.image)
    if not np.all(np.isfinite(H_metric.dist[np.ix_(vals, vals)])):
        raise DegenerateError("host metric is infinite on the image of f")
    return H_metric.dist


# ---------------------------------------------------------------------------
#  Unconditional checks
# ---------------------------------------------------------------------------

def expectation_identity_check(G: Graph, H_metric: MetricMatrix, f: VertexMap, eps: float,
                               caps: Caps = DEFAULT_CAPS) -> IdentityCheck:
    """E[sum_{v,u} dist(F(v), F(u))] against sum dist(f_hat) - sum_{M0' x M0'} dist(f_hat).

    The expectation is the exact average over every pivot in M0'.
    """
    if f.n != G.n:
        raise ParameterError(f"map domain {f.n} does not match graph order {G.n}")
    dy = dyadic(f, H_metric.k, eps, caps)
    fh = hat_f(f, dy)
    dist = _finite_host(H_metric, fh)
    total = pair_sum(dist, fh)
    if not dy.M0_prime:
        return IdentityCheck(total, total, True, trivial=True)
    prime = sorted(dy.M0_prime)
    lhs = math.fsum(pair_sum(dist, _realisation(fh, dy.M0_prime, w)) for w in prime) / len(prime)
    rhs = total - pair_sum(dist, fh, dy.M0_prime)
    passed = abs(lhs - rhs) <= caps.identity_rtol * max(1.0, abs(rhs))
    if not passed:
        raise VerificationError(f"expectation identity broken: {lhs!r} != {rhs!r}")
    return IdentityCheck(lhs, rhs, passed, trivial=len(prime) == 1)


def image_bound(m: int, eps: float) -> float:
    """2 + (2 log2 m + 1) m^(1 - 2 eps) + m^(1 - 2 eps)."""
    t = m ** (1 - 2 * eps)
    return 2 + (2 * math.log2(m) + 1) * t + t


def image_bound_check(f: VertexMap, dy: DyadicReport, m: int, eps: float) -> ImageBoundCheck:
    """Largest |Im(F)| over every pivot against :func:`image_bound`."""
    fh = hat_f(f, dy)
    pivots = sorted(dy.M0_prime) or [None]
    size = max(len(_realisation(fh, dy.M0_prime, w).image) for w in pivots)
    bound = image_bound(m, eps)
    passed = size <= bound + 1e-9
    if not passed:
        raise VerificationError(f"compressed image {size} exceeds {bound}")
    return ImageBoundCheck(size, bound, passed, m2_satisfied(eps, m), m ** (1 - eps))


# ---------------------------------------------------------------------------
#  Trace
# ---------------------------------------------------------------------------

def _layers(G: Graph, sources: frozenset[int]) -> list[list[int]]:
    if not sources:
        return []
    levels = bfs_levels(G, sources)
    out: list[list[int]] = [[] for _ in range(max(levels.values()) + 1)]
    for v, k in sorted(levels.items()):
        out[k].append(v)
    return out


def _report(name: str, lhs: float, ln_rhs: float, hypotheses: dict[str, Any],
            reverse: bool = False) -> InequalityRecord:
    """lhs <= exp(ln_rhs) (or >= when ``reverse``), compared in log space."""
    rhs = math.exp(ln_rhs) if ln_rhs < 709.0 else math.inf
    ln_lhs = math.log(lhs) if lhs > 0 else -math.inf
    holds = ln_lhs >= ln_rhs - 1e-12 if reverse else ln_lhs <= ln_rhs + 1e-12
    return InequalityRecord(name, lhs, rhs, holds, False, ln_rhs, hypotheses)


def _ln(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


def compression_trace(G: Graph, H: Graph, f: VertexMap, eps: float, alpha: float | None = None,
                      seed: int = 0, caps: Caps = DEFAULT_CAPS) -> CompressionTrace:
    """Every quantity of the compression argument for one realisation.

    Ledger: edge and ordered-pair sums of f, f_hat and the compression F.
    Asserted: the expectation identity, pair-mass retention when
    |M0'| <= 7 (n - |M0'|), the image bound and |M0''| <= 2^r*/m <=
    2 |M_{0,r*}|/m.  Reported only: the edge-compression bound (4d/eta),
    the expected pair bound (1/16), the edge-mass lower bound
    eta |M0'| log_{Delta-1} m, and the two M0'' bounds (8400 and 48 times
    log_{Delta-1} m / m).  Diagnostics: BFS layers T_k from M0', the
    layer edges E_k, atypical edges, typical layer fractions, k0 and the
    boundary of M_{0,r*}.
    """
    host = require_connected(H, "host graph")
    delta = H.require_regular()
    d = G.require_regular()
    if delta < 3:
        raise ParameterError(f"host degree must be >= 3, got {delta}")
    if f.n != G.n:
        raise ParameterError(f"map domain {f.n} does not match graph order {G.n}")
    m, n = H.n, G.n
    dist = host.dist
    table = constants_table(d, eps, alpha=alpha, m=m, delta=delta, caps=caps)
    L = log_base(m, delta - 1)

    dy = dyadic(f, m, eps, caps)
    deco = dy.decomposition
    fh = hat_f(f, dy)
    F, pivot = compress(f, dy, seed)
    prime, dprime = dy.M0_prime, dy.M0_double_prime

    ledger = {
        "edge_sum_f": edge_sum(dist, G, f),
        "edge_sum_f_hat": edge_sum(dist, G, fh),
        "edge_sum_compressed": edge_sum(dist, G, F),
        "pair_sum_f": pair_sum(dist, f),
        "pair_sum_f_hat": pair_sum(dist, fh),
        "pair_sum_compressed": pair_sum(dist, F),
        "pair_sum_f_hat_on_M0_prime": pair_sum(dist, fh, prime) if prime else 0.0,
    }
    large_m2 = len(deco.M2) >= n / 8
    hyp = {"large_M2": large_m2, "proof_regime": deco.proof_regime,
           "m_thresholds": "not checked"}
    records: list[InequalityRecord] = []

    # asserted
    ident = expectation_identity_check(G, host, f, eps, caps)
    ledger["expected_pair_sum_compressed"] = ident.lhs
    records.append(InequalityRecord("expectation-identity", ident.lhs, ident.rhs,
                                    ident.passed, True, hypotheses={"trivial": ident.trivial}))
    if prime and len(prime) <= 7 * (n - len(prime)):
        lhs = ledger["pair_sum_f_hat"]
        rhs = 8.0 * (lhs - ledger["pair_sum_f_hat_on_M0_prime"])
        holds = lhs <= rhs * (1 + caps.identity_rtol) + 1e-9
        if not holds:
            raise VerificationError(f"pair-mass retention broken: {lhs} > {rhs}")
        records.append(InequalityRecord("pair-mass-retention", lhs, rhs, holds, True,
                                        hypotheses={"M0_prime_ratio": len(prime) / (n - len(prime))}))
    img = image_bound_check(f, dy, m, eps)
    records.append(InequalityRecord("image-size", float(img.image_size), img.bound, True, True,
                                    hypotheses={"m2_met": img.m2_met}))
    if dy.r_star is not None:
        top = len(dy.classes[dy.r_star])
        mid, hi = 2.0 ** dy.r_star / m, 2.0 * top / m
        holds = len(dprime) <= mid + 1e-9 and mid <= hi + 1e-9
        if not holds:
            raise VerificationError(f"|M0''| = {len(dprime)} exceeds 2^r*/m = {mid} or {hi}")
        records.append(InequalityRecord("small-class-size", float(len(dprime)), mid, holds, True,
                                        hypotheses={"top_class_bound": hi}))

    # reported
    sef = ledger["edge_sum_f"]
    spf = ledger["pair_sum_f"]
    records.append(_report("edge-compression", ledger["edge_sum_compressed"],
                           math.log(4 * d) - table.ln_eta + _ln(sef), hyp))
    records.append(_report("expected-pair-retention", ident.lhs, _ln(spf / 16.0), hyp,
                           reverse=True))
    records.append(_report("edge-mass", sef,
                           table.ln_eta + _ln(len(prime)) + _ln(L), hyp, reverse=True))
    if dprime:
        records.append(_report("edges-near-M0''", edge_sum(dist, G, f, dprime),
                               math.log(8400.0 * L / m) + _ln(sef), hyp))
        records.append(_report("pairs-near-M0''", _pairs_touching(dist, f, dprime),
                               math.log(48.0 * L / m) + _ln(spf), hyp))

    diagnostics = _diagnostics(G, dist, f, dy, eps, d, L)
    if deco.regime == "small-M2":
        diagnostics["applicable_constant"] = {"name": "Gamma1", "value": table.gamma1}
    else:
        diagnostics["applicable_constant"] = {"name": "Gamma2", "ln_value": table.ln_gamma2}

    flags = {
        "proof_regime": deco.proof_regime,
        "large_M2": large_m2,
        "m2_met": img.m2_met,
        "M0_prime_empty": not prime,
        "log_base": "e",
    }
    return CompressionTrace(f, fh, F, pivot, dy, ledger, tuple(records), diagnostics, flags)


def _diagnostics(G: Graph, dist: np.ndarray, f: VertexMap, dy: DyadicReport, eps: float,
                 d: int, L: float) -> dict[str, Any]:
    n = G.n
    out: dict[str, Any] = {}
    layers = _layers(G, dy.M0_prime)
    out["layer_sizes"] = [len(t) for t in layers]
    if not layers:
        out["k0"] = None
        return out
    depth = {v: k for k, t in enumerate(layers) for v in t}
    layer_edges: list[list[tuple[int, int]]] = [[] for _ in range(max(0, len(layers) - 1))]
    for u, v in G.edges:
        ku, kv = depth.get(u), depth.get(v)
        if ku is None or kv is None or abs(ku - kv) != 1:
            continue
        lo_v, hi_v = (u, v) if ku < kv else (v, u)
        layer_edges[min(ku, kv)].append((lo_v, hi_v))
    out["layer_edge_counts"] = [len(e) for e in layer_edges]

    covered, k0 = 0, None
    for k, t in enumerate(layers):
        covered += len(t)
        if covered >= 15 * n / 16:
            k0 = k
            break
    out["k0"] = k0
    if k0 is None:
        return out

    atypical, typical_frac = [], []
    typical = set(dy.M0_prime)
    for k in range(k0):
        tau = (eps / 6.0) * (d - 1) ** (-k / 2.0) * L
        bad = {(a, b) for a, b in layer_edges[k] if dist[f[a], f[b]] >= tau}
        atypical.append(len(bad))
        nxt = {b for a, b in layer_edges[k] if a in typical and (a, b) not in bad}
        typical = nxt
        typical_frac.append(len(nxt) / len(layers[k + 1]) if layers[k + 1] else 1.0)
    out["atypical_edge_counts"] = atypical
    out["typical_fractions"] = typical_frac
    out["typical_fraction_target"] = 1.0 - 1.0 / 32.0

    if dy.r_star is not None:
        top = dy.classes[dy.r_star]
        boundary = sum(1 for u, v in G.edges if (u in top) != (v in top))
        out["top_class_boundary"] = {"edges": boundary, "bound": d / 1400.0 * len(top)}
    return out
