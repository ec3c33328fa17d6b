"""
Spectral Gap Lab — Poincaré Constants
=====================================

The nonlinear Poincaré ratio of a map f: V_G -> M,

                  (1/n^2)  sum_{u,v in V_G}  rho(f(u), f(v))^p
    ratio(f) =  ----------------------------------------------
                  (1/|E|)  sum_{{u,v} in E_G} rho(f(u), f(v))^p

and gamma(G, rho^p) = sup over non-degenerate f.  Estimators:

  * gamma_bruteforce      exact, every m^n map in mixed-radix order
  * gamma_local_search    coordinate ascent with seeded restarts (lower bound)
  * gamma_upper_certificate
                          c_L1(dist_H) * d/(d - lambda_2(G)) (upper bound)
  * extrapolation_bound   the p -> q extrapolation in log space
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from itertools import islice, permutations
from typing import Any, Sequence

import numpy as np

from config import DEFAULT_CAPS, Caps
from cut_embed import min_l1_distortion
from errors import DegenerateError, ParameterError, ResourceError
from graph_core import Graph, MetricMatrix, make_rng, require_connected
from spectral import classical_gamma, classical_gamma_as_stated, lambda2


MAX_LOG = math.log(np.finfo(float).max)
CHUNK = 1 << 16


# ---------------------------------------------------------------------------
#  Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VertexMap:
    n: int
    m: int
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        vals = tuple(int(x) for x in self.values)
        if len(vals) != self.n:
            raise ParameterError(f"map has {len(vals)} values for n={self.n}")
        for v, x in enumerate(vals):
            if not 0 <= x < self.m:
                raise ParameterError(f"f({v}) = {x} outside 0..{self.m - 1}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def of(cls, values: Sequence[int], m: int) -> "VertexMap":
        return cls(len(values), m, tuple(values))

    @classmethod
    def identity(cls, n: int) -> "VertexMap":
        return cls(n, n, tuple(range(n)))

    @classmethod
    def constant(cls, n: int, m: int, value: int = 0) -> "VertexMap":
        return cls(n, m, (value,) * n)

    def __getitem__(self, v: int) -> int:
        return self.values[v]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.int64)

    @property
    def image(self) -> frozenset[int]:
        return frozenset(self.values)

    def fiber_sizes(self) -> np.ndarray:
        """|f^{-1}(x)| for every x in 0..m-1."""
        return np.bincount(self.as_array(), minlength=self.m)

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "m": self.m, "values": list(self.values)}


@dataclass(frozen=True)
class GammaEstimate:
    lower: float
    upper: float = math.inf
    witness: VertexMap | None = None
    provenance: str = ""
    exact: bool = False
    degenerate: int = 0
    evaluated: int = 0
    details: dict[str, Any] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "provenance": self.provenance,
            "witness": self.witness.values if self.witness else None,
            "degenerate_maps": self.degenerate,
            "evaluated": self.evaluated,
            "details": self.details,
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------------------
#  Ratio
# ---------------------------------------------------------------------------

def _check_p(p: float) -> None:
    if not p >= 1:
        raise ParameterError(f"exponent p must be >= 1, got {p}")


def power(x: np.ndarray | float, p: float) -> np.ndarray:
    """x^p for x >= 0, via exp(p log x) with 0^p = 0 exactly."""
    arr = np.asarray(x, dtype=float)
    if p == 1:
        return arr.copy()
    if p == 2:
        return arr * arr
    out = np.zeros_like(arr)
    pos = arr > 0
    with np.errstate(over="ignore"):
        out[pos] = np.exp(p * np.log(arr[pos]))
    out[np.isinf(arr)] = math.inf
    return out


def ratio(G: Graph, M: MetricMatrix, f: VertexMap, p: float = 1.0) -> float:
    _check_p(p)
    if f.n != G.n:
        raise ParameterError(f"map domain {f.n} does not match graph order {G.n}")
    if f.m > M.k:
        raise ParameterError(f"map targets 0..{f.m - 1} but metric has {M.k} points")
    if G.num_edges == 0:
        raise ParameterError("graph has no edges")
    vals = f.as_array()
    sub = M.dist[np.ix_(vals, vals)]
    if not np.all(np.isfinite(sub)):
        raise DegenerateError("metric is infinite on the image of f")
    pw = power(sub, p)
    edges = G.edge_array()
    den = float(pw[edges[:, 0], edges[:, 1]].sum())
    if den == 0.0:
        raise DegenerateError("f is constant on every edge (0/0 ratio)")
    return (float(pw.sum()) / (G.n * G.n)) / (den / G.num_edges)


def _powered_host(M: MetricMatrix, p: float) -> np.ndarray:
    if not M.is_finite:
        raise DegenerateError("host metric has infinite distances")
    return power(M.dist, p)


# ---------------------------------------------------------------------------
#  Brute force
# ---------------------------------------------------------------------------

def _maps_in_range(n: int, m: int, start: int, stop: int) -> np.ndarray:
    """Rows are maps start..stop-1; vertex 0 is the most significant digit."""
    idx = np.arange(start, stop, dtype=np.int64)
    place = m ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // place[None, :]) % m


def gamma_bruteforce(G: Graph, M: MetricMatrix, p: float = 1.0, caps: Caps = DEFAULT_CAPS,
                     start: int = 0, stop: int | None = None) -> GammaEstimate:
    """sup of :func:`ratio` over all maps V_G -> M with a positive edge sum.

    Maps are ranked in mixed-radix order; ``start``/``stop`` restrict the
    scan to a sub-range so that a long run can be split and resumed.  Ties
    keep the lowest rank.
    """
    _check_p(p)
    n, m = G.n, M.k
    total = m ** n
    if total > caps.brute_map_cap:
        raise ResourceError(f"{m}^{n} maps exceed the cap of {caps.brute_map_cap}",
                            cap=caps.brute_map_cap, requested=total)
    if G.num_edges == 0:
        raise ParameterError("graph has no edges")
    stop = total if stop is None else min(stop, total)
    if not 0 <= start <= stop:
        raise ParameterError(f"bad map range [{start}, {stop})")

    pw = _powered_host(M, p)
    edges = G.edge_array()
    scale = G.num_edges / (n * n)
    best, best_idx, degenerate = -math.inf, -1, 0
    targets = np.arange(m)
    for lo in range(start, stop, CHUNK):
        hi = min(stop, lo + CHUNK)
        maps = _maps_in_range(n, m, lo, hi)
        counts = (maps[:, :, None] == targets[None, None, :]).sum(axis=1).astype(float)
        num = np.einsum("ca,ab,cb->c", counts, pw, counts)
        den = pw[maps[:, edges[:, 0]], maps[:, edges[:, 1]]].sum(axis=1)
        ok = den > 0
        degenerate += int((~ok).sum())
        if not ok.any():
            continue
        vals = np.full(den.shape, -math.inf)
        vals[ok] = scale * num[ok] / den[ok]
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, best_idx = float(vals[i]), lo + i

    if best_idx < 0:
        raise DegenerateError("every map in range is degenerate")
    witness = VertexMap(n, m, tuple(_maps_in_range(n, m, best_idx, best_idx + 1)[0].tolist()))
    lower = ratio(G, M, witness, p)
    full = start == 0 and stop == total
    return GammaEstimate(
        lower=lower,
        upper=lower if full else math.inf,
        witness=witness,
        provenance="bruteforce" if full else "bruteforce-range",
        exact=full,
        degenerate=degenerate,
        evaluated=stop - start,
        details={"range": [start, stop], "best_index": best_idx},
    )


# ---------------------------------------------------------------------------
#  Local search
# ---------------------------------------------------------------------------

def _ascend(G: Graph, pw: np.ndarray, f: np.ndarray, max_sweeps: int) -> tuple[np.ndarray, float]:
    """Coordinate ascent from ``f``; returns the local optimum and its ratio."""
    n, m = G.n, pw.shape[0]
    E = G.num_edges
    edges = G.edge_array()
    nbrs = [np.asarray(G.adjacency[v], dtype=np.int64) for v in range(n)]

    def value(num: float, den: float) -> float:
        return (num / (n * n)) / (den / E) if den > 0 else -math.inf

    for _ in range(max_sweeps):
        counts = np.bincount(f, minlength=m).astype(float)
        pc = pw @ counts
        num = float(counts @ pc)
        den = float(pw[f[edges[:, 0]], f[edges[:, 1]]].sum())
        current = value(num, den)
        moved = False
        for v in range(n):
            a = int(f[v])
            nb_cols = pw[:, f[nbrs[v]]].sum(axis=1)
            num_t = num + 2.0 * (pc - pc[a]) - 2.0 * pw[a]
            num_t[a] = num
            den_t = den - nb_cols[a] + nb_cols
            den_t[a] = den
            with np.errstate(divide="ignore", invalid="ignore"):
                cand = np.where(den_t > 1e-12 * max(1.0, den),
                                (num_t / (n * n)) / (den_t / E), -math.inf)
            t = int(np.argmax(cand))
            if cand[t] > current + 1e-12:
                counts[a] -= 1.0
                counts[t] += 1.0
                pc += pw[:, t] - pw[:, a]
                num, den = float(num_t[t]), float(den_t[t])
                f[v] = t
                current = float(cand[t])
                moved = True
        if not moved:
            break
    counts = np.bincount(f, minlength=m).astype(float)
    den = float(pw[f[edges[:, 0]], f[edges[:, 1]]].sum())
    return f, value(float(counts @ pw @ counts), den)


def gamma_local_search(G: Graph, M: MetricMatrix, p: float = 1.0, restarts: int = 10,
                       seed: int = 0, max_sweeps: int = 1000) -> GammaEstimate:
    """Best local optimum of the ratio over seeded uniform random starts.

    Each sweep visits vertices in order and moves f(v) to the target with
    the largest ratio (smallest index on ties) when that strictly improves.
    Restart r draws its start from ``make_rng(seed, r)``.
    """
    _check_p(p)
    if restarts < 1:
        raise ParameterError("restarts must be >= 1")
    if G.num_edges == 0:
        raise ParameterError("graph has no edges")
    pw = _powered_host(M, p)
    m = M.k
    best_val, best_map = -math.inf, None
    for r in range(restarts):
        start = make_rng(seed, r).integers(0, m, size=G.n)
        f, val = _ascend(G, pw, start.astype(np.int64), max_sweeps)
        if val > best_val:
            best_val, best_map = val, f.copy()
    if best_map is None:
        return GammaEstimate(lower=0.0, provenance="search", evaluated=restarts,
                             notes=("no non-degenerate map reached",))
    witness = VertexMap(G.n, m, tuple(best_map.tolist()))
    return GammaEstimate(
        lower=ratio(G, M, witness, p),
        witness=witness,
        provenance="search",
        evaluated=restarts,
        details={"restarts": restarts, "seed": seed},
    )


# ---------------------------------------------------------------------------
#  Certified upper bound
# ---------------------------------------------------------------------------

def gamma_upper_certificate(G: Graph, H: Graph, eps: float | None = None,
                            caps: Caps = DEFAULT_CAPS) -> GammaEstimate:
    """gamma(G, dist_H) <= c_L1(dist_H) * d/(d - lambda_2(G)).

    Cuts are squared-Euclidean-embeddable, so a cut decomposition of
    dist_H with distortion D transfers the Euclidean constant of G with a
    factor D.  When ``eps`` is supplied the distortion bound 216/eps for
    small images and its product with the spectral constant are reported
    too, together with the specialised 10746/eps constant.
    """
    host = require_connected(H, "host graph")
    D, emb = min_l1_distortion(host, caps)
    cg = classical_gamma(G, caps)
    details: dict[str, Any] = {
        "l1_distortion": D,
        "classical_gamma": cg,
        "classical_gamma_as_stated": classical_gamma_as_stated(G, caps),
        "certificate": emb.to_dict(),
    }
    if eps is not None:
        if not 0 < eps < 1:
            raise ParameterError(f"eps must lie in (0, 1), got {eps}")
        d = G.require_regular()
        lam2 = lambda2(G, caps=caps)
        details["small_image_bound"] = (216.0 / eps) * cg
        details["small_image_bound_as_stated"] = (216.0 / eps) * details["classical_gamma_as_stated"]
        details["ramanujan_like"] = lam2 <= 2.1 * math.sqrt(d - 1)
        details["specialised_constant"] = 10746.0 / eps
        if details["ramanujan_like"]:
            # 216 d / (2(d - 2.1 sqrt(d-1))) rounded up at d = 3; twice that
            # under the ordered-pair average
            details["specialised_constant_ordered"] = 21492.0 / eps
    return GammaEstimate(lower=0.0, upper=D * cg, provenance="certificate", details=details)


# ---------------------------------------------------------------------------
#  Extrapolation
# ---------------------------------------------------------------------------

def _check_extrapolation(gamma_p: float, p: float, q: float, h: float) -> None:
    if not 1 <= p <= q:
        raise ParameterError(f"need 1 <= p <= q, got p={p}, q={q}")
    if not h > 0:
        raise ParameterError(f"Cheeger constant must be positive, got h={h}")
    if not gamma_p > 0:
        raise ParameterError(f"gamma_p must be positive, got {gamma_p}")


def extrapolation_bound_log(gamma_p: float, p: float, q: float, d: int, h: float) -> float:
    """Natural log of max{exp(12 2^q (d/h) ln d), 5^q 2^(q/p) gamma_p^(q/p)}."""
    _check_extrapolation(gamma_p, p, q, h)
    exp_branch = 12.0 * 2.0 ** q * (d / h) * math.log(d)
    power_branch = q * math.log(5.0) + (q / p) * (math.log(2.0) + math.log(gamma_p))
    return max(exp_branch, power_branch)


def extrapolation_bound(gamma_p: float, p: float, q: float, d: int, h: float) -> float:
    log_value = extrapolation_bound_log(gamma_p, p, q, d, h)
    return math.exp(log_value) if log_value < MAX_LOG else math.inf


def extrapolation_bound_log_decimal(gamma_p: float, p: float, q: float, d: int, h: float,
                                    digits: int = 50) -> Decimal:
    """Same logarithm as :func:`extrapolation_bound_log` in big-float arithmetic."""
    _check_extrapolation(gamma_p, p, q, h)
    with localcontext() as ctx:
        ctx.prec = digits
        P, Q = Decimal(repr(float(p))), Decimal(repr(float(q)))
        exp_branch = (Decimal(12) * (Decimal(2) ** Q) * Decimal(d) / Decimal(repr(float(h)))
                      * Decimal(d).ln())
        power_branch = (Q * Decimal(5).ln()
                        + (Q / P) * (Decimal(2).ln() + Decimal(repr(float(gamma_p))).ln()))
        return max(exp_branch, power_branch)


# ---------------------------------------------------------------------------
#  Distortion
# ---------------------------------------------------------------------------

def distortion_lower_bound(G: Graph, gamma_upper: float) -> float:
    """avg_{u,v} dist_G(u, v) / gamma_upper, a lower bound on c_H(G).

    Any embedding of G into H with distortion D has a Poincaré ratio at
    least avg dist_G / D, since edges have length 1; so D >= avg / gamma.
    """
    if not gamma_upper > 0:
        raise ParameterError(f"gamma_upper must be positive, got {gamma_upper}")
    metric = require_connected(G)
    if math.isinf(gamma_upper):
        return 0.0
    return float(metric.dist.sum()) / (G.n * G.n) / gamma_upper


def min_distortion_bruteforce(G: Graph, H: Graph, caps: Caps = DEFAULT_CAPS) -> float:
    """Exact c_H(G) over all injections V_G -> V_H."""
    n, m = G.n, H.n
    if n > m:
        raise ParameterError(f"no injection from {n} vertices into {m}")
    count = math.perm(m, n)
    if count > caps.injection_cap:
        raise ResourceError(f"{count} injections exceed the cap of {caps.injection_cap}",
                            cap=caps.injection_cap, requested=count)
    dg = require_connected(G).dist
    dh = require_connected(H, "host graph").dist
    if n < 2:
        return 1.0
    ii, jj = np.triu_indices(n, k=1)
    base = dg[ii, jj]
    best = math.inf
    perms = permutations(range(m), n)
    while True:
        block = np.array(list(islice(perms, CHUNK)), dtype=np.int64)
        if block.size == 0:
            break
        stretch = dh[block[:, ii], block[:, jj]] / base
        best = min(best, float((stretch.max(axis=1) / stretch.min(axis=1)).min()))
    return best
