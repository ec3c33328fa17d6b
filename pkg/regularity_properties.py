"""
Spectral Gap Lab — Regularity Properties
========================================

Checkers for the two structural properties of random regular graphs used
by the Poincaré-constant argument, plus the expansion lemmas built on them.

  D(alpha)  A: |B(S, l)| >= min{3n/4, alpha (d-1)^l |S|} for all S != {}, l >= 1
            B: lambda_2 <= 2.1 sqrt(d-1)
  R(eps)    A: c_L1(H[S]) <= 216/eps for all |S| <= m^(1-eps)
            B: H connected, diam(H) <= 3 log_{Delta-1} m

Exact scans enumerate every quantifier instance; sampled scans say so in
their verdict ("pass-sampled").  A fail verdict always carries the least
violating instance in (subset bitmask, l) order, re-checked from scratch
before it is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from config import DEFAULT_CAPS, Caps
from constants import (GROWTH, R_EPS_NUMERATOR, embedding_bound_intermediate,
                       ln_alpha_tilde, log_base)
from cut_embed import min_l1_distortion
from errors import ParameterError, PreconditionError, ResourceError, VerificationError
from graph_core import (Graph, all_pairs_distances, ball, bfs_levels,
                        closed_neighbourhood_masks, connected_components, induced_subgraph,
                        make_rng, metric_summary)
from spectral import lambda2


RAMANUJAN_FACTOR = 2.1
REL_TOL = 1e-12


@dataclass(frozen=True)
class PropertyReport:
    name: str
    verdict: str                          # pass | fail | pass-sampled
    coverage: str                         # exact | sampled | explicit
    witness: dict[str, Any] | None = None
    samples: int = 0
    margins: dict[str, Any] = field(default_factory=dict)
    flags: dict[str, Any] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.verdict != "fail"

    def to_dict(self) -> dict[str, Any]:
        return {
            "property": self.name,
            "verdict": self.verdict,
            "coverage": self.coverage,
            "samples": self.samples,
            "witness": self.witness,
            "margins": self.margins,
            "flags": self.flags,
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class ExpansionReport:
    name: str
    holds: bool
    sides: dict[str, Any]
    hypotheses: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"check": self.name, "holds": self.holds, "sides": self.sides,
                "hypotheses": self.hypotheses}


def _mask_of(S: Iterable[int]) -> int:
    return sum(1 << int(v) for v in set(S))


def _members(mask: int) -> list[int]:
    out, v = [], 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


def _verdict(failed: bool, exact: bool) -> str:
    if failed:
        return "fail"
    return "pass" if exact else "pass-sampled"


# ---------------------------------------------------------------------------
#  D(alpha)
# ---------------------------------------------------------------------------

def _requirement(n: int, d: int, alpha: float, ell: int, size: float) -> float:
    return min(0.75 * n, alpha * float(d - 1) ** ell * size)


def _violates(ball_size: float, required: float) -> bool:
    return ball_size < required * (1.0 - REL_TOL)


def _first_stable_failure(n: int, d: int, alpha: float, size_s: int, ball_size: int,
                          from_ell: int) -> int | None:
    """Least l >= from_ell at which a stabilised ball fails, if any."""
    if ball_size >= 0.75 * n or d - 1 <= 1:
        return None
    ell = max(from_ell, int(math.floor(math.log(ball_size / (alpha * size_s)) / math.log(d - 1))))
    ell = max(ell, 1)
    while not _violates(ball_size, _requirement(n, d, alpha, ell, size_s)):
        ell += 1
    while ell - 1 >= max(from_ell, 1) and _violates(ball_size, _requirement(n, d, alpha, ell - 1, size_s)):
        ell -= 1
    return ell


def _ball_layers(g: Graph):
    """Yield (l, ball masks, stable) for every nonempty S, S = 1..2^n-1."""
    n = g.n
    nm = np.array(closed_neighbourhood_masks(g), dtype=np.uint64)
    cur = np.arange(1, 1 << n, dtype=np.uint64)
    ell = 0
    one = np.uint64(1)
    while True:
        ell += 1
        nxt = cur.copy()
        for v in range(n):
            has = ((cur >> np.uint64(v)) & one).astype(bool)
            nxt[has] |= nm[v]
        stable = bool(np.array_equal(nxt, cur))
        yield ell, nxt, stable
        if stable:
            return
        cur = nxt


def _scan_exact_D(g: Graph, d: int, alpha: float) -> tuple[int, int] | None:
    n = g.n
    masks = np.arange(1, 1 << n, dtype=np.uint64)
    size_s = np.bitwise_count(masks).astype(float)
    first = np.zeros(masks.size, dtype=np.int64)
    last_sizes = None
    last_ell = 0
    for ell, balls, stable in _ball_layers(g):
        sizes = np.bitwise_count(balls).astype(float)
        req = np.minimum(0.75 * n, alpha * float(d - 1) ** ell * size_s)
        viol = (sizes < req * (1.0 - REL_TOL)) & (first == 0)
        first[viol] = ell
        last_sizes, last_ell = sizes, ell
        if stable:
            break
    # stabilised balls below 3n/4 fail once alpha (d-1)^l |S| passes their size
    pending = np.flatnonzero((first == 0) & (last_sizes < 0.75 * n))
    for i in pending:
        ell = _first_stable_failure(n, d, alpha, int(size_s[i]), int(last_sizes[i]), last_ell + 1)
        if ell is not None:
            first[i] = ell
    bad = np.flatnonzero(first)
    if bad.size == 0:
        return None
    i = int(bad[0])
    return int(masks[i]), int(first[i])


def _ball_profile(g: Graph, S: Sequence[int]) -> tuple[list[int], int]:
    """|B(S, l)| for l = 0..L where the ball stops growing at L."""
    levels = bfs_levels(g, S)
    depth = max(levels.values())
    counts = np.bincount(np.fromiter(levels.values(), dtype=np.int64), minlength=depth + 1)
    return np.cumsum(counts).tolist(), len(levels)


def _subset_failure_D(g: Graph, d: int, alpha: float, S: Sequence[int]) -> int | None:
    n = g.n
    sizes, reach = _ball_profile(g, S)
    for ell in range(1, len(sizes)):
        if _violates(sizes[ell], _requirement(n, d, alpha, ell, len(S))):
            return ell
    return _first_stable_failure(n, d, alpha, len(S), reach, len(sizes))


def _random_subsets(n: int, max_size: int, samples: int, seed: int | None) -> list[list[int]]:
    """Uniform subsets with log-uniform sizes in 1..max_size."""
    if seed is None:
        raise ParameterError("sampled subsets need an explicit seed")
    rng = make_rng(seed)
    out = []
    top = math.log(max_size + 1)
    for _ in range(samples):
        size = int(min(max_size, max(1, math.floor(math.exp(rng.uniform(0.0, top))))))
        out.append(sorted(int(v) for v in rng.choice(n, size=size, replace=False)))
    return out


def check_property_D(G: Graph, alpha: float, mode: str = "exact", seed: int | None = 0,
                     samples: int | None = None, caps: Caps = DEFAULT_CAPS) -> PropertyReport:
    d = G.require_regular()
    if not 0 < alpha <= 1:
        raise ParameterError(f"alpha must lie in (0, 1], got {alpha}")
    lam2 = lambda2(G, caps=caps)
    part_b = lam2 <= RAMANUJAN_FACTOR * math.sqrt(d - 1) + caps.sandwich_tol

    notes: list[str] = []
    if mode == "exact":
        if G.n > caps.property_exact_cap:
            raise ResourceError(f"exact D(alpha) scan capped at n <= {caps.property_exact_cap}",
                                cap=caps.property_exact_cap, requested=G.n)
        found = _scan_exact_D(G, d, alpha)
        exact, tested = True, (1 << G.n) - 1
    elif mode == "sampled":
        samples = caps.subset_sample_default if samples is None else samples
        candidates = [[v] for v in range(G.n)]
        candidates += [[u, v] for u in range(G.n) for v in range(u + 1, G.n)]
        candidates += _random_subsets(G.n, G.n, samples, seed)
        found = None
        for S in candidates:
            ell = _subset_failure_D(G, d, alpha, S)
            if ell is not None:
                key = (_mask_of(S), ell)
                if found is None or key < found:
                    found = key
        exact, tested = False, len(candidates)
        notes.append("singletons and pairs exhaustively, plus random subsets")
    else:
        raise ParameterError(f"unknown mode {mode!r}")

    witness = None
    if found is not None:
        mask, ell = found
        S = _members(mask)
        size = len(ball(G, S, ell))
        required = _requirement(G.n, d, alpha, ell, len(S))
        if not _violates(size, required):
            raise VerificationError(f"D(alpha) witness S={S}, l={ell} does not re-check")
        witness = {"part": "A", "S": S, "l": ell, "ball": size, "required": required}
    elif not part_b:
        witness = {"part": "B", "lambda2": lam2, "bound": RAMANUJAN_FACTOR * math.sqrt(d - 1)}

    return PropertyReport(
        name="D",
        verdict=_verdict(witness is not None, exact),
        coverage="exact" if exact else "sampled",
        witness=witness,
        samples=tested,
        margins={"alpha": alpha, "lambda2": lam2,
                 "lambda2_bound": RAMANUJAN_FACTOR * math.sqrt(d - 1),
                 "part_a": found is None, "part_b": part_b},
        notes=tuple(notes),
    )


def max_alpha(G: Graph, caps: Caps = DEFAULT_CAPS) -> float:
    """Largest alpha in [0, 1] for which part A of D(alpha) holds."""
    d = G.require_regular()
    n = G.n
    if n > caps.property_exact_cap:
        raise ResourceError(f"exact D(alpha) scan capped at n <= {caps.property_exact_cap}",
                            cap=caps.property_exact_cap, requested=n)
    size_s = np.bitwise_count(np.arange(1, 1 << n, dtype=np.uint64)).astype(float)
    best = math.inf
    last_sizes = None
    for ell, balls, stable in _ball_layers(G):
        sizes = np.bitwise_count(balls).astype(float)
        small = sizes < 0.75 * n
        if small.any():
            best = min(best, float(np.min(sizes[small] / (float(d - 1) ** ell * size_s[small]))))
        last_sizes = sizes
        if stable:
            break
    if d - 1 > 1 and np.any(last_sizes < 0.75 * n):
        return 0.0
    return min(1.0, best)


# ---------------------------------------------------------------------------
#  R(eps) and edge density
# ---------------------------------------------------------------------------

def _check_eps(eps: float, caps: Caps) -> dict[str, Any]:
    if not 0 < eps < caps.max_eps:
        raise ParameterError(f"eps must lie in (0, {caps.max_eps}), got {eps}")
    return {"proof_regime": eps <= caps.proof_eps}


def connected_subsets(g: Graph, max_size: int, limit: int | None = None) -> list[int]:
    """Bitmasks of all connected vertex sets with 1..max_size vertices, ascending."""
    nbr = [_mask_of(g.adjacency[v]) for v in range(g.n)]
    level = {1 << v for v in range(g.n)}
    found = set(level)
    for _ in range(1, max_size):
        nxt = set()
        for mask in level:
            frontier = 0
            for v in _members(mask):
                frontier |= nbr[v]
            frontier &= ~mask
            while frontier:
                low = frontier & -frontier
                nxt.add(mask | low)
                frontier ^= low
            if limit is not None and len(found) + len(nxt) > limit:
                raise ResourceError(f"more than {limit} connected subsets", cap=limit,
                                    requested=len(found) + len(nxt))
        found |= nxt
        level = nxt
    return sorted(found)


def _size_limit(m: int, eps: float, size_cap: int | None, caps: Caps) -> int:
    limit = int(math.floor(m ** (1.0 - eps) + 1e-9))
    if size_cap is not None:
        limit = min(limit, size_cap)
    return max(1, min(limit, caps.lp_point_cap))


def _component_distortion(H: Graph, members: Sequence[int], caps: Caps,
                          cache: dict[frozenset[int], float]) -> float:
    key = frozenset(members)
    if key not in cache:
        if len(members) == 1:
            cache[key] = 1.0
        else:
            sub, _ = induced_subgraph(H, members)
            cache[key] = min_l1_distortion(all_pairs_distances(sub), caps)[0]
    return cache[key]


def check_property_R(H: Graph, eps: float, size_cap: int | None = None, mode: str = "exact",
                     seed: int | None = 0, samples: int | None = None,
                     caps: Caps = DEFAULT_CAPS) -> PropertyReport:
    """Part A is tested on connected pieces: a disconnected H[S] is split into
    its components, each of which must meet the bound on its own.  With
    ``seed=None`` an oversized exact scan raises ResourceError instead of
    falling back to sampling."""
    flags = _check_eps(eps, caps)
    delta = H.require_regular()
    if delta < 3:
        raise ParameterError(f"host degree must be >= 3, got {delta}")
    m = H.n
    bound = R_EPS_NUMERATOR / eps
    summary = metric_summary(H)
    diam_bound = 3.0 * log_base(m, delta - 1)
    part_b = summary.connected and summary.diameter <= diam_bound
    limit = _size_limit(m, eps, size_cap, caps)
    cache: dict[frozenset[int], float] = {}
    notes: list[str] = []

    worst = 1.0
    failure: tuple[int, float] | None = None
    exact = mode == "exact"
    tested = 0
    if exact:
        try:
            sets = connected_subsets(H, limit, caps.subset_scan_cap)
        except ResourceError:
            if seed is None:
                raise
            exact = False
            notes.append(f"connected subsets exceed {caps.subset_scan_cap}: sampled instead")
    elif mode != "sampled":
        raise ParameterError(f"unknown mode {mode!r}")

    if exact:
        for mask in sets:
            c = _component_distortion(H, _members(mask), caps, cache)
            worst = max(worst, c)
            if c > bound * (1 + REL_TOL) and failure is None:
                failure = (mask, c)
        tested = len(sets)
        notes.append("disconnected subsets reduce to their connected components")
    else:
        n_samples = caps.subset_sample_default if samples is None else samples
        split = 0
        for S in _random_subsets(m, limit, n_samples, seed):
            sub, labels = induced_subgraph(H, S)
            comps = connected_components(sub)
            if len(comps) > 1:
                split += 1
            for comp in comps:
                members = [labels[i] for i in comp]
                c = _component_distortion(H, members, caps, cache)
                worst = max(worst, c)
                mask = _mask_of(members)
                if c > bound * (1 + REL_TOL) and (failure is None or mask < failure[0]):
                    failure = (mask, c)
        tested = n_samples
        if split:
            notes.append(f"{split} sampled subsets were disconnected; components tested separately")

    witness = None
    if failure is not None:
        members = _members(failure[0])
        sub, _ = induced_subgraph(H, members)
        recheck = min_l1_distortion(all_pairs_distances(sub), caps)[0]
        if not recheck > bound * (1 + REL_TOL):
            raise VerificationError(f"R(eps) witness {members} does not re-check")
        witness = {"part": "A", "S": members, "distortion": recheck, "bound": bound}
    elif not part_b:
        witness = {"part": "B", "connected": summary.connected,
                   "diameter": summary.diameter, "bound": diam_bound}

    margins: dict[str, Any] = {
        "bound": bound,
        "max_distortion": worst,
        "size_limit": limit,
        "diameter": summary.diameter,
        "diameter_bound": diam_bound,
        "part_a": failure is None,
        "part_b": part_b,
    }
    if m >= 2:
        margins["intermediate_bound"] = embedding_bound_intermediate(eps, m, delta)
    return PropertyReport(
        name="R",
        verdict=_verdict(witness is not None, exact),
        coverage="exact" if exact else "sampled",
        witness=witness,
        samples=tested,
        margins=margins,
        flags=flags,
        notes=tuple(notes),
    )


def _induced_edges(H: Graph, mask: int) -> int:
    return sum((_mask_of(H.adjacency[v]) & mask).bit_count() for v in _members(mask)) // 2


def edge_density_check(H: Graph, eps: float, subsets: Sequence[Sequence[int]] | None = None,
                       size_cap: int | None = None, mode: str = "exact", seed: int | None = 0,
                       samples: int | None = None, caps: Caps = DEFAULT_CAPS) -> PropertyReport:
    """|E(H[S])| <= (1 + 7/(eps log_Delta m)) |S| on the tested subsets.

    The condition is additive over components, so the exact scan walks the
    connected subsets up to the size limit.  ``subsets`` replaces the
    scan with an explicit list.
    ``seed=None`` forbids the sampled fallback, as in check_property_R.
    """
    flags = _check_eps(eps, caps)
    delta = H.require_regular()
    if delta < 2:
        raise ParameterError(f"host degree must be >= 2, got {delta}")
    m = H.n
    factor = 1.0 + 7.0 / (eps * log_base(m, delta))
    limit = int(math.floor(m ** (1.0 - eps) + 1e-9))
    if size_cap is not None:
        limit = min(limit, size_cap)
    limit = max(1, limit)
    n_samples = caps.subset_sample_default if samples is None else samples
    notes: list[str] = []

    if subsets is not None:
        masks = [_mask_of(S) for S in subsets]
        if any(mask == 0 for mask in masks):
            raise ParameterError("empty subset")
        coverage, exact = "explicit", True
    elif mode == "exact":
        try:
            masks = connected_subsets(H, limit, caps.subset_scan_cap)
            coverage, exact = "exact", True
        except ResourceError:
            if seed is None:
                raise
            masks = [_mask_of(S) for S in _random_subsets(m, limit, n_samples, seed)]
            coverage, exact = "sampled", False
            notes.append(f"connected subsets exceed {caps.subset_scan_cap}: sampled instead")
    elif mode == "sampled":
        masks = [_mask_of(S) for S in _random_subsets(m, limit, n_samples, seed)]
        coverage, exact = "sampled", False
    else:
        raise ParameterError(f"unknown mode {mode!r}")

    worst_ratio = 0.0
    failure = None
    for mask in masks:
        size = mask.bit_count()
        edges = _induced_edges(H, mask)
        worst_ratio = max(worst_ratio, edges / size)
        if edges > factor * size * (1 + REL_TOL) and (failure is None or mask < failure):
            failure = mask

    witness = None
    if failure is not None:
        members = _members(failure)
        sub, _ = induced_subgraph(H, members)
        if not sub.num_edges > factor * len(members) * (1 + REL_TOL):
            raise VerificationError(f"edge-density witness {members} does not re-check")
        witness = {"S": members, "edges": sub.num_edges, "bound": factor * len(members)}

    return PropertyReport(
        name="edge-density",
        verdict=_verdict(failure is not None, exact),
        coverage=coverage,
        witness=witness,
        samples=len(masks),
        margins={"factor": factor, "max_edges_per_vertex": worst_ratio},
        flags=flags,
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
#  Expansion lemmas
# ---------------------------------------------------------------------------

def _require_spectral_hypothesis(G: Graph, caps: Caps) -> tuple[int, float]:
    d = G.require_regular()
    if d < 3:
        raise PreconditionError(f"degree {d} < 3", hypothesis="d >= 3")
    lam2 = lambda2(G, caps=caps)
    if lam2 > RAMANUJAN_FACTOR * math.sqrt(d - 1) + caps.sandwich_tol:
        raise PreconditionError(
            f"lambda_2 = {lam2:.6f} exceeds 2.1 sqrt(d-1) = {RAMANUJAN_FACTOR * math.sqrt(d - 1):.6f}",
            hypothesis="lambda2")
    return d, lam2


def expansion_lemma_check(G: Graph, xi: float, A: Iterable[int],
                          caps: Caps = DEFAULT_CAPS) -> ExpansionReport:
    """Edge and vertex boundary of A against (xi/(1-xi)) (d/200) |A| and
    (xi/(1-xi)) (1/200) |A|, for |A| <= (1-xi) n."""
    if not 0 < xi < 1:
        raise ParameterError(f"xi must lie in (0, 1), got {xi}")
    d, lam2 = _require_spectral_hypothesis(G, caps)
    members = set(int(v) for v in A)
    if len(members) > (1 - xi) * G.n:
        raise PreconditionError(f"|A| = {len(members)} exceeds (1 - xi) n = {(1 - xi) * G.n}",
                                hypothesis="set size")
    cut = sum(1 for u, v in G.edges if (u in members) != (v in members))
    boundary = sum(1 for v in range(G.n)
                   if v not in members and any(u in members for u in G.adjacency[v]))
    k = xi / (1 - xi)
    cut_bound = k * d / 200.0 * len(members)
    boundary_bound = k / 200.0 * len(members)
    holds = cut >= cut_bound * (1 - REL_TOL) and boundary >= boundary_bound * (1 - REL_TOL)
    report = ExpansionReport(
        name="expansion",
        holds=holds,
        sides={"cut_edges": cut, "cut_bound": cut_bound,
               "boundary": boundary, "boundary_bound": boundary_bound},
        hypotheses={"lambda2": lam2, "set_size": len(members)},
    )
    if not holds:
        raise VerificationError(f"expansion bound failed: {report.sides}")
    return report


def geometric_expansion_check(G: Graph, A: Iterable[int], ell: int,
                              caps: Caps = DEFAULT_CAPS) -> ExpansionReport:
    """|B(A, l)| >= min{15n/16, (1 + 1/3000)^l |A|} under the spectral hypothesis."""
    members = sorted(set(int(v) for v in A))
    if not members:
        raise ParameterError("A must be nonempty")
    if ell < 1:
        raise ParameterError(f"l must be >= 1, got {ell}")
    _, lam2 = _require_spectral_hypothesis(G, caps)
    size = len(ball(G, members, ell))
    rhs = min(15.0 * G.n / 16.0, math.exp(ell * math.log(GROWTH)) * len(members))
    holds = size >= rhs * (1 - REL_TOL)
    report = ExpansionReport("geometric-expansion", holds,
                             {"ball": size, "bound": rhs},
                             {"lambda2": lam2, "l": ell})
    if not holds:
        raise VerificationError(f"geometric expansion failed: {report.sides}")
    return report


def strengthened_expansion_check(G: Graph, alpha: float, S: Iterable[int], ell: int,
                                 caps: Caps = DEFAULT_CAPS) -> ExpansionReport:
    """|B(S, l)| >= min{15n/16, alpha~ (d-1)^l |S|} for G with D(alpha)."""
    members = sorted(set(int(v) for v in S))
    if not members:
        raise ParameterError("S must be nonempty")
    if ell < 1:
        raise ParameterError(f"l must be >= 1, got {ell}")
    d = G.require_regular()
    pre = check_property_D(G, alpha, mode="exact", caps=caps)
    if not pre.passed:
        raise PreconditionError(f"graph fails D({alpha}): {pre.witness}", hypothesis="D(alpha)")
    size = len(ball(G, members, ell))
    ln_at = ln_alpha_tilde(alpha, d)
    ln_rhs = ln_at + ell * math.log(d - 1) + math.log(len(members))
    rhs = min(15.0 * G.n / 16.0, math.exp(ln_rhs) if ln_rhs < 700 else math.inf)
    holds = size >= rhs * (1 - REL_TOL)
    report = ExpansionReport("strengthened-expansion", holds,
                             {"ball": size, "bound": rhs, "ln_alpha_tilde": ln_at},
                             {"D(alpha)": True, "alpha": alpha, "l": ell})
    if not holds:
        raise VerificationError(f"strengthened expansion failed: {report.sides}")
    return report
