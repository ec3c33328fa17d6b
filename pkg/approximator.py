"""
Spectral Gap Lab — Universal Approximator
=========================================

Quotient construction of a multigraph U_k on k points from a 3-regular
graph on 2k vertices: pair the vertices into blocks A_0, ..., A_{k-1}
and send every edge {u, v} to {block(u), block(v)} (a loop when both ends
share a block).  U_k keeps exactly the 3k edges of its source.

For a point tuple x in M^k with

    A = k^-2 sum_{i,j} dist(x_i, x_j)^p
    B = |E_U|^-1 sum_{{i,j} in E_U} dist(x_i, x_j)^p

U is a D-universal approximator when one scaling s satisfies
A <= s B <= D A for every tuple, i.e. when max A/B <= D min A/B.  The
spread max(A/B) / min(A/B) is therefore the smallest admissible D over
the tested tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from config import DEFAULT_CAPS, Caps
from constants import ln_gamma
from errors import DegenerateError, ParameterError, VerificationError
from graph_core import Graph, MetricMatrix, Multigraph, make_rng, sample_regular_graph
from poincare import power


Pairing = tuple[tuple[int, int], ...]

_CHUNK_CELLS = 1 << 22


# ---------------------------------------------------------------------------
#  Reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ApproximatorReport:
    k: int
    p: float
    edge_count: int
    edge_bound: int                       # max(3k, k0^2)
    spread: float
    ratio_min: float
    ratio_max: float
    coverage: str                         # exhaustive | sampled
    tuples: int
    degenerate: int = 0                   # A = 0
    unbounded: int = 0                    # B = 0 < A
    D: float | None = None
    ln_D: float | None = None
    s_interval: tuple[float, float] | None = None
    verdict: bool | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k, "p": self.p,
            "edge_count": self.edge_count,
            "edge_bound": self.edge_bound,
            "spread": self.spread,
            "ratio_range": [self.ratio_min, self.ratio_max],
            "coverage": self.coverage,
            "tuples": self.tuples,
            "degenerate": self.degenerate,
            "unbounded": self.unbounded,
            "D": self.D, "ln_D": self.ln_D,
            "s_interval": list(self.s_interval) if self.s_interval else None,
            "verdict": self.verdict,
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class QuotientCheck:
    lhs: float
    rhs: float
    passed: bool

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.passed))

    def to_dict(self) -> dict[str, Any]:
        return {"lhs": self.lhs, "rhs": self.rhs, "pass": self.passed}


@dataclass(frozen=True)
class TwoSidedCheck:
    passed: bool
    A: float
    B: float
    left: bool                            # A <= s B
    right: bool                           # s B <= D A

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict[str, Any]:
        return {"pass": self.passed, "A": self.A, "B": self.B,
                "left": self.left, "right": self.right}


# ---------------------------------------------------------------------------
#  Construction
# ---------------------------------------------------------------------------

def _cubic_order(g2k: Graph) -> int:
    if g2k.degree != 3 or g2k.n % 2 or g2k.n < 4:
        raise ParameterError(f"source must be 3-regular on 2k >= 4 vertices, "
                             f"got n={g2k.n}, degree={g2k.degree}")
    return g2k.n // 2


def consecutive_pairing(k: int) -> Pairing:
    return tuple((2 * i, 2 * i + 1) for i in range(k))


def random_pairing(k: int, seed: int) -> Pairing:
    perm = make_rng(seed).permutation(2 * k)
    pairs = [tuple(sorted((int(perm[2 * i]), int(perm[2 * i + 1])))) for i in range(k)]
    return tuple(sorted(pairs))


def _blocks(pairing: Sequence[Sequence[int]], n: int) -> list[int]:
    block = [-1] * n
    for i, pair in enumerate(pairing):
        if len(pair) != 2:
            raise ParameterError(f"block {i} has {len(pair)} vertices")
        for v in pair:
            if not 0 <= v < n or block[v] != -1:
                raise ParameterError(f"pairing is not a partition of 0..{n - 1}")
            block[v] = i
    if -1 in block:
        raise ParameterError(f"pairing is not a partition of 0..{n - 1}")
    return block


def build_universal_approximator(g2k: Graph, pairing: Sequence[Sequence[int]] | None = None,
                                 seed: int | None = None) -> tuple[Multigraph, Pairing]:
    """U_k from a 3-regular graph on 2k vertices.

    Without an explicit pairing the blocks are {2i, 2i+1}; with ``seed``
    a uniformly random pairing is drawn instead.
    """
    k = _cubic_order(g2k)
    if pairing is None:
        pairing = consecutive_pairing(k) if seed is None else random_pairing(k, seed)
    pairing = tuple((int(a), int(b)) for a, b in pairing)
    if len(pairing) != k:
        raise ParameterError(f"pairing has {len(pairing)} blocks, need {k}")
    block = _blocks(pairing, g2k.n)
    U = Multigraph(k, tuple((block[u], block[v]) for u, v in g2k.edges))
    if U.num_edges != 3 * k:
        raise VerificationError(f"quotient has {U.num_edges} edges, expected {3 * k}")
    return U, pairing


def complete_multigraph(k: int) -> Multigraph:
    return Multigraph(k, tuple((i, j) for i in range(k) for j in range(i + 1, k)))


def approximator_for(k: int, k0: int | None = None, seed: int = 0,
                     caps: Caps = DEFAULT_CAPS) -> tuple[Multigraph, Pairing | None, Graph | None]:
    """U_k for k points: the complete graph when k < k0 or k == 1, else the
    quotient of a sampled G(2k, 3)."""
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    k0 = caps.approximator_k0 if k0 is None else k0
    if k < k0 or k == 1:
        return complete_multigraph(k), None, None
    g2k = sample_regular_graph(2 * k, 3, seed)
    U, pairing = build_universal_approximator(g2k)
    return U, pairing, g2k


# ---------------------------------------------------------------------------
#  Identities and spread
# ---------------------------------------------------------------------------

def _check_points(points: Sequence[int], k: int, M: MetricMatrix) -> np.ndarray:
    x = np.asarray(points, dtype=np.int64)
    if x.shape != (k,):
        raise ParameterError(f"expected {k} points, got {len(points)}")
    if k and (x.min() < 0 or x.max() >= M.k):
        raise ParameterError(f"points must index 0..{M.k - 1}")
    return x


def quotient_identity_check(g2k: Graph, U: Multigraph, pairing: Sequence[Sequence[int]],
                            points: Sequence[int], M: MetricMatrix, p: float = 1.0) -> QuotientCheck:
    """Edge sum of the lift f(v) = x_block(v) over the source against the
    edge sum of x over U; both are the same multiset of terms."""
    if U.k * 2 != g2k.n:
        raise ParameterError(f"U has {U.k} points but the source has {g2k.n} vertices")
    x = _check_points(points, U.k, M)
    block = _blocks(pairing, g2k.n)
    pw = power(M.dist, p)
    lifted = x[np.asarray(block, dtype=np.int64)]
    src = g2k.edge_array()
    lhs = math.fsum(pw[lifted[src[:, 0]], lifted[src[:, 1]]].tolist())
    ue = U.edge_array()
    rhs = math.fsum(pw[x[ue[:, 0]], x[ue[:, 1]]].tolist())
    passed = abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))
    if not passed:
        raise VerificationError(f"quotient identity broken: {lhs!r} != {rhs!r}")
    return QuotientCheck(lhs, rhs, passed)


def _averages(pw: np.ndarray, U: Multigraph, tuples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k = U.k
    A = pw[tuples[:, :, None], tuples[:, None, :]].sum(axis=(1, 2)) / (k * k)
    ue = U.edge_array()
    if len(ue):
        B = pw[tuples[:, ue[:, 0]], tuples[:, ue[:, 1]]].sum(axis=1) / len(ue)
    else:
        B = np.zeros(len(tuples))
    return A, B


def _tuple_chunks(U: Multigraph, m: int, trials: int, seed: int,
                  exhaustive: bool):
    k = U.k
    rows = max(1, _CHUNK_CELLS // max(1, k * k))
    if exhaustive:
        total = m ** k
        radix = m ** np.arange(k - 1, -1, -1, dtype=np.int64)
        for start in range(0, total, rows):
            idx = np.arange(start, min(total, start + rows), dtype=np.int64)
            yield (idx[:, None] // radix[None, :]) % m
        return
    extremal = []
    if m >= k:
        extremal.append(np.arange(k, dtype=np.int64))
    if m >= 2:
        for i in range(k):
            t = np.zeros(k, dtype=np.int64)
            t[i] = 1
            extremal.append(t)
    if extremal:
        yield np.stack(extremal)
    rng = make_rng(seed)
    for start in range(0, trials, rows):
        yield rng.integers(0, m, size=(min(rows, trials - start), k), dtype=np.int64)


def approximator_spread(U: Multigraph, M: MetricMatrix, p: float = 1.0, trials: int = 1000,
                        seed: int | None = 0, D: float | None = None, ln_D: float | None = None,
                        k0: int | None = None, caps: Caps = DEFAULT_CAPS) -> ApproximatorReport:
    """Spread of A/B over point tuples of M^k.

    Every tuple is tried when m^k <= ``caps.tuple_enum_cap``; otherwise
    ``trials`` uniform tuples plus the all-distinct tuple and the k
    single-outlier tuples.  Tuples with A = 0 are excluded and counted;
    tuples with B = 0 < A make the spread infinite.  The verdict against
    ``D`` (or ``ln_D`` for factors beyond double range) is spread <= D.
    Sampling with ``seed=None`` is refused.
    """
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    if not M.is_finite:
        raise ParameterError("host metric must be finite")
    if p < 1:
        raise ParameterError(f"exponent p must be >= 1, got {p}")
    k, m = U.k, M.k
    exhaustive = m ** k <= caps.tuple_enum_cap
    if not exhaustive and seed is None:
        raise ParameterError(f"m^k = {m}^{k} exceeds {caps.tuple_enum_cap}: "
                             "sampled tuples need an explicit seed")
    pw = power(M.dist, p)

    lo, hi = math.inf, 0.0
    count = degenerate = unbounded = 0
    for chunk in _tuple_chunks(U, m, trials, seed, exhaustive):
        A, B = _averages(pw, U, chunk)
        count += len(chunk)
        dead = A <= 0
        degenerate += int(dead.sum())
        inf_rows = (~dead) & (B <= 0)
        unbounded += int(inf_rows.sum())
        live = (~dead) & (B > 0)
        if live.any():
            r = A[live] / B[live]
            lo = min(lo, float(r.min()))
            hi = max(hi, float(r.max()))
    if unbounded == 0 and hi == 0.0:
        raise DegenerateError("every tested tuple is degenerate")

    notes: list[str] = []
    if unbounded:
        spread = math.inf
        hi = math.inf
        notes.append(f"{unbounded} tuple(s) have zero edge average with positive pair average")
    else:
        spread = hi / lo
    if not exhaustive:
        notes.append(f"sampled {trials} tuples: m^k = {m}^{k} exceeds {caps.tuple_enum_cap}")

    k0 = caps.approximator_k0 if k0 is None else k0
    verdict = s_interval = None
    if ln_D is not None:
        verdict = spread < math.inf and math.log(spread) <= ln_D + 1e-12
        upper = lo * math.exp(ln_D) if ln_D < 709.0 else math.inf
        s_interval = (hi, upper)
    elif D is not None:
        verdict = spread <= D * (1 + 1e-12)
        s_interval = (hi, D * lo)
    return ApproximatorReport(
        k=k, p=p,
        edge_count=U.num_edges,
        edge_bound=max(3 * k, k0 * k0),
        spread=spread, ratio_min=lo, ratio_max=hi,
        coverage="exhaustive" if exhaustive else "sampled",
        tuples=count, degenerate=degenerate, unbounded=unbounded,
        D=D, ln_D=ln_D, s_interval=s_interval, verdict=verdict,
        notes=tuple(notes),
    )


def ln_universal_factor(p: float = 1.0) -> float:
    """ln(2^p Gamma(3, p)), the factor the quotient construction achieves."""
    return p * math.log(2.0) + ln_gamma(3, p)


def two_sided_check(U: Multigraph, M: MetricMatrix, p: float, D: float, s: float,
                    points: Sequence[int]) -> TwoSidedCheck:
    """A <= s B <= D A for one tuple."""
    x = _check_points(points, U.k, M)
    A, B = _averages(power(M.dist, p), U, x[None, :])
    a, b = float(A[0]), float(B[0])
    tol = 1e-12 * max(1.0, a)
    left = a <= s * b + tol
    right = s * b <= D * a + tol
    return TwoSidedCheck(left and right, a, b, left, right)
