"""
Spectral Gap Lab — Cut Embeddings
=================================

Exact minimum L1 distortion of a small finite metric through the cut-cone
linear program

    minimize    D
    subject to  sum_C w_C delta_C(i, j)  >=  rho(i, j)          (i < j)
                sum_C w_C delta_C(i, j) - D rho(i, j)  <=  0
                w >= 0

where C ranges over the 2^(k-1) - 1 cuts that contain point 0.  The LP is
solved by an in-module two-phase dense simplex with Bland's rule, and the
returned certificate is checked independently of the solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from config import DEFAULT_CAPS, Caps
from errors import (InfeasibleError, NumericError, ParameterError, ResourceError,
                    UnboundedError)
from graph_core import MetricMatrix


RELATIONS = ("<=", ">=", "=")


# ---------------------------------------------------------------------------
#  Linear programs
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LinearProgram:
    """minimize c.x subject to rows (A x) rel b, x >= 0."""
    c: np.ndarray
    A: np.ndarray
    relations: tuple[str, ...]
    b: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.c, dtype=float).ravel()
        A = np.asarray(self.A, dtype=float).reshape(-1, c.size)
        b = np.asarray(self.b, dtype=float).ravel()
        if A.shape[0] != b.size or len(self.relations) != b.size:
            raise ParameterError(
                f"inconsistent LP dimensions: A {A.shape}, b {b.size}, relations {len(self.relations)}")
        for r in self.relations:
            if r not in RELATIONS:
                raise ParameterError(f"unknown relation {r!r}")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "relations", tuple(self.relations))

    @property
    def num_vars(self) -> int:
        return self.c.size

    def residual(self, x: np.ndarray) -> float:
        """Largest constraint or bound violation of ``x``."""
        ax = self.A @ x
        worst = float(max(0.0, -float(x.min()))) if x.size else 0.0
        for r, lhs, rhs in zip(self.relations, ax, self.b):
            if r == "<=":
                worst = max(worst, lhs - rhs)
            elif r == ">=":
                worst = max(worst, rhs - lhs)
            else:
                worst = max(worst, abs(lhs - rhs))
        return float(worst)


@dataclass(frozen=True, eq=False)
class LPResult:
    value: float
    x: np.ndarray
    pivots: int

    def __iter__(self):
        return iter((self.value, self.x))


def _pivot(t: np.ndarray, row: int, col: int) -> None:
    t[row] /= t[row, col]
    factors = t[:, col].copy()
    factors[row] = 0.0
    t -= np.outer(factors, t[row])


def _run_simplex(t: np.ndarray, basis: list[int], ncols: int, tol: float,
                 max_pivots: int, pivots: int) -> int:
    """Bland's rule on tableau ``t`` (objective in the last row)."""
    while True:
        reduced = t[-1, :ncols]
        entering = np.flatnonzero(reduced < -tol)
        if entering.size == 0:
            return pivots
        col = int(entering[0])
        column = t[:-1, col]
        candidates = np.flatnonzero(column > tol)
        if candidates.size == 0:
            raise UnboundedError("LP objective is unbounded below")
        ratios = t[candidates, -1] / column[candidates]
        best = ratios.min()
        tied = candidates[ratios <= best + tol * max(1.0, abs(best))]
        row = int(min(tied, key=lambda r: basis[r]))
        _pivot(t, row, col)
        basis[row] = col
        pivots += 1
        if pivots > max_pivots:
            raise NumericError(f"simplex exceeded {max_pivots} pivots")


def simplex_solve(lp: LinearProgram, tol: float = 1e-9, max_pivots: int = 200_000) -> LPResult:
    """Two-phase dense simplex with Bland's anti-cycling rule.

    Phase I minimises the sum of artificial variables attached to every
    ``>=`` and ``=`` row (after flipping rows so that b >= 0).  Artificials
    left basic at level zero are pivoted out, or their row dropped when it
    is redundant.  Phase II then optimises the real objective.
    """
    A = lp.A.copy()
    b = lp.b.copy()
    rel = list(lp.relations)
    for i in range(b.size):
        if b[i] < 0:
            A[i] *= -1.0
            b[i] *= -1.0
            rel[i] = {"<=": ">=", ">=": "<=", "=": "="}[rel[i]]

    m, n = A.shape
    n_slack = sum(1 for r in rel if r != "=")
    n_art = sum(1 for r in rel if r != "<=")
    width = n + n_slack + n_art
    t = np.zeros((m + 1, width + 1))
    t[:m, :n] = A
    t[:m, -1] = b
    basis: list[int] = []
    s_col, a_col = n, n + n_slack
    art_cols = []
    for i, r in enumerate(rel):
        if r == "<=":
            t[i, s_col] = 1.0
            basis.append(s_col)
            s_col += 1
            continue
        if r == ">=":
            t[i, s_col] = -1.0
            s_col += 1
        t[i, a_col] = 1.0
        basis.append(a_col)
        art_cols.append(a_col)
        a_col += 1

    pivots = 0
    if art_cols:
        t[-1, art_cols] = 1.0
        for i, bv in enumerate(basis):
            if bv in art_cols:
                t[-1] -= t[i]
        pivots = _run_simplex(t, basis, width, tol, max_pivots, pivots)
        infeas = -t[-1, -1]
        if infeas > tol * max(1.0, float(np.abs(b).max(initial=0.0))) * 10:
            raise InfeasibleError(f"LP is infeasible (phase I optimum {infeas:.3e})")
        first_art = n + n_slack
        keep = []
        for i in range(m):
            if basis[i] >= first_art:
                nonzero = np.flatnonzero(np.abs(t[i, :first_art]) > tol)
                if nonzero.size:
                    _pivot(t, i, int(nonzero[0]))
                    basis[i] = int(nonzero[0])
                    keep.append(i)
            else:
                keep.append(i)
        t = np.vstack([t[keep][:, list(range(first_art)) + [width]], np.zeros((1, first_art + 1))])
        basis = [basis[i] for i in keep]
        width = first_art
        m = len(keep)

    cost = np.zeros(width)
    cost[:n] = lp.c
    t[-1, :] = 0.0
    t[-1, :width] = cost
    for i, bv in enumerate(basis):
        if cost[bv] != 0.0:
            t[-1] -= cost[bv] * t[i]
    pivots = _run_simplex(t, basis, width, tol, max_pivots, pivots)

    x_full = np.zeros(width)
    for i, bv in enumerate(basis):
        x_full[bv] = t[i, -1]
    x = np.maximum(x_full[:n], 0.0)
    scale = max(1.0, float(np.abs(lp.b).max(initial=0.0)))
    res = lp.residual(x)
    if res > 1e3 * tol * scale:
        raise NumericError(f"simplex solution violates constraints by {res:.3e}", residual=res)
    return LPResult(float(lp.c @ x), x, pivots)


# ---------------------------------------------------------------------------
#  Cut embeddings
# ---------------------------------------------------------------------------

def cut_masks(k: int) -> np.ndarray:
    """Bitmasks of the 2^(k-1) - 1 nonempty proper cuts containing point 0."""
    if k < 2:
        return np.zeros(0, dtype=np.int64)
    rest = np.arange((1 << (k - 1)) - 1, dtype=np.int64)
    return (rest << 1) | 1


def _separation(masks: np.ndarray, k: int) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """(pairs x cuts) 0/1 matrix: entry 1 iff the cut separates the pair."""
    bits = (masks[:, None] >> np.arange(k)[None, :]) & 1
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    if not pairs:
        return np.zeros((0, masks.size)), pairs
    ii = np.array([p[0] for p in pairs])
    jj = np.array([p[1] for p in pairs])
    return (bits[:, ii] != bits[:, jj]).T.astype(float), pairs


@dataclass(frozen=True, eq=False)
class CutEmbedding:
    k: int
    cuts: tuple[int, ...]                 # bitmasks, point 0 inside
    weights: np.ndarray
    distortion: float
    notes: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float).ravel()
        if w.size != len(self.cuts):
            raise ParameterError("one weight per cut required")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "cuts", tuple(int(c) for c in self.cuts))

    @classmethod
    def from_cuts(cls, k: int, cuts: Iterable[tuple[Iterable[int], float]],
                  distortion: float) -> "CutEmbedding":
        """Build from (vertex set, weight) pairs; sets are complemented so
        that they contain point 0."""
        full = (1 << k) - 1
        masks, weights = [], []
        for members, w in cuts:
            mask = sum(1 << int(v) for v in set(members))
            if mask in (0, full):
                raise ParameterError("cuts must be nonempty proper subsets")
            if not mask & 1:
                mask = full ^ mask
            masks.append(mask)
            weights.append(float(w))
        return cls(k, tuple(masks), np.array(weights), float(distortion))

    def realized(self) -> np.ndarray:
        """k x k L1 distances sum_C w_C delta_C(i, j) of the embedding."""
        out = np.zeros((self.k, self.k))
        if not self.cuts:
            return out
        masks = np.array(self.cuts, dtype=np.int64)
        bits = (masks[:, None] >> np.arange(self.k)[None, :]) & 1
        for w, row in zip(self.weights, bits):
            if w:
                out += w * (row[:, None] != row[None, :])
        return out

    def support(self, tol: float = 0.0) -> list[tuple[list[int], float]]:
        return [([v for v in range(self.k) if c >> v & 1], float(w))
                for c, w in zip(self.cuts, self.weights) if w > tol]

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "distortion": self.distortion,
            "cuts": [{"set": s, "weight": w} for s, w in self.support()],
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class EmbeddingCheck:
    ok: bool
    pair: tuple[int, int] | None = None
    side: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify_embedding(M: MetricMatrix, emb: CutEmbedding, tol: float = 1e-6) -> EmbeddingCheck:
    """Check rho <= sigma <= D rho on every pair, tolerance relative to rho.

    A failed check carries the first violating pair in (i, j) order and
    which side of the chain broke ("lower", "upper" or "weights").
    """
    if M.k != emb.k:
        raise ParameterError(f"metric has {M.k} points, embedding {emb.k}")
    if emb.weights.size and float(emb.weights.min()) < -tol:
        return EmbeddingCheck(False, None, "weights")
    sigma = emb.realized()
    rho = M.dist
    for i in range(M.k):
        for j in range(i + 1, M.k):
            slack = tol * max(1.0, rho[i, j])
            if rho[i, j] > sigma[i, j] + slack:
                return EmbeddingCheck(False, (i, j), "lower")
            if sigma[i, j] > emb.distortion * rho[i, j] + slack:
                return EmbeddingCheck(False, (i, j), "upper")
    return EmbeddingCheck(True)


def distortion_lp(M: MetricMatrix) -> tuple[LinearProgram, np.ndarray]:
    """The cut-cone LP for ``M`` (normalised to max distance 1) and its cuts."""
    k = M.k
    masks = cut_masks(k)
    sep, pairs = _separation(masks, k)
    rho = np.array([M.dist[i, j] for i, j in pairs])
    rho = rho / rho.max()
    n_cuts = masks.size
    n_pairs = len(pairs)
    A = np.zeros((2 * n_pairs, n_cuts + 1))
    A[:n_pairs, :n_cuts] = sep
    A[n_pairs:, :n_cuts] = sep
    A[n_pairs:, n_cuts] = -rho
    c = np.zeros(n_cuts + 1)
    c[-1] = 1.0
    rel = (">=",) * n_pairs + ("<=",) * n_pairs
    b = np.concatenate([rho, np.zeros(n_pairs)])
    return LinearProgram(c, A, rel, b), masks


def min_l1_distortion(M: MetricMatrix, caps: Caps = DEFAULT_CAPS) -> tuple[float, CutEmbedding]:
    """Exact c_{L1}(M) with a certificate that passes :func:`verify_embedding`.

    The simplex weights are rescaled so the lower chain holds exactly, and
    the reported D is the largest sigma/rho of the rescaled certificate.
    """
    k = M.k
    if k > caps.lp_point_cap:
        raise ResourceError(f"cut LP capped at k <= {caps.lp_point_cap} points",
                            cap=caps.lp_point_cap, requested=k)
    if k <= 1:
        return 1.0, CutEmbedding(k, (), np.zeros(0), 1.0)
    off = M.dist[~np.eye(k, dtype=bool)]
    if not np.all(np.isfinite(off)):
        raise ParameterError("metric has infinite distances")
    if np.any(off <= 0):
        raise ParameterError("metric has a zero off-diagonal distance")

    lp, masks = distortion_lp(M)
    result = simplex_solve(lp, tol=caps.lp_tol)
    weights = result.x[:-1]
    sep, pairs = _separation(masks, k)
    rho = np.array([M.dist[i, j] for i, j in pairs])
    sigma = sep @ weights
    if np.any(sigma <= 0):
        raise NumericError("LP weights leave a pair unseparated", residual=float(sigma.min()))
    weights = weights * float(np.max(rho / sigma))
    sigma = sep @ weights
    D = max(1.0, float(np.max(sigma / rho)))
    emb = CutEmbedding(k, tuple(int(c) for c in masks), weights, D)
    check = verify_embedding(M, emb, caps.certificate_tol)
    if not check:
        raise NumericError(f"certificate failed on pair {check.pair} ({check.side})")
    return D, emb


def metric_from_points(points: Sequence[Sequence[float]], ord: float = 1) -> MetricMatrix:
    """Metric of a point cloud under the given vector norm (default L1)."""
    x = np.asarray(points, dtype=float)
    diff = x[:, None, :] - x[None, :, :]
    return MetricMatrix(np.linalg.norm(diff, ord=ord, axis=-1))
