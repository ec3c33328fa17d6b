"""
Spectral Gap Lab — Spectral
===========================

Adjacency spectrum by a dense cyclic Jacobi eigensolver, lambda_2, the
exact Cheeger constant by a Gray-code subset scan, the Cheeger sandwich

    (d - lambda_2)/2  <=  h(G)  <=  sqrt(2 d (d - lambda_2))

and the Euclidean Poincaré constant of a regular graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from config import DEFAULT_CAPS, Caps
from errors import DegenerateError, NumericError, ParameterError, ResourceError
from graph_core import Graph


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple[float, ...]          # descending
    rotations: int = 0
    residual: float = 0.0

    @property
    def lambda1(self) -> float:
        return self.eigenvalues[0]

    @property
    def lambda2(self) -> float:
        if len(self.eigenvalues) < 2:
            raise ParameterError("lambda_2 needs at least two vertices")
        return self.eigenvalues[1]

    def to_dict(self) -> dict[str, Any]:
        return {
            "eigenvalues": list(self.eigenvalues),
            "rotations": self.rotations,
            "residual": self.residual,
        }


@dataclass(frozen=True)
class CheegerCut:
    value: float
    cut_edges: int
    subset: tuple[int, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"h": self.value, "cut_edges": self.cut_edges, "subset": list(self.subset)}


@dataclass(frozen=True)
class CheegerSandwich:
    lower: float
    h: float
    upper: float
    passed: bool

    def __iter__(self):
        return iter((self.lower, self.h, self.upper, self.passed))

    def to_dict(self) -> dict[str, Any]:
        return {"lower": self.lower, "h": self.h, "upper": self.upper, "pass": self.passed}


# ---------------------------------------------------------------------------
#  Jacobi eigensolver
# ---------------------------------------------------------------------------

def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(math.sqrt(float(np.sum(off * off))))


def jacobi_eigenvalues(matrix: np.ndarray, tol: float = 1e-10,
                       max_rotations: int | None = None) -> tuple[np.ndarray, int, float]:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi sweeps.

    Returns ``(eigenvalues descending, rotations used, final off-diagonal
    Frobenius norm)``.  Raises NumericError if the rotation budget
    (default 100 n^2) runs out before the off-diagonal norm drops below
    ``tol``.
    """
    a = np.array(matrix, dtype=float, copy=True)
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), 0, 0.0
    if max_rotations is None:
        max_rotations = 100 * n * n
    rotations = 0
    off = _off_norm(a)
    while off >= tol:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                if rotations >= max_rotations:
                    raise NumericError(
                        f"Jacobi did not converge in {max_rotations} rotations",
                        residual=_off_norm(a))
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                rotations += 1
        off = _off_norm(a)
    return np.sort(np.diag(a))[::-1], rotations, off


def adjacency_spectrum(g: Graph, tol: float | None = None,
                       caps: Caps = DEFAULT_CAPS) -> Spectrum:
    if g.n > caps.dense_solver_cap:
        raise ResourceError(f"dense eigensolver capped at n <= {caps.dense_solver_cap}",
                            cap=caps.dense_solver_cap, requested=g.n)
    vals, rotations, residual = jacobi_eigenvalues(
        g.adjacency_matrix(), tol=caps.jacobi_tol if tol is None else tol)
    spectrum = Spectrum(tuple(float(x) for x in vals), rotations, residual)
    _check_spectrum(g, spectrum, caps)
    return spectrum


def _check_spectrum(g: Graph, spectrum: Spectrum, caps: Caps) -> None:
    """Adjacency spectra have trace 0 and, for d-regular graphs, lambda_1 = d."""
    slack = caps.spectrum_tol * max(1, g.n)
    total = math.fsum(spectrum.eigenvalues)
    if abs(total) > slack:
        raise NumericError(f"eigenvalues sum to {total}, not 0", residual=abs(total))
    if g.degree is not None and spectrum.eigenvalues:
        gap = abs(spectrum.eigenvalues[0] - g.degree)
        if gap > slack:
            raise NumericError(f"lambda_1 = {spectrum.eigenvalues[0]} differs from d = {g.degree}",
                               residual=gap)


def lambda2(g: Graph, tol: float | None = None, caps: Caps = DEFAULT_CAPS) -> float:
    return adjacency_spectrum(g, tol, caps).lambda2


# ---------------------------------------------------------------------------
#  Cheeger constant
# ---------------------------------------------------------------------------

def cheeger_cut(g: Graph, caps: Caps = DEFAULT_CAPS) -> CheegerCut:
    """Exact minimiser of |E(S, S^c)|/|S| over 0 < |S| <= n/2.

    Subsets are visited in reflected Gray-code order, so each step flips
    one vertex and the cut count is updated from its neighbourhood mask.
    Ties keep the first subset met in that order.
    """
    n = g.n
    if n > caps.cheeger_cap:
        raise ResourceError(f"Cheeger scan capped at n <= {caps.cheeger_cap}",
                            cap=caps.cheeger_cap, requested=n)
    if n < 2:
        raise ParameterError("Cheeger constant needs at least two vertices")
    nbr = [sum(1 << u for u in g.adjacency[v]) for v in range(n)]
    deg = [len(g.adjacency[v]) for v in range(n)]
    half = n // 2
    mask = size = cut = 0
    best_cut, best_size, best_mask = -1, 1, 0
    for i in range(1, 1 << n):
        v = (i & -i).bit_length() - 1
        bit = 1 << v
        inside = (nbr[v] & mask).bit_count()
        if mask & bit:
            mask ^= bit
            size -= 1
            cut -= deg[v] - 2 * inside
        else:
            mask |= bit
            size += 1
            cut += deg[v] - 2 * inside
        if 0 < size <= half and (best_cut < 0 or cut * best_size < best_cut * size):
            best_cut, best_size, best_mask = cut, size, mask
    subset = tuple(v for v in range(n) if best_mask >> v & 1)
    return CheegerCut(best_cut / best_size, best_cut, subset)


def cheeger_exact(g: Graph, caps: Caps = DEFAULT_CAPS) -> float:
    return cheeger_cut(g, caps).value


def cheeger_sandwich_check(g: Graph, caps: Caps = DEFAULT_CAPS) -> CheegerSandwich:
    d = g.require_regular()
    lam2 = lambda2(g, caps=caps)
    gap = max(0.0, d - lam2)
    h = cheeger_exact(g, caps)
    lower = gap / 2.0
    upper = math.sqrt(2.0 * d * gap)
    tol = caps.sandwich_tol
    return CheegerSandwich(lower, h, upper, lower <= h + tol and h <= upper + tol)


# ---------------------------------------------------------------------------
#  Euclidean Poincaré constant
# ---------------------------------------------------------------------------

def _spectral_gap(g: Graph, caps: Caps) -> tuple[int, float]:
    d = g.require_regular()
    gap = d - lambda2(g, caps=caps)
    if gap <= 1e-8 * max(1, d):
        raise DegenerateError("lambda_2 = d: graph is disconnected, gamma is infinite")
    return d, gap


def classical_gamma(g: Graph, caps: Caps = DEFAULT_CAPS) -> float:
    """d/(d - lambda_2): the best constant for squared Euclidean distances
    under the ordered-pair average (1/n^2) sum_{u,v}."""
    d, gap = _spectral_gap(g, caps)
    return d / gap


def classical_gamma_as_stated(g: Graph, caps: Caps = DEFAULT_CAPS) -> float:
    """d/(2(d - lambda_2)), half of :func:`classical_gamma`.

    This is the form usually quoted; it is reported next to the ordered-pair
    value but never used as an upper bound, since K_n already exceeds it.
    """
    d, gap = _spectral_gap(g, caps)
    return d / (2.0 * gap)
