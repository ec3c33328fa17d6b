"""
Spectral Gap Lab — Graph Core
=============================

Simple undirected graphs on {0, ..., n-1}, the uniform random regular
graph sampler (pairing model with full restarts), exhaustive enumeration
of labeled regular graphs at tiny sizes, BFS shortest-path metrics,
induced subgraphs and balls B_G(S, l).

Graph files are JSON::

    {"n": 4, "edges": [[0, 1], [0, 2], ...]}

with 0-based labels, u < v, sorted lexicographically.  Multigraph files
use the same layout and keys and allow repeated pairs and u == v, so
load_multigraph also reads a graph file.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from config import DEFAULT_CAPS, Caps
from errors import DegenerateError, ParameterError, ResourceError


INF = math.inf


# ---------------------------------------------------------------------------
#  Randomness
# ---------------------------------------------------------------------------

def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """PCG64 generator for ``seed``; extra keys derive independent streams."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(k) & 0xFFFFFFFFFFFFFFFF for k in keys]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def derive_seed(seed: int, *keys: int) -> int:
    """A 64-bit seed derived from ``seed`` and ``keys`` (stable across runs)."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(k) & 0xFFFFFFFFFFFFFFFF for k in keys]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0])


# ---------------------------------------------------------------------------
#  Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Graph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]
    degree: int | None = None

    def __post_init__(self) -> None:
        if self.n < 0 or len(self.adjacency) != self.n:
            raise ParameterError(f"adjacency has {len(self.adjacency)} rows for n={self.n}")
        for v, nbrs in enumerate(self.adjacency):
            if len(set(nbrs)) != len(nbrs):
                raise ParameterError(f"duplicate neighbour at vertex {v}")
            for u in nbrs:
                if not 0 <= u < self.n:
                    raise ParameterError(f"neighbour {u} of {v} out of range")
                if u == v:
                    raise ParameterError(f"self-loop at vertex {v}")
                if v not in self.adjacency[u]:
                    raise ParameterError(f"asymmetric adjacency: {v}->{u}")
        if self.degree is not None:
            if any(len(nbrs) != self.degree for nbrs in self.adjacency):
                raise ParameterError(f"graph is not {self.degree}-regular")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        """Build from an edge list; rejects loops and duplicate edges."""
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ParameterError(f"self-loop at vertex {u}")
            if v in nbrs[u]:
                raise ParameterError(f"duplicate edge ({min(u, v)}, {max(u, v)})")
            nbrs[u].add(v)
            nbrs[v].add(u)
        adjacency = tuple(tuple(sorted(s)) for s in nbrs)
        degrees = {len(s) for s in adjacency}
        degree = degrees.pop() if len(degrees) == 1 and n > 0 else None
        return cls(n=n, adjacency=adjacency, degree=degree)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(v, u) for v in range(self.n) for u in self.adjacency[v] if v < u]

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def require_regular(self) -> int:
        if self.degree is None:
            raise ParameterError("graph is not regular")
        return self.degree

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=float)
        for v, u in self.edges:
            a[v, u] = a[u, v] = 1.0
        return a

    def edge_array(self) -> np.ndarray:
        """Edges as an (|E|, 2) int array in canonical order."""
        return np.array(self.edges, dtype=np.int64).reshape(-1, 2)

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Graph":
        edges = []
        for e in data["edges"]:
            u, v = int(e[0]), int(e[1])
            edges.append((min(u, v), max(u, v)))
        return cls.from_edges(int(data["n"]), edges)


@dataclass(frozen=True, eq=False)
class MetricMatrix:
    dist: np.ndarray

    def __post_init__(self) -> None:
        d = np.array(self.dist, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ParameterError(f"metric matrix must be square, got shape {d.shape}")
        d.setflags(write=False)
        object.__setattr__(self, "dist", d)

    @property
    def k(self) -> int:
        return int(self.dist.shape[0])

    @property
    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.dist)))

    def check(self, tol: float = 1e-9) -> tuple[int, int, int] | None:
        """First violated (i, j, l) of the metric axioms, or None.

        (i, i, i) flags a nonzero diagonal, (i, j, j) an asymmetric pair,
        otherwise (i, j, l) with dist(i, j) > dist(i, l) + dist(l, j).
        """
        d = self.dist
        for i in range(self.k):
            if d[i, i] != 0:
                return (i, i, i)
            for j in range(self.k):
                if d[i, j] != d[j, i] or d[i, j] < 0:
                    return (i, j, j)
        for l in range(self.k):
            via = d[:, l][:, None] + d[l, :][None, :]
            bad = np.argwhere(np.isfinite(via) & (d > via + tol))
            if len(bad):
                i, j = bad[0]
                return (int(i), int(j), l)
        return None

    def restrict(self, points: Sequence[int]) -> "MetricMatrix":
        idx = np.asarray(points, dtype=np.int64)
        return MetricMatrix(self.dist[np.ix_(idx, idx)])

    def scaled(self, c: float) -> "MetricMatrix":
        return MetricMatrix(self.dist * c)

    def to_dict(self) -> dict[str, Any]:
        return {"k": self.k, "dist": [[float(x) for x in row] for row in self.dist]}

    @classmethod
    def two_point(cls, distance: float = 1.0) -> "MetricMatrix":
        return cls(np.array([[0.0, distance], [distance, 0.0]]))

    @classmethod
    def uniform(cls, k: int) -> "MetricMatrix":
        return cls(np.ones((k, k)) - np.eye(k))


@dataclass(frozen=True)
class Multigraph:
    k: int
    edges: tuple[tuple[int, int], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        canon = []
        for e in self.edges:
            i, j = int(e[0]), int(e[1])
            if not (0 <= i < self.k and 0 <= j < self.k):
                raise ParameterError(f"multigraph edge ({i}, {j}) out of range for k={self.k}")
            canon.append((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edge_array(self) -> np.ndarray:
        return np.array(self.edges, dtype=np.int64).reshape(-1, 2)

    def multiplicities(self) -> dict[tuple[int, int], int]:
        counts: dict[tuple[int, int], int] = {}
        for e in self.edges:
            counts[e] = counts.get(e, 0) + 1
        return counts

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.k, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Multigraph":
        return cls(k=int(data["n"]), edges=tuple((int(e[0]), int(e[1])) for e in data["edges"]))


@dataclass(frozen=True)
class MetricSummary:
    connected: bool
    diameter: float
    average: float

    def to_dict(self) -> dict[str, Any]:
        return {"connected": self.connected, "diameter": self.diameter, "average": self.average}


# ---------------------------------------------------------------------------
#  Sampling and enumeration
# ---------------------------------------------------------------------------

def _check_regular_params(n: int, d: int) -> None:
    if d < 3:
        raise ParameterError(f"degree must be >= 3, got d={d}")
    if (n * d) % 2:
        raise ParameterError(f"n*d must be even (n={n}, d={d})")
    if n <= d:
        raise ParameterError(f"need n >= d+1 (n={n}, d={d})")


def sample_regular_graph(n: int, d: int, seed: int, max_tries: int = 10_000_000) -> Graph:
    """Uniform element of G(n, d) by the pairing model.

    The n*d half-edges are matched by a uniform random permutation; any
    matching with a loop or a repeated pair is discarded and the whole
    matching redrawn.  Every simple graph arises from the same number
    of matchings, so accepted outputs are uniform on G(n, d).
    """
    _check_regular_params(n, d)
    rng = make_rng(seed)
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    for _ in range(max_tries):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        lo = pairs.min(axis=1)
        hi = pairs.max(axis=1)
        if np.any(lo == hi):
            continue
        codes = lo * n + hi
        if np.unique(codes).size != codes.size:
            continue
        return Graph.from_edges(n, zip(lo.tolist(), hi.tolist()))
    raise ResourceError(f"pairing model did not accept within {max_tries} tries",
                        cap=max_tries, requested=max_tries)


def enumerate_regular_graphs(n: int, d: int, caps: Caps = DEFAULT_CAPS) -> list[Graph]:
    """All labeled simple d-regular graphs on {0, ..., n-1}, each once.

    Vertices are completed in increasing order: when vertex v is reached,
    its edges to lower vertices are fixed, and the remaining ones are
    chosen as a combination of higher vertices with spare degree.
    """
    if n > caps.enum_graph_cap:
        raise ResourceError(f"enumeration capped at n <= {caps.enum_graph_cap}",
                            cap=caps.enum_graph_cap, requested=n)
    if d < 0 or d >= max(n, 1) or (n * d) % 2:
        return []

    from itertools import combinations

    graphs: list[Graph] = []
    deg = [0] * n
    edges: list[tuple[int, int]] = []

    def extend(v: int) -> None:
        if v == n:
            graphs.append(Graph.from_edges(n, edges))
            return
        need = d - deg[v]
        candidates = [u for u in range(v + 1, n) if deg[u] < d]
        if need < 0 or need > len(candidates):
            return
        for chosen in combinations(candidates, need):
            for u in chosen:
                deg[u] += 1
                edges.append((v, u))
            deg[v] += need
            extend(v + 1)
            deg[v] -= need
            for u in chosen:
                deg[u] -= 1
                edges.pop()

    extend(0)
    return graphs


# ---------------------------------------------------------------------------
#  Shortest paths
# ---------------------------------------------------------------------------

def bfs_levels(g: Graph, sources: Iterable[int], limit: int | None = None) -> dict[int, int]:
    """Distance from the source set to every reachable vertex (up to ``limit``)."""
    dist: dict[int, int] = {}
    queue: deque[int] = deque()
    for s in sources:
        if s not in dist:
            dist[s] = 0
            queue.append(s)
    while queue:
        v = queue.popleft()
        if limit is not None and dist[v] >= limit:
            continue
        for u in g.adjacency[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def all_pairs_distances(g: Graph) -> MetricMatrix:
    """Exact hop distances by one BFS per source; inf across components."""
    d = np.full((g.n, g.n), INF)
    for s in range(g.n):
        for v, k in bfs_levels(g, [s]).items():
            d[s, v] = k
    return MetricMatrix(d)


def metric_summary(g: Graph) -> MetricSummary:
    """Connectivity, diameter and the ordered-pair average (diagonal included)."""
    d = all_pairs_distances(g).dist
    connected = bool(np.all(np.isfinite(d)))
    if not connected:
        return MetricSummary(False, INF, INF)
    return MetricSummary(True, float(d.max()) if g.n else 0.0, float(d.sum()) / (g.n * g.n))


def connected_components(g: Graph) -> list[list[int]]:
    seen: set[int] = set()
    comps: list[list[int]] = []
    for v in range(g.n):
        if v in seen:
            continue
        comp = sorted(bfs_levels(g, [v]))
        seen.update(comp)
        comps.append(comp)
    return comps


def induced_subgraph(g: Graph, S: Iterable[int]) -> tuple[Graph, list[int]]:
    """G[S] relabeled 0..|S|-1; the list maps new labels to original vertices."""
    members = sorted(set(int(v) for v in S))
    if not members:
        raise ParameterError("induced subgraph of an empty vertex set")
    if members[0] < 0 or members[-1] >= g.n:
        raise ParameterError("vertex set out of range")
    index = {v: i for i, v in enumerate(members)}
    edges = [(index[v], index[u]) for v in members for u in g.adjacency[v]
             if u in index and v < u]
    return Graph.from_edges(len(members), edges), members


def ball(g: Graph, S: Iterable[int], radius: int) -> frozenset[int]:
    """B_G(S, radius) = {v : dist_G(v, S) <= radius}."""
    sources = set(int(v) for v in S)
    if not sources:
        raise ParameterError("ball around an empty set")
    if radius < 0:
        raise ParameterError(f"radius must be >= 0, got {radius}")
    return frozenset(bfs_levels(g, sources, limit=radius))


def closed_neighbourhood_masks(g: Graph) -> list[int]:
    """Bitmask of {v} ∪ N(v) per vertex, for bit-parallel ball growth."""
    return [(1 << v) | sum(1 << u for u in g.adjacency[v]) for v in range(g.n)]


# ---------------------------------------------------------------------------
#  Named graphs
# ---------------------------------------------------------------------------

def complete_graph(k: int) -> Graph:
    return Graph.from_edges(k, [(i, j) for i in range(k) for j in range(i + 1, k)])


def cycle_graph(k: int) -> Graph:
    return Graph.from_edges(k, [(i, (i + 1) % k) for i in range(k)])


def path_graph(k: int) -> Graph:
    return Graph.from_edges(k, [(i, i + 1) for i in range(k - 1)])


def hypercube_graph(dim: int) -> Graph:
    n = 1 << dim
    return Graph.from_edges(n, [(v, v ^ (1 << b)) for v in range(n) for b in range(dim)
                                if v < v ^ (1 << b)])


def petersen_graph() -> Graph:
    """Outer 5-cycle 0..4, spokes i -- i+5, inner pentagram 5..9."""
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def complete_bipartite_graph(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def prism_graph() -> Graph:
    """Triangles {0,1,2} and {3,4,5} joined by the rungs 0-5, 1-3, 2-4."""
    return Graph.from_edges(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5),
                                (0, 5), (1, 3), (2, 4)])


def circulant_graph(n: int, jumps: Iterable[int]) -> Graph:
    edges = set()
    for v in range(n):
        for j in jumps:
            u = (v + j) % n
            if u != v:
                edges.add((min(u, v), max(u, v)))
    return Graph.from_edges(n, sorted(edges))


def disjoint_union(*graphs: Graph) -> Graph:
    edges: list[tuple[int, int]] = []
    offset = 0
    for g in graphs:
        edges.extend((u + offset, v + offset) for u, v in g.edges)
        offset += g.n
    return Graph.from_edges(offset, edges)


# ---------------------------------------------------------------------------
#  Files
# ---------------------------------------------------------------------------

def load_graph(path: str) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return Graph.from_dict(json.load(fh))


def save_graph(path: str, g: Graph) -> str:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(g.to_dict(), fh, indent=2)
    return path


def load_multigraph(path: str) -> Multigraph:
    with open(path, "r", encoding="utf-8") as fh:
        return Multigraph.from_dict(json.load(fh))


def save_multigraph(path: str, u: Multigraph) -> str:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(u.to_dict(), fh, indent=2)
    return path


def require_connected(g: Graph, what: str = "graph") -> MetricMatrix:
    """All-pairs metric of ``g``; DegenerateError if it is disconnected."""
    metric = all_pairs_distances(g)
    if not metric.is_finite:
        raise DegenerateError(f"{what} is disconnected")
    return metric
