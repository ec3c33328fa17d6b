"""
Spectral Gap Lab — Configuration
================================

One block for every enumeration cap, solver tolerance and proof-regime
threshold.  The CLI echoes ``DEFAULT_CAPS.to_dict()`` (or the overridden
copy) into every JSON document it writes, so each result carries the
limits it was produced under.

Environment:
    SGL_THREADS   worker count for scan trials (default 1)
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, replace
from typing import Any


SCRIPT_DIR = os.path.dirname(os.path.abspath(__file__))
DATA_DIR = os.path.join(SCRIPT_DIR, "sgl_data")


# ---------------------------------------------------------------------------
#  Caps and thresholds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Caps:
    enum_graph_cap: int = 8                # enumerate_regular_graphs: max n
    dense_solver_cap: int = 2000           # adjacency_spectrum: max n
    cheeger_cap: int = 22                  # cheeger_exact: 2^n subset scan
    lp_point_cap: int = 12                 # min_l1_distortion: 2^(k-1)-1 cuts
    brute_map_cap: int = 10**8             # gamma_bruteforce: m^n maps
    injection_cap: int = 10**7             # min_distortion_bruteforce
    property_exact_cap: int = 20           # D(alpha) exact quantifier scan
    subset_sample_default: int = 10_000    # sampled-mode subset count
    subset_scan_cap: int = 200_000         # R(eps) exhaustive subset count
    tuple_enum_cap: int = 10**6            # approximator_spread exhaustive tuples
    proof_eps: float = 1e-4                # eps <= this is the proof regime
    max_eps: float = 0.25                  # exploration upper bound (exclusive)
    approximator_k0: int = 1               # below k0 use the complete graph
    jacobi_tol: float = 1e-10
    lp_tol: float = 1e-9
    certificate_tol: float = 1e-6
    sandwich_tol: float = 1e-9
    identity_rtol: float = 1e-9
    spectrum_tol: float = 1e-7             # per-vertex slack on trace and lambda_1

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def with_overrides(self, **kwargs: Any) -> "Caps":
        return replace(self, **kwargs)


DEFAULT_CAPS = Caps()


def worker_count() -> int:
    """Worker count from SGL_THREADS; malformed values fall back to 1."""
    raw = os.environ.get("SGL_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
