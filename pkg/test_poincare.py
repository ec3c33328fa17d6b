"""Poincaré ratio, exact and estimated gamma, certificates and extrapolation."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from config import DEFAULT_CAPS
from errors import DegenerateError, ParameterError, ResourceError
from graph_core import (MetricMatrix, all_pairs_distances, complete_graph, cycle_graph,
                        path_graph, petersen_graph, sample_regular_graph)
from poincare import (VertexMap, distortion_lower_bound, extrapolation_bound,
                      extrapolation_bound_log, extrapolation_bound_log_decimal, gamma_bruteforce,
                      gamma_local_search, gamma_upper_certificate, min_distortion_bruteforce,
                      power, ratio)
from spectral import cheeger_exact


def random_three_point_metric(seed: int) -> MetricMatrix:
    rng = np.random.default_rng(seed)
    a, b = rng.uniform(1.0, 4.0, size=2)
    c = rng.uniform(abs(a - b) + 0.01, a + b)
    return MetricMatrix(np.array([[0, a, b], [a, 0, c], [b, c, 0]]))


def cubic_pair(seed: int):
    return sample_regular_graph(6, 3, 2 * seed), sample_regular_graph(6, 3, 2 * seed + 1)


# ---------------------------------------------------------------------------
#  Ratio
# ---------------------------------------------------------------------------

def test_k4_two_point_ratio_for_every_split(k4):
    M = MetricMatrix.two_point()
    for values in ([0, 1, 1, 1], [0, 0, 1, 1], [1, 0, 1, 0], [1, 1, 1, 0]):
        assert ratio(k4, M, VertexMap.of(values, 2)) == pytest.approx(0.75)


def test_constant_map_is_degenerate(k4):
    with pytest.raises(DegenerateError):
        ratio(k4, MetricMatrix.two_point(), VertexMap.constant(4, 2))


def test_ratio_preconditions(k4):
    M = MetricMatrix.two_point()
    with pytest.raises(ParameterError):
        ratio(k4, M, VertexMap.of([0, 1, 0, 1], 2), p=0.5)
    with pytest.raises(ParameterError):
        ratio(k4, M, VertexMap.of([0, 1, 0], 2))
    inf_host = MetricMatrix(np.array([[0.0, math.inf], [math.inf, 0.0]]))
    with pytest.raises(DegenerateError):
        ratio(k4, inf_host, VertexMap.of([0, 1, 0, 1], 2))


@settings(max_examples=30, deadline=None)
@given(values=st.lists(st.integers(0, 5), min_size=10, max_size=10),
       c=st.floats(0.01, 100.0), p=st.sampled_from([1.0, 1.5, 2.0, 3.0]))
def test_ratio_is_scale_invariant(values, c, p):
    M = all_pairs_distances(cycle_graph(6))
    f = VertexMap.of(values, 6)
    try:
        base = ratio(petersen_graph(), M, f, p)
    except DegenerateError:
        return
    assert ratio(petersen_graph(), M.scaled(c), f, p) == pytest.approx(base, rel=1e-9)


def test_ratio_is_invariant_under_relabeling(petersen):
    rng = np.random.default_rng(5)
    M = all_pairs_distances(cycle_graph(6))
    perm = rng.permutation(10)
    relabeled = type(petersen).from_edges(10, [(perm[u], perm[v]) for u, v in petersen.edges])
    values = rng.integers(0, 6, size=10)
    moved = np.empty(10, dtype=int)
    moved[perm] = values
    a = ratio(petersen, M, VertexMap.of(values.tolist(), 6))
    b = ratio(relabeled, M, VertexMap.of(moved.tolist(), 6))
    assert a == pytest.approx(b, rel=1e-12)


def test_power_handles_zero_and_fractional_exponents():
    x = np.array([0.0, 1.0, 4.0])
    assert np.array_equal(power(x, 1), x)
    assert np.array_equal(power(x, 2), x * x)
    assert power(x, 1.5) == pytest.approx([0.0, 1.0, 8.0])


# ---------------------------------------------------------------------------
#  Brute force and local search
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("k", [4, 6, 8])
@pytest.mark.parametrize("p", [1.0, 2.0])
def test_complete_graph_law(k, p):
    G = complete_graph(k)
    for seed in range(10):
        est = gamma_bruteforce(G, random_three_point_metric(seed), p)
        assert est.lower == pytest.approx((k - 1) / k, abs=1e-9)
        assert est.exact


def test_k4_two_point_bruteforce(k4):
    est = gamma_bruteforce(k4, MetricMatrix.two_point(), 1.0)
    assert est.lower == pytest.approx(0.75)
    assert est.upper == est.lower
    assert est.degenerate == 2
    assert est.evaluated == 16
    # the lowest-ranked nonconstant map is 0001
    assert est.witness.values == (0, 0, 0, 1)


def test_bruteforce_dominates_random_maps():
    G, H = cubic_pair(0)
    M = all_pairs_distances(H)
    est = gamma_bruteforce(G, M)
    rng = np.random.default_rng(0)
    for _ in range(100):
        f = VertexMap.of(rng.integers(0, 6, size=6).tolist(), 6)
        try:
            assert ratio(G, M, f) <= est.lower + 1e-12
        except DegenerateError:
            pass


def test_bruteforce_ranges_resume_to_the_full_scan():
    G, H = cubic_pair(1)
    M = all_pairs_distances(H)
    full = gamma_bruteforce(G, M)
    parts = [gamma_bruteforce(G, M, start=s, stop=s + 15552) for s in (0, 15552, 31104)]
    assert all(p.provenance == "bruteforce-range" and not p.exact for p in parts)
    assert max(p.lower for p in parts) == pytest.approx(full.lower)
    assert sum(p.evaluated for p in parts) == 6 ** 6


def test_bruteforce_cap(c6):
    with pytest.raises(ResourceError):
        gamma_bruteforce(c6, MetricMatrix.uniform(10), caps=DEFAULT_CAPS.with_overrides(brute_map_cap=100))


def test_local_search_on_k4(k4):
    est = gamma_local_search(k4, MetricMatrix.two_point(), restarts=5, seed=3)
    assert est.lower == pytest.approx(0.75)
    again = gamma_local_search(k4, MetricMatrix.two_point(), restarts=5, seed=3)
    assert again.lower == est.lower and again.witness == est.witness


@pytest.mark.slow
def test_local_search_quality_against_bruteforce():
    close = 0
    for seed in range(20):
        G, H = cubic_pair(100 + seed)
        M = all_pairs_distances(H)
        exact = gamma_bruteforce(G, M).lower
        found = gamma_local_search(G, M, restarts=50, seed=seed).lower
        assert found <= exact + 1e-9
        close += found >= 0.95 * exact
    assert close >= 18


# ---------------------------------------------------------------------------
#  Certificates
# ---------------------------------------------------------------------------

def test_certificate_for_k4_host(k4):
    est = gamma_upper_certificate(k4, complete_graph(4))
    assert est.upper == pytest.approx(0.75)
    assert est.details["classical_gamma_as_stated"] == pytest.approx(0.375)
    assert est.details["l1_distortion"] == pytest.approx(1.0, abs=1e-6)


def test_certificate_reports_small_image_constants(petersen):
    est = gamma_upper_certificate(petersen, complete_graph(4), eps=1e-4)
    assert est.details["specialised_constant"] == pytest.approx(10746.0 / 1e-4)
    assert est.details["small_image_bound"] == pytest.approx(216.0 / 1e-4 * 1.5)
    assert est.details["ramanujan_like"] is True
    assert est.details["specialised_constant_ordered"] == pytest.approx(21492.0 / 1e-4)


def test_certificate_needs_connected_graph(two_k4, k4):
    with pytest.raises(DegenerateError):
        gamma_upper_certificate(two_k4, k4)


@pytest.mark.slow
def test_estimator_sandwich_on_six_vertex_pairs():
    for seed in range(50):
        G, H = cubic_pair(seed)
        M = all_pairs_distances(H)
        exact = gamma_bruteforce(G, M).lower
        upper = gamma_upper_certificate(G, H).upper
        assert exact <= upper + 1e-6
        if seed < 5:
            assert gamma_local_search(G, M, restarts=10, seed=seed).lower <= exact + 1e-9


# ---------------------------------------------------------------------------
#  Extrapolation
# ---------------------------------------------------------------------------

def test_extrapolation_with_equal_exponents():
    gp, p, d, h = 0.75, 2.0, 3, 2.0
    expected = max(12 * 2 ** p * (d / h) * math.log(d), p * math.log(5) + math.log(2) + math.log(gp))
    assert extrapolation_bound_log(gp, p, p, d, h) == pytest.approx(expected)


def test_extrapolation_paths_agree():
    for args in [(0.75, 1.0, 2.0, 3, 2.0), (1.3, 1.0, 3.0, 4, 0.5), (2.0, 1.5, 1.5, 3, 1.0)]:
        a = extrapolation_bound_log(*args)
        b = float(extrapolation_bound_log_decimal(*args))
        assert abs(a - b) <= 1e-12 * abs(b)


def test_extrapolation_preconditions():
    with pytest.raises(ParameterError):
        extrapolation_bound(1.0, 2.0, 1.0, 3, 1.0)
    with pytest.raises(ParameterError):
        extrapolation_bound(1.0, 1.0, 2.0, 3, 0.0)


@pytest.mark.slow
def test_extrapolation_dominates_squared_gamma():
    for seed in range(20):
        G, H = cubic_pair(200 + seed)
        M = all_pairs_distances(H)
        g1 = gamma_bruteforce(G, M, 1.0).lower
        g2 = gamma_bruteforce(G, M, 2.0).lower
        assert g2 <= extrapolation_bound(g1, 1.0, 2.0, 3, cheeger_exact(G))


# ---------------------------------------------------------------------------
#  Distortion
# ---------------------------------------------------------------------------

def test_distortion_lower_bound(k4):
    assert distortion_lower_bound(k4, 0.75) == pytest.approx(1.0)
    assert distortion_lower_bound(k4, math.inf) == 0.0
    with pytest.raises(ParameterError):
        distortion_lower_bound(k4, 0.0)


def test_min_distortion_bruteforce(c4, k4, petersen):
    assert min_distortion_bruteforce(c4, k4) == pytest.approx(2.0)
    assert min_distortion_bruteforce(c4, c4) == pytest.approx(1.0)
    assert min_distortion_bruteforce(path_graph(2), petersen) == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        min_distortion_bruteforce(k4, path_graph(3))


def test_lower_bound_never_exceeds_exact_distortion(c4, k4):
    gamma = gamma_bruteforce(c4, all_pairs_distances(k4)).lower
    assert distortion_lower_bound(c4, gamma) <= min_distortion_bruteforce(c4, k4) + 1e-12
