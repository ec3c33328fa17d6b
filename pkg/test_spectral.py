"""Spectral: Jacobi eigenvalues, Cheeger constant and its sandwich."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import spectral
from errors import DegenerateError, NumericError, ParameterError, ResourceError
from graph_core import (complete_graph, cycle_graph, enumerate_regular_graphs, path_graph,
                        sample_regular_graph)
from spectral import (adjacency_spectrum, cheeger_cut, cheeger_exact, cheeger_sandwich_check,
                      classical_gamma, classical_gamma_as_stated, jacobi_eigenvalues, lambda2)


@pytest.mark.parametrize("name,expected", [
    ("k4", [3, -1, -1, -1]),
    ("petersen", [3, 1, 1, 1, 1, 1, -2, -2, -2, -2]),
    ("c6", [2, 1, 1, -1, -1, -2]),
    ("q3", [3, 1, 1, 1, -1, -1, -1, -3]),
    ("k33", [3, 0, 0, 0, 0, -3]),
])
def test_known_spectra(request, name, expected):
    g = request.getfixturevalue(name)
    spec = adjacency_spectrum(g)
    assert np.allclose(spec.eigenvalues, expected, atol=1e-9)
    assert spec.residual < 1e-10


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (6, 6), elements=st.floats(-10, 10)))
def test_jacobi_agrees_with_eigvalsh(a):
    sym = (a + a.T) / 2
    vals, _, _ = jacobi_eigenvalues(sym)
    ref = np.sort(np.linalg.eigvalsh(sym))[::-1]
    assert np.allclose(vals, ref, atol=1e-8)


def test_sampled_graph_spectrum_agrees_with_eigvalsh():
    g = sample_regular_graph(40, 3, 11)
    ref = np.sort(np.linalg.eigvalsh(g.adjacency_matrix()))[::-1]
    assert np.allclose(adjacency_spectrum(g).eigenvalues, ref, atol=1e-8)
    assert adjacency_spectrum(g).lambda1 == pytest.approx(3.0)


@pytest.mark.parametrize("vals,message", [
    ([2.5, 0.5, -1.5, -1.5], "lambda_1"),
    ([3.0, -1.0, -1.0, -0.5], "sum to"),
])
def test_inconsistent_spectrum_is_rejected(monkeypatch, k4, vals, message):
    monkeypatch.setattr(spectral, "jacobi_eigenvalues",
                        lambda matrix, tol: (np.array(vals), 0, 0.0))
    with pytest.raises(NumericError, match=message):
        adjacency_spectrum(k4)


def test_jacobi_rotation_budget():
    a = np.array([[2.0, 1.0, 1.0], [1.0, 3.0, 1.0], [1.0, 1.0, 4.0]])
    with pytest.raises(NumericError) as info:
        jacobi_eigenvalues(a, max_rotations=1)
    assert info.value.residual > 0


def test_dense_solver_cap(k4):
    from config import DEFAULT_CAPS
    with pytest.raises(ResourceError):
        adjacency_spectrum(k4, caps=DEFAULT_CAPS.with_overrides(dense_solver_cap=3))


def test_lambda2_of_disconnected_graph_equals_degree(two_k4):
    assert lambda2(two_k4) == pytest.approx(3.0)


# ---------------------------------------------------------------------------
#  Cheeger
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name,h", [
    ("k4", 2.0), ("petersen", 1.0), ("c6", 2 / 3), ("q3", 1.0), ("k33", 5 / 3),
    ("two_triangles", 0.0),
])
def test_cheeger_constants(request, name, h):
    g = request.getfixturevalue(name)
    cut = cheeger_cut(g)
    assert cut.value == pytest.approx(h)
    assert 0 < len(cut.subset) <= g.n // 2
    inside = set(cut.subset)
    assert sum(1 for u, v in g.edges if (u in inside) != (v in inside)) == cut.cut_edges


def test_cheeger_preconditions():
    with pytest.raises(ParameterError):
        cheeger_exact(complete_graph(1))
    with pytest.raises(ResourceError):
        cheeger_exact(cycle_graph(23))


def test_cheeger_of_path_halves():
    # one cut edge, |S| = n/2
    assert cheeger_exact(path_graph(6)) == pytest.approx(1 / 3)


def test_sandwich_on_named_graphs(k4, petersen, q3, k33):
    for g in (k4, petersen, q3, k33):
        lower, h, upper, ok = cheeger_sandwich_check(g)
        assert ok and lower <= h + 1e-9 <= upper + 2e-9


def test_sandwich_over_all_six_vertex_cubic_graphs():
    for g in enumerate_regular_graphs(6, 3):
        assert cheeger_sandwich_check(g).passed


@pytest.mark.slow
def test_sandwich_over_all_eight_vertex_cubic_graphs():
    for g in enumerate_regular_graphs(8, 3):
        assert cheeger_sandwich_check(g).passed


@pytest.mark.slow
@pytest.mark.parametrize("n", [10, 12, 14])
def test_sandwich_on_sampled_cubic_graphs(n):
    for seed in range(5):
        assert cheeger_sandwich_check(sample_regular_graph(n, 3, seed)).passed


# ---------------------------------------------------------------------------
#  Euclidean Poincaré constant
# ---------------------------------------------------------------------------

def test_classical_gamma(k4, petersen):
    assert classical_gamma(k4) == pytest.approx(0.75)
    assert classical_gamma_as_stated(k4) == pytest.approx(0.375)
    assert classical_gamma(petersen) == pytest.approx(1.5)
    assert classical_gamma_as_stated(petersen) == pytest.approx(0.75)


def test_classical_gamma_of_disconnected_graph(two_k4):
    with pytest.raises(DegenerateError):
        classical_gamma(two_k4)


def test_classical_gamma_needs_regular_graph():
    with pytest.raises(ParameterError):
        classical_gamma(path_graph(4))
