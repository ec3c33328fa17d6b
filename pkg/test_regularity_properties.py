"""Regularity properties D(alpha), R(eps), edge density and the expansion checks."""

from __future__ import annotations

import pytest

from config import DEFAULT_CAPS
from errors import ParameterError, PreconditionError, ResourceError
from graph_core import enumerate_regular_graphs, sample_regular_graph
from regularity_properties import (check_property_D, check_property_R, connected_subsets,
                                   edge_density_check, expansion_lemma_check,
                                   geometric_expansion_check, max_alpha,
                                   strengthened_expansion_check)


# ---------------------------------------------------------------------------
#  D(alpha)
# ---------------------------------------------------------------------------

def test_complete_graph_has_D(k4):
    report = check_property_D(k4, 1.0)
    assert report.verdict == "pass" and report.coverage == "exact"
    assert report.samples == 15
    assert report.margins["part_a"] and report.margins["part_b"]


def test_two_disjoint_k4_fail_D_with_least_witness(two_k4):
    report = check_property_D(two_k4, 1.0)
    assert report.verdict == "fail"
    # the ball around {0} stops at its own K4 (4 < 3n/4 = 6) and the
    # requirement alpha (d-1)^l reaches 6 first at l = 3
    assert report.witness == {"part": "A", "S": [0], "l": 3, "ball": 4, "required": 6.0}
    assert not report.margins["part_b"]


def test_sampled_scan_finds_the_same_witness(two_k4):
    report = check_property_D(two_k4, 1.0, mode="sampled", samples=50, seed=1)
    assert report.verdict == "fail" and report.coverage == "sampled"
    assert report.witness["S"] == [0] and report.witness["l"] == 3


def test_sampled_pass_is_marked(petersen):
    report = check_property_D(petersen, 0.5, mode="sampled", samples=30)
    assert report.verdict == "pass-sampled"
    assert report.passed
    assert report.samples == 10 + 45 + 30


def test_sampling_without_a_seed_is_refused(k4, petersen):
    with pytest.raises(ParameterError):
        check_property_D(k4, 0.5, mode="sampled", seed=None)
    caps = DEFAULT_CAPS.with_overrides(subset_scan_cap=5)
    with pytest.raises(ResourceError):
        check_property_R(petersen, 0.2, size_cap=3, seed=None, caps=caps)
    with pytest.raises(ResourceError):
        edge_density_check(petersen, 0.2, size_cap=3, seed=None, caps=caps)
    assert check_property_R(petersen, 0.2, size_cap=3, seed=None).coverage == "exact"


def test_D_preconditions(k4):
    with pytest.raises(ParameterError):
        check_property_D(k4, 0.0)
    with pytest.raises(ParameterError):
        check_property_D(k4, 1.5)
    with pytest.raises(ParameterError):
        check_property_D(k4, 0.5, mode="bogus")
    with pytest.raises(ResourceError):
        check_property_D(sample_regular_graph(22, 3, 0), 0.5)


def test_max_alpha(k4, two_k4):
    assert max_alpha(k4) == 1.0
    assert max_alpha(two_k4) == 0.0


ALPHA_GRID = (0.1, 0.25, 0.5, 0.75, 0.9, 1.0)


def assert_monotone_in_alpha(g):
    verdicts = [check_property_D(g, a).passed for a in ALPHA_GRID]
    # passing at alpha means passing at every smaller alpha
    assert verdicts == sorted(verdicts, reverse=True), verdicts


def test_D_is_monotone_in_alpha_on_six_vertex_cubic_graphs():
    for g in enumerate_regular_graphs(6, 3):
        assert_monotone_in_alpha(g)


@pytest.mark.slow
def test_D_is_monotone_in_alpha_on_eight_vertex_cubic_graphs():
    for g in enumerate_regular_graphs(8, 3)[::97]:
        assert_monotone_in_alpha(g)


@pytest.mark.parametrize("name", ["k4", "petersen", "q3", "prism"])
def test_max_alpha_is_consistent_with_the_checker(request, name):
    g = request.getfixturevalue(name)
    alpha = max_alpha(g)
    assert 0 < alpha <= 1
    assert check_property_D(g, alpha).margins["part_a"]


# ---------------------------------------------------------------------------
#  R(eps)
# ---------------------------------------------------------------------------

def test_connected_subsets_of_c6(c6):
    sets = connected_subsets(c6, 2)
    assert len(sets) == 6 + 6
    assert sets == sorted(sets)
    with pytest.raises(ResourceError):
        connected_subsets(c6, 3, limit=10)


def test_petersen_has_R(petersen):
    report = check_property_R(petersen, 0.2, size_cap=4)
    assert report.verdict == "pass" and report.coverage == "exact"
    assert report.margins["size_limit"] == 4
    assert 1.0 <= report.margins["max_distortion"] <= report.margins["bound"]
    assert report.margins["bound"] == pytest.approx(1080.0)
    assert report.flags == {"proof_regime": False}
    assert "intermediate_bound" in report.margins


def test_disconnected_host_fails_part_b(two_k4):
    report = check_property_R(two_k4, 0.2, size_cap=3)
    assert report.verdict == "fail"
    assert report.witness["part"] == "B" and report.witness["connected"] is False


def test_R_falls_back_to_sampling(petersen):
    caps = DEFAULT_CAPS.with_overrides(subset_scan_cap=5)
    report = check_property_R(petersen, 0.2, size_cap=3, samples=10, caps=caps)
    assert report.coverage == "sampled" and report.verdict == "pass-sampled"
    assert any("sampled instead" in note for note in report.notes)


def test_R_sampled_mode(petersen):
    report = check_property_R(petersen, 0.1, size_cap=5, mode="sampled", samples=15, seed=2)
    assert report.verdict == "pass-sampled" and report.samples == 15


def test_R_preconditions(petersen, c6):
    with pytest.raises(ParameterError):
        check_property_R(petersen, 0.3)
    with pytest.raises(ParameterError):
        check_property_R(petersen, 0.0)
    with pytest.raises(ParameterError):
        check_property_R(c6, 0.1)
    assert check_property_R(petersen, 1e-4, size_cap=2).flags == {"proof_regime": True}


# ---------------------------------------------------------------------------
#  Edge density
# ---------------------------------------------------------------------------

def test_edge_density_on_explicit_subsets(petersen):
    report = edge_density_check(petersen, 0.2, subsets=[list(range(10)), [0, 1]])
    assert report.verdict == "pass" and report.coverage == "explicit"
    assert report.margins["max_edges_per_vertex"] == pytest.approx(1.5)
    with pytest.raises(ParameterError):
        edge_density_check(petersen, 0.2, subsets=[[]])


def test_edge_density_exact_scan_on_a_triangle_free_graph(petersen):
    report = edge_density_check(petersen, 0.2, size_cap=3)
    assert report.verdict == "pass" and report.coverage == "exact"
    assert report.margins["max_edges_per_vertex"] == pytest.approx(2 / 3)


def test_edge_density_sampled(c6):
    report = edge_density_check(c6, 0.1, mode="sampled", samples=20)
    assert report.verdict == "pass-sampled" and report.samples == 20


# ---------------------------------------------------------------------------
#  Expansion
# ---------------------------------------------------------------------------

def test_expansion_lemma_on_petersen(petersen):
    report = expansion_lemma_check(petersen, 0.5, [0, 1, 2])
    assert report.holds
    assert report.sides["cut_bound"] == pytest.approx(3 / 200 * 3)
    assert report.sides["cut_edges"] >= 1


def test_expansion_lemma_preconditions(petersen, two_k4, c6):
    with pytest.raises(PreconditionError) as info:
        expansion_lemma_check(two_k4, 0.5, [0])
    assert info.value.hypothesis == "lambda2"
    with pytest.raises(PreconditionError) as info:
        expansion_lemma_check(petersen, 0.9, [0, 1, 2])
    assert info.value.hypothesis == "set size"
    with pytest.raises(PreconditionError):
        expansion_lemma_check(c6, 0.5, [0])
    with pytest.raises(ParameterError):
        expansion_lemma_check(petersen, 1.0, [0])


def test_geometric_expansion(petersen):
    report = geometric_expansion_check(petersen, [0], 1)
    assert report.holds and report.sides["ball"] == 4
    with pytest.raises(ParameterError):
        geometric_expansion_check(petersen, [], 1)
    with pytest.raises(ParameterError):
        geometric_expansion_check(petersen, [0], 0)


def test_strengthened_expansion(petersen, two_k4):
    report = strengthened_expansion_check(petersen, 1.0, [0, 5], 2)
    assert report.holds
    assert report.sides["ln_alpha_tilde"] < 0
    with pytest.raises(PreconditionError) as info:
        strengthened_expansion_check(two_k4, 1.0, [0], 1)
    assert info.value.hypothesis == "D(alpha)"
