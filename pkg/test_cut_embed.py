"""Cut-cone LP: simplex solver, least L1 distortion and certificates."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from config import DEFAULT_CAPS
from cut_embed import (CutEmbedding, LinearProgram, cut_masks, distortion_lp, metric_from_points,
                       min_l1_distortion, simplex_solve, verify_embedding)
from errors import InfeasibleError, ParameterError, ResourceError, UnboundedError
from graph_core import (MetricMatrix, all_pairs_distances, complete_bipartite_graph,
                        cycle_graph, path_graph, petersen_graph)


def random_metric(k: int, seed: int) -> MetricMatrix:
    """Shortest-path closure of random positive weights."""
    rng = np.random.default_rng(seed)
    w = rng.uniform(1.0, 5.0, size=(k, k))
    d = np.minimum(w, w.T)
    np.fill_diagonal(d, 0.0)
    for l in range(k):
        d = np.minimum(d, d[:, l][:, None] + d[l, :][None, :])
    return MetricMatrix(d)


def linprog_value(lp: LinearProgram) -> float:
    ub_rows, ub_b, eq_rows, eq_b = [], [], [], []
    for row, rel, rhs in zip(lp.A, lp.relations, lp.b):
        if rel == "<=":
            ub_rows.append(row)
            ub_b.append(rhs)
        elif rel == ">=":
            ub_rows.append(-row)
            ub_b.append(-rhs)
        else:
            eq_rows.append(row)
            eq_b.append(rhs)
    res = linprog(lp.c,
                  A_ub=np.array(ub_rows) if ub_rows else None, b_ub=ub_b or None,
                  A_eq=np.array(eq_rows) if eq_rows else None, b_eq=eq_b or None,
                  bounds=(0, None), method="highs")
    assert res.status == 0
    return float(res.fun)


# ---------------------------------------------------------------------------
#  Simplex
# ---------------------------------------------------------------------------

def test_simplex_single_bound():
    value, x = simplex_solve(LinearProgram([1.0], [[1.0]], (">=",), [1.0]))
    assert value == pytest.approx(1.0)
    assert x == pytest.approx([1.0])


def test_simplex_binding_aggregate_constraint():
    lp = LinearProgram([1.0, 1.0], [[1, 0], [0, 1], [1, 1]], (">=", ">=", ">="), [1, 1, 3])
    value, x = simplex_solve(lp)
    assert value == pytest.approx(3.0)
    assert lp.residual(x) < 1e-9


def test_simplex_equalities_with_redundant_row():
    lp = LinearProgram([1.0, 2.0], [[1, 1], [1, 1], [1, -1]], ("=", "=", "="), [2, 2, 0])
    value, x = simplex_solve(lp)
    assert value == pytest.approx(3.0)
    assert x == pytest.approx([1.0, 1.0])


def test_simplex_negative_rhs_is_flipped():
    # -x <= -2  is  x >= 2
    value, x = simplex_solve(LinearProgram([1.0], [[-1.0]], ("<=",), [-2.0]))
    assert value == pytest.approx(2.0)


def test_simplex_infeasible():
    with pytest.raises(InfeasibleError):
        simplex_solve(LinearProgram([1.0], [[1.0], [1.0]], (">=", "<="), [2.0, 1.0]))


def test_simplex_unbounded():
    with pytest.raises(UnboundedError):
        simplex_solve(LinearProgram([-1.0, 0.0], [[0.0, 1.0]], ("<=",), [1.0]))


def test_linear_program_validates_dimensions():
    with pytest.raises(ParameterError):
        LinearProgram([1.0], [[1.0]], (">=", "<="), [1.0])
    with pytest.raises(ParameterError):
        LinearProgram([1.0], [[1.0]], ("<",), [1.0])


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), m=st.integers(1, 6), n=st.integers(1, 6))
def test_simplex_matches_linprog_on_random_covering_lps(seed, m, n):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, 4, size=(m, n)).astype(float)
    A[:, 0] += 1.0                                  # every row coverable
    b = rng.integers(1, 6, size=m).astype(float)
    c = rng.integers(1, 5, size=n).astype(float)
    lp = LinearProgram(c, A, (">=",) * m, b)
    value, x = simplex_solve(lp)
    assert lp.residual(x) < 1e-7
    assert value == pytest.approx(linprog_value(lp), rel=1e-7, abs=1e-9)


# ---------------------------------------------------------------------------
#  Distortion
# ---------------------------------------------------------------------------

def test_cut_masks_contain_point_zero():
    masks = cut_masks(4)
    assert len(masks) == 7
    assert all(int(c) & 1 for c in masks)
    assert (1 << 4) - 1 not in masks.tolist()


def test_path_on_three_points_is_l1():
    D, emb = min_l1_distortion(all_pairs_distances(path_graph(3)))
    assert D == pytest.approx(1.0, abs=1e-6)
    assert verify_embedding(all_pairs_distances(path_graph(3)), emb)


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_path_metrics_are_l1(k):
    M = all_pairs_distances(path_graph(k))
    D, emb = min_l1_distortion(M)
    assert D == pytest.approx(1.0, abs=1e-6)
    assert verify_embedding(M, emb, 1e-6)


@pytest.mark.parametrize("k", [4, 5, 6])
def test_cycle_metrics_are_l1(k):
    M = all_pairs_distances(cycle_graph(k))
    D, emb = min_l1_distortion(M)
    assert D == pytest.approx(1.0, abs=1e-6)
    assert verify_embedding(M, emb, 1e-6)


def test_hand_built_c4_certificate():
    M = all_pairs_distances(cycle_graph(4))
    emb = CutEmbedding.from_cuts(4, [({0, 1}, 1.0), ({1, 2}, 1.0)], 1.0)
    assert np.array_equal(emb.realized(), M.dist)
    assert verify_embedding(M, emb, 1e-9)
    assert verify_embedding(M, CutEmbedding(emb.k, emb.cuts, emb.weights, 2.0), 1e-9)


def test_zero_weights_fail_verification():
    M = all_pairs_distances(cycle_graph(4))
    emb = CutEmbedding(4, tuple(int(c) for c in cut_masks(4)), np.zeros(7), 1.0)
    check = verify_embedding(M, emb)
    assert not check
    assert check.pair == (0, 1) and check.side == "lower"


def test_distortion_is_scale_invariant():
    M = random_metric(6, 3)
    D1, _ = min_l1_distortion(M)
    D2, _ = min_l1_distortion(M.scaled(7.5))
    assert D1 == pytest.approx(D2, rel=1e-6)


@pytest.mark.parametrize("g", [complete_bipartite_graph(2, 3), petersen_graph()])
def test_distortion_matches_linprog(g):
    M = all_pairs_distances(g)
    D, emb = min_l1_distortion(M)
    lp, _ = distortion_lp(M)
    assert D == pytest.approx(linprog_value(lp), rel=1e-6)
    assert D >= 1.0
    assert verify_embedding(M, emb, 1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_distortion_is_monotone_under_point_deletion(seed):
    M = random_metric(7, seed)
    D, _ = min_l1_distortion(M)
    D_sub, _ = min_l1_distortion(M.restrict([0, 2, 3, 5, 6]))
    assert D_sub <= D + 1e-6


def test_l1_point_clouds_have_distortion_one():
    rng = np.random.default_rng(4)
    M = metric_from_points(rng.integers(0, 5, size=(6, 3)) + rng.uniform(0, 0.1, size=(6, 3)))
    D, _ = min_l1_distortion(M)
    assert D == pytest.approx(1.0, abs=1e-6)


def test_distortion_preconditions():
    assert min_l1_distortion(MetricMatrix(np.zeros((1, 1))))[0] == 1.0
    with pytest.raises(ResourceError):
        min_l1_distortion(MetricMatrix.uniform(5), DEFAULT_CAPS.with_overrides(lp_point_cap=4))
    with pytest.raises(ParameterError):
        min_l1_distortion(MetricMatrix(np.array([[0.0, 0.0], [0.0, 0.0]])))
    with pytest.raises(ParameterError):
        min_l1_distortion(MetricMatrix(np.array([[0.0, np.inf], [np.inf, 0.0]])))
