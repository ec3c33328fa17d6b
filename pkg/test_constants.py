"""Named constants in log space, cross-checked against decimal evaluations."""

from __future__ import annotations

import math

import pytest

from constants import (ETA_DENOMINATOR, GROWTH, constants_table, ell_star, ell_star_float,
                       embedding_bound_intermediate, ln_gamma, ln_gamma_decimal, ln_m2,
                       log_base, m2_satisfied)
from errors import ParameterError


def test_gamma1_at_the_proof_threshold():
    table = constants_table(3, 1e-4)
    assert table.gamma1 == pytest.approx(180_000.0)
    assert table.ln_gamma1 == pytest.approx(math.log(180_000.0))
    assert table.proof_regime


@pytest.mark.parametrize("d,p", [(3, 1.0), (3, 2.0), (4, 1.5), (10, 3.0)])
def test_ln_gamma_float_and_decimal_agree(d, p):
    a = ln_gamma(d, p)
    b = float(ln_gamma_decimal(d, p))
    assert abs(a - b) <= 1e-12 * b


def test_ln_gamma_of_cubic_graphs():
    assert ln_gamma(3, 1.0) == pytest.approx(2e12 * math.log(3) ** 2, rel=1e-15)


@pytest.mark.parametrize("d", [3, 4, 5, 8, 17, 100])
def test_ell_star_two_paths_agree(d):
    ls = ell_star(d)
    assert ls == ell_star_float(d)
    # GROWTH^l* <= 5(d-1)/4 < GROWTH^(l*+1)
    target = math.log(1.25 * (d - 1))
    assert ls * math.log(GROWTH) <= target < (ls + 1) * math.log(GROWTH)


def test_ell_star_for_cubic_graphs():
    assert ell_star(3) == 2749
    with pytest.raises(ParameterError):
        ell_star(2)


def test_derived_constants_recompose():
    eps, alpha, d = 0.1, 0.5, 3
    t = constants_table(d, eps, alpha=alpha)
    ls = ell_star(d)
    assert t.ln_alpha == pytest.approx(math.log(alpha))
    assert t.ln_alpha_tilde == pytest.approx(math.log(1.25 * alpha) - ls * math.log(d - 1))
    assert t.ln_eta == pytest.approx(t.ln_alpha_tilde + math.log(eps) - math.log(ETA_DENOMINATOR))
    assert t.ln_alpha1 == pytest.approx(ls * (math.log(GROWTH) - math.log(d - 1)))
    assert t.ln_gamma2 == pytest.approx(-math.log(alpha) - 2 * math.log(eps) + 3632 * math.log(d) ** 2)
    assert t.ln_approximator_factor == pytest.approx(math.log(2) + ln_gamma(3, 1.0))
    assert t.r_eps_bound == pytest.approx(2160.0)
    assert t.specialised_constant == pytest.approx(107_460.0)
    assert ETA_DENOMINATOR == 2_304_000


def test_default_alpha_is_tiny():
    t = constants_table(3, 0.1)
    assert t.ln_alpha == pytest.approx(-1e11 * math.log(3) ** 2)
    assert "alpha defaults to alpha(d)" in t.notes
    assert not t.proof_regime
    assert any("exploration" in note for note in t.notes)


def test_linear_values_overflow_to_none():
    lin = constants_table(3, 1e-4).linear()
    assert lin["Gamma"] is None
    assert lin["alpha"] == 0.0          # underflows rather than overflows
    assert lin["Gamma1"] == pytest.approx(180_000.0)


def test_table_to_dict_records_the_log_base():
    doc = constants_table(3, 0.1, m=1000, delta=3).to_dict()
    assert doc["log_base"] == "e"
    assert doc["ln"]["m2"] == pytest.approx(ln_m2(0.1, 1000))
    assert doc["m2_met"] is False
    assert doc["embedding_bound"] == pytest.approx(embedding_bound_intermediate(0.1, 1000, 3))


def test_m2_threshold():
    # (4 + 2 log2 m)^(1/eps): about 3.3e7 at m = 1e9, 6.9e6 at m = 1e6
    assert m2_satisfied(0.24, 10**9)
    assert not m2_satisfied(0.24, 10**6)
    assert not m2_satisfied(1e-4, 10**9)


def test_embedding_bound_intermediate():
    e = math.e
    expected = 4 * e / (e - 1) * (1 + 7 / (0.1 * math.log(100, 3)) * 3 * math.log(100, 2))
    assert embedding_bound_intermediate(0.1, 100, 3) == pytest.approx(expected)
    with pytest.raises(ParameterError):
        embedding_bound_intermediate(0.1, 100, 2)


def test_log_base():
    assert log_base(8, 2) == pytest.approx(3.0)
    with pytest.raises(ParameterError):
        log_base(8, 1)


@pytest.mark.parametrize("kwargs", [
    {"d": 2, "eps": 0.1},
    {"d": 3.5, "eps": 0.1},
    {"d": 3, "eps": 0.25},
    {"d": 3, "eps": 0.0},
    {"d": 3, "eps": 0.1, "p": 0.5},
    {"d": 3, "eps": 0.1, "alpha": 0.0},
    {"d": 3, "eps": 0.1, "m": 1},
])
def test_constants_table_rejects_bad_parameters(kwargs):
    with pytest.raises(ParameterError):
        constants_table(**kwargs)
