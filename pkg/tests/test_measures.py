import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dvlab import measures
from dvlab.measures import AdmissibleMeasure, DegenerateDensityError

FAMILIES = [
    AdmissibleMeasure.mu_alpha(-0.5),
    AdmissibleMeasure.mu_alpha(0.0),
    AdmissibleMeasure.mu_alpha(1.0),
    AdmissibleMeasure.nu_gamma(1.5),
    AdmissibleMeasure.nu_gamma(2.0),
    AdmissibleMeasure.log_square(),
]


def test_density_examples():
    assert measures.density(AdmissibleMeasure.mu_alpha(0.0), 0.5) == pytest.approx(2 * math.exp(-1), rel=1e-14)
    assert measures.density(AdmissibleMeasure.log_square(), 1.0) == pytest.approx(1.0, rel=1e-14)
    assert measures.density(AdmissibleMeasure.nu_gamma(2.0), 2.0) == 0.0


def test_density_rejects_nonpositive_sigma():
    with pytest.raises(ValueError):
        measures.density(AdmissibleMeasure.mu_alpha(0.0), 0.0)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 2.0])
def test_mu_alpha_density_matches_gamma_form(alpha):
    s = np.array([0.01, 0.3, 1.0, 5.0])
    expected = 2 ** (alpha + 1) / math.gamma(alpha + 1) * s**alpha * np.exp(-2 * s)
    np.testing.assert_allclose(measures.density(AdmissibleMeasure.mu_alpha(alpha), s), expected, rtol=1e-13)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        AdmissibleMeasure.mu_alpha(-1.0)
    with pytest.raises(ValueError):
        AdmissibleMeasure.nu_gamma(1.0)
    with pytest.raises(ValueError):
        AdmissibleMeasure.from_spec({"family": "gaussian"})


@pytest.mark.parametrize("mu", FAMILIES, ids=str)
def test_total_mass_and_zero_in_support(mu):
    audit = measures.check_admissible(mu)
    assert audit["mass_error"] < 10 * 1e-10
    assert audit["zero_in_support"]


def test_measure_of_interval_examples():
    mu = AdmissibleMeasure.mu_alpha(0.0)
    assert measures.measure_of_interval(mu, 1.0) == pytest.approx(1 - math.exp(-2), abs=1e-12)
    assert measures.measure_of_interval(mu, 0.0) == 0.0
    assert measures.measure_of_interval(mu, 60.0) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("mu", FAMILIES, ids=str)
def test_measure_of_interval_nondecreasing(mu):
    ts = np.geomspace(1e-6, 3.0, 25)
    vals = [measures.measure_of_interval(mu, t) for t in ts]
    assert np.all(np.diff(vals) >= -1e-13)
    assert 0 <= vals[0] and vals[-1] <= 1 + 1e-12


def test_beta_mu_example():
    mu = AdmissibleMeasure.mu_alpha(0.0)
    assert measures.beta_mu(mu, 1.0) == pytest.approx(1 - (1 - math.exp(-2)) / 2, rel=1e-11)


@pytest.mark.parametrize("mu", FAMILIES, ids=str)
def test_beta_mu_monotone_convex_below_identity(mu):
    s = np.linspace(0.02, 2.0, 60)
    b = np.array([measures.beta_mu(mu, x) for x in s])
    assert np.all(np.diff(b) >= -1e-13)
    assert np.all(np.diff(b, 2) >= -1e-10)
    assert np.all(b <= s + 1e-13)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 2.0])
def test_beta_mu_alpha_scaling_near_zero(alpha):
    mu = AdmissibleMeasure.mu_alpha(alpha)
    ratios = [measures.beta_mu(mu, 2.0**-j) / 2.0 ** (-j * (alpha + 2)) for j in range(5, 21)]
    # leading constant 2^{a+1}/Gamma(a+3)
    c = 2 ** (alpha + 1) / math.gamma(alpha + 3)
    assert min(ratios) > 0.5 * c and max(ratios) < 1.5 * c


def test_omega_bounds_and_errors():
    mu = AdmissibleMeasure.mu_alpha(1.0)
    r = [measures.omega(mu, s) / s for s in np.geomspace(1e-4, 1.0, 20)]
    assert 0 < min(r) and max(r) / min(r) < 3
    nu = AdmissibleMeasure.nu_gamma(2.0)
    r = [measures.omega(nu, s) / s**2 for s in np.geomspace(1e-2, 0.9, 20)]
    assert 0 < min(r) and max(r) / min(r) < 10
    ls = AdmissibleMeasure.log_square()
    assert measures.omega(ls, 1.0) == pytest.approx(math.sqrt(measures.beta_mu(ls, 1.0)), rel=1e-10)
    with pytest.raises(ValueError):
        measures.omega(mu, 1.5)


def test_omega_degenerate_density():
    # nu_gamma with gamma = 1.5 is renormalised on its support (0, 1/4]: h vanishes at 1/2
    with pytest.raises(DegenerateDensityError):
        measures.omega(AdmissibleMeasure.nu_gamma(1.5), 0.9)


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 1.0, 2.0])
def test_weight_closed_form(alpha):
    mu = AdmissibleMeasure.mu_alpha(alpha)
    n = np.arange(1, 2001)
    np.testing.assert_allclose(measures.weight_table(mu, 2000), measures.mu_alpha_weight(alpha, n), atol=1e-10)


def test_weight_table_examples():
    mu = AdmissibleMeasure.mu_alpha(1.0)
    np.testing.assert_allclose(measures.weight_table(mu, 3),
                               [1.0, (1 + math.log(2)) ** -2, (1 + math.log(3)) ** -2], atol=1e-12)
    for m in FAMILIES:
        assert measures.weight_table(m, 1)[0] == pytest.approx(1.0, abs=1e-12)


def test_weight_cache_round_trip(isolated_cache):
    mu = AdmissibleMeasure.log_square()
    w = measures.weight_table(mu, 50)
    blob = json.loads(measures.weight_cache_path(mu).read_text())
    assert np.array_equal(np.array(blob["weights"][:50]), w)
    measures._weight_table_memo.cache_clear()
    assert np.array_equal(measures.weight_table(mu, 50), w)


def test_weight_cache_recovers_from_corruption(isolated_cache):
    mu = AdmissibleMeasure.mu_alpha(2.0)
    w = measures.weight_table(mu, 20)
    measures.weight_cache_path(mu).write_text("{not json")
    measures._weight_table_memo.cache_clear()
    np.testing.assert_array_equal(measures.weight_table(mu, 20), w)
    json.loads(measures.weight_cache_path(mu).read_text())  # rewritten


@pytest.mark.parametrize("mu", FAMILIES, ids=str)
def test_weights_decreasing_and_supermultiplicative(mu):
    M = 60
    w = measures.weight_table(mu, M * M)
    assert np.all(np.diff(w) < 0)
    m = np.arange(1, M + 1)
    assert (w[np.outer(m, m) - 1] - np.outer(w[:M], w[:M])).min() >= -1e-12


@pytest.mark.parametrize("mu", FAMILIES, ids=str)
def test_mccarthy_power_bound(mu):
    w = measures.weights_at(mu, 2 ** np.arange(0, 21))
    assert np.all(w[1:] >= w[1] ** np.arange(1, 21) - 1e-15)


@given(st.floats(min_value=0.05, max_value=3.0), st.integers(min_value=2, max_value=10**6))
def test_weight_matches_closed_form_anywhere(alpha, n):
    w = measures.bergman_weight(AdmissibleMeasure.mu_alpha(alpha), n)
    assert w == pytest.approx(float(measures.mu_alpha_weight(alpha, n)), abs=1e-10)


def test_tabulated_measure_reproduces_mu_alpha():
    s = np.geomspace(1e-7, 30.0, 400)
    h = 2.0 * np.exp(-2.0 * s)
    mu = AdmissibleMeasure.tabulated(list(zip(s, h)))
    w = measures.weights_at(mu, np.array([2, 10, 100]))
    np.testing.assert_allclose(w, measures.mu_alpha_weight(0.0, [2, 10, 100]), rtol=1e-4)


def test_spec_round_trip():
    for mu in FAMILIES:
        assert AdmissibleMeasure.from_spec(json.loads(json.dumps(mu.to_spec()))) == mu


def test_h1_h2_condition_ratios():
    mu = AdmissibleMeasure.mu_alpha(1.0)
    assert np.isfinite(measures.h1_condition_ratio(mu, 1.0, np.linspace(0.1, 1, 10), np.linspace(0.01, 1, 10)))
    assert measures.h2_condition_ratio(mu, np.geomspace(1e-4, 1, 10)) > 0
