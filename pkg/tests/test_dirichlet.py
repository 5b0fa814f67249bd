import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dvlab import dirichlet as dz
from dvlab import sieve


def series_strategy(max_N=60, smooth_primes=None):
    """Random dense series with complex coefficients, optionally supported on smooth indices."""

    @st.composite
    def build(draw):
        N = draw(st.integers(min_value=2, max_value=max_N))
        re = draw(st.lists(st.floats(-2, 2), min_size=N, max_size=N))
        im = draw(st.lists(st.floats(-2, 2), min_size=N, max_size=N))
        c = np.array(re) + 1j * np.array(im)
        if smooth_primes is not None:
            _, rest = sieve.exponent_vectors(np.arange(1, N + 1), sieve.first_primes(smooth_primes))
            c[rest != 1] = 0
        return dz.DirichletSeries(c)

    return build()


def brute_multiply(f, g, N):
    c = np.zeros(N, dtype=complex)
    for k in range(1, N + 1):
        for m in range(1, k + 1):
            if k % m == 0:
                c[k - 1] += f[m] * g[k // m]
    return c


def test_multiply_examples():
    assert dz.multiply(dz.monomial(2), dz.monomial(3), 6) == dz.monomial(6)
    z4 = dz.zeta_truncation(4)
    np.testing.assert_array_equal(dz.multiply(z4, z4, 4).coefficients, [1, 2, 2, 3])
    f = dz.DirichletSeries(np.arange(1, 11))
    assert dz.multiply(f, dz.constant(1.0), 10) == f


@given(series_strategy(), series_strategy())
def test_multiply_matches_brute_force(f, g):
    N = max(f.N, g.N)
    np.testing.assert_allclose(dz.multiply(f, g, N).coefficients, brute_multiply(f, g, N), atol=1e-12)


@given(series_strategy(), series_strategy(), series_strategy())
def test_multiply_commutative_associative(f, g, h):
    N = 60
    np.testing.assert_allclose(dz.multiply(f, g, N).coefficients, dz.multiply(g, f, N).coefficients, atol=1e-12)
    lhs = dz.multiply(dz.multiply(f, g, N), h, N)
    rhs = dz.multiply(f, dz.multiply(g, h, N), N)
    np.testing.assert_allclose(lhs.coefficients, rhs.coefficients, atol=1e-10)


@given(series_strategy(), series_strategy())
def test_leibniz_rule(f, g):
    N = 60
    lhs = dz.derivative(dz.multiply(f, g, N))
    rhs = dz.multiply(dz.derivative(f), g, N) + dz.multiply(f, dz.derivative(g), N)
    np.testing.assert_allclose(lhs.coefficients, rhs.coefficients, atol=1e-10)


@given(series_strategy(), series_strategy(), st.floats(0, 3))
def test_translate_commutes_with_multiply(f, g, sigma):
    N = 60
    lhs = dz.translate(dz.multiply(f, g, N), sigma)
    rhs = dz.multiply(dz.translate(f, sigma), dz.translate(g, sigma), N)
    np.testing.assert_allclose(lhs.coefficients, rhs.coefficients, atol=1e-10)


@given(series_strategy(), st.floats(0, 2), st.floats(0, 2))
def test_translate_semigroup(f, a, b):
    np.testing.assert_allclose(dz.translate(dz.translate(f, a), b).coefficients,
                               dz.translate(f, a + b).coefficients, rtol=1e-12, atol=1e-300)


def test_translate_examples():
    assert dz.translate(dz.monomial(2), 1.0) == 0.5 * dz.monomial(2)
    f = dz.DirichletSeries([1, 2, 3])
    assert dz.translate(f, 0.0) == f
    with pytest.raises(ValueError):
        dz.translate(f, -0.1)


def test_derivative_examples():
    assert dz.derivative(dz.constant(3.0, 5)) == dz.DirichletSeries(np.zeros(5))
    np.testing.assert_allclose(dz.derivative(dz.monomial(2)).coefficients, [0, -math.log(2)])


@given(series_strategy(), st.floats(-5, 5))
def test_derivative_matches_finite_difference(f, t):
    s = 2.0 + 1j * t
    h = 1e-5
    fd = (dz.evaluate(f, s + h).value - dz.evaluate(f, s - h).value) / (2 * h)
    assert abs(dz.evaluate(dz.derivative(f), s).value - fd) < 1e-6


def test_evaluate_examples():
    assert dz.evaluate(dz.constant(1.0), 0.3 + 7j).value == 1
    assert dz.evaluate(dz.monomial(2), 1.0).value == pytest.approx(0.5)
    ev = dz.evaluate(dz.zeta_truncation(10**6), 2.0)
    assert abs(ev.value - math.pi**2 / 6) < 1e-6
    assert ev.tail_bound == pytest.approx(1e-6)
    assert abs(ev.value - math.pi**2 / 6) <= ev.tail_bound


@given(series_strategy(), st.floats(0.1, 4), st.floats(-30, 30))
def test_evaluate_triangle_inequality(f, sigma, t):
    n, a = f.terms()
    bound = float(np.sum(np.abs(a) * n.astype(float) ** -sigma))
    assert abs(dz.evaluate(f, sigma + 1j * t).value) <= bound * (1 + 1e-12) + 1e-300


def test_evaluate_many_matches_evaluate(rng):
    f = dz.DirichletSeries(rng.normal(size=300) + 1j * rng.normal(size=300))
    s = np.array([1.5, 2 + 3j, 0.7 - 1j])
    np.testing.assert_allclose(dz.evaluate_many(f, s), [dz.evaluate(f, x).value for x in s], rtol=1e-12)


def test_character_multiplicativity(rng):
    chi = dz.Character.random(5, rng)
    assert chi(6)[0] == pytest.approx(chi(2)[0] * chi(3)[0], abs=1e-14)
    n = np.arange(1, 200)
    _, rest = sieve.exponent_vectors(n, sieve.first_primes(5))
    n = n[rest == 1]
    table = dict(zip(n.tolist(), chi(n).tolist()))
    for m in n:
        for k in n:
            if m * k in table:
                assert table[m * k] == pytest.approx(table[m] * table[k], abs=1e-13)
    assert np.allclose(np.abs(chi(n)), 1.0)


def test_character_rejects_non_unimodular_and_short_length():
    with pytest.raises(ValueError):
        dz.Character(np.array([1.0, 2.0]))
    with pytest.raises(dz.CharacterLengthError):
        dz.Character.trivial(2)(5)


def test_twist_examples():
    f = dz.DirichletSeries(np.arange(1, 13))
    assert dz.twist(f, dz.Character.trivial(5)) == f
    chi = dz.Character(np.array([-1.0, 1.0, 1.0]))
    assert dz.twist(dz.monomial(2), chi) == (-1.0) * dz.monomial(2)
    with pytest.raises(dz.CharacterLengthError):
        dz.twist(dz.zeta_truncation(7), dz.Character.trivial(3))


@given(series_strategy(smooth_primes=3), series_strategy(smooth_primes=3), st.integers(0, 2**31))
def test_twist_commutes_with_multiply_and_derivative(f, g, seed):
    chi = dz.Character.random(3, np.random.default_rng(seed))
    N = 60
    lhs = dz.twist(dz.multiply(f, g, N), chi)
    rhs = dz.multiply(dz.twist(f, chi), dz.twist(g, chi), N)
    np.testing.assert_allclose(lhs.coefficients, rhs.coefficients, atol=1e-10)
    np.testing.assert_allclose(dz.twist(dz.derivative(f), chi).coefficients,
                               dz.derivative(dz.twist(f, chi)).coefficients, atol=1e-12)
    np.testing.assert_allclose(np.abs(dz.twist(f, chi).coefficients), np.abs(f.coefficients), atol=1e-12)


def test_bohr_lift_examples():
    F = dz.bohr_lift(dz.monomial(6), 2)
    assert F.terms() == {(1, 1): 1}
    with pytest.raises(dz.SmoothnessError) as exc:
        dz.bohr_lift(dz.monomial(5), 2)
    assert 5 in list(exc.value.offending)


@given(series_strategy(max_N=200, smooth_primes=3))
def test_bohr_round_trip(f):
    F = dz.bohr_lift(f, 3)
    assert dz.inverse_bohr_lift(F, f.N) == f
    assert dz.bohr_lift(dz.inverse_bohr_lift(F), 3) == F


def test_bohr_lift_turns_convolution_into_product(rng):
    F = dz.PolydiscPolynomial(rng.normal(size=(3, 2)) + 0j)
    G = dz.PolydiscPolynomial(rng.normal(size=(2, 3)) + 0j)
    f, g = dz.inverse_bohr_lift(F), dz.inverse_bohr_lift(G)
    h = dz.multiply(f, g, f.N * g.N)
    z = np.array([[0.3 + 0.1j, -0.5j], [0.9, 0.2]])
    np.testing.assert_allclose(dz.bohr_lift(h, 2)(z), F(z) * G(z), rtol=1e-12)


def test_bohr_lift_is_evaluation_at_prime_powers(rng):
    f = dz.inverse_bohr_lift(dz.PolydiscPolynomial(rng.normal(size=(4, 3))))
    s = 1.3 + 2.1j
    z = np.array([2.0**-s, 3.0**-s])
    assert dz.bohr_lift(f, 2)(z) == pytest.approx(dz.evaluate(f, s).value, rel=1e-12)


def test_sparse_series_selected_and_consistent():
    f = dz.from_terms({2: 1.0, 1000: 2.0}, 10**6)
    assert isinstance(f, dz.SparseDirichletSeries)
    g = dz.from_terms({2: 1.0, 3: 2.0})
    assert isinstance(g, dz.DirichletSeries)
    assert f[1000] == 2.0 and f[999] == 0
    small = dz.from_terms({2: 1.0, 300: -1j}, 30_000)
    np.testing.assert_allclose(dz.multiply(small, g, 1000).coefficients,
                               dz.multiply(small.to_dense(), g, 1000).coefficients)
    assert dz.evaluate(small, 2.0).value == pytest.approx(dz.evaluate(small.to_dense(), 2.0).value)


def test_series_csv_round_trip(tmp_path, rng):
    f = dz.DirichletSeries(rng.normal(size=40) + 1j * rng.normal(size=40))
    dz.write_series_csv(tmp_path / "f.csv", f)
    assert dz.read_series_csv(tmp_path / "f.csv") == f
    assert (tmp_path / "f.csv").read_text().splitlines()[0] == "n,re,im"


def test_polynomial_csv_round_trip(tmp_path, rng):
    F = dz.PolydiscPolynomial(rng.normal(size=(3, 2, 2)) + 1j * rng.normal(size=(3, 2, 2)))
    dz.write_polynomial_csv(tmp_path / "F.csv", F)
    assert dz.read_polynomial_csv(tmp_path / "F.csv") == F
    assert (tmp_path / "F.csv").read_text().splitlines()[0] == "alpha_1,alpha_2,alpha_3,re,im"
