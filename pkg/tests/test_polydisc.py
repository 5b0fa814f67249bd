import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dvlab import polydisc as pd
from dvlab.dirichlet import PolydiscPolynomial


def poly(terms, d):
    return PolydiscPolynomial.from_terms(terms, d)


def random_points(rng, n, d, radius=0.9):
    return radius * np.sqrt(rng.uniform(size=(n, d))) * np.exp(2j * np.pi * rng.uniform(size=(n, d)))


def test_bergman_norm_examples():
    assert pd.bergman_norm_polydisc(poly({(0,): 1.0}, 1)) == 1.0
    for k in range(6):
        assert pd.bergman_norm_polydisc(poly({(k,): 1.0}, 1)) == pytest.approx(1 / math.sqrt(k + 1))
    assert pd.bergman_norm_polydisc(poly({(1, 2): 1.0}, 2)) == pytest.approx(1 / math.sqrt(6))


def test_bergman_norm_against_monte_carlo():
    rng = np.random.default_rng(0)
    for i in range(5):
        F = pd.random_polynomial(2, 2, rng)
        est, se = pd.bergman_norm_mc(F, 200_000, seed=i)
        assert abs(est - pd.bergman_norm_polydisc(F)) < 3 * se + 1e-12


def test_mobius_tuple_validation():
    with pytest.raises(ValueError):
        pd.MobiusTuple(np.array([1.0]), np.array([1.0]), (0,))
    with pytest.raises(ValueError):
        pd.MobiusTuple(np.array([0.1]), np.array([2.0]), (0,))
    with pytest.raises(ValueError):
        pd.MobiusTuple(np.array([0.1, 0.2]), np.ones(2), (0, 0))


def test_involution_and_origin():
    rng = np.random.default_rng(1)
    Phi = pd.MobiusTuple.at(np.array([0.3 + 0.4j, -0.7j]))
    z = random_points(rng, 100, 2)
    np.testing.assert_allclose(Phi(Phi(z)), z, atol=1e-13)
    np.testing.assert_allclose(Phi(np.zeros(2)), Phi.center)
    np.testing.assert_allclose(pd.MobiusTuple.identity(3)(z[:, [0, 1, 0]]), z[:, [0, 1, 0]])


def test_mobius_maps_polydisc_to_itself():
    rng = np.random.default_rng(2)
    for Phi in pd.sample_centers(3, 20, seed=4):
        w = Phi(random_points(rng, 50, 3, radius=0.999))
        assert np.all(np.abs(w) < 1)


def test_compose_identity_and_value_at_origin():
    rng = np.random.default_rng(3)
    F = pd.random_polynomial(2, 3, rng)
    G = pd.mobius_compose(F, pd.MobiusTuple.identity(2), 3)
    np.testing.assert_allclose(G.coeffs, F.coeffs, atol=1e-15)
    c = 0.4 - 0.2j
    H = pd.mobius_compose(poly({(1,): 1.0}, 1), pd.MobiusTuple.at(np.array([c])), 8)
    assert pd.value_at_origin(H) == pytest.approx(c)
    with pytest.raises(pd.TruncationError):
        pd.mobius_compose(F, pd.MobiusTuple.identity(2), 2)


def test_compose_twice_is_identity_on_points():
    rng = np.random.default_rng(4)
    F = pd.random_polynomial(2, 2, rng)
    Phi = pd.MobiusTuple.at(np.array([0.3, 0.2j]))
    cap = 160
    G = pd.mobius_compose(pd.mobius_compose(F, Phi, cap), Phi, cap)
    z = random_points(rng, 100, 2, radius=0.5)
    np.testing.assert_allclose(G(z), F(z), atol=1e-8)


@given(st.integers(0, 2**32 - 1))
def test_compose_matches_pointwise_composition(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4))
    F = pd.random_polynomial(d, 2, rng)
    Phi = pd.sample_centers(d, 1, seed=seed % 1000, radius=0.6)[0]
    G = pd.mobius_compose(F, Phi, 80)
    z = random_points(rng, 20, d, radius=0.5)
    np.testing.assert_allclose(G(z), F(Phi(z)), atol=1e-9)


def test_gram_diagonal_matches_radial_integral():
    for a in (0.0, 0.5, 0.9j, -0.95 + 0.1j):
        G = pd.mobius_gram(a, 1.0, 5)
        for k in range(6):
            assert G[k, k].real == pytest.approx(pd.mobius_power_norm_sq(a, k), rel=1e-12)
        np.testing.assert_allclose(G, G.conj().T)


@given(st.integers(0, 2**32 - 1))
def test_exact_composed_norm_bounds_truncations(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 3))
    F = pd.random_polynomial(d, 2, rng)
    Phi = pd.sample_centers(d, 1, seed=seed % 997, radius=0.7)[0]
    exact, err = pd.composed_norm_sq(F, Phi)
    low = pd.bergman_norm_sq(pd.mobius_compose(F, Phi, 20))
    high = pd.bergman_norm_sq(pd.mobius_compose(F, Phi, 200))
    assert low <= high * (1 + 1e-12) <= exact * (1 + 1e-9) + err
    assert high == pytest.approx(exact, rel=1e-9)
    assert pd.composition_tail_norm(F, Phi, 200) < 1e-4


def test_pythagoras_in_coefficients():
    rng = np.random.default_rng(5)
    for _ in range(10):
        F = pd.random_polynomial(2, 2, rng)
        f0 = pd.value_at_origin(F)
        for k in range(1, 5):
            Fk = pd.poly_power(F, k)
            c = Fk.coeffs.copy()
            c[0, 0] -= f0**k
            lhs = pd.bergman_norm_sq(PolydiscPolynomial(c))
            rhs = pd.bergman_norm_sq(Fk) - abs(f0) ** (2 * k)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12 * pd.bergman_norm_sq(Fk))


def test_seminorm_examples():
    assert pd.polydisc_bloch_seminorm(poly({(0, 0): 3.0}, 2)) == 0.0
    assert pd.polydisc_bloch_seminorm(poly({(1,): 1.0}, 1)) == pytest.approx(1.0)
    # -log(1 - z) = sum z^k / k: |F'(r)| (1 - r^2) = (1 + r)(1 - r^{K}) at degree K
    K = 200
    F = poly({(k,): 1.0 / k for k in range(1, K + 1)}, 1)
    r = np.linspace(0, 1, 200_001)
    oracle = float(np.max((1 + r) * (1 - r**K)))
    grid = pd.PolydiscGrid(n_radial=400, n_angle=8, min_gap=1e-4)
    v = pd.polydisc_bloch_seminorm(F, grid)
    assert v <= oracle * (1 + 1e-12)
    assert v == pytest.approx(oracle, rel=2e-3)
    assert 1.9 < v < 2.0  # the untruncated function has seminorm sup (1 + r) = 2


def test_seminorm_mobius_invariance_identity():
    rng = np.random.default_rng(6)
    F = pd.random_polynomial(2, 3, rng)
    Phi = pd.MobiusTuple(np.array([0.3 - 0.1j, 0.5j]), np.exp(1j * np.array([0.4, 2.0])), (1, 0))
    G = pd.mobius_compose(F, Phi, 250)
    z = random_points(rng, 40, 2, radius=0.4)
    w = Phi(z)
    for j in range(2):
        lhs = np.abs(pd.partial_derivative(G, j)(z)) * (1 - np.abs(z[:, j]) ** 2)
        # coordinate j of the input enters through the factor i with pi(i) = j
        i = Phi.permutation.index(j)
        rhs = np.abs(pd.partial_derivative(F, i)(w)) * (1 - np.abs(w[:, i]) ** 2)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-7, atol=1e-10)


def test_garsia_norm_examples():
    rng = np.random.default_rng(7)
    assert pd.garsia_norm(poly({(0, 0): 2.0}, 2), pd.sample_centers(2, 5)) == 0.0
    F = pd.random_polynomial(2, 2, rng)
    at_zero = pd.garsia_norm(F, [pd.MobiusTuple.identity(2)])
    expected = math.sqrt(pd.bergman_norm_sq(F) - abs(pd.value_at_origin(F)) ** 2)
    assert at_zero == pytest.approx(expected, rel=1e-12)
    centers = pd.sample_centers(2, 10, seed=1, radius=0.5)
    assert pd.garsia_norm(F, centers, degree_cap=200) == pytest.approx(pd.garsia_norm(F, centers), rel=1e-9)
    with pytest.raises(ValueError):
        pd.garsia_norm(F, [])


def test_garsia_and_bloch_are_comparable():
    rng = np.random.default_rng(8)
    centers = pd.sample_centers(2, 40, seed=2)
    grid = pd.PolydiscGrid(n_radial=48, n_angle=48, n_torus=16)
    ratios = []
    for _ in range(15):
        F = pd.random_polynomial(2, 2, rng)
        ratios.append(pd.garsia_norm(F, centers) / pd.polydisc_bloch_seminorm(F, grid))
    print(f"Garsia / Bloch bracket: [{min(ratios):.3f}, {max(ratios):.3f}]")
    assert 0 < min(ratios) and max(ratios) / min(ratios) < 10


def test_radicality_examples():
    rng = np.random.default_rng(9)
    F = pd.random_polynomial(2, 2, rng)
    centers = pd.sample_centers(2, 10, seed=3)
    rep = pd.radicality_check(F, 3, 3, centers)
    assert not rep.violations
    assert all(e["lhs"] == pytest.approx(e["rhs"], rel=1e-12) for e in rep.per_center)
    with pytest.raises(pd.TruncationError):
        pd.radicality_check(F, 3, 1, centers, degree_cap=5)
    with pytest.raises(ValueError):
        pd.radicality_check(F, 2, 3, centers)


def test_radicality_at_origin_via_superadditivity():
    # ||F - F(0)||^2 = sum_{alpha != 0} |c_alpha|^2 w_alpha and (x + y)^{1/2} >= ... give m=1, n=2
    rng = np.random.default_rng(10)
    for _ in range(20):
        F = pd.random_polynomial(2, 2, rng)
        rep = pd.radicality_check(F, 2, 1, [pd.MobiusTuple.identity(2)])
        (e,) = rep.per_center
        assert e["lhs"] <= e["rhs"] * (1 + 1e-12)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_radicality_randomised_audit(d):
    rng = np.random.default_rng(100 + d)
    centers = pd.sample_centers(d, 20, seed=d)
    for _ in range(15):
        F = pd.random_polynomial(d, 2, rng, int(rng.integers(1, 3**d + 1)))
        for m in range(1, 5):
            assert not pd.radicality_check(F, 4, m, centers).violations


def test_norm_chain_at_origin_is_monotone():
    rng = np.random.default_rng(11)
    for _ in range(20):
        F = pd.random_polynomial(2, 2, rng)
        f0 = pd.value_at_origin(F)
        chain = []
        for m in range(1, 6):
            Fm = pd.poly_power(F, m)
            chain.append(max(pd.bergman_norm_sq(Fm) - abs(f0) ** (2 * m), 0) ** (0.5 / m))
        assert np.all(np.diff(chain) >= -1e-12 * max(chain))


def test_poly_power_and_derivative():
    F = poly({(1, 0): 1.0, (0, 1): 1.0}, 2)
    F2 = pd.poly_power(F, 2)
    assert F2.terms() == {(2, 0): 1, (1, 1): 2, (0, 2): 1}
    D = pd.partial_derivative(F2, 0)
    assert D.terms() == {(1, 0): 2, (0, 1): 2}
    assert pd.poly_power(F, 0).terms() == {(0, 0): 1}
