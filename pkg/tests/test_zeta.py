import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from dvlab import zeta


@pytest.mark.parametrize("s", [1.001, 1.1, 1.5, 2.0, 5.0, 30.0])
@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_log_power_sum_matches_mpmath(s, k):
    # sum (log n)^k n^{-s} = (-1)^k zeta^{(k)}(s)
    ref = float((-1) ** k * mpmath.zeta(s, derivative=k))
    assert zeta.log_power_sum(k, s) == pytest.approx(ref, rel=1e-13)


def test_closed_form_values():
    assert zeta.zeta(2.0) == pytest.approx(math.pi**2 / 6, rel=1e-15)
    assert zeta.zeta(4.0) == pytest.approx(math.pi**4 / 90, rel=1e-15)
    assert zeta.zeta_second_derivative(2.0) == pytest.approx(1.98928023429890, rel=1e-13)


def test_pole_is_rejected():
    with pytest.raises(ValueError):
        zeta.log_power_sum(0, 1.0)


@given(st.floats(1.05, 6.0), st.integers(1, 10**5), st.integers(0, 3))
def test_tail_plus_partial_sum_is_the_full_sum(s, N, k):
    n = np.arange(1, N + 1, dtype=float)
    partial = math.fsum(np.log(n) ** k * n**-s)
    assert partial + zeta.log_power_tail(k, s, N) == pytest.approx(zeta.log_power_sum(k, s), rel=1e-12)


@given(st.floats(0.3, 3.0), st.floats(1.05, 4.0), st.floats(2.0, 1e6))
def test_tail_integral_real_order_matches_quadrature(k, s, N):
    c = mpmath.mpf(s) - 1
    ref = float(mpmath.gammainc(k + 1, c * mpmath.log(N)) / c ** (k + 1))
    assert zeta.log_power_tail_integral(k, s, N) == pytest.approx(ref, rel=1e-8)


def test_integer_and_real_order_tail_agree():
    for s in (1.1, 2.0, 3.5):
        for k in (1, 2, 3):
            a = zeta.log_power_tail_integral(k, s, 1000.0)
            b = zeta.log_power_tail_integral(k + 1e-12, s, 1000.0)
            assert a == pytest.approx(b, rel=1e-9)
