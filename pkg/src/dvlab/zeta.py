"""Euler-Maclaurin evaluation of ``Z_k(s) = sum_{n>=1} (log n)^k n^{-s}`` for real ``s > 1``.

``Z_0 = zeta``, ``Z_2 = zeta''``, and in general ``Z_k = (-1)^k zeta^{(k)}``.
The sum is split as an explicit part ``n < N``, the integral from ``N`` to
infinity, the half endpoint value and the Bernoulli corrections

    sum_{n>=N} f(n) = int_N^inf f + f(N)/2 - sum_j B_{2j}/(2j)! f^{(2j-1)}(N) + R.

Derivatives of ``f(x) = (log x)^k x^{-s}`` stay in the finite family
``x^{-s-r} * poly(log x)``, so they are carried exactly as polynomial coefficients.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

EXPLICIT_TERMS = 10_000
CORRECTIONS = 6


def _derivative_poly(coef: np.ndarray, s: float, r: int) -> np.ndarray:
    """d/dx of ``x^{-s-r} * sum_i coef[i] (log x)^i`` as coefficients of ``x^{-s-r-1}``."""
    out = (-s - r) * coef
    out[:-1] += np.arange(1, coef.size) * coef[1:]
    return out


def log_power_tail_integral(k: float, s: float, N: float) -> float:
    """``int_N^inf (log x)^k x^{-s} dx = Gamma(k+1, (s-1) log N) / (s-1)^{k+1}``."""
    if s <= 1:
        raise ValueError("tail integral diverges for s <= 1")
    c = s - 1.0
    L = math.log(N)
    if float(k).is_integer():
        k = int(k)
        # closed form keeps full relative accuracy as c -> 0
        terms = sum(math.factorial(k) / math.factorial(i) * L**i / c ** (k - i + 1) for i in range(k + 1))
        return math.exp(-c * L) * terms
    return float(special.gammaincc(k + 1.0, c * L) * special.gamma(k + 1.0) / c ** (k + 1.0))


def log_power_tail(k: float, s: float, N: int, explicit_to: int = 256) -> float:
    """``sum_{n>N} (log n)^k n^{-s}`` for real ``k >= 0`` and ``s > 1``.

    Terms up to ``M = max(N, explicit_to)`` are summed directly; past ``M`` the
    integral, the endpoint term and the first Bernoulli correction are used, so
    the error is of the order of the third derivative of the summand at ``M``.
    """
    M = max(int(N), int(explicit_to))
    n = np.arange(int(N) + 1, M + 1, dtype=float)
    head = float(np.sum(np.log(n) ** k * n ** (-s)))
    L = math.log(M)
    f_M = L**k * M ** (-s)
    # f'(x) = x^{-s-1} (log x)^{k-1} (k - s log x)
    df_M = M ** (-s - 1.0) * ((k * L ** (k - 1.0) if k else 0.0) - s * L**k)
    return head + log_power_tail_integral(k, s, M) - 0.5 * f_M - df_M / 12.0


def log_power_sum(k: int, s: float, explicit_terms: int = EXPLICIT_TERMS,
                  corrections: int = CORRECTIONS) -> float:
    """``Z_k(s) = sum_{n>=1} (log n)^k n^{-s}`` for integer ``k >= 0`` and real ``s > 1``."""
    if s <= 1:
        raise ValueError(f"Z_k(s) has a pole at s = 1; got s = {s}")
    if k < 0 or int(k) != k:
        raise ValueError("k must be a nonnegative integer")
    k = int(k)
    N = int(explicit_terms)
    n = np.arange(1, N, dtype=float)
    ln = np.log(n)
    explicit = float(np.sum(ln**k * np.exp(-s * ln)))

    L = math.log(N)
    coef = np.zeros(k + 1 + 2 * corrections)
    coef[k] = 1.0
    f_N = np.polynomial.polynomial.polyval(L, coef) * N ** (-s)
    total = explicit + log_power_tail_integral(k, s, N) + 0.5 * f_N
    r = 0
    for j in range(1, corrections + 1):
        # advance coef to the (2j-1)-th derivative
        while r < 2 * j - 1:
            coef = _derivative_poly(coef, s, r)
            r += 1
        deriv = np.polynomial.polynomial.polyval(L, coef) * N ** (-s - r)
        total -= float(special.bernoulli(2 * j)[-1]) / math.factorial(2 * j) * deriv
    return total


def zeta(s: float) -> float:
    return log_power_sum(0, s)


def zeta_second_derivative(s: float) -> float:
    return log_power_sum(2, s)
