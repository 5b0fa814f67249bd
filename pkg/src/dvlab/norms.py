"""Norms, seminorms and membership diagnostics for truncated Dirichlet series.

Hilbert-space norms are exact coefficient sums. Sup-type quantities (Bloch
seminorms) are grid maxima and therefore lower bounds of the true supremum;
every such result carries the grid it was computed on.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import dirichlet as dz
from . import measures, zeta
from .measures import AdmissibleMeasure
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig, adaptive_rule

WEIGHT_KINDS = ("classical", "mu_derived", "log_corrected", "power_law")


@dataclass(frozen=True)
class StripGrid:
    """Geometric grid in ``sigma`` on ``[sigma_min, 1]`` times a uniform grid in ``t``."""

    sigma_min: float = 2.0**-20
    n_sigma: int = 200
    T: float = 50.0
    n_t: int = 401

    def __post_init__(self):
        if not (0 < self.sigma_min <= 1):
            raise ValueError("sigma_min must lie in (0, 1]")
        if self.T <= 0:
            raise ValueError("T must be positive")
        if self.n_sigma < 1 or self.n_t < 1:
            raise ValueError("grids must be non-empty")

    @property
    def sigma_points(self) -> np.ndarray:
        if self.n_sigma == 1:
            return np.array([self.sigma_min])
        return np.geomspace(self.sigma_min, 1.0, self.n_sigma)

    @property
    def t_points(self) -> np.ndarray:
        if self.n_t == 1:
            return np.zeros(1)
        return np.linspace(-self.T, self.T, self.n_t)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BlochWeight:
    """The weight ``omega`` in ``sup omega(sigma)|f'(sigma+it)|``."""

    kind: str
    mu: AdmissibleMeasure | None = None
    delta: float = 1.0
    q: QuadratureConfig = field(default=DEFAULT_QUADRATURE, repr=False)

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "mu_derived" and self.mu is None:
            raise ValueError("a mu-derived weight needs a measure")
        if self.kind == "power_law" and not self.delta > 0:
            raise ValueError("power-law exponent must be positive")

    @classmethod
    def classical(cls) -> "BlochWeight":
        return cls("classical")

    @classmethod
    def mu_derived(cls, mu: AdmissibleMeasure, q: QuadratureConfig = DEFAULT_QUADRATURE) -> "BlochWeight":
        return cls("mu_derived", mu=mu, q=q)

    @classmethod
    def log_corrected(cls) -> "BlochWeight":
        return cls("log_corrected")

    @classmethod
    def power_law(cls, delta: float) -> "BlochWeight":
        return cls("power_law", delta=float(delta))

    def __call__(self, sigma) -> np.ndarray:
        s = np.asarray(sigma, dtype=float)
        if np.any(s <= 0) or np.any(s > 1):
            raise ValueError("Bloch weights live on (0, 1]")
        if self.kind == "classical":
            return s.copy()
        if self.kind == "log_corrected":
            return s * (1.0 - np.log(s))
        if self.kind == "power_law":
            return s**self.delta
        flat = [measures.omega(self.mu, float(x), self.q) for x in s.ravel()]
        return np.array(flat).reshape(s.shape)

    def describe(self) -> str:
        if self.kind == "mu_derived":
            return f"omega[{self.mu}]"
        if self.kind == "power_law":
            return f"sigma^{self.delta:g}"
        return self.kind


# ----------------------------------------------------------------------------
# Hilbert norms


def h2_norm(f: dz.Series) -> float:
    _, a = f.terms()
    return float(np.sqrt(np.sum(np.abs(a) ** 2)))


def series_weights(f: dz.Series, mu: AdmissibleMeasure, q: QuadratureConfig = DEFAULT_QUADRATURE) -> np.ndarray:
    """``w_n`` at the nonzero indices of ``f`` (cached table for dense series)."""
    n, _ = f.terms()
    if isinstance(f, dz.DirichletSeries):
        return measures.weight_table(mu, f.N, q)[n - 1]
    return measures.weights_at(mu, n, q)


def a2mu_norm(f: dz.Series, mu: AdmissibleMeasure, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """``sqrt(sum |a_n|^2 w_n)``."""
    _, a = f.terms()
    return float(np.sqrt(np.sum(np.abs(a) ** 2 * series_weights(f, mu, q))))


def a2mu_norm_integral(f: dz.Series, mu: AdmissibleMeasure, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """``(int_0^inf ||f_sigma||_{H^2}^2 dmu(sigma))^{1/2}`` by direct quadrature in ``sigma``."""
    n, a = f.terms()
    ln = np.log(n.astype(float))
    a2 = np.abs(a) ** 2

    def integrand(s):
        return np.exp(mu.log_density(s)) * (np.exp(-2.0 * np.outer(s, ln)) @ a2)

    # (0, 1] in the variable u = -log sigma
    r1 = adaptive_rule(lambda u: integrand(np.exp(-u)) * np.exp(-u), 0.0, q.log_cutoff,
                       q.abs_tol, q.rel_tol, q.max_subdivisions,
                       breakpoints=(0.5, 1.0, 2.0, 4.0, 8.0, 16.0))
    total = float(r1.value)
    upper = min(mu.support_upper, q.upper_cutoff)
    if upper > 1.0:
        r2 = adaptive_rule(integrand, 1.0, upper, q.abs_tol, q.rel_tol, q.max_subdivisions,
                           breakpoints=tuple(np.arange(2.0, upper, 2.0)))
        total += float(r2.value)
    # below exp(-log_cutoff) every n^{-2 sigma} is 1 to double precision
    total += measures.left_tail_mass(mu, math.exp(-q.log_cutoff)) * float(a2.sum())
    return math.sqrt(total)


# ----------------------------------------------------------------------------
# H^p by sampling the Bohr lift on the torus


@dataclass(frozen=True)
class HpEstimate:
    estimate: float
    std_error: float
    p: float
    d: int
    n_samples: int
    seed: int
    method: str

    def to_record(self) -> dict:
        return {"quantity": f"H^{self.p:g} norm", "value": self.estimate, "std_error": self.std_error,
                "d": self.d, "n_samples": self.n_samples, "seed": self.seed, "method": self.method}


def torus_values(F: dz.PolydiscPolynomial, theta: np.ndarray, chunk: int = 1 << 14) -> np.ndarray:
    """``F(e^{i theta})`` for angle rows ``theta`` of shape ``(m, d)``."""
    terms = F.terms()
    alphas = np.array(list(terms.keys()), dtype=float).reshape(-1, F.d)
    coeffs = np.array(list(terms.values()), dtype=complex)
    out = np.empty(theta.shape[0], dtype=complex)
    for i in range(0, theta.shape[0], chunk):
        out[i : i + chunk] = np.exp(1j * (theta[i : i + chunk] @ alphas.T)) @ coeffs
    return out


def _korobov_vector(n: int, d: int) -> np.ndarray:
    # generator near n/golden ratio, made coprime to n
    a = int(round(n / 1.6180339887498949)) | 1
    while math.gcd(a, n) != 1:
        a += 2
    return np.array([pow(a, j, n) for j in range(d)], dtype=np.int64)


def hp_norm_mc(f: dz.Series, p: float, d: int, n_samples: int = 20_000, seed: int = 0,
               method: str = "mc", n_shifts: int = 16) -> HpEstimate:
    """``(int_{T^d} |Bf|^p dm)^{1/p}`` by Monte Carlo or a randomly shifted rank-1 lattice.

    The standard error refers to the ``1/p``-th power via the delta method.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    F = dz.bohr_lift(f, d)
    rng = np.random.default_rng(seed)
    if method == "mc":
        theta = rng.uniform(0.0, 2.0 * np.pi, size=(n_samples, d))
        vals = np.abs(torus_values(F, theta)) ** p
        mean = float(vals.mean())
        se_mean = float(vals.std(ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else math.inf
    elif method == "lattice":
        m = max(2, n_samples // n_shifts)
        z = _korobov_vector(m, d)
        base = (np.arange(m)[:, None] * z[None, :] % m) / m
        means = []
        for _ in range(n_shifts):
            pts = (base + rng.uniform(size=d)) % 1.0
            means.append(float(np.mean(np.abs(torus_values(F, 2.0 * np.pi * pts)) ** p)))
        means = np.array(means)
        mean = float(means.mean())
        se_mean = float(means.std(ddof=1) / math.sqrt(n_shifts))
    else:
        raise ValueError(f"unknown method {method!r}")
    est = mean ** (1.0 / p)
    se = se_mean * est / (p * mean) if mean > 0 else 0.0
    return HpEstimate(est, se, float(p), d, int(n_samples), int(seed), method)


# ----------------------------------------------------------------------------
# Bloch-type seminorms


@dataclass(frozen=True)
class SeminormEstimate:
    """Grid maximum of ``omega(sigma)|f'(sigma+it)|`` (a lower bound for the sup)."""

    value: float
    sigma_at_max: float
    t_at_max: float
    sigmas: np.ndarray
    profile: np.ndarray  # sup over the t grid at each sigma
    fast_path: bool
    tail_bound: float  # bound on the neglected derivative tail at sigma_min
    grid: dict
    weight: str

    def __float__(self) -> float:
        return self.value

    def to_record(self) -> dict:
        return {"quantity": f"Bloch seminorm [{self.weight}]", "value": self.value,
                "kind": "lower bound (grid maximum)", "sigma_at_max": self.sigma_at_max,
                "t_at_max": self.t_at_max, "fast_path": self.fast_path,
                "derivative_tail_bound": self.tail_bound, "grid": self.grid}


def common_phase(f: dz.Series, start: int = 2) -> complex | None:
    """Unit ``c`` with ``a_n = c|a_n|`` for all nonzero ``a_n``, ``n >= start``, if one exists."""
    n, a = f.terms()
    a = a[n >= start]
    if a.size == 0:
        return 1.0 + 0j
    ph = a / np.abs(a)
    return complex(ph[0]) if np.allclose(ph, ph[0], rtol=0, atol=1e-14) else None


def derivative_abs_on_axis(f: dz.Series, sigmas: np.ndarray, chunk: int = 1 << 15) -> np.ndarray:
    """``sum_n |a_n| log n n^{-sigma}``, which equals ``|f'(sigma)|`` when phases agree."""
    n, a = f.terms()
    ln = np.log(n.astype(float))
    b = np.abs(a) * ln
    out = np.zeros(sigmas.size)
    for i in range(0, n.size, chunk):
        out += np.exp(-np.outer(sigmas, ln[i : i + chunk])) @ b[i : i + chunk]
    return out


def bloch_seminorm(f: dz.Series, weight: BlochWeight, grid: StripGrid = StripGrid(),
                   tail: Callable[[np.ndarray], np.ndarray] | None = None,
                   fast_path: bool | None = None) -> SeminormEstimate:
    """``max_{grid} omega(sigma)|f'(sigma+it)|``.

    When all coefficients beyond the constant share one phase, ``|f'(sigma+it)|``
    is maximised at ``t = 0`` and only the real axis is evaluated. ``tail``, if
    given, is an analytic model of ``sum_{n>N} |a_n| log n n^{-sigma}`` added on
    that path (for truncations of known infinite series).
    """
    sig = grid.sigma_points
    w = weight(sig)
    df = dz.derivative(f)
    can_fast = common_phase(f) is not None
    use_fast = can_fast if fast_path is None else (fast_path and can_fast)
    if fast_path and not can_fast:
        raise ValueError("fast path needs coefficients of one common phase")
    if tail is not None and not use_fast:
        raise ValueError("an analytic tail is only supported on the real-axis path")
    if use_fast:
        vals = derivative_abs_on_axis(f, sig)
        if tail is not None:
            vals = vals + np.asarray(tail(sig), dtype=float)
        profile = w * vals
        t_at = np.zeros(sig.size)
        tail_est = 0.0 if tail is not None else dz.tail_bound(df, grid.sigma_min)
    else:
        t = grid.t_points
        s = sig[:, None] + 1j * t[None, :]
        mags = np.abs(dz.evaluate_many(df, s))
        idx = np.argmax(mags, axis=1)
        profile = w * mags[np.arange(sig.size), idx]
        t_at = t[idx]
        tail_est = dz.tail_bound(df, grid.sigma_min)
    k = int(np.argmax(profile))
    return SeminormEstimate(float(profile[k]), float(sig[k]), float(t_at[k]), sig, profile,
                            bool(use_fast), float(tail_est), grid.to_dict(), weight.describe())


def hinf_c1_bound(g: dz.Series) -> float:
    """Upper bound ``sum |b_n| / n`` for ``sup_{Re s > 1} |g(s)|``."""
    n, b = g.terms()
    return float(np.sum(np.abs(b) / n))


# ----------------------------------------------------------------------------
# membership criteria


def block_sum_criterion(f: dz.Series, delta: float, x_values) -> list[tuple[float, float]]:
    """``(log x)^{1-delta} * sum_{x <= n <= x^2} a_n`` for each ``x``."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    n, a = f.terms()
    if np.any(a.imag != 0) or np.any(a.real < 0):
        raise ValueError("block sums need nonnegative real coefficients")
    csum = np.concatenate([[0.0], np.cumsum(a.real)])
    out = []
    for x in x_values:
        x = float(x)
        if x < math.e:
            raise ValueError(f"x must be >= e, got {x}")
        hi = math.floor(x * x)
        if hi > f.N:
            raise ValueError(f"x^2 = {x * x:g} exceeds the truncation N = {f.N}")
        lo_i = np.searchsorted(n, math.ceil(x), side="left")
        hi_i = np.searchsorted(n, hi, side="right")
        out.append((x, math.log(x) ** (1.0 - delta) * float(csum[hi_i] - csum[lo_i])))
    return out


def coefficient_bound_check(f: dz.Series, weight: BlochWeight | AdmissibleMeasure,
                            bloch_norm_estimate: float) -> list[tuple[int, float]]:
    """``|a_n| log n omega(1/log n) / (e * norm)`` for ``n >= 3``; all ratios are <= 1."""
    if isinstance(weight, AdmissibleMeasure):
        weight = BlochWeight.mu_derived(weight)
    n, a = f.terms()
    keep = n >= 3
    n, a = n[keep], a[keep]
    if n.size == 0:
        return []
    ln = np.log(n.astype(float))
    om = weight(1.0 / ln)
    if bloch_norm_estimate <= 0:
        raise ValueError("the norm estimate must be positive")
    ratio = np.abs(a) * ln * om / (math.e * bloch_norm_estimate)
    return list(zip(n.tolist(), ratio.tolist()))


# ----------------------------------------------------------------------------
# evaluation functionals


def _check_half_plane(sigma: float) -> None:
    if not sigma > 0.5:
        raise ValueError(f"evaluation functionals on H^2 need sigma > 1/2 (pole of zeta(2 sigma)); got {sigma}")


def eval_functional_h2(sigma: float) -> float:
    """``||delta_s||_{(H^2)*} = zeta(2 sigma)^{1/2}``."""
    _check_half_plane(sigma)
    return math.sqrt(zeta.log_power_sum(0, 2.0 * sigma))


def eval_deriv_functional_h2(sigma: float) -> float:
    """``||Delta_s||_{(H^2)*} = zeta''(2 sigma)^{1/2}`` (norm of ``f -> f'(s)``)."""
    _check_half_plane(sigma)
    return math.sqrt(zeta.log_power_sum(2, 2.0 * sigma))


def delta_witness(N: int) -> dz.DirichletSeries:
    """``a_n = 1/(n log n)`` for ``2 <= n <= N``."""
    n = np.arange(1, N + 1, dtype=float)
    c = np.zeros(N)
    c[1:] = 1.0 / (n[1:] * np.log(n[1:]))
    return dz.DirichletSeries(c)


def delta_witness_value(sigma: float, N: int = 10**7, chunk: int = 1 << 20) -> float:
    """Partial sum ``sum_{2<=n<=N} n^{-1-sigma}/log n`` (a lower bound: all terms are positive)."""
    total = 0.0
    for lo in range(2, N + 1, chunk):
        n = np.arange(lo, min(lo + chunk, N + 1), dtype=float)
        ln = np.log(n)
        total += float(np.sum(np.exp(-(1.0 + sigma) * ln) / ln))
    return total


@dataclass(frozen=True)
class DeltaBounds:
    lower: float
    upper: float
    witness: float
    N: int


def bloch_delta_functional_bounds(sigma: float, N: int = 10**7) -> DeltaBounds:
    """``log(1/sigma)/e <= ||delta_s||_{Bloch*} <= 1 + log(1/sigma)`` with the lower witness."""
    if not 0 < sigma < 1:
        raise ValueError("need 0 < sigma < 1")
    L = math.log(1.0 / sigma)
    return DeltaBounds(L / math.e, 1.0 + L, delta_witness_value(sigma, N), N)
