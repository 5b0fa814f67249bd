"""Admissible measures on (0, inf) and the quantities derived from them.

Every measure here is absolutely continuous, ``dmu = h(sigma) dsigma``. Besides
the density we expose its logarithm, which keeps ratios such as
``beta_mu / h`` finite where both factors underflow (the ``nu_gamma`` family
behaves like ``exp(-sigma^(1-gamma))`` near 0).
"""

from __future__ import annotations

import functools
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import gammainc, gammaln

from . import cache
from .quadrature import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    adaptive_rule,
    integrate,
    integrate_half_line,
)

FAMILIES = ("mu_alpha", "nu_gamma", "log_square", "tabulated")


class DegenerateDensityError(ValueError):
    """The density vanishes where a strictly positive value is required."""


@dataclass(frozen=True)
class AdmissibleMeasure:
    """A probability measure ``h(sigma) dsigma`` on (0, inf) with 0 in its support.

    Use the constructors :meth:`mu_alpha`, :meth:`nu_gamma`, :meth:`log_square`
    and :meth:`tabulated` rather than calling this directly.
    """

    family: str
    params: tuple = ()
    samples: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown measure family {self.family!r}")
        if self.family == "mu_alpha" and not self.params[0] > -1:
            raise ValueError("mu_alpha needs alpha > -1")
        if self.family == "nu_gamma" and not self.params[0] > 1:
            raise ValueError("nu_gamma needs gamma > 1")
        if self.family == "tabulated":
            s = np.asarray(self.samples, dtype=float)
            if s.ndim != 2 or s.shape[1] != 2 or s.shape[0] < 2:
                raise ValueError("tabulated samples must be a sequence of (sigma, h) pairs")
            if np.any(s[:, 0] <= 0) or np.any(np.diff(s[:, 0]) <= 0):
                raise ValueError("tabulated sigmas must be positive and increasing")
            if np.any(s[:, 1] < 0):
                raise ValueError("tabulated density must be nonnegative")
            if s[0, 0] > 1e-6:
                raise ValueError("0 must lie in the support: first tabulated sigma must be <= 1e-6")

    # constructors ---------------------------------------------------------
    @classmethod
    def mu_alpha(cls, alpha: float) -> "AdmissibleMeasure":
        return cls("mu_alpha", (float(alpha),))

    @classmethod
    def nu_gamma(cls, gamma: float) -> "AdmissibleMeasure":
        return cls("nu_gamma", (float(gamma),))

    @classmethod
    def log_square(cls) -> "AdmissibleMeasure":
        return cls("log_square")

    @classmethod
    def tabulated(cls, samples) -> "AdmissibleMeasure":
        return cls("tabulated", (), tuple((float(a), float(b)) for a, b in samples))

    @classmethod
    def from_spec(cls, spec: dict) -> "AdmissibleMeasure":
        fam = spec.get("family")
        if fam == "mu_alpha":
            return cls.mu_alpha(spec["alpha"])
        if fam == "nu_gamma":
            return cls.nu_gamma(spec["gamma"])
        if fam == "log_square":
            return cls.log_square()
        if fam == "tabulated":
            return cls.tabulated(spec["samples"])
        raise ValueError(f"invalid measure spec: {spec!r}")

    def to_spec(self) -> dict:
        if self.family == "mu_alpha":
            return {"family": "mu_alpha", "alpha": self.params[0]}
        if self.family == "nu_gamma":
            return {"family": "nu_gamma", "gamma": self.params[0]}
        if self.family == "log_square":
            return {"family": "log_square"}
        return {"family": "tabulated", "samples": [list(p) for p in self.samples]}

    @property
    def support_upper(self) -> float:
        """Right end of the support (inf for ``mu_alpha``)."""
        if self.family == "nu_gamma":
            g = self.params[0]
            # the clipped density is positive exactly while s^{g-1} < g - 1
            return min(1.0, (g - 1.0) ** (1.0 / (g - 1.0)))
        if self.family == "log_square":
            return 1.0
        if self.family == "tabulated":
            return self.samples[-1][0]
        return math.inf

    @property
    def normalization(self) -> float:
        """Constant multiplying the raw density so that the total mass is 1."""
        if self.family == "mu_alpha":
            a = self.params[0]
            return math.exp((a + 1) * math.log(2.0) - gammaln(a + 1))
        if self.family == "nu_gamma":
            return _nu_gamma_constant(self.params[0])
        if self.family == "log_square":
            return 1.0
        return _tabulated_constant(self.samples)

    def log_density(self, sigma) -> np.ndarray:
        s = np.asarray(sigma, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.log(self.normalization) + _raw_log_density(self, s)
        return np.where(s > 0, out, -np.inf)

    def __str__(self) -> str:
        if self.family == "mu_alpha":
            return f"MuAlpha({self.params[0]:g})"
        if self.family == "nu_gamma":
            return f"NuGamma({self.params[0]:g})"
        if self.family == "log_square":
            return "LogSquare"
        return f"Tabulated({len(self.samples)} samples)"


def _raw_log_density(mu: AdmissibleMeasure, s: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if mu.family == "mu_alpha":
            a = mu.params[0]
            return a * np.log(s) - 2.0 * s
        if mu.family == "nu_gamma":
            g = mu.params[0]
            # (g-1) s^{-2g} - s^{-(g+1)} = s^{-2g} ((g-1) - s^{g-1}); clipped at 0
            bracket = (g - 1.0) - np.power(s, g - 1.0)
            val = -np.power(s, 1.0 - g) - 2.0 * g * np.log(s) + np.log(np.where(bracket > 0, bracket, 0.0))
            return np.where((s <= 1.0) & (bracket > 0), val, -np.inf)
        if mu.family == "log_square":
            inside = s <= 1.0
            ss = np.where(inside, s, 1.0)
            val = -np.log(ss) - 2.0 * np.log(np.log(np.e / ss))
            return np.where(inside, val, -np.inf)
        table = np.asarray(mu.samples)
        interp = _tabulated_interp(mu.samples)
        lo, hi = table[0, 0], table[-1, 0]
        inside = (s >= lo) & (s <= hi)
        vals = interp(np.log(np.clip(s, lo, hi)))
        return np.where(inside & (vals > 0), np.log(np.where(vals > 0, vals, 1.0)), -np.inf)


@functools.lru_cache(maxsize=None)
def _tabulated_interp(samples: tuple) -> PchipInterpolator:
    table = np.asarray(samples)
    return PchipInterpolator(np.log(table[:, 0]), table[:, 1], extrapolate=False)


def _raw_mass(mu: AdmissibleMeasure) -> float:
    q = DEFAULT_QUADRATURE
    f = lambda s: np.exp(_raw_log_density(mu, s))
    upper = min(mu.support_upper, q.upper_cutoff)
    v, _ = integrate_half_line(f, q, upper=upper)
    return float(v)


@functools.lru_cache(maxsize=None)
def _nu_gamma_constant(gamma: float) -> float:
    return 1.0 / _raw_mass(AdmissibleMeasure("nu_gamma", (gamma,)))


@functools.lru_cache(maxsize=None)
def _tabulated_constant(samples: tuple) -> float:
    return 1.0 / _raw_mass(AdmissibleMeasure("tabulated", (), samples))


def left_tail_mass(mu: AdmissibleMeasure, delta: float) -> float:
    """``mu([0, delta])`` for tiny ``delta`` in closed form (the part the log map cuts off)."""
    if delta <= 0:
        return 0.0
    if mu.family == "mu_alpha":
        return float(gammainc(mu.params[0] + 1.0, 2.0 * delta))
    if mu.family == "log_square":
        return 1.0 / (1.0 + math.log(1.0 / min(delta, 1.0)))
    if mu.family == "tabulated":
        s0 = mu.samples[0][0]
        return float(density(mu, delta) * delta) if delta > s0 else 0.0
    return 0.0  # nu_gamma: exp(-delta^(1-gamma)) underflows


# ----------------------------------------------------------------------------
# operations


def density(mu: AdmissibleMeasure, sigma) -> np.ndarray | float:
    """Density ``h(sigma)``; zero outside the support. Raises for ``sigma <= 0``."""
    s = np.asarray(sigma, dtype=float)
    if np.any(s <= 0):
        raise ValueError("density is defined for sigma > 0 only")
    out = np.exp(mu.log_density(s))
    return float(out) if out.ndim == 0 else out


def _upper(mu: AdmissibleMeasure, q: QuadratureConfig) -> float:
    return min(mu.support_upper, q.upper_cutoff)


def measure_of_interval(mu: AdmissibleMeasure, t: float, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """``mu([0, t])`` by adaptive quadrature."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return 0.0
    upper = min(t, _upper(mu, q))
    v, _ = integrate_half_line(lambda s: np.exp(mu.log_density(s)), q, upper=upper)
    v += left_tail_mass(mu, min(upper, 1.0) * math.exp(-q.log_cutoff))
    return float(min(max(v, 0.0), 1.0))


_RATIO_BREAKS = tuple(10.0 ** np.arange(-16, 0)) + (0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0)


def log_density_ratio(mu: AdmissibleMeasure, sigma: float, x: np.ndarray) -> np.ndarray:
    """``log h(sigma e^{-x}) - log h(sigma)`` without cancellation between large logs."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if mu.family == "mu_alpha":
            return -mu.params[0] * x - 2.0 * sigma * np.expm1(-x)
        if mu.family == "log_square" and sigma <= 1.0:
            return x - 2.0 * np.log1p(x / math.log(math.e / sigma))
        if mu.family == "nu_gamma" and sigma <= 1.0:
            g = mu.params[0]
            u = sigma * np.exp(-x)
            b_u = (g - 1.0) - np.power(u, g - 1.0)
            b_s = (g - 1.0) - sigma ** (g - 1.0)
            val = (-sigma ** (1.0 - g) * np.expm1((g - 1.0) * x) + 2.0 * g * x
                   + np.log(np.where(b_u > 0, b_u, 0.0)) - math.log(b_s))
            return np.where(b_u > 0, val, -np.inf)
        return mu.log_density(sigma * np.exp(-x)) - float(mu.log_density(sigma))


def _ratio_integral(mu: AdmissibleMeasure, sigma: float, q: QuadratureConfig, log_ref: float) -> float:
    """``int_0^sigma (sigma - u) h(u) du * exp(-log_ref)`` via ``u = sigma e^{-x}``.

    Relative tolerance only: for ``nu_gamma`` the integrand is a spike of width
    ``~sigma^(gamma-1)`` at ``x = 0`` and its absolute size is arbitrary.
    """
    shift = float(mu.log_density(sigma)) - log_ref if np.isfinite(mu.log_density(sigma)) else None

    def g(x):
        if shift is None:
            logs = mu.log_density(sigma * np.exp(-x)) - log_ref
        else:
            logs = log_density_ratio(mu, sigma, x) + shift
        return -np.expm1(-x) * np.exp(-x) * np.exp(logs)

    res = adaptive_rule(g, 0.0, q.log_cutoff, 1e-300, q.rel_tol, q.max_subdivisions,
                        initial_panels=4, breakpoints=_RATIO_BREAKS)
    v = float(res.value)
    # mass cut off below sigma * e^{-log_cutoff} contributes ~ sigma * mu([0, delta])
    tail = left_tail_mass(mu, sigma * math.exp(-q.log_cutoff))
    if tail > 0:
        v_tail = sigma * math.exp(math.log(tail) - log_ref)
    else:
        v_tail = 0.0
    return sigma * sigma * v + v_tail


def beta_mu(mu: AdmissibleMeasure, sigma: float, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """``beta_mu(sigma) = int_0^sigma (sigma - u) dmu(u)``."""
    if sigma <= 0:
        raise ValueError("beta_mu needs sigma > 0")
    up = mu.support_upper
    if sigma > up:
        # beyond the support, beta is affine: sigma - mean
        return float(beta_mu(mu, up, q) + (sigma - up) * measure_of_interval(mu, up, q))
    if sigma > 1.0:
        # split at 1 so the log map only covers (0, 1]
        m1 = measure_of_interval(mu, 1.0, q)
        tail_mass, _ = integrate(lambda s: np.exp(mu.log_density(s)), 1.0, sigma, q)
        tail_first, _ = integrate(lambda s: s * np.exp(mu.log_density(s)), 1.0, sigma, q)
        return float(beta_mu(mu, 1.0, q) + (sigma - 1.0) * m1 + sigma * tail_mass - tail_first)
    return _ratio_integral(mu, sigma, q, 0.0)


def omega(mu: AdmissibleMeasure, sigma: float, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Bloch weight ``sqrt(beta_mu(sigma) / h(sigma))`` on ``(0, 1]``."""
    if not 0 < sigma <= 1:
        raise ValueError("omega is defined for 0 < sigma <= 1")
    log_h = float(mu.log_density(sigma))
    if not np.isfinite(log_h):
        raise DegenerateDensityError(f"density of {mu} vanishes at sigma={sigma}")
    return math.sqrt(_ratio_integral(mu, sigma, q, log_h))


def check_admissible(mu: AdmissibleMeasure, q: QuadratureConfig = DEFAULT_QUADRATURE,
                     eps_values=(1e-1, 1e-2, 1e-3)) -> dict:
    """Numerical audit of the measure invariants: unit mass, 0 in the support."""
    mass = measure_of_interval(mu, _upper(mu, q), q)
    near_zero = {e: measure_of_interval(mu, e, q) for e in eps_values}
    # mu([0, eps]) can underflow (nu_gamma: about exp(-eps^{1-gamma})), so positivity
    # is read off the log density of the continuous h inside (0, eps]
    log_h = {e: float(mu.log_density(e / 2)) for e in eps_values}
    return {
        "mass": mass,
        "mass_error": abs(mass - 1.0),
        "mass_near_zero": near_zero,
        "log_density_near_zero": log_h,
        "zero_in_support": all(np.isfinite(v) for v in log_h.values()),
    }


def h1_condition_ratio(mu: AdmissibleMeasure, alpha: float, deltas, ts) -> float:
    """``sup h(delta t) / (delta^alpha h(t))`` over the given grids (finite iff H1 holds there)."""
    d = np.asarray(deltas, float)[:, None]
    t = np.asarray(ts, float)[None, :]
    log_ratio = mu.log_density(d * t) - alpha * np.log(d) - mu.log_density(t)
    return float(np.exp(np.max(log_ratio)))


def h2_condition_ratio(mu: AdmissibleMeasure, sigmas, n_inner: int = 16) -> float:
    """``inf h(x) / h(sigma)`` over ``x in [sigma/2, sigma]`` on the grid (positive iff H2 holds there)."""
    s = np.asarray(sigmas, float)[:, None]
    x = s * np.linspace(0.5, 1.0, n_inner)[None, :]
    log_ratio = mu.log_density(x) - mu.log_density(s)
    return float(np.exp(np.min(log_ratio)))


# ----------------------------------------------------------------------------
# Bergman weights


def _weight_rule(mu: AdmissibleMeasure, log_n: np.ndarray, q: QuadratureConfig):
    """Composite rules on (0, 1] (log variable) and [1, upper] for ``int n^{-2s} dmu``.

    Refinement is driven by probe frequencies spanning ``log_n``; the integrand
    family is monotone and smooth in ``log n`` so the probes control the rest.
    """
    lmax = float(np.max(log_n)) if log_n.size else 0.0
    probes = np.unique(np.concatenate([[0.0], np.geomspace(0.05, max(lmax, 0.05), 24), [lmax]]))

    def g(u):
        s = np.exp(-u)
        base = np.exp(mu.log_density(s)) * s
        return base[:, None] * np.exp(-2.0 * s[:, None] * probes[None, :])

    r1 = adaptive_rule(g, 0.0, q.log_cutoff, q.abs_tol, q.rel_tol, q.max_subdivisions,
                       breakpoints=(0.5, 1.0, 2.0, 4.0, 8.0, 16.0))
    s1 = np.exp(-r1.nodes)
    w1 = r1.weights * s1 * np.exp(mu.log_density(s1))
    nodes, weights = [s1], [w1]
    up = _upper(mu, q)
    if up > 1.0:
        def g2(s):
            return np.exp(mu.log_density(s))[:, None] * np.exp(-2.0 * s[:, None] * probes[None, :])

        r2 = adaptive_rule(g2, 1.0, up, q.abs_tol, q.rel_tol, q.max_subdivisions,
                           breakpoints=tuple(np.arange(2.0, up, 2.0)))
        nodes.append(r2.nodes)
        weights.append(r2.weights * np.exp(mu.log_density(r2.nodes)))
    return np.concatenate(nodes), np.concatenate(weights)


def weights_at(mu: AdmissibleMeasure, ns, q: QuadratureConfig = DEFAULT_QUADRATURE,
               chunk: int = 4096) -> np.ndarray:
    """Bergman weights ``w_n`` for an arbitrary array of indices (no caching)."""
    ns = np.asarray(ns, dtype=float)
    if np.any(ns < 1):
        raise ValueError("weights need n >= 1")
    flat = ns.ravel()
    log_n = np.log(flat)
    nodes, wts = _weight_rule(mu, log_n, q)
    out = np.empty(flat.size)
    for i in range(0, flat.size, chunk):
        ln = log_n[i : i + chunk]
        out[i : i + chunk] = np.exp(-2.0 * ln[:, None] * nodes[None, :]) @ wts
    # mass below exp(-log_cutoff) sees n^{-2 sigma} = 1 to within 2 e^{-log_cutoff} log n
    out += left_tail_mass(mu, math.exp(-q.log_cutoff))
    out[flat == 1] = 1.0
    return out.reshape(ns.shape)


def bergman_weight(mu: AdmissibleMeasure, n: int, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """``w_n = int_0^inf n^{-2 sigma} dmu(sigma)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return float(weights_at(mu, np.array([n]), q)[0])


def _cache_key(mu: AdmissibleMeasure, q: QuadratureConfig) -> str:
    blob = json.dumps({"measure": mu.to_spec(), "quadrature": q.to_dict()}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:20]


def weight_cache_path(mu: AdmissibleMeasure, q: QuadratureConfig = DEFAULT_QUADRATURE):
    return cache.cache_dir() / f"weights_{mu.family}_{_cache_key(mu, q)}.json"


@functools.lru_cache(maxsize=32)
def _weight_table_memo(mu: AdmissibleMeasure, N: int, q: QuadratureConfig) -> np.ndarray:
    path = weight_cache_path(mu, q)
    try:
        blob = cache.read_json(path)
        if (blob["header"]["measure"] == mu.to_spec() and blob["header"]["quadrature"] == q.to_dict()
                and blob["header"]["N"] >= N):
            arr = np.array(blob["weights"][:N], dtype=float)
            if arr.shape == (N,) and np.all(np.isfinite(arr)):
                return arr
    except (OSError, ValueError, KeyError, TypeError):
        pass  # missing or corrupt: recompute below
    arr = weights_at(mu, np.arange(1, N + 1), q)
    header = {"family": mu.family, "measure": mu.to_spec(), "quadrature": q.to_dict(), "N": N}
    # json floats round-trip exactly (17 significant digits)
    cache.write_json(path, {"header": header, "weights": arr.tolist()})
    return arr


def weight_table(mu: AdmissibleMeasure, N: int, q: QuadratureConfig = DEFAULT_QUADRATURE) -> np.ndarray:
    """``(w_1, ..., w_N)``, persisted on disk keyed by measure and quadrature settings."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return _weight_table_memo(mu, int(N), q).copy()


def mu_alpha_weight(alpha: float, n) -> np.ndarray:
    """Closed form ``(1 + log n)^{-(alpha+1)}`` for the ``mu_alpha`` family."""
    return np.power(1.0 + np.log(np.asarray(n, dtype=float)), -(alpha + 1.0))
