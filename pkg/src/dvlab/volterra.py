"""The Volterra operator ``T_g f = -int_s^inf f(w) g'(w) dw`` on Dirichlet series.

On coefficients ``(T_g f)' = f g'`` gives

    (T_g f)_k = (1/log k) * sum_{mn=k, n>=2} a_m b_n log n,      (T_g f)_1 = 0,

and in the orthonormal basis ``e~_n = n^{-s}/sqrt(w_n)`` of ``A^2_mu`` the finite
section is the sparse lower-triangular (in divisibility order) matrix

    M[k, j] = b_{k/j} * log(k/j)/log k * sqrt(w_k / w_j).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import svds

from . import dirichlet as dz
from . import measures, sieve
from .measures import AdmissibleMeasure
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig, adaptive_rule, composite_rule

DENSE_SVD_LIMIT = 2048


class DegenerateSymbolError(ValueError):
    """The symbol is constant, so ``T_g = 0`` and there is no leading index ``n_0``."""


def volterra_apply(g: dz.Series, f: dz.Series, N_out: int) -> dz.DirichletSeries:
    """Coefficients of ``T_g f`` up to ``N_out``."""
    h = dz.multiply(f, dz.derivative(g), N_out)  # (T_g f)' = f g'
    c = np.zeros(N_out, dtype=complex)
    k = np.arange(2, N_out + 1, dtype=float)
    c[1:] = -h.coefficients[1:] / np.log(k)
    return dz.DirichletSeries(c)


def volterra_apply_quadrature(g: dz.Series, f: dz.Series, s: complex,
                              q: QuadratureConfig = DEFAULT_QUADRATURE) -> complex:
    """``-int_0^X f(s+x) g'(s+x) dx`` along the horizontal ray from ``s``.

    ``X`` is chosen so that ``sum|a_m| * sum|b_n| log n * 2^{-Re s - X}/log 2`` (a bound
    for the discarded integral, since every surviving term has ``mn >= 2``) is below ``abs_tol``.
    """
    s = complex(s)
    if s.real < 1:
        raise ValueError("the ray integral needs Re s >= 1")
    dg = dz.derivative(g)
    _, a = f.terms()
    _, b = dg.terms()
    scale = float(np.sum(np.abs(a)) * np.sum(np.abs(b)))
    if scale == 0:
        return 0j
    X = max(1.0, (math.log2(scale / (q.abs_tol * math.log(2))) - s.real))

    def integrand(x):
        w = s + x
        return dz.evaluate_many(f, w) * dz.evaluate_many(dg, w)

    res = adaptive_rule(integrand, 0.0, X, q.abs_tol, q.rel_tol, q.max_subdivisions)
    return -complex(res.value)


# ----------------------------------------------------------------------------
# finite sections


@dataclass(frozen=True, eq=False)
class FiniteSectionMatrix:
    """``N x N`` section of ``T_g`` in the ``e~`` basis (``matrix[k-1, j-1] = M[k, j]``)."""

    matrix: sp.csr_matrix
    symbol: dz.Series
    measure: AdmissibleMeasure
    N: int
    weights: np.ndarray

    def coordinates(self, f: dz.Series) -> np.ndarray:
        """``e~``-coordinates ``a_n sqrt(w_n)`` of ``f`` truncated to ``N``."""
        c = f.to_dense().truncate(self.N).coefficients
        return c * np.sqrt(self.weights)

    def apply(self, f: dz.Series) -> np.ndarray:
        return self.matrix @ self.coordinates(f)

    def coo_rows(self):
        """``(k, j, value)`` triples sorted by column then row, 1-based."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.row, coo.col))
        return coo.row[order] + 1, coo.col[order] + 1, coo.data[order]


def finite_section_matrix(g: dz.Series, mu: AdmissibleMeasure, N: int,
                          q: QuadratureConfig = DEFAULT_QUADRATURE) -> FiniteSectionMatrix:
    if N < 1:
        raise ValueError("N must be >= 1")
    w = measures.weight_table(mu, N, q)
    sw = np.sqrt(w)
    logs = np.log(np.arange(1, N + 1, dtype=float))
    n_idx, b = g.terms()
    rows, cols, vals = [], [], []
    for n, bn in zip(n_idx.tolist(), b.tolist()):
        if n < 2 or n > N:
            continue
        j = np.arange(1, N // n + 1)
        k = j * n
        rows.append(k - 1)
        cols.append(j - 1)
        vals.append(bn * (math.log(n) / logs[k - 1]) * sw[k - 1] / sw[j - 1])
    dtype = complex if np.iscomplexobj(b) and np.any(np.imag(b) != 0) else float
    if rows:
        r, c = np.concatenate(rows), np.concatenate(cols)
        v = np.concatenate(vals)
        v = v.real if dtype is float else v
    else:
        r = c = np.zeros(0, dtype=np.int64)
        v = np.zeros(0, dtype=dtype)
    M = sp.csr_matrix((v.astype(dtype), (r, c)), shape=(N, N))
    return FiniteSectionMatrix(M, g, mu, N, w)


@dataclass(frozen=True)
class NormEstimate:
    value: float
    converged: bool
    iterations: int


def _start_vector(n: int) -> np.ndarray:
    # all ones plus a fixed aperiodic perturbation so no singular vector is missed by symmetry
    return 1.0 + 0.1 * np.sin(np.sqrt(2.0) * np.arange(1, n + 1))


def power_iteration(A, iters: int = 5000, tol: float = 1e-12) -> NormEstimate:
    """Largest singular value of ``A`` by power iteration on ``A^H A``."""
    n = A.shape[1]
    if n == 0 or (sp.issparse(A) and A.nnz == 0) or (not sp.issparse(A) and not np.any(A)):
        return NormEstimate(0.0, True, 0)
    x = _start_vector(n) / np.linalg.norm(_start_vector(n))
    prev = -1.0
    for it in range(1, iters + 1):
        y = A @ x
        val = float(np.linalg.norm(y))  # ||A x|| with ||x|| = 1: a lower bound that increases
        if val == 0.0:
            return NormEstimate(0.0, True, it)
        z = A.conj().T @ y
        nz = np.linalg.norm(z)
        x = z / nz
        if abs(val - prev) <= tol * max(val, 1.0):
            return NormEstimate(val, True, it)
        prev = val
    return NormEstimate(val, False, iters)


def operator_norm_estimate(M: FiniteSectionMatrix, iters: int = 5000, tol: float = 1e-12) -> NormEstimate:
    """``||M||_2`` by power iteration; the flag reports whether ``tol`` was reached."""
    return power_iteration(M.matrix, iters, tol)


def singular_values(M: FiniteSectionMatrix | sp.spmatrix | np.ndarray, k: int | None = None) -> np.ndarray:
    """Top ``k`` singular values in descending order."""
    A = M.matrix if isinstance(M, FiniteSectionMatrix) else M
    n = min(A.shape)
    k = n if k is None else k
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}]")
    if n <= DENSE_SVD_LIMIT or k >= n - 1:
        dense = A.toarray() if sp.issparse(A) else np.asarray(A)
        return np.linalg.svd(dense, compute_uv=False)[:k]
    if A.nnz == 0:
        return np.zeros(k)
    vals = svds(A, k=k, v0=_start_vector(n), return_singular_vectors=False)
    return np.sort(vals)[::-1]


def spectral_norm(A) -> float:
    """Largest singular value; Lanczos (ARPACK) for large sparse input, dense SVD otherwise."""
    if min(A.shape) == 0:
        return 0.0
    if sp.issparse(A):
        if A.nnz == 0:
            return 0.0
        if min(A.shape) > 64:
            v = svds(A, k=1, v0=_start_vector(min(A.shape)), tol=0, return_singular_vectors=False)
            return float(v[0])
    return float(singular_values(A, 1)[0])


# ----------------------------------------------------------------------------
# Schatten-class lower bounds


@dataclass(frozen=True)
class SchattenProfile:
    n: np.ndarray
    terms: np.ndarray  # ||T_g e~_n||^p
    lower_bounds: np.ndarray  # ((log n0)^2 |b_n0|^2 w_n0 / (4 (log n)^2))^{p/2}
    partial_sums: np.ndarray
    n0: int
    p: float


def column_norms_sq(g: dz.Series, mu: AdmissibleMeasure, ns: np.ndarray,
                    q: QuadratureConfig = DEFAULT_QUADRATURE) -> np.ndarray:
    """``||T_g e~_n||^2 = sum_m (log m/(log n + log m))^2 |b_m|^2 w_{nm}/w_n`` (untruncated in m)."""
    m_idx, b = g.terms()
    keep = m_idx >= 2
    m_idx, b = m_idx[keep], b[keep]
    ns = np.asarray(ns, dtype=np.int64)
    top = int(ns.max()) * int(m_idx.max()) if m_idx.size else 1
    if top <= 1 << 22:
        table = measures.weight_table(mu, top, q)
        wfun = lambda idx: table[idx - 1]  # noqa: E731
    else:
        wfun = lambda idx: measures.weights_at(mu, idx, q)  # noqa: E731
    w_n = wfun(ns)
    ln = np.log(ns.astype(float))
    out = np.zeros(ns.size)
    for m, bm in zip(m_idx.tolist(), b.tolist()):
        lm = math.log(m)
        out += (lm / (ln + lm)) ** 2 * abs(bm) ** 2 * wfun(ns * m) / w_n
    return out


def leading_index(g: dz.Series) -> tuple[int, complex]:
    n, b = g.terms()
    keep = n >= 2
    if not keep.any():
        raise DegenerateSymbolError("constant symbol: T_g = 0 and n0 is undefined")
    return int(n[keep][0]), complex(b[keep][0])


def schatten_partial_sum(g: dz.Series, mu: AdmissibleMeasure, p: float, N: int,
                         q: QuadratureConfig = DEFAULT_QUADRATURE) -> SchattenProfile:
    """Cumulative ``sum_{n0<=n<=N} ||T_g e~_n||^p`` with the termwise lower bound."""
    if p < 2:
        raise ValueError("the column-norm lower bound is used for p >= 2")
    n0, b0 = leading_index(g)
    if N < n0:
        raise ValueError(f"N = {N} is below the leading index n0 = {n0}")
    ns = np.arange(n0, N + 1)
    sq = column_norms_sq(g, mu, ns, q)
    w0 = measures.weights_at(mu, np.array([n0]), q)[0]
    lower_sq = math.log(n0) ** 2 * abs(b0) ** 2 * w0 / (4.0 * np.log(ns.astype(float)) ** 2)
    terms = sq ** (p / 2.0)
    return SchattenProfile(ns, terms, lower_sq ** (p / 2.0), np.cumsum(terms), n0, float(p))


# ----------------------------------------------------------------------------
# compactness


def compactness_profile(M: FiniteSectionMatrix, cut_points) -> list[tuple[int, float]]:
    """Spectral norm of ``M`` restricted to columns ``j > n_cut`` for each cut."""
    A = M.matrix.tocsc()
    out = []
    for c in cut_points:
        c = int(c)
        if not 0 <= c <= M.N:
            raise ValueError(f"cut {c} outside [0, {M.N}]")
        sub = A[:, c:]
        out.append((c, 0.0 if sub.nnz == 0 else spectral_norm(sub)))
    return out


# ----------------------------------------------------------------------------
# Littlewood-Paley / Carleson quantity at p = 2


T_CUTOFF = 100.0


@dataclass(frozen=True)
class CarlesonReport:
    estimate: float
    std_error: float
    exact_lp_value: float  # ||T_g f||^2 - |(T_g f)(+inf)|^2, from coefficients
    ratio: float
    d: int
    n_samples: int
    seed: int
    t_cutoff: float
    t_tail_mass: float  # Cauchy mass outside [-t_cutoff, t_cutoff]; eta is renormalised on the rest
    sigma_max: float

    def to_record(self) -> dict:
        return {"quantity": "Carleson quantity p=2", "value": self.estimate, "std_error": self.std_error,
                "exact_lp_value": self.exact_lp_value, "ratio": self.ratio, "d": self.d,
                "n_samples": self.n_samples, "seed": self.seed, "t_cutoff": self.t_cutoff,
                "t_tail_mass": self.t_tail_mass, "sigma_max": self.sigma_max}


def _sigma_rule(mu: AdmissibleMeasure, sigma_max: float, q: QuadratureConfig):
    edges = np.concatenate([[0.0], np.geomspace(2.0**-10, sigma_max, 24)])
    x, w = composite_rule(edges)
    beta = np.array([measures.beta_mu(mu, float(s), q) for s in x])
    return x, w * beta


def carleson_quantity_p2(f: dz.Series, g: dz.Series, mu: AdmissibleMeasure, d: int,
                         n_samples: int = 4000, seed: int = 0,
                         q: QuadratureConfig = DEFAULT_QUADRATURE, n_t: int = 16,
                         batch: int = 256) -> CarlesonReport:
    """``int_T^d int_R int_0^inf |f_chi|^2 |g'_chi|^2 beta_mu(sigma) dsigma deta(t) dm(chi)``.

    ``chi`` is sampled uniformly on ``T^d``; ``t`` uses Gauss-Legendre in
    ``theta = arctan t`` on ``|t| <= 100`` (Cauchy ``eta`` renormalised there);
    ``sigma`` uses a composite Gauss-Legendre rule on ``[0, sigma_max]``.
    """
    F = dz.bohr_lift(f, d)
    dg = dz.derivative(g)
    G = dz.bohr_lift(dg, d)
    alpha_f = np.array(list(F.terms().keys()), dtype=float).reshape(-1, d)
    alpha_g = np.array(list(G.terms().keys()), dtype=float).reshape(-1, d)
    # align term order with the Bohr exponent order
    af = np.array(list(F.terms().values()))
    bg = np.array(list(G.terms().values()))
    logp = np.log(sieve.first_primes(d).astype(float))
    lnf, lng = alpha_f @ logp, alpha_g @ logp

    # Littlewood-Paley side from coefficients; (T_g f)_1 = 0
    kc, cc = volterra_apply(g, f, int(f.N) * int(g.N)).terms()
    exact = float(np.sum(np.abs(cc) ** 2 * measures.weights_at(mu, kc, q)))

    # integrand ~ (mn)^{-2 sigma} with mn >= 2: cut where 4^{-sigma} * bound < abs_tol
    scale = float(np.sum(np.abs(af)) ** 2 * np.sum(np.abs(bg)) ** 2) if bg.size else 0.0
    sigma_max = max(4.0, math.log(max(scale, 1.0) * 1e4 / q.abs_tol) / (2.0 * math.log(2.0)))
    sx, sw = _sigma_rule(mu, sigma_max, q)

    th_max = math.atan(T_CUTOFF)
    xg, wg = np.polynomial.legendre.leggauss(n_t)
    theta = th_max * xg
    wt = wg / wg.sum()  # eta restricted to |t| <= 100 and renormalised
    tt = np.tan(theta)

    rng = np.random.default_rng(seed)
    if bg.size == 0:
        return CarlesonReport(0.0, 0.0, exact, math.nan, d, n_samples, seed, T_CUTOFF,
                              1.0 - 2.0 * th_max / math.pi, sigma_max)
    # sigma decay factors per term: (n_sigma, terms)
    decay_f = np.exp(-np.outer(sx, lnf)) * af[None, :]
    decay_g = np.exp(-np.outer(sx, lng)) * bg[None, :]
    samples = np.empty(n_samples)
    for i in range(0, n_samples, batch):
        m = min(batch, n_samples - i)
        ang = rng.uniform(0.0, 2.0 * np.pi, size=(m, d))
        # phases chi(n) n^{-it} for every (sample, t node, term)
        ph_f = np.exp(1j * ((ang @ alpha_f.T)[:, None, :] - tt[None, :, None] * lnf[None, None, :]))
        ph_g = np.exp(1j * ((ang @ alpha_g.T)[:, None, :] - tt[None, :, None] * lng[None, None, :]))
        Fv = ph_f.reshape(-1, lnf.size) @ decay_f.T  # (m * n_t, n_sigma)
        Gv = ph_g.reshape(-1, lng.size) @ decay_g.T
        vals = (np.abs(Fv) ** 2 * np.abs(Gv) ** 2) @ sw  # sigma integral
        samples[i : i + m] = vals.reshape(m, n_t) @ wt  # t integral
    est = float(samples.mean())
    se = float(samples.std(ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else math.inf
    ratio = est / exact if exact > 0 else math.nan
    return CarlesonReport(est, se, exact, ratio, d, int(n_samples), int(seed), T_CUTOFF,
                          1.0 - 2.0 * th_max / math.pi, sigma_max)
