"""Bergman and Bloch spaces of the polydisc, Moebius automorphisms and radicality.

Automorphisms are written ``Phi_j(z) = eps_j * (a_j - z_{pi(j)}) / (1 - conj(a_j) z_{pi(j)})``;
with ``eps = 1`` and ``pi = id`` this is the involution ``phi_a`` with ``phi_a(0) = a``.

The composed norm ``||F o Phi||_{A^2(D^d)}`` is computed without truncation: since
``F o Phi = sum_alpha c_alpha prod_j phi_j(z_{pi(j)})^{alpha_j}`` and the measure is a
product, ``||F o Phi||^2 = sum_{alpha,beta} c_alpha conj(c_beta) prod_j Gamma_j[alpha_j, beta_j]``
with the one-variable Gram matrices ``Gamma[k, l] = <phi^k, phi^l>_{A^2(D)}``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal
from scipy.stats import qmc

from .dirichlet import PolydiscPolynomial


class TruncationError(ValueError):
    """The requested degree cap cannot hold the exact result."""


@dataclass(frozen=True, eq=False)
class MobiusTuple:
    center: np.ndarray
    signs: np.ndarray
    permutation: tuple[int, ...]

    def __post_init__(self):
        a = np.asarray(self.center, dtype=complex).ravel()
        e = np.asarray(self.signs, dtype=complex).ravel()
        p = tuple(int(i) for i in self.permutation)
        if not (a.size == e.size == len(p)):
            raise ValueError("center, signs and permutation must have the same length")
        if np.any(np.abs(a) >= 1):
            raise ValueError("centers must lie in the open unit disc")
        if not np.allclose(np.abs(e), 1.0, atol=1e-12):
            raise ValueError("signs must be unimodular")
        if sorted(p) != list(range(len(p))):
            raise ValueError("permutation must be a bijection of {0..d-1}")
        object.__setattr__(self, "center", a)
        object.__setattr__(self, "signs", e)
        object.__setattr__(self, "permutation", p)

    @property
    def d(self) -> int:
        return self.center.size

    @classmethod
    def at(cls, center) -> "MobiusTuple":
        """``Phi_a`` with unit signs and identity permutation."""
        a = np.asarray(center, dtype=complex).ravel()
        return cls(a, np.ones(a.size), tuple(range(a.size)))

    @classmethod
    def identity(cls, d: int) -> "MobiusTuple":
        """``z -> z`` (``a = 0`` with signs ``-1`` undo the reflection ``a - z``)."""
        return cls(np.zeros(d), -np.ones(d), tuple(range(d)))

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        zp = z[..., list(self.permutation)]
        a, e = self.center, self.signs
        return e * (a - zp) / (1.0 - np.conj(a) * zp)

    def at_origin(self) -> np.ndarray:
        return self.signs * self.center

    def to_dict(self) -> dict:
        return {"center": [[c.real, c.imag] for c in self.center.tolist()],
                "signs": [[s.real, s.imag] for s in self.signs.tolist()],
                "permutation": list(self.permutation)}


def sample_centers(d: int, count: int, seed: int = 0, radius: float = 0.95,
                   random_signs: bool = True, random_permutations: bool = True) -> list[MobiusTuple]:
    """Scrambled Halton points in ``{|a_j| <= radius}`` with random signs and permutations."""
    if not 0 <= radius < 1:
        raise ValueError("radius must lie in [0, 1)")
    pts = qmc.Halton(d=2 * d, scramble=True, seed=seed).random(count)
    rng = np.random.default_rng(seed)
    out = []
    for row in pts:
        # area-uniform in the disc of the given radius
        a = radius * np.sqrt(row[:d]) * np.exp(2j * np.pi * row[d:])
        e = np.exp(2j * np.pi * rng.uniform(size=d)) if random_signs else np.ones(d)
        p = tuple(rng.permutation(d).tolist()) if random_permutations else tuple(range(d))
        out.append(MobiusTuple(a, e, p))
    return out


# ----------------------------------------------------------------------------
# Bergman norm and polynomial algebra


def _inverse_weights(shape) -> np.ndarray:
    w = np.ones(shape)
    for j, n in enumerate(shape):
        sh = [1] * len(shape)
        sh[j] = n
        w = w / np.arange(1, n + 1).reshape(sh)
    return w


def bergman_norm_sq(F: PolydiscPolynomial) -> float:
    c = F.coeffs
    return float(np.sum(np.abs(c) ** 2 * _inverse_weights(c.shape)))


def bergman_norm_polydisc(F: PolydiscPolynomial) -> float:
    """``sqrt(sum |c_alpha|^2 prod 1/(alpha_j + 1))``, normalised area measure per factor."""
    return math.sqrt(bergman_norm_sq(F))


def bergman_norm_mc(F: PolydiscPolynomial, n_samples: int = 100_000, seed: int = 0) -> tuple[float, float]:
    """Monte-Carlo estimate of ``||F||_{A^2}`` and its standard error."""
    rng = np.random.default_rng(seed)
    d = F.d
    z = np.sqrt(rng.uniform(size=(n_samples, d))) * np.exp(2j * np.pi * rng.uniform(size=(n_samples, d)))
    v = np.abs(F(z)) ** 2
    m = float(v.mean())
    se = float(v.std(ddof=1) / math.sqrt(n_samples))
    est = math.sqrt(m)
    return est, se / (2 * est) if est > 0 else 0.0


def poly_multiply(F: PolydiscPolynomial, G: PolydiscPolynomial) -> PolydiscPolynomial:
    return PolydiscPolynomial(signal.convolve(F.coeffs, G.coeffs, method="direct"))


def poly_power(F: PolydiscPolynomial, k: int) -> PolydiscPolynomial:
    if k < 0:
        raise ValueError("k must be >= 0")
    out = PolydiscPolynomial(np.ones((1,) * F.d))
    for _ in range(k):
        out = poly_multiply(out, F)
    return out


def value_at_origin(F: PolydiscPolynomial) -> complex:
    return complex(F.coeffs[(0,) * F.d])


def partial_derivative(F: PolydiscPolynomial, j: int) -> PolydiscPolynomial:
    c = np.moveaxis(F.coeffs, j, -1)
    k = np.arange(c.shape[-1])
    dc = (c * k)[..., 1:] if c.shape[-1] > 1 else np.zeros(c.shape[:-1] + (1,))
    return PolydiscPolynomial(np.moveaxis(dc, -1, j))


def random_polynomial(d: int, degree: int, rng: np.random.Generator, n_terms: int | None = None) -> PolydiscPolynomial:
    """Complex Gaussian coefficients on a random subset of ``{0..degree}^d``."""
    shape = (degree + 1,) * d
    c = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    if n_terms is not None and n_terms < c.size:
        mask = np.zeros(c.size, dtype=bool)
        mask[rng.choice(c.size, n_terms, replace=False)] = True
        c = np.where(mask.reshape(shape), c, 0)
    return PolydiscPolynomial(c)


# ----------------------------------------------------------------------------
# one-variable Gram matrices of Moebius powers


def mobius_gram(a: complex, eps: complex, K: int, rtol: float = 1e-17) -> np.ndarray:
    """``Gamma[k, l] = (1/pi) int_D phi^k conj(phi^l) dA`` for ``k, l <= K``.

    With ``w = phi(z)`` (an involution up to the sign) the Jacobian is
    ``(1-|a|^2)^2/|1 - conj(a) w|^4``; expanding both factors of ``1/(1-conj(a)w)^2``
    and using monomial orthogonality gives, for ``l >= k``,

        Gamma[k, l] = (1-r^2)^2 e^{i theta (k-l)} sum_{m >= l-k} (m+1)(m+k-l+1) r^{2m+k-l}/(k+m+1),

    ``a = r e^{i theta}``, times ``eps^k conj(eps)^l``.
    """
    G = _gram_unsigned(complex(a), int(K), float(rtol))
    kk = np.arange(K + 1)
    ph = complex(eps) ** kk
    return G * ph[:, None] * np.conj(ph)[None, :]


@functools.lru_cache(maxsize=4096)
def _gram_unsigned(a: complex, K: int, rtol: float) -> np.ndarray:
    r = abs(a)
    th = math.atan2(a.imag, a.real)
    kk = np.arange(K + 1)
    if r == 0.0:
        return np.diag(1.0 / (kk + 1)).astype(complex)
    M = int(math.ceil(math.log(rtol) / math.log(r * r))) + 2 * K + 50
    m = np.arange(M, dtype=float)
    G = np.zeros((K + 1, K + 1), dtype=complex)
    for gap in range(K + 1):
        mm = m[gap:]
        # terms r^{2m - gap} written as r^{2(m - gap)} r^{gap} to avoid overflow of r^{-gap}
        core = (mm + 1.0) * (mm - gap + 1.0) * r ** (2.0 * (mm - gap)) * r**gap
        k = kk[: K + 1 - gap]
        vals = (core[None, :] / (k[:, None] + mm[None, :] + 1.0)).sum(axis=1)
        G[k, k + gap] = vals * np.exp(-1j * th * gap)
    G *= (1.0 - r * r) ** 2
    G = np.triu(G) + np.conj(np.triu(G, 1)).T
    G.setflags(write=False)
    return G


def mobius_power_norm_sq(a: complex, k: int) -> float:
    """``||phi_a^k||^2 = 2(1-|a|^2)^2 int_0^1 r^{2k+1}(1+|a|^2 r^2)/(1-|a|^2 r^2)^3 dr`` (radial form)."""
    from scipy.integrate import quad

    s = abs(a) ** 2
    val, _ = quad(lambda r: r ** (2 * k + 1) * (1 + s * r * r) / (1 - s * r * r) ** 3, 0.0, 1.0,
                  epsabs=1e-15, epsrel=1e-13, limit=200)
    return 2.0 * (1.0 - s) ** 2 * val


def composed_norm_sq(F: PolydiscPolynomial, Phi: MobiusTuple) -> tuple[float, float]:
    """``||F o Phi||^2_{A^2(D^d)}`` exactly, with a roundoff error bar."""
    if Phi.d != F.d:
        raise ValueError("dimension mismatch")
    c = F.coeffs
    X = np.conj(c)
    A = np.abs(c)
    for j in range(F.d):
        G = mobius_gram(Phi.center[j], Phi.signs[j], c.shape[j] - 1)
        X = np.moveaxis(np.tensordot(G, X, axes=([1], [j])), 0, j)
        A = np.moveaxis(np.tensordot(np.abs(G), A, axes=([1], [j])), 0, j)
    val = float(np.real(np.sum(c * X)))
    err = 64 * np.finfo(float).eps * float(np.sum(np.abs(c) * A)) * max(1, c.size)
    return val, err


def centered_composition_norm(F: PolydiscPolynomial, Phi: MobiusTuple) -> tuple[float, float]:
    """``||F o Phi - F(Phi(0))||`` via Pythagoras, with a roundoff bound on the squared value."""
    sq, err = composed_norm_sq(F, Phi)
    f0 = complex(F(Phi.at_origin()))
    diff = sq - abs(f0) ** 2
    return math.sqrt(max(diff, 0.0)), err + 4 * np.finfo(float).eps * abs(f0) ** 2


# ----------------------------------------------------------------------------
# explicit (truncated) composition


def _mobius_power_series(a: complex, eps: complex, K: int, cap: int) -> np.ndarray:
    """Rows ``k = 0..K``: Taylor coefficients of ``phi^k`` up to degree ``cap``."""
    geo = np.conj(a) ** np.arange(cap + 1)
    phi = np.zeros(cap + 1, dtype=complex)
    phi += a * geo
    phi[1:] -= geo[:-1]
    phi *= eps
    P = np.zeros((K + 1, cap + 1), dtype=complex)
    P[0, 0] = 1.0
    for k in range(1, K + 1):
        P[k] = np.convolve(P[k - 1], phi)[: cap + 1]
    return P


def mobius_compose(F: PolydiscPolynomial, Phi: MobiusTuple, degree_cap: int) -> PolydiscPolynomial:
    """Taylor coefficients of ``F o Phi`` up to ``degree_cap`` in each variable."""
    if degree_cap < max(F.degrees):
        raise TruncationError(f"degree_cap {degree_cap} is below deg F = {max(F.degrees)}")
    d = F.d
    X = F.coeffs
    for j in range(d):
        P = _mobius_power_series(Phi.center[j], Phi.signs[j], X.shape[j] - 1, degree_cap)
        # axis j (power of phi_j) becomes the Taylor index of z_{pi(j)}
        X = np.moveaxis(np.tensordot(P, X, axes=([0], [j])), 0, j)
    # factor j now carries variable pi(j); reorder so that axis i is z_i
    inv = np.argsort(Phi.permutation)
    X = np.transpose(X, axes=[int(inv[i]) for i in range(d)])
    return PolydiscPolynomial(X)


def composition_tail_norm(F: PolydiscPolynomial, Phi: MobiusTuple, degree_cap: int) -> float:
    """``||F o Phi - trunc(F o Phi)||``, from orthogonality of monomials."""
    exact, err = composed_norm_sq(F, Phi)
    trunc = bergman_norm_sq(mobius_compose(F, Phi, degree_cap))
    return math.sqrt(max(exact - trunc, 0.0))


# ----------------------------------------------------------------------------
# Bloch seminorm on the polydisc


@dataclass(frozen=True)
class PolydiscGrid:
    n_radial: int = 64
    n_angle: int = 64
    n_torus: int = 24
    min_gap: float = 1e-4  # smallest 1 - r sampled

    @property
    def radii(self) -> np.ndarray:
        h = self.n_radial // 2
        inner = np.linspace(0.0, 0.9, self.n_radial - h, endpoint=False)
        outer = 1.0 - np.geomspace(0.1, self.min_gap, h)
        return np.concatenate([inner, outer])

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n_angle) / self.n_angle

    def to_dict(self) -> dict:
        return {"n_radial": self.n_radial, "n_angle": self.n_angle, "n_torus": self.n_torus,
                "min_gap": self.min_gap}


def _vandermonde(z: np.ndarray, n: int) -> np.ndarray:
    return z[:, None] ** np.arange(n)[None, :]


def polydisc_bloch_seminorm(F: PolydiscPolynomial, grid: PolydiscGrid = PolydiscGrid()) -> float:
    """Grid maximum of ``max_j |D_j F(z)| (1 - |z_j|^2)``.

    ``z_j`` runs over a polar grid of the disc; the other coordinates only over
    a torus grid, since for fixed ``z_j`` the modulus of ``D_j F`` is maximal on
    the distinguished boundary.
    """
    zr = (grid.radii[:, None] * np.exp(1j * grid.angles)[None, :]).ravel()
    wt = 1.0 - np.abs(zr) ** 2
    tor = np.exp(2j * np.pi * np.arange(grid.n_torus) / grid.n_torus)
    best = 0.0
    for j in range(F.d):
        X = partial_derivative(F, j).coeffs
        for i in range(F.d):
            pts = zr if i == j else tor
            V = _vandermonde(pts, X.shape[i])
            X = np.moveaxis(np.tensordot(V, X, axes=([1], [i])), 0, i)
        mags = np.abs(np.moveaxis(X, j, 0)).reshape(zr.size, -1).max(axis=1)
        best = max(best, float(np.max(mags * wt)))
    return best


# ----------------------------------------------------------------------------
# Garsia-type norm and radicality


def garsia_norm(F: PolydiscPolynomial, centers, degree_cap: int | None = None) -> float:
    """``max_a ||F o Phi_a - F(Phi_a(0))||_{A^2}`` over the given automorphisms.

    With ``degree_cap`` the truncated Taylor composition is used instead of the exact Gram route.
    """
    centers = list(centers)
    if not centers:
        raise ValueError("need at least one center")
    c0 = F.coeffs.ravel()
    if not np.any(c0[1:]):
        # constants compose to themselves, so every centered composition vanishes
        return 0.0
    best = 0.0
    for Phi in centers:
        if degree_cap is None:
            v, _ = centered_composition_norm(F, Phi)
        else:
            G = mobius_compose(F, Phi, degree_cap)
            G0 = complex(F(Phi.at_origin()))
            c = G.coeffs.copy()
            c[(0,) * F.d] -= G0
            v = bergman_norm_polydisc(PolydiscPolynomial(c))
        best = max(best, v)
    return best


@dataclass
class RadicalityReport:
    n: int
    m: int
    per_center: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"n": self.n, "m": self.m, "per_center": self.per_center, "violations": self.violations}


def radicality_check(F: PolydiscPolynomial, n: int, m: int, centers, degree_cap: int | None = None,
                     rtol: float = 1e-9) -> RadicalityReport:
    """Both sides of ``||F^m o Phi - F^m(Phi(0))||^{1/m} <= ||F^n o Phi - F^n(Phi(0))||^{1/n}``.

    Norms are exact (Gram route); a violation is recorded only when it survives
    the roundoff error bars of both sides plus the relative slack ``rtol``.
    """
    if not 1 <= m <= n:
        raise ValueError("need 1 <= m <= n")
    deg = max(F.degrees)
    if degree_cap is not None and degree_cap < n * deg:
        raise TruncationError(f"degree_cap {degree_cap} < n * deg F = {n * deg}")
    Fm, Fn = poly_power(F, m), poly_power(F, n)
    rep = RadicalityReport(n, m)
    for i, Phi in enumerate(centers):
        lm, em = centered_composition_norm(Fm, Phi)
        ln_, en = centered_composition_norm(Fn, Phi)
        lhs, rhs = lm ** (1.0 / m), ln_ ** (1.0 / n)
        lhs_lo = math.sqrt(max(lm * lm - em, 0.0)) ** (1.0 / m)
        rhs_hi = math.sqrt(ln_ * ln_ + en) ** (1.0 / n)
        entry = {"index": i, "center": Phi.to_dict(), "lhs": lhs, "rhs": rhs}
        rep.per_center.append(entry)
        if lhs_lo > rhs_hi * (1.0 + rtol):
            rep.violations.append(entry)
    return rep
