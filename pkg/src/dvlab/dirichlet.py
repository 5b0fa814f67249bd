"""Truncated Dirichlet series, characters and the Bohr lift.

A series ``sum_{n<=N} a_n n^{-s}`` is stored densely (``coefficients[n-1] = a_n``)
by :class:`DirichletSeries`, or as index/value pairs by :class:`SparseDirichletSeries`
when almost all coefficients vanish (lacunary symbols supported up to 2^32).
Operations that only touch the nonzero terms accept either form.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import sieve

SPARSE_DENSITY = 0.01


class SmoothnessError(ValueError):
    """A coefficient sits at an index that does not factor over the chosen primes."""

    def __init__(self, offending):
        self.offending = [int(n) for n in offending]
        shown = ", ".join(map(str, self.offending[:10]))
        more = "" if len(self.offending) <= 10 else f" (+{len(self.offending) - 10} more)"
        super().__init__(f"indices not smooth over the chosen primes: {shown}{more}")


class CharacterLengthError(ValueError):
    """The character is not specified on enough primes for the series."""


@dataclass(frozen=True, eq=False)
class DirichletSeries:
    """Dense truncated Dirichlet series; ``coefficients[n-1]`` multiplies ``n^{-s}``."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex).ravel()
        if c.size < 1:
            raise ValueError("a Dirichlet series needs N >= 1")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def N(self) -> int:
        return self.coefficients.size

    def __getitem__(self, n: int) -> complex:
        return complex(self.coefficients[n - 1]) if 1 <= n <= self.N else 0j

    def terms(self) -> tuple[np.ndarray, np.ndarray]:
        nz = np.flatnonzero(self.coefficients)
        return nz + 1, self.coefficients[nz]

    def truncate(self, N: int) -> "DirichletSeries":
        c = np.zeros(N, dtype=complex)
        m = min(N, self.N)
        c[:m] = self.coefficients[:m]
        return DirichletSeries(c)

    def to_dense(self) -> "DirichletSeries":
        return self

    def __add__(self, other):
        N = max(self.N, other.N)
        return DirichletSeries(self.truncate(N).coefficients + other.to_dense().truncate(N).coefficients)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rmul__(self, scalar):
        return DirichletSeries(scalar * self.coefficients)

    def __eq__(self, other):
        if not isinstance(other, (DirichletSeries, SparseDirichletSeries)):
            return NotImplemented
        o = other.to_dense()
        return self.N == o.N and np.array_equal(self.coefficients, o.coefficients)

    def __repr__(self):
        n, a = self.terms()
        return f"DirichletSeries(N={self.N}, nonzero={n.size})"


@dataclass(frozen=True, eq=False)
class SparseDirichletSeries:
    """Sparse truncated Dirichlet series given by sorted indices and values."""

    indices: np.ndarray
    values: np.ndarray
    N: int = field(default=0)

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).ravel()
        val = np.asarray(self.values, dtype=complex).ravel()
        if idx.size != val.size:
            raise ValueError("indices and values must have equal length")
        order = np.argsort(idx)
        idx, val = idx[order], val[order]
        if idx.size and (idx[0] < 1 or np.any(np.diff(idx) == 0)):
            raise ValueError("indices must be distinct and >= 1")
        N = int(self.N) if self.N else (int(idx[-1]) if idx.size else 1)
        keep = (idx <= N) & (val != 0)
        idx, val = idx[keep], val[keep]
        idx.setflags(write=False)
        val.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)
        object.__setattr__(self, "N", N)

    def __getitem__(self, n: int) -> complex:
        pos = np.searchsorted(self.indices, n)
        if pos < self.indices.size and self.indices[pos] == n:
            return complex(self.values[pos])
        return 0j

    def terms(self) -> tuple[np.ndarray, np.ndarray]:
        return self.indices, self.values

    def to_dense(self) -> DirichletSeries:
        if self.N > 50_000_000:
            raise MemoryError(f"refusing to densify a series with N={self.N}")
        c = np.zeros(self.N, dtype=complex)
        c[self.indices - 1] = self.values
        return DirichletSeries(c)

    def __eq__(self, other):
        if isinstance(other, SparseDirichletSeries):
            return (self.N == other.N and np.array_equal(self.indices, other.indices)
                    and np.array_equal(self.values, other.values))
        if isinstance(other, DirichletSeries):
            return self.to_dense() == other
        return NotImplemented

    def __repr__(self):
        return f"SparseDirichletSeries(N={self.N}, nonzero={self.indices.size})"


Series = Union[DirichletSeries, SparseDirichletSeries]


def from_terms(terms: dict, N: int | None = None) -> Series:
    """Build a series from ``{n: a_n}``; sparse storage when fewer than 1% of slots are used."""
    idx = np.array(sorted(terms), dtype=np.int64)
    val = np.array([terms[int(k)] for k in idx], dtype=complex)
    N = int(N) if N else (int(idx[-1]) if idx.size else 1)
    if idx.size < SPARSE_DENSITY * N:
        return SparseDirichletSeries(idx, val, N)
    c = np.zeros(N, dtype=complex)
    keep = idx <= N
    c[idx[keep] - 1] = val[keep]
    return DirichletSeries(c)


def monomial(n: int, N: int | None = None, coefficient: complex = 1.0) -> DirichletSeries:
    """``coefficient * n^{-s}`` (the basis vector ``e_n``), truncated at ``N >= n``."""
    N = n if N is None else N
    c = np.zeros(N, dtype=complex)
    c[n - 1] = coefficient
    return DirichletSeries(c)


def constant(value: complex = 1.0, N: int = 1) -> DirichletSeries:
    return monomial(1, N, value)


def zeta_truncation(N: int) -> DirichletSeries:
    return DirichletSeries(np.ones(N))


def _rebuild(f: Series, values: np.ndarray) -> Series:
    if isinstance(f, SparseDirichletSeries):
        return SparseDirichletSeries(f.indices, values, f.N)
    return DirichletSeries(values)


def _all_values(f: Series) -> tuple[np.ndarray, np.ndarray]:
    """Indices and values covering every stored slot (dense: all n <= N)."""
    if isinstance(f, SparseDirichletSeries):
        return f.indices, f.values
    return np.arange(1, f.N + 1), f.coefficients


# ----------------------------------------------------------------------------
# coefficient algebra


def multiply(f: Series, g: Series, N_out: int) -> DirichletSeries:
    """Dirichlet convolution ``c_k = sum_{mn=k} a_m b_n`` for ``k <= N_out``."""
    if N_out < 1:
        raise ValueError("N_out must be >= 1")
    out = np.zeros(N_out, dtype=complex)
    fm, fa = f.terms()
    gn, gb = g.terms()
    if fm.size > gn.size:  # loop over the sparser factor
        fm, fa, gn, gb = gn, gb, fm, fa
    gdense = np.zeros(N_out, dtype=complex)
    keep = gn <= N_out
    gdense[gn[keep] - 1] = gb[keep]
    for m, a in zip(fm.tolist(), fa.tolist()):
        if m > N_out:
            break
        L = N_out // m
        out[m - 1 :: m][:L] += a * gdense[:L]
    return DirichletSeries(out)


def translate(f: Series, sigma: float) -> Series:
    """``f_sigma(s) = f(s + sigma)``: coefficient ``a_n n^{-sigma}``."""
    if sigma < 0:
        raise ValueError("translation requires sigma >= 0")
    n, a = _all_values(f)
    return _rebuild(f, a * np.exp(-sigma * np.log(n.astype(float))))


def derivative(f: Series) -> Series:
    """Coefficients ``-a_n log n``."""
    n, a = _all_values(f)
    return _rebuild(f, -a * np.log(n.astype(float)))


@dataclass(frozen=True)
class Evaluation:
    value: complex
    tail_bound: float


def tail_bound(f: Series, sigma: float, C: float | None = None, delta: float = 0.0) -> float:
    """Bound on ``sum_{n>N} |a_n| n^{-sigma}`` assuming ``|a_n| <= C n^delta``."""
    n, a = f.terms()
    if C is None:
        C = float(np.max(np.abs(a))) if a.size else 0.0
    e = sigma - delta
    if C == 0:
        return 0.0
    if e <= 1:
        return math.inf
    N = f.N
    # sum_{n>N} n^{-e} <= N^{1-e}/(e-1)
    return C * N ** (1.0 - e) / (e - 1.0)


def evaluate(f: Series, s: complex, C: float | None = None, delta: float = 0.0,
             chunk: int = 1 << 20) -> Evaluation:
    """Partial sum ``sum_{n<=N} a_n n^{-s}`` and a bound on the discarded tail."""
    s = complex(s)
    n, a = f.terms()
    total = 0j
    for i in range(0, n.size, chunk):
        ln = np.log(n[i : i + chunk].astype(float))
        total += complex(np.sum(a[i : i + chunk] * np.exp(-s * ln)))
    return Evaluation(total, tail_bound(f, s.real, C, delta))


def evaluate_many(f: Series, s, chunk: int = 1 << 16) -> np.ndarray:
    """Vectorised partial sums at an array of points ``s`` (no tail bound)."""
    s = np.asarray(s, dtype=complex)
    flat = s.ravel()
    n, a = f.terms()
    out = np.zeros(flat.size, dtype=complex)
    if n.size == 0:
        return out.reshape(s.shape)
    ln = np.log(n.astype(float))
    step = max(1, chunk // max(1, flat.size))
    for i in range(0, n.size, step):
        out += np.exp(-np.outer(flat, ln[i : i + step])) @ a[i : i + step]
    return out.reshape(s.shape)


# ----------------------------------------------------------------------------
# characters


@dataclass(frozen=True, eq=False)
class Character:
    """Completely multiplicative unimodular function fixed by its values on ``p_1..p_P``."""

    prime_values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.prime_values, dtype=complex).ravel()
        if not np.allclose(np.abs(v), 1.0, atol=1e-12):
            raise ValueError("character values must have modulus 1")
        v.setflags(write=False)
        object.__setattr__(self, "prime_values", v)

    @property
    def P(self) -> int:
        return self.prime_values.size

    @classmethod
    def trivial(cls, P: int) -> "Character":
        return cls(np.ones(P))

    @classmethod
    def from_angles(cls, angles) -> "Character":
        return cls(np.exp(1j * np.asarray(angles, dtype=float)))

    @classmethod
    def random(cls, P: int, rng: np.random.Generator) -> "Character":
        return cls.from_angles(rng.uniform(0.0, 2.0 * np.pi, P))

    def __call__(self, n) -> np.ndarray:
        """``chi(n)`` for integer ``n`` (array); raises if ``n`` needs more primes."""
        n = np.atleast_1d(np.asarray(n, dtype=np.int64))
        primes = sieve.first_primes(self.P)
        exps, rest = sieve.exponent_vectors(n, primes)
        if np.any(rest != 1):
            bad = n[rest != 1]
            raise CharacterLengthError(
                f"character known on {self.P} primes but n={int(bad[0])} needs more")
        # integer powers keep real characters (values +-1) exact
        return np.prod(self.prime_values[None, :] ** exps, axis=1)


def twist(f: Series, chi: Character) -> Series:
    """``f_chi``: coefficient ``a_n chi(n)``."""
    n, a = _all_values(f)
    nz = a != 0
    vals = np.zeros_like(a)
    if nz.any():
        vals[nz] = a[nz] * chi(n[nz])
    return _rebuild(f, vals)


# ----------------------------------------------------------------------------
# Bohr lift


@dataclass(frozen=True, eq=False)
class PolydiscPolynomial:
    """Polynomial on the polydisc ``D^d``; ``coeffs[alpha]`` multiplies ``z^alpha``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim < 1:
            c = c.reshape(1)
        object.__setattr__(self, "coeffs", c)

    @property
    def d(self) -> int:
        return self.coeffs.ndim

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(s - 1 for s in self.coeffs.shape)

    def terms(self) -> dict[tuple[int, ...], complex]:
        return {tuple(int(i) for i in idx): complex(self.coeffs[idx]) for idx in zip(*np.nonzero(self.coeffs))}

    @classmethod
    def from_terms(cls, terms: dict, d: int) -> "PolydiscPolynomial":
        if not terms:
            return cls(np.zeros((1,) * d))
        shape = tuple(max(k[j] for k in terms) + 1 for j in range(d))
        c = np.zeros(shape, dtype=complex)
        for k, v in terms.items():
            c[tuple(k)] += v
        return cls(c)

    def __call__(self, z) -> np.ndarray:
        """Evaluate at points ``z`` of shape ``(..., d)``."""
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.d:
            raise ValueError(f"points must have last dimension {self.d}")
        pts = z.reshape(-1, self.d)
        # contract the last coefficient axis per point, then the next one, ...
        out = np.broadcast_to(self.coeffs, (pts.shape[0],) + self.coeffs.shape)
        for j in reversed(range(self.d)):
            V = pts[:, j : j + 1] ** np.arange(self.coeffs.shape[j])[None, :]
            out = np.einsum("p...k,pk->p...", out, V)
        return out.reshape(z.shape[:-1])

    def __eq__(self, other):
        if not isinstance(other, PolydiscPolynomial):
            return NotImplemented
        return self.terms() == other.terms()


def bohr_lift(f: Series, d: int) -> PolydiscPolynomial:
    """Identify ``n = prod p_j^{alpha_j}`` with ``z^alpha`` over the first ``d`` primes."""
    n, a = f.terms()
    primes = sieve.first_primes(d)
    exps, rest = sieve.exponent_vectors(n, primes)
    if np.any(rest != 1):
        raise SmoothnessError(n[rest != 1])
    if n.size == 0:
        return PolydiscPolynomial(np.zeros((1,) * d))
    shape = tuple(int(exps[:, j].max()) + 1 for j in range(d))
    c = np.zeros(shape, dtype=complex)
    c[tuple(exps.T)] = a
    return PolydiscPolynomial(c)


def inverse_bohr_lift(F: PolydiscPolynomial, N: int | None = None) -> Series:
    """Dirichlet series with ``a_n = coeffs[alpha]`` for ``n = prod p_j^{alpha_j}``."""
    primes = sieve.first_primes(F.d)
    idx = np.nonzero(F.coeffs)
    terms: dict[int, complex] = {}
    for alpha in zip(*idx):
        n = 1
        for p, e in zip(primes.tolist(), alpha):
            n *= p ** int(e)
        terms[n] = complex(F.coeffs[alpha])
    if N is None:
        N = max(terms) if terms else 1
    return from_terms({k: v for k, v in terms.items() if k <= N}, N)


# ----------------------------------------------------------------------------
# CSV I/O (floats written with repr, which round-trips exactly)


def write_series_csv(path, f: Series) -> None:
    n, a = f.terms()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "re", "im"])
        w.writerow(["#N", f.N, ""])
        for k, v in zip(n.tolist(), a.tolist()):
            w.writerow([k, repr(v.real), repr(v.imag)])


def read_series_csv(path) -> Series:
    terms, N = {}, None
    with open(path, newline="") as fh:
        rows = csv.reader(fh)
        if next(rows) != ["n", "re", "im"]:
            raise ValueError(f"{path}: expected header n,re,im")
        for row in rows:
            if row[0] == "#N":
                N = int(row[1])
                continue
            terms[int(row[0])] = complex(float(row[1]), float(row[2]))
    return from_terms(terms, N)


def write_polynomial_csv(path, F: PolydiscPolynomial) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"alpha_{j + 1}" for j in range(F.d)] + ["re", "im"])
        for alpha, v in sorted(F.terms().items()):
            w.writerow(list(alpha) + [repr(v.real), repr(v.imag)])


def read_polynomial_csv(path) -> PolydiscPolynomial:
    with open(path, newline="") as fh:
        rows = csv.reader(fh)
        header = next(rows)
        d = len(header) - 2
        terms = {tuple(int(x) for x in row[:d]): complex(float(row[d]), float(row[d + 1])) for row in rows}
    return PolydiscPolynomial.from_terms(terms, d)
