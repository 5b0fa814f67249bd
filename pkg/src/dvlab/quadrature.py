"""Adaptive composite Gauss-Legendre quadrature.

Panels carry a 15-point Gauss-Legendre rule. A panel's error is estimated by
comparing the single-panel value with the sum over its two halves; panels
above their share of the tolerance are bisected. Integrands may be vector
valued (shape ``(m, k)`` for ``m`` nodes), which lets a whole family of
integrals (all Bergman weights, say) share one adaptive refinement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

GL_ORDER = 15
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)


class QuadratureError(RuntimeError):
    """Adaptive refinement ran out of subdivisions."""

    def __init__(self, msg: str, n_panels: int, error: float, worst_panel: tuple[float, float]):
        super().__init__(f"{msg} (panels={n_panels}, error={error:.3e}, worst panel={worst_panel})")
        self.n_panels = n_panels
        self.error = error
        self.worst_panel = worst_panel


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 4000
    # improper integrals on (0, inf) are cut at upper_cutoff on the right and
    # at exp(-log_cutoff) on the left (after the substitution sigma = e^{-u})
    upper_cutoff: float = 40.0
    log_cutoff: float = 80.0

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("abs_tol and rel_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.upper_cutoff <= 1.0:
            raise ValueError("upper_cutoff must exceed 1")

    def to_dict(self) -> dict:
        return {
            "abs_tol": self.abs_tol,
            "rel_tol": self.rel_tol,
            "max_subdivisions": self.max_subdivisions,
            "upper_cutoff": self.upper_cutoff,
            "log_cutoff": self.log_cutoff,
        }


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass(frozen=True)
class QuadratureResult:
    value: np.ndarray | float
    error: float
    nodes: np.ndarray
    weights: np.ndarray
    n_panels: int


def panel_nodes(left: np.ndarray, right: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on each panel, flattened panel-major."""
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    nodes = mid[:, None] + half[:, None] * _GL_X[None, :]
    weights = half[:, None] * _GL_W[None, :]
    return nodes.ravel(), weights.ravel()


def composite_rule(edges) -> tuple[np.ndarray, np.ndarray]:
    edges = np.asarray(edges, dtype=float)
    return panel_nodes(edges[:-1], edges[1:])


def _as_2d(values: np.ndarray, m: int) -> np.ndarray:
    values = np.asarray(values)
    if values.shape[0] != m:
        raise ValueError("integrand must return one row per node")
    return values.reshape(m, -1)


def adaptive_rule(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    abs_tol: float = 1e-12,
    rel_tol: float = 1e-10,
    max_subdivisions: int = 4000,
    initial_panels: int = 8,
    breakpoints=(),
) -> QuadratureResult:
    """Integrate ``f`` over ``[a, b]`` and return the accepted composite rule.

    The returned ``nodes``/``weights`` reproduce ``value`` exactly and can be
    re-applied to other members of the same integrand family.
    """
    if not b > a:
        raise ValueError("need b > a")
    edges = np.unique(np.concatenate([np.linspace(a, b, initial_panels + 1), np.asarray(breakpoints, float)]))
    edges = edges[(edges >= a) & (edges <= b)]
    new_left, new_right = edges[:-1], edges[1:]

    L = np.zeros(0)
    R = np.zeros(0)
    F = None  # per-panel fine values, shape (P, k)
    E = None  # per-panel error estimates

    while True:
        mid = 0.5 * (new_left + new_right)
        x, w = panel_nodes(np.concatenate([new_left, new_left, mid]), np.concatenate([new_right, mid, new_right]))
        vals = _as_2d(f(x), x.size)
        p = new_left.size
        per_panel = (w[:, None] * vals).reshape(3 * p, GL_ORDER, -1).sum(axis=1)
        fine = per_panel[p : 2 * p] + per_panel[2 * p :]
        err = np.abs(per_panel[:p] - fine)
        L = np.concatenate([L, new_left])
        R = np.concatenate([R, new_right])
        F = fine if F is None else np.concatenate([F, fine])
        E = err if E is None else np.concatenate([E, err])

        tol = np.maximum(abs_tol, rel_tol * np.abs(F.sum(axis=0)))
        ratio = E / tol[None, :]
        if ratio.sum(axis=0).max() <= 1.0:
            break
        score = ratio.max(axis=1)
        bad = score > 1.0 / L.size
        if L.size + bad.sum() > max_subdivisions:
            worst = int(np.argmax(score))
            raise QuadratureError(
                "adaptive quadrature did not converge",
                int(L.size),
                float(E.sum(axis=0).max()),
                (float(L[worst]), float(R[worst])),
            )
        bl, br = L[bad], R[bad]
        bm = 0.5 * (bl + br)
        new_left = np.concatenate([bl, bm])
        new_right = np.concatenate([bm, br])
        keep = ~bad
        L, R, F, E = L[keep], R[keep], F[keep], E[keep]

    order = np.argsort(L)
    lefts, rights = L[order], R[order]
    mids = 0.5 * (lefts + rights)
    nodes, weights = panel_nodes(np.concatenate([lefts, mids]), np.concatenate([mids, rights]))
    total = F.sum(axis=0)
    value = total if total.size > 1 else total[0]
    return QuadratureResult(value, float(E.sum(axis=0).max()), nodes, weights, int(lefts.size))


def integrate(f, a: float, b: float, q: QuadratureConfig = DEFAULT_QUADRATURE, **kw):
    """Scalar or vector integral of ``f`` over ``[a, b]``; returns ``(value, error)``."""
    res = adaptive_rule(f, a, b, q.abs_tol, q.rel_tol, q.max_subdivisions, **kw)
    return res.value, res.error


def integrate_half_line(f, q: QuadratureConfig = DEFAULT_QUADRATURE, upper: float | None = None):
    """Integrate ``f`` over ``(0, upper]`` for integrands that may be singular at 0.

    ``(0, 1]`` is mapped by ``sigma = exp(-u)`` onto ``[0, log_cutoff]``; ``[1, upper]``
    is integrated directly. Returns ``(value, error)``.
    """
    upper = q.upper_cutoff if upper is None else upper

    def g(u):
        s = np.exp(-u)
        return _as_2d(f(s), u.size) * s[:, None]

    lo_cut = min(upper, 1.0)
    if lo_cut < 1.0:
        # whole range inside (0, 1): shift the log map
        shift = -np.log(lo_cut)

        def g_shift(u):
            s = np.exp(-(u + shift))
            return _as_2d(f(s), u.size) * s[:, None]

        v, e = integrate(g_shift, 0.0, q.log_cutoff, q, breakpoints=(1.0, 2.0, 4.0, 8.0, 16.0))
        return v, e
    v1, e1 = integrate(g, 0.0, q.log_cutoff, q, breakpoints=(1.0, 2.0, 4.0, 8.0, 16.0))
    if upper > 1.0:
        v2, e2 = integrate(lambda s: _as_2d(f(s), s.size), 1.0, upper, q)
        return v1 + v2, e1 + e2
    return v1, e1
