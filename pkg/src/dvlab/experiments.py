"""Experiment presets: each returns a :class:`Report` of assertions plus data tables.

A preset is a pure function of its :class:`ExperimentConfig`; nothing in a report
depends on wall-clock time, so re-running with the same seed reproduces it exactly.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from sympy import nextprime

from . import dirichlet as dz
from . import measures, norms, polydisc, volterra, zeta
from .measures import AdmissibleMeasure

PRESETS = ("exp-weights", "exp-nu-gamma", "exp-lacunary", "exp-lp-identity",
           "exp-schatten", "exp-compactness", "exp-radicality", "exp-functionals")


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    measure: dict | None = None
    N: int | None = None
    grid: dict | None = None
    seed: int = 0
    output_dir: str = "."
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in PRESETS and self.name != "custom":
            raise ValueError(f"unknown experiment {self.name!r}; choose from {', '.join(PRESETS)} or custom")
        if self.N is not None and self.N < 2:
            raise ValueError("N must be >= 2")
        if self.measure is not None:
            AdmissibleMeasure.from_spec(self.measure)  # validate early
        if self.grid is not None:
            norms.StripGrid(**self.grid)

    def mu(self, default: dict) -> AdmissibleMeasure:
        return AdmissibleMeasure.from_spec(self.measure or default)

    def param(self, key: str, default):
        return self.params.get(key, default)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("output_dir")  # where results go does not change what they are
        return d


@dataclass
class Assertion:
    name: str
    passed: bool
    paper_ref: str
    detail: dict = field(default_factory=dict)


@dataclass
class Table:
    header: list
    rows: list


@dataclass
class Report:
    name: str
    assertions: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)  # file name -> Table
    documents: dict = field(default_factory=dict)  # file name -> JSON-able dict

    def check(self, name: str, passed, paper_ref: str, **detail) -> None:
        if paper_ref not in MANIFEST[self.name]:
            raise KeyError(f"{paper_ref!r} is not in the manifest of {self.name}")
        self.assertions.append(Assertion(name, bool(passed), paper_ref, detail))

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)


# statements each preset may assert; summary entries must cite one of these
MANIFEST = {
    "exp-weights": {
        "weight closed form for mu_alpha: w_n = (1 + log n)^{-(alpha+1)}",
        "weights supermultiplicative: w_mn >= w_m w_n",
        "weights: w_1 = 1 and w_n decreasing",
        "McCarthy bound via w_{2^k} >= w_2^k",
    },
    "exp-nu-gamma": {
        "nu_gamma example: sup sigma^gamma |f_gamma'| bounded",
        "nu_gamma example: sigma |f_gamma'| ~ sigma^{1-gamma} unbounded",
    },
    "exp-lacunary": {
        "lacunary symbol: sum_{x<=n<=x^2} a_n <= 2",
        "block-sum criterion fails for zeta",
        "lacunary symbol not in A^2_mu: divergence like int dsigma/(sigma log(e/sigma))",
    },
    "exp-lp-identity": {
        "Littlewood-Paley at p=2: Carleson quantity comparable to ||T_g f||^2 - |T_g f(+inf)|^2",
    },
    "exp-schatten": {
        "Schatten lower bound: ||T_g e~_n||^2 >= (log n0)^2 |b_n0|^2 w_n0 / (4 (log n)^2)",
        "T_g not in any Schatten class: partial sums diverge",
    },
    "exp-compactness": {
        "polynomial symbols give compact T_g: tail sections vanish",
        "finite section consistent with coefficient action",
    },
    "exp-radicality": {
        "radicality: ||f^m o Phi - f^m(Phi 0)||^{1/m} <= ||f^n o Phi - f^n(Phi 0)||^{1/n}",
        "Pythagoras: ||f^k - f^k(0)||^2 = ||f^k||^2 - |f(0)|^{2k}",
    },
    "exp-functionals": {
        "derivative functional on H^2: ||Delta_s|| = zeta''(2 sigma)^{1/2} <~ (2 sigma - 1)^{-3/2}",
        "Bloch point evaluation: ||delta_s|| >= log(1/sigma)/e",
    },
    "custom": {
        "A^2_mu norm: coefficient form equals integral of translates",
        "finite section consistent with coefficient action",
        "power iteration agrees with SVD",
    },
}


def _matrix_table(M: volterra.FiniteSectionMatrix) -> Table:
    k, j, v = M.coo_rows()
    if np.iscomplexobj(v):
        return Table(["k", "j", "re", "im"], [[int(a), int(b), float(c.real), float(c.imag)]
                                             for a, b, c in zip(k, j, v)])
    return Table(["k", "j", "value"], [[int(a), int(b), float(c)] for a, b, c in zip(k, j, v)])


def _series_rows(f: dz.Series) -> list:
    n, a = f.terms()
    return [[int(k), float(v.real), float(v.imag)] for k, v in zip(n.tolist(), a.tolist())]


# ----------------------------------------------------------------------------
# presets


def exp_weights(cfg: ExperimentConfig) -> Report:
    rep = Report("exp-weights")
    mu = cfg.mu({"family": "mu_alpha", "alpha": 0.0})
    N = cfg.N or 10_000
    M = int(cfg.param("supermult_max", 200))
    w = measures.weight_table(mu, max(N, M * M))
    rows = []
    closed = measures.mu_alpha_weight(mu.params[0], np.arange(1, N + 1)) if mu.family == "mu_alpha" else None
    for n in range(1, N + 1):
        rows.append([n, float(w[n - 1])] + ([float(closed[n - 1])] if closed is not None else []))
    rep.tables["weights.csv"] = Table(["n", "w_n"] + (["closed_form"] if closed is not None else []), rows)
    if closed is not None:
        err = float(np.max(np.abs(w[:N] - closed)))
        rep.check("closed form to 1e-8", err < 1e-8,
                  "weight closed form for mu_alpha: w_n = (1 + log n)^{-(alpha+1)}", max_abs_error=err)
    rep.check("w_1 = 1 and strictly decreasing", w[0] == 1.0 and bool(np.all(np.diff(w[:N]) < 0)),
              "weights: w_1 = 1 and w_n decreasing")
    m = np.arange(1, M + 1)
    slack = w[np.outer(m, m) - 1] - np.outer(w[:M], w[:M])
    rep.check(f"w_mn - w_m w_n >= -1e-12 for m, n <= {M}", float(slack.min()) >= -1e-12,
              "weights supermultiplicative: w_mn >= w_m w_n", min_slack=float(slack.min()))
    K = min(20, int(math.log2(len(w))))
    pw = np.array([w[2**k - 1] for k in range(1, K + 1)])
    ok = bool(np.all(pw >= w[1] ** np.arange(1, K + 1) - 1e-15))
    rep.check(f"w_(2^k) >= w_2^k for k <= {K}", ok, "McCarthy bound via w_{2^k} >= w_2^k")
    return rep


def f_gamma(gamma: float, N: int) -> dz.DirichletSeries:
    """``f_gamma(s) = -sum_{n>=2} (log n)^{gamma-2} n^{-(s+1)}`` truncated at ``N``."""
    n = np.arange(1, N + 1, dtype=float)
    c = np.zeros(N)
    c[1:] = -np.log(n[1:]) ** (gamma - 2.0) / n[1:]
    return dz.DirichletSeries(c)


def f_gamma_tail(gamma: float, N: int) -> Callable[[np.ndarray], np.ndarray]:
    """``sigma -> sum_{n>N} (log n)^{gamma-1} n^{-1-sigma}``, the derivative tail of ``f_gamma``."""
    return lambda sig: np.array([zeta.log_power_tail(gamma - 1.0, 1.0 + s, N) for s in np.atleast_1d(sig)])


def exp_nu_gamma(cfg: ExperimentConfig) -> Report:
    rep = Report("exp-nu-gamma")
    gamma = float(cfg.param("gamma", 2.0))
    N = cfg.N or 100_000
    f = f_gamma(gamma, N)
    tail = f_gamma_tail(gamma, N)
    js = list(range(int(cfg.param("j_min", 4)), int(cfg.param("j_max", 12)) + 1))
    rows, cl, pl = [], [], []
    for j in js:
        grid = norms.StripGrid(sigma_min=2.0**-j, n_sigma=int(cfg.param("n_sigma", 64)), n_t=1)
        c = norms.bloch_seminorm(f, norms.BlochWeight.classical(), grid, tail=tail)
        p = norms.bloch_seminorm(f, norms.BlochWeight.power_law(gamma), grid, tail=tail)
        fp = float(norms.derivative_abs_on_axis(f, np.array([2.0**-j]))[0] + tail(2.0**-j)[0])
        rows.append([j, 2.0**-j, fp, c.value, p.value])
        cl.append(c.value)
        pl.append(p.value)
    rep.tables["nu_gamma_profile.csv"] = Table(
        ["j", "sigma_min", "abs_fprime_at_sigma_min", "classical_seminorm", "power_law_seminorm"], rows)
    growth = cl[-1] / cl[0]
    rep.check("classical seminorm grows >= 10x over the sigma range", growth >= 10.0,
              "nu_gamma example: sigma |f_gamma'| ~ sigma^{1-gamma} unbounded", growth=growth)
    spread = max(pl) / min(pl)
    rep.check("power-law seminorm stays within a 2x bracket", spread <= 2.0,
              "nu_gamma example: sup sigma^gamma |f_gamma'| bounded", bracket=[min(pl), max(pl)])
    return rep


def lacunary_primes(J: int) -> list[int]:
    """``p_j`` = least prime in ``[2^{2^j}, 2^{2^{j+1}}]`` for ``j = 0..J``."""
    return [int(nextprime(2 ** (2**j) - 1)) for j in range(J + 1)]


def lacunary_symbol(J: int = 4) -> dz.SparseDirichletSeries:
    ps = lacunary_primes(J)
    return dz.SparseDirichletSeries(np.array(ps), np.ones(len(ps)), 2 ** (2 ** (J + 1)))


def block_scale_increments(J: int) -> np.ndarray:
    """Increments of ``I(sigma) = int_sigma^1 dt/(t log(e/t)) = log log(e/sigma)`` between ``sigma = 2^{-j}``."""
    s = 2.0 ** -np.arange(J + 2)
    I = np.log(np.log(math.e / s))
    return np.diff(I)


def exp_lacunary(cfg: ExperimentConfig) -> Report:
    rep = Report("exp-lacunary")
    J = int(cfg.param("J", 4))
    g = lacunary_symbol(J)
    rep.tables["lacunary_symbol.csv"] = Table(["n", "re", "im"], _series_rows(g))
    xs = [2 ** (2**j) for j in range(1, J + 1)]
    bs = norms.block_sum_criterion(g, 1.0, xs)
    rep.tables["lacunary_block_sums.csv"] = Table(["x", "normalized_sum"], [[int(x), v] for x, v in bs])
    rep.check("normalized block sums <= 2", max(v for _, v in bs) <= 2.0 + 1e-12,
              "lacunary symbol: sum_{x<=n<=x^2} a_n <= 2", values=[v for _, v in bs])

    zx = [2 ** (2**j) for j in range(1, min(J, 3) + 1)]
    zs = norms.block_sum_criterion(dz.zeta_truncation(int(zx[-1] ** 2)), 1.0, zx)
    rep.tables["zeta_block_sums.csv"] = Table(["x", "normalized_sum"], [[int(x), v] for x, v in zs])
    ratios = [zs[i + 1][1] / zs[i][1] for i in range(len(zs) - 1)]
    rep.check("zeta block sums grow >= 10x per step x -> x^2", min(ratios) >= 10.0,
              "block-sum criterion fails for zeta", ratios=ratios)

    mu = cfg.mu({"family": "log_square"})
    ps = lacunary_primes(J)
    w = measures.weights_at(mu, np.array(ps))
    dI = block_scale_increments(J)
    c = float(cfg.param("c", 0.1))
    partial = np.cumsum(w)
    rows = [[j, ps[j], float(w[j]), float(partial[j]), float(dI[j]), float(w[j] / dI[j])] for j in range(J + 1)]
    rep.tables["lacunary_partial_norms.csv"] = Table(
        ["j", "p_j", "w_p_j", "partial_norm_sq", "integral_increment", "ratio"], rows)
    rep.check(f"every block increment >= {c} x integral increment", bool(np.all(w >= c * dI)),
              "lacunary symbol not in A^2_mu: divergence like int dsigma/(sigma log(e/sigma))",
              min_ratio=float(np.min(w / dI)), measure=str(mu))
    return rep


def random_smooth_series(d: int, degree: int, n_terms: int, rng: np.random.Generator) -> dz.Series:
    F = polydisc.random_polynomial(d, degree, rng, n_terms)
    return dz.inverse_bohr_lift(F)


def exp_lp_identity(cfg: ExperimentConfig) -> Report:
    rep = Report("exp-lp-identity")
    mu = cfg.mu({"family": "mu_alpha", "alpha": 0.0})
    pairs = int(cfg.param("pairs", 20))
    d = int(cfg.param("d", 2))
    n_samples = int(cfg.param("n_samples", 4000))
    rng = np.random.default_rng(cfg.seed)
    records, ratios, rel = [], [], []
    for i in range(pairs):
        f = random_smooth_series(d, 2, 4, rng)
        g = random_smooth_series(d, 2, 4, rng)
        if not np.any(g.terms()[0] >= 2):  # constant symbol: T_g = 0
            g = dz.monomial(2)
        seed = int(cfg.seed * 1000 + i)
        r = volterra.carleson_quantity_p2(f, g, mu, d, n_samples, seed)
        rec = r.to_record()
        rec["pair"] = i
        rec["f"] = _series_rows(f)
        rec["g"] = _series_rows(g)
        records.append(rec)
        ratios.append(r.ratio)
        rel.append(r.std_error / r.estimate)
    rows = [[i, rec["value"], rec["std_error"], rec["exact_lp_value"], rec["ratio"]] for i, rec in enumerate(records)]
    rep.tables["carleson_ratios.csv"] = Table(["pair", "estimate", "std_error", "exact_lp_value", "ratio"], rows)
    rep.documents["carleson.json"] = {"measure": mu.to_spec(), "seed": cfg.seed, "reports": records}
    lo, hi = min(ratios), max(ratios)
    rep.check("ratio bracket r_hi/r_lo < 20 with MC std_error < 2%", hi / lo < 20 and max(rel) < 0.02,
              "Littlewood-Paley at p=2: Carleson quantity comparable to ||T_g f||^2 - |T_g f(+inf)|^2",
              bracket=[lo, hi], max_relative_std_error=max(rel))
    return rep


def exp_schatten(cfg: ExperimentConfig) -> Report:
    rep = Report("exp-schatten")
    mu = cfg.mu({"family": "mu_alpha", "alpha": 0.0})
    N = cfg.N or 10_000
    g = dz.from_terms({int(k): complex(*v) if isinstance(v, list) else v
                       for k, v in cfg.param("symbol", {2: 1.0}).items()})
    for p in cfg.param("p_values", [2, 4]):
        prof = volterra.schatten_partial_sum(g, mu, float(p), N)
        rep.tables[f"schatten_p{p}.csv"] = Table(
            ["n", "term", "lower_bound", "partial_sum"],
            [[int(n), float(t), float(lb), float(s)] for n, t, lb, s in
             zip(prof.n, prof.terms, prof.lower_bounds, prof.partial_sums)])
        ok = bool(np.all(prof.terms >= prof.lower_bounds * (1 - 1e-12)))
        rep.check(f"termwise lower bound (p={p})", ok,
                  "Schatten lower bound: ||T_g e~_n||^2 >= (log n0)^2 |b_n0|^2 w_n0 / (4 (log n)^2)",
                  min_ratio=float(np.min(prof.terms / prof.lower_bounds)))
        if float(p) == 2.0:
            growth = float(prof.partial_sums[-1] / prof.terms[0])
            rep.check("partial sum exceeds 10x the first term (p=2)", growth > 10.0,
                      "T_g not in any Schatten class: partial sums diverge", growth=growth)
    return rep


def exp_compactness(cfg: ExperimentConfig) -> Report:
    rep = Report("exp-compactness")
    mu = cfg.mu({"family": "mu_alpha", "alpha": 0.0})
    N = cfg.N or 2048
    g = dz.from_terms({int(k): v for k, v in cfg.param("symbol", {2: 1.0, 3: 0.5}).items()})
    M = volterra.finite_section_matrix(g, mu, N)
    rep.tables["matrix.csv"] = _matrix_table(M)
    sv = volterra.singular_values(M, min(N, int(cfg.param("n_singular", 20))))
    rep.tables["singular_values.csv"] = Table(["i", "sigma_i"], [[i + 1, float(s)] for i, s in enumerate(sv)])
    cuts = [0] + [2**i for i in range(int(math.log2(N)) + 1)]
    prof = volterra.compactness_profile(M, cuts)
    rep.tables["compactness_profile.csv"] = Table(["n_cut", "tail_norm"], [[c, t] for c, t in prof])
    tails = np.array([t for _, t in prof])
    full = tails[0]
    at_half = dict(prof)[N // 2]
    rep.check("tail norms nonincreasing and below 0.1 x full norm at N/2",
              bool(np.all(np.diff(tails) <= 1e-12 * full)) and at_half < 0.1 * full,
              "polynomial symbols give compact T_g: tail sections vanish",
              full_norm=float(full), tail_at_half=float(at_half))
    f = dz.DirichletSeries(np.random.default_rng(cfg.seed).normal(size=min(N, 64)))
    y = M.apply(f)
    ref = volterra.volterra_apply(g, f, N).coefficients * np.sqrt(M.weights)
    err = float(np.max(np.abs(y - ref)))
    rep.check("matrix action equals coefficient action", err < 1e-12,
              "finite section consistent with coefficient action", max_abs_error=err)
    return rep


def exp_radicality(cfg: ExperimentConfig) -> Report:
    rep = Report("exp-radicality")
    d = int(cfg.param("d", 2))
    count = int(cfg.param("polynomials", 50))
    n = int(cfg.param("n", 4))
    n_centers = int(cfg.param("centers", 50))
    degree = int(cfg.param("degree", 2))
    rng = np.random.default_rng(cfg.seed)
    centers = polydisc.sample_centers(d, n_centers, cfg.seed)
    violations, rows, pyth = [], [], 0.0
    for i in range(count):
        F = polydisc.random_polynomial(d, degree, rng, int(rng.integers(1, (degree + 1) ** d + 1)))
        for m in range(1, n + 1):
            rr = polydisc.radicality_check(F, n, m, centers, n * degree)
            violations += [dict(v, polynomial=i, m=m) for v in rr.violations]
            worst = max(e["lhs"] - e["rhs"] for e in rr.per_center)
            rows.append([i, m, n, worst])
        for k in range(1, n + 1):
            Fk = polydisc.poly_power(F, k)
            c = Fk.coeffs.copy()
            f0 = polydisc.value_at_origin(F)
            c[(0,) * d] -= f0**k
            lhs = polydisc.bergman_norm_sq(dz.PolydiscPolynomial(c))
            rhs = polydisc.bergman_norm_sq(Fk) - abs(f0) ** (2 * k)
            pyth = max(pyth, abs(lhs - rhs) / max(1.0, polydisc.bergman_norm_sq(Fk)))
        if i == 0:
            rep.tables["polynomial_0.csv"] = Table(
                [f"alpha_{j + 1}" for j in range(d)] + ["re", "im"],
                [list(a) + [v.real, v.imag] for a, v in sorted(F.terms().items())])
    rep.tables["radicality_margins.csv"] = Table(["polynomial", "m", "n", "max_lhs_minus_rhs"], rows)
    rep.documents["radicality.json"] = {"d": d, "n": n, "polynomials": count, "seed": cfg.seed,
                                        "centers": [c.to_dict() for c in centers], "violations": violations}
    rep.check("zero violations", not violations,
              "radicality: ||f^m o Phi - f^m(Phi 0)||^{1/m} <= ||f^n o Phi - f^n(Phi 0)||^{1/n}",
              violations=len(violations))
    rep.check("Pythagoras to 1e-12 (relative)", pyth < 1e-12,
              "Pythagoras: ||f^k - f^k(0)||^2 = ||f^k||^2 - |f(0)|^{2k}", max_defect=pyth)
    return rep


def exp_functionals(cfg: ExperimentConfig) -> Report:
    rep = Report("exp-functionals")
    js = list(range(int(cfg.param("j_min", 3)), int(cfg.param("j_max", 12)) + 1))
    N = cfg.N or 10**7
    rows, scaled, wit_ok = [], [], []
    for j in js:
        s = 0.5 + 2.0**-j
        v = norms.eval_deriv_functional_h2(s)
        sc = v * (2 * s - 1) ** 1.5
        b = norms.bloch_delta_functional_bounds(s, N)
        rows.append([j, s, v, sc, b.lower, b.witness, b.upper])
        scaled.append(sc)
        wit_ok.append(b.witness >= b.lower)
    rep.tables["functionals.csv"] = Table(
        ["j", "sigma", "deriv_functional", "scaled_by_(2sigma-1)^1.5", "bloch_lower", "witness", "bloch_upper"], rows)
    spread = max(scaled) / min(scaled)
    rep.check("(2 sigma - 1)^{3/2} ||Delta_s|| within a 2x bracket", spread <= 2.0,
              "derivative functional on H^2: ||Delta_s|| = zeta''(2 sigma)^{1/2} <~ (2 sigma - 1)^{-3/2}",
              bracket=[min(scaled), max(scaled)])
    rep.check("witness f(sigma) >= log(1/sigma)/e", all(wit_ok),
              "Bloch point evaluation: ||delta_s|| >= log(1/sigma)/e", N=N)
    return rep


def custom(cfg: ExperimentConfig) -> Report:
    """Standard diagnostics for a user symbol (``params.symbol``: ``{n: a_n}`` or a CSV path)."""
    rep = Report("custom")
    mu = cfg.mu({"family": "mu_alpha", "alpha": 0.0})
    sym = cfg.param("symbol", {2: 1.0})
    g = dz.read_series_csv(sym) if isinstance(sym, str) else dz.from_terms(
        {int(k): complex(*v) if isinstance(v, list) else v for k, v in sym.items()})
    N = cfg.N or 256
    a = norms.a2mu_norm(g, mu)
    b = norms.a2mu_norm_integral(g, mu)
    rep.check("coefficient and integral A^2_mu norms agree to 1e-7", abs(a - b) < 1e-7,
              "A^2_mu norm: coefficient form equals integral of translates", coefficient=a, integral=b)
    M = volterra.finite_section_matrix(g, mu, N)
    est = volterra.operator_norm_estimate(M)
    sv = volterra.singular_values(M, min(N, 20))
    rep.check("power iteration equals top singular value", est.converged and abs(est.value - sv[0]) < 1e-8 * max(1, sv[0]),
              "power iteration agrees with SVD", power=est.value, svd=float(sv[0]))
    f = dz.constant(1.0, N)
    err = float(np.max(np.abs(M.apply(f) - volterra.volterra_apply(g, f, N).coefficients * np.sqrt(M.weights))))
    rep.check("matrix column 1 equals (g - g(+inf)) sqrt(w)", err < 1e-12,
              "finite section consistent with coefficient action", max_abs_error=err)
    rep.tables["matrix.csv"] = _matrix_table(M)
    rep.tables["singular_values.csv"] = Table(["i", "sigma_i"], [[i + 1, float(s)] for i, s in enumerate(sv)])
    rep.tables["symbol.csv"] = Table(["n", "re", "im"], _series_rows(g))
    return rep


REGISTRY: dict[str, Callable[[ExperimentConfig], Report]] = {
    "exp-weights": exp_weights,
    "exp-nu-gamma": exp_nu_gamma,
    "exp-lacunary": exp_lacunary,
    "exp-lp-identity": exp_lp_identity,
    "exp-schatten": exp_schatten,
    "exp-compactness": exp_compactness,
    "exp-radicality": exp_radicality,
    "exp-functionals": exp_functionals,
    "custom": custom,
}


def run(cfg: ExperimentConfig) -> Report:
    return REGISTRY[cfg.name](cfg)
