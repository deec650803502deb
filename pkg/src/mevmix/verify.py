"""Self-verification suite behind ``mevmix verify``.

Each check returns a :class:`Check`; the CLI prints them as a table and
exits nonzero if any fails. Random parameter sets come from a
``numpy.random.Generator`` seeded by the caller, so a run is reproducible.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import copulas as cop
from .model import (
    MevMixModel,
    MixtureComponent,
    make_asymmetric_logistic,
    make_geometric_mean,
    make_logistic,
    model_cdf,
    sample_model,
)
from .specio import model_from_dict
from .stable import laplace_transform_check
from .subsets import SubsetMask, all_nonempty_subsets
from .taildep import (
    bivariate_lambda,
    empirical_lambda,
    m4_bivariate_lambda,
    m4_singleton_numerator,
    orthant_lambda,
    orthant_lambda_logistic,
    orthant_mass,
)

BUNDLED = ("logistic", "asymmetric_logistic", "tawn", "cuadras_auge", "m4_mixture")
# grid points on the uniform scale for the sampler check, one row per point
SAMPLER_GRID_LEVELS = (0.2, 0.4, 0.6, 0.8, 0.95)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def as_row(self) -> dict:
        return {"check": self.name, "passed": self.passed, "seconds": round(self.seconds, 3),
                "detail": self.detail}


def load_bundled(name: str) -> MevMixModel:
    text = resources.files("mevmix").joinpath("data").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return model_from_dict(json.loads(text))


def bundled_models() -> dict[str, MevMixModel]:
    return {name: load_bundled(name) for name in BUNDLED}


# random parameter sets -----------------------------------------------------


def random_m4(rng: np.random.Generator, d: int, terms: int | None = None, sparsity: float = 0.3) -> cop.M4:
    """M4 copula with random coefficients, every column normalized to sum 1."""
    terms = terms or int(rng.integers(2, 6))
    a = rng.random((terms, d))
    a[rng.random((terms, d)) < sparsity] = 0.0
    for i in range(d):
        if a[:, i].sum() == 0:
            a[rng.integers(terms), i] = 1.0
    a /= a.sum(axis=0)
    return cop.M4(a.reshape(1, terms, d))


def random_copula(rng: np.random.Generator, d: int, kinds=("independence", "comonotone", "gumbel", "m4")):
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "independence":
        return cop.Independence(d)
    if kind == "comonotone":
        return cop.Comonotone(d)
    if kind == "gumbel":
        return cop.GumbelLogistic(d, rng.uniform(0.1, 1.0))
    return random_m4(rng, d)


def random_betas(rng: np.random.Generator, q: int, d: int, zero_prob: float = 0.15) -> np.ndarray:
    """q x d nonnegative matrix with unit column sums, some entries exactly zero."""
    b = rng.dirichlet(np.ones(q), size=d).T
    if q > 1:
        zero = rng.random((q, d)) < zero_prob
        zero[np.argmax(b, axis=0), np.arange(d)] = False
        b[zero] = 0.0
        b /= b.sum(axis=0)
    return b


def random_model(rng: np.random.Generator, d: int, q: int, kinds=("independence", "comonotone", "gumbel", "m4")):
    alphas = rng.uniform(0.1, 1.0, size=q)
    betas = random_betas(rng, q, d)
    comps = [MixtureComponent(a, b, random_copula(rng, d, kinds)) for a, b in zip(alphas, betas)]
    return MevMixModel(comps, d=d)


# checks ----------------------------------------------------------------------


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        check = fn(*args, **kwargs)
        check.seconds = time.perf_counter() - t0
        return check

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def check_bivariate_logistic(seed: int, n: int = 1_000_000, alphas=(0.3, 0.5, 0.9)) -> Check:
    worst_exact, worst_emp = 0.0, 0.0
    for k, alpha in enumerate(alphas):
        m = make_logistic(2, alpha)
        exact = 2.0 - 2.0**alpha
        worst_exact = max(worst_exact, abs(orthant_lambda(m, [1]).lambda_ - exact))
        y = sample_model(m, n, seed=[seed, k])
        worst_emp = max(worst_emp, abs(empirical_lambda(y, [1], 0.99).lambda_ - exact))
    ok = worst_exact <= 1e-12 and worst_emp <= 0.02
    return Check("bivariate logistic 2-2^alpha", ok,
                 f"max |analytic-exact|={worst_exact:.2e}, max |empirical-exact|={worst_emp:.4f}")


@_timed
def check_laplace(seed: int, n: int = 1_000_000) -> Check:
    failures, worst = [], 0.0
    for k, alpha in enumerate((0.2, 0.5, 0.8)):
        for row in laplace_transform_check(alpha, [0.5, 1.0, 2.0], n, np.random.default_rng([seed, k])):
            worst = max(worst, abs(row.empirical - row.exact) / row.stderr)
            if not row.passed:
                failures.append(f"alpha={alpha},t={row.t}")
    return Check("positive stable Laplace transform", not failures,
                 f"max z={worst:.2f}" + (f"; failed {failures}" if failures else ""))


def _rel_err(a, b):
    return np.abs(a - b) / np.maximum(np.abs(b), np.finfo(float).tiny)


@_timed
def check_maxstability_margins(seed: int, triples: int = 1000) -> Check:
    rng = np.random.default_rng(seed)
    worst_ms, worst_mg = 0.0, 0.0
    for _ in range(triples):
        m = random_model(rng, int(rng.integers(2, 5)), int(rng.integers(1, 4)))
        u = rng.uniform(0.01, 1.0, size=m.d)
        t = rng.uniform(0.2, 5.0)
        worst_ms = max(worst_ms, float(_rel_err(model_cdf(m, u**t), model_cdf(m, u) ** t)))
        i = int(rng.integers(m.d))
        v = np.ones(m.d)
        v[i] = u[i]
        worst_mg = max(worst_mg, float(_rel_err(model_cdf(m, v), u[i])))
    ok = worst_ms <= 1e-12 and worst_mg <= 1e-12
    return Check("max-stability and uniform margins", ok,
                 f"max rel err: max-stability {worst_ms:.2e}, margins {worst_mg:.2e}")


@_timed
def check_engine_closed_forms(seed: int, n_pi: int = 100, n_m4: int = 20) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_pi):
        d, q = int(rng.integers(2, 5)), int(rng.integers(1, 4))
        alphas, betas = rng.uniform(0.1, 1.0, q), random_betas(rng, q, d)
        m = make_asymmetric_logistic(alphas, betas)
        for J in all_nonempty_subsets(d):
            a, b = orthant_lambda(m, J), orthant_lambda_logistic(alphas, betas, J)
            if a.degenerate or b.degenerate:
                worst = max(worst, 0.0 if a.degenerate == b.degenerate else np.inf)
            else:
                worst = max(worst, abs(a.lambda_ - b.lambda_))
    for _ in range(n_m4):
        d, q = int(rng.integers(2, 5)), int(rng.integers(1, 4))
        m = random_model(rng, d, q, kinds=("m4",))
        worst = max(worst, abs(m4_singleton_numerator(m) - orthant_mass(m, SubsetMask.full(d))))
        for s in range(d):
            for t in range(s + 1, d):
                pair = orthant_mass(m, SubsetMask.from_indices((s, t), d))
                worst = max(worst, abs(m4_bivariate_lambda(m, s, t) - pair))
    return Check("engine vs closed forms", worst <= 1e-12, f"max abs diff {worst:.2e}")


@_timed
def check_heffernan(seed: int, arrays: int = 20) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(arrays):
        c = random_m4(rng, 2)
        m = MevMixModel([MixtureComponent(1.0, np.ones(2), c)])
        expected = 2.0 - float(np.maximum(c.terms[:, 0], c.terms[:, 1]).sum())
        worst = max(worst, abs(bivariate_lambda(m, 0, 1) - expected))
    return Check("Heffernan q=1 M4 reduction", worst <= 1e-12, f"max abs diff {worst:.2e}")


@_timed
def check_case_reductions(seed: int) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(100):
        d = int(rng.integers(2, 5))
        u = rng.uniform(0.01, 1.0, size=d)
        alpha = rng.uniform(0.1, 1.0)
        gum = cop.GumbelLogistic(d, alpha).cdf(u)
        worst = max(worst, abs(model_cdf(make_logistic(d, alpha), u) - gum) / gum)
        q = int(rng.integers(1, 4))
        m = random_model(rng, d, q)
        m = MevMixModel([MixtureComponent(1.0, c.beta, c.copula) for c in m.components], d=d)
        prod = np.prod([c.copula.cdf(u**c.beta) for c in m.components])
        worst = max(worst, abs(model_cdf(m, u) - prod) / prod)
    b1 = 0.3
    ca = make_geometric_mean([b1, 1 - b1], [0.5, 1.0], [cop.Comonotone(2), cop.Independence(2)])
    g = np.linspace(0.05, 1.0, 10)
    uu = np.array([(a, b) for a in g for b in g])
    exact = np.minimum(uu[:, 0], uu[:, 1]) ** b1 * (uu[:, 0] * uu[:, 1]) ** (1 - b1)
    worst = max(worst, float(np.max(np.abs(model_cdf(ca, uu) - exact) / exact)))
    return Check("case I/all-alpha-1/Cuadras-Auge reductions", worst <= 1e-12, f"max rel err {worst:.2e}")


@_timed
def check_convex_combination(seed: int, models: int = 20) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(models):
        d, q = int(rng.integers(2, 5)), int(rng.integers(1, 4))
        w = rng.dirichlet(np.ones(q))
        alphas = rng.uniform(0.1, 1.0, q)
        cs = [random_copula(rng, d) for _ in range(q)]
        m = make_geometric_mean(w, alphas, cs)
        for A in all_nonempty_subsets(d):
            parts = sum(wj * orthant_mass(make_geometric_mean([1.0], [a], [c]), A) for wj, a, c in zip(w, alphas, cs))
            worst = max(worst, abs(orthant_mass(m, A) - parts))
    return Check("convex combination of masses", worst <= 1e-12, f"max abs diff {worst:.2e}")


def sampler_grid(d: int) -> np.ndarray:
    """Five evaluation points: diagonal levels with a fixed off-diagonal tilt."""
    tilt = np.linspace(-0.1, 0.1, d)
    return np.array([np.clip(lv + tilt * (1 - lv), 0.01, 0.99) for lv in SAMPLER_GRID_LEVELS])


def sampler_zscores(m: MevMixModel, n: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """Binomial z-scores of the empirical CDF against model_cdf at the sampler grid."""
    grid = sampler_grid(m.d)
    u = sample_model(m, n, seed=seed, uniform=True)
    exact = model_cdf(m, grid)
    emp = np.array([(u <= g).all(axis=1).mean() for g in grid])
    se = np.sqrt(exact * (1 - exact) / n)
    return (emp - exact) / se, grid


@_timed
def check_sampler(seed: int, n: int = 1_000_000) -> Check:
    worst, failed = 0.0, []
    for k, (name, m) in enumerate(bundled_models().items()):
        z, _ = sampler_zscores(m, n, [seed, k])
        worst = max(worst, float(np.max(np.abs(z))))
        if np.any(np.abs(z) > 3):
            failed.append(name)
    return Check("sampler joint law (5 models x 5 points)", not failed,
                 f"max |z|={worst:.2f}" + (f"; failed {failed}" if failed else ""))


@_timed
def check_li_contrast(seed: int) -> Check:
    lam = {a: bivariate_lambda(make_logistic(2, a), 0, 1) for a in (0.5, 0.9)}
    ok = abs(lam[0.5] - lam[0.9]) > 0.1 and min(lam.values()) > 0
    return Check("mixing-induced tail dependence persists", ok,
                 f"lambda(0.5)={lam[0.5]:.6f}, lambda(0.9)={lam[0.9]:.6f}")


ALL_CHECKS = (
    check_bivariate_logistic,
    check_laplace,
    check_maxstability_margins,
    check_engine_closed_forms,
    check_heffernan,
    check_case_reductions,
    check_convex_combination,
    check_sampler,
    check_li_contrast,
)


@_timed
def check_user_model(m: MevMixModel, seed: int, n: int, u: float = 0.99) -> Check:
    """Margins, max-stability, sampler law and empirical-vs-analytic lambda for one model."""
    m.ensure_valid()
    rng = np.random.default_rng(seed)
    notes, ok = [], True
    worst = 0.0
    for _ in range(100):
        x = rng.uniform(0.01, 1.0, size=m.d)
        t = rng.uniform(0.2, 5.0)
        worst = max(worst, float(_rel_err(model_cdf(m, x**t), model_cdf(m, x) ** t)))
        for i in range(m.d):
            v = np.ones(m.d)
            v[i] = x[i]
            worst = max(worst, float(_rel_err(model_cdf(m, v), x[i])))
    ok &= worst <= 1e-12
    notes.append(f"identities max rel err {worst:.1e}")
    z, _ = sampler_zscores(m, n, [seed, 1])
    ok &= bool(np.all(np.abs(z) <= 3))
    notes.append(f"sampler max |z|={np.max(np.abs(z)):.2f}")
    y = sample_model(m, n, seed=[seed, 2])
    gap = 0.0
    for s in range(m.d):
        J = SubsetMask.from_indices([s], m.d)
        gap = max(gap, abs(empirical_lambda(y, J, u).lambda_ - orthant_lambda(m, J).lambda_))
    ok &= gap <= 0.02
    notes.append(f"max |empirical-analytic| lambda_{{s}}={gap:.4f}")
    return Check("user model", bool(ok), "; ".join(notes))


def run_all(seed: int = 42, n: int = 1_000_000, model: MevMixModel | None = None, log=None) -> list[Check]:
    out = []
    for fn in ALL_CHECKS:
        if fn in (check_bivariate_logistic, check_laplace, check_sampler):
            c = fn(seed, n)
        else:
            c = fn(seed)
        out.append(c)
        if log:
            log(c)
    if model is not None:
        c = check_user_model(model, seed, n)
        out.append(c)
        if log:
            log(c)
    return out


def format_table(checks: list[Check]) -> str:
    width = max(len(c.name) for c in checks)
    lines = [f"{'check':<{width}}  result  seconds  detail"]
    for c in checks:
        lines.append(f"{c.name:<{width}}  {'PASS' if c.passed else 'FAIL':<6}  {c.seconds:7.2f}  {c.detail}")
    n_pass = sum(c.passed for c in checks)
    lines.append(f"{n_pass}/{len(checks)} checks passed")
    return "\n".join(lines)


__all__ = [name for name in dir() if name.startswith(("check_", "random_"))] + [
    "Check", "run_all", "format_table", "bundled_models", "load_bundled", "sampler_grid", "sampler_zscores",
]
