"""Generalized logistic MEV model: a max over q stable scale mixtures.

Component ``j`` contributes ``X_ji = beta_ji * (S_j / E_ji)**alpha_j`` where
``S_j`` is positive alpha_j-stable and ``E_j = -log W_j`` with ``W_j`` drawn
from the max-stable copula ``C_j``. ``Y_i = max_j X_ji`` has unit Frechet
margins whenever every beta column sums to one, and exponent function

    l_Y(x) = sum_j l_j((beta_j1 x_1)**(1/alpha_j), ..., (beta_jd x_d)**(1/alpha_j))**alpha_j
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .copulas import (
    Comonotone,
    Independence,
    MaxStableCopula,
    _check_exponent_args,
    _check_unit_cube,
    neg_log,
)
from .errors import DomainError, ModelValidationError, ShapeError
from .stable import sample_positive_stable
from .subsets import MAX_DIM, SubsetMask

BETA_SUM_TOL = 1e-12
CHUNK_SIZE = 1 << 16
THREADS_ENV = "MEVMIX_THREADS"


@dataclass(frozen=True, eq=False)
class MixtureComponent:
    """One (alpha_j, beta_j, C_j) triple."""

    alpha: float
    beta: np.ndarray
    copula: MaxStableCopula

    def __post_init__(self):
        beta = np.array(self.beta, dtype=float).ravel()
        beta.setflags(write=False)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def d(self) -> int:
        return self.beta.shape[0]

    def violations(self, label: str = "component") -> list[str]:
        problems = []
        if not 0.0 < self.alpha <= 1.0:
            problems.append(f"{label}: alpha={self.alpha!r} out of (0,1]")
        if not np.isfinite(self.beta).all():
            problems.append(f"{label}: beta must be finite")
        for i in np.flatnonzero(self.beta < 0):
            problems.append(f"{label}: beta[{i + 1}]={float(self.beta[i])!r} is negative")
        if self.copula.d != self.d:
            problems.append(f"{label}: copula dimension {self.copula.d} != len(beta) {self.d}")
        problems += [f"{label}: {p}" for p in self.copula.validate(top_level=True)]
        return problems

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta.tolist(), "copula": self.copula.to_dict()}


class MevMixModel:
    """Mixture model with q components on d coordinates.

    Construction only checks that the parameter arrays line up; call
    :func:`validate_model` (or :meth:`ensure_valid`) for the full set of
    constraints. Instances are treated as immutable.
    """

    def __init__(self, components: Sequence[MixtureComponent], d: int | None = None):
        self.components = tuple(components)
        if d is None:
            if not self.components:
                raise ShapeError("a model needs d or at least one component")
            d = self.components[0].d
        self.d = int(d)

    @property
    def q(self) -> int:
        return len(self.components)

    @property
    def alphas(self) -> np.ndarray:
        return np.array([c.alpha for c in self.components])

    @property
    def betas(self) -> np.ndarray:
        """The q x d weight matrix."""
        return np.vstack([c.beta for c in self.components]) if self.components else np.zeros((0, self.d))

    @cached_property
    def violations(self) -> tuple[str, ...]:
        problems = []
        if not 1 <= self.d <= MAX_DIM:
            problems.append(f"dimension d={self.d} outside [1, {MAX_DIM}]")
        if self.q < 1:
            problems.append("model needs at least one component (q >= 1)")
        shapes_ok = True
        for j, comp in enumerate(self.components, start=1):
            if comp.d != self.d:
                problems.append(f"component {j}: beta has length {comp.d}, model has d={self.d}")
                shapes_ok = False
            problems += comp.violations(f"component {j}")
        if shapes_ok and self.q:
            for i, s in enumerate(self.betas.sum(axis=0), start=1):
                if abs(s - 1.0) > BETA_SUM_TOL:
                    problems.append(f"beta column for coordinate {i} sums to {float(s)!r}, expected 1")
        return tuple(problems)

    def ensure_valid(self) -> MevMixModel:
        if self.violations:
            raise ModelValidationError(self.violations)
        return self

    def _ensure_evaluable(self):
        for j, comp in enumerate(self.components, start=1):
            if comp.d != self.d or comp.copula.d != self.d:
                raise ShapeError(f"component {j} does not have dimension {self.d}")
            if not 0.0 < comp.alpha <= 1.0:
                raise DomainError(f"component {j}: alpha={comp.alpha!r} out of (0,1]")
            if (comp.beta < 0).any() or not np.isfinite(comp.beta).all():
                raise DomainError(f"component {j}: beta must be finite and nonnegative")

    def exponent(self, x):
        return model_exponent(self, x)

    def cdf(self, u):
        return model_cdf(self, u)

    def to_dict(self) -> dict:
        return {"d": self.d, "components": [c.to_dict() for c in self.components]}

    def __repr__(self):
        return f"MevMixModel(d={self.d}, q={self.q})"


def validate_model(m: MevMixModel) -> list[str]:
    """Return the list of constraint violations; empty means valid."""
    return list(m.violations)


def _component_exponent(comp: MixtureComponent, x: np.ndarray) -> np.ndarray:
    # l_j((b x)^(1/a))^a, factoring out m = max_i b_i x_i (homogeneity) so that
    # powers 1/a of large arguments cannot overflow
    b = comp.beta
    with np.errstate(invalid="ignore"):
        y = np.where(b > 0, b * x, 0.0)
    m = y.max(axis=1)
    out = m.copy()
    ok = (m > 0) & np.isfinite(m)
    if ok.any():
        z = (y[ok] / m[ok, None]) ** (1.0 / comp.alpha)
        out[ok] = m[ok] * comp.copula._exponent(z) ** comp.alpha
    return out


def model_exponent(m: MevMixModel, x):
    """Exponent function of the mixture at one point or at rows of ``x``."""
    m._ensure_evaluable()
    arr, single = _check_exponent_args(x, m.d)
    out = exponent_rows(m, arr)
    return float(out[0]) if single else out


def exponent_rows(m: MevMixModel, x: np.ndarray) -> np.ndarray:
    """Unchecked exponent at the rows of ``x``, computed in ``x.dtype``."""
    out = np.zeros(x.shape[0], dtype=x.dtype)
    for comp in m.components:
        out += _component_exponent(comp, x)
    return out


def model_cdf(m: MevMixModel, u):
    """Copula of the mixture, ``exp(-l_Y(-log u))``."""
    arr, single = _check_unit_cube(u, m.d)
    out = np.exp(-model_exponent(m, neg_log(arr)))
    return float(out[0]) if single else out


def draw_frechet(m: MevMixModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` draws of Y from a single generator (no chunking), shape ``(n, d)``."""
    y = np.zeros((n, m.d))
    for comp in m.components:
        s = sample_positive_stable(comp.alpha, n, rng)
        e = comp.copula.sample_exponential(n, rng)
        # inverse of the conditional margin P(X <= x | s) = exp(-s (x/b)^(-1/a)):
        # X <= x  iff  E >= s (x/b)^(-1/a)  iff  b (s/E)^a <= x
        with np.errstate(over="ignore", invalid="ignore"):
            x = np.where(comp.beta > 0, comp.beta * (s[:, None] / e) ** comp.alpha, 0.0)
        np.maximum(y, x, out=y)
    return y


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def sample_model(
    m: MevMixModel,
    n: int,
    seed=None,
    *,
    threads: int | None = None,
    uniform: bool = False,
    chunk_size: int = CHUNK_SIZE,
) -> np.ndarray:
    """Draw ``n`` vectors from the mixture.

    Draws are produced in fixed-size chunks, chunk ``c`` using the ``c``-th
    child of ``SeedSequence(seed)``, so the output depends on ``seed`` only
    and not on ``threads``.

    Returns unit Frechet draws ``Y`` (shape ``(n, d)``), or their uniform
    transforms ``exp(-1/Y)`` when ``uniform`` is true.
    """
    m.ensure_valid()
    n = int(n)
    if n < 0:
        raise DomainError(f"sample count n={n} must be >= 0")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    sizes = [min(chunk_size, n - start) for start in range(0, n, chunk_size)]
    children = ss.spawn(len(sizes))

    def work(k):
        return draw_frechet(m, sizes[k], np.random.default_rng(children[k]))

    threads = threads or default_threads()
    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, range(len(sizes))))
    else:
        parts = [work(k) for k in range(len(sizes))]
    y = np.concatenate(parts) if parts else np.zeros((0, m.d))
    if uniform:
        with np.errstate(divide="ignore"):
            return np.exp(-1.0 / y)
    return y


def frechet_to_uniform(y: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.exp(-1.0 / np.asarray(y, dtype=float))


# Convenience constructors -------------------------------------------------


def make_generalized_archimedean(alpha: float, copula: MaxStableCopula) -> MevMixModel:
    """q = 1: a single component with unit weights."""
    return MevMixModel([MixtureComponent(alpha, np.ones(copula.d), copula)])


def make_logistic(d: int, alpha: float) -> MevMixModel:
    """Gumbel-Hougaard (symmetric logistic) copula built as a q = 1 mixture of independence."""
    return make_generalized_archimedean(alpha, Independence(d))


def make_asymmetric_logistic(alphas, betas) -> MevMixModel:
    """All component copulas independent; ``betas`` is q x d."""
    betas = np.atleast_2d(np.asarray(betas, dtype=float))
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    if betas.shape[0] != alphas.shape[0]:
        raise ShapeError(f"{alphas.shape[0]} alphas but {betas.shape[0]} beta rows")
    d = betas.shape[1]
    return MevMixModel([MixtureComponent(a, b, Independence(d)) for a, b in zip(alphas, betas)], d=d)


def make_tawn_model(subsets, d: int) -> MevMixModel:
    """Tawn's asymmetric logistic model: one independence component per subset.

    ``subsets`` is a sequence of ``(A, alpha_A, beta_A)`` where ``A`` is a
    :class:`SubsetMask` or an iterable of 0-based coordinates and ``beta_A``
    lists the weights of the coordinates in ``A`` in increasing order.
    Weights outside ``A`` are zero.
    """
    comps = []
    for a, alpha, weights in subsets:
        mask = a if isinstance(a, SubsetMask) else SubsetMask.from_indices(a, d)
        idx = mask.indices
        weights = np.atleast_1d(np.asarray(weights, dtype=float))
        if weights.shape != (len(idx),):
            raise ShapeError(f"subset {set(idx)} has {len(idx)} coordinates but {weights.size} weights")
        beta = np.zeros(d)
        beta[list(idx)] = weights
        comps.append(MixtureComponent(alpha, beta, Independence(d)))
    return MevMixModel(comps, d=d)


def make_geometric_mean(weights, alphas, copulas: Sequence[MaxStableCopula]) -> MevMixModel:
    """Weighted geometric mean of q = 1 models: ``beta_ji = weights[j]`` for every i."""
    weights = np.atleast_1d(np.asarray(weights, dtype=float))
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    if not (len(weights) == len(alphas) == len(copulas)):
        raise ShapeError("weights, alphas and copulas must have equal length")
    d = copulas[0].d
    return MevMixModel(
        [MixtureComponent(a, np.full(d, w), c) for w, a, c in zip(weights, alphas, copulas)], d=d
    )


def make_cuadras_auge(beta1: float, alpha: float = 0.5) -> MevMixModel:
    """``(u1 ^ u2)**beta1 * (u1 u2)**(1 - beta1)`` as a two-component geometric mean."""
    return make_geometric_mean([beta1, 1.0 - beta1], [alpha, 1.0], [Comonotone(2), Independence(2)])
