"""Max-stable component copulas.

Every copula is represented by its exponent (stable tail dependence)
function ``l(x) = -log C(exp(-x_1), ..., exp(-x_d))``; the CDF is a thin
wrapper. Samplers return the copula sample on the exponential scale
``E_i = -log U_i`` because that is what the mixture sampler consumes, and
it keeps full precision near ``U_i = 1``.
"""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np

from .errors import DomainError, ShapeError, UnsupportedOperationError
from .subsets import MAX_DIM, SubsetMask

COLUMN_SUM_TOL = 1e-12


def _as_points(x, d: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.ndim != 2 or arr.shape[1] != d:
        raise ShapeError(f"expected points of dimension {d}, got shape {np.shape(x)}")
    return arr, single


def _check_exponent_args(x, d: int) -> tuple[np.ndarray, bool]:
    arr, single = _as_points(x, d)
    if np.isnan(arr).any() or (arr < 0).any():
        raise DomainError("exponent arguments must be nonnegative")
    return arr, single


def _check_unit_cube(u, d: int) -> tuple[np.ndarray, bool]:
    arr, single = _as_points(u, d)
    if np.isnan(arr).any() or (arr < 0).any() or (arr > 1).any():
        raise DomainError("copula arguments must lie in [0,1]^d")
    return arr, single


def neg_log(u: np.ndarray) -> np.ndarray:
    """``-log u`` with ``-log 0 = inf`` and no warnings."""
    with np.errstate(divide="ignore"):
        return -np.log(u)


class MaxStableCopula(ABC):
    """Base class for max-stable copulas of dimension ``d``."""

    kind: str = ""

    def __init__(self, d: int):
        self.d = int(d)
        if self.d < 1:
            raise DomainError(f"dimension d={d} must be >= 1")

    # subclasses work on validated (n, d) arrays
    @abstractmethod
    def _exponent(self, x: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _subcopula(self, idx: tuple[int, ...]) -> MaxStableCopula: ...

    @abstractmethod
    def _sample_exponential(self, n: int, rng: np.random.Generator) -> np.ndarray: ...

    @abstractmethod
    def to_dict(self) -> dict: ...

    def exponent(self, x):
        """Evaluate l(x) at one point (shape ``(d,)``) or many (``(n, d)``).

        ``inf`` coordinates are allowed and stand for a zero copula argument.
        """
        arr, single = _check_exponent_args(x, self.d)
        out = self._exponent(arr)
        return float(out[0]) if single else out

    def cdf(self, u):
        arr, single = _check_unit_cube(u, self.d)
        out = np.exp(-self._exponent(neg_log(arr)))
        return float(out[0]) if single else out

    def subcopula(self, a: SubsetMask) -> MaxStableCopula:
        if not isinstance(a, SubsetMask):
            a = SubsetMask.from_indices(a, self.d)
        if a.d != self.d:
            raise ShapeError(f"mask dimension {a.d} does not match copula dimension {self.d}")
        return self._subcopula(a.indices)

    def sample_exponential(self, n: int, rng=None) -> np.ndarray:
        """``n`` draws of ``-log U`` where U has this copula; entries in (0, inf)."""
        rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        e = self._sample_exponential(n, rng)
        # probability-zero edges (U = 0 or 1): redraw the affected rows
        bad = ~((e > 0) & np.isfinite(e)).all(axis=1)
        while bad.any():
            e[bad] = self._sample_exponential(int(bad.sum()), rng)
            bad = ~((e > 0) & np.isfinite(e)).all(axis=1)
        return e

    def sample(self, n: int, rng=None) -> np.ndarray:
        """``n`` draws from the copula, shape ``(n, d)``, uniform margins."""
        return np.exp(-self.sample_exponential(n, rng))

    def validate(self, top_level: bool = True) -> list[str]:
        problems = []
        if not 1 <= self.d <= MAX_DIM:
            problems.append(f"dimension d={self.d} outside [1, {MAX_DIM}]")
        return problems

    def __eq__(self, other):
        return type(self) is type(other) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self.to_dict()))

    def __repr__(self):
        return f"{type(self).__name__}(d={self.d})"


class Independence(MaxStableCopula):
    kind = "independence"

    def _exponent(self, x):
        return x.sum(axis=1)

    def _subcopula(self, idx):
        return Independence(len(idx))

    def _sample_exponential(self, n, rng):
        return rng.standard_exponential((n, self.d))

    def to_dict(self):
        return {"kind": self.kind}


class Comonotone(MaxStableCopula):
    kind = "comonotone"

    def _exponent(self, x):
        return x.max(axis=1)

    def _subcopula(self, idx):
        return Comonotone(len(idx))

    def _sample_exponential(self, n, rng):
        return np.repeat(rng.standard_exponential((n, 1)), self.d, axis=1)

    def to_dict(self):
        return {"kind": self.kind}


class GumbelLogistic(MaxStableCopula):
    """Gumbel-Hougaard (logistic) copula, ``l(x) = (sum x_i**(1/r))**r``."""

    kind = "gumbel"

    def __init__(self, d: int, r: float):
        super().__init__(d)
        self.r = float(r)

    def _exponent(self, x):
        return _power_sum(x, self.r)

    def _subcopula(self, idx):
        return GumbelLogistic(len(idx), self.r)

    def _sample_exponential(self, n, rng):
        # a q=1 mixture of independence with alpha=r is exactly this copula
        from .model import MevMixModel, MixtureComponent, draw_frechet

        if not 0.0 < self.r <= 1.0:
            raise UnsupportedOperationError(f"cannot sample GumbelLogistic with r={self.r}")
        mix = MevMixModel([MixtureComponent(self.r, np.ones(self.d), Independence(self.d))])
        with np.errstate(divide="ignore"):
            return 1.0 / draw_frechet(mix, n, rng)

    def validate(self, top_level=True):
        problems = super().validate(top_level)
        if not 0.0 < self.r <= 1.0:
            problems.append(f"gumbel r={self.r} out of (0,1]")
        return problems

    def to_dict(self):
        return {"kind": self.kind, "r": self.r}

    def __repr__(self):
        return f"GumbelLogistic(d={self.d}, r={self.r})"


class M4(MaxStableCopula):
    """Copula of a multivariate moving-maxima process.

    ``a`` has shape ``(L, K, d)``: lag-family ``l``, shift ``k`` (flattened
    from ``-K..K`` to ``0..2K``) and coordinate ``i``. The exponent is
    ``l(x) = sum_{l,k} max_i a[l,k,i] x_i``. A top-level M4 copula needs
    every column ``a[:, :, i]`` to sum to one; subcopulas are ``derived``
    and may fall short.
    """

    kind = "m4"

    def __init__(self, a, derived: bool = False):
        a = np.array(a, dtype=float)
        if a.ndim == 2:
            a = a[None]
        if a.ndim != 3 or a.shape[2] < 1:
            raise ShapeError(f"M4 coefficients must have shape (L, K, d), got {a.shape}")
        super().__init__(a.shape[2])
        self.a = a
        self.a.setflags(write=False)
        self.derived = bool(derived)

    @property
    def terms(self) -> np.ndarray:
        """Coefficients flattened over (l, k): shape ``(L*K, d)``."""
        return self.a.reshape(-1, self.d)

    def column_sums(self) -> np.ndarray:
        return self.terms.sum(axis=0)

    def _exponent(self, x):
        a = self.terms
        # a = 0 against x = inf contributes 0, not nan
        with np.errstate(invalid="ignore"):
            prod = np.where(a[None, :, :] > 0, a[None, :, :] * x[:, None, :], 0.0)
        return prod.max(axis=2).sum(axis=1)

    def _subcopula(self, idx):
        derived = self.derived or len(idx) < self.d
        return M4(self.a[:, :, list(idx)], derived=derived)

    def _sample_exponential(self, n, rng):
        if self.derived:
            raise UnsupportedOperationError("cannot sample a derived (column-deficient) M4 subcopula")
        a = self.terms
        # Y_i = max_t a[t,i] Z_t with Z_t unit Frechet, so -log U_i = 1/Y_i = min_t E_t / a[t,i]
        e = rng.standard_exponential((n, a.shape[0]))
        with np.errstate(divide="ignore"):
            ratio = np.where(a[None, :, :] > 0, e[:, :, None] / a[None, :, :], np.inf)
        return ratio.min(axis=1)

    def validate(self, top_level=True):
        problems = super().validate(top_level)
        if not np.isfinite(self.a).all():
            problems.append("m4 coefficients must be finite")
        neg = np.argwhere(self.a < 0)
        if len(neg):
            l, k, i = neg[0]
            problems.append(f"m4 coefficient a[{l}][{k}][{i}]={float(self.a[l, k, i])!r} is negative")
        if top_level and not self.derived:
            for i, s in enumerate(self.column_sums()):
                if abs(s - 1.0) > COLUMN_SUM_TOL:
                    problems.append(f"m4 column {i + 1} sums to {float(s)!r}, expected 1")
        return problems

    def to_dict(self):
        return {"kind": self.kind, "a": self.a.tolist()}

    def __repr__(self):
        return f"M4(shape={self.a.shape}, derived={self.derived})"


def _power_sum(x: np.ndarray, r: float) -> np.ndarray:
    """Row-wise ``(sum_i x_i**(1/r))**r`` scaled by the row max to avoid overflow."""
    m = x.max(axis=1)
    out = m.copy()
    ok = (m > 0) & np.isfinite(m)
    if ok.any():
        z = x[ok] / m[ok, None]
        out[ok] = m[ok] * np.sum(z ** (1.0 / r), axis=1) ** r
    return out


def from_dict(spec: dict, d: int) -> MaxStableCopula:
    """Build a copula from its JSON description, e.g. ``{"kind": "gumbel", "r": 0.5}``."""
    kind = spec.get("kind")
    if kind == "independence":
        return Independence(d)
    if kind == "comonotone":
        return Comonotone(d)
    if kind == "gumbel":
        if "r" not in spec:
            raise DomainError("gumbel copula needs 'r'")
        return GumbelLogistic(d, spec["r"])
    if kind == "m4":
        if "a" not in spec:
            raise DomainError("m4 copula needs 'a'")
        c = M4(spec["a"])
        if c.d != d:
            raise ShapeError(f"m4 coefficients have dimension {c.d}, model has d={d}")
        return c
    raise DomainError(f"unknown copula kind {kind!r}")


# functional aliases mirroring the method names
def exponent(c: MaxStableCopula, x):
    return c.exponent(x)


def cdf(c: MaxStableCopula, u):
    return c.cdf(u)


def subcopula(c: MaxStableCopula, a) -> MaxStableCopula:
    return c.subcopula(a)


def sample(c: MaxStableCopula, n: int, rng=None) -> np.ndarray:
    return c.sample(n, rng)


def validate(c: MaxStableCopula) -> list[str]:
    return c.validate()
