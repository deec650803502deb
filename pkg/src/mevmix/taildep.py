"""Upper orthant tail dependence coefficients.

For a max-stable copula the diagonal is exactly a power,
``C_B(u, ..., u) = u**l(1_B)``, so the joint exceedance probability of the
coordinates in A satisfies

    P(U_i > u, i in A) / (1 - u) -> mass(A) = sum_{0 != B <= A} (-1)**(|B|-1) l(1_B)

and ``lambda_J = mass(D) / mass(J)``. No limit has to be taken numerically.

The alternating sums cancel heavily when masses are small (e.g. alpha close
to 1), so every inclusion-exclusion is carried out in ``np.longdouble``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .copulas import M4, Independence
from .errors import ConfigurationError, DomainError, ShapeError
from .model import MevMixModel, exponent_rows, frechet_to_uniform, make_asymmetric_logistic
from .subsets import SubsetMask

# loss of more than this many significant digits to cancellation flags a mass
CANCELLATION_DIGITS = 6
EXT = np.longdouble
ZERO_ULPS = 64
MIN_EMPIRICAL_N = 10_000


@dataclass(frozen=True)
class Mass:
    """Inclusion-exclusion total with its positive and negative partial sums."""

    value: float
    positive: float
    negative: float

    @property
    def cancellation(self) -> float:
        """Ratio of the largest partial sum to the result; 1 means no cancellation."""
        big = max(self.positive, self.negative)
        if big == 0:
            return 1.0
        return big / abs(self.value) if self.value else math.inf

    @property
    def ill_conditioned(self) -> bool:
        # an exact (snapped) zero is reported through the degenerate path instead
        return self.value != 0 and self.cancellation > 10.0**CANCELLATION_DIGITS


@dataclass
class TailDepReport:
    J: SubsetMask
    method: str  # analytic-generic | analytic-closed-form | empirical
    lambda_: float
    numerator_mass: float
    denominator_mass: float
    degenerate: bool = False
    ill_conditioned: bool = False
    threshold: float | None = None
    n: int | None = None
    stderr: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def value(self) -> float:
        return self.lambda_

    def to_dict(self) -> dict:
        return {
            "J": [i + 1 for i in self.J.indices],
            "d": self.J.d,
            "method": self.method,
            "lambda": _json_float(self.lambda_),
            "numerator_mass": _json_float(self.numerator_mass),
            "denominator_mass": _json_float(self.denominator_mass),
            "degenerate": self.degenerate,
            "ill_conditioned": self.ill_conditioned,
            "threshold": self.threshold,
            "n": self.n,
            "stderr": _json_float(self.stderr),
            "notes": list(self.notes),
        }


CSV_FIELDS = ["J", "method", "lambda", "numerator_mass", "denominator_mass", "degenerate",
              "ill_conditioned", "threshold", "n", "stderr"]


def report_csv_row(r: TailDepReport) -> dict:
    d = r.to_dict()
    row = {k: d.get(k) for k in CSV_FIELDS}
    row["J"] = " ".join(str(i) for i in d["J"])
    return row


def _json_float(v):
    if v is None or math.isfinite(v):
        return v
    return None


def _mask(m_or_d, J) -> SubsetMask:
    d = m_or_d if isinstance(m_or_d, int) else m_or_d.d
    if isinstance(J, SubsetMask):
        if J.d != d:
            raise ShapeError(f"subset dimension {J.d} does not match d={d}")
        return J
    return SubsetMask.from_indices(J, d)


def inclusion_exclusion(values_by_subset, a: SubsetMask) -> Mass:
    """Alternating sum over nonempty B <= A of ``values_by_subset(B)``.

    ``values_by_subset`` receives the list of submasks and returns an array
    of their values.
    """
    subs = list(a.submasks())
    vals = np.asarray(values_by_subset(subs), dtype=EXT)
    signs = np.array([1 if len(b) % 2 else -1 for b in subs])
    pos = np.sum(vals[signs > 0])
    neg = np.sum(vals[signs < 0])
    total = pos - neg
    # inside the rounding bound of the alternating sum the mass is exactly zero
    if abs(total) <= ZERO_ULPS * len(subs) * np.finfo(EXT).eps * max(pos, neg):
        total = EXT(0)
    return Mass(float(total), float(pos), float(neg))


def orthant_mass_detail(m: MevMixModel, a) -> Mass:
    m.ensure_valid()
    a = _mask(m, a)

    def values(subs):
        m._ensure_evaluable()
        return exponent_rows(m, np.array([b.indicator() for b in subs], dtype=EXT))

    return inclusion_exclusion(values, a)


def orthant_mass(m: MevMixModel, a) -> float:
    """Limit of P(all coordinates in A exceed u) / (1 - u) as u -> 1."""
    return orthant_mass_detail(m, a).value


def _ratio_report(num: Mass, den: Mass, J: SubsetMask, method: str) -> TailDepReport:
    notes = []
    degenerate = not den.value > 0
    if degenerate:
        lam = math.nan
        notes.append("denominator mass is not positive; lambda undefined")
    else:
        lam = num.value / den.value
    ill = num.ill_conditioned or den.ill_conditioned
    if ill:
        notes.append(
            f"cancellation in inclusion-exclusion (factors {num.cancellation:.3g}, {den.cancellation:.3g})"
        )
    return TailDepReport(J, method, lam, num.value, den.value, degenerate, ill, notes=notes)


def orthant_lambda(m: MevMixModel, J) -> TailDepReport:
    """lambda_J = mass(D) / mass(J) through the generic exponent engine."""
    J = _mask(m, J)
    num = orthant_mass_detail(m, SubsetMask.full(m.d))
    den = orthant_mass_detail(m, J) if J.bits != SubsetMask.full(m.d).bits else num
    return _ratio_report(num, den, J, "analytic-generic")


def _check_logistic_params(alphas, betas):
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    betas = np.atleast_2d(np.asarray(betas, dtype=float))
    # validation is shared with the model so violations read the same
    make_asymmetric_logistic(alphas, betas).ensure_valid()
    return alphas, betas


def _logistic_mass(alphas, betas, a: SubsetMask) -> Mass:
    def values(subs):
        out = []
        for b in subs:
            idx = list(b.indices)
            total = EXT(0)
            for alpha, row in zip(alphas, betas):
                w = row[idx].astype(EXT)
                total += np.sum(w ** (1.0 / alpha)) ** alpha
            out.append(total)
        return out

    return inclusion_exclusion(values, a)


def orthant_lambda_logistic(alphas, betas, J) -> TailDepReport:
    """Closed form for independence components: masses from (sum_i beta_ji**(1/alpha_j))**alpha_j."""
    alphas, betas = _check_logistic_params(alphas, betas)
    d = betas.shape[1]
    J = _mask(d, J)
    num = _logistic_mass(alphas, betas, SubsetMask.full(d))
    den = _logistic_mass(alphas, betas, J)
    return _ratio_report(num, den, J, "analytic-closed-form")


def _pair(m: MevMixModel, s: int, t: int) -> tuple[int, int]:
    s, t = int(s), int(t)
    if s == t:
        raise DomainError(f"bivariate lambda needs two distinct coordinates, got s=t={s}")
    for i in (s, t):
        if not 0 <= i < m.d:
            raise DomainError(f"coordinate {i} outside 0..{m.d - 1}")
    return s, t


def m4_bivariate_lambda(m: MevMixModel, s: int, t: int) -> float:
    """2 - sum_j (sum_{l,k} a_lks beta_js**(1/alpha_j) v a_lkt beta_jt**(1/alpha_j))**alpha_j.

    The power alpha_j applies to the whole (l, k) sum, as in the singleton
    numerator; for alpha_j = 1 this is Heffernan et al.'s
    ``2 - sum_{l,k} a_lks v a_lkt``.
    """
    m.ensure_valid()
    s, t = _pair(m, s, t)
    total = 0.0
    for comp in m.components:
        if not isinstance(comp.copula, M4):
            raise DomainError("m4_bivariate_lambda needs every component copula to be M4")
        a = comp.copula.terms.astype(EXT)
        ws = a[:, s] * EXT(comp.beta[s]) ** (1.0 / comp.alpha)
        wt = a[:, t] * EXT(comp.beta[t]) ** (1.0 / comp.alpha)
        total += np.sum(np.maximum(ws, wt)) ** comp.alpha
    return float(2 - total)


def m4_singleton_numerator(m: MevMixModel) -> float:
    """sum_j sum_{A <= D} (-1)**(|A|-1) (sum_{l,k} max_{i in A} a_lki beta_ji**(1/alpha_j))**alpha_j."""
    m.ensure_valid()
    for comp in m.components:
        if not isinstance(comp.copula, M4):
            raise DomainError("m4_singleton_numerator needs every component copula to be M4")

    def values(subs):
        out = []
        for b in subs:
            idx = list(b.indices)
            total = EXT(0)
            for comp in m.components:
                w = comp.copula.terms[:, idx].astype(EXT) * comp.beta[idx].astype(EXT) ** (1.0 / comp.alpha)
                total += np.sum(w.max(axis=1)) ** comp.alpha
            out.append(total)
        return out

    return inclusion_exclusion(values, SubsetMask.full(m.d)).value


def bivariate_lambda(m: MevMixModel, s: int, t: int) -> float:
    """Upper tail dependence of the pair (Y_s, Y_t), via the matching closed form."""
    m.ensure_valid()
    s, t = _pair(m, s, t)
    kinds = {type(c.copula) for c in m.components}
    if kinds == {Independence}:
        return 2.0 - sum(
            (c.beta[s] ** (1.0 / c.alpha) + c.beta[t] ** (1.0 / c.alpha)) ** c.alpha for c in m.components
        )
    if kinds == {M4}:
        return m4_bivariate_lambda(m, s, t)
    if m.q == 1:
        # lambda = 2 - (2 - lambda_C1)**alpha with lambda_C1 = 2 - l_1(1, 1)
        comp = m.components[0]
        pair = np.zeros(m.d)
        pair[[s, t]] = 1.0
        lam_c1 = 2.0 - comp.copula.exponent(pair)
        return 2.0 - (2.0 - lam_c1) ** comp.alpha
    return orthant_mass(m, SubsetMask.from_indices((s, t), m.d))


def empirical_lambda(samples, J, u: float = 0.99, transform: str = "frechet") -> TailDepReport:
    """Estimate lambda_J as #{all coordinates exceed u} / #{coordinates in J exceed u}.

    ``transform`` maps samples to uniform scale: ``"frechet"`` applies the
    exact unit Frechet CDF (model output), ``"uniform"`` uses the values as
    given, ``"rank"`` uses normalized ranks ``rank / (n + 1)`` per column.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim != 2:
        raise ShapeError(f"samples must be an n x d matrix, got shape {x.shape}")
    n, d = x.shape
    J = _mask(d, J)
    if n < MIN_EMPIRICAL_N:
        raise ConfigurationError(f"n={n} too small for empirical lambda (need >= {MIN_EMPIRICAL_N})")
    if not 0.0 < u < 1.0:
        raise ConfigurationError(f"threshold u={u} must lie in (0,1)")
    if transform == "frechet":
        v = frechet_to_uniform(x)
    elif transform == "uniform":
        v = x
    elif transform == "rank":
        v = (np.argsort(np.argsort(x, axis=0, kind="stable"), axis=0) + 1.0) / (n + 1.0)
    else:
        raise ConfigurationError(f"unknown marginal transform {transform!r}")
    exceed = v > u
    in_j = exceed[:, list(J.indices)].all(axis=1)
    den = int(in_j.sum())
    num = int((in_j & exceed.all(axis=1)).sum())
    report = TailDepReport(J, "empirical", math.nan, num / n, den / n, threshold=float(u), n=n)
    if den == 0:
        report.degenerate = True
        report.notes.append("no exceedances in J; estimate undefined")
        return report
    lam = num / den
    report.lambda_ = lam
    report.stderr = math.sqrt(lam * (1.0 - lam) / den)
    return report
