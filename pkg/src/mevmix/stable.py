"""Positive alpha-stable mixing variables.

The law sampled here is the one on (0, inf) with Laplace transform
``E exp(-t S) = exp(-t**alpha)``, ``0 < alpha <= 1``. Draws use Kanter's
representation

    S = sin(alpha U) / sin(U)**(1/alpha) * (sin((1-alpha) U) / E)**((1-alpha)/alpha)

with ``U ~ Uniform(0, pi)`` and ``E ~ Exp(1)``: exact, no rejection, two
uniforms per draw. ``alpha = 1`` is the point mass at 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError

MIN_CHECK_DRAWS = 10_000
FLOAT_FLOOR = 1e-15


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha={alpha!r} out of (0,1]")
    return alpha


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_positive_stable(alpha: float, size=None, rng=None):
    """Draw positive alpha-stable variables with Laplace transform exp(-t**alpha).

    Parameters
    ----------
    alpha : float
        Stability index in (0, 1].
    size : int or tuple, optional
        Output shape. ``None`` returns a Python float.
    rng : numpy.random.Generator or seed, optional

    Returns
    -------
    float or ndarray
        Positive draws. Extremely large draws may overflow to ``inf``; that
        is left alone since callers only use S inside ``exp(-x S)``.
    """
    alpha = check_alpha(alpha)
    rng = _as_generator(rng)
    shape = () if size is None else size
    if alpha == 1.0:
        out = np.ones(shape)
        return float(out) if size is None else out

    # 1 - random() lies in (0, 1], keeping U away from sin(U) = 0 at the origin
    u = math.pi * (1.0 - rng.random(shape))
    e = rng.standard_exponential(shape)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        log_s = (
            np.log(np.sin(alpha * u))
            - np.log(np.sin(u)) / alpha
            + (1.0 - alpha) / alpha * (np.log(np.sin((1.0 - alpha) * u)) - np.log(e))
        )
        out = np.exp(log_s)
    return float(out) if size is None else out


@dataclass(frozen=True)
class LaplaceCheckRow:
    t: float
    empirical: float
    exact: float
    stderr: float

    @property
    def passed(self) -> bool:
        # the floor absorbs rounding in the mean when S is degenerate (alpha = 1)
        return abs(self.empirical - self.exact) <= 3.0 * self.stderr + FLOAT_FLOOR

    def as_dict(self) -> dict:
        return {
            "t": self.t,
            "empirical": self.empirical,
            "exact": self.exact,
            "stderr": self.stderr,
            "passed": self.passed,
        }


def laplace_transform_check(alpha: float, t_values, n: int = 1_000_000, rng=None) -> list[LaplaceCheckRow]:
    """Compare the sample mean of exp(-t S) with exp(-t**alpha) at each t.

    One sample of size ``n`` is shared by all ``t``. A row passes when the
    deviation is at most three estimated standard errors.
    """
    alpha = check_alpha(alpha)
    if n < MIN_CHECK_DRAWS:
        raise ConfigurationError(f"n={n} too small for a Laplace check (need >= {MIN_CHECK_DRAWS})")
    ts = [float(t) for t in t_values]
    if not ts or any(not t > 0 for t in ts):
        raise ConfigurationError("t values must be a nonempty list of positive reals")
    s = sample_positive_stable(alpha, n, rng)
    rows = []
    for t in ts:
        v = np.exp(-t * s)
        rows.append(
            LaplaceCheckRow(
                t=t,
                empirical=float(v.mean()),
                exact=math.exp(-(t**alpha)),
                stderr=float(v.std(ddof=1) / math.sqrt(n)),
            )
        )
    return rows
