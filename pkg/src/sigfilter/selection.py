"""Winner's-curse quantities under the significance filter |b|/se > c.

The workhorse is :func:`g`, the conditional bias of |theta + Z| for a unit
standard error.  Everything else (bias on the original scale, exaggeration,
power) is a thin wrapper around it and the normal tail functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import DomainError
from .normal_core import (
    mills_ratio_inverse,
    std_normal_cdf,
    std_normal_pdf,
    std_normal_quantile,
    std_normal_sf,
    two_sided_critical,
)

_ALPHA_C_TOL = 1e-9


@dataclass(frozen=True)
class EffectEstimate:
    b: float
    se: float

    def __post_init__(self):
        if not self.se > 0:
            raise DomainError(f"se must be positive, got {self.se}")

    @property
    def z(self) -> float:
        return self.b / self.se


@dataclass(frozen=True)
class SelectionRule:
    """Keep an estimate when |b|/se exceeds ``c``.

    Build from a two-sided level with :meth:`from_alpha` or from a raw
    threshold with :meth:`from_c`; the other field is filled in and the two
    are checked against each other.
    """

    c: float
    alpha: float

    def __post_init__(self):
        if not (self.c >= 0 and math.isfinite(self.c)):
            raise DomainError(f"threshold c must be finite and >= 0, got {self.c}")
        if not (0.0 <= self.alpha <= 1.0):
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")
        implied = 2.0 * std_normal_sf(self.c)
        if abs(implied - self.alpha) > _ALPHA_C_TOL * max(self.alpha, 1e-300):
            raise DomainError(
                f"c={self.c} is inconsistent with alpha={self.alpha} (c implies alpha={implied})",
                code="inconsistent_rule",
            )

    @classmethod
    def from_alpha(cls, alpha: float) -> "SelectionRule":
        if not 0.0 < alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
        return cls(c=two_sided_critical(alpha), alpha=alpha)

    @classmethod
    def from_c(cls, c: float) -> "SelectionRule":
        if not (c >= 0 and math.isfinite(c)):
            raise DomainError(f"threshold c must be finite and >= 0, got {c}")
        return cls(c=float(c), alpha=2.0 * std_normal_sf(c))


@dataclass(frozen=True)
class Snr:
    value: float

    def __post_init__(self):
        if not self.value >= 0:
            raise DomainError(f"SNR must be >= 0, got {self.value}")

    def __float__(self):
        return float(self.value)


def _check_nonneg(name, x):
    x = float(x)
    if not (x >= 0 and math.isfinite(x)):
        raise DomainError(f"{name} must be finite and >= 0, got {x}")
    return x


def g(theta, c) -> float:
    """E(|theta + Z| - theta | |theta + Z| >= c) for Z standard normal.

    Closed form: [phi(c-t) + phi(c+t) - 2t Q(c+t)] / [Q(c-t) + Q(c+t)].
    When c > theta both tails can be tiny, so numerator and denominator
    are divided by phi(c-t) and written with inverse Mills ratios; the
    ratio phi(c+t)/phi(c-t) is exp(-2ct).
    """
    t = _check_nonneg("theta", float(theta))
    c = _check_nonneg("c", float(c))
    lo, hi = c - t, c + t
    if lo <= 0.0:
        num = std_normal_pdf(lo) + std_normal_pdf(hi) - 2.0 * t * std_normal_sf(hi)
        den = std_normal_sf(lo) + std_normal_sf(hi)
        return num / den
    r = math.exp(-2.0 * c * t)
    lam_lo = mills_ratio_inverse(lo)
    lam_hi = mills_ratio_inverse(hi)
    num = 1.0 + r * (1.0 - 2.0 * t / lam_hi)
    den = 1.0 / lam_lo + r / lam_hi
    return num / den


def _rule_c(rule) -> float:
    return rule.c if isinstance(rule, SelectionRule) else _check_nonneg("c", rule)


def conditional_bias(beta: float, se: float, rule) -> float:
    """E(|b| | beta, se, |b|/se > c) - |beta|.

    ``rule`` may be a :class:`SelectionRule` or a bare threshold c.
    """
    if not se > 0:
        raise DomainError(f"se must be positive, got {se}")
    return se * g(abs(beta) / se, _rule_c(rule))


def relative_bias(snr, c) -> float:
    return exaggeration_factor(snr, c) - 1.0


def exaggeration_factor(snr, c) -> float:
    """E(|b| | selection) / |beta|, a function of the SNR alone.

    Returns ``math.inf`` at snr == 0, where the ratio diverges.
    """
    s = _check_nonneg("snr", float(snr))
    if s == 0.0:
        return math.inf
    return 1.0 + g(s, c) / s


def power_from_snr(snr, alpha) -> float:
    """Power of the two-sided level-alpha z-test: Phi(s - z) + Q(s + z)."""
    s = _check_nonneg("snr", float(snr))
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    z = two_sided_critical(alpha)
    return std_normal_cdf(s - z) + std_normal_sf(s + z)


def snr_from_power(power, alpha, tol=1e-12) -> float:
    """Invert :func:`power_from_snr` on snr >= 0 with a bracketing root finder."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if not (alpha <= power < 1.0):
        raise DomainError(f"need alpha <= power < 1, got power={power}, alpha={alpha}")
    if power == alpha:
        return 0.0
    z = two_sided_critical(alpha)
    # power >= Phi(s - z), so s = z + quantile(power) brackets the root from above
    hi = max(z + std_normal_quantile(power), 1.0)
    while power_from_snr(hi, alpha) < power:
        hi *= 2.0
    return optimize.brentq(lambda s: power_from_snr(s, alpha) - power,
                           0.0, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)


@dataclass(frozen=True)
class ExaggerationCurve:
    """Rows of (snr, power, exaggeration) sorted by SNR."""

    snr: np.ndarray
    power: np.ndarray
    exaggeration: np.ndarray
    alpha: float

    def __len__(self):
        return len(self.snr)

    def rows(self):
        return list(zip(self.snr.tolist(), self.power.tolist(), self.exaggeration.tolist()))


def exaggeration_curve(snr_min, snr_max, n_points, alpha=0.05) -> ExaggerationCurve:
    """Exaggeration factor and power on an evenly spaced SNR grid."""
    if not (0 < snr_min < snr_max and math.isfinite(snr_max)):
        raise DomainError(f"need 0 < snr_min < snr_max, got ({snr_min}, {snr_max})",
                          code="bad_grid")
    if int(n_points) != n_points or n_points < 2:
        raise DomainError(f"n_points must be an integer >= 2, got {n_points}", code="bad_grid")
    rule = SelectionRule.from_alpha(alpha)
    snr = np.linspace(snr_min, snr_max, int(n_points))
    power = np.array([power_from_snr(s, alpha) for s in snr])
    exag = np.array([exaggeration_factor(s, rule.c) for s in snr])
    return ExaggerationCurve(snr=snr, power=power, exaggeration=exag, alpha=alpha)
