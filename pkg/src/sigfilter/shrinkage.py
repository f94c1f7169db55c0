"""Normal-prior shrinkage and how it behaves under the significance filter.

Model: beta ~ N(0, tau^2), b | beta ~ N(beta, se^2).  Thresholds passed as
``c`` in this module apply to |b| itself (not |b|/se); divide by se to get
the matching :class:`~sigfilter.selection.SelectionRule`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

from .errors import DomainError, FilterTooExtremeError, QuadratureError
from .normal_core import (
    SQRT_2_OVER_PI,
    FoldedNormalParams,
    folded_normal_excess,
    mills_ratio_inverse,
    std_normal_pdf,
    std_normal_sf,
    truncated_normal_mean,
)
from .selection import EffectEstimate

GAP_RTOL = 1e-10


@dataclass(frozen=True)
class NormalPrior:
    tau: float

    def __post_init__(self):
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise DomainError(f"tau must be positive, got {self.tau}")


@dataclass(frozen=True)
class Posterior:
    b_star: float
    v: float

    def __post_init__(self):
        if not self.v > 0:
            raise DomainError(f"posterior variance must be positive, got {self.v}")

    @property
    def s(self) -> float:
        return math.sqrt(self.v)


def _check_se(se):
    if not (se > 0 and math.isfinite(se)):
        raise DomainError(f"se must be positive, got {se}")


def shrink_factor(se, prior: NormalPrior) -> float:
    """tau^2 / (se^2 + tau^2)."""
    _check_se(se)
    return prior.tau ** 2 / (se ** 2 + prior.tau ** 2)


def posterior(est: EffectEstimate, prior: NormalPrior) -> Posterior:
    se2, tau2 = est.se ** 2, prior.tau ** 2
    return Posterior(b_star=tau2 * est.b / (se2 + tau2), v=se2 * tau2 / (se2 + tau2))


def bias_decomposition(se, prior: NormalPrior, beta=None, b=None):
    """Biases of b and b* given the parameter and given the data.

    Returns ``(E(b-beta|beta), E(b*-beta|beta), E(b-beta|b), E(b*-beta|b))``.
    The second slot needs ``beta`` and the third needs ``b``; a slot whose
    input is missing is ``nan``.  The first and last are identically zero.
    """
    _check_se(se)
    k = se ** 2 / (se ** 2 + prior.tau ** 2)
    freq_shrunk = -k * beta if beta is not None else math.nan
    bayes_raw = k * b if b is not None else math.nan
    return 0.0, freq_shrunk, bayes_raw, 0.0


def marginal_abs_means(se, prior: NormalPrior):
    """(E|b*|, E|beta|, E|b|) under the joint model, all half-normal means."""
    _check_se(se)
    tau = prior.tau
    m = math.hypot(se, tau)
    return tau * tau / m * SQRT_2_OVER_PI, tau * SQRT_2_OVER_PI, m * SQRT_2_OVER_PI


def bias_comparison(se, prior: NormalPrior):
    """(E|b| - E|beta|, E|beta| - E|b*|): overshoot of b, undershoot of b*."""
    _check_se(se)
    tau = prior.tau
    m = math.hypot(se, tau)
    # m - tau = se^2/(m + tau) avoids cancellation when se << tau
    d = se * se / (m + tau)
    return d * SQRT_2_OVER_PI, tau * d / m * SQRT_2_OVER_PI


def posterior_abs_gap(post: Posterior) -> float:
    """E(|beta| | data) - |b*|, the folded-normal excess at (b*, s)."""
    return folded_normal_excess(post.b_star, post.s)


def rosenbaum_mean(se, prior: NormalPrior, c) -> float:
    """E(beta | b > c) for the bivariate normal (beta, b).

    tau^2 phi(c/m) / (m (1 - Phi(c/m))) with m = sqrt(se^2 + tau^2).
    """
    _check_se(se)
    m = math.hypot(se, prior.tau)
    return prior.tau ** 2 / m * mills_ratio_inverse(c / m)


def _check_threshold(c):
    if not (c >= 0 and math.isfinite(c)):
        raise DomainError(f"threshold c must be finite and >= 0, got {c}")


def selected_abs_shrunk_mean(se, prior: NormalPrior, c) -> float:
    """E(|b*| | |b| > c) via the truncated marginal of b."""
    _check_se(se)
    _check_threshold(c)
    m = math.hypot(se, prior.tau)
    if std_normal_sf(c / m) == 0.0:
        raise FilterTooExtremeError(f"P(|b| > {c}) underflows")
    return shrink_factor(se, prior) * truncated_normal_mean(0.0, m, c)


def _negative_part_mean(se, prior: NormalPrior, c) -> float:
    """E(max(-beta, 0) | b > c).

    Outer integral over the truncated marginal of b, written as b = c + y
    with density (lambda(c/m)/m) exp(-c y/m^2 - y^2/2m^2) so nothing
    underflows for large c.  Inner expectation over beta | b ~ N(b*, s^2)
    is the normal partial moment s (phi(t) - t Q(t)), t = b*/s.
    """
    tau = prior.tau
    m = math.hypot(se, tau)
    k = tau * tau / (m * m)
    s = se * tau / m
    if std_normal_sf(c / m) == 0.0:
        raise FilterTooExtremeError(f"P(|b| > {c}) underflows")
    lead = mills_ratio_inverse(c / m) / m

    def integrand(y):
        w = lead * math.exp(-c * y / (m * m) - 0.5 * (y / m) ** 2)
        if w == 0.0:
            return 0.0
        return 0.5 * folded_normal_excess(k * (c + y), s) * w

    # the integrand decays on the scale min(m, m^2/c)
    scale = m if c <= m else m * m / c
    pieces = [0.0] + [scale * t for t in (1, 4, 16, 64)] + [math.inf]
    total = 0.0
    for lo, hi in zip(pieces[:-1], pieces[1:]):
        val, err, info, *msg = integrate.quad(integrand, lo, hi, epsabs=0.0,
                                              epsrel=GAP_RTOL, limit=200, full_output=1)
        if msg and err > 1e-8 * max(abs(val), 1e-300) and err > 1e-300:
            raise QuadratureError(f"negative-part integral on [{lo}, {hi}] did not converge",
                                  achieved=err)
        total += val
    return total


def selected_abs_means(se, prior: NormalPrior, c):
    """(E|b*|, E|beta|, E|b|) conditional on |b| > c."""
    _check_se(se)
    _check_threshold(c)
    m = math.hypot(se, prior.tau)
    shrunk = selected_abs_shrunk_mean(se, prior, c)
    abs_beta = rosenbaum_mean(se, prior, c) + 2.0 * _negative_part_mean(se, prior, c)
    return shrunk, abs_beta, truncated_normal_mean(0.0, m, c)


def selected_shrinkage_gap(se, prior: NormalPrior, c) -> float:
    """E(|b*| - |beta| | |b| > c).

    The truncated-mean term equals E(beta | b > c) exactly (Rosenbaum), so
    the gap reduces to -2 E(max(-beta, 0) | b > c): never positive, and
    vanishing as c grows.
    """
    _check_se(se)
    _check_threshold(c)
    return -2.0 * _negative_part_mean(se, prior, c)


def selected_raw_gap(se, prior: NormalPrior, c) -> float:
    """E(|b| - |beta| | |b| > c)."""
    _, abs_beta, abs_b = selected_abs_means(se, prior, c)
    return abs_b - abs_beta
