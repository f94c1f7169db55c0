"""Standard normal special functions and normal-family moments.

Everything here is tail-stable: the cdf and the inverse Mills ratio go
through ``erfc``/``erfcx`` so that ratios of two tiny tail probabilities
stay accurate far into the tails.  All functions accept scalars or numpy
arrays and return the same shape.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError

SQRT_2 = math.sqrt(2.0)
SQRT_2PI = math.sqrt(2.0 * math.pi)
SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
_DEEP_TAIL = 30.0


def _as_finite(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {x!r}", code="nonfinite")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


@dataclass(frozen=True)
class Probability:
    value: float

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0):
            raise DomainError(f"probability must lie in [0, 1], got {self.value}")

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class FoldedNormalParams:
    """Location ``mu`` and scale ``sigma`` of the normal being folded."""

    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")


def std_normal_pdf(x):
    x = _as_finite(x)
    return _out(np.exp(-0.5 * x * x) / SQRT_2PI)


def std_normal_cdf(x):
    """Phi(x), computed as erfc(-x/sqrt 2)/2 so the lower tail keeps full
    relative precision down to the subnormal range."""
    x = _as_finite(x)
    out = special.ndtr(x)
    deep = x < -_DEEP_TAIL
    if np.any(deep):
        # ndtr flushes to zero before the subnormal range ends
        xd = x[deep] if out.ndim else x
        tail = np.exp(np.log(0.5 * special.erfcx(-xd / SQRT_2)) - 0.5 * xd * xd)
        if out.ndim:
            out = out.copy()
            out[deep] = tail
        else:
            out = tail
    return _out(out)


def std_normal_sf(x):
    """Upper tail 1 - Phi(x) without cancellation."""
    return std_normal_cdf(-_as_finite(x))


def std_normal_quantile(p):
    """Inverse of Phi on the open interval (0, 1)."""
    arr = np.asarray(p, dtype=float)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise DomainError(f"quantile needs 0 < p < 1, got {p!r}")
    return _out(special.ndtri(arr))


def mills_ratio_inverse(x):
    """Hazard of the standard normal, phi(x) / (1 - Phi(x)).

    Uses phi(x)/Q(x) = sqrt(2/pi) / erfcx(x/sqrt 2), which has no
    cancellation for large positive x.  For very negative x the ratio
    underflows to 0, which is the correctly rounded value.
    """
    x = _as_finite(x)
    with np.errstate(over="ignore"):
        return _out(SQRT_2_OVER_PI / special.erfcx(x / SQRT_2))


def folded_normal_mean(params: FoldedNormalParams) -> float:
    """Mean of |X| for X ~ N(mu, sigma^2).

    Equal to |mu| + sqrt(2/pi) sigma exp(-mu^2/2sigma^2) - 2|mu| Phi(-|mu|/sigma),
    evaluated as |mu| plus :func:`folded_normal_excess`.
    """
    return abs(params.mu) + folded_normal_excess(params.mu, params.sigma)


def folded_normal_excess(mu, sigma):
    """E|X| - |mu| for X ~ N(mu, sigma^2), evaluated without cancellation.

    With t = |mu|/sigma the excess is sigma * (2 phi(t) - 2 t Q(t)), and
    phi(t) - t Q(t) = Q(t) (lambda(t) - t) keeps relative precision where
    the direct difference would lose it.
    """
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    t = abs(mu) / sigma
    if t < 1.0:
        return sigma * 2.0 * (float(std_normal_pdf(t)) - t * float(special.ndtr(-t)))
    return sigma * 2.0 * float(special.ndtr(-t)) * (mills_ratio_inverse(t) - t)


def truncated_normal_mean(mu, sigma, lower):
    """Mean of N(mu, sigma^2) conditioned on exceeding ``lower``.

    ``lower = -inf`` means no truncation.
    """
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if math.isnan(lower) or lower == math.inf:
        raise DomainError(f"lower bound must be < +inf, got {lower}")
    if lower == -math.inf:
        return float(mu)
    return mu + sigma * mills_ratio_inverse((lower - mu) / sigma)


def two_sided_critical(alpha):
    """z_{1-alpha/2}, computed from the lower tail as -Phi^{-1}(alpha/2) so
    small alpha keeps full precision."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    return -std_normal_quantile(alpha / 2.0)
