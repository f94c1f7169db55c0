"""Coverage of the usual z-interval once results are filtered on |b|/se > c.

Two views: fixed SNR (:func:`conditional_coverage`) and SNR drawn from a
decreasing density (:func:`marginal_conditional_coverage`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import DomainError, FilterTooExtremeError, QuadratureError
from .normal_core import (
    SQRT_2_OVER_PI,
    std_normal_cdf,
    std_normal_quantile,
    std_normal_sf,
    two_sided_critical,
)

QUAD_RTOL = 1e-9
TAIL_MASS = 1e-10


@dataclass(frozen=True)
class CoverageReport:
    nominal: float
    conditional: float
    gap: float = field(init=False)

    def __post_init__(self):
        if not 0.0 <= self.conditional <= 1.0:
            raise DomainError(f"conditional coverage outside [0, 1]: {self.conditional}")
        object.__setattr__(self, "gap", self.nominal - self.conditional)


def _interval_prob(lo, hi, mu):
    """P(lo < X < hi) for X ~ N(mu, 1), using whichever tail is smaller."""
    if hi <= lo:
        return 0.0
    a, b = lo - mu, hi - mu
    if a > 0.0:
        return std_normal_sf(a) - std_normal_sf(b) if math.isfinite(b) else std_normal_sf(a)
    if b == math.inf:
        return std_normal_sf(a)
    if a == -math.inf:
        return std_normal_cdf(b)
    return std_normal_cdf(b) - std_normal_cdf(a)


def _coverage_parts(snr, z, c):
    """(P(cover and selected), P(selected)) at a fixed SNR."""
    lo, hi = snr - z, snr + z
    if c == 0.0:
        covered = _interval_prob(lo, hi, snr)
    else:
        covered = (_interval_prob(max(lo, c), hi, snr)
                   + _interval_prob(lo, min(hi, -c), snr))
    selected = std_normal_sf(c - snr) + std_normal_cdf(-c - snr)
    return covered, selected


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")


def _check_c(c):
    if not (c >= 0 and math.isfinite(c)):
        raise DomainError(f"threshold c must be finite and >= 0, got {c}")


def conditional_coverage(snr, alpha, c) -> CoverageReport:
    """P(|b - beta|/se < z_{1-alpha/2} | |b|/se > c) at a fixed SNR."""
    snr = float(snr)
    if not snr >= 0:
        raise DomainError(f"SNR must be >= 0, got {snr}")
    _check_alpha(alpha)
    _check_c(c)
    z = two_sided_critical(alpha)
    covered, selected = _coverage_parts(snr, z, float(c))
    if selected == 0.0:
        raise FilterTooExtremeError(f"P(|X| > {c}) underflows at snr={snr}")
    return CoverageReport(nominal=1.0 - alpha, conditional=min(covered / selected, 1.0))


def theorem2_gap(snr, alpha) -> float:
    """Nominal minus conditional coverage when the filter is the test itself
    (c = z_{1-alpha/2}); positive for every snr below that threshold."""
    _check_alpha(alpha)
    return conditional_coverage(snr, alpha, two_sided_critical(alpha)).gap


def boundary_gap(alpha) -> float:
    """Coverage gap at snr = c = z in closed form.

    With D = Phi(-2z)/(2 Phi(-z)) - Phi(-2z), the excess of P(|X|>z) given
    non-coverage over its unconditional value, the gap is alpha * D / P(|X|>z)
    and P(|X|>z) = 1/2 + Phi(-2z).
    """
    _check_alpha(alpha)
    z = two_sided_critical(alpha)
    p2 = std_normal_cdf(-2.0 * z)
    d = p2 / (2.0 * std_normal_cdf(-z)) - p2
    return alpha * d / (0.5 + p2)


class SnrDensity:
    """A nonincreasing density for the SNR on [0, inf).

    Use the constructors :meth:`exponential`, :meth:`half_normal` and
    :meth:`piecewise_constant`.  The density is checked to be nonincreasing
    and to integrate to one when built.
    """

    def __init__(self, family, params, pdf, cdf, ppf, upper, breakpoints=()):
        self.family = family
        self.params = dict(params)
        self._pdf = pdf
        self._cdf = cdf
        self._ppf = ppf
        self.upper = float(upper)
        self.breakpoints = tuple(breakpoints)
        self._validate()

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"SnrDensity.{self.family}({args})"

    @classmethod
    def exponential(cls, rate):
        if not (rate > 0 and math.isfinite(rate)):
            raise DomainError(f"rate must be positive, got {rate}")
        return cls(
            "exponential", {"rate": rate},
            pdf=lambda s: rate * np.exp(-rate * s),
            cdf=lambda s: -np.expm1(-rate * s),
            ppf=lambda u: -np.log1p(-u) / rate,
            upper=math.log(1.0 / TAIL_MASS) / rate,
        )

    @classmethod
    def half_normal(cls, scale):
        if not (scale > 0 and math.isfinite(scale)):
            raise DomainError(f"scale must be positive, got {scale}")
        return cls(
            "half_normal", {"scale": scale},
            pdf=lambda s: SQRT_2_OVER_PI / scale * np.exp(-0.5 * (s / scale) ** 2),
            cdf=lambda s: 1.0 - 2.0 * std_normal_sf(np.asarray(s) / scale),
            # (1+u)/2 loses nothing for u in [0, 1)
            ppf=lambda u: scale * std_normal_quantile(0.5 + 0.5 * np.asarray(u)),
            upper=scale * -std_normal_quantile(TAIL_MASS / 2.0),
        )

    @classmethod
    def piecewise_constant(cls, breakpoints, heights):
        """Height ``heights[i]`` on [breakpoints[i], breakpoints[i+1]).

        ``breakpoints`` must start at 0 and increase; heights must be
        nonincreasing and nonnegative with total mass one.
        """
        edges = np.asarray(breakpoints, dtype=float)
        h = np.asarray(heights, dtype=float)
        if edges.ndim != 1 or len(edges) < 2 or len(h) != len(edges) - 1:
            raise DomainError("need len(heights) == len(breakpoints) - 1 >= 1")
        if edges[0] != 0.0 or np.any(np.diff(edges) <= 0) or not np.all(np.isfinite(edges)):
            raise DomainError("breakpoints must start at 0 and strictly increase")
        if np.any(h < 0):
            raise DomainError("heights must be nonnegative")
        mass = np.concatenate([[0.0], np.cumsum(h * np.diff(edges))])

        def pdf(s):
            s = np.asarray(s, dtype=float)
            idx = np.searchsorted(edges, s, side="right") - 1
            inside = (s >= 0) & (idx < len(h))
            return np.where(inside, h[np.clip(idx, 0, len(h) - 1)], 0.0)

        def cdf(s):
            return np.interp(s, edges, mass)

        def ppf(u):
            # strictly increasing on the support of positive-height pieces
            keep = np.concatenate([[True], np.diff(mass) > 0])
            return np.interp(u, mass[keep], edges[keep])

        return cls("piecewise_constant",
                   {"breakpoints": tuple(edges.tolist()), "heights": tuple(h.tolist())},
                   pdf=pdf, cdf=cdf, ppf=ppf, upper=edges[-1], breakpoints=edges[1:-1])

    @classmethod
    def uniform(cls, upper):
        return cls.piecewise_constant([0.0, upper], [1.0 / upper])

    def _validate(self):
        grid = np.linspace(0.0, self.upper, 4001)
        vals = self.pdf(grid)
        if np.any(np.diff(vals) > 1e-12 * max(1.0, vals[0])):
            raise DomainError(f"{self!r} is not nonincreasing", code="not_decreasing")
        total = float(self.cdf(self.upper))
        if abs(total - 1.0) > 1e-8 + TAIL_MASS:
            raise DomainError(f"{self!r} integrates to {total}, not 1", code="not_normalized")

    def pdf(self, s):
        return self._pdf(s)

    def cdf(self, s):
        return self._cdf(s)

    def ppf(self, u):
        return self._ppf(u)

    def sample(self, u):
        """Map uniforms in (0, 1) to SNR draws by inverse cdf."""
        return self._ppf(np.asarray(u, dtype=float))


def _quad(fn, upper, points, label):
    val, err, info, *rest = integrate.quad(
        fn, 0.0, upper, epsabs=0.0, epsrel=QUAD_RTOL, limit=500,
        points=points or None, full_output=1)
    if rest:
        raise QuadratureError(
            f"{label}: quadrature did not converge (estimated error {err:.3g} on {val:.6g})",
            achieved=err / abs(val) if val else err)
    return val


def marginal_conditional_coverage(density: SnrDensity, alpha, c) -> CoverageReport:
    """Coverage given selection, averaged over an SNR density.

    Ratio of the integrals of P(cover, selected | s) f(s) and
    P(selected | s) f(s) over [0, S], where S leaves tail mass below 1e-10.
    """
    _check_alpha(alpha)
    _check_c(c)
    z = two_sided_critical(alpha)
    c = float(c)
    pts = sorted({p for p in (*density.breakpoints, c, c + z, max(c - z, 0.0))
                  if 0.0 < p < density.upper})
    num = _quad(lambda s: _coverage_parts(s, z, c)[0] * float(density.pdf(s)),
                density.upper, pts, "coverage numerator")
    den = _quad(lambda s: _coverage_parts(s, z, c)[1] * float(density.pdf(s)),
                density.upper, pts, "selection probability")
    if den <= 0.0:
        raise FilterTooExtremeError(f"selection probability underflows for c={c}")
    return CoverageReport(nominal=1.0 - alpha, conditional=min(num / den, 1.0))
