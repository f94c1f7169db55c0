"""Seeded Monte Carlo checks for the closed forms.

Each simulation splits ``n_draws`` over ``n_streams`` substreams spawned
from one :class:`numpy.random.SeedSequence`; every substream drives its own
counter-based Philox generator.  Normals come from uniforms through the
normal quantile, so the number of uniforms consumed per draw is fixed.
Per-stream moments are merged in stream order, which makes the result
independent of thread scheduling.  Changing ``n_streams`` changes which
uniforms land where, so estimates for different stream counts are
statistically equivalent but not bit-identical.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .coverage import SnrDensity
from .errors import DomainError, NoSelectedDrawsError
from .normal_core import std_normal_quantile, std_normal_sf, two_sided_critical
from .selection import SelectionRule
from .shrinkage import NormalPrior

CHUNK = 1 << 20
_U53 = 2.0 ** -53


@dataclass(frozen=True)
class McConfig:
    n_draws: int
    seed: int = 0
    n_streams: int = 1

    def __post_init__(self):
        if int(self.n_draws) != self.n_draws or self.n_draws < 1:
            raise DomainError(f"n_draws must be a positive integer, got {self.n_draws}")
        if int(self.n_streams) != self.n_streams or self.n_streams < 1:
            raise DomainError(f"n_streams must be a positive integer, got {self.n_streams}")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_selected: int
    n_draws: int


@dataclass(frozen=True)
class CompareReport:
    passed: bool
    closed_form: float
    mc_mean: float
    std_error: float
    k_sigma: float
    margin: float
    detail: str

    def __str__(self):
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict}: closed_form={self.closed_form:.10g} mc={self.mc_mean:.10g} "
                f"se={self.std_error:.3g} margin={self.margin:.3g}")


class _Moments:
    """Running count, mean and centred sum of squares per column."""

    def __init__(self, k):
        self.n = 0
        self.mean = np.zeros(k)
        self.m2 = np.zeros(k)

    def add(self, values):
        n_b = values.shape[0]
        if n_b == 0:
            return
        mean_b = values.mean(axis=0)
        m2_b = ((values - mean_b) ** 2).sum(axis=0)
        self._merge(n_b, mean_b, m2_b)

    def merge(self, other):
        if other.n:
            self._merge(other.n, other.mean, other.m2)

    def _merge(self, n_b, mean_b, m2_b):
        n = self.n + n_b
        delta = mean_b - self.mean
        self.mean = self.mean + delta * (n_b / n)
        self.m2 = self.m2 + m2_b + delta ** 2 * (self.n * n_b / n)
        self.n = n


def stream_generators(cfg: McConfig):
    """One Philox generator per substream, spawned from ``cfg.seed``."""
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.n_streams)
    return [np.random.Generator(np.random.Philox(ss)) for ss in children]


def open_uniforms(rng, size):
    """Uniforms on the open interval (0, 1) at 2^-53 resolution."""
    return (rng.integers(0, 1 << 53, size=size, dtype=np.int64) + 0.5) * _U53


def normals(rng, size):
    return std_normal_quantile(open_uniforms(rng, size))


def _run(cfg: McConfig, draw, k=1, workers=None):
    """Drive ``draw(rng, n) -> (n_kept, k) array`` over all substreams."""
    base, extra = divmod(cfg.n_draws, cfg.n_streams)
    shares = [base + (i < extra) for i in range(cfg.n_streams)]
    gens = stream_generators(cfg)

    def work(i):
        acc = _Moments(k)
        left = shares[i]
        while left > 0:
            n = min(CHUNK, left)
            acc.add(np.asarray(draw(gens[i], n), dtype=float).reshape(-1, k))
            left -= n
        return acc

    workers = workers or min(cfg.n_streams, os.cpu_count() or 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, range(cfg.n_streams)))
    else:
        parts = [work(i) for i in range(cfg.n_streams)]
    total = _Moments(k)
    for p in parts:
        total.merge(p)
    if total.n == 0:
        raise NoSelectedDrawsError(f"no selected draws out of {cfg.n_draws}")
    if total.n > 1:
        sd = np.sqrt(total.m2 / (total.n - 1))
    else:
        sd = np.zeros(k)
    return [McEstimate(mean=float(total.mean[j]), std_error=float(sd[j] / math.sqrt(total.n)),
                       n_selected=total.n, n_draws=cfg.n_draws) for j in range(k)]


def _resolve_z(rule: SelectionRule, alpha):
    a = rule.alpha if alpha is None else alpha
    if not 0.0 < a < 1.0:
        raise DomainError(f"coverage needs 0 < alpha < 1, got {a}; pass alpha explicitly")
    return two_sided_critical(a)


def simulate_fixed_beta(beta, se, rule: SelectionRule, what, cfg: McConfig,
                        alpha=None, workers=None) -> McEstimate:
    """Draw b ~ N(beta, se^2), keep |b|/se > c.

    ``what="abs_bias"`` averages |b| - |beta|; ``what="coverage"`` averages
    the indicator |b - beta| < z se with z from ``alpha`` (default: the
    rule's own level).
    """
    if not se > 0:
        raise DomainError(f"se must be positive, got {se}")
    c = rule.c
    if what == "abs_bias":
        def draw(rng, n):
            b = beta + se * normals(rng, n)
            b = b[np.abs(b) / se > c]
            return np.abs(b) - abs(beta)
    elif what == "coverage":
        z = _resolve_z(rule, alpha)

        def draw(rng, n):
            b = beta + se * normals(rng, n)
            b = b[np.abs(b) / se > c]
            return np.abs(b - beta) < z * se
    else:
        raise DomainError(f"unknown quantity {what!r}", code="usage")
    return _run(cfg, draw, workers=workers)[0]


def simulate_hierarchical(se, prior: NormalPrior, rule: SelectionRule, what, cfg: McConfig,
                          tail_sampling=False, workers=None):
    """Draw beta ~ N(0, tau^2) and b ~ N(beta, se^2), keep |b|/se > c.

    ``what`` is ``raw_gap`` (|b| - |beta|), ``shrunk_gap`` (|b*| - |beta|)
    or ``marginal_means`` (a tuple of estimates for |b*|, |beta|, |b|).

    With ``tail_sampling`` b is drawn directly from its marginal restricted
    to |b|/se > c and beta from its posterior given b.  That proposal has a
    constant likelihood ratio P(selected) against the filtered joint law,
    so the weighted mean is the plain mean and every draw counts.
    """
    if not se > 0:
        raise DomainError(f"se must be positive, got {se}")
    tau = prior.tau
    m = math.hypot(se, tau)
    k = tau * tau / (m * m)
    s_post = se * tau / m
    c = rule.c
    cols = {"raw_gap": 1, "shrunk_gap": 1, "marginal_means": 3}
    if what not in cols:
        raise DomainError(f"unknown quantity {what!r}", code="usage")

    def values(beta, b):
        b_star = k * b
        if what == "raw_gap":
            return np.abs(b) - np.abs(beta)
        if what == "shrunk_gap":
            return np.abs(b_star) - np.abs(beta)
        return np.column_stack([np.abs(b_star), np.abs(beta), np.abs(b)])

    if tail_sampling:
        t = c * se / m
        q = std_normal_sf(t)
        if q == 0.0:
            raise NoSelectedDrawsError(f"P(|b|/se > {c}) underflows")

        def draw(rng, n):
            u = open_uniforms(rng, n)
            sign = np.where(open_uniforms(rng, n) < 0.5, -1.0, 1.0)
            b = sign * m * -std_normal_quantile(u * q)
            beta = k * b + s_post * normals(rng, n)
            return values(beta, b)
    else:
        def draw(rng, n):
            beta = tau * normals(rng, n)
            b = beta + se * normals(rng, n)
            keep = np.abs(b) / se > c
            return values(beta[keep], b[keep])

    out = _run(cfg, draw, k=cols[what], workers=workers)
    return tuple(out) if what == "marginal_means" else out[0]


def simulate_snr_prior(density: SnrDensity, alpha, rule: SelectionRule, cfg: McConfig,
                       workers=None) -> McEstimate:
    """SNR from ``density``, X ~ N(snr, 1), keep |X| > c; coverage frequency
    of |X - snr| < z_{1-alpha/2}."""
    z = _resolve_z(rule, alpha)
    c = rule.c

    def draw(rng, n):
        snr = density.sample(open_uniforms(rng, n))
        x = snr + normals(rng, n)
        keep = np.abs(x) > c
        return np.abs(x[keep] - snr[keep]) < z

    return _run(cfg, draw, workers=workers)[0]


def compare(closed_form, mc: McEstimate, k_sigma=4.0) -> CompareReport:
    """Pass iff |closed_form - mc.mean| <= k_sigma * mc.std_error."""
    if not math.isfinite(mc.std_error):
        raise DomainError(f"std_error must be finite, got {mc.std_error}")
    diff = abs(closed_form - mc.mean)
    allowed = k_sigma * mc.std_error
    passed = diff <= allowed
    detail = ""
    if not passed and mc.std_error == 0.0:
        detail = "zero Monte Carlo spread but the values differ"
    elif not passed:
        detail = f"off by {diff / mc.std_error:.2f} standard errors"
    return CompareReport(passed=passed, closed_form=float(closed_form), mc_mean=mc.mean,
                         std_error=mc.std_error, k_sigma=k_sigma, margin=allowed - diff,
                         detail=detail)


def simulate_conditional_bias(se, prior: NormalPrior, cfg: McConfig, beta=None, b=None,
                              workers=None):
    """Estimates of (E(b - beta | .), E(b* - beta | .)) holding one side fixed.

    Give ``beta`` to draw b ~ N(beta, se^2) (the frequentist view) or ``b``
    to draw beta from its posterior N(b*, v) (the Bayesian view).
    """
    if (beta is None) == (b is None):
        raise DomainError("give exactly one of beta or b", code="usage")
    if not se > 0:
        raise DomainError(f"se must be positive, got {se}")
    tau = prior.tau
    k = tau * tau / (se * se + tau * tau)
    s_post = math.sqrt(se * se * k)
    if beta is not None:
        def draw(rng, n):
            bb = beta + se * normals(rng, n)
            return np.column_stack([bb - beta, k * bb - beta])
    else:
        def draw(rng, n):
            bt = k * b + s_post * normals(rng, n)
            return np.column_stack([b - bt, k * b - bt])
    return tuple(_run(cfg, draw, k=2, workers=workers))
