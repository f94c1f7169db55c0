import math

import numpy as np
import pytest

from sigfilter.coverage import (
    CoverageReport,
    SnrDensity,
    boundary_gap,
    conditional_coverage,
    marginal_conditional_coverage,
    theorem2_gap,
)
from sigfilter.errors import DomainError, FilterTooExtremeError
from sigfilter.mc_oracle import McConfig, compare, simulate_fixed_beta, simulate_snr_prior
from sigfilter.normal_core import std_normal_cdf, two_sided_critical
from sigfilter.selection import SelectionRule

Z05 = two_sided_critical(0.05)
# mpmath quadrature over X ~ N(mu, 1) with c = z_{0.975}
COV_Z_AT_196 = 0.94991731241567998
COV_Z_AT_3 = 0.97061681547444293


def test_zero_snr_never_covers():
    rep = conditional_coverage(0.0, 0.05, 1.96)
    assert rep.conditional == 0.0
    assert rep.nominal == 0.95 and rep.gap == 0.95


def test_fixed_snr_values():
    assert conditional_coverage(1.96, 0.05, Z05).conditional == pytest.approx(COV_Z_AT_196, abs=1e-14)
    assert conditional_coverage(3.0, 0.05, Z05).conditional == pytest.approx(COV_Z_AT_3, abs=1e-14)
    assert conditional_coverage(1.96, 0.05, 1.96).conditional == pytest.approx(0.94992, abs=1e-5)
    assert conditional_coverage(1.96, 0.05, 1.96).conditional < 0.95
    assert conditional_coverage(3.0, 0.05, 1.96).conditional > 0.95


@pytest.mark.parametrize("snr", [0.0, 0.4, 1.3, 2.5, 7.0])
@pytest.mark.parametrize("alpha", [0.01, 0.05, 0.3])
def test_vacuous_filter(snr, alpha):
    assert abs(conditional_coverage(snr, alpha, 0.0).conditional - (1 - alpha)) <= 1e-12


def test_report_gap_exact():
    rep = conditional_coverage(1.1, 0.1, 2.0)
    assert rep.gap == rep.nominal - rep.conditional
    with pytest.raises(DomainError):
        CoverageReport(nominal=0.95, conditional=1.5)


def test_filter_too_extreme():
    with pytest.raises(FilterTooExtremeError):
        conditional_coverage(0.0, 0.05, 40.0)


@pytest.mark.parametrize("args", [(-1, 0.05, 1), (1, 0.0, 1), (1, 1.0, 1), (1, 0.05, -1)])
def test_domain(args):
    with pytest.raises(DomainError):
        conditional_coverage(*args)


@pytest.mark.parametrize("alpha", [0.01, 0.05, 0.1])
def test_undercoverage_below_threshold(alpha):
    z = two_sided_critical(alpha)
    for snr in np.linspace(0, z, 100, endpoint=False):
        assert conditional_coverage(snr, alpha, z).conditional < 1 - alpha
        assert theorem2_gap(snr, alpha) > 0


@pytest.mark.parametrize("alpha", [0.01, 0.05, 0.1])
def test_overcoverage_just_above_threshold(alpha):
    z = two_sided_critical(alpha)
    for snr in np.linspace(z + 0.05, z + 1, 50)[1:]:
        assert conditional_coverage(snr, alpha, z).conditional > 1 - alpha


@pytest.mark.parametrize("alpha", [0.001, 0.01, 0.05, 0.1, 0.3])
def test_boundary_matches_proof_expression(alpha):
    z = two_sided_critical(alpha)
    # evaluated here from scratch, not through boundary_gap
    p2 = std_normal_cdf(-2 * z)
    excess = p2 / (2 * std_normal_cdf(-z)) - p2
    assert excess > 0
    expected_conditional = 1 - alpha * (1 + excess / (0.5 + p2))
    got = conditional_coverage(z, alpha, z).conditional
    assert abs(got - expected_conditional) <= 1e-12
    assert theorem2_gap(z, alpha) == pytest.approx(boundary_gap(alpha), rel=1e-9)


def test_boundary_gap_value():
    gap = theorem2_gap(Z05, 0.05)
    assert gap == pytest.approx(0.95 - conditional_coverage(Z05, 0.05, Z05).conditional, abs=1e-15)
    assert 8e-5 < gap < 8.5e-5
    assert theorem2_gap(0.0, 0.05) == pytest.approx(0.95, abs=1e-15)


def test_gap_sign_by_simulation():
    rule = SelectionRule.from_alpha(0.05)
    est = simulate_fixed_beta(1.0, 1.0, rule, "coverage", McConfig(10**6, seed=11))
    assert est.mean + 4 * est.std_error < 0.95
    assert theorem2_gap(1.0, 0.05) > 0


def test_closed_form_against_simulation():
    rng = np.random.default_rng(99)
    for i in range(20):
        snr = rng.uniform(0, 4)
        alpha = rng.choice([0.01, 0.05, 0.1, 0.2])
        c = rng.uniform(0, 3)
        est = simulate_fixed_beta(snr, 1.0, SelectionRule.from_c(c), "coverage",
                                  McConfig(400_000, seed=1000 + i), alpha=alpha)
        rep = compare(conditional_coverage(snr, alpha, c).conditional, est)
        assert rep.passed, (snr, alpha, c, rep)


# --- SNR densities ---------------------------------------------------------

def test_density_constructors_validate():
    with pytest.raises(DomainError):
        SnrDensity.piecewise_constant([0, 1, 2], [0.25, 0.75])   # increasing
    with pytest.raises(DomainError):
        SnrDensity.piecewise_constant([0, 1, 2], [0.5, 0.4])     # mass 0.9
    with pytest.raises(DomainError):
        SnrDensity.piecewise_constant([1, 2], [1.0])             # not anchored at 0
    with pytest.raises(DomainError):
        SnrDensity.exponential(0.0)
    with pytest.raises(DomainError):
        SnrDensity.half_normal(-1.0)


@pytest.mark.parametrize("density", [
    SnrDensity.exponential(0.7),
    SnrDensity.half_normal(1.5),
    SnrDensity.piecewise_constant([0, 0.5, 2, 4], [0.8, 0.2, 0.15]),
    SnrDensity.uniform(0.1),
])
def test_density_inverse_cdf(density):
    u = np.linspace(0.001, 0.999, 500)
    s = density.sample(u)
    assert np.all(np.diff(s) >= 0)
    np.testing.assert_allclose(density.cdf(s), u, atol=1e-12)
    assert float(density.cdf(density.upper)) == pytest.approx(1.0, abs=1e-8)


def test_marginal_examples():
    rep = marginal_conditional_coverage(SnrDensity.exponential(1.0), 0.05, 1.96)
    assert rep.conditional < 0.95
    for sigma in (1.0, 3.0):
        assert marginal_conditional_coverage(SnrDensity.half_normal(sigma), 0.05, 1.96).conditional < 0.95


@pytest.mark.parametrize("density", [SnrDensity.exponential(2.0), SnrDensity.half_normal(0.5),
                                     SnrDensity.piecewise_constant([0, 1, 3], [0.5, 0.25])])
def test_marginal_vacuous_filter(density):
    assert marginal_conditional_coverage(density, 0.05, 0.0).conditional == pytest.approx(0.95, abs=1e-9)


def _random_density(rng):
    kind = rng.integers(3)
    if kind == 0:
        return SnrDensity.exponential(rng.uniform(0.2, 3))
    if kind == 1:
        return SnrDensity.half_normal(rng.uniform(0.2, 4))
    k = rng.integers(1, 5)
    edges = np.concatenate([[0.0], np.cumsum(rng.uniform(0.2, 2, k))])
    h = np.sort(rng.uniform(0.1, 1, k))[::-1]
    h = h / np.sum(h * np.diff(edges))
    return SnrDensity.piecewise_constant(edges, h)


def test_marginal_undercoverage_property():
    rng = np.random.default_rng(4)
    for _ in range(10):
        density = _random_density(rng)
        for c in (1.0, 1.96, 3.0):
            assert marginal_conditional_coverage(density, 0.05, c).conditional < 0.95, density


def test_marginal_against_simulation():
    rule = SelectionRule.from_c(1.96)
    for i, density in enumerate([SnrDensity.exponential(1.0), SnrDensity.half_normal(3.0),
                                 SnrDensity.piecewise_constant([0, 1, 3], [0.5, 0.25])]):
        est = simulate_snr_prior(density, 0.05, rule, McConfig(10**6, seed=70 + i))
        rep = compare(marginal_conditional_coverage(density, 0.05, 1.96).conditional, est)
        assert rep.passed, (density, rep)


def test_near_degenerate_density_far_below_nominal():
    rep = marginal_conditional_coverage(SnrDensity.uniform(0.1), 0.05, 1.96)
    assert rep.conditional < 0.1
    est = simulate_snr_prior(SnrDensity.uniform(0.1), 0.05, SelectionRule.from_c(1.96), McConfig(10**6, seed=3))
    assert compare(rep.conditional, est).passed
