"""Confidence intervals reported only after significance: do they still cover?"""
import numpy as np

from sigfilter.coverage import SnrDensity, boundary_gap, conditional_coverage, marginal_conditional_coverage
from sigfilter.normal_core import two_sided_critical

z = two_sided_critical(0.05)
for snr in np.linspace(0.0, 4.0, 9):
    rep = conditional_coverage(snr, 0.05, z)
    print(f"snr={snr:4.1f}  coverage given significance = {rep.conditional:.4f}")
print(f"shortfall exactly at snr = z: {boundary_gap(0.05):.3e}")

# Averaging over a population of studies where small effects dominate.
for density in (SnrDensity.exponential(1.0), SnrDensity.half_normal(1.0)):
    rep = marginal_conditional_coverage(density, 0.05, z)
    print(f"{density!r}: average conditional coverage {rep.conditional:.4f}")
