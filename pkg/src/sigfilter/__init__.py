"""Bias, exaggeration and coverage under the significance filter, and the
shrinkage estimator that corrects them, with a seeded Monte Carlo oracle."""
from .coverage import (
    CoverageReport,
    SnrDensity,
    boundary_gap,
    conditional_coverage,
    marginal_conditional_coverage,
    theorem2_gap,
)
from .errors import DomainError, FilterTooExtremeError, NoSelectedDrawsError, QuadratureError
from .mc_oracle import (
    CompareReport,
    McConfig,
    McEstimate,
    compare,
    simulate_fixed_beta,
    simulate_hierarchical,
    simulate_snr_prior,
)
from .normal_core import (
    FoldedNormalParams,
    Probability,
    folded_normal_mean,
    mills_ratio_inverse,
    std_normal_cdf,
    std_normal_pdf,
    std_normal_quantile,
    std_normal_sf,
    truncated_normal_mean,
    two_sided_critical,
)
from .selection import (
    EffectEstimate,
    ExaggerationCurve,
    SelectionRule,
    Snr,
    conditional_bias,
    exaggeration_curve,
    exaggeration_factor,
    g,
    power_from_snr,
    relative_bias,
    snr_from_power,
)
from .shrinkage import (
    NormalPrior,
    Posterior,
    bias_comparison,
    bias_decomposition,
    marginal_abs_means,
    posterior,
    posterior_abs_gap,
    rosenbaum_mean,
    selected_abs_means,
    selected_abs_shrunk_mean,
    selected_raw_gap,
    selected_shrinkage_gap,
)

__version__ = "0.1.0"
