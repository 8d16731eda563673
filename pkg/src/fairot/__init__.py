"""Wasserstein-based discrimination diagnostics and mitigation for predictive scores."""

__version__ = "0.1.0"

from .empirical import EmpiricalDistribution, GroupedScores, build_ecdf, cdf_eval, partition_by_group, quantile
from .divergence import (
    BinnedDistribution,
    GaussianParams,
    bin_scores,
    default_edges,
    js_divergence,
    kl_divergence,
    ot_cost_bruteforce,
    total_variation,
    wasserstein_empirical,
    wasserstein_gaussian,
)
from .transport import AffineMap, TransportMap, apply_map, fit_gaussian_map, fit_monotone_map, matrix_sqrt
from .barycenter import (
    BarycenterTransform,
    ScalingTransform,
    apply_barycenter,
    apply_scaling,
    fit_barycenter,
    fit_scaling,
    gaussian_barycenter,
)
from .fairness import FairnessReport, balance_check, build_report, strong_dp_distance, weak_dp_gap
