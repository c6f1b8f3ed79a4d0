"""Species richness estimation from frequency-count ratios.

The sample's frequency counts (how many classes were seen once, twice, ...)
determine a series of consecutive ratios.  Fitting a rational function of
the frequency index to that series and extrapolating it to zero predicts
the unobserved-class count and hence the total number of classes, with a
delta-method standard error.  Classical competitors (Chao lower bound,
Chao-Bunge, weighted linear ratio models) and a negative-binomial
replication-study harness are included, along with scikit-learn style
estimator classes and a command-line interface.
"""

from .competitors import CompetitorEstimate, chao_bunge, chao_lower_bound, wlrm
from .errors import (
    CriteriaError,
    DomainError,
    NoEstimateError,
    RatiorichError,
    SingularityError,
    StructureError,
    TableParseError,
    WeightError,
)
from .estimators import ChaoBunge, ChaoLowerBound, LinearRatioRichness, RatioRegressionRichness
from .freqtab import (
    FrequencyTable,
    RatioSeries,
    StructureReport,
    TableStats,
    check_structure,
    derived_stats,
    parse_frequency_table,
    ratio_series,
    serialize_frequency_table,
)
from .model import (
    DistributionClass,
    ImpliedDistribution,
    RationalRatioModel,
    classify,
    denominator_roots_in,
    evaluate_ratio,
    implied_probabilities,
    pgf_eval,
    predict_b0,
    uncentered_coefficients,
)
from .procedure import (
    CriteriaReport,
    ProcedureOptions,
    RichnessEstimate,
    estimate_richness,
    f0_from_fit,
    satisfies_criteria,
    select_model,
    variance_of_estimate,
)
from .simulate import SimConfig, StudySummary, replication_study, simulate_nb_counts
from .solver import DEFAULT_LADDER, FitResult, fit_ols_base, fit_wnls, sequential_fit_ladder
from .weights import (
    WeightScheme,
    ZtpMoments,
    adaptive_weights,
    initial_weights,
    ratio_covariance,
    ratio_variance,
    ztp_moments,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "FrequencyTable",
    "TableStats",
    "RatioSeries",
    "StructureReport",
    "parse_frequency_table",
    "serialize_frequency_table",
    "derived_stats",
    "ratio_series",
    "check_structure",
    "ZtpMoments",
    "WeightScheme",
    "ztp_moments",
    "ratio_variance",
    "ratio_covariance",
    "initial_weights",
    "adaptive_weights",
    "RationalRatioModel",
    "DistributionClass",
    "ImpliedDistribution",
    "evaluate_ratio",
    "predict_b0",
    "denominator_roots_in",
    "uncentered_coefficients",
    "implied_probabilities",
    "classify",
    "pgf_eval",
    "FitResult",
    "DEFAULT_LADDER",
    "fit_ols_base",
    "fit_wnls",
    "sequential_fit_ladder",
    "ProcedureOptions",
    "CriteriaReport",
    "RichnessEstimate",
    "estimate_richness",
    "satisfies_criteria",
    "f0_from_fit",
    "variance_of_estimate",
    "select_model",
    "CompetitorEstimate",
    "chao_lower_bound",
    "chao_bunge",
    "wlrm",
    "SimConfig",
    "StudySummary",
    "simulate_nb_counts",
    "replication_study",
    "RatioRegressionRichness",
    "ChaoLowerBound",
    "ChaoBunge",
    "LinearRatioRichness",
    "RatiorichError",
    "TableParseError",
    "StructureError",
    "DomainError",
    "SingularityError",
    "WeightError",
    "CriteriaError",
    "NoEstimateError",
]
