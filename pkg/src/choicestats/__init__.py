"""Estimation and inference toolkit for multinomial logit choice models.

The package fits conditional logit models by maximum likelihood, computes
the classical, outer-product, and robust sandwich covariance estimators,
runs likelihood-ratio, Wald, and score tests, builds asymptotic and
bootstrap confidence intervals, drives Monte Carlo size, power, and
coverage experiments, and renders publication tables. A command line front
end exposes the same pipeline; see the `cli` module.
"""

from .bootstrap import (
    MIN_DRAWS,
    BootstrapResult,
    EmpiricalPValue,
    asymmetry_index,
    bootstrap_covariance,
    bootstrap_run,
    empirical_p_value,
    hpd_interval,
    load_draws,
    quantile_interval,
    resample_persons,
    save_draws,
)
from .covariance import CovarianceSet, covariance_set, delta_method, standard_errors
from .dataio import (
    load_dataset,
    load_model_spec,
    save_dataset,
    save_model_spec,
)
from .errors import (
    ChoiceStatsError,
    ConvergenceError,
    CovarianceError,
    DataError,
    DivergenceWarning,
    EstimationDisagreementWarning,
    IdentificationError,
    IdentificationRiskWarning,
    NestingError,
    ProbabilityUnderflowWarning,
    ReplicateFailureWarning,
    SpecMismatchError,
)
from .estimation import (
    EstimationOptions,
    EstimationResult,
    IdentificationReport,
    check_identification,
    estimate,
    estimate_design,
    multi_start,
)
from .inference import (
    ConfidenceInterval,
    TestResult,
    asymptotic_ci,
    bounded_parameter_test,
    chisq_cdf,
    chisq_sf,
    lm_test,
    lm_test_at,
    lr_test,
    normal_cdf,
    normal_pdf,
    normal_quantile,
    t_test,
    wald_test,
    z_for_level,
)
from .model import (
    AttributeRule,
    Dataset,
    DesignArrays,
    GeneratorSpec,
    ModelSpec,
    Observation,
    ParameterDef,
    UtilityTerm,
    build_design,
    choice_probabilities,
    log_likelihood,
    null_log_likelihood,
    simulate_dataset,
)
from .montecarlo import (
    REJECTION_METHODS,
    ExperimentConfig,
    MonteCarloReport,
    coverage_experiment,
    sampling_distribution_summary,
    save_rows,
    size_and_power_experiment,
)
from .reporting import (
    Column,
    ReportOptions,
    bic,
    format_estimate,
    format_p_value,
    format_scientific,
    format_significant,
    format_table,
    prediction_gain,
    rho_bar_squared,
    star_code,
)
from .util import seed_from

__version__ = "0.1.0"

__all__ = [
    "AttributeRule",
    "BootstrapResult",
    "ChoiceStatsError",
    "Column",
    "ConfidenceInterval",
    "ConvergenceError",
    "CovarianceError",
    "CovarianceSet",
    "DataError",
    "Dataset",
    "DesignArrays",
    "DivergenceWarning",
    "EmpiricalPValue",
    "EstimationDisagreementWarning",
    "EstimationOptions",
    "EstimationResult",
    "ExperimentConfig",
    "GeneratorSpec",
    "IdentificationError",
    "IdentificationReport",
    "IdentificationRiskWarning",
    "MIN_DRAWS",
    "ModelSpec",
    "MonteCarloReport",
    "NestingError",
    "Observation",
    "ParameterDef",
    "ProbabilityUnderflowWarning",
    "REJECTION_METHODS",
    "ReplicateFailureWarning",
    "ReportOptions",
    "SpecMismatchError",
    "TestResult",
    "UtilityTerm",
    "asymmetry_index",
    "asymptotic_ci",
    "bic",
    "bootstrap_covariance",
    "bootstrap_run",
    "bounded_parameter_test",
    "build_design",
    "check_identification",
    "chisq_cdf",
    "chisq_sf",
    "choice_probabilities",
    "covariance_set",
    "coverage_experiment",
    "delta_method",
    "empirical_p_value",
    "estimate",
    "estimate_design",
    "format_estimate",
    "format_p_value",
    "format_scientific",
    "format_significant",
    "format_table",
    "hpd_interval",
    "lm_test",
    "lm_test_at",
    "load_dataset",
    "load_draws",
    "load_model_spec",
    "log_likelihood",
    "lr_test",
    "multi_start",
    "normal_cdf",
    "normal_pdf",
    "normal_quantile",
    "null_log_likelihood",
    "prediction_gain",
    "quantile_interval",
    "resample_persons",
    "rho_bar_squared",
    "sampling_distribution_summary",
    "save_dataset",
    "save_draws",
    "save_model_spec",
    "save_rows",
    "seed_from",
    "simulate_dataset",
    "size_and_power_experiment",
    "standard_errors",
    "star_code",
    "t_test",
    "wald_test",
    "z_for_level",
]
