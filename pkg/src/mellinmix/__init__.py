"""Mellin-Stieltjes deconvolution for multiplicative scale mixtures X = Y * eta.

Given observations of ``X`` and the known law ``G`` of ``eta``, estimate the
c.d.f. ``F`` of ``Y`` by dividing the empirical Mellin transform of ``X`` by
``M[G]`` and inverting along the line ``Re z = u`` with a triangular kernel.
"""

from .bounds import (
    BerryEsseenInputs,
    BoundReport,
    berry_esseen_terms,
    min_T,
    rho_sup,
    sine_kernel_mass,
    solve_cb,
    thm1_terms,
    thm2_terms,
)
from .distributions import (
    Beta,
    Distribution,
    Exponential,
    FiniteDiscrete,
    Gamma,
    Geometric,
    MixtureModel,
    PositivePoisson,
    Sample,
    Strip,
    UniformUnit,
    Zeta,
    cdf,
    parse_spec,
    point_mass,
    sample,
    sample_mixture,
    two_point,
)
from .errors import (
    ConfigurationError,
    DataError,
    DivisionHazardError,
    DomainError,
    FeasibilityError,
    IntegrabilityError,
    MellinMixError,
    ParameterError,
    PreconditionError,
    StripError,
)
from .estimator import (
    CdfEstimate,
    EstimatorConfig,
    estimate_cdf,
    pointwise_risk,
    population_estimate_cdf,
    triangular_kernel,
    truncation_for,
)
from .fourier import FourierConfig, char_log_mixing, fourier_estimate_cdf
from .harness import (
    ExperimentConfig,
    MseTable,
    load_scenario,
    oracle_tune,
    risk_profile,
    run_experiment,
)
from .mellin import (
    HgRegion,
    hg_region,
    mellin_analytic,
    mellin_empirical,
    mellin_ratio_estimate,
    positive_poisson_threshold,
    strip,
)

__version__ = "0.1.0"
