"""Temporal correlation of interference in a bounded 1D mobile network with blockage.

Closed-form moments and correlation coefficients (:mod:`blockcorr.analytics`)
next to an independent Monte Carlo simulator (:mod:`blockcorr.montecarlo`).
"""

from .blockage import (
    BlockageSpec,
    ObstacleField,
    beta_moment,
    link_loss,
    product_loss_pdf,
    sample_field,
    spatial_cross_moment,
)
from .analytics import (
    RhoCoefficients,
    critical_user_count,
    mean_interference,
    pearson_rho,
    rho_coefficients,
    rho_without_blockage,
    second_moment_interference,
    sigma_1_cases,
    sigma_l_generic,
    sigma_spatial,
    std_interference,
)
from .errors import (
    ConvergenceError,
    DomainError,
    UndefinedCorrelation,
    UnsupportedConfiguration,
    ValidationError,
)
from .mobility import (
    DisplacementLaw,
    FullState,
    MobilitySpec,
    build_full_chain,
    displacement_law,
    simulate_trajectory,
    stationary_distribution,
    steady_state_pdf,
    steady_state_pmf,
    think_probability,
)
from .montecarlo import (
    EstimatorOutput,
    InterferenceSeries,
    RealizationConfig,
    estimate_displacement_kernel,
    estimate_statistics,
    run_realization,
)
from .network import MeasurementPoint, NetworkConfig, PathlossSpec, PopulationSpec

__version__ = "0.1.0"
