"""scalardet: detection statistics for a free scalar quantum field.

Probability densities for when and where a weakly coupled particle detector
fires, built from smeared two-point and four-point functions of the field:
single-event and arrival-time densities, joint two-event densities, detector
response in known limiting regimes (thermal response along worldlines,
photodetection of coherent pulses), information-theoretic diagnostics of the
resulting outcome distributions, and an exactly solvable finite-dimensional
model used as an end-to-end oracle.
"""

from .detection import (
    ProbabilityGrid,
    RateResult,
    convolve_sampling,
    detection_density,
    normalize_conditioned,
    toa_density,
    vacuum_rate,
    vacuum_rate_spherical,
)
from .detector import (
    DetectorKernel,
    GaussianEnergy,
    MaximalLocalization,
    SamplingFunctions,
    TabulatedOnShell,
    is_positive_localization,
    kernel_fourier,
    kernel_profile,
    localization_matrix,
)
from .entropy import (
    Hierarchy,
    boltzmann_entropy,
    correlation_entropy,
    entropy_report,
    hierarchy_from_events,
    kolmogorov_defect,
)
from .field import (
    Coherent,
    FockSpace,
    MixedParticle,
    MomentumGrid,
    SingleParticle,
    SpacetimePoint,
    Thermal,
    TwoParticle,
    Vacuum,
    contour_correlator,
    fock_correlator,
    gaussian_packet,
    momentum_grid,
    point,
    product_pair,
)
from .joint import (
    OutcomeSet,
    contour_diagonal_generating,
    event_tables,
    joint_density,
    outcome_generating,
    p_detect,
    rank_one_source,
)
from .limits import (
    CoherentPulse,
    Inertial,
    UniformAcceleration,
    glauber_point_limit,
    glauber_terms,
    rwa_density,
    udw_response,
)
from .toymodel import ToyModel, run_verification, standard_toy

__version__ = "0.1.0"

__all__ = [
    "Coherent",
    "CoherentPulse",
    "DetectorKernel",
    "FockSpace",
    "GaussianEnergy",
    "Hierarchy",
    "Inertial",
    "MaximalLocalization",
    "MixedParticle",
    "MomentumGrid",
    "OutcomeSet",
    "ProbabilityGrid",
    "RateResult",
    "SamplingFunctions",
    "SingleParticle",
    "SpacetimePoint",
    "TabulatedOnShell",
    "Thermal",
    "ToyModel",
    "TwoParticle",
    "UniformAcceleration",
    "Vacuum",
    "boltzmann_entropy",
    "contour_correlator",
    "contour_diagonal_generating",
    "convolve_sampling",
    "correlation_entropy",
    "detection_density",
    "entropy_report",
    "event_tables",
    "fock_correlator",
    "gaussian_packet",
    "glauber_point_limit",
    "glauber_terms",
    "hierarchy_from_events",
    "is_positive_localization",
    "joint_density",
    "kernel_fourier",
    "kernel_profile",
    "kolmogorov_defect",
    "localization_matrix",
    "momentum_grid",
    "normalize_conditioned",
    "outcome_generating",
    "p_detect",
    "point",
    "product_pair",
    "rank_one_source",
    "run_verification",
    "rwa_density",
    "standard_toy",
    "toa_density",
    "udw_response",
    "vacuum_rate",
    "vacuum_rate_spherical",
    "__version__",
]
