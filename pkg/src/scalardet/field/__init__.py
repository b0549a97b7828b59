"""Field core: momentum grids, states, Wightman functions, contour correlators."""

from .fock import DIM_CAP, FockSpace, fock_correlator
from .types import (
    Coherent,
    FieldState,
    MomentumGrid,
    MixedParticle,
    SingleParticle,
    SpacetimePoint,
    TwoParticle,
    Vacuum,
    default_p_max,
    dispersion,
    gaussian_packet,
    momentum_grid,
    point,
    product_pair,
)
from .wick import MAX_ORDER, WickContext, contour_correlator, ordered_insertions
from .wightman import (
    Thermal,
    wightman_modesum,
    wightman_modesum_delta,
    wightman_pullback_accelerated,
    wightman_pullback_inertial,
    wightman_vacuum,
)

__all__ = [
    "DIM_CAP",
    "MAX_ORDER",
    "Coherent",
    "FieldState",
    "FockSpace",
    "MomentumGrid",
    "MixedParticle",
    "SingleParticle",
    "SpacetimePoint",
    "Thermal",
    "TwoParticle",
    "Vacuum",
    "WickContext",
    "contour_correlator",
    "default_p_max",
    "dispersion",
    "fock_correlator",
    "gaussian_packet",
    "momentum_grid",
    "ordered_insertions",
    "point",
    "product_pair",
    "wightman_modesum",
    "wightman_modesum_delta",
    "wightman_pullback_accelerated",
    "wightman_pullback_inertial",
    "wightman_vacuum",
]
