"""Stability toolkit for two-degree-of-freedom systems with indefinite damping.

Computes spectra, Hurwitz asymptotic-stability thresholds, marginal-stability
intervals of balanced gain/loss systems, exceptional points, the singular
geometry of stability boundaries (right conoid with self-intersection and
umbrella endpoints), and modulational-instability thresholds of a
dissipatively perturbed nonlinear Schroedinger carrier wave.
"""

from .core import (
    DEFAULT_CLUSTER_TOL,
    DEFAULT_EPS,
    J,
    BoundarySample,
    Mat2,
    PreconditionError,
    Quartic,
    RootFindingError,
    Spectrum,
    Stability,
    SystemSpec,
    char_poly,
    char_poly_matrix,
    classify,
    roots,
    system_spectrum,
)
from .routh_hurwitz import DegenerateConfigurationError, HurwitzReport, delta_cr_squared, delta_pt, hurwitz

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CLUSTER_TOL",
    "DEFAULT_EPS",
    "J",
    "BoundarySample",
    "DegenerateConfigurationError",
    "HurwitzReport",
    "Mat2",
    "PreconditionError",
    "Quartic",
    "RootFindingError",
    "Spectrum",
    "Stability",
    "SystemSpec",
    "char_poly",
    "char_poly_matrix",
    "classify",
    "delta_cr_squared",
    "delta_pt",
    "hurwitz",
    "roots",
    "system_spectrum",
    "__version__",
]
