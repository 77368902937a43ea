"""Dirichlet ground states of planar domains with a translated obstacle."""

__version__ = "0.1.0"

from .constants import ConstantsProfile, analytic_2d
from .discretize import DomainMask, GridSpec, StencilOperator, rasterize
from .eigensolver import DirichletEigensolver, SpectralResult, dense_oracle, smallest_eigenpair, solve
from .geometry import Hyperplane2D, Shape, Translate, estimate_asymmetry, heart
from .placement import ObstaclePlacement, PlacementLandscape, sweep
from .spectral import gradient_ratio, max_set

__all__ = [
    "ConstantsProfile", "analytic_2d",
    "DomainMask", "GridSpec", "StencilOperator", "rasterize",
    "DirichletEigensolver", "SpectralResult", "dense_oracle", "smallest_eigenpair", "solve",
    "Hyperplane2D", "Shape", "Translate", "estimate_asymmetry", "heart",
    "ObstaclePlacement", "PlacementLandscape", "sweep",
    "gradient_ratio", "max_set",
]
