"""Numerical laboratory for weighted Bergman and Bloch spaces of Dirichlet series."""

from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig, QuadratureError
from .measures import AdmissibleMeasure, DegenerateDensityError
from .dirichlet import (
    Character,
    DirichletSeries,
    PolydiscPolynomial,
    SparseDirichletSeries,
)

__all__ = [
    "AdmissibleMeasure",
    "Character",
    "DEFAULT_QUADRATURE",
    "DegenerateDensityError",
    "DirichletSeries",
    "PolydiscPolynomial",
    "QuadratureConfig",
    "QuadratureError",
    "SparseDirichletSeries",
]

__version__ = "0.1.0"
