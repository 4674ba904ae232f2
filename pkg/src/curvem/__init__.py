"""Nonconforming virtual elements of arbitrary order on curved polygonal meshes."""

from .assembly import GlobalDofMap, GlobalSystem, SolverError, assemble, build_dof_map, solve
from .element import ConditioningError, LocalElement
from .postproc import ConvergenceReport, ErrorPair, compute_errors, fit_rates
from .quadrature import QuadratureOrders

__version__ = "0.1.0"

__all__ = [
    "GlobalDofMap", "GlobalSystem", "SolverError", "assemble", "build_dof_map", "solve",
    "ConditioningError", "LocalElement", "ConvergenceReport", "ErrorPair", "compute_errors",
    "fit_rates", "QuadratureOrders",
]
