"""Exact Voronoi-cell moments of the root lattice A_n and the error
probability of lattice codes built from it."""

__version__ = "0.1.0"

from .errors import DomainError, SeriesNotConverged
from .gtable import GKey, GTable, g
from .moments import ClosedFormMoment, ExactMoment, closed_form, exact_moment, moment_coefficients, moment_decimal
from .lattice_an import in_voronoi, nearest_point, project, sample_cube_projected, sample_voronoi_uniform
from .errorprob import NoiseSpec, SeriesResult, pc_series, pe_curve, snr_to_sigma2, union_bound_e8
from .simulate import SimConfig, SimResult, run as simulate

__all__ = [
    "DomainError",
    "SeriesNotConverged",
    "GKey",
    "GTable",
    "g",
    "ExactMoment",
    "ClosedFormMoment",
    "exact_moment",
    "moment_coefficients",
    "closed_form",
    "moment_decimal",
    "project",
    "nearest_point",
    "in_voronoi",
    "sample_voronoi_uniform",
    "sample_cube_projected",
    "NoiseSpec",
    "SeriesResult",
    "pc_series",
    "pe_curve",
    "snr_to_sigma2",
    "union_bound_e8",
    "SimConfig",
    "SimResult",
    "simulate",
]
