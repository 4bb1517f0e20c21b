"""Diffraction and number variance of invariant point processes on regular trees."""

__version__ = "0.1.0"

from .diffraction import (
    Classification,
    DiffractionMeasure,
    classify,
    lattice_orbit_diffraction,
    poisson_diffraction,
)
from .errors import TreeHUError
from .graph_core import Graph, build_graph, named_graph, parse_graph_file
from .spectral import Branch, SpectralParam, alpha_to_lambda, lambda_to_alpha, symmetric_eigen
from .variance import liminf_scan, nv_curve

__all__ = [
    "Branch",
    "Classification",
    "DiffractionMeasure",
    "Graph",
    "SpectralParam",
    "TreeHUError",
    "alpha_to_lambda",
    "build_graph",
    "classify",
    "lambda_to_alpha",
    "lattice_orbit_diffraction",
    "liminf_scan",
    "named_graph",
    "nv_curve",
    "parse_graph_file",
    "poisson_diffraction",
    "symmetric_eigen",
]
