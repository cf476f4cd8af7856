"""Simulation and analysis of the random connection hypergraph model."""

from .bipartite import BipartiteGraph, build_naive, build_stratified
from .calibrate import DataSummary, calibrate, gamma_from_exponent
from .dowker import DowkerComplex, degree_histogram, enumerate_simplices
from .homology import betti_numbers, filtered_complex, persistence_diagram
from .model import MarkedPoint, ModelParams, connects
from .sampler import NetworkInstance, RngStream, sample_network

__version__ = "0.1.0"

__all__ = [
    "BipartiteGraph",
    "DataSummary",
    "DowkerComplex",
    "MarkedPoint",
    "ModelParams",
    "NetworkInstance",
    "RngStream",
    "betti_numbers",
    "build_naive",
    "build_stratified",
    "calibrate",
    "connects",
    "degree_histogram",
    "enumerate_simplices",
    "filtered_complex",
    "gamma_from_exponent",
    "persistence_diagram",
    "sample_network",
]
