"""NSGA-II variants and approximation measures on OneMinMax.

Classic NSGA-II, NSGA-II with the current crowding distance and steady-state
NSGA-II, with the maximal-empty-interval, epsilon and hypervolume measures of
how well a population approximates the Pareto front.
"""
from ._backend import BACKEND
from .algorithms import AlgorithmConfig, RunTrace, Variant, detect_extremes, run
from .core import ConfigurationError, Individual, ObjectiveVector, Population, RngHandle, derive_seed, make_genome
from .metrics import FrontSubset, MetricReport, ReferencePoint, metric_report
from .problems import Problem, ProblemKind
from .variation import MatingScheme, MutationOp

__version__ = "0.1.0"

__all__ = [
    "AlgorithmConfig", "BACKEND", "ConfigurationError", "FrontSubset", "Individual", "MatingScheme",
    "MetricReport", "MutationOp", "ObjectiveVector", "Population", "Problem", "ProblemKind",
    "ReferencePoint", "RngHandle", "RunTrace", "Variant", "derive_seed", "detect_extremes",
    "make_genome", "metric_report", "run",
]
