"""Optimal parameterizations of self-similar sets from a finite skeleton.

Typical use::

    from skelcurve import get_example, run_pipeline
    result = run_pipeline(get_example("terdragon"))
    print(result.report.render())
"""

from .catalog import get_example, list_examples
from .config import Budgets, JobConfig, Outputs, load_config, parse_config
from .curve import (CurveApproximation, CurveSample, convergence_diagnostic, holder_diagnostic,
                    nesting_violation, sample_curve)
from .errors import SkelCurveError
from .geometry import Similitude, Tolerance, apply, compose, fixed_point
from .gifs import (Bridge, InducedGifs, associate_matrix, check_chain_condition,
                   check_pure_cell_disjointness, induce_gifs, measure_weights, spectral_certify)
from .graphs import (AbstractEdge, LabeledEdge, build_loop, find_consistent_partition,
                     induced_graph, iter_consistent_partitions, search_orientation)
from .ifs import IfsSystem, Skeleton, hata_graph, similarity_dimension, validate_skeleton
from .pipeline import CertificationReport, PipelineResult, run_pipeline
from .substitution import (SubstitutionRule, coarse, find_pure_cell, is_primitive, is_traversing,
                           iterate, parse_rule, rule_from_partition, validate_rule)

__version__ = "0.1.0"

__all__ = [
    "AbstractEdge", "Bridge", "Budgets", "CertificationReport", "CurveApproximation", "CurveSample",
    "IfsSystem", "InducedGifs", "JobConfig", "LabeledEdge", "Outputs", "PipelineResult",
    "Similitude", "Skeleton", "SkelCurveError", "SubstitutionRule", "Tolerance", "apply",
    "associate_matrix", "build_loop", "check_chain_condition", "check_pure_cell_disjointness",
    "coarse", "compose", "convergence_diagnostic", "find_consistent_partition", "find_pure_cell",
    "fixed_point", "get_example", "hata_graph", "holder_diagnostic", "induce_gifs", "induced_graph",
    "is_primitive", "is_traversing", "iter_consistent_partitions", "iterate", "list_examples",
    "load_config", "measure_weights", "nesting_violation", "parse_config", "parse_rule",
    "rule_from_partition", "run_pipeline", "sample_curve", "search_orientation",
    "similarity_dimension", "spectral_certify", "validate_rule", "validate_skeleton",
]
