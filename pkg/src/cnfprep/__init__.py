"""CNF preprocessing with model reconstruction."""

from .core import Assignment, Formula, bcp, normalize_clause, resolve
from .estimator import Coprocessor
from .formula_io import parse_dimacs, parse_model, write_dimacs, write_model
from .pipeline import PipelineConfig, PipelineStats, PreprocessResult, preprocess
from .reconstruct import MapFile, extend_model, parse_map_file, write_map_file

__all__ = [
    "Assignment",
    "Coprocessor",
    "Formula",
    "MapFile",
    "PipelineConfig",
    "PipelineStats",
    "PreprocessResult",
    "bcp",
    "extend_model",
    "normalize_clause",
    "parse_dimacs",
    "parse_map_file",
    "parse_model",
    "preprocess",
    "resolve",
    "write_dimacs",
    "write_map_file",
    "write_model",
]

__version__ = "0.1.0"
