"""Desk-scale transactional benchmark for temporal social graphs.

The package covers the whole loop: deterministic data generation with
half-open entity lifecycles, snapshot/stream splitting at a cutoff
date, per-day query parameter curation, a versioned in-memory store
with a naive oracle twin, a concurrent workload driver with dependency
gating, and isolation scenarios with fault-injected control stores.
"""

from .datagen import GenConfig, generate_temporal_graph, split_at_cutoff
from .driver import BenchmarkRunner, DriverConfig, build_schedule, cross_validate
from .paramgen import ParamGenOptions, generate_parameters
from .pipeline import PipelineConfig, run_pipeline
from .refstore import NaiveStore, ReferenceStore

__version__ = "0.1.0"

__all__ = [
    "GenConfig",
    "generate_temporal_graph",
    "split_at_cutoff",
    "ParamGenOptions",
    "generate_parameters",
    "ReferenceStore",
    "NaiveStore",
    "DriverConfig",
    "build_schedule",
    "BenchmarkRunner",
    "cross_validate",
    "PipelineConfig",
    "run_pipeline",
    "__version__",
]
