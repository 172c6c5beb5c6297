"""Evaluation harness: pipeline, strategy matrix, reports and CLI."""

from .manifest import MisuseManifestEntry, load_manifest
from .matrix import MatrixReport, matrix_configs, run_matrix
from .minicorpus import build_minicorpus
from .pipeline import (MiningProfile, PipelineOptions, RunReport, detection_profile, frequency_profile,
                       run_pipeline)
from .reports import evaluate, report_reductions

__all__ = [
    "MatrixReport", "MiningProfile", "MisuseManifestEntry", "PipelineOptions", "RunReport",
    "build_minicorpus", "detection_profile", "evaluate", "frequency_profile", "load_manifest",
    "matrix_configs", "report_reductions", "run_matrix", "run_pipeline",
]
