"""Orchestration: gating candidates, end-to-end runs, classification, metrics."""

from .gate import FIXED_CODE, RETRY, TO_VERIFIER, GateDecision, validate_candidate
from .metrics import EmptyGroup, GroupMetrics, MetricsTable, compute_metrics
from .report import (COMPILATION, CORRECT, FIXED, GAVE_UP, NO_DIAGNOSIS, OTHER,
                     OUTCOME_CLASSES, SCHEMA_VERSION, VERIFIED, MissingGroundTruth,
                     PipelineReport, classify_outcome, strip_timing)
from .run import PipelineConfig, run_batch, run_pipeline

__all__ = [
    "FIXED_CODE", "RETRY", "TO_VERIFIER", "GateDecision", "validate_candidate",
    "EmptyGroup", "GroupMetrics", "MetricsTable", "compute_metrics", "COMPILATION",
    "CORRECT", "FIXED", "GAVE_UP", "NO_DIAGNOSIS", "OTHER", "OUTCOME_CLASSES",
    "SCHEMA_VERSION", "VERIFIED", "MissingGroundTruth", "PipelineReport",
    "classify_outcome", "strip_timing", "PipelineConfig", "run_batch", "run_pipeline",
]
