"""Benchmark loading, statistics and runs."""

from .agreement import AgreementResult, Level, krippendorff_alpha
from .dataset import BenchmarkSample, Dataset, GoldSegment, Rejection, dump_dataset, load_dataset
from .runner import BenchmarkReport, Prediction, compute_metrics, evaluate_sample, load_predictions, run_benchmark
from .stats import CorrelationResult, correlate, kendall_tau, pearson, spearman
from .synthetic import make_synthetic
from .voting import Confusion, segment_accuracy, vote_candidate_label

__all__ = [
    "AgreementResult",
    "BenchmarkReport",
    "BenchmarkSample",
    "Confusion",
    "CorrelationResult",
    "Dataset",
    "GoldSegment",
    "Level",
    "Prediction",
    "Rejection",
    "compute_metrics",
    "correlate",
    "dump_dataset",
    "evaluate_sample",
    "kendall_tau",
    "krippendorff_alpha",
    "load_dataset",
    "load_predictions",
    "make_synthetic",
    "pearson",
    "run_benchmark",
    "segment_accuracy",
    "spearman",
    "vote_candidate_label",
]
