"""Benchmark runs: evaluate samples, then correlate against human labels."""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

from .. import __version__
from ..backends import Backend
from ..context import CodeContext
from ..errors import EmptyDataset, RefereeError
from ..judge import ModelConfig, judge_summary
from ..scoring import UNIT_WEIGHTS, Weights, aggregate, normalize_label
from .dataset import BenchmarkSample
from .stats import CorrelationResult, correlate
from .voting import segment_accuracy

LANGUAGE_LABELS = {"python": "Python", "java": "Java"}


@dataclass(frozen=True)
class Prediction:
    sample_id: str
    score: float
    flags: list[list[int]]

    def to_dict(self) -> dict[str, Any]:
        return {"score": self.score, "flags": self.flags}


@dataclass
class BenchmarkReport:
    correlations: dict[str, CorrelationResult | str]
    accuracy: dict[str, Any]
    predictions: dict[str, Prediction]
    failures: dict[str, str]
    config: dict[str, Any]
    timings: dict[str, float] = field(default_factory=dict)
    version: str = __version__

    def metrics(self) -> dict[str, Any]:
        """Everything except wall-clock timings, so reruns compare byte-equal."""
        return {
            "version": self.version,
            "config": self.config,
            "n_evaluated": len(self.predictions),
            "n_failed": len(self.failures),
            "failures": dict(sorted(self.failures.items())),
            "correlations": {
                k: (v.to_dict() if isinstance(v, CorrelationResult) else {"error": v})
                for k, v in self.correlations.items()
            },
            "segment_accuracy": self.accuracy,
            "predictions": {k: p.to_dict() for k, p in sorted(self.predictions.items())},
        }

    def metrics_json(self) -> str:
        return json.dumps(self.metrics(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    def timings_json(self) -> str:
        return json.dumps(dict(sorted(self.timings.items())), indent=2) + "\n"

    def table(self) -> str:
        """Aligned columns: r_p, r_s, tau and their average per language."""
        header = ("Language", "n", "r_p", "r_s", "tau", "Average")
        rows = [header]
        for key, result in self.correlations.items():
            if isinstance(result, CorrelationResult):
                rows.append((key, str(result.n), *(f"{v:.3f}" for v in (
                    result.pearson, result.spearman, result.kendall, result.average))))
            else:
                rows.append((key, "-", "n/a", "n/a", "n/a", "n/a"))
        widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
        lines = ["  ".join(cell.ljust(w) if i == 0 else cell.rjust(w) for i, (cell, w) in enumerate(zip(r, widths)))
                 for r in rows]
        if any(not isinstance(v, CorrelationResult) for v in self.correlations.values()):
            lines.append("")
            lines.extend(f"{k}: {v}" for k, v in self.correlations.items() if not isinstance(v, CorrelationResult))
        return "\n".join(lines) + "\n"


def _clean(value: Any) -> Any:
    if isinstance(value, float) and math.isnan(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_clean(v) for v in value]
    return value


def _language_key(sample: BenchmarkSample) -> str:
    return LANGUAGE_LABELS.get(sample.language.value, sample.language.value)


def evaluate_sample(
    sample: BenchmarkSample, backend: Backend, config: ModelConfig, weights: Weights = UNIT_WEIGHTS
) -> Prediction:
    """Judge the gold segmentation against the sample's code and pre-extracted context."""
    context = CodeContext(sample.related_info or "", sample.input_code)
    matrix = judge_summary(sample.segment_objects(), context, backend, config)
    return Prediction(sample.id, aggregate(matrix, weights), matrix.flags())


def compute_metrics(
    samples: Sequence[BenchmarkSample],
    predictions: Mapping[str, Prediction],
) -> tuple[dict[str, CorrelationResult | str], dict[str, Any]]:
    """Correlations per language and overall, plus segment accuracy."""
    groups: dict[str, list[BenchmarkSample]] = {}
    for sample in samples:
        if sample.id in predictions:
            groups.setdefault(_language_key(sample), []).append(sample)
    ordered = [k for k in ("Python", "Java") if k in groups] + sorted(k for k in groups if k not in ("Python", "Java"))
    scored = [s for s in samples if s.id in predictions]
    keys = ordered + ["all"] if scored else []

    correlations: dict[str, CorrelationResult | str] = {}
    for key in keys:
        members = scored if key == "all" else groups[key]
        x = [predictions[s.id].score for s in members]
        y = [normalize_label(s.summary_label) for s in members]
        try:
            correlations[key] = correlate(x, y)
        except RefereeError as exc:
            correlations[key] = f"{exc.code}: {exc}"

    accuracy: dict[str, Any] = {}
    for key in keys:
        members = scored if key == "all" else groups[key]
        if any(not predictions[s.id].flags for s in members):
            accuracy[key] = None
            continue
        confusion = segment_accuracy([predictions[s.id].flags for s in members], [s.gold_flags() for s in members])
        accuracy[key] = {c: _clean(v.to_dict()) for c, v in confusion.items()}
    return correlations, accuracy


def run_benchmark(
    samples: Sequence[BenchmarkSample],
    backend_for: Callable[[BenchmarkSample], Backend],
    config: ModelConfig = ModelConfig(),
    weights: Weights = UNIT_WEIGHTS,
    *,
    workers: int = 1,
    extra_config: Mapping[str, Any] | None = None,
    clock: Callable[[], float] = time.perf_counter,
) -> BenchmarkReport:
    """Evaluate every sample; failing samples are excluded and counted."""
    if not samples:
        raise EmptyDataset("benchmark needs at least one sample")

    def one(sample: BenchmarkSample):
        start = clock()
        try:
            result: Prediction | str = evaluate_sample(sample, backend_for(sample), config, weights)
        except RefereeError as exc:
            result = f"{exc.code}: {exc}"
        return sample.id, result, clock() - start

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, samples))
    else:
        outcomes = [one(s) for s in samples]

    predictions: dict[str, Prediction] = {}
    failures: dict[str, str] = {}
    timings: dict[str, float] = {}
    for sample_id, result, elapsed in outcomes:
        timings[sample_id] = elapsed
        if isinstance(result, Prediction):
            predictions[sample_id] = result
        else:
            failures[sample_id] = result

    correlations, accuracy = compute_metrics(samples, predictions)
    cfg = {"model": config.to_dict(), "weights": list(weights.as_tuple())}
    cfg.update(extra_config or {})
    return BenchmarkReport(correlations, accuracy, predictions, failures, cfg, timings)


def load_predictions(data: Mapping[str, Any]) -> dict[str, Prediction]:
    """Accepts a ``metrics`` report or ``{"predictions": {id: {"score", "flags"}}}``."""
    raw = data.get("predictions", data)
    out = {}
    for sample_id, entry in raw.items():
        if isinstance(entry, Mapping):
            out[sample_id] = Prediction(sample_id, float(entry["score"]), entry.get("flags") or [])
        else:
            out[sample_id] = Prediction(sample_id, float(entry), [])
    return out
