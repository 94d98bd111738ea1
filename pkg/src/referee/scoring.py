"""Score aggregation and the auditable consistency report."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from . import __version__
from .context import RelatedInfo
from .errors import EmptyMatrix, InputError, LengthMismatch, OutOfRangeLabel
from .judge import CRITERIA, VerdictMatrix
from .segmenter import Segment

CRITERION_KEYS = tuple(c.id.value for c in CRITERIA)


@dataclass(frozen=True)
class Weights:
    c1: float = 1.0
    c2: float = 1.0
    c3: float = 1.0
    c4: float = 1.0

    def __post_init__(self):
        values = self.as_tuple()
        if any(not math.isfinite(w) or w < 0 for w in values):
            raise InputError("weights must be finite and non-negative")
        if sum(values) <= 0:
            raise InputError("weights must have a positive sum")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.c1, self.c2, self.c3, self.c4)

    @classmethod
    def parse(cls, text: str) -> "Weights":
        """``"0.6,1.2,1.2,1.0"`` or ``"0.6:1.2:1.2:1.0"``."""
        parts = text.replace(":", ",").split(",")
        if len(parts) != 4:
            raise InputError(f"expected four weights, got {text!r}")
        try:
            return cls(*(float(p) for p in parts))
        except ValueError as exc:
            raise InputError(f"invalid weights {text!r}") from exc


UNIT_WEIGHTS = Weights()
TABLE11_WEIGHTS = Weights(0.6, 1.2, 1.2, 1.0)


def aggregate(matrix: VerdictMatrix, weights: Weights = UNIT_WEIGHTS) -> float:
    """Weighted mean of verdicts, normalized by ``n_segments * sum(w)``."""
    if matrix.n_segments == 0:
        raise EmptyMatrix("verdict matrix has no segments")
    w = weights.as_tuple()
    total = math.fsum(wc * v.pass_flag for row in matrix.rows for wc, v in zip(w, row))
    # the exact value lies in [0, 1]; clamp away float rounding
    return min(1.0, max(0.0, total / (matrix.n_segments * math.fsum(w))))


def normalize_label(raw: int) -> float:
    """Map a 1..5 summary label onto (0, 1]."""
    if isinstance(raw, bool) or not isinstance(raw, int) or not 1 <= raw <= 5:
        raise OutOfRangeLabel(f"summary label must be an integer in 1..5, got {raw!r}")
    return raw / 5


@dataclass(frozen=True)
class SegmentReport:
    index: int
    text: str
    failed: tuple[str, ...]
    row_score: float

    def to_dict(self) -> dict[str, Any]:
        return {"index": self.index, "text": self.text, "failed": list(self.failed), "row_score": self.row_score}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SegmentReport":
        return cls(data["index"], data["text"], tuple(data["failed"]), data["row_score"])


@dataclass(frozen=True)
class ConsistencyReport:
    overall_score: float
    per_segment: tuple[SegmentReport, ...]
    context_items: tuple[RelatedInfo, ...]
    matrix: VerdictMatrix
    config: Mapping[str, Any] = field(default_factory=dict)
    version: str = __version__

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": self.version,
            "overall_score": self.overall_score,
            "per_segment": [s.to_dict() for s in self.per_segment],
            "context_items": [c.to_dict() for c in self.context_items],
            "matrix": self.matrix.to_dict(),
            "config": dict(self.config),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ConsistencyReport":
        return cls(
            overall_score=data["overall_score"],
            per_segment=tuple(SegmentReport.from_dict(s) for s in data["per_segment"]),
            context_items=tuple(RelatedInfo.from_dict(c) for c in data["context_items"]),
            matrix=VerdictMatrix.from_dict(data["matrix"]),
            config=data.get("config", {}),
            version=data.get("version", __version__),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ConsistencyReport":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        lines = [f"score: {self.overall_score:.3f}", ""]
        for seg in self.per_segment:
            failed = ", ".join(seg.failed) if seg.failed else "-"
            lines.append(f"[{seg.index}] {seg.row_score:.3f}  failed: {failed}")
            lines.append(f"    {seg.text}")
        if self.context_items:
            lines.append("")
            lines.append("context:")
            for item in self.context_items:
                lines.append(f"  {item.dependency_class.value:<10} {item.entity_name}  ({item.source})")
        return "\n".join(lines) + "\n"


def build_report(
    matrix: VerdictMatrix,
    segments: list[Segment],
    related: Iterable[RelatedInfo],
    score: float | None = None,
    config: Mapping[str, Any] | None = None,
    weights: Weights = UNIT_WEIGHTS,
) -> ConsistencyReport:
    if matrix.n_segments != len(segments):
        raise LengthMismatch(f"{matrix.n_segments} verdict rows for {len(segments)} segments")
    expected = aggregate(matrix, weights)
    if score is None:
        score = expected
    elif abs(score - expected) > 1e-12:
        raise InputError(f"score {score} does not match the matrix aggregate {expected}")
    w = weights.as_tuple()
    rows = []
    for seg, row in zip(segments, matrix.rows):
        failed = tuple(v.criterion.value for v in row if v.pass_flag == 0)
        row_score = min(1.0, math.fsum(wc * v.pass_flag for wc, v in zip(w, row)) / math.fsum(w))
        rows.append(SegmentReport(seg.index, seg.text, failed, row_score))
    cfg = dict(config or {})
    cfg.setdefault("weights", list(w))
    return ConsistencyReport(score, tuple(rows), tuple(related), matrix, cfg)
