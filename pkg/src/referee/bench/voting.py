"""Candidate-label voting and segment-level accuracy."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Any, Sequence

from ..errors import InvalidLabel, ShapeMismatch

CRITERION_KEYS = ("C1", "C2", "C3", "C4")


def vote_candidate_label(llm_labels: Sequence[int], level: str = "summary") -> int:
    """Majority label, else (summary level) the label closest to the mean, ties to the lower."""
    allowed = {"summary": range(1, 6), "segment": range(0, 2)}.get(level)
    if allowed is None:
        raise InvalidLabel(f"unknown level {level!r}")
    if len(llm_labels) != 3:
        raise InvalidLabel("exactly three labels are voted")
    for label in llm_labels:
        if isinstance(label, bool) or not isinstance(label, int) or label not in allowed:
            raise InvalidLabel(f"{label!r} is not a valid {level} label")
    value, count = Counter(llm_labels).most_common(1)[0]
    if count >= 2:
        return value
    mean = sum(llm_labels) / 3
    return min(sorted(llm_labels), key=lambda v: abs(v - mean))


@dataclass(frozen=True)
class Confusion:
    """Positive class is "inconsistent" (verdict 0)."""

    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else float("nan")

    def to_dict(self) -> dict[str, Any]:
        return {"accuracy": self.accuracy, "TP": self.tp, "FP": self.fp, "FN": self.fn, "TN": self.tn}


def segment_accuracy(
    predicted: Sequence[Sequence[Sequence[int]]], gold: Sequence[Sequence[Sequence[int]]]
) -> dict[str, Confusion]:
    """Per-criterion confusion over samples x segments x criteria flags, plus ``"all"``."""
    if len(predicted) != len(gold):
        raise ShapeMismatch(f"{len(predicted)} predicted samples vs {len(gold)} gold")
    counts = {c: [0, 0, 0, 0] for c in CRITERION_KEYS}
    for s, (pred_rows, gold_rows) in enumerate(zip(predicted, gold)):
        if len(pred_rows) != len(gold_rows):
            raise ShapeMismatch(f"sample {s}: {len(pred_rows)} predicted segments vs {len(gold_rows)} gold")
        for pred_row, gold_row in zip(pred_rows, gold_rows):
            if len(pred_row) != 4 or len(gold_row) != 4:
                raise ShapeMismatch(f"sample {s}: rows must hold four flags")
            for c, p, g in zip(CRITERION_KEYS, pred_row, gold_row):
                slot = {(0, 0): 0, (0, 1): 1, (1, 0): 2, (1, 1): 3}[(int(p), int(g))]
                counts[c][slot] += 1
    result = {c: Confusion(*v) for c, v in counts.items()}
    result["all"] = Confusion(*(sum(v[i] for v in counts.values()) for i in range(4)))
    return result
