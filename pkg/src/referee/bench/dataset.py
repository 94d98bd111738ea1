"""Labeled benchmark samples stored as JSONL."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping

from ..errors import EmptyDataset, FileNotFound, InputError
from ..graph.model import Language
from ..segmenter import Segment

CRITERION_KEYS = ("C1", "C2", "C3", "C4")


@dataclass(frozen=True)
class GoldSegment:
    text: str
    labels: Mapping[str, int]

    @property
    def flags(self) -> list[int]:
        return [self.labels[c] for c in CRITERION_KEYS]

    def to_dict(self) -> dict[str, Any]:
        return {"text": self.text, "labels": {c: self.labels[c] for c in CRITERION_KEYS}}


@dataclass(frozen=True)
class BenchmarkSample:
    id: str
    language: Language
    input_code: str
    summary: str
    summary_label: int
    segments: tuple[GoldSegment, ...]
    related_info: str | None = None
    repo_ref: str | None = None

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "BenchmarkSample":
        """Validate and build one sample; raises InputError with the reason."""
        if not isinstance(data, Mapping):
            raise InputError("sample is not a JSON object")
        missing = [k for k in ("id", "language", "input_code", "summary", "summary_label", "segments") if k not in data]
        if missing:
            raise InputError(f"missing fields: {', '.join(missing)}")
        label = data["summary_label"]
        if isinstance(label, bool) or not isinstance(label, int):
            raise InputError("summary_label is not an integer")
        if not 1 <= label <= 5:
            raise InputError("label out of range")
        try:
            language = Language.parse(data["language"])
        except (ValueError, AttributeError) as exc:
            raise InputError(f"unknown language {data['language']!r}") from exc
        segments = []
        for i, seg in enumerate(data["segments"] or []):
            labels = seg.get("labels", {}) if isinstance(seg, Mapping) else {}
            if set(labels) != set(CRITERION_KEYS):
                raise InputError(f"segment {i} needs labels for exactly {', '.join(CRITERION_KEYS)}")
            if any(isinstance(v, bool) or v not in (0, 1) for v in labels.values()):
                raise InputError(f"segment {i} has a non-binary label")
            segments.append(GoldSegment(str(seg.get("text", "")), {c: labels[c] for c in CRITERION_KEYS}))
        if not segments:
            raise InputError("sample has no segments")
        sample = cls(
            id=str(data["id"]),
            language=language,
            input_code=data["input_code"],
            summary=data["summary"],
            summary_label=label,
            segments=tuple(segments),
            related_info=data.get("related_info"),
            repo_ref=data.get("repo_ref"),
        )
        sample.segment_objects()
        return sample

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "id": self.id,
            "language": self.language.value,
            "input_code": self.input_code,
            "summary": self.summary,
            "summary_label": self.summary_label,
            "segments": [s.to_dict() for s in self.segments],
        }
        if self.related_info is not None:
            out["related_info"] = self.related_info
        if self.repo_ref is not None:
            out["repo_ref"] = self.repo_ref
        return out

    def segment_objects(self) -> list[Segment]:
        """Gold segments located in the summary, whitespace-tolerant and in order."""
        out = []
        pos = 0
        for i, gold in enumerate(self.segments):
            words = gold.text.split()
            if not words:
                raise InputError(f"segment {i} is empty")
            pattern = re.compile(r"\s+".join(re.escape(w) for w in words))
            match = pattern.search(self.summary, pos)
            if match is None:
                raise InputError(f"segment {i} is not contained in the summary")
            out.append(Segment(i, gold.text, match.span()))
            pos = match.end()
        return out

    def gold_flags(self) -> list[list[int]]:
        return [s.flags for s in self.segments]


@dataclass(frozen=True)
class Rejection:
    line: int
    reason: str

    def to_dict(self) -> dict[str, Any]:
        return {"line": self.line, "reason": self.reason}


class Dataset(list):
    """Loaded samples; ``rejections`` lists invalid lines."""

    def __init__(self, samples: Iterable[BenchmarkSample] = (), rejections: Iterable[Rejection] = ()):
        super().__init__(samples)
        self.rejections: list[Rejection] = list(rejections)


def load_dataset(path: str | Path) -> Dataset:
    path = Path(path)
    if not path.is_file():
        raise FileNotFound(f"dataset not found: {path}")
    samples, rejections = [], []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                sample = BenchmarkSample.from_dict(json.loads(line))
                if sample.id in seen:
                    raise InputError(f"duplicate id {sample.id!r}")
            except json.JSONDecodeError as exc:
                rejections.append(Rejection(lineno, f"invalid JSON: {exc.msg}"))
                continue
            except InputError as exc:
                rejections.append(Rejection(lineno, str(exc)))
                continue
            seen.add(sample.id)
            samples.append(sample)
    if not samples:
        raise EmptyDataset(f"no valid samples in {path} ({len(rejections)} rejected)")
    return Dataset(samples, rejections)


def dump_dataset(samples: Iterable[BenchmarkSample], path: str | Path) -> None:
    lines = [json.dumps(s.to_dict(), ensure_ascii=False, sort_keys=True) for s in samples]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
