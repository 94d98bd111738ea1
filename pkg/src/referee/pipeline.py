"""End-to-end evaluation: graph, context selection, segmentation, judging, scoring."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from .backends import Backend
from .context import ApiDocs, CodeContext, RelatedInfoList, SearchConfig, build_context, search_related
from .errors import InputError
from .graph import Language, build_graph, entities_in, find_function
from .graph.model import ProjectContextGraph
from .judge import ModelConfig, judge_summary
from .scoring import UNIT_WEIGHTS, ConsistencyReport, Weights, aggregate, build_report
from .segmenter import segment

HOP_CHOICES = (0, 1, 2)


@dataclass(frozen=True)
class Target:
    """The input code: a file plus either a byte span or a function name."""

    file: str
    span: tuple[int, int] | None = None
    function: str | None = None

    def __post_init__(self):
        if (self.span is None) == (self.function is None):
            raise InputError("give exactly one of a span or a function name")


@dataclass(frozen=True)
class Selection:
    input_code: str
    related: RelatedInfoList
    span: tuple[int, int]

    @property
    def context(self) -> CodeContext:
        return build_context(self.related, self.input_code)


def select_context(
    graph: ProjectContextGraph,
    repo_root: str | Path,
    target: Target,
    hops: int = 1,
    docs: ApiDocs | None = None,
) -> Selection:
    if hops not in HOP_CHOICES:
        raise InputError(f"hops must be one of {HOP_CHOICES}, got {hops}")
    path = Path(repo_root) / target.file
    if target.function is not None:
        span = find_function(graph, target.file, target.function).span
    else:
        span = target.span
    seeds = entities_in(graph, target.file, span)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not 0 <= span[0] <= span[1] <= len(data):
        raise InputError(f"span {span} lies outside {target.file}")
    input_code = data[span[0] : span[1]].decode("utf-8", errors="replace")
    related = search_related(graph, seeds, SearchConfig(hop_limit=hops), docs, repo_root)
    return Selection(input_code, related, span)


def evaluate_summary(
    repo_root: str | Path,
    target: Target,
    summary: str,
    backend: Backend,
    *,
    language: Language | str = Language.PYTHON,
    hops: int = 1,
    weights: Weights = UNIT_WEIGHTS,
    config: ModelConfig = ModelConfig(),
    docs: ApiDocs | None = None,
    extra_config: Mapping[str, Any] | None = None,
) -> ConsistencyReport:
    graph = build_graph(repo_root, language)
    selection = select_context(graph, repo_root, target, hops, docs if docs is not None else ApiDocs.bundled())
    segments = segment(summary)
    matrix = judge_summary(segments, selection.context, backend, config)
    score = aggregate(matrix, weights)
    echo = {
        "hops": hops,
        "language": Language.parse(language).value,
        "target": {"file": target.file, "span": list(selection.span)},
        "model": config.to_dict(),
    }
    echo.update(extra_config or {})
    return build_report(matrix, segments, selection.related, score, echo, weights)
