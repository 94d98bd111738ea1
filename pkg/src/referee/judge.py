"""Segment-level judging: one binary verdict per (segment, criterion)."""

from __future__ import annotations

import logging
import re
from concurrent.futures import FIRST_EXCEPTION, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Any, Iterable

from .backends import Backend, JudgeRequest
from .context import CodeContext
from .errors import EmptySummary, LengthMismatch, UnparseableVerdict
from .segmenter import Segment

log = logging.getLogger(__name__)

PROMPT_VERSION = "segment_criterion_v1"


class CriterionId(str, Enum):
    C1_NAME = "C1"
    C2_TYPE = "C2"
    C3_FUNCTIONALITY = "C3"
    C4_CONTEXT_IRRELEVANT = "C4"


@dataclass(frozen=True)
class Criterion:
    id: CriterionId
    title: str
    definition: str


CRITERIA: tuple[Criterion, ...] = (
    Criterion(
        CriterionId.C1_NAME,
        "Name Inconsistency",
        "The name of a function, class, or variable in the summary does not match the actual "
        "identifier in the input code or mistakenly refers to a different entity with the same "
        "name in the project.",
    ),
    Criterion(
        CriterionId.C2_TYPE,
        "Type Inconsistency",
        "The described function’s return type or variable type in the summary is inconsistent "
        "with the actual type in the input code or in directly dependent functions.",
    ),
    Criterion(
        CriterionId.C3_FUNCTIONALITY,
        "Functionality Inconsistency",
        "The functionality or purpose described in the summary does not accurately reflect what "
        "the input code or its dependent functions actually implement. This often arises when "
        "dependency relationships are ignored or misinterpreted, leading to an incorrect "
        "description of behavior.",
    ),
    Criterion(
        CriterionId.C4_CONTEXT_IRRELEVANT,
        "Context Irrelevant",
        "The summary contains content that is unnecessary or irrelevant to the input code or "
        "relevant information, such as descriptions of unrelated entities or overly generalized "
        "dependency context that does not contribute to understanding the function.",
    ),
)
CRITERION_BY_ID = {c.id: c for c in CRITERIA}


def criterion(key: str | CriterionId) -> Criterion:
    return CRITERION_BY_ID[CriterionId(key)]


@dataclass(frozen=True)
class ModelConfig:
    endpoint: str = ""
    model_id: str = ""
    temperature: float = 0.1
    top_p: float = 0.9
    top_k: int = 50
    max_new_tokens: int = 4
    max_retries: int = 3
    timeout: float = 60.0
    max_in_flight: int = 4
    send_top_k: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "endpoint": self.endpoint,
            "model_id": self.model_id,
            "temperature": self.temperature,
            "top_p": self.top_p,
            "top_k": self.top_k,
            "max_new_tokens": self.max_new_tokens,
            "max_retries": self.max_retries,
            "timeout": self.timeout,
            "max_in_flight": self.max_in_flight,
            "send_top_k": self.send_top_k,
        }


@dataclass(frozen=True)
class Verdict:
    segment_index: int
    criterion: CriterionId
    pass_flag: int
    raw_response: str
    attempts: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "segment_index": self.segment_index,
            "criterion": self.criterion.value,
            "pass_flag": self.pass_flag,
            "raw_response": self.raw_response,
            "attempts": self.attempts,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Verdict":
        return cls(data["segment_index"], CriterionId(data["criterion"]), data["pass_flag"],
                   data["raw_response"], data["attempts"])


@dataclass(frozen=True)
class VerdictMatrix:
    """``n_segments`` rows of four verdicts in criterion order C1..C4."""

    rows: tuple[tuple[Verdict, ...], ...]
    n_segments: int = field(init=False)

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        order = tuple(c.id for c in CRITERIA)
        for i, row in enumerate(rows):
            if tuple(v.criterion for v in row) != order:
                raise LengthMismatch(f"row {i} is not ordered C1..C4")
            if any(v.segment_index != i for v in row):
                raise LengthMismatch(f"row {i} holds verdicts of another segment")
            if any(v.pass_flag not in (0, 1) for v in row):
                raise ValueError("pass_flag must be 0 or 1")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "n_segments", len(rows))

    @classmethod
    def from_flags(cls, flags: Iterable[Iterable[int]]) -> "VerdictMatrix":
        rows = []
        for i, row in enumerate(flags):
            row = list(row)
            if len(row) != len(CRITERIA):
                raise LengthMismatch(f"row {i} has {len(row)} entries, expected {len(CRITERIA)}")
            rows.append(tuple(Verdict(i, c.id, int(f), str(int(f)), 1) for c, f in zip(CRITERIA, row)))
        return cls(tuple(rows))

    def flags(self) -> list[list[int]]:
        return [[v.pass_flag for v in row] for row in self.rows]

    def to_dict(self) -> dict[str, Any]:
        return {"n_segments": self.n_segments, "rows": [[v.to_dict() for v in r] for r in self.rows]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "VerdictMatrix":
        return cls(tuple(tuple(Verdict.from_dict(v) for v in row) for row in data["rows"]))


# --------------------------------------------------------------------- prompts


def _template(part: str) -> str:
    text = resources.files("referee.prompts").joinpath(f"{PROMPT_VERSION}.{part}.txt").read_text("utf-8")
    return text[:-1] if text.endswith("\n") else text


_PLACEHOLDER = re.compile(r"\{(criterion|explanation|related_information|input_code|segment)\}")


def _fill(template: str, values: dict[str, str]) -> str:
    # single pass so substituted code containing "{segment}" is left alone
    return _PLACEHOLDER.sub(lambda m: values[m.group(1)], template)


def render_prompt(crit: Criterion, context: CodeContext | str, segment: Segment) -> tuple[str, str]:
    """Fill the segment-level criterion prompt; returns ``(system, user)``.

    A plain string ``context`` is treated as input code with no related
    information, in which case the related-information line is dropped.
    """
    if isinstance(context, str):
        context = CodeContext("", context)
    values = {
        "criterion": crit.title,
        "explanation": crit.definition,
        "related_information": context.related_text,
        "input_code": context.input_code,
        "segment": segment.text,
    }
    system = _fill(_template("system"), values)
    user_template = _template("user")
    if not context.related_text:
        user_template = "\n".join(
            line for line in user_template.split("\n") if not line.startswith("(Related Information)")
        )
    return system, _fill(user_template, values)


# ---------------------------------------------------------------------- parsing

_VERDICT = re.compile(
    r"""^[\s*"'`(\[#]*                 # markdown / quoting noise
        (?:score[^:=\w]*(?:\(score\ only\))?\s*[:=]\s*[\s*"'`(\[]*)?   # "Score:" label
        ([01])(?:\.0*)?(?![\d.])""",
    re.IGNORECASE | re.VERBOSE,
)


def parse_verdict(response: str) -> int | None:
    """0 or 1 from a model response, ``None`` when no binary token leads it."""
    match = _VERDICT.match(response or "")
    return int(match.group(1)) if match else None


# ---------------------------------------------------------------------- judging


def judge_segment(
    segment: Segment,
    context: CodeContext | str,
    crit: Criterion,
    backend: Backend,
    config: ModelConfig = ModelConfig(),
) -> Verdict:
    system, user = render_prompt(crit, context, segment)
    request = JudgeRequest(system, user, segment.index, crit.id.value)
    attempts = max(1, config.max_retries)
    response = ""
    for attempt in range(1, attempts + 1):
        response = backend.complete(request, config)
        flag = parse_verdict(response)
        if flag is not None:
            return Verdict(segment.index, crit.id, flag, response, attempt)
        log.info("unparseable verdict %r for segment %d %s (attempt %d)",
                 response, segment.index, crit.id.value, attempt)
    raise UnparseableVerdict(
        f"no binary verdict for segment {segment.index} {crit.id.value} after {attempts} attempts",
        attempts=attempts,
        last_response=response,
    )


def judge_summary(
    segments: list[Segment],
    context: CodeContext | str,
    backend: Backend,
    config: ModelConfig = ModelConfig(),
) -> VerdictMatrix:
    """Judge every segment against C1..C4; the matrix is assembled in order."""
    if not segments:
        raise EmptySummary("summary has no segments")
    tasks = [(seg, crit) for seg in segments for crit in CRITERIA]
    if config.max_in_flight <= 1:
        verdicts = [judge_segment(seg, context, crit, backend, config) for seg, crit in tasks]
    else:
        with ThreadPoolExecutor(max_workers=config.max_in_flight) as pool:
            futures = [pool.submit(judge_segment, seg, context, crit, backend, config) for seg, crit in tasks]
            done, pending = wait(futures, return_when=FIRST_EXCEPTION)
            if any(f.exception() is not None for f in done):
                for f in pending:
                    f.cancel()
                wait(futures)
                for f in futures:
                    if not f.cancelled() and f.exception() is not None:
                        raise f.exception()
            verdicts = [f.result() for f in futures]
    width = len(CRITERIA)
    rows = tuple(tuple(verdicts[i * width : (i + 1) * width]) for i in range(len(segments)))
    # re-index so the matrix is well-formed for any segment numbering
    rows = tuple(
        tuple(Verdict(i, v.criterion, v.pass_flag, v.raw_response, v.attempts) for v in row)
        for i, row in enumerate(rows)
    )
    return VerdictMatrix(rows)
