"""Model backends: a chat-completions HTTP client and a scripted replay stub."""

from __future__ import annotations

import json
import logging
import os
import random
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Any, Callable, Mapping, Protocol

import httpx

from .errors import BackendError, BackendUnavailable, InputError

if TYPE_CHECKING:
    from .judge import ModelConfig

log = logging.getLogger(__name__)

API_KEY_ENV = "REFEREE_API_KEY"
CRITERION_KEYS = ("C1", "C2", "C3", "C4")


@dataclass(frozen=True)
class JudgeRequest:
    system: str
    user: str
    segment_index: int
    criterion: str

    @property
    def key(self) -> str:
        return f"{self.segment_index}:{self.criterion}"


class Backend(Protocol):
    def complete(self, request: JudgeRequest, config: "ModelConfig") -> str: ...


# ----------------------------------------------------------------------- stub


class ScriptedStub:
    """Replays responses keyed by ``"<segment_index>:<criterion>"``.

    A value may be a string or a list of strings; lists are consumed in order
    and the last entry repeats once exhausted.
    """

    def __init__(self, verdicts: Mapping[str, str | list[str]], *, default: str | None = None):
        self._script = {k: list(v) if isinstance(v, list) else [v] for k, v in verdicts.items()}
        for key, values in self._script.items():
            if not values or not all(isinstance(v, str) for v in values):
                raise InputError(f"replay entry {key!r} must be a string or non-empty list of strings")
        self._default = default
        self._calls: dict[str, int] = {}
        self._lock = threading.Lock()
        self.requests: list[JudgeRequest] = []

    @classmethod
    def constant(cls, response: str) -> "ScriptedStub":
        return cls({}, default=response)

    @classmethod
    def from_flags(cls, flags: list[list[int]]) -> "ScriptedStub":
        return cls({f"{i}:{c}": str(int(f)) for i, row in enumerate(flags) for c, f in zip(CRITERION_KEYS, row)})

    def complete(self, request: JudgeRequest, config: "ModelConfig") -> str:
        with self._lock:
            self.requests.append(request)
            values = self._script.get(request.key)
            if values is None:
                if self._default is None:
                    raise BackendError(f"replay has no response for {request.key}")
                return self._default
            n = self._calls.get(request.key, 0)
            self._calls[request.key] = n + 1
            return values[min(n, len(values) - 1)]


@dataclass(frozen=True)
class ReplayFile:
    """Either one flat script or one script per sample id."""

    verdicts: Mapping[str, Any] | None = None
    samples: Mapping[str, Mapping[str, Any]] | None = None
    default: str | None = None

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ReplayFile":
        if not isinstance(data, Mapping) or not ({"verdicts", "samples"} & data.keys()):
            raise InputError('replay file needs a "verdicts" or "samples" object')
        return cls(data.get("verdicts"), data.get("samples"), data.get("default"))

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        if self.verdicts is not None:
            out["verdicts"] = dict(self.verdicts)
        if self.samples is not None:
            out["samples"] = {k: dict(v) for k, v in self.samples.items()}
        if self.default is not None:
            out["default"] = self.default
        return out

    def for_sample(self, sample_id: str | None = None) -> ScriptedStub:
        if sample_id is not None and self.samples is not None:
            if sample_id not in self.samples:
                raise BackendError(f"replay has no script for sample {sample_id!r}")
            return ScriptedStub(self.samples[sample_id].get("verdicts", {}), default=self.default)
        if self.verdicts is None:
            raise InputError("replay file is per-sample; a sample id is required")
        return ScriptedStub(self.verdicts, default=self.default)

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def from_samples(cls, samples, *, flip_rate: float = 0.0, seed: int = 0) -> "ReplayFile":
        """Script each sample from its gold segment labels, flipping each
        verdict with probability ``flip_rate``."""
        if not 0.0 <= flip_rate <= 1.0:
            raise InputError("flip_rate must lie in [0, 1]")
        rng = random.Random(seed)
        scripts: dict[str, dict[str, Any]] = {}
        for sample in samples:
            verdicts = {}
            for i, seg in enumerate(sample.segments):
                for c in CRITERION_KEYS:
                    flag = seg.labels[c]
                    if flip_rate and rng.random() < flip_rate:
                        flag = 1 - flag
                    verdicts[f"{i}:{c}"] = str(flag)
            scripts[sample.id] = {"verdicts": verdicts}
        return cls(samples=scripts)


def load_replay(path: str | Path) -> ReplayFile:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise InputError(f"replay file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"replay file is not valid JSON: {exc}") from exc
    return ReplayFile.from_dict(data)


# ----------------------------------------------------------------------- HTTP


class HttpBackend:
    """POSTs ``{endpoint}/chat/completions`` in the common wire format."""

    RETRY_STATUS = frozenset({408, 429, 500, 502, 503, 504})

    def __init__(
        self,
        *,
        api_key: str | None = None,
        transport: httpx.BaseTransport | None = None,
        backoff: float = 1.0,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self._transport = transport
        self._backoff = backoff
        self._sleep = sleep
        self._top_k_logged = False

    def payload(self, request: JudgeRequest, config: "ModelConfig") -> dict[str, Any]:
        body: dict[str, Any] = {
            "model": config.model_id,
            "messages": [
                {"role": "system", "content": request.system},
                {"role": "user", "content": request.user},
            ],
            "temperature": config.temperature,
            "top_p": config.top_p,
            "max_tokens": config.max_new_tokens,
        }
        if config.send_top_k:
            body["top_k"] = config.top_k
        elif not self._top_k_logged:
            log.info("top_k=%d not sent; enable send_top_k if the endpoint accepts it", config.top_k)
            self._top_k_logged = True
        return body

    def complete(self, request: JudgeRequest, config: "ModelConfig") -> str:
        if not config.endpoint:
            raise BackendUnavailable("no endpoint configured")
        url = config.endpoint.rstrip("/") + "/chat/completions"
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        body = self.payload(request, config)
        attempts = max(1, config.max_retries)
        last = ""
        with httpx.Client(transport=self._transport, timeout=config.timeout) as client:
            for attempt in range(attempts):
                try:
                    resp = client.post(url, json=body, headers=headers)
                except httpx.HTTPError as exc:
                    last = f"{type(exc).__name__}: {exc}"
                else:
                    if resp.status_code == 200:
                        return _content(resp)
                    last = f"HTTP {resp.status_code}"
                    if resp.status_code not in self.RETRY_STATUS:
                        break
                if attempt + 1 < attempts:
                    self._sleep(self._backoff * 2**attempt)
        raise BackendUnavailable(f"{url}: {last}")


def _content(resp: httpx.Response) -> str:
    try:
        return resp.json()["choices"][0]["message"]["content"] or ""
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise BackendUnavailable(f"malformed chat-completions response: {exc}") from exc
