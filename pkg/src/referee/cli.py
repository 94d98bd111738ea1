"""Command line entry point: ``referee graph|context|segment|evaluate|bench``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

from . import __version__
from .backends import HttpBackend, ReplayFile, load_replay
from .bench import compute_metrics, dump_dataset, load_dataset, load_predictions, make_synthetic, run_benchmark
from .bench.runner import BenchmarkReport
from .context import ApiDocs
from .errors import BackendError, FileNotFound, InputError, RefereeError
from .graph import Language, build_graph
from .judge import ModelConfig
from .pipeline import HOP_CHOICES, Target, evaluate_summary, select_context
from .scoring import Weights
from .segmenter import segment

log = logging.getLogger("referee")

CONFIG_FILE = "referee.json"
ENV_PREFIX = "REFEREE_"
EXIT_OK, EXIT_INPUT, EXIT_BACKEND = 0, 1, 2


# ----------------------------------------------------------------------- config


class Settings:
    """Resolves options with precedence flags > config file > environment."""

    def __init__(self, args: argparse.Namespace, file_values: Mapping[str, Any], env: Mapping[str, str]):
        self.args = args
        self.file = file_values
        self.env = env

    def layers(self, name: str) -> list[Any]:
        return [
            getattr(self.args, name, None),
            self.file.get(name),
            self.env.get(ENV_PREFIX + name.upper()),
        ]

    def get(self, name: str, default: Any = None, convert: Callable[[Any], Any] = lambda v: v) -> Any:
        for value in self.layers(name):
            if value is not None:
                return convert(value)
        return default

    def backend_choice(self) -> tuple[str, str | None]:
        """``("stub", path)`` or ``("http", None)``; the highest layer naming one wins."""
        for stub, endpoint in zip(self.layers("stub"), self.layers("endpoint")):
            if stub is not None and endpoint is not None:
                raise InputError("choose either a stub replay file or an endpoint, not both")
            if stub is not None:
                return "stub", str(stub)
            if endpoint is not None:
                return "http", None
        raise InputError("no backend: pass --stub REPLAY or --endpoint URL --model ID")

    def model_config(self) -> ModelConfig:
        cfg = ModelConfig(
            endpoint=self.get("endpoint", ""),
            model_id=self.get("model", ""),
            max_retries=self.get("max_retries", 3, int),
            timeout=self.get("timeout", 60.0, float),
            max_in_flight=self.get("max_in_flight", 4, int),
            send_top_k=self.get("send_top_k", False, _bool),
        )
        if cfg.endpoint and not cfg.model_id and self.backend_choice()[0] == "http":
            raise InputError("--endpoint needs --model")
        return cfg

    def weights(self) -> Weights:
        value = self.get("weights")
        if value is None:
            return Weights()
        if isinstance(value, (list, tuple)):
            return Weights(*map(float, value))
        return Weights.parse(str(value))

    def hops(self) -> int:
        hops = self.get("hops", 1, int)
        if hops not in HOP_CHOICES:
            raise InputError(f"hops must be one of {HOP_CHOICES}")
        return hops

    def language(self) -> Language:
        try:
            return Language.parse(self.get("language", "python"))
        except ValueError as exc:
            raise InputError(str(exc)) from exc


def _bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in {"1", "true", "yes", "on"}


def _load_config_file(path: str | None) -> dict[str, Any]:
    candidate = Path(path) if path else Path(CONFIG_FILE)
    if not candidate.is_file():
        if path:
            raise FileNotFound(f"config file not found: {path}")
        return {}
    try:
        data = json.loads(candidate.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{candidate} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{candidate} must hold a JSON object")
    return data


# ---------------------------------------------------------------------- helpers


def _read_text(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    try:
        return Path(source).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise FileNotFound(f"file not found: {source}") from exc


def _write(text: str, out: str | None) -> None:
    if out and out != "-":
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _span(text: str) -> tuple[int, int]:
    try:
        start, end = (int(p) for p in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("span must look like START:END (byte offsets)") from exc
    return start, end


def _target(args: argparse.Namespace) -> Target:
    return Target(args.file, span=args.span, function=args.function)


def _docs(settings: Settings) -> ApiDocs:
    path = settings.get("docs")
    if path is None:
        return ApiDocs.bundled()
    try:
        return ApiDocs.load(path)
    except FileNotFoundError as exc:
        raise FileNotFound(f"API docs not found: {path}") from exc


def _dumps(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False, sort_keys=True) + "\n"


# --------------------------------------------------------------------- commands


def cmd_graph(args: argparse.Namespace, settings: Settings) -> int:
    graph = build_graph(args.repo, settings.language(), workers=args.workers)
    if args.graph_command == "dump":
        _write(_dumps(graph.to_dict()), args.out)
        return EXIT_OK
    if args.dump:
        Path(args.dump).write_text(_dumps(graph.to_dict()), encoding="utf-8")
    sys.stdout.write(
        f"files={len(graph.file_index)} nodes={len(graph.nodes)} edges={len(graph.edges)} "
        f"unresolved={len(graph.unresolved)} skipped={len(graph.skipped)}\n"
    )
    return EXIT_OK


def cmd_context(args: argparse.Namespace, settings: Settings) -> int:
    graph = build_graph(args.repo, settings.language())
    selection = select_context(graph, args.repo, _target(args), settings.hops(), _docs(settings))
    if args.format == "text":
        _write(selection.context.text + "\n", args.out)
    else:
        _write(_dumps({
            "hops": settings.hops(),
            "items": [item.to_dict() for item in selection.related],
            "misses": selection.related.misses,
            "input_code": selection.input_code,
            "context": selection.context.text,
        }), args.out)
    return EXIT_OK


def cmd_segment(args: argparse.Namespace, settings: Settings) -> int:
    segments = segment(_read_text(args.summary))
    if args.format == "text":
        _write("".join(f"[{s.index}] {s.text}\n" for s in segments), args.out)
    else:
        _write(_dumps([s.to_dict() for s in segments]), args.out)
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace, settings: Settings) -> int:
    summary = _read_text(args.summary)
    kind, stub_path = settings.backend_choice()
    config = settings.model_config()
    backend = load_replay(stub_path).for_sample(args.sample) if kind == "stub" else HttpBackend()
    hops = settings.hops()
    report = evaluate_summary(
        args.repo,
        _target(args),
        summary,
        backend,
        language=settings.language(),
        hops=hops,
        weights=settings.weights(),
        config=config,
        docs=_docs(settings),
        extra_config={"backend": kind, "version": __version__},
    )
    _write(report.to_text() if args.format == "text" else report.to_json(), args.out)
    return EXIT_OK


def _write_bench(report: BenchmarkReport, args: argparse.Namespace) -> None:
    _write(report.table() if args.format == "text" else report.metrics_json(), args.out)
    if getattr(args, "table", None):
        Path(args.table).write_text(report.table(), encoding="utf-8")
    if getattr(args, "timings", None):
        Path(args.timings).write_text(report.timings_json(), encoding="utf-8")


def cmd_bench(args: argparse.Namespace, settings: Settings) -> int:
    if args.bench_command == "synth":
        dump_dataset(make_synthetic(args.n, settings.get("seed", 0, int)), args.out)
        return EXIT_OK
    dataset = load_dataset(args.dataset if args.bench_command != "stats" else args.gold)
    for rejection in dataset.rejections:
        log.warning("line %d rejected: %s", rejection.line, rejection.reason)
    if args.bench_command == "make-stub":
        replay = ReplayFile.from_samples(dataset, flip_rate=args.flip_rate, seed=settings.get("seed", 0, int))
        _write(_dumps(replay.to_dict()), args.out)
        return EXIT_OK
    if args.bench_command == "stats":
        try:
            raw = json.loads(_read_text(args.predictions))
        except json.JSONDecodeError as exc:
            raise InputError(f"predictions are not valid JSON: {exc}") from exc
        predictions = load_predictions(raw)
        correlations, accuracy = compute_metrics(dataset, predictions)
        report = BenchmarkReport(correlations, accuracy, predictions, {}, {"source": "predictions"})
        _write_bench(report, args)
        return EXIT_OK

    kind, stub_path = settings.backend_choice()
    config = settings.model_config()
    if kind == "stub":
        replay = load_replay(stub_path)
        backend_for = lambda sample: replay.for_sample(sample.id if replay.samples is not None else None)  # noqa: E731
    else:
        http = HttpBackend()
        backend_for = lambda sample: http  # noqa: E731
    report = run_benchmark(
        dataset,
        backend_for,
        config,
        settings.weights(),
        workers=args.workers,
        extra_config={"backend": kind, "rejected_lines": [r.to_dict() for r in dataset.rejections]},
    )
    _write_bench(report, args)
    return EXIT_OK


# ----------------------------------------------------------------------- parser


def _add_target(p: argparse.ArgumentParser) -> None:
    p.add_argument("--repo", required=True, help="repository root")
    p.add_argument("--file", required=True, help="target file, relative to the repository root")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--span", type=_span, help="byte span START:END of the input code")
    group.add_argument("--function", help="function name or qualified name")
    p.add_argument("--hops", type=int, choices=HOP_CHOICES, help="dependency hop limit (default 1)")
    p.add_argument("--docs", help="external API docs JSON (default: bundled)")


def _add_backend(p: argparse.ArgumentParser) -> None:
    p.add_argument("--stub", help="scripted replay JSON file")
    p.add_argument("--endpoint", help="chat-completions base URL")
    p.add_argument("--model", help="model id for --endpoint")
    p.add_argument("--max-in-flight", dest="max_in_flight", type=int, help="concurrent requests (default 4)")
    p.add_argument("--max-retries", dest="max_retries", type=int, help="attempts per verdict (default 3)")
    p.add_argument("--timeout", type=float, help="request timeout in seconds")
    p.add_argument("--send-top-k", dest="send_top_k", action="store_const", const=True,
                   help="include top_k in requests")
    p.add_argument("--weights", help="criterion weights, e.g. 0.6,1.2,1.2,1.0")


def _add_output(p: argparse.ArgumentParser, default: str = "json") -> None:
    p.add_argument("--format", choices=("json", "text"), default=default)
    p.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="referee", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help=f"JSON config file (default: ./{CONFIG_FILE} if present)")
    parser.add_argument("--language", choices=[l.value for l in Language])
    parser.add_argument("--seed", type=int, help="seed for every randomized step")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    graph = sub.add_parser("graph", help="build the project context graph")
    gsub = graph.add_subparsers(dest="graph_command", required=True)
    build = gsub.add_parser("build", help="build and print counts")
    build.add_argument("--repo", required=True)
    build.add_argument("--dump", help="also write the graph JSON here")
    build.add_argument("--workers", type=int, default=1)
    dump = gsub.add_parser("dump", help="build and write the graph JSON")
    dump.add_argument("--repo", required=True)
    dump.add_argument("--out")
    dump.add_argument("--workers", type=int, default=1)
    graph.set_defaults(handler=cmd_graph)

    context = sub.add_parser("context", help="select related information for the input code")
    _add_target(context)
    _add_output(context)
    context.set_defaults(handler=cmd_context)

    seg = sub.add_parser("segment", help="split a summary into sentences")
    seg.add_argument("--summary", default="-", help="summary file, or - for stdin")
    _add_output(seg)
    seg.set_defaults(handler=cmd_segment)

    evaluate = sub.add_parser("evaluate", help="score a summary against its code")
    _add_target(evaluate)
    evaluate.add_argument("--summary", required=True, help="summary file, or - for stdin")
    evaluate.add_argument("--sample", help="sample id inside a per-sample replay file")
    _add_backend(evaluate)
    _add_output(evaluate)
    evaluate.set_defaults(handler=cmd_evaluate)

    bench = sub.add_parser("bench", help="benchmark runs and statistics")
    bsub = bench.add_subparsers(dest="bench_command", required=True)
    run = bsub.add_parser("run", help="evaluate a labeled dataset")
    run.add_argument("--dataset", required=True)
    run.add_argument("--workers", type=int, default=1, help="samples evaluated concurrently")
    run.add_argument("--table", help="also write the correlation table here")
    run.add_argument("--timings", help="write per-sample wall-clock seconds here")
    _add_backend(run)
    _add_output(run)
    stats = bsub.add_parser("stats", help="metrics for saved predictions")
    stats.add_argument("--predictions", required=True)
    stats.add_argument("--gold", required=True)
    stats.add_argument("--table")
    _add_output(stats)
    stub = bsub.add_parser("make-stub", help="replay file scripted from gold labels")
    stub.add_argument("--dataset", required=True)
    stub.add_argument("--flip-rate", dest="flip_rate", type=float, default=0.0)
    stub.add_argument("--out")
    synth = bsub.add_parser("synth", help="write a synthetic dataset")
    synth.add_argument("--n", type=int, default=20)
    synth.add_argument("--out", required=True)
    bench.set_defaults(handler=cmd_bench)
    return parser


def _fail(exc: RefereeError) -> int:
    sys.stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
    return EXIT_BACKEND if isinstance(exc, BackendError) else EXIT_INPUT


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        settings = Settings(args, _load_config_file(args.config), os.environ)
        return args.handler(args, settings)
    except RefereeError as exc:
        return _fail(exc)
    except Exception as exc:  # surfaced as structured output, never a bare traceback
        log.debug("internal error", exc_info=True)
        sys.stderr.write(json.dumps({"error": "E_INTERNAL", "message": f"{type(exc).__name__}: {exc}"}) + "\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
