"""Repository walking and graph assembly."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from pathlib import Path

import tree_sitter_java
import tree_sitter_python
from tree_sitter import Language as TSLanguage
from tree_sitter import Parser

from ..errors import RepoNotFound
from ._extract import FileResult
from .java_ast import JavaExtractor
from .model import Language, ProjectContextGraph
from .python_ast import PythonExtractor

log = logging.getLogger(__name__)

_SKIP_DIRS = frozenset({"__pycache__", "node_modules", "venv", "env", "build", "dist", "target"})


@lru_cache(maxsize=None)
def _ts_language(language: Language) -> TSLanguage:
    module = tree_sitter_python if language is Language.PYTHON else tree_sitter_java
    return TSLanguage(module.language())


def parse_source(source: bytes, language: Language):
    return Parser(_ts_language(language)).parse(source)


def module_name(rel_path: str, language: Language) -> str:
    stem = rel_path[: -len(language.extension)]
    parts = [p for p in stem.split("/") if p]
    if language is Language.PYTHON and parts and parts[-1] == "__init__":
        parts = parts[:-1] or ["__init__"]
    return ".".join(parts)


def source_files(repo_root: Path, language: Language) -> list[str]:
    """Repo-relative POSIX paths of every source file, sorted."""
    found = []
    for dirpath, dirnames, filenames in os.walk(repo_root):
        dirnames[:] = sorted(d for d in dirnames if not d.startswith(".") and d not in _SKIP_DIRS)
        for name in filenames:
            if name.endswith(language.extension):
                full = Path(dirpath) / name
                found.append(full.relative_to(repo_root).as_posix())
    return sorted(found)


def extract_file(rel_path: str, source: bytes, language: Language) -> FileResult:
    tree = parse_source(source, language)
    if tree.root_node.has_error:
        raise SyntaxError(f"{rel_path}: syntax error")
    extractor_cls = PythonExtractor if language is Language.PYTHON else JavaExtractor
    return extractor_cls(rel_path, source).run(tree.root_node, module_name(rel_path, language))


def build_graph(
    repo_root: str | os.PathLike,
    language: str | Language = Language.PYTHON,
    *,
    workers: int = 1,
) -> ProjectContextGraph:
    """Parse every source file under ``repo_root`` into one dependency graph.

    Files that cannot be read or parsed are skipped and listed in
    ``graph.skipped``; they never abort the build.
    """
    root = Path(repo_root)
    if not root.is_dir():
        raise RepoNotFound(f"repository not found: {repo_root}")
    language = Language.parse(language)
    files = source_files(root, language)

    def work(rel: str) -> tuple[str, FileResult | None, str | None]:
        try:
            source = (root / rel).read_bytes()
        except OSError as exc:
            return rel, None, f"unreadable: {exc}"
        if not source.strip():
            return rel, None, "empty file"
        try:
            return rel, extract_file(rel, source, language), None
        except (SyntaxError, UnicodeDecodeError, RecursionError) as exc:
            return rel, None, f"parse error: {exc}"

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, files))
    else:
        results = [work(f) for f in files]

    nodes, edges, unresolved, skipped = [], [], [], []
    for rel, result, problem in results:
        if result is None:
            log.warning("skipping %s (%s)", rel, problem)
            skipped.append((rel, problem or "unknown"))
            continue
        nodes.extend(result.nodes)
        edges.extend(result.edges)
        unresolved.extend(result.unresolved)
    if files and len(skipped) == len(files):
        log.warning("no parseable %s files under %s", language.value, root)
    return ProjectContextGraph.assemble(nodes, edges, language, unresolved, skipped)
