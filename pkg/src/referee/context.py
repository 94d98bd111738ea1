"""Selection of the dependency context shown to the judge alongside the code.

Starting from the entities of the input code, a depth-bounded search over the
project context graph collects crucial entities (functions, classes,
variables). Import nodes are transparent: they are resolved to an entity in
another repository file when the imported module lives in the repository, and
to an API documentation entry otherwise.
"""

from __future__ import annotations

import json
import logging
import os
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping

from .errors import NotAnImport
from .graph import EntityKind, EntityNode, Language, ProjectContextGraph, parse_source
from .graph.model import DependencyEdge

log = logging.getLogger(__name__)

_KIND_PRIORITY = {EntityKind.CLASS: 0, EntityKind.FUNCTION: 1, EntityKind.VARIABLE: 2}
_MAX_REEXPORT_DEPTH = 5


class DependencyClass(str, Enum):
    INTERNAL = "internal"
    CROSS_FILE = "cross_file"
    EXTERNAL = "external"


@dataclass(frozen=True)
class RelatedInfo:
    entity_name: str
    content: str
    dependency_class: DependencyClass
    source: str
    anchor_entity: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "entity_name": self.entity_name,
            "content": self.content,
            "class": self.dependency_class.value,
            "source": self.source,
            "anchor_entity": self.anchor_entity,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RelatedInfo":
        return cls(
            entity_name=data["entity_name"],
            content=data["content"],
            dependency_class=DependencyClass(data["class"]),
            source=data["source"],
            anchor_entity=data["anchor_entity"],
        )


class RelatedInfoList(list):
    """Search result; ``misses`` lists lookups that found nothing."""

    def __init__(self, items: Iterable[RelatedInfo] = (), misses: Iterable[dict] = ()):
        super().__init__(items)
        self.misses: list[dict] = list(misses)


@dataclass(frozen=True)
class SearchConfig:
    hop_limit: int = 1
    crucial_kinds: frozenset[EntityKind] = frozenset(
        {EntityKind.FUNCTION, EntityKind.CLASS, EntityKind.VARIABLE}
    )

    def __post_init__(self):
        if self.hop_limit < 0:
            raise ValueError("hop_limit must be non-negative")


# --------------------------------------------------------------------------- docs


def normalize_doc_key(key: str) -> str:
    key = key.strip()
    while key.endswith("()"):
        key = key[:-2].rstrip()
    return key


@dataclass
class ApiDocs:
    """External API descriptions keyed by dotted qualified name."""

    entries: dict[str, str] = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "ApiDocs":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return cls.from_mapping(data.get("entries", data))

    @classmethod
    def from_mapping(cls, data: Mapping[str, str]) -> "ApiDocs":
        entries: dict[str, str] = {}
        for key, text in data.items():
            norm = normalize_doc_key(key)
            if norm in entries:
                raise ValueError(f"duplicate API docs key after normalization: {norm}")
            entries[norm] = text
        return cls(entries)

    @classmethod
    def bundled(cls) -> "ApiDocs":
        text = resources.files("referee.data").joinpath("external_api.json").read_text("utf-8")
        return cls.from_mapping(json.loads(text)["entries"])

    def lookup(self, key: str) -> tuple[str, str] | None:
        """``(matched_key, description)``; on a miss retries one level up."""
        norm = normalize_doc_key(key)
        if norm in self.entries:
            return norm, self.entries[norm]
        if "." in norm:
            parent = norm.rsplit(".", 1)[0]
            if parent in self.entries:
                return parent, self.entries[parent]
        return None

    def __len__(self) -> int:
        return len(self.entries)


# ---------------------------------------------------------------------- imports


@dataclass(frozen=True)
class ImportBinding:
    """One name bound by an import statement.

    ``base`` is the dotted path the local name stands for: ``a`` for
    ``import a.b``, ``a.b`` for ``import a.b as x``, ``m.n`` for
    ``from m import n``.
    """

    local: str
    module: str
    name: str
    base: str
    from_import: bool


def _guess_language(text: str) -> Language:
    stripped = text.strip()
    if stripped.endswith(";") or stripped.startswith("import static "):
        return Language.JAVA
    return Language.PYTHON


def import_bindings(import_text: str, language: Language | str | None = None) -> list[ImportBinding]:
    """Every binding of one import statement; wildcard imports yield ``name="*"``."""
    language = Language.parse(language) if language else _guess_language(import_text)
    source = import_text.strip().encode("utf-8")
    tree = parse_source(source, language)
    root = tree.root_node
    statements = [c for c in root.named_children if c.type not in ("comment", "line_comment", "block_comment")]
    wanted = {
        Language.PYTHON: ("import_statement", "import_from_statement"),
        Language.JAVA: ("import_declaration",),
    }[language]
    if root.has_error or len(statements) != 1 or statements[0].type not in wanted:
        raise NotAnImport(f"not an import statement: {import_text!r}")
    stmt = statements[0]

    def text(node) -> str:
        return source[node.start_byte : node.end_byte].decode("utf-8")

    if language is Language.JAVA:
        return [_java_binding(stmt, text)]

    bindings = []
    if stmt.type == "import_statement":
        for child in stmt.named_children:
            if child.type == "aliased_import":
                dotted = re.sub(r"\s+", "", text(child.child_by_field_name("name")))
                local = text(child.child_by_field_name("alias"))
                base = dotted
            else:
                dotted = re.sub(r"\s+", "", text(child))
                local = dotted.split(".")[0]
                base = local
            bindings.append(ImportBinding(local, dotted, dotted.rsplit(".", 1)[-1], base, False))
        return bindings

    module_node = stmt.child_by_field_name("module_name")
    module = re.sub(r"\s+", "", text(module_node))
    for i, child in enumerate(stmt.children):
        if child.type == "wildcard_import":
            bindings.append(ImportBinding("*", module, "*", module, True))
        if stmt.field_name_for_child(i) != "name":
            continue
        if child.type == "aliased_import":
            name = re.sub(r"\s+", "", text(child.child_by_field_name("name")))
            local = text(child.child_by_field_name("alias"))
        else:
            name = re.sub(r"\s+", "", text(child))
            local = name
        bindings.append(ImportBinding(local, module, name, _join(module, name), True))
    return bindings


def _java_binding(stmt, text) -> ImportBinding:
    is_static = any(c.type == "static" for c in stmt.children)
    wildcard = any(c.type == "asterisk" for c in stmt.named_children)
    path_node = next(c for c in stmt.named_children if c.type in ("scoped_identifier", "identifier"))
    parts = re.sub(r"\s+", "", text(path_node)).split(".")
    if wildcard:
        module = ".".join(parts)
        return ImportBinding("*", module, "*", module, True)
    # package segments are lower-case; the first capitalised segment starts the type name
    split = next((i for i, p in enumerate(parts) if p[:1].isupper()), None)
    if split is None or split == 0:
        split = max(len(parts) - (2 if is_static else 1), 0)
    module = ".".join(parts[:split])
    name = ".".join(parts[split:])
    return ImportBinding(parts[-1], module, name, ".".join(parts), True)


def _join(module: str, name: str) -> str:
    return module + name if module.endswith(".") else f"{module}.{name}"


def resolve_import(
    import_text: str, language: Language | str | None = None, attr: str | None = None
) -> tuple[str, str]:
    """``(module, name)`` for the first binding of an import statement.

    ``from M import N`` -> ``(M, N)``; ``import M`` -> ``(M, last segment of
    M)``; Java ``import a.b.C;`` -> ``("a.b", "C")``. With ``attr`` the name
    becomes ``name.attr``.
    """
    bindings = import_bindings(import_text, language)
    if not bindings:
        raise NotAnImport(f"import binds nothing: {import_text!r}")
    first = bindings[0]
    name = f"{first.name}.{attr}" if attr else first.name
    return first.module, name


# ----------------------------------------------------------------------- search


@dataclass(frozen=True)
class _Resolution:
    node: EntityNode | None = None
    docs_key: str | None = None
    content: str | None = None
    in_repo: bool = False
    miss: str | None = None


class _Resolver:
    def __init__(self, graph: ProjectContextGraph, docs: ApiDocs, repo_root: Path):
        self.graph = graph
        self.docs = docs
        self.root = repo_root.resolve()
        self._cache: dict[tuple[str, str | None], _Resolution] = {}

    def resolve(self, node: EntityNode, attr: str | None, depth: int = 0) -> _Resolution:
        key = (node.id, attr)
        if key not in self._cache:
            self._cache[key] = self._resolve(node, attr, depth)
        return self._cache[key]

    def _resolve(self, node: EntityNode, attr: str | None, depth: int) -> _Resolution:
        try:
            bindings = import_bindings(node.source_text, self.graph.language)
        except NotAnImport:
            return _Resolution(miss="unparseable import")
        binding = next((b for b in bindings if b.local == node.name), None)
        if binding is None:
            return _Resolution(miss="binding not found")
        if self.graph.language is Language.JAVA:
            return self._resolve_java(node, binding, attr, depth)
        if binding.from_import:
            return self._resolve_from(node, binding, attr, depth)
        return self._resolve_plain(node, binding, attr, depth)

    # python -------------------------------------------------------------

    def _resolve_from(self, node, binding: ImportBinding, attr, depth) -> _Resolution:
        in_repo, file = self.python_module(binding.module, node.file)
        sub_in_repo, sub_file = self.python_module(_join(binding.module, binding.name), node.file)
        if not (in_repo or sub_in_repo):
            return self._external(_dotted(binding.base, attr))
        names = [f"{binding.name}.{attr}", binding.name] if attr else [binding.name]
        if file:
            found = self.match(file, names, depth)
            if found is not None:
                return found
        if sub_file and attr:
            found = self.match(sub_file, _prefixes(attr), depth)
            if found is not None:
                return found
        return _Resolution(in_repo=True, miss=f"no entity {'.'.join(names[:1])} in {binding.module}")

    def _resolve_plain(self, node, binding: ImportBinding, attr, depth) -> _Resolution:
        parts = _dotted(binding.base, attr).split(".")
        for i in range(len(parts), 0, -1):
            in_repo, file = self.python_module(".".join(parts[:i]), node.file)
            if not in_repo:
                continue
            rest = ".".join(parts[i:])
            if file and rest:
                found = self.match(file, _prefixes(rest), depth)
                if found is not None:
                    return found
            return _Resolution(in_repo=True, miss=f"no entity {rest or '<module>'} in {'.'.join(parts[:i])}")
        return self._external(".".join(parts))

    def python_module(self, module: str, importer: str) -> tuple[bool, str | None]:
        """Whether ``module`` exists under the repository, and its source file if any."""
        level = len(module) - len(module.lstrip("."))
        dotted = module[level:]
        if level:
            base = (self.root / importer).parent
            for _ in range(level - 1):
                base = base.parent
            bases = [base]
        else:
            bases = self._search_roots(importer)
        rel_parts = dotted.split(".") if dotted else []
        for base in bases:
            target = base.joinpath(*rel_parts)
            candidate = target.with_suffix(".py") if rel_parts else None
            if candidate is not None and candidate.is_file() and self._inside(candidate):
                return True, self._rel(candidate)
            if target.is_dir() and self._inside(target) and (rel_parts or level):
                init = target / "__init__.py"
                return True, self._rel(init) if init.is_file() else None
        return False, None

    # java ---------------------------------------------------------------

    def _resolve_java(self, node, binding: ImportBinding, attr, depth) -> _Resolution:
        rel_parts = binding.module.split(".") if binding.module else []
        for base in self._search_roots(node.file):
            package = base.joinpath(*rel_parts)
            if not (package.is_dir() and self._inside(package)):
                continue
            type_name = binding.name.split(".")[0]
            java_file = package / f"{type_name}.java"
            if java_file.is_file():
                names = [f"{binding.name}.{attr}", binding.name] if attr else [binding.name]
                found = self.match(self._rel(java_file), names, depth)
                if found is not None:
                    return found
            return _Resolution(in_repo=True, miss=f"no entity {binding.name} in {binding.module}")
        return self._external(_dotted(binding.base, attr))

    # shared -------------------------------------------------------------

    def _search_roots(self, importer: str) -> list[Path]:
        roots = [self.root]
        current = (self.root / importer).parent
        chain = []
        while current != self.root and self._inside(current):
            chain.append(current)
            current = current.parent
        return roots + list(reversed(chain))

    def _inside(self, path: Path) -> bool:
        try:
            path.resolve().relative_to(self.root)
        except ValueError:
            return False
        return True

    def _rel(self, path: Path) -> str:
        return path.resolve().relative_to(self.root).as_posix()

    def match(self, file: str, names: list[str], depth: int) -> _Resolution | None:
        """Exact qualified-name match in ``file``; Class > Function > Variable, then position."""
        if file not in self.graph.file_index:
            return None
        nodes = self.graph.in_file(file)
        for name in names:
            hits = [n for n in nodes if n.qualified_name == name and n.kind in _KIND_PRIORITY]
            if hits:
                best = min(hits, key=lambda n: (_KIND_PRIORITY[n.kind], n.span[0], n.id))
                return _Resolution(node=best, in_repo=True)
            reexports = [n for n in nodes if n.qualified_name == name and n.kind is EntityKind.IMPORT]
            if reexports and depth < _MAX_REEXPORT_DEPTH:
                found = self.resolve(reexports[0], None, depth + 1)
                if found.node is not None or found.docs_key is not None:
                    return found
        return None

    def _external(self, key: str) -> _Resolution:
        hit = self.docs.lookup(key)
        if hit is None:
            return _Resolution(miss=f"no API docs for {key}")
        return _Resolution(docs_key=hit[0], content=hit[1])


def _dotted(base: str, attr: str | None) -> str:
    return f"{base}.{attr}" if attr else base


def _prefixes(dotted: str) -> list[str]:
    parts = dotted.split(".")
    return [".".join(parts[:i]) for i in range(len(parts), 0, -1)]


def _content(node: EntityNode) -> str:
    if node.kind is EntityKind.CLASS and node.docstring:
        return node.docstring
    return node.source_text


def search_related(
    graph: ProjectContextGraph,
    seeds: list[EntityNode],
    config: SearchConfig = SearchConfig(),
    docs: ApiDocs | None = None,
    repo_root: str | os.PathLike = ".",
) -> RelatedInfoList:
    """Crucial dependency context of ``seeds`` within ``config.hop_limit`` hops.

    Each seed is searched depth-first; a node is re-expanded only when reached
    by a shorter path, so the result is exactly the set of entities within the
    hop bound and traversal terminates on cyclic graphs.
    """
    docs = docs if docs is not None else ApiDocs()
    result = RelatedInfoList()
    if config.hop_limit == 0 or not seeds:
        return result
    resolver = _Resolver(graph, docs, Path(repo_root))
    seed_ids = {s.id for s in seeds}
    seen: set[tuple[str, str]] = set()
    missed: set[tuple[str, str]] = set()

    def record(item: RelatedInfo) -> None:
        key = (item.entity_name, item.source)
        if key not in seen:
            seen.add(key)
            result.append(item)

    def targets(edge: DependencyEdge, anchor: EntityNode):
        tail = graph.nodes[edge.tail]
        if tail.kind is not EntityKind.IMPORT:
            yield tail
            return
        found = resolver.resolve(tail, edge.attr)
        if found.node is not None:
            yield found.node
        elif found.docs_key is not None and found.content:
            record(
                RelatedInfo(found.docs_key, found.content or "", DependencyClass.EXTERNAL,
                            found.docs_key, anchor.id)
            )
        elif found.miss and (tail.id, found.miss) not in missed:
            missed.add((tail.id, found.miss))
            result.misses.append(
                {"import": tail.qualified_name, "file": tail.file, "attr": edge.attr,
                 "reason": found.miss, "in_repo": found.in_repo}
            )

    for seed in seeds:
        best = {seed.id: 0}
        stack = [(seed.id, 0, iter(graph.out_edges(seed.id)))]
        while stack:
            node_id, depth, edges = stack[-1]
            edge = next(edges, None)
            if edge is None:
                stack.pop()
                continue
            for target in targets(edge, seed):
                if depth + 1 >= best.get(target.id, config.hop_limit + 1):
                    continue
                best[target.id] = depth + 1
                if target.kind in config.crucial_kinds and target.id not in seed_ids:
                    dep = (DependencyClass.INTERNAL if target.file == seed.file
                           else DependencyClass.CROSS_FILE)
                    record(RelatedInfo(target.qualified_name, _content(target), dep,
                                       target.file, seed.id))
                if depth + 1 < config.hop_limit and target.kind is not EntityKind.MODULE:
                    stack.append((target.id, depth + 1, iter(graph.out_edges(target.id))))
    return result


# ------------------------------------------------------------------- formatting


@dataclass(frozen=True)
class CodeContext:
    """What the judge sees: selected dependency blocks and the input code."""

    related_text: str
    input_code: str

    @property
    def text(self) -> str:
        if not self.related_text:
            return self.input_code
        return f"{self.related_text}\n\n{self.input_code}"


def build_context(related: Iterable[RelatedInfo], input_code: str) -> CodeContext:
    blocks = [f"# {item.entity_name} # {item.content}" for item in related]
    return CodeContext("\n\n".join(blocks), input_code)


def format_context(related: Iterable[RelatedInfo], input_code: str) -> str:
    """``# {name} # {content}`` blocks, blank-line separated, then the input code."""
    return build_context(related, input_code).text
