"""Data model of the project context graph."""

from __future__ import annotations

import hashlib
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Any, Iterable, Mapping


class Language(str, Enum):
    PYTHON = "python"
    JAVA = "java"

    @property
    def extension(self) -> str:
        return ".py" if self is Language.PYTHON else ".java"

    @classmethod
    def parse(cls, value: "str | Language") -> "Language":
        if isinstance(value, Language):
            return value
        return cls(value.strip().lower())


class EntityKind(str, Enum):
    FUNCTION = "function"
    CLASS = "class"
    VARIABLE = "variable"
    IMPORT = "import"
    MODULE = "module"
    PARAMETER = "parameter"
    CALL_SITE = "callsite"


class Relation(str, Enum):
    """The five edge labels; nothing else is constructible."""

    ASSIGN = "assign"
    AS = "as"
    REFERS = "refers"
    TYPEOF = "typeof"
    INHERITS = "inherits"


def node_id(file: str, span: tuple[int, int], kind: EntityKind, name: str) -> str:
    """Content-derived id: stable across runs and traversal orders."""
    key = f"{file}\x00{span[0]}:{span[1]}\x00{kind.value}\x00{name}"
    return hashlib.sha1(key.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class EntityNode:
    id: str
    kind: EntityKind
    name: str
    qualified_name: str
    file: str
    span: tuple[int, int]
    source_text: str
    docstring: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "name": self.name,
            "qualified_name": self.qualified_name,
            "file": self.file,
            "span": list(self.span),
            "docstring": self.docstring,
        }


@dataclass(frozen=True)
class DependencyEdge:
    """``head`` depends on ``tail`` through ``relation``.

    ``attr`` holds the attribute path used through the tail (``parse.urlsplit``
    for ``urllib.parse.urlsplit`` rooted at an import); it drives
    ``(module, name.attr)`` lookups and is otherwise ``None``.
    """

    head: str
    relation: Relation
    tail: str
    attr: str | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "head": self.head,
            "relation": self.relation.value,
            "tail": self.tail,
        }
        if self.attr is not None:
            out["attr"] = self.attr
        return out


@dataclass(frozen=True)
class Unresolved:
    """A reference that produced no edge, kept so nothing is silently dropped."""

    file: str
    name: str
    span: tuple[int, int]
    owner: str
    reason: str  # builtin | local-binding | dynamic | unknown

    def to_dict(self) -> dict[str, Any]:
        return {
            "file": self.file,
            "name": self.name,
            "span": list(self.span),
            "owner": self.owner,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class ProjectContextGraph:
    nodes: Mapping[str, EntityNode]
    edges: tuple[DependencyEdge, ...]
    file_index: Mapping[str, tuple[str, ...]]
    language: Language
    unresolved: tuple[Unresolved, ...] = ()
    skipped: tuple[tuple[str, str], ...] = ()
    _out: Mapping[str, tuple[DependencyEdge, ...]] = field(
        default=MappingProxyType({}), repr=False, compare=False
    )

    @classmethod
    def assemble(
        cls,
        nodes: Iterable[EntityNode],
        edges: Iterable[DependencyEdge],
        language: Language,
        unresolved: Iterable[Unresolved] = (),
        skipped: Iterable[tuple[str, str]] = (),
    ) -> "ProjectContextGraph":
        ordered = sorted(nodes, key=lambda n: (n.file, n.span[0], n.span[1], n.id))
        node_map: dict[str, EntityNode] = {}
        for node in ordered:
            if node.id in node_map:
                raise ValueError(f"duplicate node id {node.id} for {node.qualified_name}")
            node_map[node.id] = node
        index: dict[str, list[str]] = defaultdict(list)
        for node in ordered:
            index[node.file].append(node.id)

        seen: set[DependencyEdge] = set()
        kept: list[DependencyEdge] = []
        for edge in edges:
            if edge.head == edge.tail or edge in seen:
                continue
            if edge.head not in node_map or edge.tail not in node_map:
                raise ValueError(f"dangling edge {edge}")
            seen.add(edge)
            kept.append(edge)
        out: dict[str, list[DependencyEdge]] = defaultdict(list)
        for edge in kept:
            out[edge.head].append(edge)

        return cls(
            nodes=MappingProxyType(node_map),
            edges=tuple(kept),
            file_index=MappingProxyType({f: tuple(ids) for f, ids in index.items()}),
            language=language,
            unresolved=tuple(unresolved),
            skipped=tuple(skipped),
            _out=MappingProxyType({k: tuple(v) for k, v in out.items()}),
        )

    def out_edges(self, node: str) -> tuple[DependencyEdge, ...]:
        return self._out.get(node, ())

    def in_file(self, file: str) -> list[EntityNode]:
        return [self.nodes[i] for i in self.file_index.get(file, ())]

    def module_node(self, file: str) -> EntityNode | None:
        for node in self.in_file(file):
            if node.kind is EntityKind.MODULE:
                return node
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "language": self.language.value,
            "nodes": [n.to_dict() for n in self.nodes.values()],
            "edges": [e.to_dict() for e in self.edges],
            "unresolved_count": len(self.unresolved),
            "skipped": [{"file": f, "reason": r} for f, r in self.skipped],
        }
