"""Per-file extraction machinery shared by the Python and Java walkers.

Extraction runs in two passes over one syntax tree. ``collect`` creates
entity nodes and fills lexical scopes; ``link`` walks again and resolves
references against those scopes, emitting labelled edges. Only intra-file
resolution happens here: an imported name resolves to its Import node and
cross-file lookup is deferred to context selection.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field

from tree_sitter import Node

from .model import DependencyEdge, EntityKind, EntityNode, Language, Unresolved, node_id
from .relations import Construct, classify_relation


@dataclass
class Scope:
    kind: str  # module | class | function
    owner: str
    parent: "Scope | None" = None
    bindings: dict[str, str] = field(default_factory=dict)
    locals: set[str] = field(default_factory=set)

    def bind(self, name: str, entity: str) -> None:
        self.bindings.setdefault(name, entity)

    def enclosing_class(self) -> "Scope | None":
        scope: Scope | None = self
        while scope is not None:
            if scope.kind == "class":
                return scope
            scope = scope.parent
        return None


@dataclass(frozen=True)
class Ref:
    """One resolved (or unresolved) reference found in an expression."""

    name: str
    span: tuple[int, int]
    target: str | None = None
    attr: str | None = None
    reason: str = "unknown"


@dataclass
class FileResult:
    nodes: list[EntityNode]
    edges: list[DependencyEdge]
    unresolved: list[Unresolved]


class Extractor:
    language: Language
    builtins: frozenset[str] = frozenset()
    # Python methods do not see class-level names unqualified; Java methods do.
    class_scope_visible = False

    def __init__(self, path: str, source: bytes):
        self.path = path
        self.source = source
        self.nodes: list[EntityNode] = []
        self.edges: list[DependencyEdge] = []
        self.unresolved: list[Unresolved] = []
        self.by_ts: dict[int, str] = {}
        self.scopes: dict[int, Scope] = {}
        self.class_scopes: dict[str, Scope] = {}
        self.entities: dict[str, EntityNode] = {}

    # -- node creation ------------------------------------------------------

    def text(self, node: Node) -> str:
        return self.source[node.start_byte : node.end_byte].decode("utf-8", errors="replace")

    def add_node(
        self,
        kind: EntityKind,
        name: str,
        qualified_name: str,
        span_node: Node,
        *,
        key: Node | None = None,
        docstring: str | None = None,
    ) -> EntityNode:
        span = (span_node.start_byte, span_node.end_byte)
        entity = EntityNode(
            id=node_id(self.path, span, kind, qualified_name),
            kind=kind,
            name=name,
            qualified_name=qualified_name,
            file=self.path,
            span=span,
            source_text=self.text(span_node),
            docstring=docstring,
        )
        if entity.id in self.entities:
            # same statement binding the same name twice, e.g. ``a, a = f()``
            entity = self.entities[entity.id]
        else:
            self.entities[entity.id] = entity
            self.nodes.append(entity)
        self.by_ts[(key or span_node).id] = entity.id
        return entity

    def add_module(self, root: Node, module_name: str) -> EntityNode:
        short = module_name.rsplit(".", 1)[-1]
        return self.add_node(EntityKind.MODULE, short, module_name, root)

    # -- edges -------------------------------------------------------------

    def emit(self, head: str, construct: Construct, ref: Ref) -> None:
        relation = classify_relation(construct)
        if relation is None:
            return
        if ref.target is None:
            self.unresolved.append(Unresolved(self.path, ref.name, ref.span, head, ref.reason))
            return
        if ref.target == head:
            return
        self.edges.append(DependencyEdge(head, relation, ref.target, ref.attr))

    def emit_all(self, head: str, construct: Construct, refs: list[Ref]) -> None:
        for ref in refs:
            self.emit(head, construct, ref)

    # -- name resolution ---------------------------------------------------

    def lookup(self, name: str, scope: Scope) -> tuple[str, str | None]:
        """Return ``("entity", id)``, ``("local", None)`` or ``("missing", None)``."""
        current: Scope | None = scope
        first = True
        while current is not None:
            if current.kind != "class" or first or self.class_scope_visible:
                if name in current.bindings:
                    return "entity", current.bindings[name]
                if name in current.locals:
                    return "local", None
            first = False
            current = current.parent
        return "missing", None

    def resolve(self, name: str, node: Node, scope: Scope, attr: str | None = None) -> Ref:
        span = (node.start_byte, node.end_byte)
        status, target = self.lookup(name, scope)
        if status == "entity":
            assert target is not None
            return self.refine(Ref(name, span, target, attr), scope)
        if status == "local":
            return Ref(name, span, reason="local-binding")
        return Ref(name, span, reason="builtin" if name in self.builtins else "unknown")

    def refine(self, ref: Ref, scope: Scope) -> Ref:
        """Follow ``Class.member`` to the member node; keep import attributes."""
        entity = self.entities[ref.target] if ref.target else None
        if entity is None or not ref.attr:
            return ref
        if entity.kind is EntityKind.IMPORT:
            return ref
        if entity.kind is EntityKind.CLASS:
            member = self.member(entity.id, ref.attr)
            if member is not None:
                return member
            return Ref(ref.name, ref.span, ref.target)
        return Ref(ref.name, ref.span, ref.target)

    def member(self, class_id: str, attr: str, span: tuple[int, int] = (0, 0)) -> Ref | None:
        scope = self.class_scopes.get(class_id)
        if scope is None:
            return None
        head, _, rest = attr.partition(".")
        target = scope.bindings.get(head)
        if target is None:
            return None
        ref = Ref(head, span, target, rest or None)
        return self.refine(ref, scope)

    # -- helpers -------------------------------------------------------------

    @staticmethod
    def literal_string(text: str) -> str | None:
        try:
            value = ast.literal_eval(text)
        except (ValueError, SyntaxError, MemoryError, RecursionError):
            return None
        return value if isinstance(value, str) else None

    def result(self) -> FileResult:
        return FileResult(self.nodes, self.edges, self.unresolved)
