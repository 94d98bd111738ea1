"""Lookups that locate the input-code entities inside a built graph."""

from __future__ import annotations

from ..errors import InputError, UnknownFile
from .model import EntityKind, EntityNode, ProjectContextGraph


def entities_in(graph: ProjectContextGraph, file: str, span: tuple[int, int]) -> list[EntityNode]:
    """Entities of ``file`` whose span intersects ``span``, plus the file's
    Import nodes referenced from within it. Ordered by ``(span.start, id)``.
    """
    if file not in graph.file_index:
        raise UnknownFile(f"file not in graph: {file}")
    start, end = span
    if end <= start:
        return []
    hits = {
        node.id: node
        for node in graph.in_file(file)
        if node.kind is not EntityKind.MODULE and node.span[0] < end and start < node.span[1]
    }
    for node in list(hits.values()):
        for edge in graph.out_edges(node.id):
            tail = graph.nodes[edge.tail]
            if tail.kind is EntityKind.IMPORT and tail.file == file:
                hits.setdefault(tail.id, tail)
    return sorted(hits.values(), key=lambda n: (n.span[0], n.id))


def find_function(graph: ProjectContextGraph, file: str, name: str) -> EntityNode:
    """The function (or method, by qualified name) called ``name`` in ``file``."""
    if file not in graph.file_index:
        raise UnknownFile(f"file not in graph: {file}")
    candidates = [
        n
        for n in graph.in_file(file)
        if n.kind is EntityKind.FUNCTION and name in (n.name, n.qualified_name)
    ]
    if not candidates:
        raise InputError(f"no function {name!r} in {file}")
    exact = [n for n in candidates if n.qualified_name == name]
    return (exact or candidates)[0]
