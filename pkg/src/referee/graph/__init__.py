"""Project context graph: code entities linked by typed dependency edges."""

from .build import build_graph, module_name, parse_source
from .model import (
    DependencyEdge,
    EntityKind,
    EntityNode,
    Language,
    ProjectContextGraph,
    Relation,
    Unresolved,
)
from .query import entities_in, find_function
from .relations import Construct, classify_relation

__all__ = [
    "Construct",
    "DependencyEdge",
    "EntityKind",
    "EntityNode",
    "Language",
    "ProjectContextGraph",
    "Relation",
    "Unresolved",
    "build_graph",
    "classify_relation",
    "entities_in",
    "find_function",
    "module_name",
    "parse_source",
]
