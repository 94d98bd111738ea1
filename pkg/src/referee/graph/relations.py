"""Mapping from syntax constructs to dependency relations.

Both language extractors describe each edge-producing construct with a
:class:`Construct` and ask :func:`classify_relation` for its label, so the
mapping lives in one place.
"""

from __future__ import annotations

from enum import Enum

from .model import Relation


class Construct(str, Enum):
    ASSIGNMENT = "assignment"
    AUGMENTED_ASSIGNMENT = "augmented_assignment"
    DECLARATION = "declaration"  # Java field/local declarator with initializer
    WITH_BINDING = "with_binding"
    EXCEPT_BINDING = "except_binding"
    RESOURCE_BINDING = "resource_binding"  # Java try-with-resources
    CATCH_BINDING = "catch_binding"  # Java catch parameter
    REFERENCE = "reference"
    ATTRIBUTE_REFERENCE = "attribute_reference"
    CALL = "call"
    GENERIC_ARGUMENT = "generic_argument"
    TYPE_ANNOTATION = "type_annotation"
    RETURN_TYPE = "return_type"
    BASE_CLASS = "base_class"
    PASS = "pass"
    EXPRESSION = "expression"


_RELATIONS: dict[Construct, Relation | None] = {
    Construct.ASSIGNMENT: Relation.ASSIGN,
    Construct.AUGMENTED_ASSIGNMENT: Relation.ASSIGN,
    Construct.DECLARATION: Relation.ASSIGN,
    Construct.WITH_BINDING: Relation.AS,
    Construct.EXCEPT_BINDING: Relation.AS,
    Construct.RESOURCE_BINDING: Relation.AS,
    Construct.CATCH_BINDING: Relation.AS,
    Construct.REFERENCE: Relation.REFERS,
    Construct.ATTRIBUTE_REFERENCE: Relation.REFERS,
    Construct.CALL: Relation.REFERS,
    Construct.GENERIC_ARGUMENT: Relation.REFERS,
    Construct.TYPE_ANNOTATION: Relation.TYPEOF,
    Construct.RETURN_TYPE: Relation.TYPEOF,
    Construct.BASE_CLASS: Relation.INHERITS,
    Construct.PASS: None,
    Construct.EXPRESSION: None,
}


def classify_relation(construct: Construct | str) -> Relation | None:
    """Relation for ``construct``; ``None`` for anything without dependency semantics."""
    if not isinstance(construct, Construct):
        try:
            construct = Construct(construct)
        except ValueError:
            return None
    return _RELATIONS[construct]
