"""Entity and edge extraction for Python syntax trees."""

from __future__ import annotations

import builtins

from tree_sitter import Node

from ._extract import Extractor, Ref, Scope
from .model import EntityKind, Language
from .relations import Construct

_LITERALS = frozenset(
    {"integer", "float", "true", "false", "none", "ellipsis", "comment", "escape_sequence"}
)
_COMPREHENSIONS = frozenset(
    {"list_comprehension", "set_comprehension", "dictionary_comprehension", "generator_expression"}
)
_IMPORTS = frozenset({"import_statement", "import_from_statement", "future_import_statement"})
_PARAMETER_TYPES = frozenset(
    {
        "identifier",
        "typed_parameter",
        "default_parameter",
        "typed_default_parameter",
        "list_splat_pattern",
        "dictionary_splat_pattern",
    }
)


def _is_statement(node: Node) -> bool:
    t = node.type
    return (
        t.endswith("_statement")
        or t in ("block", "function_definition", "class_definition", "decorated_definition")
        or (t.endswith("_clause") and t not in ("for_in_clause", "if_clause"))
    )


class PythonExtractor(Extractor):
    language = Language.PYTHON
    builtins = frozenset(dir(builtins)) | {"self", "cls", "__name__", "__file__"}
    class_scope_visible = False

    def run(self, root: Node, module_name: str):
        module = self.add_module(root, module_name)
        scope = Scope("module", module.id)
        self.scopes[root.id] = scope
        self.collect(root, scope, "")
        self.link_block(root, scope)
        return self.result()

    # ------------------------------------------------------------------ pass 1

    def collect(self, node: Node, scope: Scope, prefix: str) -> None:
        for child in node.named_children:
            self.collect_node(child, scope, prefix)

    def collect_node(self, node: Node, scope: Scope, prefix: str) -> None:
        t = node.type
        if t == "function_definition":
            self.collect_function(node, scope, prefix)
        elif t == "class_definition":
            self.collect_class(node, scope, prefix)
        elif t in _IMPORTS:
            self.collect_import(node, scope, prefix)
        elif t == "assignment":
            self.collect_assignment(node, scope, prefix)
        elif t == "named_expression":
            name = node.child_by_field_name("name")
            if name is not None:
                self.bind_variable(name, node, scope, prefix)
            self.collect(node, scope, prefix)
        elif t == "as_pattern":
            alias = node.child_by_field_name("alias")
            if alias is not None:
                for ident in self.pattern_identifiers(alias):
                    self.bind_variable(ident, node, scope, prefix)
            self.collect_node(node.named_children[0], scope, prefix)
        elif t == "for_statement":
            left = node.child_by_field_name("left")
            if left is not None:
                scope.locals.update(self.text(i) for i in self.pattern_identifiers(left))
            for child in node.named_children:
                if child is not left:
                    self.collect_node(child, scope, prefix)
        elif t in ("lambda", "global_statement", "nonlocal_statement") or t in _COMPREHENSIONS:
            return
        else:
            self.collect(node, scope, prefix)

    def collect_function(self, node: Node, scope: Scope, prefix: str) -> None:
        name = self.text(node.child_by_field_name("name"))
        span_node = node.parent if node.parent and node.parent.type == "decorated_definition" else node
        body = node.child_by_field_name("body")
        fn = self.add_node(
            EntityKind.FUNCTION,
            name,
            prefix + name,
            span_node,
            key=node,
            docstring=self.docstring(body),
        )
        scope.bind(name, fn.id)
        inner = Scope("function", fn.id, scope)
        self.scopes[node.id] = inner
        params = node.child_by_field_name("parameters")
        for param in params.named_children if params else ():
            ident = self.parameter_name(param)
            if ident is None:
                continue
            pname = self.text(ident)
            entity = self.add_node(
                EntityKind.PARAMETER, pname, f"{prefix}{name}.{pname}", param
            )
            inner.bind(pname, entity.id)
        if body is not None:
            self.collect(body, inner, f"{prefix}{name}.")

    def collect_class(self, node: Node, scope: Scope, prefix: str) -> None:
        name = self.text(node.child_by_field_name("name"))
        span_node = node.parent if node.parent and node.parent.type == "decorated_definition" else node
        body = node.child_by_field_name("body")
        cls = self.add_node(
            EntityKind.CLASS, name, prefix + name, span_node, key=node, docstring=self.docstring(body)
        )
        scope.bind(name, cls.id)
        inner = Scope("class", cls.id, scope)
        self.scopes[node.id] = inner
        self.class_scopes[cls.id] = inner
        if body is not None:
            self.collect(body, inner, f"{prefix}{name}.")

    def collect_import(self, node: Node, scope: Scope, prefix: str) -> None:
        if node.type == "future_import_statement":
            return
        for local, name_node in self.import_bindings(node):
            entity = self.add_node(EntityKind.IMPORT, local, prefix + local, node, key=name_node)
            scope.bind(local, entity.id)

    def import_bindings(self, node: Node) -> list[tuple[str, Node]]:
        out = []
        for i, child in enumerate(node.children):
            if node.field_name_for_child(i) != "name":
                continue
            if child.type == "aliased_import":
                out.append((self.text(child.child_by_field_name("alias")), child))
            elif node.type == "import_statement":
                # ``import a.b`` binds ``a``
                out.append((self.text(child).split(".")[0].strip(), child))
            else:
                out.append((self.text(child), child))
        return out

    def collect_assignment(self, node: Node, scope: Scope, prefix: str) -> None:
        top = node
        current = node
        while True:
            left = current.child_by_field_name("left")
            if left is not None:
                for ident in self.pattern_identifiers(left):
                    self.bind_variable(ident, top, scope, prefix)
            right = current.child_by_field_name("right")
            if right is None or right.type != "assignment":
                break
            current = right
        if right is not None:
            self.collect_node(right, scope, prefix)

    def bind_variable(self, ident: Node, span_node: Node, scope: Scope, prefix: str) -> None:
        name = self.text(ident)
        entity = self.add_node(EntityKind.VARIABLE, name, prefix + name, span_node, key=ident)
        scope.bind(name, entity.id)

    def pattern_identifiers(self, node: Node) -> list[Node]:
        """Identifiers bound by an assignment target; attributes/subscripts bind nothing."""
        if node.type == "identifier":
            return [node]
        if node.type in ("pattern_list", "tuple_pattern", "list_pattern", "as_pattern_target",
                         "tuple", "list", "list_splat_pattern", "parenthesized_expression"):
            out: list[Node] = []
            for child in node.named_children:
                out.extend(self.pattern_identifiers(child))
            return out
        return []

    @staticmethod
    def parameter_name(param: Node) -> Node | None:
        if param.type not in _PARAMETER_TYPES:
            return None
        if param.type == "identifier":
            return param
        named = param.child_by_field_name("name")
        if named is not None:
            return named
        for child in param.named_children:
            if child.type == "identifier":
                return child
        return None

    def docstring(self, body: Node | None) -> str | None:
        if body is None or not body.named_children:
            return None
        first = body.named_children[0]
        if first.type == "expression_statement" and first.named_children:
            expr = first.named_children[0]
            if expr.type == "string":
                return self.literal_string(self.text(expr))
        return None

    # ------------------------------------------------------------------ pass 2

    def link_block(self, node: Node, scope: Scope) -> None:
        for child in node.named_children:
            self.link_node(child, scope)

    def link_node(self, node: Node, scope: Scope) -> None:
        t = node.type
        owner = scope.owner
        if t == "function_definition":
            self.link_function(node, scope)
        elif t == "class_definition":
            self.link_class(node, scope)
        elif t == "decorated_definition":
            definition = node.child_by_field_name("definition")
            head = self.by_ts[definition.id]
            for child in node.named_children:
                if child.type == "decorator":
                    self.emit_all(head, Construct.REFERENCE, self.refs(child, scope))
            self.link_node(definition, scope)
        elif t in _IMPORTS or t in ("global_statement", "nonlocal_statement", "pass_statement"):
            return
        elif t == "expression_statement":
            for child in node.named_children:
                self.link_expression(child, scope)
        elif t == "with_statement":
            for clause in node.named_children:
                if clause.type == "with_clause":
                    for item in clause.named_children:
                        self.link_binding(item.child_by_field_name("value") or item, scope,
                                          Construct.WITH_BINDING)
                else:
                    self.link_node(clause, scope)
        elif t == "except_clause":
            for child in node.named_children:
                if _is_statement(child):
                    self.link_node(child, scope)
                else:
                    self.link_binding(child, scope, Construct.EXCEPT_BINDING)
        elif t == "for_statement":
            left = node.child_by_field_name("left")
            for child in node.named_children:
                if child is left:
                    continue
                if _is_statement(child):
                    self.link_node(child, scope)
                else:
                    self.emit_all(owner, Construct.REFERENCE, self.refs(child, scope))
        elif _is_statement(node):
            for child in node.named_children:
                if _is_statement(child):
                    self.link_node(child, scope)
                else:
                    self.emit_all(owner, Construct.REFERENCE, self.refs(child, scope))
        else:
            self.emit_all(owner, Construct.REFERENCE, self.refs(node, scope))

    def link_expression(self, node: Node, scope: Scope) -> None:
        if node.type == "assignment":
            self.link_assignment(node, scope)
        elif node.type == "augmented_assignment":
            self.link_augmented(node, scope)
        else:
            self.emit_all(scope.owner, Construct.REFERENCE, self.refs(node, scope))

    def link_binding(self, node: Node, scope: Scope, construct: Construct) -> None:
        """``with X as y`` / ``except E as e``: y/e depend on X/E through ``As``."""
        if node.type != "as_pattern":
            self.emit_all(scope.owner, Construct.REFERENCE, self.refs(node, scope))
            return
        alias = node.child_by_field_name("alias")
        targets = [self.by_ts[i.id] for i in self.pattern_identifiers(alias)] if alias else []
        value_refs = self.refs(node.named_children[0], scope)
        if not targets:
            self.emit_all(scope.owner, Construct.REFERENCE, value_refs)
        for target in targets:
            self.emit_all(target, construct, value_refs)

    def link_assignment(self, node: Node, scope: Scope) -> None:
        levels = []
        current = node
        while True:
            levels.append(current)
            right = current.child_by_field_name("right")
            if right is None or right.type != "assignment":
                break
            current = right
        value_refs = self.refs(right, scope) if right is not None else []
        for level in levels:
            left = level.child_by_field_name("left")
            targets = [self.by_ts[i.id] for i in self.pattern_identifiers(left)]
            if not targets:
                # ``obj.attr = value`` creates no binding: plain references
                self.emit_all(scope.owner, Construct.REFERENCE, self.refs(left, scope))
                self.emit_all(scope.owner, Construct.REFERENCE, value_refs)
                continue
            self.link_target_subexpressions(left, scope)
            annotation = level.child_by_field_name("type")
            type_refs = self.refs(annotation, scope) if annotation is not None else []
            for target in targets:
                self.emit_all(target, Construct.ASSIGNMENT, value_refs)
                self.emit_all(target, Construct.TYPE_ANNOTATION, type_refs)

    def link_target_subexpressions(self, left: Node, scope: Scope) -> None:
        if left.type in ("attribute", "subscript"):
            self.emit_all(scope.owner, Construct.REFERENCE, self.refs(left, scope))
            return
        for child in left.named_children:
            if child.type != "identifier":
                self.link_target_subexpressions(child, scope)

    def link_augmented(self, node: Node, scope: Scope) -> None:
        left = node.child_by_field_name("left")
        value_refs = self.refs(node.child_by_field_name("right"), scope)
        head = None
        if left.type == "identifier":
            status, target = self.lookup(self.text(left), scope)
            if status == "entity" and self.entities[target].kind in (
                EntityKind.VARIABLE, EntityKind.PARAMETER
            ):
                head = target
        if head is None:
            self.emit_all(scope.owner, Construct.REFERENCE, self.refs(left, scope) + value_refs)
        else:
            self.emit_all(head, Construct.AUGMENTED_ASSIGNMENT, value_refs)

    def link_function(self, node: Node, outer: Scope) -> None:
        fn = self.by_ts[node.id]
        inner = self.scopes[node.id]
        params = node.child_by_field_name("parameters")
        for param in params.named_children if params else ():
            annotation = param.child_by_field_name("type")
            default = param.child_by_field_name("value")
            ident = self.parameter_name(param)
            if annotation is not None and ident is not None:
                pid = self.by_ts[param.id]
                self.emit_all(pid, Construct.TYPE_ANNOTATION, self.refs(annotation, outer))
            if default is not None:
                self.emit_all(fn, Construct.REFERENCE, self.refs(default, outer))
        return_type = node.child_by_field_name("return_type")
        if return_type is not None:
            self.emit_all(fn, Construct.RETURN_TYPE, self.refs(return_type, outer))
        body = node.child_by_field_name("body")
        if body is not None:
            self.link_block(body, inner)

    def link_class(self, node: Node, outer: Scope) -> None:
        cls = self.by_ts[node.id]
        bases = node.child_by_field_name("superclasses")
        for base in bases.named_children if bases else ():
            if base.type == "keyword_argument":
                self.emit_all(cls, Construct.REFERENCE, self.refs(base, outer))
            else:
                self.emit_all(cls, Construct.BASE_CLASS, self.refs(base, outer))
        body = node.child_by_field_name("body")
        if body is not None:
            self.link_block(body, self.scopes[node.id])

    # ------------------------------------------------------------ expressions

    def refs(self, node: Node | None, scope: Scope) -> list[Ref]:
        out: list[Ref] = []
        if node is not None:
            self._refs(node, scope, out)
        return out

    def _refs(self, node: Node, scope: Scope, out: list[Ref]) -> None:
        t = node.type
        if t == "identifier":
            out.append(self.resolve(self.text(node), node, scope))
        elif t == "attribute":
            root, path = self.attribute_chain(node)
            if root.type == "identifier":
                out.append(self.resolve_attribute(root, path, scope))
            else:
                self._refs(root, scope, out)
        elif t == "keyword_argument":
            value = node.child_by_field_name("value")
            if value is not None:
                self._refs(value, scope, out)
        elif t == "string":
            for child in node.named_children:
                if child.type == "interpolation":
                    self._refs(child, scope, out)
        elif t in _LITERALS:
            return
        elif t == "lambda":
            local = Scope("function", scope.owner, scope)
            params = node.child_by_field_name("parameters")
            for param in params.named_children if params else ():
                ident = self.parameter_name(param)
                if ident is not None:
                    local.locals.add(self.text(ident))
                default = param.child_by_field_name("value")
                if default is not None:
                    self._refs(default, scope, out)
            body = node.child_by_field_name("body")
            if body is not None:
                self._refs(body, local, out)
        elif t in _COMPREHENSIONS:
            local = Scope("function", scope.owner, scope)
            clauses = [c for c in node.named_children if c.type == "for_in_clause"]
            for clause in clauses:
                left = clause.child_by_field_name("left")
                local.locals.update(self.text(i) for i in self.pattern_identifiers(left))
            for child in node.named_children:
                if child.type == "for_in_clause":
                    right = child.child_by_field_name("right")
                    if right is not None:
                        self._refs(right, local, out)
                else:
                    self._refs(child, local, out)
        elif t == "named_expression":
            name = node.child_by_field_name("name")
            value_refs = self.refs(node.child_by_field_name("value"), scope)
            var = self.by_ts.get(name.id)
            if var is not None:
                self.emit_all(var, Construct.ASSIGNMENT, value_refs)
                out.append(Ref(self.text(name), (name.start_byte, name.end_byte), var))
        else:
            for child in node.named_children:
                self._refs(child, scope, out)

    def attribute_chain(self, node: Node) -> tuple[Node, str]:
        parts = []
        while node.type == "attribute":
            parts.append(self.text(node.child_by_field_name("attribute")))
            node = node.child_by_field_name("object")
        return node, ".".join(reversed(parts))

    def resolve_attribute(self, root: Node, path: str, scope: Scope) -> Ref:
        name = self.text(root)
        span = (root.start_byte, root.end_byte)
        if name in ("self", "cls"):
            owner_class = self.method_class(scope)
            if owner_class is not None:
                member = self.member(owner_class, path, span)
                if member is not None:
                    return member
            return Ref(f"{name}.{path}", span, reason="dynamic")
        return self.resolve(name, root, scope, attr=path)

    def method_class(self, scope: Scope) -> str | None:
        if scope.kind != "function" or scope.parent is None:
            return None
        if scope.parent.kind == "class":
            return scope.parent.owner
        return None
