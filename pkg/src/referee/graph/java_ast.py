"""Entity and edge extraction for Java syntax trees.

Construct correspondence with the Python walker: ``method_declaration`` /
``constructor_declaration`` play the role of ``function_definition``,
``class_declaration`` (and interface/enum/record) of ``class_definition``,
``field_declaration`` / ``local_variable_declaration`` of ``assignment`` and
``import_declaration`` of ``import_statement``.
"""

from __future__ import annotations

from tree_sitter import Node

from ._extract import Extractor, Ref, Scope
from .model import EntityKind, Language
from .relations import Construct

_CLASS_TYPES = frozenset(
    {
        "class_declaration",
        "interface_declaration",
        "enum_declaration",
        "record_declaration",
        "annotation_type_declaration",
    }
)
_METHOD_TYPES = frozenset({"method_declaration", "constructor_declaration", "compact_constructor_declaration"})
_DECLARATIONS = frozenset({"field_declaration", "local_variable_declaration", "constant_declaration"})
_LITERALS = frozenset(
    {
        "decimal_integer_literal",
        "hex_integer_literal",
        "octal_integer_literal",
        "binary_integer_literal",
        "decimal_floating_point_literal",
        "hex_floating_point_literal",
        "string_literal",
        "character_literal",
        "true",
        "false",
        "null_literal",
        "line_comment",
        "block_comment",
        "integral_type",
        "floating_point_type",
        "boolean_type",
        "void_type",
        "this",
        "super",
        "modifiers",
        "marker_annotation",
        "annotation",
        "dimensions",
    }
)
# java.lang names are implicitly imported
_JAVA_LANG = frozenset(
    {
        "Object", "String", "StringBuilder", "StringBuffer", "Integer", "Long", "Short", "Byte",
        "Double", "Float", "Boolean", "Character", "Number", "Math", "System", "Thread",
        "Runnable", "Exception", "RuntimeException", "Error", "Throwable", "Iterable",
        "Comparable", "CharSequence", "Class", "Enum", "Void", "Override", "Deprecated",
        "IllegalArgumentException", "IllegalStateException", "NullPointerException",
        "IndexOutOfBoundsException", "UnsupportedOperationException", "ArithmeticException",
        "ClassCastException", "NumberFormatException", "InterruptedException", "AutoCloseable",
        "Cloneable", "SuppressWarnings", "FunctionalInterface", "Record",
    }
)


def _is_statement(node: Node) -> bool:
    t = node.type
    return (
        t.endswith("_statement")
        or t in ("block", "switch_block", "switch_block_statement_group", "switch_rule",
                 "catch_clause", "finally_clause", "constructor_body", "class_body")
        or t in _DECLARATIONS
        or t in _CLASS_TYPES
        or t in _METHOD_TYPES
    )


class JavaExtractor(Extractor):
    language = Language.JAVA
    builtins = _JAVA_LANG
    class_scope_visible = True

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
        if t in _CLASS_TYPES:
            self.collect_class(node, scope, prefix)
        elif t in _METHOD_TYPES:
            self.collect_method(node, scope, prefix)
        elif t == "import_declaration":
            binding = self.import_binding(node)
            if binding is not None:
                entity = self.add_node(EntityKind.IMPORT, binding, prefix + binding, node)
                scope.bind(binding, entity.id)
        elif t in _DECLARATIONS:
            for decl in self.declarators(node):
                self.bind_variable(decl.child_by_field_name("name"), node, scope, prefix)
            self.collect(node, scope, prefix)
        elif t == "resource":
            name = node.child_by_field_name("name")
            if name is not None:
                self.bind_variable(name, node, scope, prefix)
            self.collect(node, scope, prefix)
        elif t == "catch_formal_parameter":
            name = node.child_by_field_name("name")
            if name is not None:
                self.bind_variable(name, node, scope, prefix)
        elif t == "enum_constant":
            self.bind_variable(node.child_by_field_name("name"), node, scope, prefix)
            self.collect(node, scope, prefix)
        elif t == "enhanced_for_statement":
            name = node.child_by_field_name("name")
            if name is not None:
                scope.locals.add(self.text(name))
            self.collect(node, scope, prefix)
        elif t in ("lambda_expression", "package_declaration"):
            return
        else:
            self.collect(node, scope, prefix)

    def collect_class(self, node: Node, scope: Scope, prefix: str) -> None:
        name = self.text(node.child_by_field_name("name"))
        cls = self.add_node(
            EntityKind.CLASS, name, prefix + name, node, docstring=self.javadoc(node)
        )
        scope.bind(name, cls.id)
        inner = Scope("class", cls.id, scope)
        self.scopes[node.id] = inner
        self.class_scopes[cls.id] = inner
        body = node.child_by_field_name("body")
        if body is not None:
            self.collect(body, inner, f"{prefix}{name}.")

    def collect_method(self, node: Node, scope: Scope, prefix: str) -> None:
        name_node = node.child_by_field_name("name")
        name = self.text(name_node)
        fn = self.add_node(
            EntityKind.FUNCTION, name, prefix + name, node, docstring=self.javadoc(node)
        )
        scope.bind(name, fn.id)
        inner = Scope("function", fn.id, scope)
        self.scopes[node.id] = inner
        params = node.child_by_field_name("parameters")
        for param in params.named_children if params else ():
            if param.type not in ("formal_parameter", "spread_parameter"):
                continue
            ident = self.parameter_name(param)
            if ident is None:
                continue
            pname = self.text(ident)
            entity = self.add_node(EntityKind.PARAMETER, pname, f"{prefix}{name}.{pname}", param)
            inner.bind(pname, entity.id)
        body = node.child_by_field_name("body")
        if body is not None:
            self.collect(body, inner, f"{prefix}{name}.")

    def parameter_name(self, param: Node) -> Node | None:
        name = param.child_by_field_name("name")
        if name is not None:
            return name
        for child in param.named_children:
            if child.type == "variable_declarator":
                return child.child_by_field_name("name")
        return None

    def bind_variable(self, ident: Node, span_node: Node, scope: Scope, prefix: str) -> None:
        name = self.text(ident)
        entity = self.add_node(EntityKind.VARIABLE, name, prefix + name, span_node, key=ident)
        scope.bind(name, entity.id)

    @staticmethod
    def declarators(node: Node) -> list[Node]:
        return [c for c in node.named_children if c.type == "variable_declarator"]

    def import_binding(self, node: Node) -> str | None:
        if any(c.type == "asterisk" for c in node.named_children):
            return None
        for child in node.named_children:
            if child.type in ("scoped_identifier", "identifier"):
                return self.text(child).rsplit(".", 1)[-1].strip()
        return None

    def javadoc(self, node: Node) -> str | None:
        prev = node.prev_named_sibling
        if prev is not None and prev.type == "block_comment":
            text = self.text(prev)
            if text.startswith("/**"):
                lines = [ln.strip().lstrip("*").strip() for ln in text[3:-2].splitlines()]
                return "\n".join(ln for ln in lines if ln) or None
        return None

    # ------------------------------------------------------------------ pass 2

    def link_block(self, node: Node, scope: Scope) -> None:
        for child in node.named_children:
            self.link_node(child, scope)

    def link_node(self, node: Node, scope: Scope) -> None:
        t = node.type
        owner = scope.owner
        if t in _CLASS_TYPES:
            self.link_class(node, scope)
        elif t in _METHOD_TYPES:
            self.link_method(node, scope)
        elif t in ("import_declaration", "package_declaration") or t in _LITERALS:
            return
        elif t in _DECLARATIONS:
            self.link_declaration(node, scope)
        elif t == "enum_constant":
            var = self.by_ts[node.child_by_field_name("name").id]
            for child in node.named_children:
                if child.type == "argument_list":
                    self.emit_all(var, Construct.DECLARATION, self.refs(child, scope))
                elif child.type == "class_body":
                    self.link_block(child, scope)
        elif t == "expression_statement":
            for child in node.named_children:
                if child.type == "assignment_expression":
                    self.link_assignment(child, scope)
                else:
                    self.emit_all(owner, Construct.REFERENCE, self.refs(child, scope))
        elif t == "try_with_resources_statement":
            for child in node.named_children:
                if child.type == "resource_specification":
                    for resource in child.named_children:
                        self.link_resource(resource, scope)
                else:
                    self.link_node(child, scope)
        elif t == "catch_clause":
            for child in node.named_children:
                if child.type == "catch_formal_parameter":
                    self.link_catch(child, scope)
                else:
                    self.link_node(child, scope)
        elif t == "enhanced_for_statement":
            for field_name in ("type", "value"):
                part = node.child_by_field_name(field_name)
                if part is not None:
                    self.emit_all(owner, Construct.REFERENCE, self.refs(part, scope))
            body = node.child_by_field_name("body")
            if body is not None:
                self.link_node(body, scope)
        elif _is_statement(node):
            for child in node.named_children:
                if _is_statement(child):
                    self.link_node(child, scope)
                else:
                    self.emit_all(owner, Construct.REFERENCE, self.refs(child, scope))
        else:
            self.emit_all(owner, Construct.REFERENCE, self.refs(node, scope))

    def link_class(self, node: Node, outer: Scope) -> None:
        cls = self.by_ts[node.id]
        inner = self.scopes[node.id]
        for field_name in ("superclass", "interfaces"):
            part = node.child_by_field_name(field_name)
            if part is not None:
                self.emit_types(cls, Construct.BASE_CLASS, part, outer)
        for child in node.named_children:
            if child.type == "extends_interfaces":
                self.emit_types(cls, Construct.BASE_CLASS, child, outer)
        body = node.child_by_field_name("body")
        if body is not None:
            self.link_block(body, inner)

    def link_method(self, node: Node, outer: Scope) -> None:
        fn = self.by_ts[node.id]
        inner = self.scopes[node.id]
        return_type = node.child_by_field_name("type")
        if return_type is not None:
            self.emit_types(fn, Construct.RETURN_TYPE, return_type, outer)
        params = node.child_by_field_name("parameters")
        for param in params.named_children if params else ():
            pid = self.by_ts.get(param.id)
            ptype = param.child_by_field_name("type")
            if ptype is None:
                ptype = next((c for c in param.named_children if c.type.endswith("type")), None)
            if pid is not None and ptype is not None:
                self.emit_types(pid, Construct.TYPE_ANNOTATION, ptype, outer)
        for child in node.named_children:
            if child.type == "throws":
                self.emit_all(fn, Construct.REFERENCE, self.refs(child, outer))
        body = node.child_by_field_name("body")
        if body is not None:
            self.link_block(body, inner)

    def link_declaration(self, node: Node, scope: Scope) -> None:
        decl_type = node.child_by_field_name("type")
        for decl in self.declarators(node):
            var = self.by_ts[decl.child_by_field_name("name").id]
            if decl_type is not None:
                self.emit_types(var, Construct.TYPE_ANNOTATION, decl_type, scope)
            value = decl.child_by_field_name("value")
            if value is not None:
                self.emit_all(var, Construct.DECLARATION, self.refs(value, scope))

    def link_assignment(self, node: Node, scope: Scope) -> None:
        left = node.child_by_field_name("left")
        value_refs = self.refs(node.child_by_field_name("right"), scope)
        head = None
        target_refs = self.refs(left, scope)
        if len(target_refs) == 1 and target_refs[0].target is not None:
            kind = self.entities[target_refs[0].target].kind
            if kind in (EntityKind.VARIABLE, EntityKind.PARAMETER):
                head = target_refs[0].target
        if head is None:
            self.emit_all(scope.owner, Construct.REFERENCE, target_refs + value_refs)
        else:
            self.emit_all(head, Construct.ASSIGNMENT, value_refs)

    def link_resource(self, resource: Node, scope: Scope) -> None:
        name = resource.child_by_field_name("name")
        if name is None:
            self.emit_all(scope.owner, Construct.REFERENCE, self.refs(resource, scope))
            return
        var = self.by_ts[name.id]
        rtype = resource.child_by_field_name("type")
        if rtype is not None:
            self.emit_types(var, Construct.TYPE_ANNOTATION, rtype, scope)
        value = resource.child_by_field_name("value")
        if value is not None:
            self.emit_all(var, Construct.RESOURCE_BINDING, self.refs(value, scope))

    def link_catch(self, node: Node, scope: Scope) -> None:
        var = self.by_ts[node.child_by_field_name("name").id]
        for child in node.named_children:
            if child.type == "catch_type":
                self.emit_all(var, Construct.CATCH_BINDING, self.refs(child, scope))

    def emit_types(self, head: str, construct: Construct, type_node: Node, scope: Scope) -> None:
        """Outer named types get ``construct``; generic arguments get plain references."""
        t = type_node.type
        if t in ("type_identifier", "scoped_type_identifier"):
            self.emit_all(head, construct, self.refs(type_node, scope))
        elif t == "generic_type":
            for child in type_node.named_children:
                if child.type == "type_arguments":
                    self.emit_all(head, Construct.GENERIC_ARGUMENT, self.refs(child, scope))
                else:
                    self.emit_types(head, construct, child, scope)
        elif t in _LITERALS:
            return
        else:
            for child in type_node.named_children:
                self.emit_types(head, construct, child, scope)

    # ------------------------------------------------------------ expressions

    def refs(self, node: Node | None, scope: Scope) -> list[Ref]:
        out: list[Ref] = []
        if node is not None:
            self._refs(node, scope, out)
        return out

    def _refs(self, node: Node, scope: Scope, out: list[Ref]) -> None:
        t = node.type
        if t in ("identifier", "type_identifier"):
            out.append(self.resolve(self.text(node), node, scope))
        elif t == "scoped_type_identifier":
            parts = self.text(node).split(".")
            first = node.named_children[0]
            while first.type == "scoped_type_identifier":
                first = first.named_children[0]
            out.append(self.resolve(parts[0].strip(), first, scope,
                                    attr=".".join(p.strip() for p in parts[1:]) or None))
        elif t == "field_access":
            self.chain(node, scope, out)
        elif t == "method_invocation":
            obj = node.child_by_field_name("object")
            name = node.child_by_field_name("name")
            if obj is None:
                out.append(self.resolve(self.text(name), name, scope))
            else:
                self.chain(node, scope, out)
            args = node.child_by_field_name("arguments")
            if args is not None:
                self._refs(args, scope, out)
        elif t in _LITERALS:
            return
        elif t == "lambda_expression":
            local = Scope("function", scope.owner, scope)
            params = node.child_by_field_name("parameters")
            if params is not None:
                if params.type == "identifier":
                    local.locals.add(self.text(params))
                for ident in self.descendants(params, "identifier"):
                    local.locals.add(self.text(ident))
            body = node.child_by_field_name("body")
            if body is not None:
                self._refs(body, local, out)
        elif t == "local_variable_declaration":
            # declarations nested in lambda blocks: treat as scope-local names
            for decl in self.declarators(node):
                scope.locals.add(self.text(decl.child_by_field_name("name")))
                value = decl.child_by_field_name("value")
                if value is not None:
                    self._refs(value, scope, out)
        else:
            for child in node.named_children:
                self._refs(child, scope, out)

    def descendants(self, node: Node, node_type: str) -> list[Node]:
        out = []
        for child in node.named_children:
            if child.type == node_type:
                out.append(child)
            out.extend(self.descendants(child, node_type))
        return out

    def chain(self, node: Node, scope: Scope, out: list[Ref]) -> None:
        """Resolve ``a.b.c`` / ``a.b.m(...)`` rooted at an identifier or ``this``."""
        parts: list[str] = []
        current = node
        while current.type in ("field_access", "method_invocation"):
            if current.type == "field_access":
                parts.append(self.text(current.child_by_field_name("field")))
                nxt = current.child_by_field_name("object")
            else:
                parts.append(self.text(current.child_by_field_name("name")))
                nxt = current.child_by_field_name("object")
                if current is not node:
                    args = current.child_by_field_name("arguments")
                    if args is not None:
                        self._refs(args, scope, out)
            if nxt is None:
                break
            current = nxt
        path = ".".join(reversed(parts))
        span = (current.start_byte, current.end_byte)
        if current.type == "this":
            class_scope = scope.enclosing_class()
            member = self.member(class_scope.owner, path, span) if class_scope else None
            out.append(member or Ref(f"this.{path}", span, reason="dynamic"))
        elif current.type == "identifier":
            out.append(self.resolve(self.text(current), current, scope, attr=path))
        elif current.type == "super":
            out.append(Ref(f"super.{path}", span, reason="dynamic"))
        else:
            self._refs(current, scope, out)
