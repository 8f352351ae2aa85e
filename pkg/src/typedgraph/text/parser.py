"""Recursive-descent readers for schema (``.tgs``) and instance (``.tgi``) documents.

Schema grammar::

    schema      := "schema" IDENT "{" item* "}"
    item        := typedef | nodedef | edgedef | constraintdef | groupdef
    typedef     := "type" IDENT "=" typeexpr
    typeexpr    := basetype [cmp literal] | "record" "(" [field ("," field)*] ")"
                 | "list" "<" IDENT ">" "[" mult "]" | "union" "(" IDENT ("|" IDENT)+ ")"
                 | "any" | IDENT
    nodedef     := "node" IDENT ":" IDENT
    edgedef     := "edge" label ["prop" IDENT] "tail" endpoints "head" endpoints
    endpoints   := "(" [IDENT "[" mult "]" ("," IDENT "[" mult "]")*] ")"
    mult        := INT ".." (INT | "*")
    constraintdef := "constraint" ( "uniquePer" "(" label ":" IDENT ("," IDENT)* ")"
                                  | "uniqueProp" "(" IDENT "," path ")"
                                  | "pred" "(" label "," path cmp literal ")"
                                  | "acyclic" "(" label ")" )
    groupdef    := "group" IDENT "{" IDENT ("," IDENT)* ("aggregate" aggspec+)* "}"
    aggspec     := IDENT "=" ( "count" "(" IDENT ")" | "countEdges" "(" label ")"
                             | "sum" "(" IDENT "," path ")" )
    path        := "self" | IDENT ("." IDENT)*
    label       := IDENT | STRING

Instance grammar::

    graph  := "graph" IDENT "uses" IDENT "{" (nodeitem | edgeitem)* "}"
    nodeitem := "n" sym ":" IDENT "=" value
    edgeitem := "e" ":" label "(" [sym ("," sym)*] ["->" sym ("," sym)*] ")" ["=" value]
    value  := INT | DECIMAL | STRING | "true" | "false"
            | "{" [IDENT ":" value ("," IDENT ":" value)*] "}"
            | "[" [value ("," value)*] "]" | IDENT "(" value ")"
"""

from __future__ import annotations

from typing import Any, Callable

from ..datatypes import (
    BASE_KINDS,
    AnyType,
    ConstrainedBase,
    ListType,
    RecordType,
    Tagged,
    TypeRef,
    UnionType,
)
from ..errors import ParseError, TypedGraphError
from ..schema import (
    Acyclic,
    AggregateSpec,
    Count,
    CountEdges,
    Multiplicity,
    PropertyPredicate,
    Sum,
    TypedGraphSchema,
    UniquePer,
    UniqueProperty,
    constraint_subject,
)
from ..store import MutationBatch, Placeholder
from .lexer import (
    CMP_OPS,
    EOF,
    IDENT,
    OP,
    STRING,
    Diagnostic,
    SyntaxProblem,
    Token,
    TokenStream,
)


def _guard(fn: Callable[[], Any]) -> Any:
    try:
        return fn()
    except SyntaxProblem as exc:
        raise ParseError([exc.diagnostic]) from None
    except RecursionError:
        raise ParseError([Diagnostic("error", 1, 1, "input nested too deeply")]) from None


def parse_multiplicity(ts: TokenStream) -> Multiplicity:
    lo = ts.integer()
    ts.expect("..")
    if ts.accept("*"):
        return Multiplicity(lo, None)
    return Multiplicity(lo, ts.integer())


def parse_path(ts: TokenStream) -> tuple[str, ...]:
    if ts.accept("self"):
        return ()
    parts = [ts.ident("field name")]
    while ts.accept("."):
        parts.append(ts.ident("field name"))
    return tuple(parts)


def parse_cmp(ts: TokenStream) -> str:
    tok = ts.current
    if tok.kind == OP and tok.text in CMP_OPS:
        ts.advance()
        return tok.text
    ts.fail(f"unexpected {tok.describe()}", "comparison operator")


# -- schema --------------------------------------------------------------------------


class _SchemaReader:
    def __init__(self, text: str):
        self.ts = TokenStream(text)
        self.locations: dict[str, Token] = {}
        self.diagnostics: list[Diagnostic] = []

    def read(self) -> TypedGraphSchema:
        ts = self.ts
        head = ts.expect("schema")
        name = ts.ident("schema name")
        self.locations[name] = head
        schema = TypedGraphSchema(name)
        ts.expect("{")
        while not ts.at("}"):
            tok = ts.current
            if tok.kind == EOF:
                ts.fail("unterminated schema block", "'}'")
            try:
                self.item(schema)
            except SyntaxProblem:
                raise
            except TypedGraphError as exc:
                self.diagnostics.append(Diagnostic("error", tok.line, tok.column, str(exc)))
        ts.expect("}")
        if ts.current.kind != EOF:
            ts.fail(f"unexpected {ts.current.describe()} after schema", "end of input")
        return schema

    def item(self, schema: TypedGraphSchema) -> None:
        ts = self.ts
        tok = ts.current
        if ts.accept("type"):
            label = ts.ident("type label")
            self.locations.setdefault(label, tok)
            ts.expect("=")
            definition = self.typeexpr()
            try:
                schema.define_type(label, definition)
            except ValueError as exc:
                raise TypedGraphError(str(exc)) from None
        elif ts.accept("node"):
            label = ts.ident("node type label")
            self.locations.setdefault(label, tok)
            ts.expect(":")
            schema.add_node_type(label, ts.ident("payload type"))
        elif ts.accept("edge"):
            label = ts.label("edge type label")
            self.locations.setdefault(label, tok)
            prop = None
            if ts.accept("prop"):
                prop = ts.ident("property type")
            ts.expect("tail")
            tail = self.endpoints()
            ts.expect("head")
            head = self.endpoints()
            kwargs = {} if prop is None else {"prop": prop}
            schema.add_edge_type(label, tail, head, **kwargs)
        elif ts.accept("constraint"):
            c = self.constraint()
            self.locations.setdefault(constraint_subject(c), tok)
            schema.add_constraint(c)
        elif ts.accept("group"):
            label = ts.ident("group label")
            self.locations.setdefault(label, tok)
            ts.expect("{")
            members = [ts.ident("node type")]
            while ts.accept(","):
                members.append(ts.ident("node type"))
            aggregates = []
            while ts.accept("aggregate"):
                aggregates.append(self.aggspec(label))
                while ts.current.kind == IDENT and not ts.at("aggregate"):
                    aggregates.append(self.aggspec(label))
            ts.expect("}")
            schema.add_group(label, members, aggregates)
        else:
            ts.fail(f"unexpected {tok.describe()}", "'type', 'node', 'edge', 'constraint', 'group' or '}'")

    def typeexpr(self):
        ts = self.ts
        if ts.accept("record"):
            ts.expect("(")
            fields = []
            if not ts.at(")"):
                fields.append(self.field())
                while ts.accept(","):
                    fields.append(self.field())
            ts.expect(")")
            return RecordType(fields)
        if ts.accept("list"):
            ts.expect("<")
            element = ts.ident("element type")
            ts.expect(">")
            ts.expect("[")
            m = parse_multiplicity(ts)
            ts.expect("]")
            return ListType(element, m.min, m.max)
        if ts.accept("union"):
            ts.expect("(")
            alts = [ts.ident("alternative type")]
            ts.expect("|")
            alts.append(ts.ident("alternative type"))
            while ts.accept("|"):
                alts.append(ts.ident("alternative type"))
            ts.expect(")")
            return UnionType(alts)
        if ts.accept("any"):
            return AnyType()
        label = ts.ident("type expression")
        if label in BASE_KINDS and ts.current.kind == OP and ts.current.text in CMP_OPS:
            op = parse_cmp(ts)
            return ConstrainedBase(label, op, ts.literal())
        return TypeRef(label)

    def field(self) -> tuple[str, str]:
        name = self.ts.ident("field name")
        self.ts.expect(":")
        return name, self.ts.ident("field type")

    def endpoints(self) -> dict[str, Multiplicity]:
        ts = self.ts
        ts.expect("(")
        slots: dict[str, Multiplicity] = {}
        if not ts.at(")"):
            while True:
                tok = ts.current
                label = ts.ident("node type")
                ts.expect("[")
                m = parse_multiplicity(ts)
                ts.expect("]")
                if label in slots:
                    ts.fail(f"node type {label!r} listed twice in one end", tok=tok)
                slots[label] = m
                if not ts.accept(","):
                    break
        ts.expect(")")
        return slots

    def constraint(self):
        ts = self.ts
        kind = ts.ident("constraint kind")
        ts.expect("(")
        if kind == "uniquePer":
            target = ts.label("target")
            ts.expect(":")
            key = [ts.ident("key node type")]
            while ts.accept(","):
                key.append(ts.ident("key node type"))
            c = UniquePer(target, tuple(key))
        elif kind == "uniqueProp":
            node = ts.ident("node type")
            ts.expect(",")
            c = UniqueProperty(node, parse_path(ts))
        elif kind == "pred":
            label = ts.label("node or edge type")
            ts.expect(",")
            path = parse_path(ts)
            op = parse_cmp(ts)
            c = PropertyPredicate(label, path, op, ts.literal())
        elif kind == "acyclic":
            c = Acyclic(ts.label("edge type"))
        else:
            ts.fail(f"unknown constraint kind {kind!r}", "uniquePer, uniqueProp, pred or acyclic", tok=ts.peek(-2))
        ts.expect(")")
        return c

    def aggspec(self, group: str) -> AggregateSpec:
        ts = self.ts
        name = ts.ident("aggregate name")
        ts.expect("=")
        kind = ts.ident("aggregate function")
        ts.expect("(")
        if kind == "count":
            d = Count(ts.ident("node type"))
        elif kind == "countEdges":
            d = CountEdges(ts.label("edge type"))
        elif kind == "sum":
            node = ts.ident("node type")
            ts.expect(",")
            d = Sum(node, parse_path(ts))
        else:
            ts.fail(f"unknown aggregate {kind!r}", "count, countEdges or sum")
        ts.expect(")")
        return AggregateSpec(group, name, d)


def parse_schema(text: str, validate: bool = True) -> TypedGraphSchema:
    """Read a schema document.

    Raises :class:`ParseError` on syntax errors, on rejected declarations and,
    when ``validate`` is set, on every problem reported by schema validation.
    """
    reader = _SchemaReader(text)
    schema = _guard(reader.read)
    if reader.diagnostics:
        raise ParseError(reader.diagnostics)
    if validate:
        report = schema.validate()
        if not report.ok:
            fallback = reader.locations.get(schema.name)
            diags = []
            for issue in report.errors:
                tok = reader.locations.get(issue.subject.split(".")[0], fallback)
                line, col = (tok.line, tok.column) if tok else (1, 1)
                diags.append(Diagnostic("error", line, col, f"{issue.code} {issue.subject}: {issue.detail}"))
            raise ParseError(diags)
    return schema


# -- instances ---------------------------------------------------------------------------


def parse_value(ts: TokenStream) -> Any:
    tok = ts.current
    if ts.accept("{"):
        record: dict[str, Any] = {}
        if not ts.at("}"):
            while True:
                ftok = ts.current
                name = ts.ident("field name")
                if name in record:
                    ts.fail(f"field {name!r} given twice", tok=ftok)
                ts.expect(":")
                record[name] = parse_value(ts)
                if not ts.accept(","):
                    break
        ts.expect("}")
        return record
    if ts.accept("["):
        items = []
        if not ts.at("]"):
            items.append(parse_value(ts))
            while ts.accept(","):
                items.append(parse_value(ts))
        ts.expect("]")
        return items
    if tok.kind == IDENT and tok.text not in ("true", "false"):
        ts.advance()
        ts.expect("(")
        inner = parse_value(ts)
        ts.expect(")")
        return Tagged(tok.text, inner)
    return ts.literal()


def _symbol(ts: TokenStream) -> tuple[str, Token]:
    tok = ts.current
    if tok.kind not in (IDENT, STRING):
        ts.fail(f"unexpected {tok.describe()}", "node symbol")
    return ts.label("node symbol"), tok


def parse_instance(text: str, schema: TypedGraphSchema) -> MutationBatch:
    """Read an instance document into an uncommitted :class:`MutationBatch`.

    Node symbols become node names; edges refer to them through placeholders.
    """
    diagnostics: list[Diagnostic] = []

    def run() -> MutationBatch:
        ts = TokenStream(text)
        ts.expect("graph")
        name = ts.ident("graph name")
        uses_tok = ts.expect("uses")
        uses = ts.ident("schema name")
        if uses != schema.name:
            diagnostics.append(
                Diagnostic("error", uses_tok.line, uses_tok.column, f"instance uses schema {uses!r}, got {schema.name!r}")
            )
        batch = MutationBatch()
        batch.name = name
        symbols: dict[str, Placeholder] = {}
        ts.expect("{")
        while not ts.at("}"):
            tok = ts.current
            if tok.kind == EOF:
                ts.fail("unterminated graph block", "'}'")
            if ts.accept("n"):
                sym, stok = _symbol(ts)
                ts.expect(":")
                ttok = ts.current
                type_label = ts.ident("node type")
                ts.expect("=")
                raw = parse_value(ts)
                if sym in symbols:
                    diagnostics.append(Diagnostic("error", stok.line, stok.column, f"node symbol {sym!r} defined twice"))
                    continue
                nt = schema.node_types.get(type_label)
                if nt is None:
                    diagnostics.append(
                        Diagnostic("error", ttok.line, ttok.column, f"UnknownTypeLabel: no node type {type_label!r}")
                    )
                    continue
                symbols[sym] = batch.insert_node(type_label, schema.registry.coerce(nt.payload, raw), name=sym)
            elif ts.accept("e"):
                ts.expect(":")
                ttok = ts.current
                type_label = ts.label("edge type")
                ts.expect("(")
                tail: list[tuple[str, Token]] = []
                head: list[tuple[str, Token]] = []
                if ts.current.kind in (IDENT, STRING):
                    tail.append(_symbol(ts))
                    while ts.accept(","):
                        tail.append(_symbol(ts))
                if ts.accept("->"):
                    head.append(_symbol(ts))
                    while ts.accept(","):
                        head.append(_symbol(ts))
                ts.expect(")")
                raw = parse_value(ts) if ts.accept("=") else {}
                et = schema.edge_types.get(type_label)
                if et is None:
                    diagnostics.append(
                        Diagnostic("error", ttok.line, ttok.column, f"UnknownTypeLabel: no edge type {type_label!r}")
                    )
                    continue
                refs = []
                for group in (tail, head):
                    part = []
                    for sym, stok in group:
                        if sym not in symbols:
                            diagnostics.append(
                                Diagnostic("error", stok.line, stok.column, f"undefined node symbol {sym!r}")
                            )
                        else:
                            part.append(symbols[sym])
                    refs.append(part)
                if len(refs[0]) == len(tail) and len(refs[1]) == len(head):
                    batch.insert_edge(type_label, refs[0], refs[1], schema.registry.coerce(et.prop, raw))
            else:
                ts.fail(f"unexpected {tok.describe()}", "'n', 'e' or '}'")
        ts.expect("}")
        if ts.current.kind != EOF:
            ts.fail(f"unexpected {ts.current.describe()} after graph", "end of input")
        return batch

    batch = _guard(run)
    if diagnostics:
        raise ParseError(diagnostics)
    return batch


__all__ = ["parse_schema", "parse_instance", "parse_value", "parse_multiplicity", "parse_path"]
