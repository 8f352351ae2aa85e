"""Canonical text output for schemas, instances and violation reports."""

from __future__ import annotations

from collections.abc import Mapping
from typing import Any

from ..datatypes import (
    AnyType,
    BaseType,
    ConstrainedBase,
    ListType,
    RecordType,
    Tagged,
    TypeRef,
    UnionType,
)
from ..report import Report
from ..schema import (
    Acyclic,
    Count,
    CountEdges,
    PropertyPredicate,
    Sum,
    TypedGraphSchema,
    UniquePer,
    UniqueProperty,
)
from ..store import TypedGraph
from .lexer import format_label, format_literal

INDENT = "  "


def format_type(d) -> str:
    if isinstance(d, BaseType):
        return d.kind
    if isinstance(d, ConstrainedBase):
        return f"{d.base} {d.op} {format_literal(d.literal)}"
    if isinstance(d, RecordType):
        return "record(" + ", ".join(f"{n}: {t}" for n, t in d.fields) + ")"
    if isinstance(d, ListType):
        hi = "*" if d.max_count is None else d.max_count
        return f"list<{d.element}>[{d.min_count}..{hi}]"
    if isinstance(d, UnionType):
        return "union(" + " | ".join(d.alternatives) + ")"
    if isinstance(d, AnyType):
        return "any"
    if isinstance(d, TypeRef):
        return d.target
    raise TypeError(f"not a type definition: {d!r}")


def _path(path: tuple[str, ...]) -> str:
    return ".".join(path) if path else "self"


def format_constraint(c) -> str:
    if isinstance(c, UniquePer):
        return f"uniquePer({format_label(c.target)}: {', '.join(c.key)})"
    if isinstance(c, UniqueProperty):
        return f"uniqueProp({c.node_type}, {_path(c.path)})"
    if isinstance(c, PropertyPredicate):
        return f"pred({format_label(c.label)}, {_path(c.path)} {c.op} {format_literal(c.literal)})"
    if isinstance(c, Acyclic):
        return f"acyclic({format_label(c.edge_type)})"
    raise TypeError(f"not a constraint: {c!r}")


def _aggregate(a) -> str:
    d = a.definition
    if isinstance(d, Count):
        body = f"count({d.node_type})"
    elif isinstance(d, CountEdges):
        body = f"countEdges({format_label(d.edge_type)})"
    elif isinstance(d, Sum):
        body = f"sum({d.node_type}, {_path(d.path)})"
    else:
        raise TypeError(f"not an aggregate: {d!r}")
    return f"aggregate {a.name} = {body}"


def print_schema(schema: TypedGraphSchema) -> str:
    lines = [f"schema {schema.name} {{"]
    for label, d in schema.registry.user_types():
        lines.append(f"{INDENT}type {label} = {format_type(d)}")
    for nt in schema.node_types.values():
        lines.append(f"{INDENT}node {nt.label} : {nt.payload}")
    for et in schema.edge_types.values():
        prop = "" if et.prop == "empty" else f" prop {et.prop}"
        tail = ", ".join(f"{n}[{m}]" for n, m in et.tail)
        head = ", ".join(f"{n}[{m}]" for n, m in et.head)
        lines.append(f"{INDENT}edge {format_label(et.label)}{prop} tail ({tail}) head ({head})")
    for c in schema.constraints:
        lines.append(f"{INDENT}constraint {format_constraint(c)}")
    for g, members in schema.groups.items():
        lines.append(f"{INDENT}group {g} {{")
        lines.append(f"{INDENT * 2}{', '.join(members)}")
        for a in schema.aggregates:
            if a.group == g:
                lines.append(f"{INDENT * 2}{_aggregate(a)}")
        lines.append(f"{INDENT}}}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def format_value(v: Any) -> str:
    if isinstance(v, Mapping):
        return "{" + ", ".join(f"{k}: {format_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(format_value(x) for x in v) + "]"
    if isinstance(v, Tagged):
        return f"{v.tag}({format_value(v.value)})"
    return format_literal(v)


def node_symbol(graph: TypedGraph, node_id: int) -> str:
    name = graph.nodes[node_id].name
    return name if name is not None else f"_n{node_id}"


def print_instance(graph: TypedGraph, name: str = "g") -> str:
    """Canonical instance document: nodes then edges, in id order."""
    schema = graph.schema
    lines = [f"graph {name} uses {schema.name} {{"]
    for nid in sorted(graph.nodes):
        node = graph.nodes[nid]
        sym = format_label(node_symbol(graph, nid))
        lines.append(f"{INDENT}n {sym} : {node.type_label} = {format_value(node.value)}")
    for eid in sorted(graph.edges):
        edge = graph.edges[eid]
        et = schema.edge_types.get(edge.type_label)
        tail, head = dict(edge.tail), dict(edge.head)
        if et is not None:
            tail_ids = [tail[lbl] for lbl in et.tail_labels if lbl in tail]
            head_ids = [head[lbl] for lbl in et.head_labels if lbl in head]
        else:
            tail_ids, head_ids = list(tail.values()), list(head.values())
        ends = ", ".join(format_label(node_symbol(graph, n)) for n in tail_ids)
        if head_ids:
            ends += (" -> " if ends else "-> ") + ", ".join(format_label(node_symbol(graph, n)) for n in head_ids)
        value = "" if isinstance(edge.value, Mapping) and not edge.value else f" = {format_value(edge.value)}"
        lines.append(f"{INDENT}e : {format_label(edge.type_label)} ({ends}){value}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def print_violations(report: Report) -> str:
    """One line per issue, errors sorted by code then subject, warnings last."""
    errors = sorted(report.errors, key=lambda i: (i.code, i.subject, i.detail))
    warnings = sorted(report.warnings, key=lambda i: (i.code, i.subject, i.detail))
    lines = [f"{i.code} {i.subject}: {i.detail}" for i in errors]
    if not errors:
        lines.append("OK (0 violations)")
    lines.extend(f"warning: {i.code} {i.subject}: {i.detail}" for i in warnings)
    return "\n".join(lines) + "\n"
