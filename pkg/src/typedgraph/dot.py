"""Graphviz DOT output in a UML-like style.

Node types are record shapes with a name compartment and an attribute
compartment.  A binary edge type without properties is drawn as one labelled
arrow with ``min..max`` at each end.  Other edge types get a small hub node,
and a property type hangs off the hub as a dashed satellite, the way an
association class hangs off its association.
"""

from __future__ import annotations

from .datatypes import EMPTY, RecordType
from .schema import EdgeType, TypedGraphSchema
from .store import TypedGraph
from .text.printer import format_value, node_symbol


def _q(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _qr(label: str) -> str:
    """Quote a record label whose backslashes are already record escapes."""
    return '"' + label.replace('"', '\\"') + '"'


def _rec(text: str) -> str:
    """Escape text for use inside a record label."""
    out = []
    for ch in text:
        if ch in "{}|<>\\":
            out.append("\\" + ch)
        elif ch == "\n":
            out.append("\\n")
        else:
            out.append(ch)
    return "".join(out)


def _fields(schema: TypedGraphSchema, label: str) -> list[str]:
    d = schema.registry.get(label)
    if isinstance(d, RecordType):
        return [f"{n} : {t}" for n, t in d.fields]
    if label == EMPTY:
        return []
    return [f"value : {label}"]


def _record(title: str, rows: list[str]) -> str:
    body = "".join(_rec(r) + "\\l" for r in rows)
    return "{" + _rec(title) + "|" + body + "}"


def _simple(et: EdgeType) -> bool:
    return et.prop == EMPTY and len(et.tail) == 1 and len(et.head) == 1


def schema_to_dot(schema: TypedGraphSchema) -> str:
    lines = [
        f"digraph {_q(schema.name)} {{",
        "  rankdir=LR;",
        '  node [shape=record, fontname="Helvetica"];',
        '  edge [fontname="Helvetica", fontsize=10];',
    ]
    for nt in schema.node_types.values():
        label = _record(nt.label, _fields(schema, nt.payload))
        lines.append(f"  {_q('n:' + nt.label)} [label={_qr(label)}];")
    for et in schema.edge_types.values():
        name = et.label
        if _simple(et):
            (t, tm), (h, hm) = et.tail[0], et.head[0]
            lines.append(
                f"  {_q('n:' + t)} -> {_q('n:' + h)} "
                f"[label={_q(name)}, taillabel={_q(str(tm))}, headlabel={_q(str(hm))}];"
            )
            continue
        hub = "e:" + et.label
        lines.append(f"  {_q(hub)} [shape=diamond, style=filled, fillcolor=white, label={_q(name)}];")
        for n, m in et.tail:
            lines.append(f"  {_q('n:' + n)} -> {_q(hub)} [arrowhead=none, taillabel={_q(str(m))}];")
        for n, m in et.head:
            lines.append(f"  {_q(hub)} -> {_q('n:' + n)} [headlabel={_q(str(m))}];")
        if et.prop != EMPTY:
            sat = "p:" + et.label
            rows = _fields(schema, et.prop)
            lines.append(f"  {_q(sat)} [style=dashed, label={_qr(_record(et.prop, rows))}];")
            lines.append(f"  {_q(hub)} -> {_q(sat)} [style=dashed, arrowhead=none];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _value_rows(value) -> list[str]:
    if isinstance(value, dict):
        return [f"{k} = {format_value(v)}" for k, v in value.items()]
    return [format_value(value)]


def instance_to_dot(graph: TypedGraph, name: str = "g") -> str:
    schema = graph.schema
    lines = [
        f"digraph {_q(name)} {{",
        "  rankdir=LR;",
        '  node [shape=record, fontname="Helvetica"];',
        '  edge [fontname="Helvetica", fontsize=10];',
    ]
    for nid in sorted(graph.nodes):
        node = graph.nodes[nid]
        title = f"{node_symbol(graph, nid)} : {node.type_label}"
        lines.append(f"  {_q(f'n{nid}')} [label={_qr(_record(title, _value_rows(node.value)))}];")
    for eid in sorted(graph.edges):
        edge = graph.edges[eid]
        et = schema.edge_types[edge.type_label]
        label = edge.type_label
        tail, head = dict(edge.tail), dict(edge.head)
        has_value = not (isinstance(edge.value, dict) and not edge.value)
        if len(tail) == 1 and len(head) == 1 and not has_value:
            (t,), (h,) = tail.values(), head.values()
            lines.append(f"  {_q(f'n{t}')} -> {_q(f'n{h}')} [label={_q(label)}];")
            continue
        hub = f"e{eid}"
        lines.append(f"  {_q(hub)} [shape=diamond, style=filled, fillcolor=white, label={_q(label)}];")
        for lbl in et.tail_labels:
            if lbl in tail:
                lines.append(f"  {_q(f'n{tail[lbl]}')} -> {_q(hub)} [arrowhead=none];")
        for lbl in et.head_labels:
            if lbl in head:
                lines.append(f"  {_q(hub)} -> {_q(f'n{head[lbl]}')};")
        if has_value:
            sat = f"p{eid}"
            lines.append(f"  {_q(sat)} [style=dashed, label={_qr(_record(et.prop, _value_rows(edge.value)))}];")
            lines.append(f"  {_q(hub)} -> {_q(sat)} [style=dashed, arrowhead=none];")
    lines.append("}")
    return "\n".join(lines) + "\n"
