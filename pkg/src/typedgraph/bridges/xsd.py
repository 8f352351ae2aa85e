"""XML Schema (a small subset) and XML documents to typed graphs.

Two layouts are offered.  ``compact`` stores the whole document as one node
whose payload is a nested record; element order and attributes survive in
the record structure.  ``expanded`` gives every element its own node and
links parents to children with containment edges, optionally numbered by
an ``ordinal`` property so sibling order can be recovered.

Supported: global or local ``xs:element`` declarations, ``xs:complexType``
with ``xs:sequence`` and ``xs:attribute``, ``xs:simpleContent`` extensions,
named or inline ``xs:simpleType`` restrictions with ``fractionDigits`` 2
(read as money) and at most one bound facet, and ``minOccurs``/``maxOccurs``.
Anything else raises :class:`UnsupportedXsdFeature`.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from collections.abc import Iterator
from dataclasses import dataclass, field
from datetime import date as _date
from decimal import Decimal, InvalidOperation
from typing import Any

from ..datatypes import EMPTY, KEYWORDS, PREBOUND, ConstrainedBase, ListType, RecordType, TypeRef
from ..errors import DocumentSchemaMismatch, UnsupportedXsdFeature
from ..report import Report
from ..schema import Multiplicity, TypedGraphSchema
from ..store import MutationBatch, Placeholder

XS = "{http://www.w3.org/2001/XMLSchema}"
COMPACT = "compact"
EXPANDED = "expanded"
STRATEGIES = (COMPACT, EXPANDED)
VALUE_FIELD = "value"
ORDINAL_TYPE = "Position"

BUILTINS = {
    "string": "string",
    "normalizedString": "string",
    "token": "string",
    "anyURI": "string",
    "ID": "string",
    "integer": "int",
    "int": "int",
    "long": "int",
    "short": "int",
    "byte": "int",
    "nonNegativeInteger": "int",
    "positiveInteger": "int",
    "unsignedInt": "int",
    "decimal": "decimal",
    "double": "decimal",
    "float": "decimal",
    "boolean": "bool",
    "date": "date",
}
_BOUND_FACETS = {"minInclusive": ">=", "maxInclusive": "<=", "minExclusive": ">", "maxExclusive": "<"}


@dataclass(frozen=True)
class XsdSimpleType:
    """A refined simple type: a base kind plus at most one bound."""

    name: str
    base: str
    op: str | None = None
    literal: Any = None


@dataclass(frozen=True)
class XsdAttribute:
    name: str
    kind: str  # base kind or simple-type name
    required: bool = False


@dataclass(frozen=True)
class XsdElement:
    name: str
    kind: str | None = None  # text type; None for element-only content
    attributes: tuple[XsdAttribute, ...] = ()
    children: tuple["XsdElement", ...] = ()
    min_occurs: int = 1
    max_occurs: int | None = 1

    @property
    def simple(self) -> bool:
        """Text only: no attributes and no child elements."""
        return self.kind is not None and not self.attributes and not self.children

    @property
    def occurs(self) -> Multiplicity:
        return Multiplicity(self.min_occurs, self.max_occurs)


@dataclass
class XsdSubset:
    root: XsdElement
    simple_types: dict[str, XsdSimpleType] = field(default_factory=dict)

    def elements(self) -> Iterator[tuple[tuple[int, ...], XsdElement]]:
        """Every declaration with its position path, depth first."""

        def walk(pos, e):
            yield pos, e
            for i, c in enumerate(e.children):
                yield from walk(pos + (i,), c)

        return walk((), self.root)


# -- reading the schema ----------------------------------------------------------------


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _occurs(node: ET.Element, attr: str, default: int) -> int | None:
    raw = node.get(attr)
    if raw is None:
        return default
    if raw == "unbounded":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise UnsupportedXsdFeature(f"{attr}={raw!r}") from None
    if value < 0:
        raise UnsupportedXsdFeature(f"{attr}={raw!r}")
    return value


def _mul(a: int | None, b: int | None) -> int | None:
    if a == 0 or b == 0:
        return 0
    if a is None or b is None:
        return None
    return a * b


class _XsdReader:
    def __init__(self, root: ET.Element):
        if root.tag != XS + "schema":
            raise UnsupportedXsdFeature(f"expected xs:schema, found {_local(root.tag)!r}")
        self.schema_node = root
        self.simple_types: dict[str, XsdSimpleType] = {}
        self.complex_types: dict[str, ET.Element] = {}
        self.elements: list[ET.Element] = []
        self.expanding: list[str] = []
        self.anonymous = 0
        for child in root:
            tag = _local(child.tag)
            if child.tag == XS + "simpleType":
                self._simple_type(child, child.get("name"))
            elif child.tag == XS + "complexType":
                self.complex_types[self._name(child)] = child
            elif child.tag == XS + "element":
                self.elements.append(child)
            elif child.tag == XS + "annotation":
                continue
            else:
                raise UnsupportedXsdFeature(f"top-level xs:{tag}")

    def _name(self, node: ET.Element) -> str:
        name = node.get("name")
        if not name:
            raise UnsupportedXsdFeature(f"xs:{_local(node.tag)} without a name")
        return name

    def _type_ref(self, ref: str) -> str | ET.Element:
        prefix, _, local = ref.rpartition(":")
        if prefix in ("xs", "xsd"):
            if local in BUILTINS:
                return BUILTINS[local]
            raise UnsupportedXsdFeature(f"built-in type {ref!r}")
        if local in self.simple_types:
            return local
        if local in self.complex_types:
            return self.complex_types[local]
        if not prefix and local in BUILTINS:
            return BUILTINS[local]
        raise UnsupportedXsdFeature(f"unknown type {ref!r}")

    def _simple_type(self, node: ET.Element, name: str | None) -> str:
        if name is None:
            self.anonymous += 1
            name = f"simple{self.anonymous}"
        restriction = None
        for child in node:
            if child.tag == XS + "restriction":
                restriction = child
            elif child.tag != XS + "annotation":
                raise UnsupportedXsdFeature(f"xs:{_local(child.tag)} in a simple type")
        if restriction is None:
            raise UnsupportedXsdFeature("simple type without xs:restriction")
        base = self._type_ref(restriction.get("base", ""))
        if not isinstance(base, str):
            raise UnsupportedXsdFeature("simple type derived from a complex type")
        if base in self.simple_types:
            parent = self.simple_types[base]
            if parent.op is not None:
                raise UnsupportedXsdFeature(f"restriction of the bounded type {base!r}")
            base = parent.base
        op = literal = None
        for facet in restriction:
            tag = _local(facet.tag)
            value = facet.get("value", "")
            if tag == "annotation":
                continue
            if tag == "fractionDigits" and value == "2" and base in ("decimal", "money"):
                base = "money"
            elif tag in _BOUND_FACETS and base in ("int", "decimal", "money"):
                if op is not None:
                    raise UnsupportedXsdFeature(f"simple type {name!r} has more than one bound")
                op = _BOUND_FACETS[tag]
                literal = value
            else:
                raise UnsupportedXsdFeature(f"facet xs:{tag} on {name!r}")
        if literal is not None:
            try:
                literal = int(literal) if base == "int" else Decimal(literal)
            except (ValueError, InvalidOperation):
                raise UnsupportedXsdFeature(f"bound {literal!r} on {name!r}") from None
        self.simple_types[name] = XsdSimpleType(name, base, op, literal)
        return name

    def root(self) -> XsdElement:
        if len(self.elements) != 1:
            raise UnsupportedXsdFeature(f"expected one global element, found {len(self.elements)}")
        return self.element(self.elements[0], 1, 1)

    def element(self, node: ET.Element, lo: int, hi: int | None) -> XsdElement:
        if node.get("ref") is not None:
            raise UnsupportedXsdFeature("element references (ref=)")
        if node.get("substitutionGroup") is not None or node.get("abstract") is not None:
            raise UnsupportedXsdFeature("substitution groups")
        name = self._name(node)
        body = [c for c in node if c.tag != XS + "annotation"]
        type_attr = node.get("type")
        if type_attr is not None:
            if body:
                raise UnsupportedXsdFeature(f"element {name!r} has both a type and an inline definition")
            target = self._type_ref(type_attr)
            if isinstance(target, str):
                return XsdElement(name, target, min_occurs=lo, max_occurs=hi)
            type_name = target.get("name")
            if type_name in self.expanding:
                raise UnsupportedXsdFeature(f"recursive type {type_name!r}")
            self.expanding.append(type_name)
            try:
                return self._complex(name, target, lo, hi)
            finally:
                self.expanding.pop()
        if not body:
            return XsdElement(name, "string", min_occurs=lo, max_occurs=hi)
        if len(body) != 1:
            raise UnsupportedXsdFeature(f"element {name!r} has more than one type definition")
        inner = body[0]
        if inner.tag == XS + "simpleType":
            return XsdElement(name, self._simple_type(inner, None), min_occurs=lo, max_occurs=hi)
        if inner.tag == XS + "complexType":
            return self._complex(name, inner, lo, hi)
        raise UnsupportedXsdFeature(f"xs:{_local(inner.tag)} inside element {name!r}")

    def _attribute(self, node: ET.Element) -> XsdAttribute:
        name = self._name(node)
        use = node.get("use", "optional")
        if use not in ("optional", "required"):
            raise UnsupportedXsdFeature(f"attribute use={use!r}")
        inline = [c for c in node if c.tag == XS + "simpleType"]
        if inline:
            kind = self._simple_type(inline[0], None)
        else:
            kind = self._type_ref(node.get("type", "xs:string"))
            if not isinstance(kind, str):
                raise UnsupportedXsdFeature(f"attribute {name!r} with a complex type")
        return XsdAttribute(name, kind, use == "required")

    def _complex(self, name: str, node: ET.Element, lo: int, hi: int | None) -> XsdElement:
        if node.get("mixed") == "true":
            raise UnsupportedXsdFeature("mixed content")
        kind = None
        attributes: list[XsdAttribute] = []
        children: list[XsdElement] = []
        for part in node:
            if part.tag == XS + "sequence":
                if children:
                    raise UnsupportedXsdFeature(f"more than one sequence in {name!r}")
                children = self._sequence(part, 1, 1)
            elif part.tag == XS + "attribute":
                attributes.append(self._attribute(part))
            elif part.tag == XS + "simpleContent":
                ext = [c for c in part if c.tag != XS + "annotation"]
                if len(ext) != 1 or ext[0].tag != XS + "extension":
                    raise UnsupportedXsdFeature("simple content other than xs:extension")
                base = self._type_ref(ext[0].get("base", ""))
                if not isinstance(base, str):
                    raise UnsupportedXsdFeature("simple content over a complex type")
                kind = base
                for a in ext[0]:
                    if a.tag == XS + "attribute":
                        attributes.append(self._attribute(a))
                    elif a.tag != XS + "annotation":
                        raise UnsupportedXsdFeature(f"xs:{_local(a.tag)} in a simple content extension")
            elif part.tag == XS + "annotation":
                continue
            else:
                raise UnsupportedXsdFeature(f"xs:{_local(part.tag)}")
        if kind is not None and children:
            raise UnsupportedXsdFeature(f"element {name!r} mixes simple content and child elements")
        names = [a.name for a in attributes]
        if len(set(names)) != len(names):
            raise UnsupportedXsdFeature(f"repeated attribute in {name!r}")
        return XsdElement(name, kind, tuple(attributes), tuple(children), lo, hi)

    def _sequence(self, node: ET.Element, lo: int, hi: int | None) -> list[XsdElement]:
        s_lo = _mul(lo, _occurs(node, "minOccurs", 1))
        s_hi = _mul(hi, _occurs(node, "maxOccurs", 1))
        particles = [c for c in node if c.tag != XS + "annotation"]
        if (s_lo, s_hi) != (1, 1) and len(particles) != 1:
            raise UnsupportedXsdFeature("a repeated or optional sequence must hold exactly one particle")
        out: list[XsdElement] = []
        for p in particles:
            if p.tag == XS + "element":
                e_lo = _mul(s_lo, _occurs(p, "minOccurs", 1))
                e_hi = _mul(s_hi, _occurs(p, "maxOccurs", 1))
                out.append(self.element(p, e_lo, e_hi))
            elif p.tag == XS + "sequence":
                out.extend(self._sequence(p, s_lo, s_hi))
            else:
                raise UnsupportedXsdFeature(f"xs:{_local(p.tag)}")
        seen = [e.name for e in out]
        if len(set(seen)) != len(seen):
            raise UnsupportedXsdFeature("the same child element name appears twice in one sequence")
        return out


def parse_xsd(text: str | bytes) -> XsdSubset:
    """Read an XML Schema document restricted to the supported subset."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise UnsupportedXsdFeature(f"not well-formed XML: {exc}") from None
    reader = _XsdReader(root)
    element = reader.root()
    return XsdSubset(element, reader.simple_types)


# -- label layout ----------------------------------------------------------------------


def _ident(name: str) -> str:
    text = re.sub(r"[^A-Za-z0-9_]", "_", name)
    if not text[:1].isalpha():
        text = "x" + text
    return text


class _Namer:
    def __init__(self, taken=()):
        self.taken = set(PREBOUND) | set(KEYWORDS) | set(taken)

    def __call__(self, base: str) -> str:
        label, n = base, 2
        while label in self.taken:
            label = f"{base}_{n}"
            n += 1
        self.taken.add(label)
        return label


def _field_names(e: XsdElement) -> dict[str, str]:
    """Record field name per attribute (``@name``), text (``#text``) and child."""
    fields: dict[str, str] = {}
    for a in e.attributes:
        fields["@" + a.name] = _ident(a.name)
    if e.kind is not None and not e.simple:
        fields["#text"] = VALUE_FIELD
    for c in e.children:
        fields[c.name] = _ident(c.name)
    names = list(fields.values())
    if len(set(names)) != len(names):
        raise UnsupportedXsdFeature(f"field names of {e.name!r} clash after renaming")
    return fields


@dataclass
class _Layout:
    strategy: str
    ordinals: bool
    schema: TypedGraphSchema
    simple: dict[str, str] = field(default_factory=dict)  # simple-type name -> type label
    type_of: dict[tuple[int, ...], str] = field(default_factory=dict)  # value type per declaration
    node_of: dict[tuple[int, ...], str] = field(default_factory=dict)  # expanded node type
    edge_of: dict[tuple[int, ...], str] = field(default_factory=dict)  # expanded edge into a child


def _layout(xsd: XsdSubset, strategy: str, ordinals: bool = True) -> _Layout:
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
    root_id = _ident(xsd.root.name)
    schema = TypedGraphSchema(f"{root_id}_{strategy}")
    names = _Namer()
    simple: dict[str, str] = {}
    for st in xsd.simple_types.values():
        label = names(_ident(st.name))
        simple[st.name] = label
        if st.op is None:
            schema.define_type(label, TypeRef(st.base))
        else:
            schema.define_type(label, ConstrainedBase(st.base, st.op, st.literal))
    lists: dict[tuple[str, int, int | None], str] = {}

    def kind_label(kind: str) -> str:
        return simple.get(kind, kind)

    def many(label: str, lo: int, hi: int | None) -> str:
        key = (label, lo, hi)
        if key not in lists:
            suffix = "opt" if (lo, hi) == (0, 1) else "list"
            lists[key] = names(f"{label}_{suffix}")
            schema.define_type(lists[key], ListType(label, lo, hi))
        return lists[key]

    def slot(label: str, lo: int, hi: int | None) -> str:
        return label if (lo, hi) == (1, 1) else many(label, lo, hi)

    layout = _Layout(strategy, ordinals, schema, simple)

    def value_type(pos, e: XsdElement, with_children: bool) -> str:
        if e.simple:
            return kind_label(e.kind)
        fields = _field_names(e)
        entries = []
        for a in e.attributes:
            kl = kind_label(a.kind)
            entries.append((fields["@" + a.name], kl if a.required else many(kl, 0, 1)))
        if "#text" in fields:
            entries.append((VALUE_FIELD, kind_label(e.kind)))
        if with_children:
            for i, c in enumerate(e.children):
                ct = value_type(pos + (i,), c, True)
                entries.append((fields[c.name], slot(ct, c.min_occurs, c.max_occurs)))
        if not entries:
            return EMPTY
        label = names(f"{_ident(e.name)}Type")
        schema.define_type(label, RecordType(entries))
        layout.type_of[pos] = label
        return label

    if strategy == COMPACT:
        payload = value_type((), xsd.root, True)
        layout.type_of[()] = payload
        layout.node_of[()] = root_id
        schema.add_node_type(root_id, payload)
        return layout

    node_names = _Namer()
    for pos, e in xsd.elements():
        if e.simple:
            payload = names(f"{_ident(e.name)}Type")
            schema.define_type(payload, RecordType([(VALUE_FIELD, kind_label(e.kind))]))
        else:
            payload = value_type(pos, e, False)
        layout.type_of[pos] = payload
        layout.node_of[pos] = node_names(_ident(e.name))
        schema.add_node_type(layout.node_of[pos], payload)
    prop = EMPTY
    if ordinals:
        prop = names(ORDINAL_TYPE)
        schema.define_type(prop, RecordType([("ordinal", "int")]))
    edge_names = _Namer(layout.node_of.values())
    for pos, e in xsd.elements():
        for i, c in enumerate(e.children):
            parent, child = layout.node_of[pos], layout.node_of[pos + (i,)]
            label = edge_names(f"{parent}_{child}")
            layout.edge_of[pos + (i,)] = label
            schema.add_edge_type(
                label,
                multiplicity={("tail", parent): c.occurs, ("head", child): Multiplicity(1, 1)},
                tail=[parent],
                head=[child],
                prop=prop,
            )
    return layout


def import_xsd(xsd: XsdSubset, strategy: str = COMPACT, ordinals: bool = True) -> TypedGraphSchema:
    """Typed graph schema for ``xsd`` under the chosen layout.

    ``ordinals=False`` drops the sibling position from expanded containment
    edges, which leaves sibling order unrecoverable.
    """
    return _layout(xsd, strategy, ordinals).schema


# -- reading documents -----------------------------------------------------------------


@dataclass
class _Parsed:
    pos: tuple[int, ...]
    decl: XsdElement
    path: str
    attributes: dict[str, Any]
    text: Any
    children: list["_Parsed"]


def _convert(kind: str, text: str) -> Any:
    if kind == "string":
        return text
    raw = text.strip()
    if kind == "int":
        return int(raw)
    if kind in ("decimal", "money"):
        value = Decimal(raw)
        if not value.is_finite():
            raise ValueError(raw)
        return value
    if kind == "bool":
        if raw in ("true", "1"):
            return True
        if raw in ("false", "0"):
            return False
        raise ValueError(raw)
    if kind == "date":
        d = _date.fromisoformat(raw)
        return {"day": d.day, "month": d.month, "year": d.year}
    raise ValueError(kind)


class _DocReader:
    def __init__(self, xsd: XsdSubset, schema: TypedGraphSchema, simple: dict[str, str]):
        self.xsd = xsd
        self.reg = schema.registry
        self.simple = simple
        self.report = Report()

    def value(self, kind: str, text: str, path: str) -> Any:
        base = self.xsd.simple_types[kind].base if kind in self.xsd.simple_types else kind
        try:
            value = _convert(base, text)
        except (ValueError, InvalidOperation):
            self.report.add("DocumentSchemaMismatch", path, f"{text!r} is not a valid {kind}")
            return None
        label = self.simple.get(kind, kind)
        for issue in self.reg.check_value(label, value, path):
            self.report.add("DocumentSchemaMismatch", path, issue.detail)
        return value

    def read(self, node: ET.Element, decl: XsdElement, pos, path: str) -> _Parsed:
        attrs: dict[str, Any] = {}
        declared = {a.name: a for a in decl.attributes}
        for key, raw in node.attrib.items():
            if key.startswith("{"):
                continue  # namespaced attributes such as xsi:noNamespaceSchemaLocation
            if key not in declared:
                self.report.add("DocumentSchemaMismatch", f"{path}/@{key}", "attribute not declared")
                continue
            attrs[key] = self.value(declared[key].kind, raw, f"{path}/@{key}")
        for a in decl.attributes:
            if a.required and a.name not in node.attrib:
                self.report.add("DocumentSchemaMismatch", f"{path}/@{a.name}", "required attribute missing")
        text = None
        body = node.text or ""
        if decl.kind is not None:
            text = self.value(decl.kind, body, path)
        elif body.strip():
            self.report.add("DocumentSchemaMismatch", path, "text inside element-only content")
        children: list[_Parsed] = []
        elems = list(node)
        for e in elems:
            if (e.tail or "").strip():
                self.report.add("DocumentSchemaMismatch", path, "text inside element-only content")
                break
        if decl.kind is not None and elems:
            self.report.add("DocumentSchemaMismatch", path, "child elements inside a text-only element")
            return _Parsed(pos, decl, path, attrs, text, children)
        i = 0
        seen: dict[str, int] = {}
        for k, c in enumerate(decl.children):
            count = 0
            while i < len(elems) and _local(elems[i].tag) == c.name and (c.max_occurs is None or count < c.max_occurs):
                seen[c.name] = seen.get(c.name, 0) + 1
                child_path = f"{path}/{c.name}[{seen[c.name]}]"
                children.append(self.read(elems[i], c, pos + (k,), child_path))
                count += 1
                i += 1
            if count < c.min_occurs:
                self.report.add(
                    "DocumentSchemaMismatch",
                    f"{path}/{c.name}",
                    f"found {count} element(s), at least {c.min_occurs} required",
                )
        for extra in elems[i:]:
            self.report.add("DocumentSchemaMismatch", f"{path}/{_local(extra.tag)}", "unexpected element")
        return _Parsed(pos, decl, path, attrs, text, children)


def _payload(p: _Parsed, with_children: bool) -> Any:
    e = p.decl
    if e.simple:
        return p.text
    fields = _field_names(e)
    out: dict[str, Any] = {}
    for a in e.attributes:
        v = p.attributes.get(a.name)
        out[fields["@" + a.name]] = v if a.required else ([] if v is None else [v])
    if "#text" in fields:
        out[VALUE_FIELD] = p.text
    if with_children:
        for c in e.children:
            items = [_payload(q, True) for q in p.children if q.decl is c]
            single = (c.min_occurs, c.max_occurs) == (1, 1)
            out[fields[c.name]] = items[0] if single else items
    return out


def _document_root(doc) -> ET.Element:
    if isinstance(doc, ET.ElementTree):
        return doc.getroot()
    if isinstance(doc, ET.Element):
        return doc
    try:
        return ET.fromstring(doc)
    except ET.ParseError as exc:
        report = Report()
        report.add("DocumentSchemaMismatch", "/", f"not well-formed XML: {exc}")
        raise DocumentSchemaMismatch(report) from None


def import_xml_document(doc, xsd: XsdSubset, strategy: str = COMPACT, ordinals: bool = True) -> MutationBatch:
    """Batch reproducing ``doc`` in the graph layout of ``import_xsd(xsd, strategy, ordinals)``.

    ``doc`` may be XML text, an element or an element tree.  Every mismatch
    against the declarations is collected into one :class:`DocumentSchemaMismatch`.
    """
    layout = _layout(xsd, strategy, ordinals)
    root = _document_root(doc)
    reader = _DocReader(xsd, layout.schema, layout.simple)
    root_path = f"/{xsd.root.name}"
    if _local(root.tag) != xsd.root.name:
        reader.report.add("DocumentSchemaMismatch", f"/{_local(root.tag)}", f"expected root element {xsd.root.name!r}")
        raise DocumentSchemaMismatch(reader.report)
    parsed = reader.read(root, xsd.root, (), root_path)
    if not reader.report.ok:
        raise DocumentSchemaMismatch(reader.report)

    batch = MutationBatch()
    if strategy == COMPACT:
        batch.insert_node(layout.node_of[()], _payload(parsed, True), name=layout.node_of[()])
        return batch

    counters: dict[str, int] = {}

    def add(p: _Parsed) -> Placeholder:
        label = layout.node_of[p.pos]
        counters[label] = counters.get(label, 0) + 1
        value = {VALUE_FIELD: p.text} if p.decl.simple else _payload(p, False)
        ref = batch.insert_node(label, value, name=f"{label}_{counters[label]}")
        for ordinal, child in enumerate(p.children, start=1):
            child_ref = add(child)
            prop = {"ordinal": ordinal} if ordinals else {}
            batch.insert_edge(layout.edge_of[child.pos], [ref], [child_ref], prop)
        return ref

    add(parsed)
    return batch


# -- (path, value) extraction ----------------------------------------------------------


def _walk_value(e: XsdElement, value: Any, path: str, out: list) -> None:
    if e.simple:
        out.append((path, value))
        return
    fields = _field_names(e)
    for a in e.attributes:
        v = value[fields["@" + a.name]]
        for item in ([v] if a.required else v):
            out.append((f"{path}/@{a.name}", item))
    if "#text" in fields:
        out.append((path, value[VALUE_FIELD]))
    for c in e.children:
        v = value[fields[c.name]]
        items = [v] if (c.min_occurs, c.max_occurs) == (1, 1) else v
        for item in items:
            _walk_value(c, item, f"{path}/{c.name}", out)


def compact_pairs(graph, xsd: XsdSubset) -> list[tuple[str, Any]]:
    """``(element path, simple value)`` pairs from compact-layout nodes, in document order.

    Attribute paths end in ``/@name``; paths carry no sibling indices.
    """
    label = _ident(xsd.root.name)
    out: list[tuple[str, Any]] = []
    for node in graph.nodes_of_type(label):
        _walk_value(xsd.root, node.value, f"/{xsd.root.name}", out)
    return out


def expanded_pairs(graph, xsd: XsdSubset, ordinals: bool = True) -> list[tuple[str, Any]]:
    """The same pairs read from an expanded-layout graph.

    Children are visited by ``ordinal`` when present, else in edge insertion order.
    """
    layout = _layout(xsd, EXPANDED, ordinals)
    decl_of = {layout.node_of[pos]: e for pos, e in xsd.elements()}
    containment = set(layout.edge_of.values())
    out: list[tuple[str, Any]] = []

    def visit(nid, path: str) -> None:
        node = graph.nodes[nid]
        e = decl_of[node.type_label]
        if e.simple:
            out.append((path, node.value[VALUE_FIELD]))
        else:
            _walk_value(_without_children(e), node.value, path, out)
        below = [
            edge
            for edge in graph.incident_edges(nid)
            if edge.type_label in containment and nid in dict(edge.tail).values()
        ]
        below.sort(key=lambda edge: (edge.value.get("ordinal", 0) if isinstance(edge.value, dict) else 0, edge.id))
        for edge in below:
            (child,) = dict(edge.head).values()
            visit(child, f"{path}/{decl_of[graph.nodes[child].type_label].name}")

    root_label = layout.node_of[()]
    for node in graph.nodes_of_type(root_label):
        visit(node.id, f"/{xsd.root.name}")
    return out


def _without_children(e: XsdElement) -> XsdElement:
    return XsdElement(e.name, e.kind, e.attributes, (), e.min_occurs, e.max_occurs)
