"""Relational tables to typed graphs.

Ordinary tables become node types whose payload keeps the non-key-reference
columns.  Every foreign key becomes a binary edge type from the referencing
table to the referenced one, and a join table becomes one hyper-edge type
over all the tables it references, carrying its remaining columns.

Manifest syntax (``.rman``)::

    manifest := table*
    table    := "table" IDENT "{" entry* "}"
    entry    := "col" IDENT ":" coltype ["nullable"] ";"
              | "pk" "(" IDENT ("," IDENT)* ")" ";"
              | "fk" "(" IDENT ("," IDENT)* ")" "->" IDENT ";"
              | "jointable" ";"
    coltype  := "int" | "string" | "bool" | "decimal" | "money" | "date"
              | "list" "<" coltype ">"
"""

from __future__ import annotations

import csv
import json
import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from datetime import date as _date
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Any

from ..datatypes import BASE_KINDS, EMPTY, ListType, RecordType, base_conforms, is_identifier
from ..errors import DataImportError, ManifestInvalid, ParseError
from ..report import Report
from ..schema import Multiplicity, TypedGraphSchema
from ..store import MutationBatch, Placeholder
from ..text.lexer import EOF, SyntaxProblem, TokenStream

COLUMN_KINDS = BASE_KINDS + ("date",)


@dataclass(frozen=True)
class Column:
    name: str
    kind: str  # a base kind, "date", or "list<...>"
    nullable: bool = False

    @property
    def element(self) -> str | None:
        """Element kind of an array column, ``None`` for scalars."""
        m = re.fullmatch(r"list<(.+)>", self.kind)
        return m.group(1) if m else None


@dataclass(frozen=True)
class ForeignKey:
    columns: tuple[str, ...]
    table: str


@dataclass
class Table:
    name: str
    columns: list[Column] = field(default_factory=list)
    primary_key: tuple[str, ...] = ()
    foreign_keys: list[ForeignKey] = field(default_factory=list)
    join_table: bool = False

    def column(self, name: str) -> Column | None:
        return next((c for c in self.columns if c.name == name), None)

    @property
    def fk_columns(self) -> set[str]:
        return {c for fk in self.foreign_keys for c in fk.columns}

    @property
    def payload_columns(self) -> list[Column]:
        fk = self.fk_columns
        return [c for c in self.columns if c.name not in fk]


@dataclass
class RelationalManifest:
    tables: list[Table] = field(default_factory=list)

    def table(self, name: str) -> Table:
        for t in self.tables:
            if t.name == name:
                return t
        raise ManifestInvalid(f"no table {name!r}")

    def validate(self) -> None:
        """Raise :class:`ManifestInvalid` listing every broken rule."""
        problems: list[str] = []
        names = [t.name for t in self.tables]
        for n in sorted({n for n in names if names.count(n) > 1}):
            problems.append(f"table {n!r} declared twice")
        known = set(names)
        for t in self.tables:
            if not is_identifier(t.name):
                problems.append(f"table name {t.name!r} must start with a letter")
            cols = [c.name for c in t.columns]
            for n in sorted({n for n in cols if cols.count(n) > 1}):
                problems.append(f"{t.name}: column {n!r} declared twice")
            if not t.primary_key:
                problems.append(f"{t.name}: missing primary key")
            for c in t.primary_key:
                col = t.column(c)
                if col is None:
                    problems.append(f"{t.name}: primary key column {c!r} is not declared")
                elif col.nullable:
                    problems.append(f"{t.name}: primary key column {c!r} is nullable")
            for fk in t.foreign_keys:
                for c in fk.columns:
                    if t.column(c) is None:
                        problems.append(f"{t.name}: foreign key column {c!r} is not declared")
                if fk.table not in known:
                    problems.append(f"{t.name}: foreign key references unknown table {fk.table!r}")
                    continue
                target = self.table(fk.table)
                if target.join_table:
                    problems.append(f"{t.name}: foreign key references join table {fk.table!r}")
                elif [_kind(t, c) for c in fk.columns] != [_kind(target, c) for c in target.primary_key]:
                    problems.append(
                        f"{t.name}: foreign key ({', '.join(fk.columns)}) does not match "
                        f"the primary key of {fk.table!r}"
                    )
            if t.join_table:
                if len(t.foreign_keys) < 2:
                    problems.append(f"{t.name}: a join table needs at least two foreign keys")
                if set(t.primary_key) != t.fk_columns:
                    problems.append(f"{t.name}: join table key must be exactly its foreign key columns")
                targets = [fk.table for fk in t.foreign_keys]
                for n in sorted({n for n in targets if targets.count(n) > 2}):
                    problems.append(f"{t.name}: references {n!r} more than twice")
        if problems:
            raise ManifestInvalid("; ".join(problems))


def _kind(table: Table, column: str) -> str | None:
    col = table.column(column)
    return None if col is None else col.kind


# -- manifest reader -------------------------------------------------------------------


def _coltype(ts: TokenStream) -> str:
    tok = ts.current
    kind = ts.ident("column type")
    if kind == "list":
        ts.expect("<")
        inner = _coltype(ts)
        ts.expect(">")
        if inner.startswith("list<"):
            ts.fail("nested array columns are not supported", tok=tok)
        return f"list<{inner}>"
    if kind not in COLUMN_KINDS:
        ts.fail(f"unknown column type {kind!r}", " | ".join(COLUMN_KINDS + ("list",)), tok=tok)
    return kind


def _names(ts: TokenStream) -> tuple[str, ...]:
    ts.expect("(")
    names = [ts.ident("column name")]
    while ts.accept(","):
        names.append(ts.ident("column name"))
    ts.expect(")")
    return tuple(names)


def parse_manifest(text: str) -> RelationalManifest:
    """Read a ``.rman`` document.  Syntax errors raise :class:`ParseError`."""
    try:
        ts = TokenStream(text)
        manifest = RelationalManifest()
        while ts.current.kind != EOF:
            ts.expect("table")
            table = Table(ts.ident("table name"))
            ts.expect("{")
            while not ts.accept("}"):
                if ts.accept("col"):
                    name = ts.ident("column name")
                    ts.expect(":")
                    kind = _coltype(ts)
                    nullable = ts.accept("nullable") is not None
                    table.columns.append(Column(name, kind, nullable))
                elif ts.accept("pk"):
                    table.primary_key = _names(ts)
                elif ts.accept("fk"):
                    cols = _names(ts)
                    ts.expect("->")
                    table.foreign_keys.append(ForeignKey(cols, ts.ident("table name")))
                elif ts.accept("jointable"):
                    table.join_table = True
                else:
                    ts.fail(f"unexpected {ts.current.describe()}", "'col', 'pk', 'fk', 'jointable' or '}'")
                ts.expect(";")
            manifest.tables.append(table)
        return manifest
    except SyntaxProblem as exc:
        raise ParseError([exc.diagnostic]) from None


# -- schema mapping --------------------------------------------------------------------


def _field_type(schema: TypedGraphSchema, col: Column) -> str:
    """Type label for a column, defining helper list types on demand."""
    element = col.element
    if element is not None:
        label = f"{element}_array"
        if label not in schema.registry:
            schema.define_type(label, ListType(element, 0, None))
        return label
    if col.nullable:
        label = f"{col.kind}_opt"
        if label not in schema.registry:
            schema.define_type(label, ListType(col.kind, 0, 1))
        return label
    return col.kind


def _payload(schema: TypedGraphSchema, table: Table) -> str:
    cols = table.payload_columns
    if not cols:
        return EMPTY
    label = f"{table.name}Row"
    schema.define_type(label, RecordType([(c.name, _field_type(schema, c)) for c in cols]))
    return label


def fk_edge_label(table: Table, fk: ForeignKey) -> str:
    """``Local_Target``, or ``Local_Target_col1_col2`` when the pair repeats."""
    same = [f for f in table.foreign_keys if f.table == fk.table]
    base = f"{table.name}_{fk.table}"
    return base if len(same) == 1 else f"{base}_{'_'.join(fk.columns)}"


def join_slots(table: Table) -> list[tuple[str, str, ForeignKey]]:
    """``(end, referenced table, fk)`` per join-table key; repeats go to the head."""
    seen: set[str] = set()
    slots = []
    for fk in table.foreign_keys:
        end = "head" if fk.table in seen else "tail"
        seen.add(fk.table)
        slots.append((end, fk.table, fk))
    return slots


def import_relational_schema(manifest: RelationalManifest, name: str = "relational") -> TypedGraphSchema:
    manifest.validate()
    schema = TypedGraphSchema(name)
    for t in manifest.tables:
        if not t.join_table:
            schema.add_node_type(t.name, _payload(schema, t))
    for t in manifest.tables:
        if t.join_table:
            continue
        for fk in t.foreign_keys:
            optional = any(t.column(c).nullable for c in fk.columns)
            local = Multiplicity(0 if optional else 1, 1)
            schema.add_edge_type(
                fk_edge_label(t, fk),
                multiplicity={("tail", t.name): local, ("head", fk.table): Multiplicity(0, None)},
                tail=[t.name],
                head=[fk.table],
            )
    for t in manifest.tables:
        if not t.join_table:
            continue
        tail = {tbl: Multiplicity(0, None) for end, tbl, _ in join_slots(t) if end == "tail"}
        head = {tbl: Multiplicity(0, None) for end, tbl, _ in join_slots(t) if end == "head"}
        schema.add_edge_type(t.name, tail, head, prop=_payload(schema, t))
    return schema


# -- data mapping ----------------------------------------------------------------------


def _scalar(kind: str, text: str) -> Any:
    if kind == "string":
        return text
    if kind == "int":
        return int(text)
    if kind == "bool":
        low = text.strip().lower()
        if low in ("true", "1"):
            return True
        if low in ("false", "0"):
            return False
        raise ValueError(text)
    if kind in ("decimal", "money"):
        value = Decimal(text.strip())
        if not value.is_finite() or not base_conforms(kind, value):
            raise ValueError(text)
        return value
    if kind == "date":
        d = _date.fromisoformat(text.strip())
        return {"day": d.day, "month": d.month, "year": d.year}
    raise ValueError(kind)


def _json_item(kind: str, item: Any) -> Any:
    if kind == "bool":
        if isinstance(item, bool):
            return item
        raise ValueError(item)
    if isinstance(item, bool) or item is None:
        raise ValueError(item)
    if kind == "string" and not isinstance(item, str):
        raise ValueError(item)
    if kind == "int" and not isinstance(item, int):
        raise ValueError(item)
    return _scalar(kind, str(item))


def parse_cell(col: Column, text: str | None) -> Any:
    """Decode one cell.  An empty cell is NULL; arrays are JSON lists.

    Raises ``ValueError`` when the text does not fit the column type.
    """
    element = col.element
    if text is None or (text == "" and (col.nullable or element is not None or col.kind != "string")):
        if element is not None:
            return []
        if col.nullable:
            return None
        raise ValueError("NULL in a non-nullable column")
    if element is not None:
        items = json.loads(text, parse_float=Decimal)
        if not isinstance(items, list):
            raise ValueError(text)
        return [_json_item(element, i) for i in items]
    return _scalar(col.kind, text)


def _symbol(table: str, key: tuple[Any, ...]) -> str:
    raw = "_".join([table, *(str(k) for k in key)])
    return re.sub(r"[^A-Za-z0-9_]", "_", raw)


def row_symbol(table: str, key: Iterable[Any]) -> str:
    """Node name for the row of ``table`` with primary-key values ``key``."""
    return _symbol(table, tuple(key))


def _wrap(col: Column, value: Any) -> Any:
    if col.element is None and col.nullable:
        return [] if value is None else [value]
    return value


def import_relational_data(
    manifest: RelationalManifest,
    rows: Mapping[str, Iterable[Mapping[str, str | None]]],
    schema: TypedGraphSchema,
) -> MutationBatch:
    """Nodes for ordinary rows, edges for foreign-key values and join rows.

    ``rows`` maps table names to row mappings of raw cell text.  Every problem
    is collected; any problem raises :class:`DataImportError`.
    """
    report = Report()
    parsed: dict[str, list[tuple[int, dict[str, Any]]]] = {}
    for t in manifest.tables:
        out = []
        for i, raw in enumerate(rows.get(t.name, ()), start=1):
            values: dict[str, Any] = {}
            for col in t.columns:
                subject = f"{t.name}[{i}].{col.name}"
                if col.name not in raw:
                    report.add("TypeMismatch", subject, "column missing from row")
                    continue
                try:
                    values[col.name] = parse_cell(col, raw[col.name])
                except (ValueError, InvalidOperation, json.JSONDecodeError):
                    report.add("TypeMismatch", subject, f"{raw[col.name]!r} is not a valid {col.kind}")
            declared = {c.name for c in t.columns}
            for extra in sorted(str(k) for k in raw if k not in declared):
                report.add("TypeMismatch", f"{t.name}[{i}].{extra}", "cell outside the declared columns")
            out.append((i, values))
        parsed[t.name] = out

    batch = MutationBatch()
    index: dict[str, dict[tuple, Placeholder]] = {}
    used: set[str] = set()
    for t in manifest.tables:
        if t.join_table:
            continue
        keys: dict[tuple, Placeholder] = {}
        for i, values in parsed[t.name]:
            if len(values) != len(t.columns):
                continue
            key = tuple(values[c] for c in t.primary_key)
            if key in keys:
                report.add("DuplicateKey", f"{t.name}[{i}]", f"primary key {key!r} repeats")
                continue
            name = _symbol(t.name, key)
            n = 2
            while name in used:
                name = f"{_symbol(t.name, key)}_{n}"
                n += 1
            used.add(name)
            payload = {c.name: _wrap(c, values[c.name]) for c in t.payload_columns}
            keys[key] = batch.insert_node(t.name, payload, name=name)
        index[t.name] = keys

    def target(t: Table, i: int, fk: ForeignKey, values: dict[str, Any]) -> Placeholder | None:
        key = tuple(values[c] for c in fk.columns)
        if any(k is None for k in key):
            return None
        ref = index[fk.table].get(key)
        if ref is None:
            report.add("FkTargetMissing", f"{t.name}[{i}]", f"no {fk.table} row with key {key!r}")
        return ref

    for t in manifest.tables:
        for i, values in parsed[t.name]:
            if len(values) != len(t.columns):
                continue
            if not t.join_table:
                me = index[t.name].get(tuple(values[c] for c in t.primary_key))
                for fk in t.foreign_keys:
                    ref = target(t, i, fk, values)
                    if ref is not None and me is not None:
                        batch.insert_edge(fk_edge_label(t, fk), {t.name: me}, {fk.table: ref})
                continue
            tail, head = {}, {}
            complete = True
            for end, tbl, fk in join_slots(t):
                ref = target(t, i, fk, values)
                if ref is None:
                    complete = False
                    continue
                (tail if end == "tail" else head)[tbl] = ref
            if complete:
                prop = {c.name: _wrap(c, values[c.name]) for c in t.payload_columns}
                batch.insert_edge(t.name, tail, head, prop)

    if not report.ok:
        raise DataImportError(report)
    return batch


def read_table_files(
    manifest: RelationalManifest, directory: str | Path, delimiter: str = ","
) -> dict[str, list[dict[str, str]]]:
    """Load ``<table>.csv`` for every table; a missing file means an empty table."""
    directory = Path(directory)
    rows: dict[str, list[dict[str, str]]] = {}
    for t in manifest.tables:
        path = directory / f"{t.name}.csv"
        if not path.exists():
            rows[t.name] = []
            continue
        with path.open(newline="", encoding="utf-8") as fh:
            rows[t.name] = list(csv.DictReader(fh, delimiter=delimiter))
    return rows
