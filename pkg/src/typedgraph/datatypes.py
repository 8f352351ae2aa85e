"""Named data types and value checking.

Values are plain Python objects:

===========  ===========================================
``int``      int (``bool`` is *not* accepted as an int)
``string``   str
``bool``     bool
``decimal``  :class:`decimal.Decimal` (finite)
``money``    :class:`decimal.Decimal` with at most 2 fraction digits
record       ``dict`` whose key order matches the field order
list         ``list`` (or ``tuple``)
union        :class:`Tagged`, naming the chosen alternative
===========  ===========================================

``date`` is pre-bound as ``record(day: int, month: int, year: int)``.
"""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass
from decimal import Decimal
from typing import Any, Iterator, Union

from .errors import DanglingReference, DuplicateTypeLabel, ReservedLabel, SchemaFrozen
from .report import Report

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

BASE_KINDS = ("int", "string", "bool", "decimal", "money")
EMPTY = "empty"  # pre-bound empty record, the default edge property

COMPARATORS = ("<", "<=", "=", "!=", ">=", ">")


def is_identifier(name: str) -> bool:
    return bool(IDENT_RE.match(name))


@dataclass(frozen=True)
class BaseType:
    kind: str


@dataclass(frozen=True)
class ConstrainedBase:
    """A base kind restricted by one comparison, e.g. ``int > 0``."""

    base: str
    op: str
    literal: Any


@dataclass(frozen=True)
class RecordType:
    fields: tuple[tuple[str, str], ...]

    def __init__(self, fields):
        object.__setattr__(self, "fields", tuple((str(n), str(t)) for n, t in fields))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.fields)

    def field_type(self, name: str) -> str | None:
        for n, t in self.fields:
            if n == name:
                return t
        return None


@dataclass(frozen=True)
class ListType:
    element: str
    min_count: int = 0
    max_count: int | None = None  # None means unbounded


@dataclass(frozen=True)
class UnionType:
    alternatives: tuple[str, ...]

    def __init__(self, alternatives):
        seen: list[str] = []
        for a in alternatives:
            if a not in seen:
                seen.append(a)
        object.__setattr__(self, "alternatives", tuple(seen))


@dataclass(frozen=True)
class AnyType:
    pass


@dataclass(frozen=True)
class TypeRef:
    target: str


DataTypeDef = Union[BaseType, ConstrainedBase, RecordType, ListType, UnionType, AnyType, TypeRef]


@dataclass(frozen=True)
class Tagged:
    """A union value: the chosen alternative label plus the wrapped value."""

    tag: str
    value: Any


def _prebound() -> dict[str, DataTypeDef]:
    entries: dict[str, DataTypeDef] = {k: BaseType(k) for k in BASE_KINDS}
    entries["date"] = RecordType([("day", "int"), ("month", "int"), ("year", "int")])
    entries[EMPTY] = RecordType([])
    return entries


PREBOUND = frozenset(_prebound())
# type-expression keywords of the text syntax; never usable as labels
KEYWORDS = frozenset({"record", "list", "union", "any", "true", "false"})


def references(d: DataTypeDef) -> tuple[str, ...]:
    """Labels a definition mentions directly."""
    if isinstance(d, RecordType):
        return tuple(t for _, t in d.fields)
    if isinstance(d, ListType):
        return (d.element,)
    if isinstance(d, UnionType):
        return d.alternatives
    if isinstance(d, TypeRef):
        return (d.target,)
    return ()


def compare(left: Any, op: str, right: Any) -> bool:
    """Apply one of :data:`COMPARATORS`; raises TypeError on incomparable operands."""
    if op == "<":
        return left < right
    if op == "<=":
        return left <= right
    if op == "=":
        return left == right
    if op == "!=":
        return left != right
    if op == ">=":
        return left >= right
    if op == ">":
        return left > right
    raise ValueError(f"unknown comparator {op!r}")


def base_conforms(kind: str, value: Any) -> bool:
    if kind == "int":
        return isinstance(value, int) and not isinstance(value, bool)
    if kind == "string":
        return isinstance(value, str)
    if kind == "bool":
        return isinstance(value, bool)
    if kind == "decimal":
        return isinstance(value, Decimal) and value.is_finite()
    if kind == "money":
        return (
            isinstance(value, Decimal)
            and value.is_finite()
            and value.as_tuple().exponent >= -2  # type: ignore[operator]
        )
    return False


def literal_fits(kind: str, literal: Any) -> bool:
    """Whether a comparison literal is meaningful for a base kind."""
    if kind in ("decimal", "money"):
        return isinstance(literal, Decimal) or (
            isinstance(literal, int) and not isinstance(literal, bool)
        )
    return base_conforms(kind, literal)


class TypeRegistry:
    """The set of named data types available to a schema.

    Definitions may reference labels that are bound later; resolution
    happens in :meth:`validate`.
    """

    def __init__(self) -> None:
        self._entries: dict[str, DataTypeDef] = _prebound()
        self._frozen = False

    # -- construction ------------------------------------------------------

    def define_type(self, label: str, definition: DataTypeDef) -> "TypeRegistry":
        if self._frozen:
            raise SchemaFrozen("registry is frozen")
        if label in PREBOUND or label in KEYWORDS:
            raise ReservedLabel(f"{label!r} is a pre-bound type or keyword")
        if not is_identifier(label):
            raise ValueError(f"invalid type label {label!r}")
        if label in self._entries:
            raise DuplicateTypeLabel(f"type {label!r} already defined")
        # an alias of a base kind is the base kind itself
        if isinstance(definition, TypeRef) and definition.target in BASE_KINDS:
            definition = BaseType(definition.target)
        self._entries[label] = definition
        return self

    def freeze(self) -> None:
        self._frozen = True

    def copy(self) -> "TypeRegistry":
        other = TypeRegistry()
        other._entries = dict(self._entries)
        return other

    # -- lookup ------------------------------------------------------------

    def __contains__(self, label: object) -> bool:
        return label in self._entries

    def __getitem__(self, label: str) -> DataTypeDef:
        return self._entries[label]

    def get(self, label: str) -> DataTypeDef | None:
        return self._entries.get(label)

    def labels(self) -> list[str]:
        return list(self._entries)

    def user_types(self) -> Iterator[tuple[str, DataTypeDef]]:
        """User definitions in declaration order (pre-bound types excluded)."""
        for label, d in self._entries.items():
            if label not in PREBOUND:
                yield label, d

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TypeRegistry):
            return NotImplemented
        return dict(self.user_types()) == dict(other.user_types())

    def resolve(self, label: str) -> DataTypeDef:
        """Follow TypeRef chains to a concrete definition."""
        seen = set()
        d = self._entries.get(label)
        while isinstance(d, TypeRef):
            if d.target in seen:
                break
            seen.add(d.target)
            d = self._entries.get(d.target)
        if d is None:
            raise DanglingReference(label)
        return d

    def base_kind(self, label: str) -> str | None:
        """The base kind behind ``label``, if it is a (constrained) base type."""
        try:
            d = self.resolve(label)
        except DanglingReference:
            return None
        if isinstance(d, BaseType):
            return d.kind
        if isinstance(d, ConstrainedBase):
            return d.base
        return None

    def path_type(self, label: str, path: tuple[str, ...]) -> str | None:
        """Type label reached by following record fields along ``path``."""
        current = label
        for step in path:
            try:
                d = self.resolve(current)
            except DanglingReference:
                return None
            if not isinstance(d, RecordType):
                return None
            nxt = d.field_type(step)
            if nxt is None:
                return None
            current = nxt
        return current

    # -- validation --------------------------------------------------------

    def _dangling_from(self, label: str) -> set[str]:
        missing: set[str] = set()
        stack, seen = [label], set()
        while stack:
            cur = stack.pop()
            if cur in seen:
                continue
            seen.add(cur)
            d = self._entries.get(cur)
            if d is None:
                missing.add(cur)
                continue
            stack.extend(references(d))
        return missing

    def _inhabited(self) -> set[str]:
        # least fixed point: a label is finite once some finite value can be built
        done: set[str] = set()
        changed = True
        while changed:
            changed = False
            for label, d in self._entries.items():
                if label in done:
                    continue
                if isinstance(d, (BaseType, ConstrainedBase, AnyType)):
                    ok = True
                elif isinstance(d, RecordType):
                    ok = all(t in done for _, t in d.fields)
                elif isinstance(d, ListType):
                    ok = d.min_count == 0 or d.element in done
                elif isinstance(d, UnionType):
                    ok = any(a in done for a in d.alternatives)
                elif isinstance(d, TypeRef):
                    ok = d.target in done
                else:
                    ok = False
                if ok:
                    done.add(label)
                    changed = True
        return done

    def is_finite(self, label: str) -> bool:
        missing = self._dangling_from(label)
        if missing:
            raise DanglingReference(", ".join(sorted(missing)))
        return label in self._inhabited()

    def validate(self) -> Report:
        report = Report()
        inhabited = self._inhabited()
        for label, d in self.user_types():
            for ref in references(d):
                if ref not in self._entries:
                    report.add("DanglingReference", label, f"reference to undefined type {ref!r}")
            if isinstance(d, BaseType) and d.kind not in BASE_KINDS:
                report.add("UnknownBaseKind", label, f"unknown base kind {d.kind!r}")
            elif isinstance(d, ConstrainedBase):
                if d.base not in BASE_KINDS:
                    report.add("UnknownBaseKind", label, f"unknown base kind {d.base!r}")
                elif d.op not in COMPARATORS:
                    report.add("BadPredicate", label, f"unknown comparator {d.op!r}")
                elif not literal_fits(d.base, d.literal):
                    report.add("BadPredicate", label, f"literal {d.literal!r} does not fit {d.base}")
            elif isinstance(d, RecordType):
                names = d.names
                for n in sorted({n for n in names if names.count(n) > 1}):
                    report.add("DuplicateField", label, f"field {n!r} declared more than once")
            elif isinstance(d, ListType):
                if d.min_count < 0 or (d.max_count is not None and (d.max_count < 1 or d.min_count > d.max_count)):
                    report.add("BadListBounds", label, f"bounds {d.min_count}..{'*' if d.max_count is None else d.max_count}")
            elif isinstance(d, UnionType):
                if len(d.alternatives) < 2:
                    report.add("UnionTooSmall", label, "a union needs at least two alternatives")
            elif isinstance(d, AnyType):
                report.warn("AnyTypeUsed", label, "anyType weakens data quality checks")
            if label not in inhabited and not self._dangling_from(label):
                report.add("NonFiniteType", label, "recursive definition admits no finite value")
        return report

    def check_value(self, label: str, value: Any, path: str | None = None) -> Report:
        report = Report()
        self._check(label, value, path or label, report, 0)
        return report

    def _check(self, label: str, value: Any, path: str, report: Report, depth: int) -> None:
        d = self._entries.get(label)
        if d is None:
            report.add("TypeViolation", path, f"unknown type {label!r}")
            return
        if depth > 10_000:
            report.add("TypeViolation", path, "value nesting too deep")
            return
        if isinstance(d, TypeRef):
            self._check(d.target, value, path, report, depth + 1)
        elif isinstance(d, BaseType):
            if not base_conforms(d.kind, value):
                report.add("TypeViolation", path, f"expected {d.kind}, got {_describe(value)}")
        elif isinstance(d, ConstrainedBase):
            if not base_conforms(d.base, value):
                report.add("TypeViolation", path, f"expected {d.base}, got {_describe(value)}")
                return
            try:
                holds = compare(value, d.op, d.literal)
            except TypeError:
                holds = False
            if not holds:
                report.add("TypeViolation", path, f"predicate {d.op} {d.literal} fails at {label}")
        elif isinstance(d, RecordType):
            if not isinstance(value, Mapping):
                report.add("TypeViolation", path, f"expected record {label}, got {_describe(value)}")
                return
            keys = list(value.keys())
            names = list(d.names)
            if keys != names:
                missing = [n for n in names if n not in value]
                extra = [k for k in keys if k not in names]
                if missing:
                    report.add("TypeViolation", path, f"missing field(s) {', '.join(missing)}")
                if extra:
                    report.add("TypeViolation", path, f"unexpected field(s) {', '.join(map(str, extra))}")
                if not missing and not extra:
                    report.add("TypeViolation", path, f"fields out of order, expected {', '.join(names)}")
            for name, ftype in d.fields:
                if name in value:
                    self._check(ftype, value[name], f"{path}.{name}", report, depth + 1)
        elif isinstance(d, ListType):
            if not isinstance(value, (list, tuple)):
                report.add("TypeViolation", path, f"expected list, got {_describe(value)}")
                return
            n = len(value)
            if n < d.min_count or (d.max_count is not None and n > d.max_count):
                hi = "*" if d.max_count is None else d.max_count
                report.add("TypeViolation", path, f"list length {n} outside {d.min_count}..{hi}")
            for i, item in enumerate(value):
                self._check(d.element, item, f"{path}[{i}]", report, depth + 1)
        elif isinstance(d, UnionType):
            if not isinstance(value, Tagged):
                report.add("TypeViolation", path, f"expected tagged union value, got {_describe(value)}")
            elif value.tag not in d.alternatives:
                report.add("TypeViolation", path, f"tag {value.tag!r} is not an alternative of {label}")
            else:
                self._check(value.tag, value.value, f"{path}<{value.tag}>", report, depth + 1)
        elif isinstance(d, AnyType):
            pass

    def coerce(self, label: str, value: Any) -> Any:
        """Best-effort literal widening used by the text reader.

        Integers become Decimals where a decimal/money is expected; anything
        that does not fit is returned unchanged for :meth:`check_value` to flag.
        """
        d = self._entries.get(label)
        seen = 0
        while isinstance(d, TypeRef) and seen < 64:
            d = self._entries.get(d.target)
            seen += 1
        kind = d.kind if isinstance(d, BaseType) else d.base if isinstance(d, ConstrainedBase) else None
        if kind in ("decimal", "money") and isinstance(value, int) and not isinstance(value, bool):
            return Decimal(value)
        if isinstance(d, RecordType) and isinstance(value, Mapping):
            return {k: (self.coerce(d.field_type(k), v) if d.field_type(k) else v) for k, v in value.items()}
        if isinstance(d, ListType) and isinstance(value, list):
            return [self.coerce(d.element, v) for v in value]
        if isinstance(d, UnionType) and isinstance(value, Tagged) and value.tag in d.alternatives:
            return Tagged(value.tag, self.coerce(value.tag, value.value))
        return value


def _describe(value: Any) -> str:
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, Decimal):
        return f"decimal {value}"
    if isinstance(value, str):
        return "string"
    if isinstance(value, Mapping):
        return "record"
    if isinstance(value, (list, tuple)):
        return "list"
    if isinstance(value, Tagged):
        return f"tagged {value.tag}"
    return type(value).__name__


def freeze(value: Any) -> Any:
    """A hashable stand-in for a value (used by uniqueness checks)."""
    if isinstance(value, Mapping):
        return ("{}", tuple((k, freeze(v)) for k, v in value.items()))
    if isinstance(value, (list, tuple)):
        return ("[]", tuple(freeze(v) for v in value))
    if isinstance(value, Tagged):
        return ("<>", value.tag, freeze(value.value))
    if isinstance(value, bool):
        return ("bool", value)
    return value


def value_at(value: Any, path: tuple[str, ...]) -> tuple[bool, Any]:
    """Follow record fields; returns ``(found, component)``."""
    cur = value
    for step in path:
        if isinstance(cur, Tagged):
            cur = cur.value
        if not isinstance(cur, Mapping) or step not in cur:
            return False, None
        cur = cur[step]
    return True, cur
