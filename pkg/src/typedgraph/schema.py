"""Typed graph schemas: node types, hyper-edge types, multiplicities, constraints."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any, Union

from .datatypes import (
    COMPARATORS,
    EMPTY,
    TypeRegistry,
    is_identifier,
    literal_fits,
)
from .errors import (
    DuplicateEdgeType,
    DuplicateGroup,
    DuplicateNodeType,
    EmptyEndpointSets,
    EmptyList,
    LabelClash,
    MultiplicityMismatch,
    SchemaFrozen,
    UnknownLabel,
)
from .report import Report

TAIL = "tail"
HEAD = "head"


@dataclass(frozen=True)
class Multiplicity:
    """Min-max participation count; ``max=None`` stands for ``*``."""

    min: int = 0
    max: int | None = None

    @classmethod
    def parse(cls, text: str) -> "Multiplicity":
        lo, _, hi = text.partition("..")
        if not _:
            n = int(lo)
            return cls(n, n)
        return cls(int(lo), None if hi.strip() == "*" else int(hi))

    def __str__(self) -> str:
        return f"{self.min}..{'*' if self.max is None else self.max}"

    def admits(self, count: int) -> bool:
        return count >= self.min and (self.max is None or count <= self.max)

    def contains(self, other: "Multiplicity") -> bool:
        if other.min < self.min:
            return False
        if self.max is None:
            return True
        return other.max is not None and other.max <= self.max

    @property
    def well_formed(self) -> bool:
        return self.min >= 0 and (self.max is None or (self.max >= 1 and self.min <= self.max))


ONE = Multiplicity(1, 1)
MANY = Multiplicity(0, None)


def most_general_multiplicity(ms: Iterable[Multiplicity]) -> Multiplicity:
    """Smallest interval containing every input interval."""
    ms = list(ms)
    if not ms:
        raise EmptyList("most_general_multiplicity needs at least one multiplicity")
    lo = min(m.min for m in ms)
    hi = None if any(m.max is None for m in ms) else max(m.max for m in ms)  # type: ignore[type-var]
    return Multiplicity(lo, hi)


@dataclass(frozen=True)
class NodeType:
    label: str
    payload: str


@dataclass(frozen=True)
class EdgeType:
    """A hyper-edge type.

    ``tail`` and ``head`` map each participating node-type label to its
    multiplicity: how many edges of this type one node of that type takes
    part in, in that role.  A label may appear in both ends (self-loops).
    Every instance edge fills each slot with exactly one node.
    """

    label: str
    tail: tuple[tuple[str, Multiplicity], ...]
    head: tuple[tuple[str, Multiplicity], ...]
    prop: str = EMPTY

    def slots(self) -> list[tuple[str, str, Multiplicity]]:
        """``(end, node-type label, multiplicity)`` for every slot, tail first."""
        return [(TAIL, n, m) for n, m in self.tail] + [(HEAD, n, m) for n, m in self.head]

    @property
    def tail_labels(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.tail)

    @property
    def head_labels(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.head)

    @property
    def arity(self) -> int:
        return len(self.tail) + len(self.head)

    def multiplicity(self, end: str, label: str) -> Multiplicity:
        for n, m in self.tail if end == TAIL else self.head:
            if n == label:
                return m
        raise KeyError((end, label))

    @property
    def recursive(self) -> bool:
        return bool(set(self.tail_labels) & set(self.head_labels))


# -- constraints ---------------------------------------------------------------


@dataclass(frozen=True)
class UniquePer:
    """At most one ``target`` per combination of nodes at the key labels.

    ``target`` is an edge type (key labels name its endpoint slots) or a
    node type (key labels name node types adjacent to it through any edge).
    """

    target: str
    key: tuple[str, ...]


@dataclass(frozen=True)
class UniqueProperty:
    node_type: str
    path: tuple[str, ...]


@dataclass(frozen=True)
class PropertyPredicate:
    label: str
    path: tuple[str, ...]
    op: str
    literal: Any


@dataclass(frozen=True)
class Acyclic:
    """Forbid instance cycles along a recursive edge type."""

    edge_type: str


Constraint = Union[UniquePer, UniqueProperty, PropertyPredicate, Acyclic]


# -- abstraction declarations ----------------------------------------------------


@dataclass(frozen=True)
class Count:
    node_type: str


@dataclass(frozen=True)
class CountEdges:
    edge_type: str


@dataclass(frozen=True)
class Sum:
    node_type: str
    path: tuple[str, ...]


@dataclass(frozen=True)
class AggregateSpec:
    group: str
    name: str
    definition: Union[Count, CountEdges, Sum]


# -- the schema ------------------------------------------------------------------


@dataclass
class TypedGraphSchema:
    name: str = "schema"
    registry: TypeRegistry = field(default_factory=TypeRegistry)
    node_types: dict[str, NodeType] = field(default_factory=dict)
    edge_types: dict[str, EdgeType] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)
    groups: dict[str, tuple[str, ...]] = field(default_factory=dict)
    aggregates: list[AggregateSpec] = field(default_factory=list)
    _frozen: bool = field(default=False, repr=False, compare=False)

    # -- builders ----------------------------------------------------------

    def _check_mutable(self) -> None:
        if self._frozen:
            raise SchemaFrozen(f"schema {self.name!r} is bound to a graph; copy() it first")

    def define_type(self, label: str, definition) -> "TypedGraphSchema":
        self._check_mutable()
        self.registry.define_type(label, definition)
        return self

    def add_node_type(self, label: str, payload: str) -> "TypedGraphSchema":
        self._check_mutable()
        if label in self.node_types:
            raise DuplicateNodeType(f"node type {label!r} already declared")
        if label in self.edge_types:
            raise LabelClash(f"{label!r} is already an edge type")
        self.node_types[label] = NodeType(label, payload)
        return self

    def add_edge_type(
        self,
        label: str,
        tail: Iterable[str] | Mapping[str, Multiplicity] = (),
        head: Iterable[str] | Mapping[str, Multiplicity] = (),
        multiplicity: Mapping[Any, Multiplicity] | None = None,
        prop: str = EMPTY,
    ) -> "TypedGraphSchema":
        """Declare a hyper-edge type.

        ``tail``/``head`` are either mappings ``label -> Multiplicity`` or
        plain label collections paired with ``multiplicity``, whose keys are
        labels or ``("tail"|"head", label)`` pairs when a label sits on both
        ends.
        """
        self._check_mutable()
        if label in self.edge_types:
            raise DuplicateEdgeType(f"edge type {label!r} already declared")
        if label in self.node_types:
            raise LabelClash(f"{label!r} is already a node type")
        tail_slots = _slots(TAIL, tail, multiplicity)
        head_slots = _slots(HEAD, head, multiplicity)
        if not tail_slots and not head_slots:
            raise EmptyEndpointSets(f"edge type {label!r} has no endpoints")
        if multiplicity is not None:
            expected = {(TAIL, n) for n, _ in tail_slots} | {(HEAD, n) for n, _ in head_slots}
            used = set()
            for key in multiplicity:
                if isinstance(key, tuple):
                    used.add(key)
                else:
                    used |= {(e, n) for e, n in expected if n == key}
                    if not any(n == key for _, n in expected):
                        used.add(("?", key))
            if used != expected:
                raise MultiplicityMismatch(
                    f"multiplicity keys for {label!r} do not match its endpoints"
                )
        self.edge_types[label] = EdgeType(label, tuple(tail_slots), tuple(head_slots), prop)
        return self

    def add_constraint(self, constraint: Constraint) -> "TypedGraphSchema":
        self._check_mutable()
        self.constraints.append(constraint)
        return self

    def add_group(self, label: str, members: Iterable[str], aggregates: Iterable[AggregateSpec] = ()) -> "TypedGraphSchema":
        self._check_mutable()
        if label in self.groups:
            raise DuplicateGroup(f"group {label!r} already declared")
        self.groups[label] = tuple(members)
        self.aggregates.extend(aggregates)
        return self

    def with_multiplicity(self, edge: str, end: str, node: str, m: Multiplicity) -> "TypedGraphSchema":
        """A copy of this schema with one slot's multiplicity replaced."""
        other = self.copy()
        et = other.edge_types.get(edge)
        if et is None:
            raise UnknownLabel(edge)
        slots = et.tail if end == TAIL else et.head
        if node not in dict(slots):
            raise UnknownLabel(f"{end} {node} of {edge}")
        new = tuple((n, m if n == node else old) for n, old in slots)
        et = EdgeType(et.label, new, et.head, et.prop) if end == TAIL else EdgeType(et.label, et.tail, new, et.prop)
        other.edge_types[edge] = et
        return other

    def copy(self) -> "TypedGraphSchema":
        return TypedGraphSchema(
            self.name,
            self.registry.copy(),
            dict(self.node_types),
            dict(self.edge_types),
            list(self.constraints),
            dict(self.groups),
            list(self.aggregates),
        )

    def freeze(self) -> None:
        self._frozen = True
        self.registry.freeze()

    # -- queries -----------------------------------------------------------

    def slots_of(self, node_label: str) -> list[tuple[EdgeType, str, Multiplicity]]:
        """Every ``(edge type, end, multiplicity)`` where ``node_label`` participates."""
        cache = self.__dict__.setdefault("_slot_cache", {}) if self._frozen else {}
        if node_label in cache:
            return cache[node_label]
        out = []
        for et in self.edge_types.values():
            for end, n, m in et.slots():
                if n == node_label:
                    out.append((et, end, m))
        cache[node_label] = out
        return out

    def element_type(self, label: str) -> str | None:
        """Payload/property type label for a node or edge type."""
        if label in self.node_types:
            return self.node_types[label].payload
        if label in self.edge_types:
            return self.edge_types[label].prop
        return None

    # -- validation --------------------------------------------------------

    def validate(self) -> Report:
        report = self.registry.validate()
        reg = self.registry
        for label in sorted(set(self.node_types) & set(self.edge_types)):
            report.add("LabelClash", label, "label used for both a node type and an edge type")
        for nt in self.node_types.values():
            if not is_identifier(nt.label):
                report.add("BadLabel", nt.label, "node type labels must be identifiers")
            if nt.payload not in reg:
                report.add("UnknownTypeLabel", nt.label, f"payload type {nt.payload!r} is not defined")
            elif reg.get(nt.payload) is not None and not _finite(reg, nt.payload):
                report.add("NonFiniteType", nt.label, f"payload type {nt.payload!r} admits no finite value")
        for et in self.edge_types.values():
            if et.prop not in reg:
                report.add("UnknownTypeLabel", et.label, f"property type {et.prop!r} is not defined")
            elif not _finite(reg, et.prop):
                report.add("NonFiniteType", et.label, f"property type {et.prop!r} admits no finite value")
            if not et.tail and not et.head:
                report.add("EmptyEndpointSets", et.label, "edge type has no endpoints")
            for end, slots in ((TAIL, et.tail), (HEAD, et.head)):
                names = [n for n, _ in slots]
                for n in sorted({n for n in names if names.count(n) > 1}):
                    report.add("MultiplicityMismatch", et.label, f"{end} lists {n!r} twice")
                for n, m in slots:
                    if n not in self.node_types:
                        report.add("UnknownNodeType", et.label, f"{end} endpoint {n!r} is not a node type")
                    if m.max is not None and m.min > m.max:
                        report.add("MinExceedsMax", et.label, f"{end} {n}: {m}")
                    elif not m.well_formed:
                        report.add("BadMultiplicity", et.label, f"{end} {n}: {m}")
        for c in self.constraints:
            problem = self._constraint_problem(c)
            if problem:
                report.add("UnresolvedConstraint", constraint_subject(c), problem)
        self._validate_groups(report)
        return report

    def _constraint_problem(self, c: Constraint) -> str | None:
        reg = self.registry
        if isinstance(c, UniquePer):
            if not c.key:
                return "uniquePer needs at least one key label"
            if c.target in self.edge_types:
                et = self.edge_types[c.target]
                slot_labels = set(et.tail_labels) | set(et.head_labels)
                bad = [k for k in c.key if k not in slot_labels]
                if bad:
                    return f"{', '.join(bad)} not an endpoint of {c.target}"
                return None
            if c.target in self.node_types:
                neighbours = set()
                for et, _, _ in self.slots_of(c.target):
                    neighbours |= set(et.tail_labels) | set(et.head_labels)
                bad = [k for k in c.key if k not in neighbours or k == c.target]
                if bad:
                    return f"{', '.join(bad)} not adjacent to {c.target}"
                return None
            return f"unknown target {c.target!r}"
        if isinstance(c, UniqueProperty):
            if c.node_type not in self.node_types:
                return f"unknown node type {c.node_type!r}"
            if reg.path_type(self.node_types[c.node_type].payload, c.path) is None:
                return f"field path {'.'.join(c.path) or '<self>'} does not resolve"
            return None
        if isinstance(c, PropertyPredicate):
            t = self.element_type(c.label)
            if t is None:
                return f"unknown node or edge type {c.label!r}"
            leaf = reg.path_type(t, c.path)
            if leaf is None:
                return f"field path {'.'.join(c.path) or '<self>'} does not resolve"
            if c.op not in COMPARATORS:
                return f"unknown comparator {c.op!r}"
            kind = reg.base_kind(leaf)
            if kind is None:
                return f"field path {'.'.join(c.path)} is not a base value"
            if not literal_fits(kind, c.literal):
                return f"literal {c.literal!r} does not fit {kind}"
            return None
        if isinstance(c, Acyclic):
            et = self.edge_types.get(c.edge_type)
            if et is None:
                return f"unknown edge type {c.edge_type!r}"
            return None
        return f"unsupported constraint {c!r}"

    def _validate_groups(self, report: Report) -> None:
        for g, members in self.groups.items():
            if not is_identifier(g):
                report.add("BadLabel", g, "group labels must be identifiers")
            if not members:
                report.add("EmptyGroup", g, "group has no members")
            for m in members:
                if m not in self.node_types:
                    report.add("UnknownGroupMember", g, f"{m!r} is not a node type")
        for a in self.aggregates:
            problem = self.aggregate_problem(a)
            if problem:
                report.add("InvalidAggregate", f"{a.group}.{a.name}", problem)

    def aggregate_problem(self, a: AggregateSpec) -> str | None:
        members = set(self.groups.get(a.group, ()))
        if a.group not in self.groups:
            return f"unknown group {a.group!r}"
        if not is_identifier(a.name):
            return f"aggregate name {a.name!r} is not an identifier"
        d = a.definition
        if isinstance(d, (Count, Sum)):
            if d.node_type not in members:
                return f"{d.node_type!r} is not a member of {a.group}"
            if isinstance(d, Sum):
                leaf = self.registry.path_type(self.node_types[d.node_type].payload, d.path)
                kind = self.registry.base_kind(leaf) if leaf else None
                if kind not in ("int", "decimal", "money"):
                    return f"sum path {'.'.join(d.path)} is not numeric"
            return None
        if isinstance(d, CountEdges):
            et = self.edge_types.get(d.edge_type)
            if et is None:
                return f"unknown edge type {d.edge_type!r}"
            if not (set(et.tail_labels) | set(et.head_labels)) & members:
                return f"{d.edge_type!r} does not touch group {a.group}"
            return None
        return "unsupported aggregate"


def _finite(reg: TypeRegistry, label: str) -> bool:
    try:
        return reg.is_finite(label)
    except Exception:
        return True  # dangling references are reported separately


def constraint_subject(c: Constraint) -> str:
    if isinstance(c, UniquePer):
        return f"uniquePer({c.target})"
    if isinstance(c, UniqueProperty):
        return f"uniqueProp({c.node_type})"
    if isinstance(c, PropertyPredicate):
        return f"pred({c.label})"
    if isinstance(c, Acyclic):
        return f"acyclic({c.edge_type})"
    return repr(c)


def _slots(end: str, spec, multiplicity) -> list[tuple[str, Multiplicity]]:
    if isinstance(spec, Mapping):
        return [(str(n), m) for n, m in spec.items()]
    out = []
    for n in spec:
        if multiplicity is None:
            raise MultiplicityMismatch(f"no multiplicity given for {end} {n!r}")
        m = multiplicity.get((end, n), multiplicity.get(n))
        if m is None:
            raise MultiplicityMismatch(f"no multiplicity given for {end} {n!r}")
        out.append((n, m))
    return out
