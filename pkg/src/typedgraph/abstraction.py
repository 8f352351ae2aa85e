"""Condense groups of node types into hyper-nodes.

A total, disjoint :class:`Partition` of the node types turns into a schema
with one node type per group.  Edge types running between two groups
collapse into a single combined edge type per group pair, labelled with the
source labels joined by ``/`` in declaration order.  When the same sources
feed more than one pair, later pairs append ``@Tail-Head`` to stay distinct.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from decimal import Decimal

from .datatypes import RecordType, value_at
from .errors import InvalidPartition, UnknownLabel
from .schema import (
    AggregateSpec,
    Count,
    CountEdges,
    EdgeType,
    Multiplicity,
    Sum,
    TypedGraphSchema,
    most_general_multiplicity,
)
from .store import MutationBatch, TypedGraph, new_graph


@dataclass(frozen=True)
class Partition:
    groups: tuple[tuple[str, tuple[str, ...]], ...]

    def __init__(self, groups: Mapping[str, Iterable[str]]):
        object.__setattr__(self, "groups", tuple((g, tuple(m)) for g, m in groups.items()))

    @classmethod
    def of(cls, schema: TypedGraphSchema) -> "Partition":
        """The partition declared by the schema's ``group`` blocks."""
        if not schema.groups:
            raise InvalidPartition(f"schema {schema.name!r} declares no groups")
        return cls(schema.groups)

    def labels(self) -> list[str]:
        return [g for g, _ in self.groups]

    def group_of(self) -> dict[str, str]:
        return {m: g for g, members in self.groups for m in members}

    def validate(self, schema: TypedGraphSchema) -> None:
        seen: dict[str, str] = {}
        labels = self.labels()
        if len(set(labels)) != len(labels):
            raise InvalidPartition("group labels must be unique")
        for g, members in self.groups:
            if not members:
                raise InvalidPartition(f"group {g!r} is empty")
            for m in members:
                if m not in schema.node_types:
                    raise UnknownLabel(f"group {g!r} lists unknown node type {m!r}")
                if m in seen:
                    raise InvalidPartition(f"node type {m!r} is in both {seen[m]!r} and {g!r}")
                seen[m] = g
        missing = [n for n in schema.node_types if n not in seen]
        if missing:
            raise InvalidPartition(f"node types not covered by any group: {', '.join(missing)}")


@dataclass(frozen=True)
class CombinedEdge:
    """How one abstract edge type was formed."""

    label: str
    tail_group: str
    head_group: str
    sources: tuple[str, ...]


def _plan(schema: TypedGraphSchema, partition: Partition) -> list[CombinedEdge]:
    group_of = partition.group_of()
    order = {g: i for i, g in enumerate(partition.labels())}
    pairs: dict[frozenset, list[EdgeType]] = {}
    first_dir: dict[frozenset, tuple[str, str]] = {}
    for et in schema.edge_types.values():
        tails = [group_of[n] for n in et.tail_labels]
        heads = [group_of[n] for n in et.head_labels]
        groups = sorted(set(tails) | set(heads), key=order.__getitem__)
        for i, g1 in enumerate(groups):
            for g2 in groups[i + 1:]:
                key = frozenset((g1, g2))
                if key not in pairs:
                    pairs[key] = []
                    if g1 in tails and g2 in heads:
                        first_dir[key] = (g1, g2)
                    elif g2 in tails and g1 in heads:
                        first_dir[key] = (g2, g1)
                    else:
                        first_dir[key] = (g1, g2)
                pairs[key].append(et)
    plan = []
    used: set[str] = set()
    for key, ets in pairs.items():
        tail_g, head_g = first_dir[key]
        label = "/".join(et.label for et in ets)
        if label in used:
            # an edge type spanning three or more groups feeds several pairs
            label = f"{label}@{tail_g}-{head_g}"
        used.add(label)
        plan.append(CombinedEdge(label, tail_g, head_g, tuple(et.label for et in ets)))
    return plan


def _side(schema: TypedGraphSchema, sources: Iterable[str], members: set[str]) -> Multiplicity:
    ms = [
        m
        for src in sources
        for _, n, m in schema.edge_types[src].slots()
        if n in members
    ]
    general = most_general_multiplicity(ms)
    # a group hyper-node exists even when its members have no instances
    return Multiplicity(0, general.max)


def _aggregate_kind(schema: TypedGraphSchema, a: AggregateSpec) -> str:
    d = a.definition
    if isinstance(d, Sum):
        leaf = schema.registry.path_type(schema.node_types[d.node_type].payload, d.path)
        return schema.registry.base_kind(leaf)
    return "int"


def _payload_label(g: str, taken: set[str]) -> str:
    label = f"{g}Summary"
    while label in taken:
        label += "_"
    return label


def abstract_schema(
    schema: TypedGraphSchema,
    partition: Partition | None = None,
    aggregates: Iterable[AggregateSpec] | None = None,
) -> TypedGraphSchema:
    """One node type per group, one combined edge type per connected group pair.

    Each side of a combined edge takes the most general multiplicity of the
    collapsed slots on that side, with the minimum relaxed to 0.
    """
    partition = partition or Partition.of(schema)
    partition.validate(schema)
    aggregates = list(schema.aggregates if aggregates is None else aggregates)
    groups = dict(partition.groups)
    for a in aggregates:
        if a.group not in groups:
            raise UnknownLabel(f"aggregate {a.name!r} names unknown group {a.group!r}")
        problem = _aggregate_problem(schema, groups, a)
        if problem:
            raise InvalidPartition(problem)

    out = TypedGraphSchema(f"{schema.name}_abstract")
    taken: set[str] = set()
    for g in partition.labels():
        fields = [(a.name, _aggregate_kind(schema, a)) for a in aggregates if a.group == g]
        label = _payload_label(g, taken)
        taken.add(label)
        out.define_type(label, RecordType(fields))
        out.add_node_type(g, label)
    for ce in _plan(schema, partition):
        tail_m = _side(schema, ce.sources, set(groups[ce.tail_group]))
        head_m = _side(schema, ce.sources, set(groups[ce.head_group]))
        out.add_edge_type(ce.label, {ce.tail_group: tail_m}, {ce.head_group: head_m})
    return out


def _aggregate_problem(schema, groups, a: AggregateSpec) -> str | None:
    probe = TypedGraphSchema(schema.name, schema.registry, schema.node_types, schema.edge_types)
    probe.groups = dict(groups)
    return probe.aggregate_problem(a)


def _aggregate_value(graph: TypedGraph, a: AggregateSpec):
    d = a.definition
    if isinstance(d, Count):
        return len(graph.nodes_of_type(d.node_type))
    if isinstance(d, CountEdges):
        return len(graph.edges_of_type(d.edge_type))
    kind = _aggregate_kind(graph.schema, a)
    total = 0 if kind == "int" else Decimal(0)
    for node in graph.nodes_of_type(d.node_type):
        found, v = value_at(node.value, d.path)
        if found:
            total += v
    if kind == "money":
        total = total.quantize(Decimal("0.01"))
    return total


def abstract_instance(
    graph: TypedGraph,
    partition: Partition | None = None,
    aggregates: Iterable[AggregateSpec] | None = None,
) -> TypedGraph:
    """Condense ``graph`` to one hyper-node per group, committed against the abstract schema."""
    schema = graph.schema
    partition = partition or Partition.of(schema)
    aggregates = list(schema.aggregates if aggregates is None else aggregates)
    target = abstract_schema(schema, partition, aggregates)
    batch = MutationBatch()
    refs = {}
    for g in partition.labels():
        value = {a.name: _aggregate_value(graph, a) for a in aggregates if a.group == g}
        refs[g] = batch.insert_node(g, value, name=g)
    for ce in _plan(schema, partition):
        if any(graph.edges_of_type(src) for src in ce.sources):
            batch.insert_edge(ce.label, {ce.tail_group: refs[ce.tail_group]}, {ce.head_group: refs[ce.head_group]})
    return new_graph(target).commit(batch)


def combined_edges(schema: TypedGraphSchema, partition: Partition | None = None) -> list[CombinedEdge]:
    partition = partition or Partition.of(schema)
    partition.validate(schema)
    return _plan(schema, partition)
