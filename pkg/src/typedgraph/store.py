"""Instance graphs bound to a schema, with atomic batch commits.

A :class:`TypedGraph` is an immutable snapshot.  :meth:`TypedGraph.commit`
applies a :class:`MutationBatch` to a private copy, validates the result
and returns a new snapshot, or raises :class:`CommitRejected` listing every
violation while the original graph stays as it was.
"""

from __future__ import annotations

import copy
import itertools
from collections import Counter, defaultdict, deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from types import MappingProxyType
from typing import Any, Union

from .datatypes import compare, freeze, value_at
from .errors import CommitRejected, InvalidSchema, UnknownEdgeType, UnknownNode
from .report import Report
from .schema import (
    HEAD,
    TAIL,
    Acyclic,
    PropertyPredicate,
    TypedGraphSchema,
    UniquePer,
    UniqueProperty,
)

NodeId = int
EdgeId = int

ALONG = "along"
AGAINST = "against"


@dataclass(frozen=True)
class InstanceNode:
    id: NodeId
    type_label: str
    value: Any
    name: str | None = None


@dataclass(frozen=True)
class InstanceEdge:
    id: EdgeId
    type_label: str
    value: Any
    tail: tuple[tuple[str, NodeId], ...]
    head: tuple[tuple[str, NodeId], ...]

    def endpoints(self) -> list[tuple[str, str, NodeId]]:
        return [(TAIL, lbl, n) for lbl, n in self.tail] + [(HEAD, lbl, n) for lbl, n in self.head]

    def node_ids(self) -> set[NodeId]:
        return {n for _, n in self.tail} | {n for _, n in self.head}


# -- mutation batches -------------------------------------------------------------


@dataclass(frozen=True)
class Placeholder:
    """Stands for a node inserted earlier in the same batch."""

    index: int
    name: str | None = None


NodeRef = Union[NodeId, Placeholder]
Endpoints = Union[Mapping[str, NodeRef], Sequence[NodeRef]]


@dataclass(frozen=True)
class InsertNode:
    type_label: str
    value: Any
    placeholder: Placeholder
    name: str | None = None


@dataclass(frozen=True)
class InsertEdge:
    type_label: str
    value: Any
    tail: Any
    head: Any


@dataclass(frozen=True)
class UpdateNodeValue:
    id: NodeId
    value: Any


@dataclass(frozen=True)
class UpdateEdgeValue:
    id: EdgeId
    value: Any


@dataclass(frozen=True)
class DeleteNode:
    id: NodeId


@dataclass(frozen=True)
class DeleteEdge:
    id: EdgeId


class MutationBatch:
    """Ordered staged actions, validated together at commit time."""

    def __init__(self) -> None:
        self.actions: list = []
        self._placeholders = 0

    def insert_node(self, type_label: str, value: Any, name: str | None = None) -> Placeholder:
        ph = Placeholder(self._placeholders, name)
        self._placeholders += 1
        self.actions.append(InsertNode(type_label, value, ph, name))
        return ph

    def insert_edge(self, type_label: str, tail: Endpoints = (), head: Endpoints = (), value: Any = None) -> None:
        """Stage an edge; endpoints are given per slot label or positionally."""
        tail = dict(tail) if isinstance(tail, Mapping) else tuple(tail)
        head = dict(head) if isinstance(head, Mapping) else tuple(head)
        self.actions.append(InsertEdge(type_label, {} if value is None else value, tail, head))

    def update_node(self, node: NodeId, value: Any) -> None:
        self.actions.append(UpdateNodeValue(node, value))

    def update_edge(self, edge: EdgeId, value: Any) -> None:
        self.actions.append(UpdateEdgeValue(edge, value))

    def delete_node(self, node: NodeId) -> None:
        self.actions.append(DeleteNode(node))

    def delete_edge(self, edge: EdgeId) -> None:
        self.actions.append(DeleteEdge(edge))

    def __len__(self) -> int:
        return len(self.actions)


# -- the graph ------------------------------------------------------------------------


def new_graph(schema: TypedGraphSchema) -> "TypedGraph":
    """An empty graph bound to ``schema``; the schema is frozen from now on."""
    report = schema.validate()
    if not report.ok:
        raise InvalidSchema(report)
    schema.freeze()
    return TypedGraph(schema)


class TypedGraph:
    def __init__(
        self,
        schema: TypedGraphSchema,
        nodes: Iterable[InstanceNode] = (),
        edges: Iterable[InstanceEdge] = (),
    ) -> None:
        # no validation here; hand-built graphs are checked with check()
        self.schema = schema
        self._nodes: dict[NodeId, InstanceNode] = {n.id: n for n in nodes}
        self._edges: dict[EdgeId, InstanceEdge] = {e.id: e for e in edges}
        self._incidence = _incidence(self._edges.values())
        self._names = {n.name: n.id for n in self._nodes.values() if n.name is not None}
        self._next_node = max(self._nodes, default=0) + 1
        self._next_edge = max(self._edges, default=0) + 1

    @classmethod
    def _from_parts(cls, schema, nodes, edges, incidence, names, next_node, next_edge) -> "TypedGraph":
        g = cls.__new__(cls)
        g.schema = schema
        g._nodes = nodes
        g._edges = edges
        g._incidence = incidence
        g._names = names
        g._next_node = next_node
        g._next_edge = next_edge
        return g

    @property
    def nodes(self) -> Mapping[NodeId, InstanceNode]:
        return MappingProxyType(self._nodes)

    @property
    def edges(self) -> Mapping[EdgeId, InstanceEdge]:
        return MappingProxyType(self._edges)

    def node(self, node: NodeId) -> InstanceNode:
        try:
            return self._nodes[node]
        except KeyError:
            raise UnknownNode(node) from None

    def find(self, name: str) -> NodeId:
        try:
            return self._names[name]
        except KeyError:
            raise UnknownNode(name) from None

    def nodes_of_type(self, label: str) -> list[InstanceNode]:
        return [n for n in self._nodes.values() if n.type_label == label]

    def edges_of_type(self, label: str) -> list[InstanceEdge]:
        return [e for e in self._edges.values() if e.type_label == label]

    def incident_edges(self, node: NodeId) -> list[InstanceEdge]:
        return [self._edges[e] for e in sorted(self._incidence.get(node, ()))]

    def __len__(self) -> int:
        return len(self._nodes)

    def __repr__(self) -> str:
        return f"<TypedGraph {self.schema.name}: {len(self._nodes)} nodes, {len(self._edges)} edges>"

    # -- commit ------------------------------------------------------------

    def commit(self, batch: MutationBatch) -> "TypedGraph":
        schema = self.schema
        nodes = dict(self._nodes)
        edges = dict(self._edges)
        incidence = dict(self._incidence)
        names = dict(self._names)
        next_node, next_edge = self._next_node, self._next_edge
        report = Report()
        resolved: dict[Placeholder, NodeId | None] = {}
        touched_nodes: set[NodeId] = set()
        touched_edges: set[EdgeId] = set()
        deleted_nodes: set[NodeId] = set()

        def attach(eid: EdgeId, nid: NodeId) -> None:
            incidence[nid] = incidence.get(nid, frozenset()) | {eid}

        def detach(eid: EdgeId, nid: NodeId) -> None:
            rest = incidence.get(nid, frozenset()) - {eid}
            if rest:
                incidence[nid] = rest
            else:
                incidence.pop(nid, None)

        for step, action in enumerate(batch.actions, 1):
            where = f"action {step}"
            if isinstance(action, InsertNode):
                if action.type_label not in schema.node_types:
                    report.add("UnknownTypeLabel", where, f"no node type {action.type_label!r}")
                    resolved[action.placeholder] = None
                    continue
                nid = next_node
                next_node += 1
                nodes[nid] = InstanceNode(nid, action.type_label, copy.deepcopy(action.value), action.name)
                resolved[action.placeholder] = nid
                touched_nodes.add(nid)
                if action.name is not None:
                    if action.name in names:
                        report.add("DuplicateName", where, f"node name {action.name!r} already in use")
                    else:
                        names[action.name] = nid
            elif isinstance(action, InsertEdge):
                et = schema.edge_types.get(action.type_label)
                if et is None:
                    report.add("UnknownTypeLabel", where, f"no edge type {action.type_label!r}")
                    continue
                ends = []
                ok = True
                for end, spec, slots in ((TAIL, action.tail, et.tail_labels), (HEAD, action.head, et.head_labels)):
                    pairs = _match_slots(spec, slots)
                    if pairs is None:
                        report.add(
                            "EndpointMismatch", where,
                            f"{et.label} {end} expects slots ({', '.join(slots)})",
                        )
                        ok = False
                        continue
                    for label, ref in pairs:
                        if isinstance(ref, Placeholder):
                            if ref not in resolved:
                                report.add("PlaceholderUndefined", where, f"placeholder {ref.name or ref.index} used before insert")
                                ok = False
                                continue
                            nid = resolved[ref]
                            if nid is None:
                                ok = False  # the insert already failed
                                continue
                        else:
                            nid = ref
                        target = nodes.get(nid)
                        if target is None:
                            report.add("DanglingEndpoint", where, f"{et.label} {end} {label} refers to missing node {nid}")
                            ok = False
                        elif target.type_label != label:
                            report.add(
                                "EndpointMismatch", where,
                                f"{et.label} {end} slot {label} got {target.type_label} node {nid}",
                            )
                            ok = False
                        else:
                            ends.append((end, label, nid))
                if not ok:
                    continue
                eid = next_edge
                next_edge += 1
                tail = tuple((lbl, n) for e, lbl, n in ends if e == TAIL)
                head = tuple((lbl, n) for e, lbl, n in ends if e == HEAD)
                edges[eid] = InstanceEdge(eid, et.label, copy.deepcopy(action.value), tail, head)
                touched_edges.add(eid)
                for _, _, n in ends:
                    attach(eid, n)
                    touched_nodes.add(n)
            elif isinstance(action, UpdateNodeValue):
                old = nodes.get(action.id)
                if old is None:
                    report.add("UnknownNode", where, f"no node {action.id}")
                    continue
                nodes[action.id] = InstanceNode(old.id, old.type_label, copy.deepcopy(action.value), old.name)
                touched_nodes.add(action.id)
            elif isinstance(action, UpdateEdgeValue):
                old_e = edges.get(action.id)
                if old_e is None:
                    report.add("UnknownEdge", where, f"no edge {action.id}")
                    continue
                edges[action.id] = InstanceEdge(old_e.id, old_e.type_label, copy.deepcopy(action.value), old_e.tail, old_e.head)
                touched_edges.add(action.id)
            elif isinstance(action, DeleteNode):
                old = nodes.pop(action.id, None)
                if old is None:
                    report.add("UnknownNode", where, f"no node {action.id}")
                    continue
                if old.name is not None and names.get(old.name) == old.id:
                    del names[old.name]
                deleted_nodes.add(action.id)
                touched_nodes.discard(action.id)
            elif isinstance(action, DeleteEdge):
                old_e = edges.pop(action.id, None)
                if old_e is None:
                    report.add("UnknownEdge", where, f"no edge {action.id}")
                    continue
                touched_edges.discard(action.id)
                for n in old_e.node_ids():
                    detach(action.id, n)
                    if n in nodes:
                        touched_nodes.add(n)
            else:
                report.add("UnknownAction", where, f"unsupported action {action!r}")

        for nid in sorted(deleted_nodes):
            left = incidence.get(nid)
            if left:
                report.add(
                    "DeleteLeavesDangling", f"node {nid}",
                    f"still attached to edge(s) {', '.join(map(str, sorted(left)))}",
                )
        for nid in sorted(touched_nodes):
            node = nodes[nid]
            payload = schema.node_types[node.type_label].payload
            report.extend(schema.registry.check_value(payload, node.value, _node_subject(node)))
        for eid in sorted(touched_edges):
            edge = edges[eid]
            report.extend(schema.registry.check_value(schema.edge_types[edge.type_label].prop, edge.value, _edge_subject(edge)))
        for nid in sorted(touched_nodes):
            _check_cardinality(schema, nodes[nid], incidence.get(nid, ()), edges, report)
        _check_constraints(schema, nodes, edges, report)

        if report.errors:
            raise CommitRejected(report)
        return TypedGraph._from_parts(schema, nodes, edges, incidence, names, next_node, next_edge)

    # -- full validation ---------------------------------------------------

    def check(self) -> Report:
        """Re-validate every invariant from scratch."""
        schema = self.schema
        report = Report()
        seen_names: dict[str, NodeId] = {}
        for node in self._nodes.values():
            nt = schema.node_types.get(node.type_label)
            if nt is None:
                report.add("UnknownTypeLabel", _node_subject(node), f"no node type {node.type_label!r}")
                continue
            report.extend(schema.registry.check_value(nt.payload, node.value, _node_subject(node)))
            if node.name is not None:
                if node.name in seen_names:
                    report.add("DuplicateName", _node_subject(node), f"name also used by node {seen_names[node.name]}")
                seen_names.setdefault(node.name, node.id)
        good_edges: dict[EdgeId, InstanceEdge] = {}
        for edge in self._edges.values():
            et = schema.edge_types.get(edge.type_label)
            if et is None:
                report.add("UnknownTypeLabel", _edge_subject(edge), f"no edge type {edge.type_label!r}")
                continue
            report.extend(schema.registry.check_value(et.prop, edge.value, _edge_subject(edge)))
            ok = True
            for end, got, want in ((TAIL, edge.tail, et.tail_labels), (HEAD, edge.head, et.head_labels)):
                if sorted(lbl for lbl, _ in got) != sorted(want):
                    report.add("EndpointMismatch", _edge_subject(edge), f"{end} slots do not match ({', '.join(want)})")
                    ok = False
                for lbl, nid in got:
                    target = self._nodes.get(nid)
                    if target is None:
                        report.add("DanglingEndpoint", _edge_subject(edge), f"{end} {lbl} refers to missing node {nid}")
                        ok = False
                    elif target.type_label != lbl:
                        report.add(
                            "EndpointMismatch", _edge_subject(edge),
                            f"{end} slot {lbl} holds {target.type_label} node {nid}",
                        )
                        ok = False
            if ok:
                good_edges[edge.id] = edge
        incidence = _incidence(good_edges.values())
        for node in self._nodes.values():
            if node.type_label in schema.node_types:
                _check_cardinality(schema, node, incidence.get(node.id, ()), good_edges, report)
        _check_constraints(schema, self._nodes, good_edges, report)
        acyclic = {c.edge_type for c in schema.constraints if isinstance(c, Acyclic)}
        for et in schema.edge_types.values():
            if et.recursive and et.label not in acyclic:
                cyc = _find_cycle(et.label, good_edges)
                if cyc is not None:
                    report.warn("InstanceCycle", et.label, f"instance cycle through node {cyc}")
        return report

    # -- traversal ---------------------------------------------------------

    def neighbors(self, node: NodeId, edge_type: str, direction: str = ALONG) -> set[NodeId]:
        """Nodes reached over ``edge_type`` edges in reading direction or against it."""
        if node not in self._nodes:
            raise UnknownNode(node)
        if edge_type not in self.schema.edge_types:
            raise UnknownEdgeType(edge_type)
        if direction not in (ALONG, AGAINST):
            raise ValueError(f"direction must be {ALONG!r} or {AGAINST!r}")
        out: set[NodeId] = set()
        for eid in self._incidence.get(node, ()):
            edge = self._edges[eid]
            if edge.type_label != edge_type:
                continue
            src, dst = (edge.tail, edge.head) if direction == ALONG else (edge.head, edge.tail)
            if any(n == node for _, n in src):
                out.update(n for _, n in dst)
        return out

    def where_used(self, node: NodeId, edge_type: str) -> set[NodeId]:
        """Transitive closure of :meth:`neighbors` against the edge direction."""
        seen: set[NodeId] = set()
        queue = deque(self.neighbors(node, edge_type, AGAINST))
        while queue:
            cur = queue.popleft()
            if cur in seen:
                continue
            seen.add(cur)
            queue.extend(self.neighbors(cur, edge_type, AGAINST) - seen)
        return seen


# -- helpers ------------------------------------------------------------------------


def _incidence(edges: Iterable[InstanceEdge]) -> dict[NodeId, frozenset[EdgeId]]:
    acc: dict[NodeId, set[EdgeId]] = defaultdict(set)
    for e in edges:
        for n in e.node_ids():
            acc[n].add(e.id)
    return {n: frozenset(s) for n, s in acc.items()}


def _match_slots(spec, slots: tuple[str, ...]) -> list[tuple[str, NodeRef]] | None:
    if isinstance(spec, Mapping):
        if set(spec) != set(slots) or len(spec) != len(slots):
            return None
        return [(lbl, spec[lbl]) for lbl in slots]
    refs = list(spec)
    if len(refs) != len(slots):
        return None
    return list(zip(slots, refs))


def _node_subject(node: InstanceNode) -> str:
    if node.name is not None:
        return f"{node.type_label}#{node.id}({node.name})"
    return f"{node.type_label}#{node.id}"


def _edge_subject(edge: InstanceEdge) -> str:
    return f"{edge.type_label}#e{edge.id}"


def _check_cardinality(schema, node, incident, edges, report: Report) -> None:
    counts: Counter = Counter()
    for eid in incident:
        edge = edges[eid]
        for end, lbl, n in edge.endpoints():
            if n == node.id:
                counts[(edge.type_label, end, lbl)] += 1
    for et, end, m in schema.slots_of(node.type_label):
        found = counts[(et.label, end, node.type_label)]
        if not m.admits(found):
            report.add(
                "CardinalityViolation", _node_subject(node),
                f"{et.label} ({end} {node.type_label}): found {found}, allowed {m}",
            )


def _slot_nodes(edge: InstanceEdge, label: str) -> tuple[NodeId, ...]:
    return tuple(n for _, lbl, n in edge.endpoints() if lbl == label)


def _check_constraints(schema: TypedGraphSchema, nodes, edges, report: Report) -> None:
    for c in schema.constraints:
        if isinstance(c, UniquePer):
            if c.target in schema.edge_types:
                _unique_per_edge(c, edges, report)
            else:
                _unique_per_node(c, nodes, edges, report)
        elif isinstance(c, UniqueProperty):
            seen: dict[Any, list[NodeId]] = defaultdict(list)
            for node in nodes.values():
                if node.type_label != c.node_type:
                    continue
                found, v = value_at(node.value, c.path)
                if found:
                    seen[freeze(v)].append(node.id)
            for ids in seen.values():
                if len(ids) > 1:
                    report.add(
                        "ConstraintViolation", f"uniqueProp({c.node_type})",
                        f"{'.'.join(c.path) or 'value'} shared by nodes {', '.join(map(str, sorted(ids)))}",
                    )
        elif isinstance(c, PropertyPredicate):
            pool = nodes.values() if c.label in schema.node_types else edges.values()
            for el in pool:
                if el.type_label != c.label:
                    continue
                subject = _node_subject(el) if isinstance(el, InstanceNode) else _edge_subject(el)
                found, v = value_at(el.value, c.path)
                try:
                    holds = found and compare(v, c.op, c.literal)
                except TypeError:
                    holds = False
                if not holds:
                    report.add(
                        "ConstraintViolation", subject,
                        f"pred {'.'.join(c.path) or 'value'} {c.op} {c.literal} fails",
                    )
        elif isinstance(c, Acyclic):
            cyc = _find_cycle(c.edge_type, edges)
            if cyc is not None:
                report.add("ConstraintViolation", f"acyclic({c.edge_type})", f"cycle through node {cyc}")


def _unique_per_edge(c: UniquePer, edges, report: Report) -> None:
    groups: dict[tuple, list[EdgeId]] = defaultdict(list)
    for edge in edges.values():
        if edge.type_label == c.target:
            groups[tuple(_slot_nodes(edge, k) for k in c.key)].append(edge.id)
    for key, ids in groups.items():
        if len(ids) > 1:
            report.add(
                "ConstraintViolation", f"uniquePer({c.target})",
                f"edges {', '.join(map(str, sorted(ids)))} share {_key_text(c.key, key)}",
            )


def _unique_per_node(c: UniquePer, nodes, edges, report: Report) -> None:
    incidence = _incidence(edges.values())
    groups: dict[tuple, set[NodeId]] = defaultdict(set)
    for node in nodes.values():
        if node.type_label != c.target:
            continue
        adjacent: dict[str, set[NodeId]] = {k: set() for k in c.key}
        for eid in incidence.get(node.id, ()):
            for _, lbl, n in edges[eid].endpoints():
                if lbl in adjacent and n != node.id:
                    adjacent[lbl].add(n)
        for combo in itertools.product(*(sorted(adjacent[k]) for k in c.key)):
            groups[combo].add(node.id)
    for combo, ids in groups.items():
        if len(ids) > 1:
            report.add(
                "ConstraintViolation", f"uniquePer({c.target})",
                f"nodes {', '.join(map(str, sorted(ids)))} share {_key_text(c.key, combo)}",
            )


def _key_text(labels, values) -> str:
    return ", ".join(f"{k}={v}" for k, v in zip(labels, values))


def _find_cycle(edge_type: str, edges) -> NodeId | None:
    succ: dict[NodeId, set[NodeId]] = defaultdict(set)
    for e in edges.values():
        if e.type_label == edge_type:
            for _, t in e.tail:
                succ[t].update(h for _, h in e.head)
    white, grey, black = 0, 1, 2
    colour: dict[NodeId, int] = defaultdict(int)
    for root in sorted(succ):
        if colour[root] != white:
            continue
        stack = [(root, iter(sorted(succ[root])))]
        colour[root] = grey
        while stack:
            cur, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                colour[cur] = black
                stack.pop()
            elif colour[nxt] == grey:
                return nxt
            elif colour[nxt] == white:
                colour[nxt] = grey
                stack.append((nxt, iter(sorted(succ[nxt]))))
    return None


def check_graph(graph: TypedGraph) -> Report:
    return graph.check()
