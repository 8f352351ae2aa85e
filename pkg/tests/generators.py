"""Seeded random generators shared by the property tests and the acceptance suite.

Each builder takes a ``random.Random`` so loops can count exactly how many
cases ran; ``hypothesis`` strategies wrap them through ``st.randoms``.
"""

from __future__ import annotations

import random
import re
import string
from decimal import Decimal

from hypothesis import strategies as st

from typedgraph.datatypes import (
    AnyType,
    BaseType,
    ConstrainedBase,
    ListType,
    RecordType,
    Tagged,
    TypeRegistry,
    UnionType,
    compare,
)
from typedgraph.schema import (
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
)
from typedgraph.errors import CommitRejected
from typedgraph.store import InstanceEdge, InstanceNode, MutationBatch, new_graph
from typedgraph.text import print_instance, print_violations

MULTS = [
    Multiplicity(0, None),
    Multiplicity(0, 1),
    Multiplicity(1, 1),
    Multiplicity(1, None),
    Multiplicity(0, 2),
    Multiplicity(2, 3),
]
KINDS = ("int", "string", "bool", "decimal", "money")


def rand_multiplicity(rng: random.Random, cap: int = 6) -> Multiplicity:
    lo = rng.randint(0, cap)
    if rng.random() < 0.3:
        return Multiplicity(lo, None)
    return Multiplicity(lo, rng.randint(max(lo, 1), cap + 2))


def rand_literal(rng: random.Random, kind: str):
    if kind == "int":
        return rng.randint(-50, 50)
    if kind == "bool":
        return rng.random() < 0.5
    if kind == "decimal":
        return Decimal(rng.randint(-5000, 5000)).scaleb(-rng.randint(0, 3))
    if kind == "money":
        return Decimal(rng.randint(-5000, 5000)).scaleb(-2)
    chars = string.ascii_letters + string.digits + ' _-/"\\\né'
    return "".join(rng.choice(chars) for _ in range(rng.randint(0, 8)))


# -- data types ------------------------------------------------------------------------


def rand_registry(rng: random.Random, count: int | None = None, prefix: str = "T") -> TypeRegistry:
    """User types referring only to earlier labels, so all are finite and resolvable."""
    reg = TypeRegistry()
    labels: list[str] = list(KINDS) + ["date"]
    for i in range(rng.randint(0, 6) if count is None else count):
        label = f"{prefix}{i}"
        roll = rng.random()
        if roll < 0.2:
            kind = rng.choice(("int", "decimal", "money"))
            op = rng.choice(("<", "<=", "=", "!=", ">=", ">"))
            d = ConstrainedBase(kind, op, rand_literal(rng, kind))
        elif roll < 0.55:
            names = rng.sample(["a", "b", "c", "d", "e"], rng.randint(0, 4))
            d = RecordType([(n, rng.choice(labels)) for n in names])
        elif roll < 0.75:
            lo = rng.randint(0, 2)
            hi = None if rng.random() < 0.5 else max(lo, 1) + rng.randint(0, 3)
            d = ListType(rng.choice(labels), lo, hi)
        elif roll < 0.9:
            d = UnionType(rng.sample(labels, rng.randint(2, 3)))
        elif roll < 0.95:
            d = AnyType()
        else:
            d = BaseType(rng.choice(KINDS))
        reg.define_type(label, d)
        labels.append(label)
    return reg


def rand_value(rng: random.Random, reg: TypeRegistry, label: str, depth: int = 0):
    """A value conforming to ``label``.  Constrained bases retry until the bound holds."""
    d = reg.resolve(label)
    if isinstance(d, BaseType):
        return rand_literal(rng, d.kind)
    if isinstance(d, ConstrainedBase):
        for _ in range(200):
            v = rand_literal(rng, d.base)
            if compare(v, d.op, d.literal):
                return v
        return d.literal if d.op in ("=", "<=", ">=") else _nudge(d)
    if isinstance(d, RecordType):
        return {n: rand_value(rng, reg, t, depth + 1) for n, t in d.fields}
    if isinstance(d, ListType):
        hi = d.min_count + 2 if d.max_count is None else d.max_count
        n = rng.randint(d.min_count, min(hi, d.min_count + (0 if depth > 3 else 2)))
        return [rand_value(rng, reg, d.element, depth + 1) for _ in range(n)]
    if isinstance(d, UnionType):
        alt = rng.choice(d.alternatives)
        return Tagged(alt, rand_value(rng, reg, alt, depth + 1))
    if isinstance(d, AnyType):
        return rand_literal(rng, rng.choice(KINDS))
    raise AssertionError(d)


def _nudge(d: ConstrainedBase):
    step = 1 if d.base == "int" else Decimal("0.01")
    return d.literal + step if d.op in (">", "!=") else d.literal - step


# -- schemas ---------------------------------------------------------------------------


def rand_schema(
    rng: random.Random,
    max_node_types: int = 6,
    mults=None,
    constraints: bool = True,
    groups: bool = True,
    props: bool = True,
    name: str = "s",
) -> TypedGraphSchema:
    """A valid schema: node types, hyper-edge types with random slots, constraints, groups."""
    schema = TypedGraphSchema(name, rand_registry(rng))
    payloads = list(KINDS) + ["date", "empty"] + list(schema.registry.labels())
    payloads = [p for p in payloads if p in schema.registry]
    n_nodes = rng.randint(1, max_node_types)
    nodes = [f"N{i}" for i in range(n_nodes)]
    for n in nodes:
        schema.add_node_type(n, rng.choice(payloads))
    for j in range(rng.randint(0, 5)):
        tail = rng.sample(nodes, rng.randint(0, min(2, n_nodes)))
        head = rng.sample(nodes, rng.randint(0 if tail else 1, min(2, n_nodes)))
        pick = (lambda: rng.choice(mults)) if mults else (lambda: rand_multiplicity(rng, 3))
        prop = rng.choice(payloads) if props and rng.random() < 0.3 else "empty"
        label = f"E{j}" if rng.random() < 0.8 else f"E{j}/x"
        schema.add_edge_type(label, {n: pick() for n in tail}, {n: pick() for n in head}, prop=prop)
    if constraints:
        for _ in range(rng.randint(0, 3)):
            c = _rand_constraint(rng, schema)
            if c is not None:
                schema.add_constraint(c)
    if groups and rng.random() < 0.5:
        shuffled = nodes[:]
        rng.shuffle(shuffled)
        cut = rng.randint(1, len(shuffled))
        parts = [shuffled[:cut], shuffled[cut:]] if cut < len(shuffled) else [shuffled]
        for i, members in enumerate(parts):
            aggs = []
            if rng.random() < 0.7:
                aggs.append(AggregateSpec(f"G{i}", "n", Count(members[0])))
            touching = [e.label for e in schema.edge_types.values() if set(members) & {n for _, n, _ in e.slots()}]
            if touching and rng.random() < 0.5:
                aggs.append(AggregateSpec(f"G{i}", "m", CountEdges(rng.choice(touching))))
            for m in members:
                if schema.registry.base_kind(schema.node_types[m].payload) in ("int", "decimal", "money"):
                    aggs.append(AggregateSpec(f"G{i}", "total", Sum(m, ())))
                    break
            schema.add_group(f"G{i}", members, aggs)
    return schema


def _rand_constraint(rng: random.Random, schema: TypedGraphSchema):
    roll = rng.random()
    nodes = list(schema.node_types)
    if roll < 0.3 and schema.edge_types:
        et = schema.edge_types[rng.choice(list(schema.edge_types))]
        labels = sorted(set(et.tail_labels) | set(et.head_labels))
        return UniquePer(et.label, tuple(rng.sample(labels, rng.randint(1, len(labels)))))
    if roll < 0.5:
        n = rng.choice(nodes)
        fields = schema.registry.resolve(schema.node_types[n].payload)
        if isinstance(fields, RecordType) and fields.fields:
            return UniqueProperty(n, (rng.choice(fields.names),))
        return UniqueProperty(n, ())
    if roll < 0.75:
        n = rng.choice(nodes)
        kind = schema.registry.base_kind(schema.node_types[n].payload)
        if kind in ("int", "decimal", "money"):
            return PropertyPredicate(n, (), rng.choice(("<", ">=", "!=")), rand_literal(rng, kind))
        return None
    recursive = [e for e in schema.edge_types.values() if e.recursive]
    if recursive:
        return Acyclic(rng.choice(recursive).label)
    return None


# -- instances -------------------------------------------------------------------------


def rand_batch(rng: random.Random, schema: TypedGraphSchema, max_nodes: int = 20, max_edges: int = 30):
    """Insert-only batch with conforming payloads and random edges of declared shape."""
    batch = MutationBatch()
    refs: dict[str, list] = {n: [] for n in schema.node_types}
    labels = list(schema.node_types)
    for i in range(rng.randint(0, max_nodes)):
        label = rng.choice(labels)
        payload = schema.node_types[label].payload
        value = rand_value(rng, schema.registry, payload)
        name = f"v{i}" if rng.random() < 0.8 else None
        refs[label].append(batch.insert_node(label, value, name=name))
    for _ in range(rng.randint(0, max_edges)):
        if not schema.edge_types:
            break
        et = schema.edge_types[rng.choice(list(schema.edge_types))]
        if any(not refs[n] for n, _ in et.tail + et.head):
            continue
        tail = {n: rng.choice(refs[n]) for n in et.tail_labels}
        head = {n: rng.choice(refs[n]) for n in et.head_labels}
        batch.insert_edge(et.label, tail, head, rand_value(rng, schema.registry, et.prop))
    return batch


def rand_raw_graph(rng: random.Random, schema: TypedGraphSchema, max_nodes: int = 20, max_edges: int = 30):
    """Nodes and edges as plain records, ids from 1, with no validation at all."""
    nodes = []
    by_label: dict[str, list[int]] = {n: [] for n in schema.node_types}
    for i in range(1, rng.randint(0, max_nodes) + 1):
        label = rng.choice(list(schema.node_types))
        nodes.append(InstanceNode(i, label, {}, f"v{i}"))
        by_label[label].append(i)
    edges = []
    for _ in range(rng.randint(0, max_edges)):
        if not schema.edge_types:
            break
        et = schema.edge_types[rng.choice(list(schema.edge_types))]
        if any(not by_label[n] for n, _ in et.tail + et.head):
            continue
        edges.append(
            InstanceEdge(
                len(edges) + 1,
                et.label,
                {},
                tuple((n, rng.choice(by_label[n])) for n in et.tail_labels),
                tuple((n, rng.choice(by_label[n])) for n in et.head_labels),
            )
        )
    return nodes, edges


def cardinality_oracle(schema: TypedGraphSchema, nodes, edges) -> set[tuple[int, str, str, int]]:
    """Brute force: ``(node, edge type, end, count)`` for every slot whose count is out of range."""
    bad = set()
    for node in nodes:
        for et in schema.edge_types.values():
            for end, slots, got in (("tail", et.tail, "tail"), ("head", et.head, "head")):
                for label, m in slots:
                    if label != node.type_label:
                        continue
                    count = sum(
                        1
                        for e in edges
                        if e.type_label == et.label
                        and any(lbl == label and n == node.id for lbl, n in getattr(e, got))
                    )
                    ok = count >= m.min and (m.max is None or count <= m.max)
                    if not ok:
                        bad.add((node.id, et.label, end, count))
    return bad


# -- hypothesis wrappers ---------------------------------------------------------------

randoms = st.randoms(use_true_random=False)
multiplicities = st.builds(
    lambda lo, span, unbounded: Multiplicity(lo, None if unbounded else lo + span),
    st.integers(0, 50),
    st.integers(0, 50),
    st.booleans(),
)


# -- trials shared with the acceptance suite -------------------------------------------

_VIOLATION_RE = re.compile(r"^(?P<edge>.+) \((?P<end>tail|head) (?P<label>\S+)\): found (?P<count>\d+), allowed")


def reported_cardinality(report) -> set[tuple[int, str, str, int]]:
    out = set()
    for issue in report.errors:
        if issue.code != "CardinalityViolation":
            continue
        m = _VIOLATION_RE.match(issue.detail)
        node_id = int(re.search(r"#(\d+)", issue.subject).group(1))
        out.add((node_id, m["edge"], m["end"], int(m["count"])))
    return out


def _edge_batch_insert(batch: MutationBatch, e: InstanceEdge, refs) -> None:
    batch.insert_edge(e.type_label, {lbl: refs(n) for lbl, n in e.tail}, {lbl: refs(n) for lbl, n in e.head})


def cardinality_trial(rng: random.Random) -> list[tuple[set, set]]:
    """Commit a random graph in two steps; return ``(oracle, engine)`` violation sets per step.

    The first step loads nodes plus part of the edges into an empty graph.  If
    that is accepted, a second batch inserts the remaining edges and deletes
    a random subset of the first ones, which exercises the incremental check.
    """
    schema = rand_schema(rng, 6, mults=MULTS, constraints=False, groups=False, props=False)
    nodes, edges = rand_raw_graph(rng, schema, 20, 30)
    cut = rng.randint(0, len(edges))
    base, extra = edges[:cut], edges[cut:]
    graph = new_graph(schema)
    batch = MutationBatch()
    refs = {}
    values = {}
    for n in nodes:
        values[n.id] = rand_value(rng, schema.registry, schema.node_types[n.type_label].payload)
        refs[n.id] = batch.insert_node(n.type_label, values[n.id])
    for e in base:
        _edge_batch_insert(batch, e, refs.__getitem__)
    results = []
    try:
        graph = graph.commit(batch)
        got: set = set()
    except CommitRejected as exc:
        got = reported_cardinality(exc.report)
    results.append((cardinality_oracle(schema, nodes, base), got))
    if got:
        return results
    doomed = {e.id for e in base if rng.random() < 0.3}
    step = MutationBatch()
    for eid in sorted(doomed):
        step.delete_edge(eid)
    for e in extra:
        _edge_batch_insert(step, e, lambda n: n)
    final = [e for e in base if e.id not in doomed] + extra
    try:
        graph.commit(step)
        got = set()
    except CommitRejected as exc:
        got = reported_cardinality(exc.report)
    results.append((cardinality_oracle(schema, nodes, final), got))
    return results


def _valid_graph(rng: random.Random):
    schema = rand_schema(rng, 5, mults=[Multiplicity(0, None), Multiplicity(0, 3)], constraints=False, groups=False)
    graph = new_graph(schema)
    for _ in range(20):
        try:
            return graph.commit(rand_batch(rng, schema, 12, 15))
        except CommitRejected:
            continue
    return graph


def _benign(rng: random.Random, graph, batch: MutationBatch, keep: frozenset = frozenset()) -> None:
    schema = graph.schema
    roll = rng.random()
    if roll < 0.4:
        label = rng.choice(list(schema.node_types))
        batch.insert_node(label, rand_value(rng, schema.registry, schema.node_types[label].payload))
    elif roll < 0.6 and graph.nodes:
        nid = rng.choice(sorted(graph.nodes))
        payload = schema.node_types[graph.nodes[nid].type_label].payload
        batch.update_node(nid, rand_value(rng, schema.registry, payload))
    elif roll < 0.8 and set(graph.edges) - keep:
        batch.delete_edge(rng.choice(sorted(set(graph.edges) - keep)))
    elif schema.edge_types:
        et = schema.edge_types[rng.choice(list(schema.edge_types))]
        by_label = {}
        for n in graph.nodes.values():
            by_label.setdefault(n.type_label, []).append(n.id)
        if all(by_label.get(lbl) for lbl, _ in et.tail + et.head):
            batch.insert_edge(
                et.label,
                {lbl: rng.choice(by_label[lbl]) for lbl in et.tail_labels},
                {lbl: rng.choice(by_label[lbl]) for lbl in et.head_labels},
                rand_value(rng, schema.registry, et.prop),
            )


def _pick_fault(rng: random.Random, graph) -> tuple[str, int | str | None]:
    choices = ["unknown-node-type", "unknown-edge-type", "update-missing", "delete-missing", "dangling"]
    attached = [n for n in graph.nodes if graph.incident_edges(n)]
    if attached:
        choices.append("delete-attached")
    typed = [n for n, nt in graph.schema.node_types.items() if not isinstance(graph.schema.registry.resolve(nt.payload), AnyType)]
    if typed:
        choices.append("bad-value")
    kind = rng.choice(choices)
    if kind == "bad-value":
        return kind, rng.choice(typed)
    return kind, rng.choice(attached) if kind == "delete-attached" else None


def _inject(graph, batch: MutationBatch, kind: str, target) -> str:
    """Stage one action that can never commit; returns a short description."""
    missing = max(graph.nodes, default=0) + 1000
    if kind == "unknown-node-type":
        batch.insert_node("NoSuchType", {})
    elif kind == "bad-value":
        batch.insert_node(target, {"bogus": object()})
    elif kind == "unknown-edge-type":
        batch.insert_edge("NoSuchEdge", [], [])
    elif kind == "update-missing":
        batch.update_node(missing, {})
    elif kind == "delete-missing":
        batch.delete_edge(missing)
    elif kind == "dangling":
        et = graph.schema.edge_types.get(next(iter(graph.schema.edge_types), None))
        if et is None:
            batch.delete_node(missing)
            return "delete-missing-node"
        batch.insert_edge(et.label, {lbl: missing for lbl in et.tail_labels}, {lbl: missing for lbl in et.head_labels})
    else:
        batch.delete_node(target)
    return kind


def atomicity_trial(rng: random.Random) -> tuple[bool, str]:
    """Apply a batch with at least one injected fault; True when nothing changed."""
    graph = _valid_graph(rng)
    before = print_instance(graph)
    before_report = print_violations(graph.check())
    batch = MutationBatch()
    actions = rng.randint(0, 8)
    at = rng.randint(0, actions)
    kind, target = _pick_fault(rng, graph)
    keep = frozenset(e.id for e in graph.incident_edges(target)) if isinstance(target, int) else frozenset()
    for i in range(actions + 1):
        if i == at:
            kind = _inject(graph, batch, kind, target)
        else:
            _benign(rng, graph, batch, keep)
    try:
        graph.commit(batch)
    except CommitRejected:
        pass
    else:
        return False, f"{kind}: commit accepted"
    same = print_instance(graph) == before and print_violations(graph.check()) == before_report
    return same, kind
