"""In-memory typed property hypergraphs.

A :class:`TypedGraphSchema` declares data types, node types, hyper-edge types
with per-slot multiplicities, and constraints.  A :class:`TypedGraph` holds
instance data and only changes through :meth:`TypedGraph.commit`, which
applies a :class:`MutationBatch` atomically or not at all.
"""

from .abstraction import CombinedEdge, Partition, abstract_instance, abstract_schema, combined_edges
from .datatypes import (
    AnyType,
    BaseType,
    ConstrainedBase,
    ListType,
    RecordType,
    Tagged,
    TypeRef,
    TypeRegistry,
    UnionType,
)
from .errors import (
    CommitRejected,
    DataImportError,
    DocumentSchemaMismatch,
    InvalidPartition,
    InvalidSchema,
    ManifestInvalid,
    ParseError,
    TypedGraphError,
    UnsupportedXsdFeature,
)
from .report import Issue, Report
from .schema import (
    Acyclic,
    AggregateSpec,
    Count,
    CountEdges,
    EdgeType,
    Multiplicity,
    NodeType,
    PropertyPredicate,
    Sum,
    TypedGraphSchema,
    UniquePer,
    UniqueProperty,
    most_general_multiplicity,
)
from .store import MutationBatch, TypedGraph, check_graph, new_graph
from .text import parse_instance, parse_schema, print_instance, print_schema, print_violations

__all__ = [
    "Acyclic",
    "AggregateSpec",
    "AnyType",
    "BaseType",
    "CombinedEdge",
    "CommitRejected",
    "ConstrainedBase",
    "Count",
    "CountEdges",
    "DataImportError",
    "DocumentSchemaMismatch",
    "EdgeType",
    "InvalidPartition",
    "InvalidSchema",
    "Issue",
    "ListType",
    "ManifestInvalid",
    "Multiplicity",
    "MutationBatch",
    "NodeType",
    "ParseError",
    "Partition",
    "PropertyPredicate",
    "RecordType",
    "Report",
    "Sum",
    "Tagged",
    "TypeRef",
    "TypeRegistry",
    "TypedGraph",
    "TypedGraphError",
    "TypedGraphSchema",
    "UnionType",
    "UniquePer",
    "UniqueProperty",
    "UnsupportedXsdFeature",
    "abstract_instance",
    "abstract_schema",
    "check_graph",
    "combined_edges",
    "most_general_multiplicity",
    "new_graph",
    "parse_instance",
    "parse_schema",
    "print_instance",
    "print_schema",
    "print_violations",
]
