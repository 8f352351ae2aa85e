"""Exception hierarchy.

Builder operations raise; whole-structure checks (registry, schema, graph)
return a :class:`~typedgraph.report.Report` instead.
"""

from __future__ import annotations


class TypedGraphError(Exception):
    """Base class for every error raised by this package."""


class DuplicateTypeLabel(TypedGraphError, ValueError):
    pass


class ReservedLabel(TypedGraphError, ValueError):
    pass


class DanglingReference(TypedGraphError, LookupError):
    pass


class DuplicateNodeType(TypedGraphError, ValueError):
    pass


class DuplicateEdgeType(TypedGraphError, ValueError):
    pass


class LabelClash(TypedGraphError, ValueError):
    """A label is already used in the other (node/edge) namespace."""


class EmptyEndpointSets(TypedGraphError, ValueError):
    pass


class MultiplicityMismatch(TypedGraphError, ValueError):
    pass


class EmptyList(TypedGraphError, ValueError):
    pass


class SchemaFrozen(TypedGraphError, RuntimeError):
    """Raised when mutating a schema that is already bound to a graph."""


class InvalidSchema(TypedGraphError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"schema has {len(report.errors)} error(s)")


class UnknownNode(TypedGraphError, LookupError):
    pass


class UnknownEdgeType(TypedGraphError, LookupError):
    pass


class UnknownLabel(TypedGraphError, LookupError):
    pass


class InvalidPartition(TypedGraphError, ValueError):
    pass


class CommitRejected(TypedGraphError):
    """A mutation batch failed validation; the graph was left unchanged."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"commit rejected with {len(report.errors)} violation(s)")


class ParseError(TypedGraphError):
    """Carries every diagnostic produced while parsing a text document."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else None
        super().__init__(str(first) if first else "parse error")


class ManifestInvalid(TypedGraphError, ValueError):
    pass


class DataImportError(TypedGraphError):
    """Source rows or documents do not fit the imported schema."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"import failed with {len(report.errors)} problem(s)")


class UnsupportedXsdFeature(TypedGraphError, ValueError):
    pass


class DocumentSchemaMismatch(DataImportError):
    pass


class DuplicateGroup(TypedGraphError, ValueError):
    pass
