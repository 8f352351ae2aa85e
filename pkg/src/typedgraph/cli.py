"""Command-line front end.

Exit codes: 0 when everything checked is valid, 1 when violations were
found, 2 for usage, input/output and parse errors.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
import tempfile
from pathlib import Path

from .abstraction import abstract_instance, abstract_schema
from .bridges import relational, xsd
from .dot import instance_to_dot, schema_to_dot
from .errors import (
    CommitRejected,
    DataImportError,
    InvalidPartition,
    ManifestInvalid,
    ParseError,
    TypedGraphError,
    UnknownLabel,
    UnknownNode,
    UnsupportedXsdFeature,
)
from .report import Report
from .schema import TypedGraphSchema
from .store import AGAINST, ALONG, TypedGraph, new_graph
from .text import parse_instance, parse_schema, print_instance, print_schema, print_violations
from .text.printer import node_symbol

OK, VIOLATIONS, FAILURE = 0, 1, 2
QUERY_MODES = ("neighbors-along", "neighbors-against", "where-used")


class UsageFailure(Exception):
    """Anything that maps to exit code 2; the message goes to stderr."""


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageFailure(f"{path}: cannot read: {exc}") from None


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _diagnostics(path: str, exc: ParseError) -> str:
    return "\n".join(f"{path}:{d}" for d in exc.diagnostics)


def _load_schema(path: str, validate: bool = True) -> TypedGraphSchema:
    try:
        return parse_schema(_read(path), validate=validate)
    except ParseError as exc:
        raise UsageFailure(_diagnostics(path, exc)) from None


def _load_graph(schema: TypedGraphSchema, path: str) -> tuple[TypedGraph | None, Report]:
    """Commit an instance file into a fresh graph; a rejected commit returns its report."""
    try:
        batch = parse_instance(_read(path), schema)
    except ParseError as exc:
        raise UsageFailure(_diagnostics(path, exc)) from None
    try:
        graph = new_graph(schema).commit(batch)
    except CommitRejected as exc:
        return None, exc.report
    return graph, graph.check()


def _resolve_schema(instance_path: str) -> str:
    """Schema file for an instance: same stem, else the name after ``uses``."""
    p = Path(instance_path)
    sibling = p.with_suffix(".tgs")
    if sibling.exists():
        return str(sibling)
    m = re.search(r"\buses\s+([A-Za-z_][A-Za-z0-9_]*)", _read(instance_path))
    if m:
        named = p.parent / f"{m.group(1)}.tgs"
        if named.exists():
            return str(named)
    raise UsageFailure(f"{instance_path}: cannot find its schema; pass --schema")


def _schema_name(prefix: str) -> str:
    name = re.sub(r"[^A-Za-z0-9_]", "_", Path(prefix).name) or "imported"
    return name if name[0].isalpha() else "s" + name


class _Out:
    def __init__(self, args):
        self.quiet = args.quiet

    def report(self, report: Report) -> int:
        text = print_violations(report)
        if self.quiet:
            text = "".join(line + "\n" for line in text.splitlines() if not line.startswith("OK"))
        sys.stdout.write(text)
        return OK if report.ok else VIOLATIONS


def _emit(prefix: str | None, schema_text: str, instance_text: str | None) -> None:
    if prefix is None:
        sys.stdout.write(schema_text)
        if instance_text is not None:
            sys.stdout.write("\n" + instance_text)
        return
    _write_atomic(Path(prefix + ".tgs"), schema_text)
    if instance_text is not None:
        _write_atomic(Path(prefix + ".tgi"), instance_text)


# -- subcommands -----------------------------------------------------------------------


def cmd_validate(args) -> int:
    out = _Out(args)
    schema = _load_schema(args.schema, validate=False)
    report = schema.validate()
    if not report.ok or args.instance is None:
        return out.report(report)
    _, report = _load_graph(schema, args.instance)
    return out.report(report)


def cmd_import(args) -> int:
    out = _Out(args)
    prefix = args.output
    name = _schema_name(prefix if prefix else Path(args.inputs[0]).stem)
    try:
        if args.kind == "relational":
            if len(args.inputs) != 2:
                raise UsageFailure("import relational needs MANIFEST DATA_DIR")
            manifest_path, data_dir = args.inputs
            manifest = relational.parse_manifest(_read(manifest_path))
            schema = relational.import_relational_schema(manifest, name)
            if not Path(data_dir).is_dir():
                raise UsageFailure(f"{data_dir}: not a directory")
            rows = relational.read_table_files(manifest, data_dir, args.delimiter)
            batch = relational.import_relational_data(manifest, rows, schema)
        else:
            if len(args.inputs) != 2:
                raise UsageFailure("import xml needs SCHEMA.xsd DOCUMENT.xml")
            xsd_path, doc_path = args.inputs
            subset = xsd.parse_xsd(_read(xsd_path).encode("utf-8"))
            schema = xsd.import_xsd(subset, args.strategy, not args.no_ordinals)
            schema.name = name
            batch = xsd.import_xml_document(_read(doc_path).encode("utf-8"), subset, args.strategy, not args.no_ordinals)
    except ParseError as exc:
        raise UsageFailure(_diagnostics(args.inputs[0], exc)) from None
    except (ManifestInvalid, UnsupportedXsdFeature) as exc:
        raise UsageFailure(f"{args.inputs[0]}: {exc}") from None
    except DataImportError as exc:
        return out.report(exc.report)
    except OSError as exc:
        raise UsageFailure(str(exc)) from None
    try:
        graph = new_graph(schema).commit(batch)
    except CommitRejected as exc:
        return out.report(exc.report)
    _emit(prefix, print_schema(schema), print_instance(graph, name))
    return out.report(graph.check()) if prefix else OK


def cmd_abstract(args) -> int:
    out = _Out(args)
    schema = _load_schema(args.schema)
    try:
        target = abstract_schema(schema)
        graph = None
        if args.instance is not None:
            source, report = _load_graph(schema, args.instance)
            if source is None:
                return out.report(report)
            graph = abstract_instance(source)
    except (InvalidPartition, UnknownLabel) as exc:
        raise UsageFailure(f"{args.schema}: {exc}") from None
    instance_text = None if graph is None else print_instance(graph, target.name)
    _emit(args.output, print_schema(target), instance_text)
    return OK


def cmd_export_dot(args) -> int:
    text = _read(args.path)
    if text.lstrip().startswith("graph"):
        schema = _load_schema(args.schema or _resolve_schema(args.path))
        graph, report = _load_graph(schema, args.path)
        if graph is None:
            sys.stderr.write(print_violations(report))
            return VIOLATIONS
        dot = instance_to_dot(graph, Path(args.path).stem)
    else:
        dot = schema_to_dot(_load_schema(args.path))
    if args.output:
        _write_atomic(Path(args.output), dot)
    else:
        sys.stdout.write(dot)
    return OK


def cmd_query(args) -> int:
    schema = _load_schema(args.schema)
    graph, report = _load_graph(schema, args.instance)
    if graph is None:
        sys.stderr.write(print_violations(report))
        return VIOLATIONS
    if args.edge_type not in schema.edge_types:
        raise UsageFailure(f"unknown edge type {args.edge_type!r}")
    try:
        node = graph.find(args.node)
    except UnknownNode:
        raise UsageFailure(f"unknown node {args.node!r}") from None
    if args.mode == "where-used":
        found = graph.where_used(node, args.edge_type)
    else:
        direction = ALONG if args.mode == "neighbors-along" else AGAINST
        found = graph.neighbors(node, args.edge_type, direction)
    for sym in sorted(node_symbol(graph, n) for n in found):
        print(sym)
    return OK


# -- argument parsing ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS, help="suppress OK lines")
    common.add_argument(
        "--delimiter", default=argparse.SUPPRESS, help="field separator of relational data files (default ',')"
    )

    parser = argparse.ArgumentParser(prog="typedgraph", description="Typed property hypergraphs.")
    parser.add_argument("--quiet", action="store_true", help="suppress OK lines")
    parser.add_argument("--delimiter", default=",", help="field separator of relational data files (default ',')")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("validate", parents=[common], help="check a schema, and optionally an instance against it")
    p.add_argument("schema")
    p.add_argument("instance", nargs="?")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("import", parents=[common], help="import relational tables or an XML document")
    p.add_argument("kind", choices=("relational", "xml"))
    p.add_argument("inputs", nargs="+", metavar="INPUT", help="MANIFEST DATA_DIR, or SCHEMA.xsd DOCUMENT.xml")
    p.add_argument("--strategy", choices=xsd.STRATEGIES, default=xsd.COMPACT)
    p.add_argument("--no-ordinals", action="store_true", help="expanded XML: omit the sibling ordinal")
    p.add_argument("-o", "--output", metavar="PREFIX", help="write PREFIX.tgs and PREFIX.tgi")
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("abstract", parents=[common], help="condense schema groups into hyper-nodes")
    p.add_argument("schema")
    p.add_argument("instance", nargs="?")
    p.add_argument("-o", "--output", metavar="PREFIX", help="write PREFIX.tgs (and PREFIX.tgi)")
    p.set_defaults(func=cmd_abstract)

    p = sub.add_parser("export-dot", parents=[common], help="write a Graphviz diagram of a schema or instance")
    p.add_argument("path")
    p.add_argument("--schema", help="schema of an instance file (default: found next to it)")
    p.add_argument("-o", "--output", metavar="FILE")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("query", parents=[common], help="traverse an instance from one node")
    p.add_argument("schema")
    p.add_argument("instance")
    p.add_argument("node", help="node symbol")
    p.add_argument("edge_type")
    p.add_argument("mode", choices=QUERY_MODES)
    p.set_defaults(func=cmd_query)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else FAILURE
    try:
        return args.func(args)
    except UsageFailure as exc:
        print(exc, file=sys.stderr)
        return FAILURE
    except TypedGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILURE


if __name__ == "__main__":
    sys.exit(main())
