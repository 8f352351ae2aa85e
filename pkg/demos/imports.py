"""Relational tables and an XML document brought into typed graphs."""

from __future__ import annotations

from collections import Counter
from pathlib import Path

import typedgraph as tg
from typedgraph.bridges import relational, xsd

FIXTURES = Path(tg.__file__).parent / "fixtures"


def main() -> None:
    manifest = relational.parse_manifest((FIXTURES / "rst" / "rst.rman").read_text())
    schema = relational.import_relational_schema(manifest, "rst")
    rows = relational.read_table_files(manifest, FIXTURES / "rst")
    g = tg.new_graph(schema).commit(relational.import_relational_data(manifest, rows, schema))
    print(tg.print_schema(schema))
    for e in g.edges_of_type("RST"):
        print("offer:", [g.node(n).name for _, n in e.tail], e.value)

    subset = xsd.parse_xsd((FIXTURES / "bookstore.xsd").read_bytes())
    doc = (FIXTURES / "books.xml").read_bytes()
    graphs = {}
    for strategy in xsd.STRATEGIES:
        s = xsd.import_xsd(subset, strategy)
        graphs[strategy] = tg.new_graph(s).commit(xsd.import_xml_document(doc, subset, strategy))
        print(f"\n{strategy}: {len(graphs[strategy])} nodes, {len(graphs[strategy].edges)} edges")
    same = Counter(xsd.compact_pairs(graphs[xsd.COMPACT], subset)) == Counter(
        xsd.expanded_pairs(graphs[xsd.EXPANDED], subset)
    )
    print("both layouts carry the same (path, value) pairs:", same)


if __name__ == "__main__":
    main()
