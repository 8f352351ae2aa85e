"""Condense the enterprise model into three department hyper-nodes."""

from __future__ import annotations

from pathlib import Path

import typedgraph as tg

FIXTURES = Path(tg.__file__).parent / "fixtures"


def main() -> None:
    schema = tg.parse_schema((FIXTURES / "enterprise.tgs").read_text())
    g = tg.new_graph(schema).commit(tg.parse_instance((FIXTURES / "enterprise.tgi").read_text(), schema))
    for ce in tg.combined_edges(schema):
        print(f"{ce.tail_group} -> {ce.head_group}: {', '.join(ce.sources)}")
    overview = tg.abstract_instance(g)
    print()
    print(tg.print_schema(overview.schema))
    print(tg.print_instance(overview, "overview"))


if __name__ == "__main__":
    main()
