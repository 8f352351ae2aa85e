"""Where-used lists over a recursive containment edge, before and after sharing a part."""

from __future__ import annotations

from pathlib import Path

import typedgraph as tg

FIXTURES = Path(tg.__file__).parent / "fixtures"


def where_used(graph: tg.TypedGraph, part: str) -> list[str]:
    return sorted(graph.node(n).name for n in graph.where_used(graph.find(part), "contains"))


def share_screw(graph: tg.TypedGraph) -> tg.MutationBatch:
    b = tg.MutationBatch()
    screw = b.insert_node("Part", {"partNo": "S-1", "name": "screw"}, "screw")
    b.insert_edge("contains", [graph.find("leg")], [screw], {"quantity": 2})
    b.insert_edge("contains", [graph.find("drawer")], [screw], {"quantity": 4})
    return b


def main() -> None:
    schema = tg.parse_schema((FIXTURES / "bom.tgs").read_text())
    g = tg.new_graph(schema).commit(tg.parse_instance((FIXTURES / "bom.tgi").read_text(), schema))
    for part in ("leg", "drawer", "mounting"):
        print(f"{part} is used in {where_used(g, part)}")

    try:
        g.commit(share_screw(g))
    except tg.CommitRejected as exc:
        print("one screw in two assemblies, head 0..1:", exc.report.codes())

    relaxed = schema.with_multiplicity("contains", "head", "Part", tg.Multiplicity(0, None))
    g2 = tg.TypedGraph(relaxed, g.nodes.values(), g.edges.values()).commit(share_screw(g))
    print(f"with head 0..*: screw is used in {where_used(g2, 'screw')}")


if __name__ == "__main__":
    main()
