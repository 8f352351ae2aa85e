"""Theatre reviews: one valid commit and three attempts the schema refuses."""

from __future__ import annotations

from pathlib import Path

import typedgraph as tg

FIXTURES = Path(tg.__file__).parent / "fixtures"


def attempt(graph: tg.TypedGraph, batch: tg.MutationBatch, what: str) -> tg.TypedGraph:
    try:
        graph = graph.commit(batch)
        print(f"{what}: committed, graph now has {len(graph)} nodes")
    except tg.CommitRejected as exc:
        print(f"{what}: rejected")
        print("  " + tg.print_violations(exc.report).rstrip().replace("\n", "\n  "))
    return graph


def main() -> None:
    schema = tg.parse_schema((FIXTURES / "review.tgs").read_text())
    empty = tg.new_graph(schema)

    g = attempt(empty, tg.parse_instance((FIXTURES / "billy.tgi").read_text(), schema), "Billy's review")
    attempt(empty, tg.parse_instance((FIXTURES / "orphan_review.tgi").read_text(), schema), "review with no author or play")

    again = tg.MutationBatch()
    r = again.insert_node("Review", {"rating": 2, "date": {"day": 1, "month": 8, "year": 2012}})
    again.insert_edge("wrote_review", [g.find("billy")], [r])
    again.insert_edge("review_of", [r], [g.find("hamlet")])
    attempt(g, again, "Billy reviews Hamlet twice")

    lone = tg.MutationBatch()
    lone.insert_node("Performance", {"title": "Macbeth"})
    attempt(empty, lone, "a play nobody reviewed")


if __name__ == "__main__":
    main()
