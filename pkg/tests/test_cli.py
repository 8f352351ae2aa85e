from __future__ import annotations

import shutil
import subprocess
import sys

import pydot
import pytest

from conftest import FIXTURES
from typedgraph.cli import main
from typedgraph.store import new_graph
from typedgraph.text import parse_instance, parse_schema


def fx(name: str) -> str:
    return str(FIXTURES / name)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_ok_and_quiet(capsys):
    code, out, _ = run(capsys, "validate", fx("review.tgs"), fx("billy.tgi"))
    assert (code, out) == (0, "OK (0 violations)\n")
    code, out, _ = run(capsys, "validate", "--quiet", fx("review.tgs"), fx("billy.tgi"))
    assert (code, out) == (0, "")
    assert run(capsys, "--quiet", "validate", fx("review.tgs"))[:2] == (0, "")


def test_validate_violations(capsys):
    code, out, _ = run(capsys, "validate", fx("review.tgs"), fx("orphan_review.tgi"))
    assert code == 1
    assert out.splitlines() == [
        "CardinalityViolation Review#1(r1): review_of (tail Review): found 0, allowed 1..1",
        "CardinalityViolation Review#1(r1): wrote_review (head Review): found 0, allowed 1..1",
    ]


def test_usage_and_missing_files(capsys, tmp_path):
    assert run(capsys, "validate", str(tmp_path / "nope.tgs"))[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    bad = tmp_path / "bad.tgs"
    bad.write_text("schema x { node A : int")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 2 and f"{bad}:1:" in err


def test_invalid_schema_is_a_violation(capsys, tmp_path):
    bad = tmp_path / "bad.tgs"
    bad.write_text("schema x { node A : Missing }")
    code, out, _ = run(capsys, "validate", str(bad))
    assert code == 1 and out.startswith("UnknownTypeLabel")


def test_query_modes(capsys):
    args = (fx("bom.tgs"), fx("bom.tgi"))
    assert run(capsys, "query", *args, "leg", "contains", "where-used")[:2] == (0, "table\n")
    assert run(capsys, "query", *args, "drawer", "contains", "where-used")[:2] == (0, "table\ntabletop\n")
    assert run(capsys, "query", *args, "table", "contains", "neighbors-along")[:2] == (0, "leg\ntabletop\n")
    assert run(capsys, "query", *args, "drawer", "contains", "neighbors-against")[:2] == (0, "tabletop\n")
    assert run(capsys, "query", *args, "ghost", "contains", "where-used")[0] == 2
    assert run(capsys, "query", *args, "leg", "nope", "where-used")[0] == 2


def test_import_relational(capsys, tmp_path):
    prefix = tmp_path / "out" / "rst"
    code, out, _ = run(capsys, "import", "relational", fx("rst/rst.rman"), fx("rst"), "-o", str(prefix))
    assert code == 0 and out == "OK (0 violations)\n"
    schema = parse_schema((tmp_path / "out" / "rst.tgs").read_text())
    assert schema.name == "rst" and schema.edge_types["RST"].arity == 3
    g = new_graph(schema).commit(parse_instance((tmp_path / "out" / "rst.tgi").read_text(), schema))
    assert len(g.edges_of_type("RST")) == 3
    assert run(capsys, "validate", str(prefix) + ".tgs", str(prefix) + ".tgi")[0] == 0


def test_import_relational_delimiter_and_errors(capsys, tmp_path):
    data = tmp_path / "data"
    data.mkdir()
    for name in ("Table1.csv", "Table2.csv"):
        text = (FIXTURES / "fk" / name).read_text()
        if name == "Table1.csv":
            text = text.replace(",1\n", ",7\n").replace('"[""x"", ""y""]"', "[]")
        (data / name).write_text(text.replace(",", ";"))
    code, out, _ = run(capsys, "import", "relational", fx("fk/fk.rman"), str(data), "--delimiter", ";")
    assert code == 1 and "FkTargetMissing" in out
    assert run(capsys, "import", "relational", fx("fk/fk.rman"))[0] == 2
    assert run(capsys, "import", "relational", fx("fk/fk.rman"), str(tmp_path / "none"))[0] == 2


def test_import_xml(capsys, tmp_path):
    code, out, _ = run(capsys, "import", "xml", fx("bookstore.xsd"), fx("books.xml"))
    assert code == 0 and out.startswith("schema bookstore {") and "graph bookstore uses bookstore" in out
    prefix = tmp_path / "bx"
    code, _, _ = run(capsys, "import", "xml", fx("bookstore.xsd"), fx("books.xml"), "--strategy", "expanded", "-o", str(prefix))
    assert code == 0
    assert run(capsys, "validate", str(prefix) + ".tgs", str(prefix) + ".tgi")[0] == 0
    assert run(capsys, "import", "xml", fx("bookstore.xsd"), fx("book_missing_author.xml"))[0] == 1
    assert run(capsys, "import", "xml", fx("choice.xsd"), fx("books.xml"))[0] == 2


def test_abstract(capsys, tmp_path):
    code, out, _ = run(capsys, "abstract", fx("enterprise.tgs"), fx("enterprise.tgi"))
    assert code == 0 and 'edge "orders/from" tail (Sales[0..*]) head (Purchasing[0..*])' in out
    assert run(capsys, "abstract", fx("review.tgs"))[0] == 2
    prefix = tmp_path / "abs"
    assert run(capsys, "abstract", fx("enterprise.tgs"), "-o", str(prefix))[0] == 0
    assert (tmp_path / "abs.tgs").exists() and not (tmp_path / "abs.tgi").exists()


def test_export_dot(capsys, tmp_path):
    code, out, _ = run(capsys, "export-dot", fx("bom.tgs"))
    assert code == 0
    pydot.graph_from_dot_data(out)
    target = tmp_path / "bom.dot"
    assert run(capsys, "export-dot", fx("bom.tgi"), "-o", str(target))[0] == 0
    assert pydot.graph_from_dot_data(target.read_text())
    assert run(capsys, "export-dot", fx("billy.tgi"), "--schema", fx("review.tgs"))[0] == 0
    assert run(capsys, "export-dot", fx("orphan_review.tgi"), "--schema", fx("review.tgs"))[0] == 1


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "typedgraph", "validate", fx("review.tgs"), fx("billy.tgi")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout == "OK (0 violations)\n"


@pytest.mark.skipif(shutil.which("typedgraph") is None, reason="console script not on PATH")
def test_console_script():
    proc = subprocess.run(["typedgraph", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "export-dot" in proc.stdout
