import glob
import io
import json
import os

import pytest

from lietower import cli
from lietower.exprs import ParseError

FILES = os.path.join(os.path.dirname(__file__), "..", "demos", "files")

REMARK_TEXT = """\
kind: dgl

[generators]
x : 0
y : 0
z : 1

[differential]
d z = x - [y, x]
"""


def shipped_files():
    return sorted(glob.glob(os.path.join(FILES, "*")))


def test_parse_remark_document():
    doc = cli.parse(REMARK_TEXT)
    assert doc.kind == "dgl"
    assert doc.gens == [("x", 0), ("y", 0), ("z", 1)]
    P = doc.to_dgl()
    assert "z" in P.diff


def test_parse_rejects_empty_generators():
    with pytest.raises(ParseError) as err:
        cli.parse("kind: dgl\n[generators]\n")
    assert "no generators" in err.value.message


def test_parse_locates_syntax_errors():
    text = "kind: dgl\n[generators]\nx : 0\nz : 1\n[differential]\nd z = [x\n"
    with pytest.raises(ParseError) as err:
        cli.parse(text)
    assert err.value.line == 6


def test_parse_rejects_unknown_name():
    text = "kind: dgl\n[generators]\nx : 0\nz : 1\n[differential]\nd z = w\n"
    with pytest.raises(ParseError) as err:
        cli.parse(text)
    assert "unknown name" in err.value.message
    assert err.value.line == 6


def test_parse_rejects_duplicate_name():
    text = "kind: dgl\n[generators]\nx : 0\nx : 1\n"
    with pytest.raises(ParseError) as err:
        cli.parse(text)
    assert "duplicate" in err.value.message


def test_parse_rejects_unknown_section():
    with pytest.raises(ParseError):
        cli.parse("kind: dgl\n[generators]\nx : 0\n[brackets]\n")


def test_round_trip_on_shipped_files():
    assert len(shipped_files()) >= 5
    for path in shipped_files():
        text = open(path).read()
        doc = cli.parse(text)
        again = cli.parse(doc.pretty())
        assert doc == again, path
        assert cli.parse(again.pretty()) == again


def run_cli(args):
    import sys
    from contextlib import redirect_stdout

    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.main(args)
    return code, buf.getvalue()


def test_cli_validate_success():
    path = os.path.join(FILES, "stubborn_cycle.dgl")
    code, out = run_cli(["validate", path])
    assert code == 0
    assert "valid" in out


def test_cli_tower_remark():
    path = os.path.join(FILES, "stubborn_cycle.dgl")
    code, out = run_cli(
        ["tower", path, "--degrees", "0..1", "--tower", "2..6", "--max-length", "6"]
    )
    assert code == 0
    assert "dim H = 1" in out
    assert "reps: y" in out


def test_cli_tower_structured_deterministic():
    path = os.path.join(FILES, "stubborn_cycle.dgl")
    args = ["tower", path, "--degrees", "0..0", "--tower", "2..5", "--max-length", "5",
            "--format", "structured"]
    code1, out1 = run_cli(args)
    code2, out2 = run_cli(args)
    assert code1 == code2 == 0
    assert out1 == out2  # byte identical
    payload = json.loads(out1)
    rows = payload["reports"][0]["rows"]
    assert [r["dim_H"] for r in rows] == [1, 1, 1, 1]
    assert payload["reports"][0]["stabilized_from"] == 2
    assert set(rows[0]) == {"n", "dim_H", "dim_image", "representatives"}


def test_cli_pronil_affine_fails():
    path = os.path.join(FILES, "affine_line.lietable")
    code, out = run_cli(["pronil", path])
    assert code == 0
    assert "fails" in out
    code, out = run_cli(["pronil", path, "--format", "structured"])
    payload = json.loads(out)
    assert payload["audit"]["combined"]["outcome"] == "fails"
    assert payload["audit"]["condition_a"]["outcome"] == "fails"
    assert payload["definitional"]["outcome"] == "fails"


def test_cli_pronil_heisenberg_holds():
    path = os.path.join(FILES, "heisenberg.lietable")
    code, out = run_cli(["pronil", path, "--format", "structured"])
    assert code == 0
    payload = json.loads(out)
    assert payload["audit"]["combined"]["outcome"] == "holds"


def test_cli_homology_rejects_degree0(tmp_path):
    path = os.path.join(FILES, "stubborn_cycle.dgl")
    code, out = run_cli(["homology", path])
    assert code == 2


def test_cli_homology_on_positive_degrees(tmp_path):
    text = "kind: dgl\n\n[generators]\nu1 : 1\nu3 : 3\n\n[differential]\nd u3 = [u1, u1]\n"
    p = tmp_path / "model.dgl"
    p.write_text(text)
    code, out = run_cli(["homology", str(p), "--degrees", "1..4", "--format", "structured"])
    assert code == 0
    payload = json.loads(out)
    assert [r["dim_H"] for r in payload["rows"]] == [1, 0, 0, 1]


def test_cli_neisendorfer_heisenberg():
    path = os.path.join(FILES, "heisenberg.sullivan")
    code, out = run_cli(
        ["neisendorfer", path, "--degrees", "0..0", "--tower", "4..8",
         "--max-length", "8", "--max-degree", "3", "--format", "structured"]
    )
    assert code == 0
    payload = json.loads(out)
    rows = payload["reports"][0]["rows"]
    assert [r["dim_H"] for r in rows] == [3, 3, 3, 3, 3]
    assert payload["audit"]["combined"]["outcome"] == "holds"
    # the emitted model is itself a parseable dgl document
    model_doc = cli.parse(payload["model"])
    assert model_doc.kind == "dgl"
    assert cli.parse(model_doc.pretty()) == model_doc


def test_cli_duality_sphere():
    path = os.path.join(FILES, "even_sphere.sullivan")
    code, out = run_cli(["duality", path, "--max-degree", "6", "--max-length", "3"])
    assert code == 0
    assert "ok" in out


def test_cli_lemma2_sphere():
    path = os.path.join(FILES, "even_sphere.sullivan")
    code, out = run_cli(["lemma2", path, "--degrees", "1..4", "--format", "structured"])
    assert code == 0
    payload = json.loads(out)
    assert [r["dim_H"] for r in payload["report"]["rows"]] == [1, 1, 0, 0]


def test_cli_boundary_remark():
    path = os.path.join(FILES, "stubborn_cycle.dgl")
    code, out = run_cli(
        ["boundary", path, "--target", "x", "--max-length", "6",
         "--certify-lengths", "1..5", "--format", "structured"]
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["result"]["status"] == "SAT"
    assert payload["no_witness_within_bound"] is True
    code, out = run_cli(["boundary", path, "--target", "x", "--max-length", "6", "--exact"])
    assert code == 0
    assert "UNSAT" in out


def test_cli_validate_coalgebra():
    path = os.path.join(FILES, "projective_plane.coalgebra")
    code, out = run_cli(["validate", path])
    assert code == 0


def test_cli_parse_error_exit_code(tmp_path):
    p = tmp_path / "broken.dgl"
    p.write_text("kind: dgl\n[generators]\nx 0\n")
    code, out = run_cli(["validate", str(p)])
    assert code == 2


def test_cli_invalid_dgl_exit_code(tmp_path):
    p = tmp_path / "bad.dgl"
    p.write_text("kind: dgl\n[generators]\ny : 1\nz : 1\n[differential]\nd z = y\n")
    code, out = run_cli(["validate", str(p)])
    assert code == 2


def test_cli_out_flag(tmp_path):
    path = os.path.join(FILES, "affine_line.lietable")
    target = tmp_path / "report.json"
    code, _ = run_cli(["pronil", path, "--format", "structured", "--out", str(target)])
    assert code == 0
    payload = json.loads(target.read_text())
    assert payload["command"] == "pronil"


def test_document_pretty_is_canonical():
    doc = cli.parse(REMARK_TEXT)
    assert doc.pretty() == cli.parse(doc.pretty()).pretty()
