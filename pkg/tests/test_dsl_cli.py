import json
import pathlib
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from dgloc.cli import main
from dgloc.constructions import cylinder, iv, kv, kvw, lv, qv
from dgloc.dsl import DSquaredError, ParseError, parse_morphism, parse_presentation, print_presentation, tokenize
from dgloc.fields import GF, QQ

GOLDEN = pathlib.Path(__file__).parent / "golden"

QV_TEXT = "obj O1 O2\ngen v : O1 -> O2 deg 0\ngen w : O2 -> O1 deg 0\ngen u : O2 -> O2 deg 1\nd u = v.w - 1_O2"


def test_parses_qv_text():
    P = parse_presentation(QV_TEXT)
    assert P.structurally_equal(qv())


def test_empty_generator_list():
    P = parse_presentation("obj A B\n")
    assert P.objects == ("A", "B") and not P.generators


@pytest.mark.parametrize("text, line, col, fragment", [
    ("d u = v.w", 1, 3, "unknown generator 'u'"),
    ("obj O1\ngen v : O1 -> O2 deg 0", 2, 15, "unknown object"),
    ("obj A\ngen x : A -> A deg 0 $", 2, 22, "unexpected character"),
    ("obj A\ngen x : A -> A deg", 2, 19, "expected int"),
    ("obj A B\ngen x : A -> B deg 1\ngen y : B -> A deg 0\nd x = y", 4, 7, "must run A -> B"),
    ("obj A\ngen x : A -> A deg 1\nd x = x", 3, 7, "needs degree 0"),
    ("obj A\ngen x : A -> A deg 1\nd x = 2 x", 3, 9, "expected '*'"),
    ("obj A\nfrobnicate", 2, 1, "unknown statement"),
])
def test_positioned_errors(text, line, col, fragment):
    with pytest.raises(ParseError) as exc:
        parse_presentation(text)
    assert (exc.value.line, exc.value.column) == (line, col)
    assert fragment in exc.value.message


def test_d_squared_rejected_with_residue():
    text = "obj X\ngen e : X -> X deg -1\ngen a : X -> X deg 0\ngen c : X -> X deg 1\nd a = e\nd c = a"
    with pytest.raises(DSquaredError) as exc:
        parse_presentation(text)
    assert "d(d(c)) = e" in str(exc.value)
    assert parse_presentation(text, check=False).generators["c"].degree == 1


def test_coefficients_and_comments():
    text = "field F3  # ternary\nobj A\ngen x : A -> A deg 1\ngen y : A -> A deg 0\nd x = 2*y - 1/2*y + 2 1_A"
    P = parse_presentation(text)
    F = GF(3)
    assert P.field == F
    # 2 - 1/2 = 2 - 2 = 0 in F3
    assert P.differential["x"] == P.identity("A").scale(2)


def test_parse_morphism():
    P = qv()
    assert parse_morphism(P, "v.w - 1_O2") == P.differential["u"]
    with pytest.raises(ParseError):
        parse_morphism(P, "v.v")


PRESETS = [kv, kvw, qv, lv, iv]


@pytest.mark.parametrize("build", PRESETS, ids=lambda b: b.__name__)
@pytest.mark.parametrize("n", [0, 1])
def test_golden_round_trip(build, n):
    P = build(n, QQ)
    text = print_presentation(P)
    assert text == (GOLDEN / f"{build.__name__}_{n}.dgp").read_text()
    back = parse_presentation(text)
    assert back.structurally_equal(P)
    assert print_presentation(back) == text


def test_golden_cylinder_round_trip():
    text = (GOLDEN / "cyl_iv_0.dgp").read_text()
    cyl = cylinder(kv(), iv()).presentation
    assert print_presentation(cyl) == text
    assert parse_presentation(text).structurally_equal(cyl)
    assert "d s_u = u - u'#1 - v.s_w" in text


@pytest.mark.parametrize("build", PRESETS, ids=lambda b: b.__name__)
def test_round_trip_over_finite_fields(finite_field, build):
    P = build(-1, finite_field)
    assert parse_presentation(print_presentation(P)).structurally_equal(P)


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="obj gen d deg wt : -> = + - * / . 1_ O1 O2 v w u 0123 \n#'", max_size=80))
def test_parser_is_total(text):
    try:
        parse_presentation(text)
    except ParseError as exc:
        assert exc.line >= 0 and exc.column >= 0


def test_tokenizer_names():
    kinds = [(t.kind, t.text) for t in tokenize("w'#1.s_u 1_O2")][:-2]
    assert kinds == [("name", "w'#1"), ("op", "."), ("name", "s_u"), ("ident", "O2")]


# command line


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_build_matches_golden(capsys):
    code, out, _ = run(["build", "--preset", "Qv", "--deg", "0"], capsys)
    assert code == 0
    assert out == (GOLDEN / "qv_0.dgp").read_text()


def test_cli_homology_pipeline(tmp_path, capsys):
    src = tmp_path / "qv.dgp"
    assert main(["build", "--preset", "Qv", "--deg", "0", "-o", str(src)]) == 0
    code, out, _ = run(["homology", "--input", str(src), "--from", "O2", "--to", "O2", "--window", "-2..3",
                        "--weights", "auto", "--schedule", "4,6,8,10"], capsys)
    assert code == 0
    report = json.loads(out)
    dims = {r["details"]["degree"]: r["details"]["dim"] for r in report["records"]}
    assert dims == {-2: 0, -1: 0, 0: 1, 1: 0, 2: 0, 3: 0}
    assert all(r["status"] == "pass" for r in report["records"])


def test_cli_constructions(capsys):
    code, out, _ = run(["rlocalize", "--preset", "KV", "--morphism", "v"], capsys)
    assert code == 0 and parse_presentation(out).structurally_equal(qv())
    code, out, _ = run(["cylinder", "--preset", "IV"], capsys)
    assert code == 0 and out == (GOLDEN / "cyl_iv_0.dgp").read_text()


@pytest.mark.parametrize("args", [
    ["verify", "nope"],
    ["homology", "--preset", "QV", "--from", "O1", "--to", "O3"],
    ["homology", "--preset", "QV", "--from", "O1", "--to", "O1", "--window", "3..1"],
    ["build"],
    ["build", "--preset", "KV_TWO_INV"],
    ["kill", "--preset", "QV", "--morphism", "u"],
    ["verify", "kill-rep", "--field", "Q"],
    ["build", "--input", "/nonexistent.dgp"],
])
def test_cli_usage_errors(args, capsys):
    assert main(args) == 2


def test_cli_budget_exit_code(tmp_path, capsys):
    out = tmp_path / "r.report.json"
    assert main(["verify", "rloc-rep", "--budget", "1", "-o", str(out)]) == 3
    report = json.loads(out.read_text())
    assert any(r["status"] == "skipped" for r in report["records"])


def test_cli_verify_deterministic_and_seed_env(tmp_path, monkeypatch):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "thm61", "--trials", "4", "--seed", "9", "-o", str(a)]) == 0
    monkeypatch.setenv("DGLOC_SEED", "9")
    assert main(["verify", "thm61", "--trials", "4", "-o", str(b)]) == 0
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    ra.pop("timestamp"), rb.pop("timestamp")
    assert ra == rb
    assert ra["schema_version"] == 1 and ra["config"]["seed"] == 9


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "dgloc.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("dgloc ")
