import io
import json
import math

import jsonschema
import pytest

from hlqg.cli import main
from hlqg.config import RunConfig
from hlqg.report import REPORT_SCHEMA, Check, Report


def test_schema_is_valid():
    jsonschema.Draft202012Validator.check_schema(REPORT_SCHEMA)


def test_measured_and_exact():
    ok = Check.measured("x", "ref", 1e-12, 1e-10)
    bad = Check.measured("y", "ref", 1.0, 1e-10)
    nan = Check.measured("z", "ref", float("nan"), 1.0)
    assert ok.passed and not bad.passed and not nan.passed
    assert Check.exact("e", "ref", True).as_dict()["residual"] == "0"
    assert Check.exact("e", "ref", False, "s*a").as_dict() == {
        "id": "e", "paper_ref": "ref", "status": "fail", "residual": "s*a", "threshold": None}


def test_report_roundtrip(tmp_path):
    rep = Report(RunConfig())
    rep.add(Check.measured("a", "r", 0.5, 1.0))
    rep.add(Check.measured("b", "r", math.inf, 1.0))
    d = json.loads(rep.to_json())
    jsonschema.validate(d, REPORT_SCHEMA)
    assert d["checks"][1]["residual"] == "inf"
    assert rep.exit_code() == 1
    p = tmp_path / "r.json"
    rep.write(p)
    assert json.loads(p.read_text()) == d


@pytest.mark.parametrize("argv", [
    ["hopf", "verify", "--random", "2"],
    ["rep", "check", "--N", "8", "--P", "4"],
    ["rep", "sumt", "--N", "10", "--P", "5"],
    ["heat", "compare", "--t", "0.5", "--N", "24", "--P", "10"],
    ["zcalc", "product", "--trials", "2"],
])
def test_cli_output_validates(argv):
    buf = io.StringIO()
    main(argv, out=buf)
    doc = json.loads(buf.getvalue())
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["checks"]


def test_cli_out_file_validates(tmp_path):
    p = tmp_path / "k.json"
    assert main(["--out", str(p), "kernel", "gw", "--trials", "5"], out=io.StringIO()) == 0
    jsonschema.validate(json.loads(p.read_text()), REPORT_SCHEMA)
