import csv
import io
import json

import pytest

from hlqg.cli import main


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def test_nf():
    assert run("nf", "a*d") == (0, "b*c + 1\n")
    assert run("nf", "a'*a - a*a'", "--s", "0") == (0, "0\n")


def test_nf_parse_error(capsys):
    code, _ = run("nf", "((")
    assert code == 2
    assert "column 2" in capsys.readouterr().err


def test_usage_errors():
    assert run("nosuch")[0] == 2
    assert run("rep")[0] == 2
    assert run("kernel", "psi", "--s", "x")[0] == 2


def test_bad_config(tmp_path):
    p = tmp_path / "bad.ini"
    p.write_text("[numeric]\nN = lots\n")
    assert run("--config", str(p), "nf", "a")[0] == 2
    assert run("--config", str(tmp_path / "missing.ini"), "nf", "a")[0] == 2


def test_hopf_verify():
    code, out = run("hopf", "verify")
    assert code == 0
    assert all(c["status"] == "pass" for c in json.loads(out)["checks"])


def test_kernel_gw():
    code, out = run("kernel", "gw", "--trials", "100", "--seed", "7")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 100 and all(r["holds"] == "True" for r in rows)


def test_kernel_psi_csv():
    code, out = run("kernel", "psi", "--s", "4", "--z", "1", "--zp", "1j")
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert float(row["value_re"]) == pytest.approx(0.5403023058681398)


@pytest.mark.parametrize("argv", [
    ("rep", "build", "--case", "gamma_zero", "--c", "2", "--N", "8"),
    ("rep", "check", "--case", "direct_sum", "--N", "8", "--P", "4"),
    ("rep", "tensor", "--N", "6", "--P", "3"),
    ("rep", "shift", "--N", "16"),
    ("rep", "sumt", "--N", "12", "--P", "6"),
    ("heat", "direct", "--N", "12"),
    ("zcalc", "roundtrip", "--trials", "3"),
    ("zcalc", "commute"),
    ("zcalc", "density"),
    ("calibrate", "conventions"),
])
def test_passing_commands(argv):
    assert run(*argv)[0] == 0


@pytest.mark.parametrize("argv", [
    ("rep", "sumt", "--N", "12", "--P", "6", "--form", "literal"),
    ("rep", "shift", "--N", "16", "--z", "4"),
])
def test_failing_checks_exit_one(argv):
    assert run(*argv)[0] == 1


def test_shift_general_coefficient_passes():
    assert run("rep", "shift", "--N", "16", "--c", "0.8+0.3j", "--c2", "1.2-0.5j", "--s", "0.6")[0] == 0


def test_zero_charge_is_a_usage_error():
    assert run("rep", "build", "--case", "gamma_zero", "--c", "1")[0] == 2


def test_out_file(tmp_path):
    p = tmp_path / "rep.json"
    code, out = run("--out", str(p), "zcalc", "commute")
    assert code == 0 and out == ""
    assert json.loads(p.read_text())["checks"]
