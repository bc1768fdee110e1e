import io
import json
import subprocess
import sys

import pytest

from gserre.cli import SCHEMA, run
from gserre.griffith_examples import d_sequence, export_model
from gserre.rho_calculus import rho_r


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def structured(*argv):
    code, out, _ = call(*argv, "--format", "structured")
    doc = json.loads(out)
    assert doc["schema"] == SCHEMA and doc["exit_code"] == code
    return code, doc["result"]


def test_dual_example():
    assert call("rho", "dual", "0,1;+1") == (0, "0,1,2;+0\n", "")


def test_enum_example_prints_two_lines():
    code, out, _ = call("perv", "enum", "--rho", "0,1,2;+0", "--n", "2")
    assert code == 0 and out.splitlines() == ["0,0,1;+0", "0,1;+0"]


def test_griffith_verify_example():
    code, out, _ = call("griffith", "verify", "--rho", "0,1,2;+0", "--n", "3", "--horizon", "10")
    assert code == 0
    assert "exceptions: 0" in out


@pytest.mark.parametrize(
    "argv, expected",
    [
        (("rho", "eval", "0,1,2;+0", "7"), "2"),
        (("rho", "join", "0,1,2;+0", "0,1,1;+1"), "0,1,2,2;+1"),
        (("rho", "meet", "0,1,2;+0", "0,1,1;+1"), "0,1,1,2;+0"),
        (("rho", "incline", "0,1,2;+0", "--n", "3"), "0,1,2,2;+1"),
        (("perv", "pmin", "--rho", "0,1,2,3;+0", "--n", "4"), "0,0,0,1,2;+0"),
        (("perv", "pmax", "--rho", "0,1,2,3;+0", "--n", "4"), "0,1,2;+0"),
        (("perv", "pplus", "--pi", "0,0,1,1,2;+1", "--n", "3"), "0,0;+1"),
        (("perv", "phi", "--pi", "0,0,1;+0"), "0,1,2;+0"),
        (("perv", "exists-plus", "--rho", "0,1,2;+0", "--n", "3"), "no"),
        (("perv", "exists-plus", "--rho", "0,1,2;+0", "--n", "2"), "yes"),
    ],
)
def test_queries(argv, expected):
    code, out, _ = call(*argv)
    assert code == 0 and out.strip() == expected


def test_phi_inverse_lists_fibre():
    code, result = structured("perv", "phi-inv", "--rho", "0;+1")
    assert code == 0 and result["fibre"] == ["0,0;+1", "0,1,1;+1"]


def test_check_reports_membership():
    assert call("rho", "check", "0,1,2;+0")[0] == 0
    code, result = structured("rho", "check", "0,1;+0")
    assert code == 1 and result["in_Wprime"] and result["diagnostic"] == "w.below-rho2"
    assert call("rho", "check", "0,1;+0", "--target", "wprime")[0] == 0
    code, result = structured("rho", "check", "0,2;+0")
    assert code == 1 and result["diagnostic"] == "wprime.slope"


@pytest.mark.parametrize(
    "argv, needle",
    [
        (("rho", "dual", "0,2;+0"), "wprime.slope"),
        (("rho", "dual", "0,1;+0"), "w.below-rho2"),
        (("rho", "dual", "garbage"), "encoding.syntax"),
        (("rho", "dual", "0,1;+1", "--bogus"), "unrecognized arguments"),
        (("rho",), "required"),
        (("perv", "phi", "--pi", "0,1,2;+1"), "perversity.level"),
        (("griffith", "spec", "--rho", "0;+1", "--n", "3"), "griffith.identity"),
        (("model", "validate", "/nonexistent/model.json"), "cannot read"),
    ],
)
def test_input_errors_exit_two(argv, needle):
    code, out, err = call(*argv)
    assert code == 2 and needle in err and out == ""


def test_structured_error_document():
    code, out, _ = call("rho", "dual", "0,2;+0", "--format", "structured")
    doc = json.loads(out)
    assert code == 2 and doc["result"]["error"]["code"] == "wprime.slope"


def test_format_flag_before_subcommand():
    code, out, _ = call("--format", "structured", "rho", "dual", "0;+1")
    assert json.loads(out)["result"]["value"] == "0,1,2;+0"


@pytest.fixture
def griffith_file(write_json):
    model, O, _ = export_model(d_sequence(rho_r(2), 3))
    return write_json("g.json", model.to_dict() | {"sheaves": {"O": O.to_dict()}})


def test_model_commands(griffith_file):
    assert call("model", "validate", griffith_file)[0] == 0
    code, result = structured("model", "ccodim", griffith_file, "--open", "s0,s1,s2,s3")
    assert code == 0 and result["ccodim"] == 3 and result["closed"] == ["y1_0"]
    code, result = structured("model", "srho", griffith_file, "--sheaf", "O", "--rho", "0,1,2,3;+0")
    assert code == 1 and result["violations"][0]["point"] == "y1_0"
    assert call("model", "srho", griffith_file, "--sheaf", "O", "--rho", "0,1,2;+0")[0] == 0
    code, result = structured("model", "srho-locus", griffith_file, "--sheaf", "O", "--rho", "0,1,2,3;+0")
    assert result["locus"] == ["s0", "s1", "s2", "s3"] and result["open"]
    code, result = structured("model", "membership", griffith_file, "--sheaf", "O", "--standard", "s",
                              "--open", "s0,s1,s2,s3")
    assert code == 0 and result["member"]
    code, _ = structured("model", "membership", griffith_file, "--sheaf", "O", "--pi", "0;+1", "--half", "ge")
    assert code == 1
    assert call("model", "ccodim", griffith_file)[0] == 2


def test_model_validation_error(write_json):
    path = write_json("bad.json", {"components": [{"id": "X", "dim": 2}], "points": [
        {"id": "g", "codim": 0, "components": ["X"]},
        {"id": "p", "codim": 2, "components": ["X"], "specializes_to": ["g"]},
    ]})
    code, _, err = call("model", "validate", path)
    assert code == 2 and err.startswith("error: model.codim-specialization [p]")


def test_certify_commands(griffith_file):
    base = ("certify", "extension", griffith_file, "--open", "s0,s1,s2,s3", "--pushforward", "O")
    assert call(*base, "--rho", "0,1,2;+0", "--candidate", "O")[0] == 0
    code, result = structured(*base, "--rho", "0,1,2,3;+0", "--candidate", "O")
    assert code == 1 and result["clauses"]["ext.relative"] is False
    assert call(*base, "--rho", "0,1,2;+0")[0] == 0
    code, result = structured("certify", "srification", griffith_file, "--sheaf", "O", "--rho", "0,1,2,3;+0")
    assert code == 1 and result["status"] == "INCONCLUSIVE"
    assert result["data"]["bound_table"] == {"y1_0": 3}


def test_export_model_round_trips(tmp_path):
    target = tmp_path / "out.json"
    code, _, _ = call("griffith", "export-model", "--rho", "0,1,2;+0", "--n", "3", "--output", str(target))
    assert code == 0
    assert call("model", "validate", str(target))[0] == 0


def test_profile_table():
    code, out, _ = call("griffith", "profile", "--rho", "0,1,2;+0", "--n", "3")
    assert out.splitlines() == ["0 0 smooth", "1 1 smooth", "2 2 smooth", "3 2 Y1", "3 3 smooth"]


@pytest.mark.parametrize("fmt", ["table", "structured"])
def test_byte_stable(griffith_file, fmt):
    argv = ("certify", "srification", griffith_file, "--sheaf", "O", "--rho", "0,1,2,3;+0", "--format", fmt)
    assert call(*argv) == call(*argv)
    argv = ("griffith", "verify", "--rho", "0,1,2;+0", "--n", "3", "--format", fmt)
    assert call(*argv) == call(*argv)


def test_verify_rejections():
    code, out, _ = call("verify", "rejections")
    assert code == 0 and out.startswith("PASS validator.rejections")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gserre", "rho", "dual", "0,1;+1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "0,1,2;+0\n"
