import io
import json
import subprocess
import sys

import pytest

from jetcalc.cli import FUNCTION_WARNING, run
from jetcalc.expr import JetSpec, parse


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def lines(*argv):
    code, out, err = call(*argv)
    assert code == 0, err
    return out.splitlines()


def test_el():
    assert lines("el", "--n", "1", "--m", "1", "--order", "1", "--lagrangian", "1/2*y1_[1]^2") == ["T1 = -y1_[1 1]"]


def test_helmholtz_table():
    out = lines("helmholtz", "--order", "2", "--equation", "y1_[1 1]+y1")
    assert out[-1] == "variational: true"
    assert all(line.endswith("= 0") for line in out[:-1])
    assert out[0] == "H^[]_(1,1) = 0"


def test_decompose_and_homotopy():
    assert lines("decompose", "--k", "0", "--form", "dx1") == ["dx1"]
    assert lines("decompose", "--form", "dy1 /\\ dx1") == ["p0 = 0", "p1 = -dx1 /\\ w1", "p2 = 0"]
    assert lines("homotopy", "--form", "w1") == ["y1"]
    assert lines("strong-contact", "--n", "2", "--order", "2", "--form", "w1 /\\ w1_[1] /\\ dx1") == ["strongly contact: true"]


def test_tonti_output_is_a_lagrangian_for_the_equation():
    (line,) = lines("tonti", "--order", "2", "--equation", "y1_[1 1]+y1")
    assert line == "L = 1/2*y1*y1_[1 1] + 1/2*y1^2"


def test_verdicts():
    assert lines("variational", "--order", "2", "--equation", "y1_[1]") == ["variational: false"]
    assert lines("trivial", "--order", "2", "--lagrangian", "y1*y1_[1 1] + y1_[1]^2") == ["trivial: true"]
    assert lines("check-system", "--lagrangian", "y1_[1]^2") == ["highest-order system: false"]
    assert lines("check-system", "--n", "2", "--m", "2", "--lagrangian", "y1_[1]*y2_[2] - y1_[2]*y2_[1]") == [
        "highest-order system: true"
    ]


def test_hyperjac():
    out = lines("hyperjac", "--n", "2", "--m", "2", "--pair", "1:[]", "--pair", "2:[]")
    assert out == ["y1_[1]*y2_[2] - y1_[2]*y2_[1]"]


def test_prolong_evolution_and_morphism(tmp_path):
    out = lines("prolong", "--order", "2", "--evolution", "x1*y1")
    assert out == ["xi1 = x1*y1", "xi1_[1] = x1*y1_[1] + y1", "xi1_[1 1] = x1*y1_[1 1] + 2*y1_[1]"]
    path = tmp_path / "phi.json"
    path.write_text(json.dumps({"base": ["2*x1"], "fibre": ["y1"]}))
    out = lines("prolong", "--morphism", str(path), "--lagrangian", "1/2*y1_[1]^2")
    assert out == ["F1 = y1", "F1_[1] = 1/2*y1_[1]", "naturality: true"]


def test_trivial_from_coefficients(tmp_path):
    path = tmp_path / "coeffs.json"
    # V^j = eps^{j i} y2 y1_i, whose divergence is a Jacobian
    entry = {"pairs": [[1, []]], "free": [], "value": "y2"}
    path.write_text(json.dumps({"n": 2, "m": 2, "order": 1, "entries": [entry]}))
    code, out, err = call("trivial", "--input", str(path), "--format", "json")
    assert code == 0, err
    result = json.loads(out)["result"]
    spec = JetSpec(2, 2, 1)
    L = parse(result["lagrangian"], spec)
    jac = parse("y1_[1]*y2_[2] - y1_[2]*y2_[1]", spec)
    assert L in (jac, -jac)
    assert set(result["divergence"]) == {"V1", "V2"}


def test_fock_commands(tmp_path):
    path = tmp_path / "x.json"
    path.write_text(json.dumps({"n": 2, "k": 1, "bosonic": [1], "entries": [[[1, 1], 1], [[2, 2], 1]]}))
    out = lines("fock-trace", "--input", str(path))
    assert out == ["X0: 0", "X1:", "  [] = 1"]
    out = lines("fock-solve", "--input", str(path), "--s", "1")
    assert out == ["X1:", "  [] = 1"]
    path.write_text(json.dumps({"n": 2, "k": 0, "bosonic": [1], "entries": [[[1], 1]]}))
    code, _, err = call("fock-solve", "--input", str(path), "--s", "1")
    assert code == 3 and "NotInKernel" in err


def test_json_schema():
    code, out, _ = call("el", "--lagrangian", "1/2*y1_[1]^2", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert set(doc) == {"spec", "result", "warnings"}
    assert doc["spec"] == {"n": 1, "m": 1, "order": 1}
    assert doc["warnings"] == []


def test_function_warning():
    code, out, _ = call("variational", "--order", "2", "--equation", "sin(y1_[1])", "--format", "json")
    assert code == 0 and json.loads(out)["warnings"] == [FUNCTION_WARNING]


def test_problem_file(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"n": 1, "m": 1, "order": 1, "lagrangian": "1/2*y1_[1]^2"}))
    assert lines("el", "--input", str(path)) == ["T1 = -y1_[1 1]"]


def test_exit_codes():
    code, _, err = call("el", "--lagrangian", "y1 +* 2")
    assert code == 2
    assert "position 4" in err and "^" in err
    code, _, err = call("el", "--lagrangian", "y2")
    assert code == 2
    code, _, err = call("el")
    assert code == 2 and "missing --lagrangian" in err
    code, _, err = call("el", "--input", "/nonexistent/file.json")
    assert code == 2
    with pytest.raises(SystemExit) as info:
        call("frobnicate")
    assert info.value.code == 2


def test_output_is_deterministic():
    argv = ["helmholtz", "--n", "2", "--order", "2", "--equation", "y1_[1 1] + y1_[2 2] + x1*y1", "--format", "json"]
    outs = {subprocess.run([sys.executable, "-m", "jetcalc", *argv], capture_output=True, text=True).stdout for _ in range(3)}
    assert len(outs) == 1
    assert json.loads(outs.pop())["result"]["variational"] is True
