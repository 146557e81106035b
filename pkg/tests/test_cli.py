import csv
import io
import json
import math

import jsonschema
import pytest

from jostspec import cli, verify as verify_mod
from jostspec.resonances import WindingAmbiguity


@pytest.fixture
def potential_file(tmp_path):
    def write(spec):
        path = tmp_path / "q.json"
        path.write_text(json.dumps(spec))
        return str(path)
    return write


@pytest.fixture
def well_file(potential_file):
    return potential_file({"kind": "piecewise_constant", "breakpoints": [0, 1], "values": [-4.0]})


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_spectra_csv_free(capsys, potential_file):
    path = potential_file({"kind": "piecewise_constant", "breakpoints": [0, 1], "values": [0.0]})
    code, out, _ = run(capsys, "spectra", "--potential", path, "--families", "dirichlet", "--n-max", "3",
                       "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["index"] for r in rows] == ["1", "2", "3"]
    for n, r in enumerate(rows, 1):
        assert float(r["eigenvalue"]) == pytest.approx((n * math.pi) ** 2, rel=1e-12)


def test_spectra_json_periodic_labels(capsys, well_file):
    code, out, _ = run(capsys, "spectra", "--potential", well_file, "--families", "periodic", "--n-max", "2")
    assert code == 0
    labels = [v["label"] for v in json.loads(out)["spectra"]["periodic"]["values"]]
    assert labels == ["0+", "1-", "1+", "2-", "2+"]


@pytest.mark.parametrize("spec,field", [
    ({"kind": "piecewise_constant", "breakpoints": [0, 0.7, 0.3, 1], "values": [1, 2, 3]}, "breakpoints"),
    ({"kind": "piecewise_constant", "breakpoints": [0, 1]}, "values"),
    ({"kind": "piecewise_constant", "breakpoints": [0, 1], "values": ["a"]}, "values"),
])
def test_invalid_potential_exit_1(capsys, potential_file, spec, field):
    code, _, err = run(capsys, "spectra", "--potential", potential_file(spec))
    assert code == 1 and field in err


def test_unreadable_and_unknown_family(capsys, tmp_path, well_file):
    assert run(capsys, "spectra", "--potential", str(tmp_path / "missing.json"))[0] == 1
    code, _, err = run(capsys, "spectra", "--potential", well_file, "--families", "robin")
    assert code == 1 and "families" in err
    with pytest.raises(SystemExit) as info:
        cli.main(["spectra"])
    assert info.value.code == 1


def test_resonances_upper_requires_flag(capsys, well_file):
    code, _, err = run(capsys, "resonances", "--potential", well_file, "--rect", "-1,1,-1,1")
    assert code == 1 and "upper" in err
    code, out, _ = run(capsys, "resonances", "--potential", well_file, "--rect", "-1,1,-1,1", "--upper")
    assert code == 0
    zeros = json.loads(out)["zeros"]
    assert len(zeros) == 1 and zeros[0]["im"] == pytest.approx(0.638045, abs=1e-6)


def test_bad_rect(capsys, well_file):
    code, _, err = run(capsys, "resonances", "--potential", well_file, "--rect", "1,0,-1,0")
    assert code == 1 and "rect" in err


def test_verify_well_passes_and_validates(capsys, well_file, tmp_path):
    out_path = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "--potential", well_file, "--out", str(out_path), "--seed", "5")
    assert code == 0
    doc = json.loads(out_path.read_text())
    jsonschema.validate(doc, cli.load_schema("report"))
    assert doc["metadata"]["seed"] == 5
    assert all(e["status"] != "fail" for e in doc["entries"])


def test_verify_is_deterministic(capsys, well_file):
    a = run(capsys, "verify", "--potential", well_file)[1]
    b = run(capsys, "verify", "--potential", well_file)[1]
    assert a == b


def test_verify_solver_error_exit_2(capsys, well_file, monkeypatch):
    def boom(*a, **k):
        raise WindingAmbiguity("forced", (0, 1, -1, 0))
    monkeypatch.setattr(verify_mod, "find_resonances", boom)
    code, out, _ = run(capsys, "verify", "--potential", well_file)
    assert code == 2
    doc = json.loads(out)
    assert doc["metadata"]["solver_error"] is True
    assert any(e["status"] == "fail" and "WindingAmbiguity" in (e["note"] or "") for e in doc["entries"])


def test_verify_argument_errors(capsys, well_file):
    assert run(capsys, "verify")[0] == 1
    assert run(capsys, "verify", "--potential", well_file, "--random", "1", "2")[0] == 1
    assert run(capsys, "verify", "--random", "1", "0")[0] == 1


def test_bounds_csv(capsys, well_file):
    code, out, _ = run(capsys, "bounds", "--potential", well_file, "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert {"nu1", "nu2", "W"} <= {r["theorem"] for r in rows}


def test_ragged_polynomial_coefficients(capsys, potential_file):
    path = potential_file({"kind": "piecewise_poly", "breakpoints": [0, 0.4, 1], "coeffs": [[1, 2], [-3, 0, 5]]})
    code, out, _ = run(capsys, "spectra", "--potential", path, "--families", "mixed01", "--n-max", "2")
    assert code == 0
    assert len(json.loads(out)["spectra"]["mixed01"]["values"]) == 2
