import json
import math
import shutil
import subprocess
import sys

import numpy as np
import pytest

from qcomplexity.cli import run
from qcomplexity.channels import ptm_named
from qcomplexity.errors import ValidationError
from qcomplexity.serialization import (
    SCHEMA_PTM,
    SCHEMA_REPORT,
    circuit_from_dict,
    decode_matrix,
    dumps,
    format_float,
    load_json,
    observable_from_spec,
    parse_float,
)

T_CIRCUIT = {"layers": [{"width": 1, "gates": ["T"]}]}
AD_CIRCUIT = {
    "layers": [
        {"width": 1, "gates": ["H"]},
        {"width": 1, "gates": [{"name": "amplitude_damping", "params": [0.3]}]},
    ]
}


@pytest.fixture
def files(tmp_path, experiments_dir):
    (tmp_path / "t.json").write_text(json.dumps(T_CIRCUIT))
    (tmp_path / "ad.json").write_text(json.dumps(AD_CIRCUIT))
    shutil.copy(experiments_dir / "hst_depth2_z_m8.json", tmp_path / "exp.json")
    return tmp_path


class TestSerialization:
    def test_floats(self):
        assert parse_float("inf") == math.inf and parse_float(" Infinity ") == math.inf
        assert parse_float(2) == 2.0
        for bad in ("abc", True, None, [1]):
            with pytest.raises(ValidationError):
                parse_float(bad)
        assert format_float(math.inf) == "inf" and format_float(0.1) == 0.1

    def test_matrix_codec(self):
        m = decode_matrix([[[1, 0], [0, -1]], [[0, 1], [1, 0]]])
        assert np.array_equal(m, [[1, -1j], [1j, 1]])
        assert np.array_equal(decode_matrix([[1, 2], [3, 4]]), [[1, 2], [3, 4]])

    def test_circuit_forms(self):
        c = circuit_from_dict(
            {
                "layers": [
                    {"width": 2, "gates": ["H", {"name": "CNOT", "targets": [0, 1]}]},
                    {"width": 2, "gates": [{"unitary": [[1, 0], [0, 1]], "targets": [1]}]},
                    {"width_in": 2, "width_out": 1, "kraus": [
                        [[1, 0, 0, 0], [0, 0, 1, 0]],
                        [[0, 1, 0, 0], [0, 0, 0, 1]],
                    ]},
                ]
            }
        )
        assert c.widths == (1, 2, 2, 2)
        H2 = ptm_named("H", [], [0], 2) @ ptm_named("H", [], [1], 2)
        assert np.abs(c.layers[0].entries - (ptm_named("CNOT", [], [0, 1], 2) @ H2).entries).max() <= 1e-14

    def test_parametrized(self):
        c = circuit_from_dict({"layers": [{"width": 1, "gates": [{"name": "RZ", "params": ["t"]}]}]}, {"t": 0.4})
        assert np.abs(c.layers[0].entries - ptm_named("RZ", [0.4]).entries).max() == 0
        with pytest.raises(ValidationError):
            circuit_from_dict({"layers": [{"width": 1, "gates": ["RZ"]}]})
        with pytest.raises(ValidationError):
            circuit_from_dict({"layers": [{"width": 1, "gates": [{"name": "RZ", "params": ["u"]}]}]})
        with pytest.raises(ValidationError):
            circuit_from_dict({"layers": [{"width": 1, "gates": ["CNOT"]}]})
        with pytest.raises(ValidationError):
            circuit_from_dict({"layers": []})

    def test_observables(self):
        assert np.array_equal(observable_from_spec("Z").entries, [0, 0, 0, 1])
        v = observable_from_spec({"XI": 0.5, "ZZ": 2})
        assert v.entries[4] == 0.5 and v.entries[15] == 2
        assert np.array_equal(observable_from_spec({"matrix": [[1, 0], [0, -1]]}).entries, [0, 0, 0, 1])
        with pytest.raises(ValidationError):
            observable_from_spec({"X": 1, "ZZ": 1})

    def test_bad_json(self, tmp_path):
        (tmp_path / "x.json").write_text("{nope")
        with pytest.raises(ValidationError):
            load_json(tmp_path / "x.json")

    def test_dumps_rejects_nan(self):
        with pytest.raises(ValueError):
            dumps({"x": float("nan")})


class TestCli:
    def test_norm(self, files, capsys):
        assert run(["norm", "--circuit", str(files / "t.json"), "--p", "1", "--q", "inf"]) == 0
        assert abs(float(capsys.readouterr().out) - math.sqrt(2)) <= 1e-12

    def test_norm_out(self, files, capsys):
        out = files / "n.json"
        assert run(["norm", "--circuit", str(files / "t.json"), "--p", "1", "--q", "1", "--modified", "--out", str(out), "--seed", "5"]) == 0
        doc = json.loads(out.read_text())
        assert doc["seed"] == 5 and doc["q"] == 1.0 and abs(doc["value"] - (2 * math.sqrt(2) + 1) / 3) <= 1e-12

    def test_measure(self, files, capsys):
        assert run(["measure", "--circuit", str(files / "t.json"), "--kind", "gamma", "--p", "1", "--q", "1"]) == 0
        assert float(capsys.readouterr().out) == pytest.approx((1 + math.sqrt(2)) / 2, abs=1e-12)

    def test_measure_non_unital(self, files, capsys):
        code = run(["measure", "--circuit", str(files / "ad.json"), "--kind", "gamma", "--modified", "--p", "1", "--q", "1"])
        err = capsys.readouterr().err
        assert code == 2 and "layer 2" in err and err.count("\n") == 1

    def test_verify(self, files, capsys):
        out = files / "report.json"
        assert run(["verify", "--config", str(files / "exp.json"), "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["schema"] == SCHEMA_REPORT and doc["seed"] == 0
        assert doc["all_satisfied"] and all(r["satisfied"] for r in doc["rows"])
        first = out.read_bytes()
        assert run(["verify", "--config", str(files / "exp.json"), "--out", str(out), "--workers", "3"]) == 0
        assert out.read_bytes() == first

    def test_verify_csv(self, files):
        out = files / "report.csv"
        assert run(["verify", "--config", str(files / "exp.json"), "--out", str(out), "--format", "csv"]) == 0
        rows = out.read_text().splitlines()
        assert rows[0].split(",")[:3] == ["seed", "variant", "p"] and len(rows) == 33

    def test_bound(self, capsys):
        assert run(["bound", "--variant", "single", "--p", "1", "--q", "inf", "--resource", "1.4142135623730951",
                    "--widths", "1", "1", "--m", "4", "--k", "1"]) == 0
        assert float(capsys.readouterr().out) == pytest.approx(2.0, abs=1e-12)

    def test_bound_from_files(self, files, capsys):
        assert run(["bound", "--variant", "depth_gamma_unital", "--circuit", str(files / "t.json"),
                    "--config", str(files / "exp.json"), "--p", "2", "--q", "2"]) == 0
        assert float(capsys.readouterr().out) > 0

    def test_bound_rejects_small_p(self, capsys):
        code = run(["bound", "--variant", "single", "--p", "0.5", "--resource", "1", "--widths", "1", "1", "--m", "2", "--k", "1"])
        assert code == 2 and "p" in capsys.readouterr().err

    def test_estimate(self, files, capsys):
        (files / "tab.json").write_text(json.dumps({"values": [[1, 1], [1, -1]]}))
        assert run(["estimate", "--table", str(files / "tab.json")]) == 0
        assert capsys.readouterr().out.strip() == "1.0"
        out = files / "e.json"
        assert run(["estimate", "--config", str(files / "exp.json"), "--method", "mc", "--draws", "500", "--seed", "9", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["seed"] == 9 and doc["estimate"]["method"] == "monte-carlo" and doc["estimate"]["seed"] == 9

    def test_ptm(self, files, capsys):
        assert run(["ptm", "--circuit", str(files / "t.json")]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["schema"] == SCHEMA_PTM and doc["seed"] == 0
        assert np.abs(np.array(doc["entries"]) - ptm_named("T").entries).max() == 0

    @pytest.mark.parametrize(
        "argv",
        [["frobnicate"], ["norm", "--bogus"], ["norm"], ["norm", "--circuit", "missing.json"], ["norm", "--circuit", "x", "--p", "-1"]],
    )
    def test_usage_errors(self, argv, capsys):
        assert run(argv) == 2
        assert capsys.readouterr().err.count("\n") == 1

    def test_csv_only_for_verify(self, files):
        assert run(["norm", "--circuit", str(files / "t.json"), "--format", "csv"]) == 2

    def test_internal_error_exit_code(self, files, monkeypatch, capsys):
        import qcomplexity.cli as cli

        def boom(args):
            raise RuntimeError("kaboom")

        monkeypatch.setitem(cli._COMMANDS, "norm", boom)
        assert run(["norm", "--circuit", str(files / "t.json")]) == 1
        assert "kaboom" in capsys.readouterr().err

    def test_console_script(self, files):
        exe = shutil.which("qcomplexity")
        cmd = [exe] if exe else [sys.executable, "-m", "qcomplexity.cli"]
        out = subprocess.run(cmd + ["norm", "--circuit", str(files / "t.json"), "--p", "1", "--q", "inf"], capture_output=True, text=True)
        assert out.returncode == 0 and out.stdout.startswith("1.41421356")
