import csv
import io
import json

import numpy as np
import pytest

from nocorr.cli import EXIT_INVALID, EXIT_OK, EXIT_SOLVER, OUT_ENV, main
from nocorr.qla import density_from_json


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_table1_csv(capsys):
    code, out, _ = run(capsys, "table1")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 30
    by_key = {(r["state"], r["kind"], r["k"]): r["rational"] for r in rows}
    assert by_key[("a", "original", "3")] == "160/27"
    assert by_key[("c", "nc", "2")] == "704/6075"


def test_state_and_pipeline(tmp_path, capsys):
    f = tmp_path / "b.json"
    assert main(["state", "--name", "b", "--out", str(f)]) == EXIT_OK
    rho = density_from_json(json.loads(f.read_text()))
    assert rho.dims == (3, 3, 3)
    for cmd in ("anti", "nc"):
        code, out, _ = run(capsys, cmd, "--in", str(f))
        assert code == EXIT_OK
        assert density_from_json(json.loads(out)).dims == (3, 3, 3)
    code, out, _ = run(capsys, "sigma", "--in", str(f), "--convention", "total")
    assert code == EXIT_OK and out.splitlines()[0] == "k,sigma"


def test_state_variants(capsys):
    code, out, _ = run(capsys, "state", "--ghz", "2,3")
    assert code == EXIT_OK and json.loads(out)["rows"] == 8
    code, out1, _ = run(capsys, "state", "--haar", "3,2", "--seed", "5")
    code, out2, _ = run(capsys, "state", "--haar", "3,2", "--seed", "5")
    assert out1 == out2
    assert run(capsys, "state")[0] == EXIT_INVALID
    assert run(capsys, "state", "--ghz", "x")[0] == EXIT_INVALID


def test_fig1_real(capsys):
    code, out, _ = run(capsys, "fig1", "--name", "b")
    obj = json.loads(out)
    assert code == EXIT_OK and obj["nc_is_real"]
    assert max(abs(x) for x in obj["nc"]["im"]) == 0


def test_hwdemo(capsys):
    code, out, _ = run(capsys, "hwdemo", "--d", "3")
    obj = json.loads(out)
    assert code == EXIT_OK and not obj["positive"]
    assert obj["min_eigenvalue"] == pytest.approx((1 - np.sqrt(5)) / 4, abs=1e-9)


def test_basis(capsys):
    code, out, _ = run(capsys, "basis", "--d", "3")
    assert code == EXIT_OK and len(json.loads(out)["elements"]) == 8


def test_tensor(capsys):
    code, out, _ = run(capsys, "tensor", "--name", "a")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["mu0", "mu1", "mu2", "value"]
    assert rows[1] == ["0", "0", "0", "1"]


def test_env_output_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUT_ENV, str(tmp_path))
    assert main(["table1"]) == EXIT_OK
    assert (tmp_path / "table1.csv").exists()
    assert main(["fig1"]) == EXIT_OK
    assert (tmp_path / "fig1.json").exists()


def test_byte_identical_outputs(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for f in (a, b):
        assert main(["state", "--haar", "3,3", "--seed", "9", "--out", str(f)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_invalid_inputs(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "anti", "--in", str(bad))[0] == EXIT_INVALID
    bad.write_text(json.dumps({"rows": 2, "cols": 2, "re": [1, 0, 0, 1], "im": [0] * 4}))
    assert run(capsys, "nc", "--in", str(bad))[0] == EXIT_INVALID  # trace 2
    assert run(capsys, "anti", "--in", str(tmp_path / "missing.json"))[0] == EXIT_INVALID
    assert run(capsys, "nope")[0] == EXIT_INVALID
    assert run(capsys, "table1", "--tol", "-1")[0] == EXIT_INVALID
    assert run(capsys, "sample", "--trials", "0")[0] == EXIT_INVALID
    assert run(capsys, "anti")[0] == EXIT_INVALID


def test_even_party_nc_is_a_validation_error(tmp_path, capsys):
    f = tmp_path / "two.json"
    main(["state", "--haar", "3,2", "--out", str(f)])
    code, _, err = run(capsys, "nc", "--in", str(f))
    assert code == EXIT_INVALID and "odd" in err


def test_solver_failure_exit_code(monkeypatch, capsys):
    from nocorr import cli
    from nocorr.optim.sdp import SDPError

    def boom(*a, **k):
        raise SDPError("stalled", "forced")

    monkeypatch.setattr(cli, "gme_witness", boom)
    code, _, err = run(capsys, "witness", "--name", "b")
    assert code == EXIT_SOLVER and "stalled" in err


def test_witness_output(tmp_path, capsys):
    f = tmp_path / "ghz.json"
    main(["state", "--ghz", "2,3", "--out", str(f)])
    code, out, _ = run(capsys, "witness", "--in", str(f))
    obj = json.loads(out)
    assert code == EXIT_OK and obj["gme"] and obj["W"] > 0
    assert obj["bipartitions"] == ["0|12", "1|02", "2|01"]



def test_bell_small(tmp_path, capsys):
    f = tmp_path / "ghz.json"
    main(["state", "--ghz", "2,3", "--out", str(f)])
    code, out, _ = run(capsys, "bell", "--in", str(f), "--settings", "2", "--trials", "2", "--seed", "1")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and [r["trial"] for r in rows] == ["0", "1"]
    for r in rows:
        assert r["local"] in ("true", "false")
        if r["local"] == "false":
            assert float(r["quantum_value"]) > float(r["classical_bound"])
