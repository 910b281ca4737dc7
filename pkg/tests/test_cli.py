import csv
import io
import json

import pytest

from permsym.cli import CSV_FIELDS, main

SWEEP = ["--perm", "(1 2 3)(4 5 6)(7 8 9)(10 11)", "--input", "1,1,1,0,0,0,0,0,0,1,1"]


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def _csv_rows(text):
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


def test_table_csv_schema(capsys):
    code, out, _ = _run(capsys, ["table", *SWEEP, "--stat", "fermion", "--samples", "2", "--seed", "1"])
    assert code == 0
    assert out.startswith("# tool")
    assert '"seed": 1' in out and "version" in out
    rows = _csv_rows(out)
    assert list(rows[0]) == CSV_FIELDS
    assert len(rows) == 462
    assert abs(sum(float(r["probability"]) for r in rows) - 1) < 1e-9
    assert {r["law_predicted"] for r in rows} == {"true", "false"}


def test_table_is_deterministic(capsys, tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        assert main(["table", *SWEEP, "--samples", "1", "--seed", "42", "-o", str(path)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_table_json(capsys):
    code, out, _ = _run(capsys, ["table", "--unitary", "fourier:n=4", "--perm", "shift:2", "--input", "1,0,1,0", "--format", "json"])
    assert code == 0
    data = json.loads(out)
    assert len(data["rows"]) == 10
    assert data["config"]["unitary"] == "fourier:n=4"


def test_seed_is_mandatory(capsys):
    code, _, err = _run(capsys, ["table", *SWEEP, "--samples", "3"])
    assert code == 1
    assert "--seed" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["table", "--perm", "(1 2"],
        ["table", "--unitary", "fourier:n=4", "--input", "1,1"],
        ["table", "--perm", "(1 2 3)", "--input", "1,0,0"],
        ["catalog", "nope:n=2"],
        ["bogus"],
    ],
)
def test_usage_errors(capsys, argv):
    assert main(argv) == 1


def test_check_fourier_examples(capsys):
    code, out, _ = _run(capsys, ["check", "--unitary", "fourier:n=12", "--perm", "shift:3", "--assign", "1,4,7,10", "--stat", "fermion"])
    assert code == 0
    report = json.loads(out)
    assert report["violations"] == [] and report["unpredicted"] == []
    code, out, _ = _run(capsys, ["check", "--unitary", "fourier:n=12", "--perm", "shift:6", "--assign", "1,3,7,9", "--stat", "fermion"])
    assert code == 0
    assert "(1,4,6,7)" in json.loads(out)["unpredicted"]


def test_check_identity_is_empty(capsys):
    code, out, _ = _run(capsys, ["check", "--unitary", "identity:n=4", "--input", "1,1,0,0", "--stat", "fermion"])
    assert code == 0
    report = json.loads(out)
    assert report["law_predicted"] == 0


def test_check_random_bases(capsys):
    code, out, _ = _run(capsys, ["check", *SWEEP, "--stat", "boson", "--samples", "3", "--seed", "5"])
    assert code == 0
    assert json.loads(out)["bases"] == 4


def test_check_reports_violation_with_wrong_symmetry(capsys, tmp_path, monkeypatch):
    # a symmetry with mislabelled eigenphases must be caught as a violation
    import permsym.cli as cli
    from permsym.suppression import Symmetry

    real = cli.resolve_setup

    def wrong(args):
        setup = real(args)
        phases = list(setup.symmetry.phases)
        phases[0], phases[1] = phases[1], phases[0]
        setup.symmetry = Symmetry(setup.symmetry.permutation, tuple(phases))
        return setup

    monkeypatch.setattr(cli, "resolve_setup", wrong)
    code, out, _ = _run(capsys, ["check", "--unitary", "fourier:n=4", "--perm", "shift:1", "--input", "1,1,1,1"])
    assert code == 2
    assert json.loads(out)["violations"]


def test_demos(capsys):
    code, out, _ = _run(capsys, ["demo", "hom"])
    assert code == 0
    assert json.loads(out)["result"]["boson"] == {"2,0": 0.5, "1,1": 0.0, "0,2": 0.5}
    code, out, _ = _run(capsys, ["demo", "router", "--m", "8", "--k", "3"])
    res = json.loads(out)["result"]
    assert code == 0 and res["allowed_modes"] == [6]
    for name in ("bell", "jx", "hypercube"):
        assert main(["demo", name]) == 0
        capsys.readouterr()


def test_catalog_and_witness(capsys):
    code, out, _ = _run(capsys, ["catalog", "jx:n=3", "--format", "json"])
    assert code == 0 and json.loads(out)["permutation"] == "(1 3)"
    code, out, _ = _run(capsys, ["phase-witness", "sylvester:d=2", "--perm", "walsh:2"])
    data = json.loads(out)
    assert code == 0 and data["ok"] and data["eigenphases"] == ["0", "0", "1/2", "1/2"]


def test_state_generation_and_check(capsys, tmp_path):
    path = tmp_path / "bell.json"
    assert main(["state", "bell", "--sign", "-", "--overlap", "0.3", "-o", str(path)]) == 0
    code, out, _ = _run(capsys, ["state-check", str(path), "--perm", "(1 2)", "--unitary", "sylvester:d=1"])
    assert code == 0
    report = json.loads(out)
    assert report["phase"] == "1/2" and report["allowed"] == ["1,1"]
    path = tmp_path / "sup.json"
    assert main(["state", "superposition", "--perm", "(1 2 3)(4 5)", "--input", "1,0,0,1,1", "--k", "2", "-o", str(path)]) == 0
    assert main(["state-check", str(path), "--perm", "(1 2 3)(4 5)", "--seed", "2"]) == 0
