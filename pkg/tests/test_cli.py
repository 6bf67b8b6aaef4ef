import json
import math

import pytest

from entwitness import cli
from entwitness.io import save_json
from entwitness.di import chsh


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def _numeric_leaves_have_provenance(obj):
    if isinstance(obj, dict):
        if "value" in obj:
            assert obj.get("provenance") in ("analytic", "heuristic", "clamped"), obj
            return
        for v in obj.values():
            _numeric_leaves_have_provenance(v)


@pytest.fixture
def bell_files(tmp_path, capsys):
    w, rho = tmp_path / "w.json", tmp_path / "rho.json"
    assert cli.main(["gen-state", "--family", "max-entangled", "--d", "2", "--witness", "-o", str(w)]) == 0
    assert cli.main(["gen-state", "--family", "max-entangled", "--d", "2", "-o", str(rho)]) == 0
    return w, rho


@pytest.fixture
def werner_files(tmp_path):
    w, rho = tmp_path / "ww.json", tmp_path / "wr.json"
    assert cli.main(["gen-state", "--family", "werner", "--witness", "-o", str(w)]) == 0
    assert cli.main(["gen-state", "--family", "werner", "--v", "1", "-o", str(rho)]) == 0
    return w, rho


def test_gen_state_shapes(capsys):
    code, obj = run(["gen-state", "--family", "ghz", "--n", "3"], capsys)
    assert code == 0 and obj["state"]["dim"] == 8
    code, obj = run(["gen-state", "--family", "noisy-w", "--v", "1", "--k", "1", "--witness"], capsys)
    assert code == 0 and obj["dim"] == 8
    assert cli.main(["gen-state", "--family", "werner"]) == 1


def test_bound_command(bell_files, capsys):
    w, rho = bell_files
    code, obj = run(["bound", "--witness", str(w), "--state", str(rho)], capsys)
    assert code == 0
    out = obj["outputs"]
    assert out["bounds"]["E_tr"]["value"] == pytest.approx(0.5, abs=1e-10)
    assert out["w_c"]["value"] == pytest.approx(-0.5, abs=1e-10)
    assert set(obj) == {"command", "seed", "tol_profile", "inputs_digest", "outputs"}
    _numeric_leaves_have_provenance(obj["outputs"])
    code, obj = run(["bound", "--witness", str(w), "--state", str(rho), "--measures", "E_tr,E_C"], capsys)
    assert set(obj["outputs"]["bounds"]) == {"E_tr", "E_C"}


def test_bound_ratios(capsys):
    code, obj = run(["bound", "--ratios", "3"], capsys)
    assert code == 0
    assert obj["outputs"]["ratios"]["E_C"]["value"] == pytest.approx(math.sqrt(2 / 3))


def test_mdi_command(werner_files, capsys):
    w, rho = werner_files
    code, obj = run(["mdi", "--witness", str(w), "--state", str(rho)], capsys)
    assert code == 0
    out = obj["outputs"]
    assert out["bound"]["value"] == pytest.approx(0.25, abs=1e-10)
    assert out["I_prime"]["value"] == pytest.approx(-0.5, abs=1e-10)
    assert out["p_table"]["shape"] == [4, 4, 4, 4]
    _numeric_leaves_have_provenance(out)


def test_di_command(tmp_path, capsys):
    path = tmp_path / "chsh.json"
    save_json(chsh().to_dict(), path)
    code, obj = run(["di", "--expr", str(path), "--observed", str(2 * math.sqrt(2))], capsys)
    assert code == 0
    out = obj["outputs"]
    assert out["bound"]["value"] == pytest.approx(0.5 - math.sqrt(2) / 4, abs=1e-9)
    assert out["quantum_upper"]["provenance"] == "analytic"
    assert out["assumptions"] == []
    code, obj = run(
        ["di", "--expr", "chsh", "--observed", str(2 * math.sqrt(2)), "--beta-sep", str(math.sqrt(2))],
        capsys,
    )
    assert obj["outputs"]["bound"]["value"] == pytest.approx(0.25, abs=1e-9)
    assert obj["outputs"]["assumptions"]


def test_di_heuristic_range(tmp_path, capsys):
    path = tmp_path / "e.json"
    save_json({"parties": 2, "inputs": 2, "outputs": 2,
                     "terms": [{"a": [0, 0], "s": [0, 0], "coeff": 1.0},
                               {"a": [1, 1], "s": [1, 1], "coeff": 1.0}]}, path)
    code, obj = run(["di", "--expr", str(path), "--observed", "1.5", "--restarts", "3"], capsys)
    assert code == 0
    assert obj["outputs"]["quantum_upper"]["provenance"] == "heuristic"
    assert obj["outputs"]["bound"]["provenance"] in ("heuristic", "clamped")


def test_depth_command(capsys):
    code, obj = run(["depth", "--n", "3", "--k", "1", "--observed", "2"], capsys)
    assert code == 2  # GHZ comparison disagrees for this pair
    assert obj["outputs"]["bound"]["value"] == pytest.approx((2 - math.sqrt(2)) / 4)
    assert obj["outputs"]["flag"] is True
    code, obj = run(["depth", "--n", "3", "--k", "3", "--observed", "2"], capsys)
    assert code == 0
    assert obj["outputs"]["bound"]["provenance"] == "clamped"


def test_oracle_command(bell_files, capsys):
    _, rho = bell_files
    code, obj = run(["oracle", "--state", str(rho), "--dims", "2,2", "--restarts", "2",
                     "--lower-bound", "0.5"], capsys)
    assert code == 0
    assert obj["outputs"]["upper_bound"]["value"] == pytest.approx(0.5, abs=5e-3)
    assert obj["outputs"]["ppt"] == "entangled"
    assert obj["outputs"]["verify"]["status"] == "pass"
    code, obj = run(["oracle", "--state", str(rho), "--restarts", "2", "--lower-bound", "0.9"], capsys)
    assert code == 2 and obj["outputs"]["verify"]["status"] == "fail"


def test_errors_exit_one(tmp_path, capsys):
    assert cli.main(["bound", "--witness", str(tmp_path / "missing.json"), "--state", "x"]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"state": {"dim": 2, "entries": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}}))
    assert cli.main(["oracle", "--state", str(bad), "--dims", "2,1"]) == 1
    with pytest.raises(SystemExit) as exc:
        cli.main(["depth", "--n", "3"])
    assert exc.value.code == 1
    assert cli.main(["depth", "--n", "3", "--k", "5", "--observed", "1"]) == 1


def test_global_flags_anywhere(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert cli.main(["depth", "--n", "4", "--k", "4", "--observed", "1", "--seed", "3",
                     "--tol-profile", "strict", "-o", str(out)]) == 0
    obj = json.loads(out.read_text())
    assert obj["seed"] == 3 and obj["tol_profile"] == "strict"
    code, obj = run(["--seed", "5", "depth", "--n", "4", "--k", "4", "--observed", "1"], capsys)
    assert obj["seed"] == 5


def test_inputs_digest_tracks_file_content(bell_files, werner_files, capsys):
    w, rho = bell_files
    _, obj1 = run(["bound", "--witness", str(w), "--state", str(rho)], capsys)
    _, obj2 = run(["bound", "--witness", str(w), "--state", str(rho)], capsys)
    assert obj1["inputs_digest"] == obj2["inputs_digest"]
    rho.write_text(werner_files[1].read_text())
    _, obj3 = run(["bound", "--witness", str(w), "--state", str(rho)], capsys)
    assert obj3["inputs_digest"] != obj1["inputs_digest"]


def test_replay_command(capsys):
    code, obj = run(["replay"], capsys)
    assert code == 2
    rows = {r["id"]: r for r in obj["outputs"]["rows"]}
    assert rows["fidelity-witness/d=2/E_tr"]["status"] == "pass"
    assert any(r["status"] == "flag" for r in rows.values())
    for r in rows.values():
        assert r["computed"]["provenance"] in ("analytic", "heuristic", "clamped")
