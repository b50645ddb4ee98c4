import json
import subprocess
import sys

import pytest

from crystdual.builtins import hantzsche_wendt
from crystdual.cli import main
from crystdual.golden import load_golden


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write_json(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_check_hw(capsys):
    code, out, _ = run(capsys, "check", "--builtin", "hantzsche-wendt", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["torsion_free"] is True


def test_check_trivial_group(capsys, tmp_path):
    path = write_json(tmp_path, "trivial.json", {
        "rank": 1,
        "holonomy": {"labels": ["e"], "mult": [["e"]], "identity": "e"},
        "lin": {"e": [[1]]},
    })
    code, _, _ = run(capsys, "check", "--input", path)
    assert code == 0


def test_check_cocycle_broken(capsys, tmp_path):
    cfg = hantzsche_wendt().to_config()
    cfg["trans"]["x"] = ["1/3", "1/2", "0"]
    path = write_json(tmp_path, "broken.json", cfg)
    code, out, err = run(capsys, "check", "--input", path, "--format", "json")
    assert code == 2
    assert json.loads(out)["error"]["type"] == "CocycleViolation"
    assert "CocycleViolation" in err


def test_missing_file_and_bad_json(capsys, tmp_path):
    code, _, err = run(capsys, "check", "--input", str(tmp_path / "nope.json"))
    assert code == 2 and err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "check", "--input", str(bad))
    assert code == 2 and err


def test_nonpositive_tolerance_rejected(capsys):
    with pytest.raises(SystemExit) as info:
        main(["shielded", "--tolerance", "0"])
    assert info.value.code == 2
    capsys.readouterr()


def test_induce_classical_basis_pretty(capsys):
    code, out, _ = run(capsys, "induce", "--stratum", "(u,1,1)", "--paper-basis")
    assert code == 0
    rows = [line.split() for line in out.splitlines() if line.strip().startswith("[")]
    cells = [[c for c in r if c not in "[]"] for r in rows]
    assert cells == [
        ["a", "0"], ["0", "conj(a)"],
        ["0", "1"], ["1", "0"],
        ["0", "a"], ["conj(a)", "0"],
    ]


def test_induce_generic_json_matches_golden(capsys):
    code, out, _ = run(capsys, "induce", "--stratum", "(u,v,w)", "--paper-basis", "--format", "json")
    assert code == 0
    data = json.loads(out)
    fam = next(f for f in load_golden()["families"] if f["stratum"] == "(u,v,w)")
    text = json.dumps(data)
    for rows in fam["matrices"].values():
        for row in rows:
            for cell in row:
                assert cell in text


def test_induce_inconsistent_extension(capsys):
    code, out, err = run(capsys, "induce", "--stratum", "(-1,1,1)", "--format", "json")
    assert code == 3
    assert json.loads(out)["error"]["type"] == "InconsistentExtension"


def test_bad_transversal_is_validation_error(capsys):
    code, _, _ = run(capsys, "induce", "--stratum", "(u,1,1)", "--transversal", "e,x")
    assert code == 2


def test_shielded_and_orbits(capsys):
    code, out, _ = run(capsys, "shielded", "--format", "json")
    assert code == 0 and json.loads(out)["verdict"] == "Shielded"
    code, out, _ = run(capsys, "orbits", "--format", "json")
    assert code == 0 and len(json.loads(out)["fixed_points"]) == 8


def test_shielded_klein_not_certified(capsys):
    code, out, _ = run(capsys, "shielded", "--builtin", "klein-bottle", "--format", "json")
    assert json.loads(out)["verdict"] == "NotCertified"


def test_embed(capsys):
    code, out, _ = run(capsys, "embed", "--element", "x^2 - 1", "--element", "y - z", "--format", "json")
    assert code == 0
    data = json.loads(out)
    flags = [d["in_relative_augmentation"] for d in data["elements"]]
    assert flags == [{"push_forward": True, "expectation": True}, {"push_forward": False, "expectation": False}]


def test_certify(capsys):
    code, out, _ = run(capsys, "certify", "--builtin", "klein-bottle")
    assert code == 0 and "PASS" in out.upper()
    code, out, _ = run(capsys, "certify", "--format", "json")
    assert code == 3
    assert json.loads(out)["error"]["type"] == "NonCyclicHolonomy"


def test_hw_verify_passes(capsys):
    code, out, _ = run(capsys, "hw-verify", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["items"] and all(i["ok"] for i in data["items"])


def test_hw_verify_single_sign_flip(capsys, tmp_path):
    gold = load_golden()
    fam = next(f for f in gold["families"] if f["stratum"] == "(u,1,1)")
    fam["matrices"]["z"][0][1] = "conj(a)"
    path = write_json(tmp_path, "flipped.json", gold)
    code, out, _ = run(capsys, "hw-verify", "--golden", path, "--format", "json")
    assert code == 4
    failed = [i for i in json.loads(out)["items"] if not i["ok"]]
    assert len(failed) == 1
    assert "pi(z)" in failed[0]["name"]


def test_output_is_deterministic():
    cmd = [sys.executable, "-m", "crystdual", "shielded", "--format", "json"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
