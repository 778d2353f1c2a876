import json
import subprocess
import sys

import pytest

from parcohom.cli import main, render
from parcohom.corpus import example


def run(args, tmp_path):
    out = tmp_path / "report.json"
    code = main([*args, "--output", str(out)])
    return code, json.loads(out.read_text())


def test_semigroup_sizes(tmp_path):
    for name, size in (("cyclic(2)", 3), ("cyclic(3)", 8), ("Z/2xZ/2", 20)):
        code, rep = run(["semigroup", name], tmp_path)
        assert code == 0 and rep["size"] == size and len(rep["elements"]) == size


def test_bad_group_table(tmp_path, capsys):
    bad = tmp_path / "g.json"
    bad.write_text(json.dumps({"mul": [[0, 1, 2], [1, 2, 0], [2, 1, 0]]}))
    assert main(["semigroup", str(bad)]) == 2
    assert "error" in capsys.readouterr().err


def test_malformed_json_location(tmp_path, capsys):
    bad = tmp_path / "g.json"
    bad.write_text('{"mul": [[0, 1],\n [1 0]]}')
    assert main(["semigroup", str(bad)]) == 2
    assert "g.json:2:" in capsys.readouterr().err


def test_cohomology_dims(tmp_path):
    code, rep = run(["cohomology", "z2-zero", "--degree", "2", "--all-degrees"], tmp_path)
    assert code == 0 and rep["dims"] == [1, 0, 0]
    code, rep = run(["cohomology", "z2-trivial", "--field", "2", "--degree", "3", "--all-degrees"], tmp_path)
    assert rep["dims"] == [1, 1, 1, 1]


def test_guard_message(capsys):
    assert main(["cohomology", "s3-cosets-2", "--degree", "3", "--guard-dim", "50"]) == 2
    assert "lower n" in capsys.readouterr().err


def test_globalize_zero_and_perturbed(tmp_path):
    zero = tmp_path / "zero.json"
    zero.write_text(json.dumps({"n": 1, "entries": {}}))
    code, rep = run(["globalize", "z2-swap", "--degree", "1", "--cocycle", str(zero)], tmp_path)
    assert code == 0 and rep["globalizations"][0]["u"]["entries"] == {}
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 1, "entries": {"1": [1, 0]}}))
    code, rep = run(["globalize", "z2-swap", "--degree", "1", "--cocycle", str(bad)], tmp_path)
    assert code == 1 and rep["rejected"]["residual"]


def test_globalize_kernel_basis(tmp_path):
    code, rep = run(["globalize", "s3-cosets-2", "--field", "3", "--degree", "2"], tmp_path)
    assert code == 0
    assert all(g["passed"] for g in rep["globalizations"])


def test_envelope(tmp_path):
    code, rep = run(["envelope", "z3-regular-2", "--field", "2", "--transversal-permutation", "1"], tmp_path)
    assert code == 0 and rep["model"]["dim"] == 3


def test_verify_corrupted_action(tmp_path):
    spec = example("z2-swap", "QQ").to_json()
    spec["maps"]["1"]["0"]["matrix"] = [[2]]
    path = tmp_path / "a.json"
    path.write_text(json.dumps(spec))
    code, rep = run(["verify", str(path), "--degree", "1"], tmp_path)
    assert code == 1 and not rep["validate"]["passed"]
    assert "degrees" not in rep


def test_verify_global_and_transversal(tmp_path):
    code, rep = run(["verify", "s3-cosets-2", "--field", "3", "--degree", "2", "--transversal-permutation", "1", "--samples", "3"], tmp_path)
    assert code == 0
    assert rep["dims_H_par"] == rep["dims_H_classical"]
    assert rep["degrees"][1]["transversal"]["differ_by_coboundary"]


def test_render_is_a_view_of_the_json():
    text = render({"checks": {"a": True, "b": False}, "dims": [1, 0]})
    assert "a: PASS" in text and "b: FAIL" in text and "dims: [1, 0]" in text


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "parcohom.cli", "semigroup", "cyclic(3)", "--json"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["size"] == 8


def test_unknown_action(capsys):
    assert main(["verify", "no-such-thing"]) == 2


@pytest.mark.parametrize("seed", [1, 7])
def test_seed_recorded(tmp_path, seed):
    _, rep = run(["verify", "z2-zero", "--degree", "1", "--seed", str(seed), "--samples", "2"], tmp_path)
    assert rep["seed"] == seed
