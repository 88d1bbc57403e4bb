import csv
import io
import json
import math
import subprocess
import sys

import pytest

from cvqkd import _kernel
from cvqkd.cli import main
from golden_cases import CASES, GOLDEN_DIR, run_cli


def _numbers_close(a, b, rel=1e-9):
    if isinstance(a, dict):
        assert a.keys() == b.keys()
        for k in a:
            _numbers_close(a[k], b[k], rel)
    elif isinstance(a, list):
        assert len(a) == len(b)
        for x, y in zip(a, b):
            _numbers_close(x, y, rel)
    elif isinstance(a, float) and not isinstance(b, bool):
        assert a == pytest.approx(b, rel=rel)
    else:
        assert a == b


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, tmp_path):
    code, out, csvs = run_cli(CASES[name], tmp_path)
    assert code == 0
    golden = (GOLDEN_DIR / f"{name}.json").read_text()
    recorded = json.loads(golden)
    kernel = recorded["engine"].get("kernel")
    if kernel is None or kernel == _kernel.BACKEND:
        assert out == golden
    else:
        # normals differ by an ulp between kernels; compare numerically
        got = json.loads(out)
        got["engine"].pop("kernel")
        recorded["engine"].pop("kernel")
        _numbers_close(got, recorded)
    expected_csv = sorted(p.name.split("__", 1)[1] for p in GOLDEN_DIR.glob(f"{name}__*.csv"))
    assert sorted(csvs) == expected_csv
    for fname, text in csvs.items():
        assert text == (GOLDEN_DIR / f"{name}__{fname}").read_text()


def _run(argv, tmp_path):
    code, out, csvs = run_cli(argv, tmp_path)
    return code, (json.loads(out) if out else None), csvs


def test_bounds_values(tmp_path):
    _, env, _ = _run(CASES["bounds_coherent_te"], tmp_path)
    assert env["results"]["t_b_max"] == pytest.approx(0.92)
    _, env, _ = _run(CASES["bounds_squeezed"], tmp_path)
    assert env["results"]["t_e_max"] == pytest.approx(0.0909, abs=1e-4)
    _, env, _ = _run(CASES["bounds_lossy"], tmp_path)
    assert env["results"]["t_b_max"] == pytest.approx(0.14728682170542634, rel=1e-12)
    assert env["results"]["bob_extractable"] is True
    assert env["results"]["v_e"] * env["results"]["v_b"] == pytest.approx(1.0)


def test_printed_form_noted(tmp_path):
    _, env, _ = _run(["bounds", "--protocol", "squeezed", "--te", "0.05", "--printed-form"], tmp_path)
    assert any("printed" in n for n in env["provenance"])
    assert env["parameters"]["printed_form"] is True


def test_curve_anchors(tmp_path):
    _, env, csvs = _run(CASES["curve_vn005"], tmp_path)
    end = env["results"]["files"][0]["endpoint"]
    assert end["eve_ber"] == pytest.approx(0.24, abs=0.005)
    assert end["bob_ber"] == pytest.approx(0.24, abs=0.005)
    rows = list(csv.DictReader(io.StringIO(csvs["squeezed_vn0.05_eta1.csv"])))
    assert len(rows) == 200 and list(rows[0]) == ["eve_ber", "bob_ber", "t_e", "t_b", "v_e"]


def test_curve_vn1_endpoint(tmp_path):
    _, env, _ = _run(CASES["curve_vn1"], tmp_path)
    end = env["results"]["files"][0]["endpoint"]
    assert end["t_e"] == pytest.approx(2 / 3) and end["t_b"] == pytest.approx(2 / 3)


def test_curve_two_points(tmp_path):
    _, _, csvs = _run(CASES["curve_points2"], tmp_path)
    rows = list(csv.DictReader(io.StringIO(csvs["squeezed_vn0.05_eta1.csv"])))
    assert len(rows) == 2
    assert float(rows[0]["eve_ber"]) > float(rows[1]["eve_ber"])
    assert float(rows[0]["bob_ber"]) < float(rows[1]["bob_ber"])


def test_curve_single_quanta(tmp_path):
    _, env, csvs = _run(CASES["curve_loss_family"], tmp_path)
    assert "single_quanta.csv" in csvs
    assert any("approximation" in n for n in env["provenance"])
    assert len(csvs) == 4


def test_simulate_examples(tmp_path):
    _, env, _ = _run(CASES["simulate_tap"], tmp_path)
    r = env["results"]
    assert r["ber_alice_eve"]["value"] == pytest.approx(0.25, abs=0.01)
    assert r["ber_alice_bob"]["value"] == pytest.approx(0.017, abs=0.001)
    assert r["pass"] is True
    _, env, _ = _run(CASES["simulate_teleport"], tmp_path)
    r = env["results"]
    assert r["eve_penalty"]["v_plus"] == pytest.approx(3.0, rel=0.03)
    assert r["bob_penalty"]["v_plus"] == pytest.approx(1 / 3, rel=0.03)
    assert r["pass"] is True


def test_simulate_guess(tmp_path):
    _, env, _ = _run(["simulate", "--strategy", "guess", "--symbols", "200000", "--snr-db", "40"], tmp_path)
    assert env["results"]["ber_alice_bob"]["value"] == pytest.approx(0.25, abs=0.005)


def test_envelope_replay(tmp_path):
    _, out1, _ = run_cli(["simulate", "--symbols", "50000", "--strategy", "split"], tmp_path)
    env = json.loads(out1)
    assert env["command"][-2:] == ["--seed", "0"]
    _, out2, _ = run_cli(env["command"][1:], tmp_path)
    assert json.loads(out2)["results"] == env["results"]


def test_seed_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("CVQKD_SEED", "123")
    _, env, _ = _run(["simulate", "--symbols", "20000"], tmp_path)
    assert env["seed"] == 123 and env["command"][-2:] == ["--seed", "123"]
    _, explicit, _ = _run(["simulate", "--symbols", "20000", "--seed", "123"], tmp_path)
    assert explicit["results"] == env["results"]
    _, other, _ = _run(["simulate", "--symbols", "20000", "--seed", "5"], tmp_path)
    assert other["seed"] == 5


@pytest.mark.parametrize("argv,code", [
    ([], 2),
    (["bogus"], 2),
    (["bounds", "--protocol", "coherent", "--vn", "0.1"], 2),
    (["bounds", "--eta", "0"], 2),
    (["curve", "--points", "1", "--out", "out"], 2),
    (["curve", "--vn-list", "a,b", "--out", "out"], 2),
    (["simulate", "--symbols", "x"], 2),
    (["teleport"], 2),
    (["teleport", "--pump-gain", "1"], 4),
    (["teleport", "--pump-gain", "0.5"], 4),
    (["simulate", "--strategy", "teleport:1", "--symbols", "100"], 4),
    (["simulate", "--strategy", "tap:2", "--symbols", "100"], 4),
    (["bounds", "--protocol", "squeezed", "--te", "0.2"], 4),
])
def test_exit_codes(argv, code, tmp_path, capsys):
    assert run_cli(argv, tmp_path)[0] == code


def test_seed_env_invalid(tmp_path, monkeypatch):
    monkeypatch.setenv("CVQKD_SEED", "nope")
    assert run_cli(["simulate", "--symbols", "100"], tmp_path)[0] == 2


def test_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["curve", "--out", str(blocker / "sub")]) == 3


def test_infinite_values_are_strings(tmp_path):
    _, env, _ = _run(["bounds", "--protocol", "squeezed", "--te", "0"], tmp_path)
    assert env["results"]["v_e"] == "inf"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cvqkd", "teleport", "--pump-gain", "5"], capture_output=True, text=True)
    assert proc.returncode == 0
    r = json.loads(proc.stdout)["results"]
    assert r["v_e"] == 9.0 and math.isclose(r["v_b"], 1 / 9)
