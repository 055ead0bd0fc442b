import json
import os
import subprocess
import sys
from fractions import Fraction as F

import pytest

from multimarket.cli import main

SRC = os.path.join(os.path.dirname(__file__), "..", "src")


def _subprocess_env():
    env = dict(os.environ)
    env["PYTHONPATH"] = SRC + os.pathsep + env.get("PYTHONPATH", "")
    return env


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


def test_validate_m2(capsys, m2_path):
    code, out = run_cli(capsys, "validate", m2_path)
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"] is True
    assert payload["bound"] == "6"
    assert payload["submarkets"] == ["tau1", "tau2"]


def test_validate_zero_probability_names_the_atom(capsys, tmp_path):
    doc = {
        "tree": {"branching": [2], "atom_probs": {"r.0": "0", "r.1": "1"}},
        "submarkets": [
            {
                "label": "x",
                "dim": 1,
                "numeraire": {"r": "1", "r.0": "1", "r.1": "1"},
                "assets": {"r": ["1"], "r.0": ["1"], "r.1": ["1"]},
            }
        ],
    }
    spec = tmp_path / "bad.json"
    spec.write_text(json.dumps(doc))
    code, out = run_cli(capsys, "validate", str(spec))
    assert code == 2
    payload = json.loads(out)
    assert payload["ok"] is False
    assert "r.0" in payload["issues"][0]["detail"]


def test_arb_exit_codes(capsys, m1_path, m2_path):
    code, out = run_cli(capsys, "arb", m2_path)
    assert code == 0
    assert json.loads(out)["no_free_lunch"] is True
    code, out = run_cli(capsys, "arb", m1_path)
    assert code == 3
    payload = json.loads(out)
    assert payload["no_free_lunch"] is False
    assert payload["witness"]["violating_atoms"]
    code, out = run_cli(capsys, "arb", m1_path, "--submarket", "tau2")
    assert code == 0


def test_deflator_reports_measures(capsys, m2_path):
    code, out = run_cli(capsys, "deflator", m2_path)
    assert code == 0
    payload = json.loads(out)
    assert payload["certificate"]["xstar"] == {"r.0": "2/3", "r.1": "4/3"}
    assert payload["martingale_measures"]["tau2"] == {"r.0": "3/8", "r.1": "5/8"}
    assert payload["state_price_deflators"]["tau2"]["r"] == "16/15"


def test_price_global_m2(capsys, m2_path):
    code, out = run_cli(capsys, "price", m2_path, "--claim", "Stau1", "--venue", "global")
    assert code == 0
    payload = json.loads(out)
    assert payload["price"] == "15/4"
    assert payload["allocation"] == {"tau1": "0", "tau2": "15/4"}
    assert payload["duality_gap"] == "0"


def test_price_submarket_venue_and_float_mode(capsys, m2_path):
    code, out = run_cli(capsys, "price", m2_path, "--claim", "Stau1", "--venue", "submarket:tau2")
    assert json.loads(out)["price"] == "15/4"
    code, out = run_cli(
        capsys, "price", m2_path, "--claim", "Stau1", "--venue", "lower", "--mode", "float"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["price"] == pytest.approx(3.75)
    assert payload["selected_submarket"] == "tau2"


def test_price_on_arbitrage_model_exits_3(capsys, m1_path, tmp_path):
    with open(m1_path) as fh:
        doc = json.load(fh)
    doc["claims"] = [{"label": "H", "payoff": {"r.0": "1", "r.1": "1"}}]
    spec = tmp_path / "m1c.json"
    spec.write_text(json.dumps(doc))
    code = main(["price", str(spec), "--claim", "H", "--venue", "global"])
    assert code == 3


def test_fra_twelve_digits(capsys):
    code, out = run_cli(capsys, "fra", "--bi", "0.99", "--bm", "0.97", "--i", "0.25", "--m", "0.5")
    assert code == 0
    assert out.strip() == "0.0824742268041"


def test_demo_cotrade(capsys, cotrade_path):
    code, out = run_cli(capsys, "demo", "cotrade", cotrade_path)
    assert code == 0
    narrative, _, rest = out.partition("\n{")
    payload = json.loads("{" + rest)
    assert payload["merged_no_free_lunch"] is False
    assert payload["split_no_free_lunch"] is True
    assert "arbitrage" in narrative


def test_verify_emits_identities(capsys, m2_path):
    code, out = run_cli(capsys, "verify", m2_path)
    assert code == 0
    payload = json.loads(out)
    assert payload["no_free_lunch"] is True
    assert payload["ordering"]["Stau1"]["ordered"] is True
    assert payload["two_market"]["swap_formulas"] == "not_applicable"
    assert payload["certificate"]["Stau1"]["ok"] is True


def test_verify_exits_3_on_arbitrage(capsys, m1_path):
    code, out = run_cli(capsys, "verify", m1_path)
    assert code == 3


def test_gen_arbitrage_free_passes_arb(capsys, tmp_path):
    for seed in (1, 3, 8):
        code, out = run_cli(capsys, "gen", "--seed", str(seed), "--arbitrage-free")
        assert code == 0
        spec = tmp_path / f"gen{seed}.json"
        spec.write_text(out)
        code, _ = run_cli(capsys, "arb", str(spec))
        assert code == 0


def test_gen_deterministic_for_fixed_seed(capsys):
    _, one = run_cli(capsys, "gen", "--seed", "5", "--atoms", "3")
    _, two = run_cli(capsys, "gen", "--seed", "5", "--atoms", "3")
    assert one == two


def test_verify_byte_identical_across_runs(m2_path):
    outputs = {
        subprocess.run(
            [sys.executable, "-m", "multimarket.cli", "verify", m2_path],
            capture_output=True,
            check=True,
            env=_subprocess_env(),
        ).stdout
        for _ in range(3)
    }
    assert len(outputs) == 1
