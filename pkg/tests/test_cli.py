import json

import numpy as np
import pytest

from lichlab.cli import main, read_xy_csv
from lichlab.config import ConfigError, RunConfig, canonical_json


@pytest.fixture
def bad_sigma(tmp_path):
    raw = json.loads(json.dumps(RunConfig.bundled("pinched").raw))
    raw["coefficients"]["sigma"] = 0.5
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(raw))
    return p


def test_sigma_validation(bad_sigma, capsys):
    assert main(["solve", "--config", str(bad_sigma), "--out", str(bad_sigma.parent / "o")]) == 4
    assert "sigma > 1" in capsys.readouterr().err


def test_tau_validation():
    raw = json.loads(json.dumps(RunConfig.bundled("pinched").raw))
    raw["coefficients"]["tau"] = 1.0
    with pytest.raises(ConfigError, match="tau < 1"):
        RunConfig.from_dict(raw)


def test_missing_config(tmp_path):
    assert main(["solve", "--config", str(tmp_path / "nope.json"), "--quiet"]) == 4


def test_solve_pinched_writes_ones(tmp_path):
    out = tmp_path / "solve"
    assert main(["solve", "--config", "pinched", "--out", str(out), "--quiet"]) == 0
    _, _, r, u = read_xy_csv(out / "solution.csv")
    assert np.all(u == 1.0)
    rep = json.loads((out / "solve.json").read_text())
    assert rep["report"]["residual_max"] < 1e-8
    assert rep["config_hash"] == RunConfig.bundled("pinched").hash
    assert rep["tolerances"]["solver_residual"] == 1e-8


def test_artifacts_are_deterministic(tmp_path):
    for k in ("a", "b"):
        assert main(["oscillate", "--config", "pinched", "--out", str(tmp_path / k), "--quiet"]) == 0
    for name in ("oscillation.json", "trace.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    head = (tmp_path / "a" / "trace.csv").read_text().splitlines()[0]
    assert head == "t,beta,dbeta"


def test_json_is_sorted_and_strict(tmp_path):
    assert main(["spectrum", "--config", "pinched", "--out", str(tmp_path), "--quiet",
                 "--grid-n", "400"]) == 0
    text = (tmp_path / "spectrum.json").read_text()
    data = json.loads(text)
    assert canonical_json(data) == text
    assert data["grid_n"] == 400


def test_hypotheses_exit_codes(tmp_path):
    assert main(["hypotheses", "--config", "theorem_a", "--out", str(tmp_path / "a"), "--quiet"]) == 0
    tab = json.loads((tmp_path / "a" / "hypotheses.json").read_text())
    assert tab["ok"] and all(v["ok"] for v in tab["sections"]["theorem_a"].values())
    raw = json.loads(json.dumps(RunConfig.bundled("theorem_a").raw))
    raw["hypotheses"]["targets"] = ["a_priori"]
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(raw))
    assert main(["hypotheses", "--config", str(p), "--out", str(tmp_path / "b"), "--quiet"]) == 2
    assert (tmp_path / "b" / "hypotheses.json").exists()


def test_hypothesis_error_writes_report(tmp_path):
    raw = json.loads(json.dumps(RunConfig.bundled("theorem_a").raw))
    raw["maximal"]["subsolution"] = {"kind": "yamabe", "R1": 0.2, "n": 1000}
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(raw))
    assert main(["maximal", "--config", str(p), "--out", str(tmp_path / "o"), "--quiet"]) == 2
    err = json.loads((tmp_path / "o" / "maximal.error.json").read_text())
    assert err["kind"] == "hypothesis"


@pytest.mark.parametrize("cmd", ["model", "bounds", "compare", "barrier"])
def test_other_commands(cmd, tmp_path):
    assert main([cmd, "--config", "pinched", "--out", str(tmp_path), "--quiet"]) == 0


def test_maximal_theorem_b(tmp_path):
    assert main(["maximal", "--config", "theorem_b", "--out", str(tmp_path), "--quiet"]) == 0
    _, _, r, u = read_xy_csv(tmp_path / "maximal.csv")
    _, _, rs, us = read_xy_csv(tmp_path / "subsolution.csv")
    assert np.all(u >= np.interp(r, rs, us) - 1e-9)


def test_plot(tmp_path):
    csv = tmp_path / "u.csv"
    csv.write_text("r,u\n0,1\n1,1\n2,1\n")
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert main(["plot", str(csv), "--out", str(a), "--quiet"]) == 0
    assert main(["plot", str(csv), "--out", str(b), "--quiet"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().lstrip().startswith("<?xml")
    empty = tmp_path / "e.csv"
    empty.write_text("r,u\n")
    assert main(["plot", str(empty), "--out", str(tmp_path / "e.svg")]) == 4
    wrong = tmp_path / "w.csv"
    wrong.write_text("x,y\n1,2\n")
    assert main(["plot", str(wrong), "--out", str(tmp_path / "w.svg")]) == 4


def test_plot_trace_with_envelope(tmp_path):
    assert main(["oscillate", "--config", "pinched", "--out", str(tmp_path), "--quiet"]) == 0
    out = tmp_path / "trace.svg"
    assert main(["plot", str(tmp_path / "trace.csv"), "--out", str(out), "--logx", "--logy",
                 "--envelope", "--quiet"]) == 0
    assert out.stat().st_size > 1000
