import json

import numpy as np

from graphspectra.cli import main


def run_cli(*argv):
    return main(list(argv))


def test_sample_writes_symmetric_csv(tmp_path):
    out = tmp_path / "a.csv"
    assert run_cli("sample", "--n", "12", "--law", "rademacher",
                   "--seed", "7", "--out", str(out)) == 0
    mat = np.loadtxt(out, delimiter=",")
    assert mat.shape == (12, 12)
    assert np.array_equal(mat, mat.T)
    assert np.all(np.diag(mat) == 0)


def test_eig_and_esd_outputs(tmp_path):
    eig_out = tmp_path / "spec.csv"
    assert run_cli("eig", "--n", "50", "--law", "gaussian", "--mu", "0",
                   "--sigma", "1", "--seed", "3", "--laplacian",
                   "--out", str(eig_out)) == 0
    ev = np.loadtxt(eig_out, delimiter=",")
    assert ev.size == 50 and np.all(np.diff(ev) <= 0)

    hist_out = tmp_path / "hist.csv"
    assert run_cli("esd", "--n", "60", "--law", "rademacher", "--seed", "3",
                   "--bins", "15", "--out", str(hist_out)) == 0
    header = hist_out.read_text().splitlines()[0]
    assert header == "bin_left,bin_right,count,density"


def test_limit_grid_csv(tmp_path):
    out = tmp_path / "sc.csv"
    assert run_cli("limit", "--family", "semicircle", "--out", str(out)) == 0
    data = np.genfromtxt(out, delimiter=",", names=True)
    assert abs(np.trapezoid(data["pdf"], data["x"]) - 1.0) < 1e-3


def test_limit_grid_convolution_family(tmp_path):
    out = tmp_path / "scn.csv"
    assert run_cli("limit", "--family", "semicircle-normal",
                   "--step", "0.05", "--out", str(out)) == 0
    data = np.genfromtxt(out, delimiter=",", names=True)
    assert abs(np.trapezoid(data["pdf"], data["x"]) - 1.0) < 2e-3
    assert abs(np.trapezoid(data["pdf"] * data["x"] ** 2, data["x"]) - 2.0) < 0.02


def test_oracle_prints_summary(capsys):
    assert run_cli("oracle", "--n", "3", "--r", "2", "--law", "rademacher") == 0
    out = capsys.readouterr().out
    assert "circuits:" in out and "12" in out


def test_exp_replay_cycle(tmp_path):
    cfg = {
        "name": "thm3_semicircle",
        "n_grid": [40],
        "trials": 2,
        "law_spec": {"law": {"kind": "centered_bernoulli", "p": 0.5}},
        "master_seed": 9,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    record_path = tmp_path / "record.json"
    assert run_cli("exp", "--config", str(cfg_path),
                   "--out", str(record_path)) == 0
    assert run_cli("replay", "--record", str(record_path)) == 0


def test_exp_flag_overrides(tmp_path):
    cfg = {
        "name": "lemma_rowsums",
        "n_grid": [30],
        "trials": 1,
        "law_spec": {"law": {"kind": "rademacher"}},
        "master_seed": 9,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    record_path = tmp_path / "record.json"
    assert run_cli("exp", "--config", str(cfg_path), "--trials", "3",
                   "--seed", "11", "--out", str(record_path)) == 0
    payload = json.loads(record_path.read_text())
    assert payload["config"]["trials"] == 3
    assert payload["config"]["master_seed"] == 11


def test_exit_codes():
    # unknown experiment name -> config error (2)
    import tempfile, os
    with tempfile.TemporaryDirectory() as tmp:
        bad = os.path.join(tmp, "bad.json")
        with open(bad, "w") as fh:
            json.dump({"name": "nope", "n_grid": [10], "trials": 1,
                       "law_spec": {"law": {"kind": "rademacher"}}}, fh)
        assert run_cli("exp", "--config", bad) == 2
        # degenerate law in a theorem that forbids it -> precondition (3)
        cfg = os.path.join(tmp, "degen.json")
        with open(cfg, "w") as fh:
            json.dump({"name": "thm2_gamma_m", "n_grid": [20], "trials": 1,
                       "law_spec": {"law": {"kind": "bernoulli", "p": 1.0}}},
                      fh)
        assert run_cli("exp", "--config", cfg) == 3


def test_report_renders_figures(tmp_path):
    cfg = {
        "name": "lemma_rowsums",
        "n_grid": [30, 60],
        "trials": 3,
        "law_spec": {"law": {"kind": "rademacher"}},
        "master_seed": 1,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    record_path = tmp_path / "rowsums.json"
    assert run_cli("exp", "--config", str(cfg_path),
                   "--out", str(record_path)) == 0
    fig_dir = tmp_path / "figs"
    assert run_cli("report", "--record", str(record_path),
                   "--out-dir", str(fig_dir)) == 0
    pngs = sorted(p.name for p in fig_dir.glob("*.png"))
    assert pngs == ["lemma_rowsums_s1_dev_over_n2.png",
                    "lemma_rowsums_s2_dev_over_n2.png"]


def test_esd_png_flag(tmp_path):
    hist = tmp_path / "h.csv"
    png = tmp_path / "h.png"
    assert run_cli("esd", "--n", "80", "--law", "rademacher", "--seed", "1",
                   "--laplacian", "--bins", "12",
                   "--out", str(hist), "--png", str(png)) == 0
    assert png.exists() and png.stat().st_size > 0
