import json
import subprocess
import sys

import numpy as np
import pytest
import yaml

from qpdc.cli import main
from qpdc.io import read_curve_csv, read_matrix_csv, write_amplitude
from qpdc.jsa import JointAmplitude


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_help_lists_every_subcommand():
    res = subprocess.run([sys.executable, "-m", "qpdc.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for name in ("design", "jsa", "schmidt", "temporal", "grating", "measure"):
        assert name in res.stdout


@pytest.mark.parametrize("cmd", ["design", "jsa", "schmidt", "temporal", "grating", "measure"])
def test_subcommand_help(cmd, capsys):
    with pytest.raises(SystemExit) as exc:
        main([cmd, "--help"])
    assert exc.value.code == 0
    assert "--config" in capsys.readouterr().out


def test_schema_dump(capsys):
    code, out, _ = run(capsys, "jsa", "--schema")
    assert code == 0
    assert "instrument" in json.loads(out)


def test_missing_material_section_fails(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("process: {order: 1}\n")
    code, out, err = run(capsys, "design", "--config", str(cfg))
    assert code != 0
    lines = err.strip().splitlines()
    assert len(lines) == 1
    assert lines[0].startswith("qpdc-error: design: config: material")


def test_unknown_key_fails(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("material: {}\npump: {colour: red}\n")
    code, _, err = run(capsys, "jsa", "--config", str(cfg))
    assert code == 2
    assert "pump.colour" in err


def test_missing_config_flag(capsys):
    code, _, err = run(capsys, "design")
    assert code == 2 and err.startswith("qpdc-error: design: config:")


def test_infeasible_design_reports_stage(tmp_path, capsys):
    (tmp_path / "m.yaml").write_text("label: anomalous\nvalid_range: [0.3, 3.0]\n"
                                     "coefficients: {A: 4.0, F: -0.5}\n")
    (tmp_path / "c.yaml").write_text("material: {file: m.yaml}\nprocess: {direction: co, order: 1}\n")
    code, _, err = run(capsys, "design", "--config", str(tmp_path / "c.yaml"))
    assert code == 1
    assert err.startswith("qpdc-error: design: design:") and "infeasible" in err


def test_design_paper_rows(config_dir, capsys):
    code, out, _ = run(capsys, "design", "--config", str(config_dir / "paper.yaml"))
    assert code == 0
    report = json.loads(out)
    periods = {row["order"]: row["period_um"] for row in report["periods"]}
    assert sorted(periods) == [1, 3, 5]
    assert periods[1] == pytest.approx(0.34, rel=0.05)
    assert periods[5] == pytest.approx(1.70, rel=0.05)
    assert 1.0 < report["analytic_bandwidths"]["idler_GHz"] < 2.0


def test_design_toy_closed_form(config_dir, capsys):
    code, out, _ = run(capsys, "design", "--config", str(config_dir / "toy.yaml"))
    assert code == 0
    for row in json.loads(out)["periods"]:
        # counter, degenerate, n = 2.2: k_p - k_s + k_i = 2 pi n / lp, so period = m lp / n
        assert row["period_um"] == pytest.approx(row["order"] * 0.765 / 2.2, rel=1e-12)


def test_jsa_is_deterministic_and_writes_resolved_config(config_dir, tmp_path, capsys):
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        code, _, _ = run(capsys, "jsa", "--config", str(config_dir / "toy.yaml"), "--out", str(out))
        assert code == 0
        outs.append(out)
    assert (outs[0] / "jsi.csv").read_bytes() == (outs[1] / "jsi.csv").read_bytes()
    assert (outs[0] / "resolved_config.yaml").exists()
    jsi_m, rows, cols, meta = read_matrix_csv(outs[0] / "jsi.csv")
    assert jsi_m.shape == (256, 256) and meta["quantity"] == "jsi"
    assert np.sum(jsi_m) * (rows[1] - rows[0]) * (cols[1] - cols[0]) == pytest.approx(1.0, abs=1e-9)
    summary = json.loads((outs[0] / "jsa_summary.json").read_text())
    assert {"signal_marginal_fwhm_GHz", "idler_marginal_fwhm_GHz", "ridge_slope"} <= set(summary)


def test_schmidt_on_product_fixture(config_dir, tmp_path, capsys):
    s = np.linspace(-1, 1, 32)
    i = np.linspace(-1, 1, 16)
    values = np.outer(np.exp(-s**2 / 0.1), np.exp(-i**2 / 0.3) * np.exp(1j * i))
    fixture = tmp_path / "product.json"
    write_amplitude(fixture, JointAmplitude(values, 195 + s, 196 + i).normalized())
    code, out, _ = run(capsys, "schmidt", "--config", str(config_dir / "toy.yaml"), "--input", str(fixture))
    assert code == 0
    report = json.loads(out)
    assert report["schmidt_number"] == pytest.approx(1.0, abs=1e-6)
    assert report["purity"] == pytest.approx(1.0, abs=1e-6)


def test_schmidt_bad_input_reports_load_stage(config_dir, tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema": "nope"}')
    code, _, err = run(capsys, "schmidt", "--config", str(config_dir / "toy.yaml"), "--input", str(bad))
    assert code == 1
    assert err.startswith("qpdc-error: schmidt: load:")


def short_config(config_dir, tmp_path, name, length_mm=1.0):
    # the shipped lengths make the mismatch sweep take seconds; 1 mm keeps tests fast
    data = yaml.safe_load((config_dir / name).read_text())
    data["process"]["length_mm"] = length_mm
    path = tmp_path / f"short_{name}"
    path.write_text(yaml.safe_dump(data))
    return path


def test_grating_table(config_dir, tmp_path, capsys):
    out = tmp_path / "g"
    cfg = short_config(config_dir, tmp_path, "toy.yaml")
    code, _, _ = run(capsys, "grating", "--config", str(cfg), "--out", str(out))
    assert code == 0
    table = read_curve_csv(out / "grating_coefficients.csv")
    m = table["order"]
    assert list(m) == [1, 2, 3, 4, 5, 6]
    expected = 2 / (m * np.pi) * np.abs(np.sin(m * np.pi / 2))
    assert np.allclose(table["fourier_coefficient"], expected, rtol=1e-14, atol=1e-16)
    assert (out / "pattern.txt").read_text().startswith("# qpdc-domains v1")


def test_grating_jitter_is_seed_deterministic(config_dir, tmp_path, capsys):
    texts = []
    cfg = short_config(config_dir, tmp_path, "jitter.yaml")
    for k, seed in enumerate(("3", "3", "4")):
        out = tmp_path / f"j{k}"
        code, _, _ = run(capsys, "grating", "--config", str(cfg),
                         "--out", str(out), "--seed", seed)
        assert code == 0
        texts.append((out / "pattern.txt").read_bytes())
    assert texts[0] == texts[1]
    assert texts[0] != texts[2]


def test_temporal_and_measure_from_exports(config_dir, tmp_path, capsys):
    src = tmp_path / "jsa"
    assert run(capsys, "jsa", "--config", str(config_dir / "toy.yaml"), "--out", str(src))[0] == 0
    code, out, _ = run(capsys, "temporal", "--config", str(config_dir / "toy.yaml"),
                       "--input", str(src / "jsa.json"), "--out", str(src))
    assert code == 0
    assert "unconvolved_fwhm_ps" in json.loads(out)
    curve = read_curve_csv(src / "time_difference.csv")
    assert curve["p"].sum() == pytest.approx(1.0, abs=1e-9)
    code, out, _ = run(capsys, "measure", "--config", str(config_dir / "toy.yaml"),
                       "--input", str(src), "--out", str(tmp_path / "m"))
    assert code == 0
    summary = json.loads(out)
    assert {"transmitted_fraction", "tof_resolution_nm", "convolved_fwhm_ps"} <= set(summary)
    assert (tmp_path / "m" / "measured_jsi.csv").exists()


def test_console_script_runs(config_dir):
    res = subprocess.run(["qpdc", "design", "--config", str(config_dir / "toy.yaml")],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert json.loads(res.stdout)["direction"] == "counter"
