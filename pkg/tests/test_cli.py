import json

import numpy as np
import pytest

from optostore import presets
from optostore.cli import main
from optostore.figures import BUILDERS, read_csv
from optostore.fitting import fit_exponential


def test_simulate_writes_trajectory_and_manifest(tmp_path):
    out = tmp_path / "a"
    assert main(["simulate", "--preset", "fig3c", "--out", str(out)]) == 0
    traj = out / "trajectory.csv"
    head = traj.read_text().splitlines()[0]
    assert head == "t_s,re_alpha,im_alpha,re_beta,im_beta,abs_sout_sq"
    man = json.loads((out / "manifest.json").read_text())
    rows = len(traj.read_text().splitlines()) - 1
    assert rows == man["rows"] == round(man["t_end_s"] / man["dt_s"]) + 1
    assert man["version"] and "[resonator]" in man["resolved_config"]
    assert (out / "resolved_config.ini").exists()

    again = tmp_path / "b"
    assert main(["simulate", "--preset", "fig3c", "--out", str(again)]) == 0
    assert traj.read_bytes() == (again / "trajectory.csv").read_bytes()


def test_resolved_config_reruns_identically(tmp_path):
    main(["simulate", "--preset", "fig1c", "--out", str(tmp_path / "a")])
    cfg = tmp_path / "a" / "resolved_config.ini"
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "b")]) == 0
    assert ((tmp_path / "a" / "trajectory.csv").read_bytes()
            == (tmp_path / "b" / "trajectory.csv").read_bytes())


def test_bad_key_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[resonator]\nkapa = 40 MHz\n")
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "kapa" in err and "kappa" in err


def test_validate_lists_all_violations(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[resonator]\nkappa_ex = 60 MHz\ngamma_m = -1 kHz\n")
    assert main(["validate", "--config", str(cfg)]) == 2
    out = capsys.readouterr().out
    assert "kappa_ex exceeds kappa" in out and "gamma_m" in out
    assert main(["validate", "--preset", "fig2a"]) == 0


def test_simulation_error_exit_code(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[integrator]\ndt = 10 ns\n")
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 3


def test_fit_error_exit_code(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[experiment]\npreset = fig2b\ndelays = 1 us, 2 us\n")
    assert main(["sweep", "delay", "--config", str(cfg), "--out", str(tmp_path)]) == 4


def test_delay_sweep(tmp_path):
    assert main(["sweep", "delay", "--out", str(tmp_path), "--workers", "4"]) == 0
    data = read_csv(tmp_path / "sweep_delay.csv")
    assert len(data["swept_value"]) == 24
    assert {"swept_value", "retrieved_energy", "normalized_energy"} <= set(data)
    summary = (tmp_path / "fit_summary.txt").read_text()
    assert "tau = " in summary and " s" in summary


def test_detuning_sweep_two_intensities(tmp_path):
    cfg = tmp_path / "d.ini"
    cfg.write_text("[experiment]\npreset = fig3b\ndetunings = -1.5 MHz .. 1.5 MHz step 0.25 MHz\n")
    assert main(["sweep", "detuning", "--config", str(cfg), "--out", str(tmp_path), "--workers", "4"]) == 0
    a = read_csv(tmp_path / "sweep_detuning_I1.csv")["normalized_energy"]
    b = read_csv(tmp_path / "sweep_detuning_I0.45.csv")["normalized_energy"]
    assert np.max(np.abs(a - b)) < 0.03
    assert "fwhm = " in (tmp_path / "fit_summary.txt").read_text()


def test_readout_duration_profiles(tmp_path):
    assert main(["sweep", "readout-duration", "--out", str(tmp_path), "--workers", "3"]) == 0
    for d in ("0.3", "0.6", "1.4"):
        prof = read_csv(tmp_path / f"profile_readout_{d}us.csv")
        assert set(prof) == {"gate_delay_s", "detected_power"}
    assert len(read_csv(tmp_path / "sweep_readout_duration.csv")["swept_value"]) == 3


def test_readout_intensity_sweep(tmp_path):
    cfg = tmp_path / "i.ini"
    cfg.write_text("[experiment]\npreset = fig3a\nrelative_intensities = 0.1, 1, 10\n")
    assert main(["sweep", "readout-intensity", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    e = read_csv(tmp_path / "sweep_readout_intensity.csv")["retrieved_energy"]
    assert np.all(np.diff(e) > 0)


@pytest.fixture(scope="module")
def bundle(tmp_path_factory):
    out = tmp_path_factory.mktemp("figures")
    assert main(["figures", "--out", str(out), "--workers", "4"]) == 0
    return out


def test_bundle_has_every_figure(bundle):
    csvs = sorted(p.stem for p in bundle.glob("*.csv"))
    assert csvs == sorted(BUILDERS) and len(csvs) == 10
    assert (bundle / "plot_figures.py").exists()
    compile((bundle / "plot_figures.py").read_text(), "plot_figures.py", "exec")


def test_bundle_fig2b_refit(bundle):
    data = read_csv(bundle / "fig2b.csv")
    tau = fit_exponential(data["swept_value"], data["retrieved_energy"])["tau"]
    text = (bundle / "summary.txt").read_text()
    bundled = float(text.split("[fig2b]")[1].split("tau_s = ")[1].split()[0])
    assert tau == pytest.approx(bundled, rel=1e-9)


def test_bundle_supp2a_overlay(bundle):
    data = read_csv(bundle / "supp2a.csv")
    a, b = data["normalized_readout_0.7MHz"], data["normalized_readout_5MHz"]
    assert np.max(np.abs(a - b)) < 0.03
    assert len(data["detuning_hz"]) == len(presets.DETUNINGS)
