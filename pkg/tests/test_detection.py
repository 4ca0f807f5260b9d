import math
from dataclasses import replace

import numpy as np
import pytest

from optostore import presets
from optostore.detection import (BeatSignal, GateConfig, GatedAnalyzer, PowerSpectrum,
                                 gate_scan, gated_power_spectrum, heterodyne_beat,
                                 noise_bandwidth, output_field, rbw_response,
                                 spectrally_integrated_power)
from optostore.dynamics import IntegratorConfig, integrate
from optostore.errors import DomainError
from optostore.experiments import simulate
from optostore.model import DriveConfig, ResonatorParams, angular
from optostore.pulses import PulseSequence, PulseSpec, signal_like

us = 1e-6
OMEGA = presets.PAPER_PARAMS.f_m


def test_empty_cavity_reflects():
    s = np.array([1 + 2j, -3.0])
    assert np.array_equal(output_field(np.zeros(2), s, 20e6), -s)


def test_pure_emission():
    a = np.array([0.5j, 2.0])
    assert np.allclose(output_field(a, 0.0, 20e6), math.sqrt(angular(20e6)) * a)


def test_rbw_is_power_fwhm():
    assert rbw_response(0.5e6, 1e6) == pytest.approx(0.5)
    assert noise_bandwidth(1e6) == pytest.approx(1.0645e6, rel=1e-4)


def tone(t, f, amp=math.sqrt(2), phase=0.3):
    return amp * np.cos(2 * math.pi * f * t + phase)


def test_parseval_unit_tone():
    t = np.arange(0, 20 * us, 1e-10)
    beat = BeatSignal(t, tone(t, OMEGA), OMEGA, 0.0)
    sp = gated_power_spectrum(beat, GateConfig(gate_delay=5 * us, gate_length=10 * us))
    assert spectrally_integrated_power(sp) == pytest.approx(1.0, rel=1e-6)


def test_band_limited_mean_square():
    t = np.arange(0, 20 * us, 1e-10)
    x = tone(t, OMEGA - 2e6) + 0.5 * np.cos(2 * math.pi * (OMEGA + 1.7e6) * t) + 3.0
    beat = BeatSignal(t, x, OMEGA, 0.0)
    sp = gated_power_spectrum(beat, GateConfig(gate_delay=5 * us, gate_length=3 * us))
    assert spectrally_integrated_power(sp) == pytest.approx(1.0 + 0.125, rel=0.01)


def test_gate_resolves_two_bursts():
    t = np.arange(0, 16 * us, 2e-10)
    env = ((t >= 2 * us) & (t < 3 * us)) | ((t >= 8.5 * us) & (t < 9.5 * us))
    beat = BeatSignal(t, tone(t, OMEGA) * env, OMEGA, 2 * us)
    delays = np.arange(-2.0, 9.0, 0.1) * us
    p = gate_scan(beat, GateConfig(), delays)
    peaks = [i for i in range(1, len(p) - 1) if p[i] >= p[i - 1] and p[i] > p[i + 1] and p[i] > 0.5 * p.max()]
    assert len(peaks) == 2
    dip = p[peaks[0]:peaks[1]].min()
    assert dip < 0.1 * p.max()


def test_integrated_power_edge_cases():
    f = np.linspace(0, 1, 5)
    assert spectrally_integrated_power(PowerSpectrum(f, np.zeros(5), 0.0, 0.25)) == 0.0
    d = np.zeros(5)
    d[2] = 3.0
    assert spectrally_integrated_power(PowerSpectrum(f, d, 0.0, 0.25)) == pytest.approx(0.75)


def test_gate_outside_record():
    t = np.arange(0, 5 * us, 1e-9)
    beat = BeatSignal(t, np.zeros_like(t), 10e6, 0.0)
    with pytest.raises(DomainError):
        gated_power_spectrum(beat, GateConfig(gate_delay=3 * us))


def test_gate_config_validation():
    with pytest.raises(DomainError):
        GateConfig(gate_length=0)
    with pytest.raises(DomainError):
        GateConfig(bin_spacing=0.5e6)
    assert GateConfig().spacing == 125e3


def pm_only_run(t_total=14 * us, lo_on=(1 * us, 13 * us)):
    """Phase-modulated LO with the cavity decoupled from the output."""
    p = replace(presets.PAPER_PARAMS, kappa_ex=0.0)
    w = PulseSpec("writing", lo_on[0], lo_on[1] - lo_on[0], 0.0, 0.2 * us)
    s_w = 1e8
    seq = PulseSequence((w, signal_like(w, 0.01 * s_w)))
    tr = integrate(p, DriveConfig.at_detuning(p), seq, IntegratorConfig(t_end=t_total))
    lo = s_w * w.shape(tr.t).astype(complex)
    return tr, lo, s_w


def test_phase_modulation_alone_gives_no_beat():
    tr, lo, s_w = pm_only_run()
    beat = heterodyne_beat(tr, lo, OMEGA)
    plateau = (tr.t > 1.5 * us) & (tr.t < 12.5 * us)
    assert np.allclose(beat.power[plateau], s_w ** 2, rtol=1e-12)
    sp = gated_power_spectrum(beat, GateConfig(gate_delay=4 * us, gate_length=3 * us))
    assert spectrally_integrated_power(sp) / s_w ** 4 < 1e-9


def test_zero_lo_leaves_cavity_emission():
    cfg = presets.fig2a()
    tr = simulate(cfg)
    beat = heterodyne_beat(tr, np.zeros(len(tr), complex), OMEGA)
    r = (tr.t > cfg.readout.t_start) & (tr.t < cfg.readout.end)
    assert np.allclose(beat.power[r], angular(cfg.params.kappa_ex) * np.abs(tr.alpha[r]) ** 2, rtol=1e-12)


def test_steady_state_beat_amplitude():
    p = ResonatorParams(kappa=40e6, kappa_ex=10e6)
    s_w, M = 1e8, 0.02
    P = 0.5 * M * s_w
    w = PulseSpec("writing", 0.0, 4 * us, 0.0, 0.0)
    seq = PulseSequence((w, signal_like(w, P)))
    tr = integrate(p, DriveConfig.at_detuning(p), seq, IntegratorConfig(t_end=4 * us))
    beat = heterodyne_beat(tr, np.full(len(tr), s_w, complex), OMEGA)
    alpha = 2 * math.sqrt(angular(p.kappa_ex)) * P / angular(p.kappa)
    a_c = math.sqrt(angular(p.kappa_ex)) * alpha - P
    expect = 2 * s_w * abs(P + np.conj(a_c))
    n_per = round(1 / (OMEGA * tr.dt))
    m = (tr.t >= 1 * us) & (tr.t < 1 * us + 200 / OMEGA)
    tt, pw = tr.t[m], beat.power[m] - beat.power[m].mean()
    got = 2 * abs(np.mean(pw * np.exp(2j * math.pi * OMEGA * tt)))
    assert got == pytest.approx(expect, rel=1e-3)
    assert n_per > 10


def test_analyzer_reuse_matches_single_gate():
    t = np.arange(0, 12 * us, 1e-10)
    beat = BeatSignal(t, tone(t, OMEGA) * (t > 4 * us), OMEGA, 0.0)
    an = GatedAnalyzer(beat)
    one = gated_power_spectrum(beat, GateConfig(gate_delay=3 * us))
    assert np.allclose(an.spectrum(3 * us, 3 * us).density, one.density)
