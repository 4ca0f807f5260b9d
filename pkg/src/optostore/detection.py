"""Measurement chain: input-output relation, heterodyne beat, gated spectra.

The gated analyzer filters the continuous photocurrent with a Gaussian
resolution filter centred on each analysis frequency and then averages the
filtered power over the gate, as a swept analyzer in gated mode does.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .model import angular

_LN2 = math.log(2.0)


def output_field(alpha, s_in, kappa_ex):
    """s_out = -s_in + sqrt(kappa_ex) * alpha, kappa_ex given in Hz (/2pi)."""
    if kappa_ex < 0:
        raise DomainError("kappa_ex must be >= 0")
    return -np.asarray(s_in) + math.sqrt(angular(kappa_ex)) * np.asarray(alpha)


def lo_amplitude(params, drive, G, g_times_xzpf):
    """Incident control amplitude (sqrt(photons/s)) producing coupling ``G`` (Hz).

    The control sits omega_0 - omega_l away from the cavity, so
    n_c = kappa_ex |s|^2 / (kappa^2/4 + (omega_0 - omega_l)^2).
    """
    if params.kappa_ex <= 0:
        raise DomainError("no local-oscillator calibration without external coupling")
    n_c = (np.asarray(G, dtype=float) / g_times_xzpf) ** 2
    off = angular(drive.delta_sl + params.f_cavity_offset)
    k = angular(params.kappa)
    return np.sqrt(n_c * (0.25 * k * k + off * off) / angular(params.kappa_ex))


def lo_waveform(traj, g_times_xzpf):
    """LO amplitude on the trajectory grid: the writing/readout pulses themselves."""
    return lo_amplitude(traj.params, traj.drive, traj.g, g_times_xzpf).astype(complex)


def signal_to_control_ratio(params, drive, modulation_depth):
    """Steady-state intracavity signal/control photon ratio for EOM depth M."""
    k2 = 0.25 * angular(params.kappa) ** 2
    off_l = angular(drive.delta_sl + params.f_cavity_offset)
    off_s = angular(params.f_cavity_offset)
    return (0.5 * modulation_depth) ** 2 * (k2 + off_l ** 2) / (k2 + off_s ** 2)


@dataclass(frozen=True, eq=False)
class BeatSignal:
    t: np.ndarray
    power: np.ndarray     # |s_out,total|^2, photons/s
    beat_freq: float
    t_ref: float = 0.0    # writing-pulse rising edge

    @property
    def dt(self):
        return float(self.t[1] - self.t[0])


def heterodyne_beat(traj, lo, beat_freq) -> BeatSignal:
    """Square-law detected power of the full outgoing field.

    The incident field is the LO phase-modulated so that its upper sideband
    equals the trajectory's P_in; the emitted cavity field beats against it
    at ``beat_freq``. A signal present where the LO is off is added as a bare
    sideband.
    """
    lo = np.asarray(lo, dtype=complex)
    if lo.shape != traj.t.shape:
        raise DomainError("LO waveform must be sampled on the trajectory grid")
    t = traj.t
    p = traj.p_in
    on = np.abs(lo) > 0
    depth = np.zeros_like(lo)
    np.divide(2.0 * p, lo, out=depth, where=on)
    phase = angular(beat_freq) * t
    rot = np.exp(-1j * phase)
    s_in_total = lo * np.exp(-1j * depth * np.sin(phase)) + np.where(on, 0.0, p) * rot
    s_out_total = -s_in_total + math.sqrt(angular(traj.params.kappa_ex)) * traj.alpha * rot
    w = traj.seq.writing
    return BeatSignal(t=t, power=np.abs(s_out_total) ** 2, beat_freq=beat_freq,
                      t_ref=w.t_start if w is not None else 0.0)


@dataclass(frozen=True)
class GateConfig:
    gate_delay: float = 0.0
    gate_length: float = 3e-6
    rbw: float = 1e6
    center_freq: Optional[float] = None   # None: the beat frequency
    span: float = 10e6
    bin_spacing: Optional[float] = None   # None: rbw / 8

    def __post_init__(self):
        if not self.gate_length > 0:
            raise DomainError("gate_length must be > 0")
        if not self.rbw > 0:
            raise DomainError("rbw must be > 0")
        if not self.span > 0:
            raise DomainError("span must be > 0")
        if self.bin_spacing is not None and not 0 < self.bin_spacing <= self.rbw / 4:
            raise DomainError("bin_spacing must lie in (0, rbw/4]")

    @property
    def spacing(self):
        return self.bin_spacing if self.bin_spacing is not None else self.rbw / 8


@dataclass(frozen=True, eq=False)
class PowerSpectrum:
    freqs: np.ndarray
    density: np.ndarray    # (photons/s)^2 / Hz
    gate_delay: float
    bin_width: float


def rbw_response(df, rbw):
    """Power response |H|^2 of a Gaussian filter with FWHM ``rbw``."""
    return np.exp(-4.0 * _LN2 * (np.asarray(df) / rbw) ** 2)


def noise_bandwidth(rbw):
    return rbw * math.sqrt(math.pi / (4.0 * _LN2))


class GatedAnalyzer:
    """Filter bank around ``center`` whose output power can be gated repeatedly."""

    def __init__(self, beat: BeatSignal, rbw=1e6, center=None, span=10e6, spacing=None,
                 max_step=5e-9):
        self.beat = beat
        self.rbw = rbw
        self.center = beat.beat_freq if center is None else center
        self.spacing = rbw / 8 if spacing is None else spacing
        half = int(math.floor(0.5 * span / self.spacing + 1e-9))
        self.freqs = self.center + self.spacing * np.arange(-half, half + 1)

        dt = beat.dt
        x = beat.power - beat.power.mean()
        pad = int(math.ceil(4.0 / rbw / dt))
        n = len(x) + 2 * pad
        spec = np.fft.rfft(np.concatenate((np.zeros(pad), x, np.zeros(pad))))
        f = np.fft.rfftfreq(n, dt)
        margin = 4.0 * rbw
        band = (f >= self.freqs[0] - margin) & (f <= self.freqs[-1] + margin)
        j = np.nonzero(band)[0]
        if j.size == 0:
            raise DomainError("analysis band lies outside the sampled bandwidth")
        m = 1 << max(int(math.ceil(math.log2(n * dt / max_step))), int(math.ceil(math.log2(j.size))))
        m = min(m, n)
        amp = np.sqrt(rbw_response(f[j][None, :] - self.freqs[:, None], rbw))
        bank = np.zeros((len(self.freqs), m), dtype=complex)
        bank[:, : j.size] = 2.0 * spec[j][None, :] * amp
        y = np.fft.ifft(bank, axis=1) * (m / n)
        # per-bin density time series; analytic-signal power is |y|^2 / 2
        self.density_t = 0.5 * np.abs(y) ** 2 / noise_bandwidth(rbw)
        self.t = beat.t[0] - pad * dt + np.arange(m) * (n * dt / m)
        self.t_lo = float(beat.t[0])
        self.t_hi = float(beat.t[-1])

    def spectrum(self, gate_delay, gate_length) -> PowerSpectrum:
        t0 = self.beat.t_ref + gate_delay
        t1 = t0 + gate_length
        tol = 1e-12
        if t0 < self.t_lo - tol or t1 > self.t_hi + tol:
            raise DomainError(f"gate [{t0:.3e}, {t1:.3e}] s lies outside the record")
        inner = (self.t > t0) & (self.t < t1)
        tt = np.concatenate(([t0], self.t[inner], [t1]))
        lo = np.array([np.interp(t0, self.t, row) for row in self.density_t])
        hi = np.array([np.interp(t1, self.t, row) for row in self.density_t])
        vals = np.concatenate((lo[:, None], self.density_t[:, inner], hi[:, None]), axis=1)
        density = np.trapezoid(vals, tt, axis=1) / gate_length
        return PowerSpectrum(self.freqs.copy(), np.maximum(density, 0.0), gate_delay, self.spacing)


def gated_power_spectrum(beat: BeatSignal, gate: GateConfig) -> PowerSpectrum:
    an = GatedAnalyzer(beat, gate.rbw, gate.center_freq, gate.span, gate.spacing)
    return an.spectrum(gate.gate_delay, gate.gate_length)


def spectrally_integrated_power(spec: PowerSpectrum) -> float:
    return float(np.sum(spec.density) * spec.bin_width)


def gate_scan(beat: BeatSignal, gate: GateConfig, delays):
    """Spectrally integrated power for each gate delay (two-lobe storage trace)."""
    an = GatedAnalyzer(beat, gate.rbw, gate.center_freq, gate.span, gate.spacing)
    return np.array([spectrally_integrated_power(an.spectrum(d, gate.gate_length))
                     for d in delays])
