"""Storage/retrieval runs, parameter sweeps and detected profiles."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .detection import GateConfig, gate_scan, heterodyne_beat, lo_amplitude, lo_waveform
from .dynamics import (IntegratorConfig, ModeState, Trajectory, incident_energy, integrate,
                       intracavity_energy, retrieved_energy)
from .errors import NormalizationError, OptostoreError, SimulationError
from .fitting import FitRecord, fit_exponential, fit_fwhm
from .model import DEFAULT_G_TIMES_XZPF, DriveConfig, ResonatorParams, angular
from .pulses import PulseSequence, PulseSpec, signal_like

RINGOUT_DECAYS = 5.0


@dataclass(frozen=True)
class ExperimentConfig:
    """One storage/retrieval run.

    The signal is either ``signal_peak`` (sqrt(photons/s)) or, when that is
    None, the upper EOM sideband ``modulation_depth``/2 times the writing
    amplitude. The sideband is calibrated at zero two-photon detuning so that
    detuning sweeps do not also rescale the signal.
    """

    params: ResonatorParams = field(default_factory=ResonatorParams)
    writing: Optional[PulseSpec] = None
    readout: Optional[PulseSpec] = None
    detuning: float = 0.0
    signal_peak: Optional[float] = None
    modulation_depth: float = 0.02
    g_times_xzpf: float = DEFAULT_G_TIMES_XZPF
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    gate: GateConfig = field(default_factory=GateConfig)
    initial: ModeState = field(default_factory=ModeState)
    reference_coupling: float = 0.7e6

    @property
    def drive(self) -> DriveConfig:
        return DriveConfig.at_detuning(self.params, self.detuning)

    @property
    def writing_amplitude(self) -> float:
        if self.writing is None:
            return 0.0
        nominal = DriveConfig.at_detuning(self.params, 0.0)
        return float(lo_amplitude(self.params, nominal, self.writing.peak, self.g_times_xzpf))

    @property
    def signal(self) -> Optional[PulseSpec]:
        if self.writing is None:
            return None
        if self.signal_peak is not None:
            peak = self.signal_peak
        else:
            peak = 0.5 * self.modulation_depth * self.writing_amplitude
        return signal_like(self.writing, peak) if peak > 0 else None

    def sequence(self) -> PulseSequence:
        pulses = [p for p in (self.writing, self.signal, self.readout) if p is not None]
        return PulseSequence(tuple(pulses))

    @property
    def retrieval_window(self):
        r = self.readout
        if r is None:
            raise SimulationError("configuration has no readout pulse")
        tail = RINGOUT_DECAYS / angular(self.params.kappa) if self.params.kappa > 0 else 0.0
        return r.t_start, r.end + tail

    def with_delay(self, delay):
        """Readout starts ``delay`` after the writing pulse ends."""
        return replace(self, readout=replace(self.readout, t_start=self.writing.end + delay))

    def with_readout(self, **kw):
        return replace(self, readout=replace(self.readout, **kw))

    def with_writing(self, **kw):
        return replace(self, writing=replace(self.writing, **kw))

    def shifted(self, offset):
        """Same run with every pulse delayed by ``offset`` (pre-roll for gating)."""
        def mv(p):
            return None if p is None else replace(p, t_start=p.t_start + offset)
        integ = self.integrator
        if integ.t_end is not None:
            integ = replace(integ, t_end=integ.t_end + offset)
        return replace(self, writing=mv(self.writing), readout=mv(self.readout), integrator=integ)


def simulate(cfg: ExperimentConfig) -> Trajectory:
    return integrate(cfg.params, cfg.drive, cfg.sequence(), cfg.integrator, cfg.initial)


def run_retrieval(cfg: ExperimentConfig) -> float:
    traj = simulate(cfg)
    return retrieved_energy(traj, cfg.retrieval_window)


def incident_signal_energy(cfg: ExperimentConfig, traj: Trajectory) -> float:
    return incident_energy(traj)


@dataclass(frozen=True, eq=False)
class SweepResult:
    name: str
    values: np.ndarray
    energies: np.ndarray
    fit: Optional[FitRecord] = None
    reference: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        object.__setattr__(self, "energies", np.asarray(self.energies, dtype=float))
        if self.values.shape != self.energies.shape:
            raise ValueError("values and energies differ in length")

    @property
    def normalized(self):
        ref = self.reference if self.reference is not None else float(np.max(self.energies))
        return self.energies / ref if ref > 0 else np.zeros_like(self.energies)

    def columns(self):
        cols = {"swept_value": self.values, "retrieved_energy": self.energies,
                "normalized_energy": self.normalized}
        cols.update(self.extra)
        return cols


def _map(fn: Callable, items, workers=None, label="value"):
    def guarded(item):
        try:
            return fn(item)
        except OptostoreError as exc:
            raise type(exc)(f"{exc} ({label} = {item!r})") from exc

    items = list(items)
    if workers and workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(guarded, items))
    return [guarded(i) for i in items]


def sweep(cfg: ExperimentConfig, name, values, modify, workers=None):
    """Retrieved energy for ``modify(cfg, v)`` at every ``v``, in input order."""
    energies = _map(lambda v: run_retrieval(modify(cfg, v)), values, workers, name)
    return np.asarray(values, dtype=float), np.asarray(energies)


def sweep_delay(cfg: ExperimentConfig, delays, workers=None) -> SweepResult:
    """Energy vs writing-end to readout-start delay, with exponential fit."""
    values, energies = sweep(cfg, "delay", delays, lambda c, d: c.with_delay(d), workers)
    center = cfg.writing.t_start + 0.5 * cfg.writing.duration
    from_center = np.array([cfg.writing.end + d - center for d in values])
    fit = fit_exponential(values, energies)
    return SweepResult("delay_s", values, energies, fit,
                       extra={"readout_minus_signal_center_s": from_center})


def readout_coupling(reference, relative_intensity):
    """G scales as sqrt(n_c), hence as the square root of the intensity."""
    return reference * math.sqrt(relative_intensity)


def sweep_readout_intensity(cfg: ExperimentConfig, relative_intensities, workers=None) -> SweepResult:
    def mod(c, rel):
        return c.with_readout(peak=readout_coupling(c.reference_coupling, rel))
    values, energies = sweep(cfg, "relative_intensity", relative_intensities, mod, workers)
    r = cfg.readout
    areas = np.array([angular(readout_coupling(cfg.reference_coupling, v)) * (r.duration - r.ramp)
                      for v in values])
    return SweepResult("relative_intensity", values, energies,
                       extra={"pulse_area_rad": areas})


def sweep_detuning(cfg: ExperimentConfig, detunings, readout_G0=None, writing_G0=None,
                   workers=None) -> SweepResult:
    """Energy vs two-photon detuning, normalized to zero detuning, with FWHM."""
    if readout_G0 is not None:
        cfg = cfg.with_readout(peak=readout_G0)
    if writing_G0 is not None:
        cfg = cfg.with_writing(peak=writing_G0)
    values, energies = sweep(cfg, "detuning", detunings,
                             lambda c, d: replace(c, detuning=float(d)), workers)
    zero = np.nonzero(values == 0.0)[0]
    ref = float(energies[zero[0]]) if zero.size else run_retrieval(replace(cfg, detuning=0.0))
    if not ref > 0:
        raise NormalizationError("zero-detuning retrieved energy is zero")
    fit = fit_fwhm(values, energies / ref)
    return SweepResult("detuning_hz", values, energies, fit, reference=ref)


def sweep_readout_duration(cfg: ExperimentConfig, durations, workers=None) -> SweepResult:
    values, energies = sweep(cfg, "readout_duration", durations,
                             lambda c, d: c.with_readout(duration=float(d)), workers)
    return SweepResult("readout_duration_s", values, energies)


@dataclass(frozen=True, eq=False)
class TemporalProfile:
    trajectory: Trajectory
    signal_energy: float
    retrieved_energy: float
    stored_after_writing: float
    stored_before_readout: float

    @property
    def efficiency(self):
        return self.retrieved_energy / self.signal_energy if self.signal_energy > 0 else 0.0

    @property
    def intracavity(self):
        return self.trajectory.intracavity

    @property
    def stored(self):
        return self.trajectory.stored

    @property
    def emitted(self):
        return self.trajectory.emitted_power


def temporal_profile(cfg: ExperimentConfig) -> TemporalProfile:
    """Intracavity, stored and emitted traces plus signal-to-retrieval efficiency.

    The signal energy is the incident signal photon number; for a run that
    starts with the signal already loaded in the cavity it is |alpha(0)|^2.
    """
    traj = simulate(cfg)
    sig = incident_signal_energy(cfg, traj)
    if sig == 0.0:
        sig = abs(cfg.initial.alpha) ** 2
    ret = retrieved_energy(traj, cfg.retrieval_window)
    after = float(np.interp(cfg.writing.end, traj.t, traj.stored)) if cfg.writing else abs(cfg.initial.beta) ** 2
    before = float(np.interp(cfg.readout.t_start, traj.t, traj.stored))
    return TemporalProfile(traj, sig, ret, after, before)


def emitted_pulse_energies(cfg: ExperimentConfig, traj: Optional[Trajectory] = None):
    """Cavity-emitted (heterodyne-visible) energies of the signal and retrieved pulses."""
    traj = traj or simulate(cfg)
    k_ex = angular(cfg.params.kappa_ex)
    tail = RINGOUT_DECAYS / angular(cfg.params.kappa)
    sig = k_ex * intracavity_energy(traj, (cfg.writing.t_start, cfg.writing.end + tail))
    ret = k_ex * intracavity_energy(traj, cfg.retrieval_window)
    return sig, ret


@dataclass(frozen=True, eq=False)
class DetectedProfile:
    gate_delays: np.ndarray
    power: np.ndarray
    trajectory: Trajectory


def detected_profile(cfg: ExperimentConfig, gate_delays, preroll=None) -> DetectedProfile:
    """Heterodyne + gated-analyzer trace vs gate delay (from the writing edge)."""
    gate_delays = np.asarray(gate_delays, dtype=float)
    gate = cfg.gate
    lead = max(0.0, -(cfg.writing.t_start + float(gate_delays.min())))
    preroll = lead + 1e-6 if preroll is None else preroll
    run = cfg.shifted(preroll)
    need = run.writing.t_start + float(gate_delays.max()) + gate.gate_length + 1e-6
    if run.integrator.t_end is None or run.integrator.t_end < need:
        run = replace(run, integrator=replace(run.integrator, t_end=need))
    traj = simulate(run)
    beat = heterodyne_beat(traj, lo_waveform(traj, run.g_times_xzpf), run.drive.delta_sl)
    power = gate_scan(beat, gate, gate_delays)
    return DetectedProfile(gate_delays, power, traj)
