"""Linearized coupled-mode dynamics of the cavity signal field and the mechanics.

In the signal (alpha) and mechanical (beta) rotating frames, with angular
rates,

    d(alpha)/dt = -(i*D_c + kappa/2) alpha - i G(t) beta + sqrt(kappa_ex) P_in(t)
    d(beta)/dt  = -(i*D_m + gamma_m/2) beta - i G(t) alpha

where D_c = omega_0 - omega_s and D_m = omega_m + omega_l - omega_s is minus
the two-photon detuning. Only the beam-splitter part of the linearized
interaction is kept.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numba
import numpy as np
from scipy.integrate import simpson

from .detection import output_field
from .errors import DomainError, IntegrationDiverged
from .model import DriveConfig, ResonatorParams, angular, validate
from .pulses import PulseSequence, coupling_waveform, signal_flux_waveform

DT_GRID = 1e-9  # auto steps divide 1 ns so ns-aligned pulse edges land on samples
DT_SAFETY = 50.0
DIVERGENCE_FACTOR = 1e12


@dataclass(frozen=True)
class ModeState:
    alpha: complex = 0j
    beta: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        if not (np.isfinite(self.alpha) and np.isfinite(self.beta)):
            raise DomainError("mode amplitudes must be finite")

    @property
    def energy(self):
        return abs(self.alpha) ** 2 + abs(self.beta) ** 2


@dataclass(frozen=True)
class IntegratorConfig:
    dt: Union[float, str] = "auto"
    t_end: Optional[float] = None
    method: str = "rk4"

    def __post_init__(self):
        if self.dt != "auto" and not (isinstance(self.dt, (int, float)) and self.dt > 0):
            raise DomainError(f"dt must be 'auto' or a positive number, got {self.dt!r}")
        if self.method != "rk4":
            raise DomainError(f"unknown integration method {self.method!r}; only 'rk4' is available")
        if self.t_end is not None and not self.t_end > 0:
            raise DomainError("t_end must be positive")


@dataclass(frozen=True, eq=False)
class Trajectory:
    t: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    s_out: np.ndarray
    g: np.ndarray      # G(t)/2pi, Hz
    p_in: np.ndarray   # incident signal amplitude, sqrt(photons/s)
    dt: float
    params: ResonatorParams
    drive: DriveConfig
    seq: PulseSequence = field(repr=False)

    def __len__(self):
        return len(self.t)

    @property
    def t_end(self):
        return float(self.t[-1])

    def state(self, i) -> ModeState:
        return ModeState(self.alpha[i], self.beta[i])

    @property
    def intracavity(self):
        return np.abs(self.alpha) ** 2

    @property
    def stored(self):
        return np.abs(self.beta) ** 2

    @property
    def emitted_power(self):
        return np.abs(self.s_out) ** 2


def max_stable_dt(params: ResonatorParams, drive: DriveConfig, seq: PulseSequence):
    rate = max(angular(params.kappa), angular(params.gamma_m), angular(seq.max_coupling),
               angular(abs(drive.detuning)), angular(abs(params.f_cavity_offset)))
    return 1.0 / (DT_SAFETY * rate) if rate > 0 else DT_GRID


def resolve_dt(params, drive, seq, cfg: IntegratorConfig):
    limit = max_stable_dt(params, drive, seq)
    if cfg.dt == "auto":
        return DT_GRID / math.ceil(DT_GRID / limit * (1 - 1e-12))
    if cfg.dt > limit * (1 + 1e-9):
        raise DomainError(f"dt = {cfg.dt:.3e} s exceeds the stability bound {limit:.3e} s")
    return float(cfg.dt)


def default_t_end(params: ResonatorParams, seq: PulseSequence):
    tail = 10.0 / angular(params.kappa) if params.kappa > 0 else 0.0
    return seq.t_final + tail


@numba.njit(cache=True, nogil=True)
def _rk4(a, b, g0, g1, g2, p0, p1, p2, dc, dm, half_k, half_g, sk, dt, limit):
    n = g0.shape[0]
    alpha = np.empty(n + 1, dtype=np.complex128)
    beta = np.empty(n + 1, dtype=np.complex128)
    alpha[0] = a
    beta[0] = b
    ca = -(1j * dc + half_k)
    cb = -(1j * dm + half_g)
    h2 = 0.5 * dt
    for k in range(n):
        ga, gm, ge = g0[k], g1[k], g2[k]
        ka = ca * a - 1j * ga * b + sk * p0[k]
        kb = cb * b - 1j * ga * a
        a2 = a + h2 * ka
        b2 = b + h2 * kb
        la = ca * a2 - 1j * gm * b2 + sk * p1[k]
        lb = cb * b2 - 1j * gm * a2
        a3 = a + h2 * la
        b3 = b + h2 * lb
        ma = ca * a3 - 1j * gm * b3 + sk * p1[k]
        mb = cb * b3 - 1j * gm * a3
        a4 = a + dt * ma
        b4 = b + dt * mb
        na = ca * a4 - 1j * ge * b4 + sk * p2[k]
        nb = cb * b4 - 1j * ge * a4
        a = a + dt / 6.0 * (ka + 2.0 * la + 2.0 * ma + na)
        b = b + dt / 6.0 * (kb + 2.0 * lb + 2.0 * mb + nb)
        alpha[k + 1] = a
        beta[k + 1] = b
        if not (abs(a) < limit and abs(b) < limit):
            return alpha, beta, k + 1
    return alpha, beta, -1


def integrate(params: ResonatorParams, drive: DriveConfig, seq: PulseSequence,
              cfg: Optional[IntegratorConfig] = None, initial: Optional[ModeState] = None,
              modulation_depth=None, s_w=None) -> Trajectory:
    """Fixed-step RK4 solution of the coupled-mode equations.

    G and P_in are evaluated at every RK stage time, using one-sided limits at
    step boundaries so that rectangular edges on the grid are integrated
    exactly. The signal comes from the signal pulses of ``seq`` unless
    ``modulation_depth`` and ``s_w`` select the EOM sideband model.
    """
    cfg = cfg or IntegratorConfig()
    initial = initial or ModeState()
    report = validate(params, drive, allow_lossless=True)
    if not report.valid:
        raise DomainError("invalid resonator parameters: " + "; ".join(report.violations))
    dt = resolve_dt(params, drive, seq, cfg)
    t_end = cfg.t_end if cfg.t_end is not None else default_t_end(params, seq)
    n = int(math.ceil(t_end / dt - 1e-9))
    if n < 1:
        raise DomainError("t_end must cover at least one step")
    t = np.arange(n + 1) * dt
    left, right = t[:-1], t[1:]

    def flux(tt, side=0):
        return np.asarray(signal_flux_waveform(seq, tt, modulation_depth, s_w, side), dtype=complex)

    g0 = angular(coupling_waveform(seq, left, +1))
    g1 = angular(coupling_waveform(seq, left + 0.5 * dt))
    g2 = angular(coupling_waveform(seq, right, -1))
    p0, p1, p2 = flux(left, +1), flux(left + 0.5 * dt), flux(right, -1)

    kappa_ex = angular(params.kappa_ex)
    sk = math.sqrt(kappa_ex)
    scale = max(abs(initial.alpha), abs(initial.beta),
                float(np.max(np.abs(p1), initial=0.0)) * sk * max(t_end, dt), 1e-300)
    alpha, beta, bad = _rk4(initial.alpha, initial.beta, g0, g1, g2, p0, p1, p2,
                            angular(params.f_cavity_offset), -angular(drive.detuning),
                            0.5 * angular(params.kappa), 0.5 * angular(params.gamma_m),
                            sk, dt, DIVERGENCE_FACTOR * scale)
    if bad >= 0:
        raise IntegrationDiverged(float(t[bad]))

    p_grid = flux(t, 0)
    s_out = output_field(alpha, p_grid, params.kappa_ex)
    return Trajectory(t=t, alpha=alpha, beta=beta, s_out=s_out,
                      g=np.asarray(coupling_waveform(seq, t)), p_in=p_grid, dt=dt,
                      params=params, drive=drive, seq=seq)


def lossless_evolve(theta, a0, b0):
    """Beam-splitter rotation by pulse area ``theta`` (rotating frames)."""
    c, s = np.cos(theta), np.sin(theta)
    return a0 * c - 1j * b0 * s, b0 * c - 1j * a0 * s


def _segment(t, y, t0, t1):
    i = int(np.searchsorted(t, t0 - 1e-15, side="left"))
    j = int(np.searchsorted(t, t1 + 1e-15, side="right"))
    if j - i < 3:
        tt = np.unique(np.concatenate(([t0], t[i:j], [t1])))
        return float(np.trapezoid(np.interp(tt, t, y), tt))
    y0, y1 = np.interp([t0, t1], t, y)
    head = 0.5 * (y0 + y[i]) * (t[i] - t0)
    tail = 0.5 * (y[j - 1] + y1) * (t1 - t[j - 1])
    return float(simpson(y[i:j], x=t[i:j]) + head + tail)


def _window_integral(t, y, t0, t1, breaks=()):
    """Piecewise Simpson quadrature of sampled ``y`` over [t0, t1].

    ``breaks`` are times where y has a kink (pulse edges); splitting there
    keeps the rule fourth order.
    """
    if not t1 > t0:
        raise DomainError(f"empty integration window [{t0}, {t1}]")
    if t0 < t[0] - 1e-15 or t1 > t[-1] + 1e-15:
        raise DomainError(f"window [{t0}, {t1}] lies outside the trajectory span")
    cuts = [t0] + sorted(b for b in set(breaks) if t0 < b < t1) + [t1]
    return sum(_segment(t, y, a, b) for a, b in zip(cuts[:-1], cuts[1:]))


def _edges(seq: PulseSequence):
    out = []
    for p in seq.pulses:
        out += [p.t_start, p.t_start + p.ramp, p.end - p.ramp, p.end]
    return out


def retrieved_energy(traj: Trajectory, window) -> float:
    """Photons emitted (|s_out|^2 integrated) over ``window`` = (t0, t1)."""
    t0, t1 = window
    return _window_integral(traj.t, traj.emitted_power, t0, t1, _edges(traj.seq))


def intracavity_energy(traj: Trajectory, window) -> float:
    """Time integral of |alpha|^2 over ``window`` (photon-seconds)."""
    t0, t1 = window
    return _window_integral(traj.t, traj.intracavity, t0, t1, _edges(traj.seq))


def incident_energy(traj: Trajectory) -> float:
    """Incident signal photons, |P_in|^2 integrated over the whole trajectory."""
    return _window_integral(traj.t, np.abs(traj.p_in) ** 2, traj.t[0], traj.t[-1], _edges(traj.seq))


def stored_excitation(traj: Trajectory, t) -> float:
    """|beta(t)|^2, linearly interpolated between samples."""
    if t < traj.t[0] - 1e-15 or t > traj.t[-1] + 1e-15:
        raise DomainError(f"t = {t} lies outside the trajectory span")
    return float(np.interp(t, traj.t, traj.stored))
