"""Resonator parameters, drive/coupling descriptions and derived quantities.

Every rate and frequency stored here is an ordinary frequency in Hz (the
value of omega/2pi). Equations of motion work with angular rates; use
:func:`angular` at that boundary and nowhere else.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import DomainError

HBAR = 1.054571817e-34  # J s
TWO_PI = 2.0 * math.pi


def angular(f_hz):
    """Convert a /2pi value in Hz to an angular rate in rad/s."""
    return TWO_PI * f_hz


@dataclass(frozen=True)
class ResonatorParams:
    f_m: float = 108.4e6
    gamma_m: float = 38e3
    kappa: float = 40e6
    kappa_ex: Optional[float] = None
    f_cavity_offset: float = 0.0

    def __post_init__(self):
        # kappa_ex is not reported; half the total rate is the documented default
        if self.kappa_ex is None:
            object.__setattr__(self, "kappa_ex", 0.5 * self.kappa)

    @property
    def resolved_sideband(self) -> bool:
        return self.f_m > self.kappa


@dataclass(frozen=True)
class DriveConfig:
    """Signal/control frequency relation.

    ``delta_sl`` is the EOM modulation frequency (omega_s - omega_l)/2pi and
    ``detuning`` the two-photon detuning (omega_s - omega_l - omega_m)/2pi.
    The equations of motion use ``detuning`` directly so that small detunings
    are not lost to cancellation against ``f_m``.
    """

    delta_sl: float
    detuning: float = 0.0

    @classmethod
    def at_detuning(cls, params: ResonatorParams, detuning: float = 0.0) -> "DriveConfig":
        return cls(delta_sl=params.f_m + detuning, detuning=detuning)


@dataclass(frozen=True)
class CouplingSpec:
    """Effective coupling G0/2pi, given directly or through g*x_zpf and n_c."""

    G0: Optional[float] = None
    g_times_xzpf: Optional[float] = None
    n_c: Optional[float] = None

    def __post_init__(self):
        if self.G0 is None:
            if self.g_times_xzpf is None or self.n_c is None:
                raise DomainError("CouplingSpec needs G0 or both g_times_xzpf and n_c")
            object.__setattr__(self, "G0", effective_coupling(self.g_times_xzpf, self.n_c))

    @property
    def per_photon(self) -> Optional[float]:
        if self.g_times_xzpf is not None:
            return self.g_times_xzpf
        if self.n_c:
            return self.G0 / math.sqrt(self.n_c)
        return None


def effective_coupling(g_times_xzpf, n_c):
    """G/2pi = (g x_zpf / 2pi) * sqrt(n_c)."""
    if n_c < 0:
        raise DomainError(f"photon number must be non-negative, got {n_c}")
    return g_times_xzpf * math.sqrt(n_c)


def zero_point_fluctuation(mass, f_m):
    """x_zpf = sqrt(hbar / (2 m omega_m)) in metres."""
    if not (mass > 0 and f_m > 0):
        raise DomainError(f"mass and f_m must be positive, got mass={mass}, f_m={f_m}")
    return math.sqrt(HBAR / (2.0 * mass * angular(f_m)))


# Reported operating point: n_c = 1.5e6 gives G0/2pi = 2 MHz.
PAPER_N_C = 1.5e6
PAPER_G0 = 2e6
DEFAULT_G_TIMES_XZPF = PAPER_G0 / math.sqrt(PAPER_N_C)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()
    resolved_sideband: bool = False
    warnings: tuple = field(default=())

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.valid


def validate(params: ResonatorParams, drive: Optional[DriveConfig] = None,
             allow_lossless: bool = False) -> ValidationReport:
    """List violated invariants of ``params`` (and ``drive`` if given).

    With ``allow_lossless`` zero damping rates are accepted; the lossless
    limit is a legitimate input to the integrator even though no physical
    resonator sits there.
    """
    bad = []
    values = {"f_m": params.f_m, "gamma_m": params.gamma_m, "kappa": params.kappa,
              "kappa_ex": params.kappa_ex, "f_cavity_offset": params.f_cavity_offset}
    for name, v in values.items():
        if not math.isfinite(v):
            bad.append(f"{name} is not finite")
    if not params.f_m > 0:
        bad.append("f_m must be > 0")
    for name in ("gamma_m", "kappa"):
        v = values[name]
        if allow_lossless:
            if v < 0:
                bad.append(f"{name} must be >= 0")
        elif not v > 0:
            bad.append(f"{name} must be > 0")
    if params.kappa_ex < 0:
        bad.append("kappa_ex must be >= 0")
    if params.kappa_ex > params.kappa:
        bad.append("kappa_ex exceeds kappa")
    if drive is not None:
        gap = drive.delta_sl - params.f_m - drive.detuning
        if abs(gap) > 1e-9 * max(abs(params.f_m), 1.0):
            bad.append("detuning != delta_sl - f_m")
    warns = ()
    if not params.resolved_sideband:
        warns = ("f_m <= kappa: outside the resolved-sideband regime",)
    return ValidationReport(tuple(bad), params.resolved_sideband, warns)
