"""Pulse envelopes, the coupling waveform G(t) and the incident signal flux."""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError
from .model import TWO_PI

DEFAULT_RAMP = 50e-9
DEFAULT_WRITING_DURATION = 2e-6
_EDGE = 1e-15  # s; nudge for one-sided limits at pulse edges


class PulseKind(str, enum.Enum):
    WRITING = "writing"
    READOUT = "readout"
    SIGNAL = "signal"


@dataclass(frozen=True)
class PulseSpec:
    """One timed envelope.

    ``peak`` is G0/2pi in Hz for writing/readout pulses and the peak incident
    amplitude in sqrt(photons/s) for the signal. Edges are raised cosines of
    width ``ramp``; ``ramp=0`` gives a rectangle.
    """

    kind: PulseKind
    t_start: float
    duration: float
    peak: float
    ramp: float = DEFAULT_RAMP

    def __post_init__(self):
        object.__setattr__(self, "kind", PulseKind(self.kind))
        if not self.duration > 0:
            raise DomainError(f"{self.kind.value} pulse duration must be > 0")
        if self.ramp < 0 or 2 * self.ramp > self.duration * (1 + 1e-12):
            raise DomainError(f"{self.kind.value} pulse ramp must satisfy 0 <= 2*ramp <= duration")
        if self.peak < 0:
            raise DomainError(f"{self.kind.value} pulse peak must be >= 0")

    @property
    def end(self):
        return self.t_start + self.duration

    def shape(self, t):
        """Unit-peak envelope at ``t``; includes t_start, excludes the end."""
        t = np.asarray(t, dtype=float)
        u = t - self.t_start
        inside = (u >= 0) & (u < self.duration)
        out = np.where(inside, 1.0, 0.0)
        r = self.ramp
        if r > 0:
            rise = inside & (u < r)
            fall = inside & (u > self.duration - r)
            with np.errstate(over="ignore", invalid="ignore"):
                out = np.where(rise, 0.5 * (1 - np.cos(np.pi * u / r)), out)
                out = np.where(fall, 0.5 * (1 - np.cos(np.pi * (self.duration - u) / r)), out)
        return out

    def __call__(self, t):
        return self.peak * self.shape(t)


@dataclass(frozen=True)
class PulseSequence:
    pulses: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pulses", tuple(self.pulses))
        writes = self.of_kind(PulseKind.WRITING)
        for s in self.of_kind(PulseKind.SIGNAL):
            if not any(_same_timing(s, w) for w in writes):
                raise DomainError("signal pulse must share t_start and duration with a writing pulse")
        for r in self.of_kind(PulseKind.READOUT):
            for w in writes:
                if r.t_start < w.end - 1e-15:
                    raise DomainError("readout pulse overlaps the writing pulse")

    def of_kind(self, kind):
        kind = PulseKind(kind)
        return tuple(p for p in self.pulses if p.kind is kind)

    def first(self, kind):
        found = self.of_kind(kind)
        return found[0] if found else None

    @property
    def writing(self):
        return self.first(PulseKind.WRITING)

    @property
    def readout(self):
        return self.first(PulseKind.READOUT)

    @property
    def signal(self):
        return self.first(PulseKind.SIGNAL)

    @property
    def t_begin(self):
        return min((p.t_start for p in self.pulses), default=0.0)

    @property
    def t_final(self):
        return max((p.end for p in self.pulses), default=0.0)

    @property
    def span(self):
        return self.t_final - self.t_begin

    @property
    def max_coupling(self):
        return max((p.peak for p in self.pulses if p.kind is not PulseKind.SIGNAL), default=0.0)

    def replace(self, old, new):
        return PulseSequence(tuple(new if p is old else p for p in self.pulses))


def _same_timing(a, b):
    tol = 1e-12 * max(abs(a.t_start), a.duration, 1e-9)
    return abs(a.t_start - b.t_start) <= tol and abs(a.duration - b.duration) <= tol


def _edge_time(t, side):
    return np.asarray(t, dtype=float) + side * _EDGE


def coupling_waveform(seq: PulseSequence, t, side: int = 0):
    """G(t)/2pi in Hz: sum of writing and readout envelopes.

    ``side=+1``/``-1`` returns the right/left limit, which matters only at the
    discontinuities of rectangular pulses.
    """
    te = _edge_time(t, side)
    out = np.zeros_like(te)
    for p in seq.pulses:
        if p.kind is not PulseKind.SIGNAL:
            out = out + p(te)
    return out if out.ndim else float(out)


def signal_flux_waveform(seq: PulseSequence, t, modulation_depth=None, s_w=None, side: int = 0):
    """Incident signal amplitude P_in(t) in the signal rotating frame.

    With ``modulation_depth`` M and writing-pulse amplitude ``s_w`` this is the
    upper EOM sideband (M/2) s_w shaped by the writing envelope; otherwise the
    signal pulses of ``seq`` are summed.
    """
    te = _edge_time(t, side)
    out = np.zeros_like(te)
    if modulation_depth is not None:
        if modulation_depth > 0.5:
            warnings.warn(f"modulation depth {modulation_depth} is outside the small-M expansion",
                          stacklevel=2)
        if s_w is None:
            raise DomainError("modulation-depth signal needs the writing amplitude s_w")
        for w in seq.of_kind(PulseKind.WRITING):
            out = out + 0.5 * modulation_depth * s_w * w.shape(te)
    else:
        for p in seq.of_kind(PulseKind.SIGNAL):
            out = out + p(te)
    return out if out.ndim else float(out)


def pulse_area(spec: PulseSpec) -> float:
    """theta = integral of the angular coupling over the pulse, in radians."""
    if spec.kind is PulseKind.SIGNAL:
        raise DomainError("pulse area is defined only for writing/readout pulses")
    return TWO_PI * spec.peak * (spec.duration - spec.ramp)


def peak_for_area(theta, duration, ramp=0.0):
    """Peak G0/2pi that gives area ``theta`` for the given timing."""
    return theta / (TWO_PI * (duration - ramp))


def signal_like(writing: PulseSpec, peak: float) -> PulseSpec:
    """A signal pulse with the writing pulse's timing and profile."""
    return replace(writing, kind=PulseKind.SIGNAL, peak=peak)


def control_pulse(kind, t_start, duration, G0, ramp=DEFAULT_RAMP) -> PulseSpec:
    return PulseSpec(PulseKind(kind), t_start, duration, G0, ramp)

