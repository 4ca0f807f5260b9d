"""Named configurations reproducing the reported figures.

Times are measured from the writing-pulse rising edge at t = 0.
"""
from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .dynamics import ModeState
from .experiments import ExperimentConfig
from .model import ResonatorParams
from .pulses import (DEFAULT_RAMP, DEFAULT_WRITING_DURATION, PulseKind, PulseSpec,
                     peak_for_area)

MHz, kHz, us = 1e6, 1e3, 1e-6

PAPER_PARAMS = ResonatorParams(f_m=108.4 * MHz, gamma_m=38 * kHz, kappa=40 * MHz)
FIG1C_PARAMS = ResonatorParams(f_m=108.4 * MHz, gamma_m=10 * kHz, kappa=0.5 * MHz)

FIG2A_G0 = 2 * MHz
REFERENCE_G0 = 0.7 * MHz          # relative intensity 1
READOUT_AFTER_SIGNAL_CENTER = 6.5 * us
FIG2A_READOUT = 1.0 * us
FIG2B_READOUT = 3.0 * us
FIG2C_READOUTS = (0.3 * us, 0.6 * us, 1.4 * us)
FIG3_READOUT = 3.0 * us
FIG1C_DELAY = 1.0 * us

FIG2B_DELAYS = tuple(round(0.5 * us * k, 12) for k in range(1, 25))
FIG3A_INTENSITIES = (0.01, 0.02, 0.05, 0.1, 0.2, 0.45, 1.0, 2.0, 5.0, 10.0)
SUPP1_INTENSITIES = tuple(np.round(np.geomspace(0.01, 30.0, 25), 6))
DETUNINGS = tuple(np.round(np.linspace(-3 * MHz, 3 * MHz, 61), 3))
FIG3B_READOUT_INTENSITIES = (1.0, 0.45)
SUPP2A_READOUT_G0 = (0.7 * MHz, 5 * MHz)
SUPP2B_WRITING_G0 = (0.7 * MHz, 2 * MHz, 5 * MHz)
FIG2A_GATE_DELAYS = tuple(np.round(np.arange(-4.0, 10.01, 0.1) * us, 12))


def storage_run(params=PAPER_PARAMS, writing_G0=FIG2A_G0, readout_G0=FIG2A_G0,
                writing_duration=DEFAULT_WRITING_DURATION, readout_duration=FIG2A_READOUT,
                readout_after_center=READOUT_AFTER_SIGNAL_CENTER, ramp=DEFAULT_RAMP,
                **kw) -> ExperimentConfig:
    """Writing+signal pulse at t = 0 and a later readout pulse."""
    w = PulseSpec(PulseKind.WRITING, 0.0, writing_duration, writing_G0, ramp)
    r = PulseSpec(PulseKind.READOUT, 0.5 * writing_duration + readout_after_center,
                  readout_duration, readout_G0, ramp)
    return ExperimentConfig(params=params, writing=w, readout=r, **kw)


def fig2a():
    return storage_run()


def fig3c():
    return storage_run()


def fig2b():
    return storage_run(readout_duration=FIG2B_READOUT)


def fig3():
    """Presets fig3a, fig3b, supp1, supp2a, supp2b: writing fixed at I0, 3 us readout."""
    return storage_run(writing_G0=REFERENCE_G0, readout_G0=REFERENCE_G0,
                       readout_duration=FIG3_READOUT, reference_coupling=REFERENCE_G0)


def fig1c():
    """Good-cavity illustration: pi/2 writing and readout pulses.

    The signal starts loaded in the cavity (alpha(0) = 1); a pi/2 pulse in a
    cavity with kappa << G cannot be fed efficiently by a signal pulse of the
    same short duration.
    """
    dur = 0.125 * us
    g0 = 2 * MHz
    assert math.isclose(peak_for_area(math.pi / 2, dur), g0)
    w = PulseSpec(PulseKind.WRITING, 0.0, dur, g0, 0.0)
    r = PulseSpec(PulseKind.READOUT, dur + FIG1C_DELAY, dur, g0, 0.0)
    return ExperimentConfig(params=FIG1C_PARAMS, writing=w, readout=r, signal_peak=0.0,
                            initial=ModeState(1.0, 0.0))


PRESETS = {
    "fig1c": fig1c,
    "fig2a": fig2a,
    "fig2b": fig2b,
    "fig2c": fig2a,
    "fig3a": fig3,
    "fig3b": fig3,
    "fig3c": fig3c,
    "supp1": fig3,
    "supp2a": fig3,
    "supp2b": fig3,
}


def preset(name) -> ExperimentConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def baseline_lineshape_config(writing_duration=DEFAULT_WRITING_DURATION):
    return replace(fig3(), writing=replace(fig3().writing, duration=writing_duration))
