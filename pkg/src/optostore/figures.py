"""Plot-ready data for every figure preset, written as plain CSV."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from . import presets
from .errors import OptostoreError
from .experiments import (detected_profile, readout_coupling, sweep_delay, sweep_detuning,
                          sweep_readout_intensity, temporal_profile)

MAX_TRACE_ROWS = 4000


def write_csv(path, columns: dict):
    names = list(columns)
    data = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        np.savetxt(fh, data, fmt="%.17g", delimiter=",")


def read_csv(path):
    with open(path) as fh:
        names = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {n: data[:, i] for i, n in enumerate(names)}


def _trace_columns(prof, max_rows=MAX_TRACE_ROWS):
    traj = prof.trajectory
    step = max(1, int(np.ceil(len(traj) / max_rows)))
    sl = slice(None, None, step)
    return {"t_s": traj.t[sl], "intracavity": prof.intracavity[sl], "stored": prof.stored[sl],
            "emitted_power": prof.emitted[sl], "coupling_hz": traj.g[sl]}


def _profile_summary(prof):
    return {"efficiency": prof.efficiency, "retrieved_energy": prof.retrieved_energy,
            "signal_energy": prof.signal_energy,
            "stored_after_writing": prof.stored_after_writing,
            "stored_before_readout": prof.stored_before_readout}


def fig1c(workers=None):
    prof = temporal_profile(presets.fig1c())
    return _trace_columns(prof), _profile_summary(prof)


def fig3c(workers=None):
    prof = temporal_profile(presets.fig3c())
    return _trace_columns(prof), _profile_summary(prof)


def fig2a(workers=None):
    delays = presets.FIG2A_GATE_DELAYS
    prof = detected_profile(presets.fig2a(), delays)
    p = prof.power
    return ({"gate_delay_s": delays, "detected_power": p, "normalized_power": p / p.max()},
            {"gate_length_s": presets.fig2a().gate.gate_length})


def fig2c(workers=None):
    delays = presets.FIG2A_GATE_DELAYS
    cols = {"gate_delay_s": delays}
    for d in presets.FIG2C_READOUTS:
        cfg = presets.fig2a().with_readout(duration=d)
        cols[f"power_readout_{d * 1e6:g}us"] = detected_profile(cfg, delays).power
    return cols, {"readout_durations_s": list(presets.FIG2C_READOUTS)}


def fig2b(workers=None):
    res = sweep_delay(presets.fig2b(), presets.FIG2B_DELAYS, workers)
    return res.columns(), {"tau_s": res.fit["tau"], "amplitude": res.fit["A"]}


def _intensity(grid, workers):
    res = sweep_readout_intensity(presets.fig3(), grid, workers)
    return res.columns(), {"E(10 I0)/E(I0)": float(np.interp(10.0, res.values, res.energies)
                                                   / np.interp(1.0, res.values, res.energies))}


def fig3a(workers=None):
    return _intensity(presets.FIG3A_INTENSITIES, workers)


def supp1(workers=None):
    return _intensity(presets.SUPP1_INTENSITIES, workers)


def _lineshapes(runs, workers):
    cols, summary = {"detuning_hz": np.asarray(presets.DETUNINGS)}, {}
    for label, kw in runs:
        res = sweep_detuning(presets.fig3(), presets.DETUNINGS, workers=workers, **kw)
        cols[f"normalized_{label}"] = res.normalized
        summary[f"fwhm_hz_{label}"] = res.fit["fwhm"]
    return cols, summary


def fig3b(workers=None):
    ref = presets.REFERENCE_G0
    return _lineshapes([(f"I{rel:g}", {"readout_G0": readout_coupling(ref, rel)})
                        for rel in presets.FIG3B_READOUT_INTENSITIES], workers)


def supp2a(workers=None):
    return _lineshapes([(f"readout_{g / 1e6:g}MHz", {"readout_G0": g})
                        for g in presets.SUPP2A_READOUT_G0], workers)


def supp2b(workers=None):
    return _lineshapes([(f"writing_{g / 1e6:g}MHz", {"writing_G0": g})
                        for g in presets.SUPP2B_WRITING_G0], workers)


BUILDERS = {
    "fig1c": fig1c, "fig2a": fig2a, "fig2b": fig2b, "fig2c": fig2c, "fig3a": fig3a,
    "fig3b": fig3b, "fig3c": fig3c, "supp1": supp1, "supp2a": supp2a, "supp2b": supp2b,
}

PLOT_STUB = '''"""Plot every CSV in this directory against its first column (needs matplotlib)."""
import csv
import pathlib
import sys

import matplotlib.pyplot as plt

here = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else __file__).resolve()
here = here if here.is_dir() else here.parent
for path in sorted(here.glob("*.csv")):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    head, body = rows[0], [[float(v) for v in r] for r in rows[1:]]
    fig, ax = plt.subplots()
    for j, name in enumerate(head[1:], 1):
        ax.plot([r[0] for r in body], [r[j] for r in body], label=name)
    ax.set_xlabel(head[0])
    ax.set_title(path.stem)
    ax.legend(fontsize="small")
    fig.savefig(path.with_suffix(".png"), dpi=120)
    plt.close(fig)
'''


def _fmt_summary(value):
    if isinstance(value, (list, tuple)):
        return ", ".join(repr(float(v)) for v in value)
    return repr(float(value))


def build_bundle(out_dir, workers=None, names=None):
    """Run every figure builder and write ``<name>.csv``, a plotting stub and summary.txt."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for name in names or BUILDERS:
        try:
            cols, info = BUILDERS[name](workers)
        except OptostoreError as exc:
            raise type(exc)(f"figure {name}: {exc}") from exc
        write_csv(out / f"{name}.csv", cols)
        summary[name] = info
    (out / "plot_figures.py").write_text(PLOT_STUB)
    lines = []
    for name, info in summary.items():
        lines.append(f"[{name}]")
        lines += [f"{k} = {_fmt_summary(v)}" for k, v in info.items()]
        lines.append("")
    (out / "summary.txt").write_text("\n".join(lines))
    return summary
