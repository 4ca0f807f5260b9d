"""optostore command-line front end.

    optostore simulate --preset fig3c --out run/
    optostore sweep delay --config my.ini --workers 4
    optostore figures --out bundle/
    optostore validate --config my.ini

Exit codes: 0 success, 2 configuration error, 3 simulation error, 4 fit error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, figures
from .config import DEFAULT_PRESET, RunConfig, emit_config, from_preset, load_config
from .errors import ConfigError, OptostoreError
from .experiments import (detected_profile, simulate, sweep_delay, sweep_detuning,
                          sweep_readout_duration, sweep_readout_intensity, readout_coupling)
from .fitting import measure_fwhm
from .model import validate
from .pulses import PulseSequence

SWEEP_KINDS = ("delay", "readout-intensity", "detuning", "readout-duration")
TRAJECTORY_COLUMNS = ("t_s", "re_alpha", "im_alpha", "re_beta", "im_beta", "abs_sout_sq")


def _run_config(args, default_preset="fig2a") -> RunConfig:
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        run = load_config(args.config)
    else:
        run = from_preset(args.preset or default_preset)
    if args.out:
        run = replace(run, output_dir=args.out)
    return run


def check(run: RunConfig):
    """All violated invariants of a resolved configuration (empty when valid)."""
    exp = run.experiment
    report = validate(exp.params, exp.drive, allow_lossless=True)
    problems = list(report.violations)
    try:
        PulseSequence(tuple(p for p in (exp.writing, exp.readout) if p is not None))
        exp.sequence()
    except OptostoreError as exc:
        problems.append(str(exc))
    return problems, report.warnings


def _require_valid(run):
    problems, warnings = check(run)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    if problems:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(problems))


def _outdir(run):
    out = Path(run.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _manifest(out, run, **extra):
    (out / "resolved_config.ini").write_text(emit_config(run))
    info = {"tool": "optostore", "version": __version__, "preset": run.preset,
            "resolved_config": emit_config(run)}
    info.update(extra)
    (out / "manifest.json").write_text(json.dumps(info, indent=2, sort_keys=True) + "\n")


def cmd_simulate(args):
    run = _run_config(args)
    _require_valid(run)
    traj = simulate(run.experiment)
    out = _outdir(run)
    cols = dict(zip(TRAJECTORY_COLUMNS, (traj.t, traj.alpha.real, traj.alpha.imag,
                                          traj.beta.real, traj.beta.imag, traj.emitted_power)))
    figures.write_csv(out / "trajectory.csv", cols)
    _manifest(out, run, command="simulate", dt_s=traj.dt, t_end_s=traj.t_end, rows=len(traj),
              columns=list(TRAJECTORY_COLUMNS))
    print(f"wrote {len(traj)} rows to {out / 'trajectory.csv'}")
    return 0


def _fit_lines(res):
    if res.fit is None:
        return []
    if res.fit.model == "exponential_decay":
        f = res.fit
        return [f"tau = {f['tau']!r} s", f"tau_us = {f['tau'] * 1e6:.6g}",
                f"amplitude = {f['A']!r}", f"converged = {f.converged}"]
    f = res.fit
    return [f"fwhm = {f['fwhm']!r} Hz", f"fwhm_mhz = {f['fwhm'] / 1e6:.6g}",
            f"center = {f['center']!r} Hz"]


def cmd_sweep(args):
    kind = args.kind
    run = _run_config(args, DEFAULT_PRESET[kind])
    _require_valid(run)
    exp, workers, out = run.experiment, args.workers, None
    files, summary = [], [f"[{kind}]"]
    if kind == "delay":
        res = sweep_delay(exp, run.grid("delays"), workers)
        results = [("sweep_delay.csv", res)]
        summary += _fit_lines(res)
    elif kind == "readout-intensity":
        res = sweep_readout_intensity(exp, run.grid("relative_intensities"), workers)
        results = [("sweep_readout_intensity.csv", res)]
        e = res.energies
        summary += [f"monotone_increasing = {bool(np.all(np.diff(e[np.argsort(res.values)]) > 0))}",
                    f"max_over_min_energy = {float(e.max() / e.min())!r}"]
    elif kind == "detuning":
        results = []
        for rel in run.grid("readout_intensities"):
            res = sweep_detuning(exp, run.grid("detunings"),
                                 readout_G0=readout_coupling(exp.reference_coupling, rel),
                                 workers=workers)
            results.append((f"sweep_detuning_I{rel:g}.csv", res))
            summary += [f"# relative readout intensity {rel:g}"] + _fit_lines(res)
    else:
        res = sweep_readout_duration(exp, run.grid("readout_durations"), workers)
        results = [("sweep_readout_duration.csv", res)]
        delays = run.grid("gate_delays")
        profiles = [(d, detected_profile(exp.with_readout(duration=d), delays))
                    for d in run.grid("readout_durations")]
        for d, prof in profiles:
            summary.append(f"detected_fwhm_s[{d * 1e6:g} us] = "
                           f"{measure_fwhm(prof.gate_delays, prof.power)!r}")
    out = _outdir(run)
    for name, res in results:
        figures.write_csv(out / name, res.columns())
        files.append(name)
    if kind == "readout-duration":
        for d, prof in profiles:
            name = f"profile_readout_{d * 1e6:g}us.csv"
            figures.write_csv(out / name, {"gate_delay_s": prof.gate_delays,
                                           "detected_power": prof.power})
            files.append(name)
    (out / "fit_summary.txt").write_text("\n".join(summary) + "\n")
    _manifest(out, run, command=f"sweep {kind}", files=files)
    print("\n".join(summary))
    return 0


def cmd_figures(args):
    out = args.out or "figures"
    summary = figures.build_bundle(out, args.workers)
    for name, info in summary.items():
        print(name + ": " + ", ".join(f"{k}={v:.6g}" if np.isscalar(v) else f"{k}={v}"
                                      for k, v in info.items()))
    return 0


def cmd_validate(args):
    run = _run_config(args)
    problems, warnings = check(run)
    for w in warnings:
        print(f"warning: {w}")
    if problems:
        print("invalid configuration:")
        for p in problems:
            print(f"  - {p}")
        return ConfigError.exit_code
    print("configuration is valid")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="optostore", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"optostore {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", metavar="PATH", help="INI run configuration")
        p.add_argument("--preset", metavar="NAME", help="start from a named figure preset")
        p.add_argument("--out", metavar="DIR", help="output directory")
        p.add_argument("--workers", type=int, default=None, metavar="N",
                       help="concurrent sweep points")
        return p

    common(sub.add_parser("simulate", help="integrate one run, write the trajectory")).set_defaults(func=cmd_simulate)
    p = common(sub.add_parser("sweep", help="parameter sweep with fit summary"))
    p.add_argument("kind", choices=SWEEP_KINDS)
    p.set_defaults(func=cmd_sweep)
    common(sub.add_parser("figures", help="plot-ready data for all presets")).set_defaults(func=cmd_figures)
    common(sub.add_parser("validate", help="check a configuration")).set_defaults(func=cmd_validate)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OptostoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
