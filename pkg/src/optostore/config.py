"""INI-style run configuration with explicit unit suffixes.

Example::

    [experiment]
    preset = fig2b
    delays = 0.5 us .. 12 us step 0.5 us

    [resonator]
    gamma_m = 38 kHz

Sections override the named preset key by key. Emitted configurations use
base units (Hz, s) and ``repr`` floats, so emit -> parse is exact.
"""
from __future__ import annotations

import configparser
import difflib
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from . import presets
from .dynamics import ModeState
from .errors import ConfigError, OptostoreError
from .experiments import ExperimentConfig
from .pulses import PulseKind, PulseSpec

FREQ_UNITS = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}
TIME_UNITS = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "μs": 1e-6, "µs": 1e-6, "ns": 1e-9, "ps": 1e-12}

FREQ, TIME, NUMBER, TEXT, COMPLEX = "freq", "time", "number", "text", "complex"

SCHEMA = {
    "experiment": {"preset": TEXT, "delays": (TIME,), "relative_intensities": (NUMBER,),
                   "detunings": (FREQ,), "readout_durations": (TIME,),
                   "readout_intensities": (NUMBER,), "gate_delays": (TIME,)},
    "resonator": {"f_m": FREQ, "gamma_m": FREQ, "kappa": FREQ, "kappa_ex": FREQ,
                  "f_cavity_offset": FREQ},
    "drive": {"detuning": FREQ},
    "coupling": {"g_times_xzpf": FREQ, "modulation_depth": NUMBER, "signal_peak": NUMBER,
                 "reference_coupling": FREQ},
    "writing": {"t_start": TIME, "duration": TIME, "ramp": TIME, "peak": FREQ},
    "readout": {"t_start": TIME, "duration": TIME, "ramp": TIME, "peak": FREQ},
    "initial": {"alpha": COMPLEX, "beta": COMPLEX},
    "integrator": {"dt": TIME, "t_end": TIME, "method": TEXT},
    "gate": {"gate_delay": TIME, "gate_length": TIME, "rbw": FREQ, "center_freq": FREQ,
             "span": FREQ, "bin_spacing": FREQ},
    "output": {"directory": TEXT},
}
OPTIONAL_AUTO = {("integrator", "dt"), ("integrator", "t_end"), ("gate", "center_freq"),
                 ("gate", "bin_spacing"), ("coupling", "signal_peak")}

GRID_DEFAULTS = {
    "delays": presets.FIG2B_DELAYS,
    "relative_intensities": presets.FIG3A_INTENSITIES,
    "detunings": presets.DETUNINGS,
    "readout_durations": presets.FIG2C_READOUTS,
    "readout_intensities": presets.FIG3B_READOUT_INTENSITIES,
    "gate_delays": presets.FIG2A_GATE_DELAYS,
}
DEFAULT_PRESET = {"delay": "fig2b", "readout-intensity": "fig3a", "detuning": "fig3b",
                  "readout-duration": "fig2c"}


@dataclass(frozen=True)
class RunConfig:
    experiment: ExperimentConfig = field(default_factory=presets.fig2a)
    preset: str = "custom"
    grids: dict = field(default_factory=lambda: dict(GRID_DEFAULTS))
    output_dir: str = "out"

    def grid(self, name):
        return tuple(self.grids[name])


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_QTY = re.compile(rf"^\s*({_NUM})\s*([^\s\d.+-][^\s]*)?\s*$")
_RANGE = re.compile(r"^(.*)\.\.(.*)\bstep\b(.*)$")


def _quantity(text, kind, where, default_unit=None):
    m = _QTY.match(text)
    if not m:
        raise ConfigError(f"{where}: cannot read {text.strip()!r} as a number")
    value, unit = float(m.group(1)), m.group(2) or default_unit
    if kind == NUMBER:
        if unit:
            raise ConfigError(f"{where}: {text.strip()!r} takes no unit")
        return value
    table = FREQ_UNITS if kind == FREQ else TIME_UNITS
    if unit is None:
        raise ConfigError(f"{where}: {text.strip()!r} needs a unit ({', '.join(table)})")
    scale = table.get(unit.lower()) if unit.lower() in table else table.get(unit)
    if scale is None:
        raise ConfigError(f"{where}: unknown unit {unit!r} (expected one of {', '.join(table)})")
    return value * scale


def _unit_of(text):
    m = _QTY.match(text)
    return m.group(2) if m else None


def _parse_list(text, kind, where):
    text = text.strip()
    r = _RANGE.match(text)
    if r:
        a, b, step = (s.strip() for s in r.groups())
        unit = _unit_of(step) or _unit_of(b)
        lo, hi, st = (_quantity(s, kind, where, unit) for s in (a, b, step))
        if not st > 0:
            raise ConfigError(f"{where}: range step must be positive")
        n = int(round((hi - lo) / st)) + 1
        return tuple(lo + k * st for k in range(n))
    items = [s for s in (p.strip() for p in text.split(",")) if s]
    if not items:
        raise ConfigError(f"{where}: empty list")
    unit = _unit_of(items[-1])
    return tuple(_quantity(s, kind, where, unit) for s in items)


def _line_of(raw_lines, section, key):
    current = None
    for no, line in enumerate(raw_lines, 1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1].strip()
        elif current == section and re.match(rf"^{re.escape(key)}\s*[=:]", s):
            return no
    return None


def _suggest(word, options):
    close = difflib.get_close_matches(word, options, n=1, cutoff=0.5)
    return f"; did you mean {close[0]!r}?" if close else ""


def parse_config(text: str, origin="<config>") -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ConfigError(f"{origin}: {exc}") from exc
    raw = text.splitlines()
    values = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{origin}: unknown section [{section}]{_suggest(section, SCHEMA)}")
        keys = SCHEMA[section]
        for key, text_value in cp.items(section):
            line = _line_of(raw, section, key)
            where = f"{origin}:{line} [{section}] {key}" if line else f"{origin} [{section}] {key}"
            if key not in keys:
                raise ConfigError(f"{where}: unknown key {key!r}{_suggest(key, keys)}")
            kind = keys[key]
            v = text_value.strip()
            if (section, key) in OPTIONAL_AUTO and v.lower() in ("auto", "none"):
                values[(section, key)] = "auto" if (section, key) == ("integrator", "dt") else None
            elif isinstance(kind, tuple):
                values[(section, key)] = _parse_list(v, kind[0], where)
            elif kind == TEXT:
                values[(section, key)] = v
            elif kind == COMPLEX:
                try:
                    values[(section, key)] = complex(v.replace(" ", ""))
                except ValueError:
                    raise ConfigError(f"{where}: cannot read {v!r} as a complex number") from None
            else:
                values[(section, key)] = _quantity(v, kind, where)
    try:
        return _build(values, cp, origin)
    except ConfigError:
        raise
    except (OptostoreError, ValueError, TypeError) as exc:
        raise ConfigError(f"{origin}: {exc}") from exc


def _build(values, cp, origin):
    get = values.get
    name = get(("experiment", "preset"), "custom")
    if name == "custom":
        base = presets.fig2a()
    elif name in presets.PRESETS:
        base = presets.preset(name)
    else:
        raise ConfigError(f"{origin}: unknown preset {name!r}{_suggest(name, presets.PRESETS)}")

    def overlay(obj, section, mapping=None):
        mapping = mapping or {}
        kw = {}
        for key in SCHEMA[section]:
            if (section, key) in values:
                kw[mapping.get(key, key)] = values[(section, key)]
        return replace(obj, **kw) if kw else obj

    params = overlay(base.params, "resonator")
    if ("resonator", "kappa") in values and ("resonator", "kappa_ex") not in values:
        params = replace(params, kappa_ex=None)

    def pulse(section, current, kind):
        if section not in cp.sections():
            return current
        if current is None:
            need = [k for k in ("t_start", "duration", "peak") if (section, k) not in values]
            if need:
                raise ConfigError(f"{origin}: [{section}] needs {', '.join(need)}")
            current = PulseSpec(kind, values[(section, "t_start")], values[(section, "duration")],
                                values[(section, "peak")])
        return overlay(current, section)

    exp = replace(base, params=params,
                  writing=pulse("writing", base.writing, PulseKind.WRITING),
                  readout=pulse("readout", base.readout, PulseKind.READOUT))
    exp = overlay(exp, "drive")
    exp = overlay(exp, "coupling")
    if "initial" in cp.sections():
        exp = replace(exp, initial=overlay(exp.initial, "initial"))
    exp = replace(exp, integrator=overlay(exp.integrator, "integrator"), gate=overlay(exp.gate, "gate"),
                  initial=ModeState(exp.initial.alpha, exp.initial.beta))

    grids = dict(GRID_DEFAULTS)
    for key in GRID_DEFAULTS:
        if ("experiment", key) in values:
            grids[key] = values[("experiment", key)]
    out = get(("output", "directory"), "out")
    return RunConfig(experiment=exp, preset=name, grids=grids, output_dir=out)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, origin=str(path))


def _fmt(v, kind):
    if v is None:
        return "auto"
    if kind == FREQ:
        return f"{float(v)!r} Hz"
    if kind == TIME:
        return f"{float(v)!r} s"
    if kind == NUMBER:
        return repr(float(v))
    if kind == COMPLEX:
        return repr(complex(v)).strip("()")
    return str(v)


def emit_config(run: RunConfig) -> str:
    """Fully resolved configuration text; overrides nothing from a preset."""
    e = run.experiment
    lines = ["[experiment]", "preset = custom"]
    for key in GRID_DEFAULTS:
        kind = SCHEMA["experiment"][key][0]
        lines.append(f"{key} = " + ", ".join(_fmt(v, kind) for v in run.grids[key]))
    p = e.params
    lines += ["", "[resonator]"] + [f"{k} = {_fmt(getattr(p, k), FREQ)}" for k in SCHEMA["resonator"]]
    lines += ["", "[drive]", f"detuning = {_fmt(e.detuning, FREQ)}"]
    lines += ["", "[coupling]",
              f"g_times_xzpf = {_fmt(e.g_times_xzpf, FREQ)}",
              f"modulation_depth = {_fmt(e.modulation_depth, NUMBER)}",
              f"signal_peak = {_fmt(e.signal_peak, NUMBER)}",
              f"reference_coupling = {_fmt(e.reference_coupling, FREQ)}"]
    for name in ("writing", "readout"):
        pl = getattr(e, name)
        if pl is not None:
            lines += ["", f"[{name}]"] + [f"{k} = {_fmt(getattr(pl, k), SCHEMA[name][k])}"
                                           for k in SCHEMA[name]]
    lines += ["", "[initial]", f"alpha = {_fmt(e.initial.alpha, COMPLEX)}",
              f"beta = {_fmt(e.initial.beta, COMPLEX)}"]
    it = e.integrator
    lines += ["", "[integrator]", f"dt = {_fmt(None if it.dt == 'auto' else it.dt, TIME)}",
              f"t_end = {_fmt(it.t_end, TIME)}", f"method = {it.method}"]
    g = e.gate
    lines += ["", "[gate]"] + [f"{f.name} = {_fmt(getattr(g, f.name), SCHEMA['gate'][f.name])}"
                               for f in fields(g)]
    lines += ["", "[output]", f"directory = {run.output_dir}", ""]
    return "\n".join(lines)


def from_preset(name, output_dir="out") -> RunConfig:
    if name not in presets.PRESETS:
        raise ConfigError(f"unknown preset {name!r}{_suggest(name, presets.PRESETS)}")
    return RunConfig(experiment=presets.preset(name), preset=name, output_dir=output_dir)
