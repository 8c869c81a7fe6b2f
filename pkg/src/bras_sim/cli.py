"""Command-line front end.

Examples::

    bras-sim figure fig3 --out fig3.csv
    bras-sim scan --system lambda --abscissa delta --range -20:20:2001 \\
        --B 5 --Omega 0.5 --Delta-lock 2B --od 16.57
    bras-sim point --system ladder --delta 5 --B 5 --Omega 0.5 --Delta -5
    bras-sim doppler --range -20:20:401 --B 5 --Omega 10 --width 124.9 --length-cm 6

Every physical quantity is in units of gamma; susceptibilities are in units
of alpha_0.  ``--config FILE`` reads ``key = value`` lines (``#`` starts a
comment) whose keys are the long flag names; flags given on the command line
win over the file.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .doppler import QuadratureError, VelocityProfile
from .propagate import PropagationGeometry, transmission_pair
from .scenarios import (
    CALCIUM_WAVELENGTH_CM,
    COLUMNS,
    FIGURES,
    NUMBER_DENSITY,
    SODIUM_WAVELENGTH_CM,
    ScanSpec,
    ScanTable,
    UnsupportedScenarioError,
    expand_omegas,
    figure_preset,
    parse_lock,
    run_scan,
)
from .suscept import Drive, LadderMedium, LambdaMedium, SingularSusceptibilityError, chi_dressed

PROG = "bras-sim"
COMMANDS = ("figure", "scan", "point", "doppler")


class ConfigError(ValueError):
    """Malformed command line or configuration file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _finite_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite, got {text!r}")
    return value


def _positive(text):
    value = _finite_float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _nonnegative(text):
    value = _finite_float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _lock(text):
    try:
        parse_lock(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text.strip()


def _range(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}")
    try:
        start, stop, count = _finite_float(parts[0]), _finite_float(parts[1]), int(parts[2])
    except (ValueError, argparse.ArgumentTypeError):
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}") from None
    if count < 2 or not start < stop:
        raise argparse.ArgumentTypeError(f"need start < stop and count >= 2, got {text!r}")
    return start, stop, count


def _precision(text):
    value = int(text)
    if not 1 <= value <= 17:
        raise argparse.ArgumentTypeError("precision must be between 1 and 17 significant digits")
    return value


def _add_common(p):
    p.add_argument("--config", help="key = value file; command-line flags override it")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--precision", type=_precision, default=12, help="significant digits (default 12)")


def _add_physics(p, scan: bool, system_choices=("lambda", "ladder")):
    p.add_argument("--system", choices=system_choices)
    if scan:
        p.add_argument("--abscissa", choices=("delta", "field"))
        p.add_argument("--range", type=_range, help="start:stop:count in units of gamma")
    p.add_argument("--B", type=_positive, help="field magnitude |B| (gamma)")
    p.add_argument("--Omega", type=_nonnegative, help="control half Rabi frequency (gamma)")
    p.add_argument("--Delta", type=_finite_float, help="pump detuning (gamma)")
    p.add_argument("--Delta-lock", type=_lock, help="pump detuning locked to |B|, e.g. 2B or -B")
    p.add_argument("--delta", type=_finite_float, help="probe detuning (gamma)")
    if scan:
        p.add_argument("--delta-lock", type=_lock, help="probe detuning locked to |B| in field scans")
    p.add_argument("--od", type=_nonnegative, help="optical depth 4*pi*k*L*alpha_0")
    p.add_argument("--N", type=_nonnegative, help="number density, cm^-3")
    p.add_argument("--wavelength-nm", type=_positive, help="probe wavelength, nm")
    p.add_argument("--length-cm", type=_positive, help="cell length, cm")
    p.add_argument("--gamma-epg", type=_nonnegative, help="lambda: |e+>-|g> coherence decay")
    p.add_argument("--gamma-emg", type=_nonnegative, help="lambda: |e->-|g> coherence decay")
    p.add_argument("--gamma-fg", type=_nonnegative, help="lambda: |f>-|g> dephasing")
    p.add_argument("--gamma-upper", type=_positive, help="ladder: top-level decay")


def build_parser():
    parser = _Parser(prog=PROG, allow_abbrev=False,
                     description="Field-reversal asymmetry of unpolarized light (units of gamma).")
    parser.add_argument("--version", action="version", version=f"{PROG} {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    subs = {}
    p = sub.add_parser("figure", allow_abbrev=False, help="run a figure preset")
    p.add_argument("name", nargs="?", choices=FIGURES)
    _add_common(p)
    subs["figure"] = p
    p = sub.add_parser("scan", allow_abbrev=False, help="detuning or field scan")
    _add_physics(p, scan=True)
    _add_common(p)
    subs["scan"] = p
    p = sub.add_parser("point", allow_abbrev=False, help="evaluate a single operating point")
    _add_physics(p, scan=False)
    _add_common(p)
    subs["point"] = p
    p = sub.add_parser("doppler", allow_abbrev=False, help="Doppler-averaged lambda scan")
    _add_physics(p, scan=True, system_choices=("lambda",))
    p.add_argument("--profile", choices=("lorentz", "maxwell"), default="lorentz")
    p.add_argument("--width", type=_positive, help="Doppler width k*omega_D (gamma)")
    p.add_argument("--method", choices=("auto", "closed", "numeric"), default="auto")
    _add_common(p)
    subs["doppler"] = p
    return parser, subs


@dataclass
class PointSpec:
    system: str
    delta: float
    field: float
    drive: Drive
    medium: object
    geometry: PropagationGeometry

    def describe(self) -> dict:
        out = {"system": self.system, "delta": repr(self.delta), "B": repr(self.field),
               "Omega": repr(float(self.drive.omega)), "Delta": repr(float(self.drive.delta_pump))}
        out.update({k: repr(float(v)) for k, v in vars(self.medium).items()})
        out["od"] = repr(self.geometry.optical_depth)
        out["od_provenance"] = self.geometry.provenance
        return out


@dataclass
class RunConfig:
    command: str
    out: Optional[str] = None
    precision: int = 12
    figure: Optional[str] = None
    spec: Optional[ScanSpec] = None
    point: Optional[PointSpec] = None


def parse_kv(text: str) -> dict:
    """Flat ``key = value`` lines; blank lines and ``#`` comments ignored."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"config line {lineno}: empty key")
        if key in values:
            raise ConfigError(f"config line {lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def _value_flags(subs):
    return {opt for p in subs.values() for action in p._actions
            if isinstance(action, argparse._StoreAction) for opt in action.option_strings}


def _join_values(argv, flags):
    # lets "--range -20:20:2001" through argparse, which would read "-20:..." as a flag
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in flags and i + 1 < len(argv) and not argv[i + 1].startswith("--"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _apply_file(sub, values: dict, command: str):
    by_name = {}
    for action in sub._actions:
        for opt in action.option_strings:
            by_name[opt.lstrip("-")] = action
        if not action.option_strings and action.dest != "help":
            by_name[action.dest] = action
    defaults = {}
    for key, raw in values.items():
        if key == "command":
            if raw != command:
                raise ConfigError(f"config command {raw!r} does not match {command!r}")
            continue
        action = by_name.get(key) or by_name.get(key.replace("_", "-"))
        if action is None or action.dest in ("config", "help"):
            raise ConfigError(f"unknown config key {key!r} for {command}")
        try:
            value = action.type(raw) if action.type else raw
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise ConfigError(f"config key {key!r}: {exc}") from None
        if action.choices is not None and value not in action.choices:
            raise ConfigError(f"config key {key!r}: invalid choice {value!r}")
        defaults[action.dest] = value
    sub.set_defaults(**defaults)


def _geometry(ns, system):
    medium_flags = [ns.N, ns.wavelength_nm, ns.length_cm]
    if ns.od is not None:
        if any(v is not None for v in medium_flags):
            raise ConfigError("--od conflicts with --N/--wavelength-nm/--length-cm; give one or the other")
        return PropagationGeometry(ns.od)
    n = NUMBER_DENSITY if ns.N is None else ns.N
    lam_cm = (SODIUM_WAVELENGTH_CM if system == "lambda" else CALCIUM_WAVELENGTH_CM) \
        if ns.wavelength_nm is None else ns.wavelength_nm * 1e-7
    return PropagationGeometry.from_medium(n, lam_cm, 1.0 if ns.length_cm is None else ns.length_cm)


def _medium(ns, system):
    if system == "lambda":
        if ns.gamma_upper is not None:
            raise ConfigError("--gamma-upper applies to the ladder system only")
        base = LambdaMedium()
        return LambdaMedium(
            base.gamma_epg if ns.gamma_epg is None else ns.gamma_epg,
            base.gamma_emg if ns.gamma_emg is None else ns.gamma_emg,
            base.gamma_fg if ns.gamma_fg is None else ns.gamma_fg,
        )
    if any(v is not None for v in (ns.gamma_epg, ns.gamma_emg, ns.gamma_fg)):
        raise ConfigError("--gamma-epg/--gamma-emg/--gamma-fg apply to the lambda system only")
    return LadderMedium() if ns.gamma_upper is None else LadderMedium(ns.gamma_upper)


def _require(ns, *names):
    for name in names:
        if getattr(ns, name.replace("-", "_")) is None:
            raise ConfigError(f"missing required --{name}")


def _pump(ns, system):
    if ns.Delta is not None and ns.Delta_lock is not None:
        raise ConfigError("give only one of --Delta and --Delta-lock")
    if ns.Delta is None and ns.Delta_lock is None:
        return None, "2B" if system == "lambda" else "-B"
    return ns.Delta, ns.Delta_lock


def _scan_spec(ns, command) -> ScanSpec:
    system = ns.system or ("lambda" if command == "doppler" else None)
    if system is None:
        raise ConfigError("missing required --system")
    abscissa = ns.abscissa or ("delta" if command == "doppler" else None)
    if abscissa is None:
        raise ConfigError("missing required --abscissa")
    _require(ns, "range", "Omega")
    start, stop, count = ns.range
    delta_pump, pump_lock = _pump(ns, system)
    kw = {}
    if abscissa == "delta":
        _require(ns, "B")
        if ns.delta is not None or ns.delta_lock is not None:
            raise ConfigError("--delta/--delta-lock cannot be used with --abscissa delta")
        kw["field"] = ns.B
    else:
        if ns.B is not None:
            raise ConfigError("--B cannot be used with --abscissa field")
        if ns.delta is not None and ns.delta_lock is not None:
            raise ConfigError("give only one of --delta and --delta-lock")
        if ns.delta is None and ns.delta_lock is None:
            kw["delta_lock"] = "-B" if system == "lambda" else "+B"
        else:
            kw["delta"], kw["delta_lock"] = ns.delta, ns.delta_lock
    if command == "doppler":
        _require(ns, "width")
        kw["doppler"] = VelocityProfile(ns.profile, ns.width)
        kw["doppler_method"] = ns.method
    try:
        return ScanSpec(system=system, abscissa=abscissa, start=start, stop=stop, count=count,
                        omega=ns.Omega, geometry=_geometry(ns, system), delta_pump=delta_pump,
                        delta_pump_lock=pump_lock, medium=_medium(ns, system), **kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _point_spec(ns) -> PointSpec:
    _require(ns, "system", "delta", "B", "Omega")
    delta_pump, pump_lock = _pump(ns, ns.system)
    if pump_lock is not None:
        delta_pump = parse_lock(pump_lock) * ns.B
    return PointSpec(ns.system, ns.delta, ns.B, Drive(ns.Omega, delta_pump),
                     _medium(ns, ns.system), _geometry(ns, ns.system))


def parse_config(argv, file_text: Optional[str] = None) -> RunConfig:
    """Build a :class:`RunConfig` from command-line tokens and an optional config text.

    ``file_text`` stands in for the contents of ``--config``; passing both is
    an error.
    """
    parser, subs = build_parser()
    argv = _join_values(list(argv), _value_flags(subs))
    ns = parser.parse_args(argv)
    if ns.command is None:
        raise ConfigError(f"missing command; expected one of {', '.join(COMMANDS)}")
    if ns.config is not None:
        if file_text is not None:
            raise ConfigError("both --config and file_text given")
        try:
            file_text = Path(ns.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {ns.config}: {exc.strerror}") from None
    if file_text is not None:
        _apply_file(subs[ns.command], parse_kv(file_text), ns.command)
        ns = parser.parse_args(argv)

    cfg = RunConfig(command=ns.command, out=ns.out, precision=ns.precision)
    if ns.command == "figure":
        if ns.name is None:
            raise ConfigError("missing figure name")
        cfg.figure = ns.name
        cfg.spec = figure_preset(ns.name)
    elif ns.command == "point":
        cfg.point = _point_spec(ns)
    else:
        cfg.spec = _scan_spec(ns, ns.command)
    return cfg


def _fmt(x: float, precision: int) -> str:
    # + 0.0 folds negative zero into zero
    return f"{float(x) + 0.0:.{precision - 1}e}"


def _header(params: dict) -> str:
    body = ",".join(f"{k}={v}" for k, v in params.items())
    return f"# {PROG} v{__version__}; params: {body}\n"


def write_csv(table: ScanTable, stream, precision: int = 12) -> None:
    stream.write(_header(table.params))
    stream.write(",".join(COLUMNS) + "\n")
    for row in table.as_array():
        stream.write(",".join(_fmt(v, precision) for v in row) + "\n")


def emit_csv(table: ScanTable, destination, precision: int = 12) -> None:
    """Write ``table`` as CSV to a path or an open text stream."""
    if hasattr(destination, "write"):
        write_csv(table, destination, precision)
        return
    path = Path(destination)
    try:
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            write_csv(table, fh, precision)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def read_csv(source):
    """Parse an emitted CSV back into ``(params, rows)``; inverse of :func:`emit_csv`."""
    text = Path(source).read_text(encoding="utf-8") if not hasattr(source, "read") else source.read()
    lines = text.splitlines()
    header = lines[0]
    params = {}
    if "params: " in header:
        for item in header.split("params: ", 1)[1].split(","):
            if item:
                key, _, value = item.partition("=")
                params[key] = value
    if lines[1].split(",") != list(COLUMNS):
        raise ValueError("unexpected column line")
    rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[2:] if ln], dtype=float)
    return params, rows.reshape(-1, len(COLUMNS))


def point_eval(config: RunConfig, stream=None) -> dict:
    """Print chi(+-B), T(+-B) and their ratio for a single operating point."""
    stream = stream or sys.stdout
    pt = config.point
    fwd = chi_dressed(pt.system, pt.delta, pt.field, pt.drive, pt.medium)
    rev = chi_dressed(pt.system, pt.delta, -pt.field, pt.drive, pt.medium)
    pair = transmission_pair(pt.system, pt.delta, pt.field, pt.drive, pt.medium, pt.geometry)
    p = config.precision
    record = {
        "chi_plus_fwd": fwd.chi_plus, "chi_minus_fwd": fwd.chi_minus,
        "chi_plus_rev": rev.chi_plus, "chi_minus_rev": rev.chi_minus,
        "T_fwd": pair.t_forward, "T_rev": pair.t_reversed, "ratio": pair.ratio,
    }
    stream.write(_header(pt.describe()))
    for key, value in record.items():
        if isinstance(value, complex):
            text = f"{_fmt(value.real, p)}{'+' if value.imag + 0.0 >= 0 else '-'}{_fmt(abs(value.imag), p)}j"
        else:
            text = _fmt(value, p)
        stream.write(f"{key} = {text}\n")
    return record


def _suffixed(path: str, label: str, base: str) -> Path:
    p = Path(path)
    return p.with_name(p.stem + label[len(base):] + p.suffix)


def run(config: RunConfig, stdout=None) -> None:
    stdout = stdout or sys.stdout
    if config.command == "point":
        if config.out:
            with open(config.out, "w", encoding="utf-8", newline="\n") as fh:
                point_eval(config, fh)
        else:
            point_eval(config, stdout)
        return
    specs = expand_omegas(config.spec)
    for spec in specs:
        table = run_scan(spec)
        if config.out is None:
            emit_csv(table, stdout, config.precision)
        elif len(specs) == 1:
            emit_csv(table, config.out, config.precision)
        else:
            emit_csv(table, _suffixed(config.out, spec.name, config.spec.name), config.precision)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = parse_config(argv)
        run(config)
    except ConfigError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        # downstream reader closed early (e.g. `| head`); silence the flush at exit
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 1
    except (SingularSusceptibilityError, QuadratureError, UnsupportedScenarioError, OSError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
