"""Figure presets, parameter scans and analytic locators.

A :class:`ScanSpec` describes a one-dimensional sweep over either the probe
detuning or the field magnitude.  The pump and probe detunings can be locked
to the field magnitude with rules such as ``"2B"`` or ``"-B"``.  A lock always
refers to |B|, so the lasers stay put when the field is reversed.
"""

from __future__ import annotations

import os
import re
from concurrent.futures import ThreadPoolExecutor
import dataclasses
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import optimize

from .doppler import VelocityProfile, averaged_chi
from .propagate import PropagationGeometry, asymmetry_ratio, unpolarized_transmittivity
from .suscept import (
    GAUSS_PER_GAMMA_LADDER,
    GAUSS_PER_GAMMA_LAMBDA,
    SYSTEMS,
    Drive,
    LadderMedium,
    LambdaMedium,
    SusceptibilityPair,
    chi_dressed,
    default_medium,
)

ABSCISSAE = ("delta", "field")

COLUMNS = (
    "abscissa",
    "im_chi_plus_fwd",
    "im_chi_minus_fwd",
    "im_chi_plus_rev",
    "im_chi_minus_rev",
    "T_fwd",
    "T_rev",
    "ratio",
)

SODIUM_WAVELENGTH_CM = 589e-7
CALCIUM_WAVELENGTH_CM = 422.7e-7
NUMBER_DENSITY = 1e10

# Lorentzian Doppler width (k * omega_D~ in gamma) at which the fig10 preset
# peaks at T(B)/T(-B) = 1.6; produced by calibrate_doppler_width().
FIG10_LORENTZ_WIDTH = 124.913

FIG9_OMEGAS = (2.0, 5.0, 10.0)

_LOCK_RE = re.compile(r"^\s*([+-]?)\s*(\d+(?:\.\d*)?|\.\d+)?\s*B\s*$")


class UnsupportedScenarioError(ValueError):
    """The requested combination of options is not modelled."""


def parse_lock(rule: str) -> float:
    """Coefficient ``c`` of a lock rule ``"cB"``, e.g. ``"2B" -> 2``, ``"-B" -> -1``."""
    m = _LOCK_RE.match(rule)
    if not m:
        raise ValueError(f"bad lock rule {rule!r}; expected e.g. '2B', '-B', '+B'")
    sign = -1.0 if m.group(1) == "-" else 1.0
    return sign * (float(m.group(2)) if m.group(2) else 1.0)


@dataclass(frozen=True)
class ScanSpec:
    """One-dimensional sweep over ``delta`` or the field magnitude.

    For a detuning scan ``field`` fixes |B|.  For a field scan the probe
    detuning is either fixed (``delta``) or locked (``delta_lock``).  The pump
    detuning is always either fixed (``delta_pump``) or locked
    (``delta_pump_lock``).
    """

    system: str
    abscissa: str
    start: float
    stop: float
    count: int
    omega: float
    geometry: PropagationGeometry
    field: Optional[float] = None
    delta: Optional[float] = None
    delta_lock: Optional[str] = None
    delta_pump: Optional[float] = None
    delta_pump_lock: Optional[str] = None
    medium: object = None
    doppler: Optional[VelocityProfile] = None
    doppler_method: str = "auto"
    omega_list: tuple = ()
    name: str = "custom"
    notes: dict = dataclasses.field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.system not in SYSTEMS:
            raise ValueError(f"system must be one of {SYSTEMS}, got {self.system!r}")
        if self.abscissa not in ABSCISSAE:
            raise ValueError(f"abscissa must be one of {ABSCISSAE}, got {self.abscissa!r}")
        if int(self.count) != self.count or self.count < 2:
            raise ValueError("count must be an integer >= 2")
        if not (np.isfinite(self.start) and np.isfinite(self.stop)) or not self.start < self.stop:
            raise ValueError("range needs finite start < stop")
        if not np.isfinite(self.omega) or self.omega < 0:
            raise ValueError("omega must be finite and >= 0")
        if self.medium is None:
            object.__setattr__(self, "medium", default_medium(self.system))
        expected = LambdaMedium if self.system == "lambda" else LadderMedium
        if not isinstance(self.medium, expected):
            raise ValueError(f"{self.system} scan needs a {expected.__name__}")
        if (self.delta_pump is None) == (self.delta_pump_lock is None):
            raise ValueError("give exactly one of delta_pump and delta_pump_lock")
        if self.delta_pump_lock is not None:
            parse_lock(self.delta_pump_lock)
        if self.abscissa == "delta":
            if self.field is None or not self.field > 0:
                raise ValueError("a detuning scan needs a field magnitude > 0")
            if self.delta is not None or self.delta_lock is not None:
                raise ValueError("a detuning scan cannot also fix delta")
        else:
            if self.start <= 0:
                raise ValueError("a field scan must have field magnitudes > 0")
            if self.field is not None:
                raise ValueError("a field scan cannot also fix the field")
            if (self.delta is None) == (self.delta_lock is None):
                raise ValueError("give exactly one of delta and delta_lock for a field scan")
            if self.delta_lock is not None:
                parse_lock(self.delta_lock)
        if self.doppler is not None and self.system != "lambda":
            raise UnsupportedScenarioError("Doppler averaging is implemented for the lambda system only")
        if self.doppler_method not in ("auto", "closed", "numeric"):
            raise ValueError(f"unknown Doppler method {self.doppler_method!r}")

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.count))

    def describe(self) -> dict:
        """Ordered key/value metadata for output headers."""
        g = self.geometry
        out = {
            "name": self.name,
            "system": self.system,
            "abscissa": self.abscissa,
            "range": f"{self.start!r}:{self.stop!r}:{int(self.count)}",
            "Omega": repr(float(self.omega)),
        }
        if self.field is not None:
            out["B"] = repr(float(self.field))
        if self.delta is not None:
            out["delta"] = repr(float(self.delta))
        if self.delta_lock is not None:
            out["delta_lock"] = self.delta_lock
        if self.delta_pump is not None:
            out["Delta"] = repr(float(self.delta_pump))
        if self.delta_pump_lock is not None:
            out["Delta_lock"] = self.delta_pump_lock
        for key, value in vars(self.medium).items():
            out[key] = repr(float(value))
        out["od"] = repr(float(g.optical_depth))
        out["od_provenance"] = g.provenance
        if g.number_density is not None:
            out["N_cm3"] = repr(float(g.number_density))
        if g.wavelength_cm is not None:
            out["wavelength_cm"] = repr(float(g.wavelength_cm))
        if g.length_cm is not None:
            out["length_cm"] = repr(float(g.length_cm))
        gauss = GAUSS_PER_GAMMA_LAMBDA if self.system == "lambda" else GAUSS_PER_GAMMA_LADDER
        out["gauss_per_gamma"] = repr(gauss)
        if self.doppler is not None:
            out["doppler_profile"] = self.doppler.kind
            out["doppler_width"] = repr(float(self.doppler.width))
            out["doppler_method"] = self.doppler_method
        if self.omega_list:
            out["Omega_list"] = "|".join(repr(float(o)) for o in self.omega_list)
        out.update({k: str(v) for k, v in self.notes.items()})
        return out


@dataclass
class ScanTable:
    """Rows of a scan, one numpy array per column, ordered by abscissa."""

    abscissa: np.ndarray
    im_chi_plus_fwd: np.ndarray
    im_chi_minus_fwd: np.ndarray
    im_chi_plus_rev: np.ndarray
    im_chi_minus_rev: np.ndarray
    t_forward: np.ndarray
    t_reversed: np.ndarray
    ratio: np.ndarray
    clamped: np.ndarray
    params: dict = dataclasses.field(default_factory=dict)

    def as_array(self) -> np.ndarray:
        return np.column_stack([
            self.abscissa, self.im_chi_plus_fwd, self.im_chi_minus_fwd, self.im_chi_plus_rev,
            self.im_chi_minus_rev, self.t_forward, self.t_reversed, self.ratio,
        ])

    def __len__(self):
        return len(self.abscissa)


def resolve_workers(workers: Optional[int] = None) -> int:
    """Thread count: explicit value, else ``BRAS_THREADS`` (0 = all cores), else 1."""
    if workers is None:
        raw = os.environ.get("BRAS_THREADS", "1")
        try:
            workers = int(raw)
        except ValueError:
            raise ValueError(f"BRAS_THREADS must be an integer, got {raw!r}") from None
    if workers < 0:
        raise ValueError("thread count must be >= 0")
    return workers or (os.cpu_count() or 1)


def _operating_point(spec: ScanSpec, x: np.ndarray):
    if spec.abscissa == "delta":
        magnitude = np.full_like(x, spec.field)
        delta = x
    else:
        magnitude = x
        delta = (parse_lock(spec.delta_lock) * magnitude if spec.delta_lock is not None
                 else np.full_like(x, spec.delta))
    if spec.delta_pump_lock is not None:
        delta_pump = parse_lock(spec.delta_pump_lock) * magnitude
    else:
        delta_pump = np.full_like(x, spec.delta_pump)
    return delta, magnitude, delta_pump


def _evaluate(spec: ScanSpec, delta, magnitude, delta_pump, workers):
    drive = Drive(spec.omega, delta_pump)
    if spec.doppler is None:
        fwd = chi_dressed(spec.system, delta, magnitude, drive, spec.medium)
        rev = chi_dressed(spec.system, delta, -magnitude, drive, spec.medium)
    else:
        kwargs = dict(method=spec.doppler_method, workers=workers)
        fwd = averaged_chi(delta, magnitude, drive, spec.medium, spec.doppler, **kwargs)
        rev = averaged_chi(delta, -magnitude, drive, spec.medium, spec.doppler, **kwargs)
    return fwd, rev


def run_scan(spec: ScanSpec, workers: Optional[int] = None) -> ScanTable:
    """Evaluate every row of ``spec``.

    Rows are independent; with more than one worker the grid is split into
    contiguous chunks and reassembled in order, so the result does not depend
    on the thread count.
    """
    workers = resolve_workers(workers)
    x = spec.grid()
    delta, magnitude, delta_pump = _operating_point(spec, x)

    if workers > 1 and spec.doppler is None and len(x) > 1:
        chunks = np.array_split(np.arange(len(x)), min(workers, len(x)))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(
                lambda idx: _evaluate(spec, delta[idx], magnitude[idx], delta_pump[idx], 1), chunks))
        fwd_plus = np.concatenate([np.atleast_1d(p[0].chi_plus) for p in parts])
        fwd_minus = np.concatenate([np.atleast_1d(p[0].chi_minus) for p in parts])
        rev_plus = np.concatenate([np.atleast_1d(p[1].chi_plus) for p in parts])
        rev_minus = np.concatenate([np.atleast_1d(p[1].chi_minus) for p in parts])
    else:
        fwd, rev = _evaluate(spec, delta, magnitude, delta_pump, workers)
        fwd_plus, fwd_minus = np.atleast_1d(fwd.chi_plus), np.atleast_1d(fwd.chi_minus)
        rev_plus, rev_minus = np.atleast_1d(rev.chi_plus), np.atleast_1d(rev.chi_minus)

    od_geom = spec.geometry
    t_fwd = np.atleast_1d(unpolarized_transmittivity(SusceptibilityPair(fwd_plus, fwd_minus), od_geom))
    t_rev = np.atleast_1d(unpolarized_transmittivity(SusceptibilityPair(rev_plus, rev_minus), od_geom))
    ratio, clamped = asymmetry_ratio(t_fwd, t_rev)
    params = spec.describe()
    params["clamped_rows"] = str(int(np.count_nonzero(clamped)))
    return ScanTable(
        abscissa=x,
        im_chi_plus_fwd=fwd_plus.imag,
        im_chi_minus_fwd=fwd_minus.imag,
        im_chi_plus_rev=rev_plus.imag,
        im_chi_minus_rev=rev_minus.imag,
        t_forward=t_fwd,
        t_reversed=t_rev,
        ratio=np.atleast_1d(ratio),
        clamped=np.atleast_1d(clamped),
        params=params,
    )


def expand_omegas(spec: ScanSpec) -> list:
    """One spec per entry of ``omega_list`` (or ``[spec]`` if it is empty)."""
    if not spec.omega_list:
        return [spec]
    return [replace(spec, omega=float(o), omega_list=(), name=f"{spec.name}_Omega{o:g}",
                    notes=dict(spec.notes)) for o in spec.omega_list]


def run_figure(name: str, workers: Optional[int] = None) -> list:
    """``[(label, ScanTable), ...]`` for a figure preset, one entry per drive strength."""
    return [(s.name, run_scan(s, workers)) for s in expand_omegas(figure_preset(name))]


def resonance_positions(field_magnitude: float, omega: float):
    """Probe detunings of the two dressed resonances of chi_+ under reversed field.

    Valid for the Lambda scheme with the pump locked at Delta = 2|B| and no
    ground-state dephasing: ``3B -+ sqrt(4B^2 + Omega^2)``.
    """
    if field_magnitude <= 0:
        raise ValueError("field_magnitude must be > 0")
    if omega < 0:
        raise ValueError("omega must be >= 0")
    root = np.sqrt(4.0 * field_magnitude**2 + omega**2)
    return 3.0 * field_magnitude - root, 3.0 * field_magnitude + root


def opacity_drive(field_magnitude: float) -> float:
    """Drive that puts the reversed-field chi_+ resonance on ``delta = -B``: 2*sqrt(3)*B."""
    if field_magnitude <= 0:
        raise ValueError("field_magnitude must be > 0")
    return 2.0 * np.sqrt(3.0) * field_magnitude


def eit_window(delta_pump: float, field_magnitude: float) -> float:
    """Probe detuning of the Lambda-scheme transparency point, ``Delta - 3B``."""
    return delta_pump - 3.0 * field_magnitude


def _sodium(length_cm=1.0):
    return PropagationGeometry.from_medium(NUMBER_DENSITY, SODIUM_WAVELENGTH_CM, length_cm)


def _calcium(length_cm=1.0):
    return PropagationGeometry.from_medium(NUMBER_DENSITY, CALCIUM_WAVELENGTH_CM, length_cm)


def _detuning_scan(system, omega, geometry, lock, **kw):
    return ScanSpec(system=system, abscissa="delta", start=-20.0, stop=20.0, count=2001,
                    omega=omega, field=5.0, delta_pump_lock=lock, geometry=geometry, **kw)


def _field_scan(system, omega, geometry, delta_lock, pump_lock, **kw):
    # 2000 points at spacing 0.0075 gamma covering (0, 15]
    return ScanSpec(system=system, abscissa="field", start=0.0075, stop=15.0, count=2000,
                    omega=omega, delta_lock=delta_lock, delta_pump_lock=pump_lock,
                    geometry=geometry, **kw)


def _build_preset(name: str) -> ScanSpec:
    if name in ("fig2a", "fig2b", "fig3"):
        view = {"fig2a": "B parallel to k", "fig2b": "B antiparallel to k"}.get(name)
        notes = {"panel": view.replace(" ", "_")} if view else {}
        return _detuning_scan("lambda", 0.5, _sodium(), "2B", name=name, notes=notes)
    if name in ("fig4", "fig5"):
        return _field_scan("lambda", 10.0, _sodium(), "-B", "2B", name=name)
    if name in ("fig7a", "fig7b", "fig8"):
        view = {"fig7a": "B parallel to k", "fig7b": "B antiparallel to k"}.get(name)
        notes = {"panel": view.replace(" ", "_")} if view else {}
        return _detuning_scan("ladder", 0.5, _calcium(), "-B", medium=LadderMedium(0.45),
                              name=name, notes=notes)
    if name == "fig9":
        return _field_scan("ladder", FIG9_OMEGAS[0], _calcium(), "+B", "-B", medium=LadderMedium(0.45),
                           omega_list=FIG9_OMEGAS, name=name,
                           notes={"Omega_list_provenance": "assumed"})
    if name == "fig10":
        return _detuning_scan("lambda", 10.0, _sodium(6.0), "2B",
                              doppler=VelocityProfile("lorentz", FIG10_LORENTZ_WIDTH), name=name,
                              notes={"doppler_width_provenance": "calibrated",
                                     "calibration_target_ratio": "1.6"})
    raise KeyError(f"unknown figure preset {name!r}; known: {', '.join(FIGURES)}")


FIGURES = ("fig2a", "fig2b", "fig3", "fig4", "fig5", "fig7a", "fig7b", "fig8", "fig9", "fig10")


def figure_preset(name: str) -> ScanSpec:
    """The scan behind one of the published figures, e.g. ``figure_preset("fig3")``."""
    return _build_preset(name)


def max_doppler_ratio(spec: ScanSpec, width: float) -> float:
    """Largest T(B)/T(-B) of a Doppler scan when its Lorentzian width is set to ``width``."""
    table = run_scan(replace(spec, doppler=VelocityProfile("lorentz", width), notes=dict(spec.notes)), 1)
    return float(np.max(table.ratio))


def calibrate_doppler_width(spec: Optional[ScanSpec] = None, target: float = 1.6,
                            bracket=(50.0, 200.0)) -> float:
    """Lorentzian width at which the peak asymmetry of ``spec`` equals ``target``.

    The peak ratio falls monotonically with width over the default bracket.
    """
    spec = spec or figure_preset("fig10")
    return optimize.brentq(lambda w: max_doppler_ratio(spec, w) - target, *bracket, xtol=1e-6)
