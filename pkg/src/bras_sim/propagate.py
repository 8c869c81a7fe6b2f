"""Propagation of circular components and unpolarized transmittivity.

The medium enters only through its optical depth ``OD = 4*pi*k*L*alpha_0``,
so a susceptibility ``chi`` (in units of alpha_0) picks up the phase factor
``exp(1j * OD/2 * chi)`` in amplitude and ``exp(-OD * Im chi)`` in intensity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .suscept import Drive, SusceptibilityPair, chi_dressed

RATIO_FLOOR = 1e-300


def optical_depth_from_medium(number_density: float, wavelength_cm: float, length_cm: float) -> float:
    """Resonant optical depth ``3 N lambda^2 L / (2 pi)`` of a two-level vapor.

    Follows from alpha_0 = 3 N lambda^3 / (16 pi^3), i.e. the dipole moment
    fixed by a spontaneous rate of 2*gamma, and OD = 4 pi k L alpha_0.

    Parameters
    ----------
    number_density : float
        Atoms per cm^3 (0 gives an empty medium).
    wavelength_cm, length_cm : float
        Probe wavelength and cell length in cm.
    """
    if number_density < 0:
        raise ValueError(f"number density must be >= 0, got {number_density!r}")
    if wavelength_cm <= 0:
        raise ValueError(f"wavelength must be > 0, got {wavelength_cm!r}")
    if length_cm <= 0:
        raise ValueError(f"length must be > 0, got {length_cm!r}")
    return 3.0 * number_density * wavelength_cm**2 * length_cm / (2.0 * math.pi)


@dataclass(frozen=True)
class PropagationGeometry:
    """Optical depth of the cell plus, optionally, the numbers it came from.

    ``provenance`` is ``"explicit"`` when the optical depth was given directly
    and ``"derived"`` when it was computed from (N, wavelength, length).  A
    derived geometry must agree with its own inputs.
    """

    optical_depth: float
    number_density: Optional[float] = None
    wavelength_cm: Optional[float] = None
    length_cm: Optional[float] = None
    provenance: str = "explicit"

    def __post_init__(self):
        if not np.isfinite(self.optical_depth) or self.optical_depth < 0:
            raise ValueError(f"optical_depth must be finite and >= 0, got {self.optical_depth!r}")
        if self.provenance not in ("explicit", "derived"):
            raise ValueError(f"provenance must be 'explicit' or 'derived', got {self.provenance!r}")
        if self.provenance == "derived":
            if None in (self.number_density, self.wavelength_cm, self.length_cm):
                raise ValueError("derived geometry needs number_density, wavelength_cm and length_cm")
            od = optical_depth_from_medium(self.number_density, self.wavelength_cm, self.length_cm)
            if not math.isclose(od, self.optical_depth, rel_tol=1e-12, abs_tol=1e-300):
                raise ValueError(
                    f"optical_depth {self.optical_depth!r} disagrees with derived value {od!r}; "
                    "use provenance='explicit' to override"
                )

    @classmethod
    def from_medium(cls, number_density: float, wavelength_cm: float, length_cm: float) -> "PropagationGeometry":
        od = optical_depth_from_medium(number_density, wavelength_cm, length_cm)
        return cls(od, number_density, wavelength_cm, length_cm, provenance="derived")

    def with_length(self, length_cm: float) -> "PropagationGeometry":
        """Same vapor, different cell length; OD scales linearly."""
        if length_cm <= 0:
            raise ValueError("length must be > 0")
        if self.length_cm is None:
            raise ValueError("geometry has no reference length to scale from")
        od = self.optical_depth * length_cm / self.length_cm
        return replace(self, optical_depth=od, length_cm=length_cm)


@dataclass(frozen=True)
class FieldAmplitudes:
    """Complex amplitudes of the sigma_+ and sigma_- components."""

    e_plus: complex
    e_minus: complex

    @classmethod
    def from_cartesian(cls, ex, ey) -> "FieldAmplitudes":
        # E_+- = (E_x -+ i E_y)/sqrt(2), paired with unit vectors (x +- i y)/sqrt(2)
        s = 1.0 / math.sqrt(2.0)
        return cls(s * (ex - 1j * ey), s * (ex + 1j * ey))

    def to_cartesian(self):
        s = 1.0 / math.sqrt(2.0)
        return s * (self.e_plus + self.e_minus), 1j * s * (self.e_plus - self.e_minus)

    @property
    def intensity(self):
        return np.abs(self.e_plus) ** 2 + np.abs(self.e_minus) ** 2


@dataclass(frozen=True)
class TransmissionPair:
    """T(B), T(-B) and their ratio; ``clamped`` marks a floored T(-B)."""

    t_forward: float
    t_reversed: float
    ratio: float
    clamped: bool = False


def propagate_polarized(amps: FieldAmplitudes, chi: SusceptibilityPair,
                        geometry: PropagationGeometry) -> FieldAmplitudes:
    """Output sigma_+- amplitudes after one pass through the cell."""
    half_od = 0.5 * geometry.optical_depth
    return FieldAmplitudes(
        amps.e_plus * np.exp(1j * half_od * np.asarray(chi.chi_plus)),
        amps.e_minus * np.exp(1j * half_od * np.asarray(chi.chi_minus)),
    )


def unpolarized_transmittivity(chi: SusceptibilityPair, geometry: PropagationGeometry):
    """Intensity transmission of unpolarized light: the mean of the two circular ones."""
    od = geometry.optical_depth
    t = 0.5 * (np.exp(-od * np.imag(chi.chi_plus)) + np.exp(-od * np.imag(chi.chi_minus)))
    return float(t) if np.ndim(t) == 0 else t


def asymmetry_ratio(t_forward, t_reversed):
    """Return ``(ratio, clamped)`` with T(-B) floored at ``RATIO_FLOOR``."""
    t_reversed = np.asarray(t_reversed, dtype=float)
    clamped = t_reversed < RATIO_FLOOR
    ratio = np.asarray(t_forward, dtype=float) / np.maximum(t_reversed, RATIO_FLOOR)
    if ratio.ndim == 0:
        return float(ratio), bool(clamped)
    return ratio, clamped


def transmission_pair(system: str, delta, field_magnitude, drive: Drive, medium,
                      geometry: PropagationGeometry) -> TransmissionPair:
    """Transmittivities for B parallel and antiparallel to k at fixed laser tuning."""
    if np.any(np.asarray(field_magnitude) <= 0):
        raise ValueError("field_magnitude must be > 0")
    fwd = chi_dressed(system, delta, field_magnitude, drive, medium)
    rev = chi_dressed(system, delta, -np.asarray(field_magnitude, dtype=float), drive, medium)
    t_fwd = unpolarized_transmittivity(fwd, geometry)
    t_rev = unpolarized_transmittivity(rev, geometry)
    ratio, clamped = asymmetry_ratio(t_fwd, t_rev)
    return TransmissionPair(t_fwd, t_rev, ratio, clamped)


def monte_carlo_unpolarized(chi: SusceptibilityPair, geometry: PropagationGeometry,
                            n_samples: int, seed: int, full_output: bool = False):
    """Transmittivity of unpolarized light by sampling its random relative phase.

    Each sample is a field with equal x and y intensities and a uniformly
    random phase between them.  It is decomposed into circular components,
    propagated, and its output intensity is measured from the Cartesian
    components.

    Returns
    -------
    float or (float, float)
        Mean output/input intensity, plus the standard error of the mean when
        ``full_output`` is true.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    phase = rng.uniform(0.0, 2.0 * math.pi, size=n_samples)
    ex = np.full(n_samples, math.sqrt(0.5), dtype=complex)
    ey = math.sqrt(0.5) * np.exp(1j * phase)
    out = propagate_polarized(FieldAmplitudes.from_cartesian(ex, ey), chi, geometry)
    ox, oy = out.to_cartesian()
    samples = np.abs(ox) ** 2 + np.abs(oy) ** 2
    mean = float(samples.mean())
    if not full_output:
        return mean
    stderr = float(samples.std(ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else math.inf
    return mean, stderr
