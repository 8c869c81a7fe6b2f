"""Closed-form probe susceptibilities for the Lambda and ladder schemes.

All rates, detunings and Zeeman shifts are in units of gamma (half the
spontaneous decay rate of the probe's upper level), and every returned
susceptibility is in units of alpha_0.  The magnetic field enters as a single
signed number ``b``: ``b > 0`` is parallel to the propagation direction,
``b < 0`` antiparallel.  Reversing the field is ``b -> -b`` with all laser
detunings held fixed.

The functions broadcast over numpy arrays for ``delta`` and ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

ArrayLike = Union[float, np.ndarray]

# Zeeman conversion: 5 gamma is 105 G for sodium and 123 G for calcium.
# Metadata only; nothing is computed in gauss.
GAUSS_PER_GAMMA_LAMBDA = 21.0
GAUSS_PER_GAMMA_LADDER = 24.6

SYSTEMS = ("lambda", "ladder")


class SingularSusceptibilityError(ArithmeticError):
    """The dressed-state denominator vanished (zero-width resonance)."""


@dataclass(frozen=True)
class LambdaMedium:
    """Coherence decay rates of the sodium-like Lambda scheme."""

    gamma_epg: float = 4.0 / 3.0
    gamma_emg: float = 1.0
    gamma_fg: float = 0.0

    def __post_init__(self):
        for name in ("gamma_epg", "gamma_emg", "gamma_fg"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class LadderMedium:
    """Decay rate of the top level of the calcium-like ladder scheme."""

    gamma_upper: float = 0.45

    def __post_init__(self):
        if not np.isfinite(self.gamma_upper) or self.gamma_upper <= 0:
            raise ValueError(f"gamma_upper must be finite and > 0, got {self.gamma_upper!r}")


@dataclass(frozen=True)
class Drive:
    """Control field: half Rabi frequency ``omega`` and detuning ``delta_pump``.

    ``delta_pump`` may be an array when it is locked to a scanned field.
    """

    omega: float
    delta_pump: ArrayLike

    def __post_init__(self):
        if not np.isfinite(self.omega) or self.omega < 0:
            raise ValueError(f"omega must be finite and >= 0, got {self.omega!r}")
        if not np.all(np.isfinite(self.delta_pump)):
            raise ValueError(f"delta_pump must be finite, got {self.delta_pump!r}")


@dataclass(frozen=True)
class SusceptibilityPair:
    """chi_+ and chi_- for the two circular probe components, in units of alpha_0."""

    chi_plus: ArrayLike
    chi_minus: ArrayLike

    def swapped(self) -> "SusceptibilityPair":
        return SusceptibilityPair(self.chi_minus, self.chi_plus)


def _finite(**values):
    out = []
    for name, value in values.items():
        arr = np.asarray(value, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"{name} must be finite")
        out.append(arr)
    return out


def _scalarize(x):
    x = np.asarray(x)
    return complex(x) if x.ndim == 0 else x


def _divide(num, den, what):
    den = np.asarray(den)
    if np.any(den == 0):
        raise SingularSusceptibilityError(f"{what}: denominator vanishes (all relevant widths are zero)")
    return num / den


def _lorentzian(detuning, width):
    # -i / (i x - g): absorptive Lorentzian, Im >= 0 for g >= 0
    return _divide(-1j, 1j * detuning - width, "two-level line")


def chi_lambda_bare(delta, b, medium: LambdaMedium = LambdaMedium()) -> SusceptibilityPair:
    """Bare Lambda-scheme susceptibilities.

    The sigma_- line sits at ``delta = b`` with width ``gamma_emg``; the
    sigma_+ line at ``delta = -b`` with width ``gamma_epg``.
    """
    delta, b = _finite(delta=delta, b=b)
    chi_minus = _lorentzian(delta - b, medium.gamma_emg)
    chi_plus = _lorentzian(delta + b, medium.gamma_epg)
    chi_plus, chi_minus = np.broadcast_arrays(chi_plus, chi_minus)
    return SusceptibilityPair(_scalarize(chi_plus), _scalarize(chi_minus))


def two_photon_detuning_lambda(delta, b, delta_pump):
    """delta - Delta + 3b: detuning of |f> from two-photon resonance with |g>."""
    return delta - delta_pump + 3.0 * b


def chi_lambda_dressed(delta, b, drive: Drive, medium: LambdaMedium = LambdaMedium()) -> SusceptibilityPair:
    """Lambda-scheme susceptibilities with the control field on |e+> <-> |f>.

    Only chi_+ is dressed.  With ``omega == 0`` the common factor of the
    two-photon term is cancelled analytically, so the bare line is returned
    even at two-photon resonance.

    Raises
    ------
    SingularSusceptibilityError
        If the dressed denominator is exactly zero, which needs zero dephasing.
    """
    delta, b = _finite(delta=delta, b=b)
    return lambda_dressed_core(delta, b, drive.omega, drive.delta_pump, medium)


def lambda_dressed_core(delta, b, omega, delta_pump, medium: LambdaMedium) -> SusceptibilityPair:
    """Unvalidated dressed Lambda evaluation; ``delta_pump`` may be an array."""
    chi_minus = _lorentzian(delta - b, medium.gamma_emg)
    if omega == 0:
        chi_plus = _lorentzian(delta + b, medium.gamma_epg)
    else:
        p = 1j * two_photon_detuning_lambda(delta, b, delta_pump) - medium.gamma_fg
        den = (1j * (delta + b) - medium.gamma_epg) * p + omega**2
        chi_plus = _divide(-1j * p, den, "dressed Lambda chi_+")
    chi_plus, chi_minus = np.broadcast_arrays(chi_plus, chi_minus)
    return SusceptibilityPair(_scalarize(chi_plus), _scalarize(chi_minus))


def chi_ladder_bare(delta, b) -> SusceptibilityPair:
    """Bare ladder-scheme susceptibilities (both lines have unit width)."""
    delta, b = _finite(delta=delta, b=b)
    chi_plus = _lorentzian(delta - b, 1.0)
    chi_minus = _lorentzian(delta + b, 1.0)
    chi_plus, chi_minus = np.broadcast_arrays(chi_plus, chi_minus)
    return SusceptibilityPair(_scalarize(chi_plus), _scalarize(chi_minus))


def chi_ladder_dressed(delta, b, drive: Drive, medium: LadderMedium = LadderMedium()) -> SusceptibilityPair:
    """Ladder-scheme susceptibilities with the control field on |e+> <-> |f>.

    The top level has m_j = 0, so the two-photon term ``Delta + delta`` carries
    no Zeeman shift.
    """
    delta, b = _finite(delta=delta, b=b)
    chi_minus = _lorentzian(delta + b, 1.0)
    if drive.omega == 0:
        chi_plus = _lorentzian(delta - b, 1.0)
    else:
        q = 1j * (drive.delta_pump + delta) - medium.gamma_upper
        den = (1j * (delta - b) - 1.0) * q + drive.omega**2
        chi_plus = _divide(-1j * q, den, "dressed ladder chi_+")
    chi_plus, chi_minus = np.broadcast_arrays(chi_plus, chi_minus)
    return SusceptibilityPair(_scalarize(chi_plus), _scalarize(chi_minus))


def chi_dressed(system: str, delta, b, drive: Drive, medium=None) -> SusceptibilityPair:
    """Dispatch to the dressed susceptibility of ``system`` ('lambda' or 'ladder')."""
    if system == "lambda":
        return chi_lambda_dressed(delta, b, drive, medium or LambdaMedium())
    if system == "ladder":
        return chi_ladder_dressed(delta, b, drive, medium or LadderMedium())
    raise ValueError(f"unknown system {system!r}; expected one of {SYSTEMS}")


def default_medium(system: str):
    if system == "lambda":
        return LambdaMedium()
    if system == "ladder":
        return LadderMedium()
    raise ValueError(f"unknown system {system!r}; expected one of {SYSTEMS}")


def gamma_upper_from_wavelengths(lambda_eg: float, lambda_fe: float) -> float:
    """Decay rate of the ladder's top level, in units of gamma, from two wavelengths.

    With equal dipole moments the population decay of |f> is that of |e+>
    (2*gamma) scaled by (lambda_eg/lambda_fe)**3; half of it is the rate in
    units of gamma.  Calcium's 422.7 nm / 551.3 nm pair gives 0.45.  Any
    common length unit works.
    """
    if lambda_eg <= 0 or lambda_fe <= 0:
        raise ValueError("wavelengths must be positive")
    full_rate = 2.0 * (lambda_eg / lambda_fe) ** 3
    return 0.5 * full_rate
