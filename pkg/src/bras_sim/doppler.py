"""Doppler averaging of the dressed Lambda-scheme susceptibilities.

Velocities are measured by their Doppler shift ``kv = k * v_z`` in units of
gamma, so ``k`` never appears on its own.  Probe and pump copropagate with
``k_p ~= k``; an atom moving at ``kv`` sees both detunings shifted by ``+kv``,
which leaves the two-photon term ``delta - Delta + 3b`` unchanged.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .suscept import (
    Drive,
    LambdaMedium,
    SingularSusceptibilityError,
    SusceptibilityPair,
    lambda_dressed_core,
    two_photon_detuning_lambda,
)

PROFILE_KINDS = ("maxwell", "lorentz")


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate=None):
        super().__init__(message if estimate is None else f"{message} (error estimate {estimate:.3g})")
        self.estimate = estimate


@dataclass(frozen=True)
class VelocityProfile:
    """Distribution of Doppler shifts.

    ``width`` is k*omega_D (Gaussian standard deviation) for ``"maxwell"`` and
    k*omega_D~ (half width at half maximum) for ``"lorentz"``, in units of gamma.
    """

    kind: str
    width: float

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ValueError(f"profile kind must be one of {PROFILE_KINDS}, got {self.kind!r}")
        if not np.isfinite(self.width) or self.width <= 0:
            raise ValueError(f"profile width must be finite and > 0, got {self.width!r}")

    def to_lorentz(self) -> "VelocityProfile":
        if self.kind == "lorentz":
            return self
        return VelocityProfile("lorentz", lorentz_width_from_maxwell(self.width))


def lorentz_width_from_maxwell(omega_d: float) -> float:
    """Width of the Lorentzian stand-in for a Maxwell-Boltzmann profile, 2 ln2 * omega_D."""
    if omega_d <= 0:
        raise ValueError("omega_d must be > 0")
    return 2.0 * omega_d * math.log(2.0)


def profile_weight(profile: VelocityProfile, kv):
    """Normalized probability density of Doppler shift ``kv``."""
    kv = np.asarray(kv, dtype=float)
    w = profile.width
    if profile.kind == "maxwell":
        out = np.exp(-(kv**2) / (2.0 * w**2)) / math.sqrt(2.0 * math.pi * w**2)
    else:
        out = (w / math.pi) / (kv**2 + w**2)
    return float(out) if out.ndim == 0 else out


def shifted_chi_lambda(delta, b, drive: Drive, medium: LambdaMedium, kv) -> SusceptibilityPair:
    """Dressed Lambda susceptibilities seen by atoms with Doppler shift ``kv``.

    Probe detuning and pump detuning both move by ``+kv``.
    """
    delta = np.asarray(delta, dtype=float)
    kv = np.asarray(kv, dtype=float)
    b = np.asarray(b, dtype=float)
    if not (np.all(np.isfinite(delta)) and np.all(np.isfinite(kv)) and np.all(np.isfinite(b))):
        raise ValueError("delta, b and kv must be finite")
    return lambda_dressed_core(delta + kv, b, drive.omega, drive.delta_pump + kv, medium)


def pole_velocities(delta, b, drive: Drive, medium: LambdaMedium = LambdaMedium()):
    """Complex Doppler shifts ``(k v_+, k v_-)`` at which the integrand of each component diverges.

    Each velocity-resolved susceptibility has the form ``1/(kv_pole - kv)``
    up to sign, so these are the poles closed over by the residue theorem.

    Raises
    ------
    SingularSusceptibilityError
        If the two-photon factor P is zero (chi_+ vanishes for every velocity).
    """
    delta = np.asarray(delta, dtype=float)
    b = np.asarray(b, dtype=float)
    p = 1j * two_photon_detuning_lambda(delta, b, drive.delta_pump) - medium.gamma_fg
    if np.any(p == 0):
        raise SingularSusceptibilityError("two-photon factor P is zero; k v_+ is undefined")
    kv_plus = 1j * ((1j * (delta + b) - medium.gamma_epg) * p + drive.omega**2) / p
    kv_minus = 1j * (1j * (delta - b) - medium.gamma_emg)
    return kv_plus, kv_minus


def closed_form_lorentz_average(delta, b, drive: Drive, medium: LambdaMedium,
                                lorentz_width: float) -> SusceptibilityPair:
    """Exact average over a Lorentzian velocity profile.

    Closing the contour in the upper half plane picks up only the profile's
    pole at ``kv = i w``, so the average equals the susceptibility of a
    stationary atom with every one-photon width increased by ``w``.  The
    expression is kept in multiplied-out form so that two-photon resonance
    (P = 0) gives its limit, chi_+ = 0, instead of dividing by zero.
    """
    if lorentz_width < 0:
        raise ValueError("lorentz_width must be >= 0")
    delta = np.asarray(delta, dtype=float)
    b = np.asarray(b, dtype=float)
    if not (np.all(np.isfinite(delta)) and np.all(np.isfinite(b))):
        raise ValueError("delta and b must be finite")
    w = lorentz_width
    chi_minus = -1j / (1j * (delta - b) - medium.gamma_emg - w)
    one_photon = 1j * (delta + b) - medium.gamma_epg - w
    if drive.omega == 0:
        chi_plus = -1j / one_photon
    else:
        p = 1j * two_photon_detuning_lambda(delta, b, drive.delta_pump) - medium.gamma_fg
        den = one_photon * p + drive.omega**2
        if np.any(den == 0):
            raise SingularSusceptibilityError("averaged chi_+: denominator vanishes")
        chi_plus = -1j * p / den
    if np.ndim(chi_plus) == 0:
        return SusceptibilityPair(complex(chi_plus), complex(chi_minus))
    return SusceptibilityPair(chi_plus, np.broadcast_to(chi_minus, np.shape(chi_plus)).copy())


def _resonance_shifts(delta, b, drive, medium):
    """Real Doppler shifts at which each component of the integrand peaks."""
    out = [b - delta]
    p = 1j * two_photon_detuning_lambda(delta, b, drive.delta_pump) - medium.gamma_fg
    if drive.omega == 0:
        out.append(-(delta + b))
    elif p != 0:
        d0 = 1j * (delta + b) - medium.gamma_epg + drive.omega**2 / p
        out.append(-d0.imag)
    return out


def _quad_complex(func, a, b, points, tol):
    parts = []
    for take in (np.real, np.imag):
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, err = integrate.quad(lambda x: float(take(func(x))), a, b, points=points or None,
                                          epsabs=tol * 1e-2, epsrel=tol, limit=1000)
            except integrate.IntegrationWarning as exc:
                raise QuadratureError(f"Doppler quadrature did not converge: {exc}".splitlines()[0]) from exc
        if err > 10 * max(tol * 1e-2, tol * abs(val)):
            raise QuadratureError("Doppler quadrature did not converge", err)
        parts.append(val)
    return complex(parts[0], parts[1])


def doppler_average_numeric(delta: float, b: float, drive: Drive, medium: LambdaMedium,
                            profile: VelocityProfile, tol: float = 1e-8) -> SusceptibilityPair:
    """Velocity-averaged susceptibilities by adaptive Gauss-Kronrod quadrature.

    The Lorentzian profile is integrated in the variable ``theta`` with
    ``kv = w tan(theta)``, which maps its heavy tails onto a finite interval
    with no truncation.  The Gaussian profile is integrated over
    ``|kv| <= c w`` with ``c >= 8`` chosen so the discarded tail mass is below
    ``tol / 100``.  Resonance positions are passed as breakpoints.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    delta = float(delta)
    b = float(b)
    shifts = _resonance_shifts(delta, b, drive, medium)
    w = profile.width

    def at(kv):
        return shifted_chi_lambda(delta, b, drive, medium, kv)

    if profile.kind == "lorentz":
        half = 0.5 * math.pi
        points = sorted({math.atan(s / w) for s in shifts if abs(math.atan(s / w)) < half})

        def plus(theta):
            return at(w * math.tan(theta)).chi_plus / math.pi

        def minus(theta):
            return at(w * math.tan(theta)).chi_minus / math.pi

        lo, hi = -half, half
    else:
        c = max(8.0, math.sqrt(2.0) * float(special.erfcinv(tol * 1e-2)))
        lo, hi = -c * w, c * w
        points = sorted({s for s in shifts if lo < s < hi})

        def plus(kv):
            return at(kv).chi_plus * profile_weight(profile, kv)

        def minus(kv):
            return at(kv).chi_minus * profile_weight(profile, kv)

    return SusceptibilityPair(_quad_complex(plus, lo, hi, points, tol),
                              _quad_complex(minus, lo, hi, points, tol))


def averaged_chi(delta, b, drive: Drive, medium: LambdaMedium, profile: VelocityProfile,
                 method: str = "auto", tol: float = 1e-8, workers: int = 1) -> SusceptibilityPair:
    """Doppler-averaged susceptibilities over arrays of ``delta`` and ``b``.

    ``method="auto"`` uses the closed form for Lorentzian profiles and
    quadrature for Gaussian ones; ``"closed"`` or ``"numeric"`` force a route.
    """
    if method not in ("auto", "closed", "numeric"):
        raise ValueError(f"unknown averaging method {method!r}")
    if method == "closed" and profile.kind != "lorentz":
        raise ValueError("the closed form exists only for a Lorentzian profile")
    if method == "closed" or (method == "auto" and profile.kind == "lorentz"):
        return closed_form_lorentz_average(delta, b, drive, medium, profile.width)

    d, bb, dp = np.broadcast_arrays(np.asarray(delta, dtype=float), np.asarray(b, dtype=float),
                                    np.asarray(drive.delta_pump, dtype=float))
    flat = list(zip(d.ravel().tolist(), bb.ravel().tolist(), dp.ravel().tolist()))

    def one(args):
        return doppler_average_numeric(args[0], args[1], Drive(drive.omega, args[2]), medium, profile, tol)

    if workers > 1 and len(flat) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, flat))
    else:
        results = [one(x) for x in flat]
    plus = np.array([r.chi_plus for r in results], dtype=complex).reshape(d.shape)
    minus = np.array([r.chi_minus for r in results], dtype=complex).reshape(d.shape)
    if d.ndim == 0:
        return SusceptibilityPair(complex(plus), complex(minus))
    return SusceptibilityPair(plus, minus)
