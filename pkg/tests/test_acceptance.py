"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line."""

import math

import numpy as np
import pytest

from bras_sim.doppler import closed_form_lorentz_average, doppler_average_numeric, VelocityProfile
from bras_sim.propagate import (
    PropagationGeometry,
    monte_carlo_unpolarized,
    transmission_pair,
    unpolarized_transmittivity,
)
from bras_sim.scenarios import (
    FIG10_LORENTZ_WIDTH,
    figure_preset,
    max_doppler_ratio,
    resonance_positions,
    run_scan,
)
from bras_sim.suscept import (
    Drive,
    LadderMedium,
    LambdaMedium,
    SusceptibilityPair,
    chi_lambda_dressed,
)

OD_NA = 16.57
OD_CA = 8.53


def test_1_symmetry_without_control(criterion):
    delta = np.linspace(-20, 20, 2001)
    worst = 0.0
    for system, medium in (("lambda", LambdaMedium(1.0, 1.0)), ("ladder", LadderMedium())):
        for B in (1.0, 5.0, 10.0):
            pair = transmission_pair(system, delta, B, Drive(0.0, 2 * B), medium, PropagationGeometry(OD_NA))
            worst = max(worst, float(np.max(np.abs(pair.t_forward - pair.t_reversed))))
    criterion("1", worst <= 1e-12, f"max |T(B)-T(-B)| = {worst:.3e} (<= 1e-12)")


def test_2_exact_eit_null(criterion):
    worst = max(abs(chi_lambda_dressed(-B, B, Drive(omega, 2 * B)).chi_plus)
                for B in (1.0, 5.0, 10.0) for omega in (0.5, 5.0, 17.32))
    criterion("2", worst <= 1e-14, f"max |chi_+(delta=-B)| = {worst:.3e} (<= 1e-14)")


def test_3_factor_two(criterion):
    pair = transmission_pair("lambda", -5.0, 5.0, Drive(0.5, 10.0), LambdaMedium(), PropagationGeometry(OD_NA))
    r = float(pair.ratio)
    criterion("3", 1.8 <= r <= 2.6, f"T(B)/T(-B) = {r:.4f} (in [1.8, 2.6])")


def test_4a_opacity_point(criterion):
    B = 10 / (2 * math.sqrt(3))
    pair = transmission_pair("lambda", -B, B, Drive(10.0, 2 * B), LambdaMedium(), PropagationGeometry(OD_NA))
    ok = pair.t_reversed <= 0.01 and pair.t_forward >= 0.7
    criterion("4a", ok, f"T(-B) = {pair.t_reversed:.3e} (<= 0.01), T(B) = {pair.t_forward:.4f} (>= 0.7)")


@pytest.fixture(scope="module")
def fig4_table():
    return run_scan(figure_preset("fig4"))


def test_4b_opacity_minimum_location(criterion, fig4_table):
    t = fig4_table
    step = t.abscissa[1] - t.abscissa[0]
    at = float(t.abscissa[np.argmin(t.t_reversed)])
    target = 10 / (2 * math.sqrt(3))
    criterion("4b", abs(at - target) <= step, f"argmin T(-B) at B = {at:.4f}, expected {target:.4f} +- {step:.4f}")


def _window(t):
    sel = (t.abscissa >= 4.0) & (t.abscissa <= 10.0)
    return t.ratio[sel]


def test_4c_ratio_above_two(criterion, fig4_table):
    lo = float(np.min(_window(fig4_table)))
    criterion("4c", lo > 2.0, f"min ratio on B in [4, 10] = {lo:.4f} (> 2)")


def test_4d_ratio_upper_bound(criterion, fig4_table):
    hi = float(np.max(_window(fig4_table)))
    criterion("4d", hi <= 3.5, f"max ratio on B in [4, 10] = {hi:.4f} (<= 3.5)")


@pytest.mark.parametrize("label,B,omega,lo,hi", [("5a", 10.0, 10.0, 1.8, 2.1), ("5b", 5.0, 5.0, 1.7, 2.2)])
def test_5_ladder_asymptote(criterion, label, B, omega, lo, hi):
    pair = transmission_pair("ladder", B, B, Drive(omega, -B), LadderMedium(), PropagationGeometry(OD_CA))
    r = float(pair.ratio)
    criterion(label, lo <= r <= hi, f"B = Omega = {B:g}: ratio = {r:.4f} (in [{lo}, {hi}])")


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def test_6a_closed_form_vs_quadrature(criterion):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(50):
        delta, Delta = rng.uniform(-20, 20, 2)
        b = rng.choice([-1, 1]) * rng.uniform(0.5, 10)
        omega = rng.uniform(0, 15)
        medium = LambdaMedium(rng.uniform(0.5, 2), rng.uniform(0.5, 2), rng.uniform(0, 0.5))
        w = rng.uniform(0.2, 30)
        drive = Drive(omega, Delta)
        closed = closed_form_lorentz_average(delta, b, drive, medium, w)
        numeric = doppler_average_numeric(delta, b, drive, medium, VelocityProfile("lorentz", w), tol=1e-10)
        worst = max(worst, _rel(numeric.chi_plus, closed.chi_plus), _rel(numeric.chi_minus, closed.chi_minus))
    criterion("6a", worst <= 1e-6, f"max relative error over 50 draws = {worst:.3e} (<= 1e-6)")


def test_6b_zero_width_limit(criterion):
    worst = 0.0
    drive = Drive(0.5, 10.0)
    for delta in (-5.0, -2.0, 0.0, 5.0, 12.0):
        bare = chi_lambda_dressed(delta, 5.0, drive)
        for kind in ("lorentz", "maxwell"):
            avg = doppler_average_numeric(delta, 5.0, drive, LambdaMedium(), VelocityProfile(kind, 1e-6))
            worst = max(worst, abs(avg.chi_plus - bare.chi_plus), abs(avg.chi_minus - bare.chi_minus))
    criterion("6b", worst <= 1e-5, f"max |<chi> - chi| at width 1e-6 = {worst:.3e} (<= 1e-5)")


def test_7_doppler_asymmetry(criterion):
    spec = figure_preset("fig10")
    widths = np.arange(5.0, 200.0 + 1e-9, 5.0)
    peaks = np.array([max_doppler_ratio(spec, w) for w in widths])
    hits = widths[(peaks >= 1.4) & (peaks <= 1.8)]
    preset_peak = float(np.max(run_scan(spec).ratio))
    ok = (hits.size > 0 and 1.4 <= preset_peak <= 1.8
          and spec.notes.get("doppler_width_provenance") == "calibrated"
          and spec.doppler.width == FIG10_LORENTZ_WIDTH)
    span = f"{hits.min():g}..{hits.max():g}" if hits.size else "none"
    criterion("7", ok, f"widths with peak ratio in [1.4, 1.8]: {span}; "
                       f"preset width {spec.doppler.width:g} gives {preset_peak:.4f}")


def test_8_monte_carlo(criterion):
    rng = np.random.default_rng(7)
    worst = 0.0
    for i in range(20):
        chi = SusceptibilityPair(complex(rng.uniform(-1, 1), rng.uniform(0, 0.5)),
                                 complex(rng.uniform(-1, 1), rng.uniform(0, 0.5)))
        geometry = PropagationGeometry(rng.uniform(0.5, 20))
        mean, err = monte_carlo_unpolarized(chi, geometry, 100_000, seed=i, full_output=True)
        exact = unpolarized_transmittivity(chi, geometry)
        worst = max(worst, abs(mean - exact) / max(err, 1e-15))
    criterion("8", worst <= 5.0, f"max deviation over 20 draws = {worst:.2f} standard errors (<= 5)")


def test_9_resonance_locator(criterion):
    d = np.arange(-20.0, 50.0, 0.001)
    worst = 0.0
    for B, omega in ((5.0, 10.0), (5.0, 17.32), (2.887, 10.0)):
        mag = np.abs(chi_lambda_dressed(d, -B, Drive(omega, 2 * B)).chi_plus)
        interior = (mag[1:-1] > mag[:-2]) & (mag[1:-1] > mag[2:])
        peaks = d[1:-1][interior]
        for expected in resonance_positions(B, omega):
            worst = max(worst, float(np.min(np.abs(peaks - expected))))
    criterion("9", worst <= 0.1, f"max |grid peak - 3B +- sqrt(4B^2+Omega^2)| = {worst:.4f} (<= 0.1)")

