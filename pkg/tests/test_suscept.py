import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bras_sim.suscept import (
    Drive,
    LadderMedium,
    LambdaMedium,
    SingularSusceptibilityError,
    chi_ladder_bare,
    chi_ladder_dressed,
    chi_lambda_bare,
    chi_lambda_dressed,
    gamma_upper_from_wavelengths,
)

from oracles import ladder_forward, lambda_reversed

DELTAS = np.linspace(-20, 20, 401)
FIELDS = [1.0, -1.0, 5.0, -5.0, 10.0, -10.0]


class TestLambdaBare:
    def test_sigma_minus_on_resonance(self):
        chi = chi_lambda_bare(5.0, 5.0)
        assert chi.chi_minus == pytest.approx(1j, abs=1e-15)

    def test_sigma_minus_far_wing(self):
        chi = chi_lambda_bare(-5.0, 5.0)
        assert chi.chi_minus == pytest.approx((10 + 1j) / 101, rel=1e-14)
        assert chi.chi_minus.imag == pytest.approx(0.00990, abs=1e-5)

    def test_zero_field_equal_widths(self):
        med = LambdaMedium(gamma_epg=1.0, gamma_emg=1.0)
        chi = chi_lambda_bare(DELTAS, 0.0, med)
        np.testing.assert_array_equal(chi.chi_plus, chi.chi_minus)

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            chi_lambda_bare(float("nan"), 1.0)
        with pytest.raises(ValueError):
            chi_lambda_bare(0.0, float("inf"))


class TestLambdaDressed:
    @pytest.mark.parametrize("B", [0.3, 1.0, 2.887, 5.0, 10.0])
    @pytest.mark.parametrize("omega", [0.5, 5.0, 17.32])
    def test_eit_null(self, B, omega):
        chi = chi_lambda_dressed(-B, B, Drive(omega, 2 * B))
        assert abs(chi.chi_plus) <= 1e-14

    def test_control_off_matches_bare(self):
        bare = chi_lambda_bare(DELTAS, 5.0)
        dressed = chi_lambda_dressed(DELTAS, 5.0, Drive(0.0, 10.0))
        np.testing.assert_allclose(dressed.chi_plus, bare.chi_plus, rtol=1e-12)
        np.testing.assert_allclose(dressed.chi_minus, bare.chi_minus, rtol=1e-12)

    def test_control_off_at_two_photon_resonance_is_bare(self):
        # P = 0 and Omega = 0: common factor cancelled, not 0/0
        chi = chi_lambda_dressed(-5.0, 5.0, Drive(0.0, 10.0))
        assert chi.chi_plus == pytest.approx(chi_lambda_bare(-5.0, 5.0).chi_plus)

    def test_reversed_hand_value(self):
        chi = chi_lambda_dressed(-5.0, -5.0, Drive(0.5, 10.0))
        assert chi.chi_plus == pytest.approx(-30 / (-299.75 + 40j), rel=1e-14)
        assert chi.chi_plus.imag == pytest.approx(0.01312, abs=1e-5)

    @pytest.mark.parametrize("B", [1.0, 5.0, 10.0])
    @pytest.mark.parametrize("omega,Delta", [(0.5, 10.0), (3.0, -4.0), (10.0, 2.5)])
    def test_reversed_equals_literal_form(self, B, omega, Delta):
        med = LambdaMedium(gamma_epg=4 / 3, gamma_emg=1.0, gamma_fg=0.1)
        got = chi_lambda_dressed(DELTAS, -B, Drive(omega, Delta), med)
        plus, minus = lambda_reversed(DELTAS, B, omega, Delta, 4 / 3, 1.0, 0.1)
        np.testing.assert_allclose(got.chi_plus, plus, rtol=1e-14)
        np.testing.assert_allclose(got.chi_minus, minus, rtol=1e-14)

    @pytest.mark.parametrize("B,omega", [(5.0, 10.0), (5.0, 17.32), (2.887, 10.0)])
    def test_reversed_resonances(self, B, omega):
        d = np.arange(-20.0, 50.0, 0.001)
        mag = np.abs(chi_lambda_dressed(d, -B, Drive(omega, 2 * B)).chi_plus)
        interior = (mag[1:-1] > mag[:-2]) & (mag[1:-1] > mag[2:])
        peaks = d[1:-1][interior]
        root = math.sqrt(4 * B**2 + omega**2)
        for expected in (3 * B - root, 3 * B + root):
            assert np.min(np.abs(peaks - expected)) <= 0.1

    def test_singular_needs_zero_width(self):
        med = LambdaMedium(gamma_epg=0.0, gamma_emg=1.0, gamma_fg=0.0)
        # (delta + b) * X = Omega^2 with X = delta - Delta + 3b: delta=1, b=0, Delta=0
        with pytest.raises(SingularSusceptibilityError):
            chi_lambda_dressed(1.0, 0.0, Drive(1.0, 0.0), med)

    def test_broadcasts(self):
        chi = chi_lambda_dressed(DELTAS[:, None], np.array([1.0, -1.0])[None, :], Drive(1.0, 2.0))
        assert np.shape(chi.chi_plus) == (401, 2)
        assert np.shape(chi.chi_minus) == (401, 2)


class TestLadder:
    def test_on_resonance(self):
        assert chi_ladder_bare(3.0, 3.0).chi_plus == pytest.approx(1j, abs=1e-15)

    def test_far_wing(self):
        assert chi_ladder_bare(5.0, 5.0).chi_minus.imag == pytest.approx(1 / 101, rel=1e-14)

    @pytest.mark.parametrize("b", FIELDS)
    def test_reversal_swaps(self, b):
        a = chi_ladder_bare(DELTAS, b)
        r = chi_ladder_bare(DELTAS, -b)
        np.testing.assert_array_equal(a.chi_plus, r.chi_minus)
        np.testing.assert_array_equal(a.chi_minus, r.chi_plus)

    def test_dressed_partial_transparency(self):
        chi = chi_ladder_dressed(5.0, 5.0, Drive(0.5, -5.0), LadderMedium(0.45))
        assert chi.chi_plus == pytest.approx(0.45j / 0.70, rel=1e-14)
        assert chi.chi_plus.imag == pytest.approx(0.6429, abs=1e-4)

    def test_dressed_strong_drive(self):
        chi = chi_ladder_dressed(5.0, 5.0, Drive(5.0, -5.0), LadderMedium(0.45))
        assert chi.chi_plus.imag == pytest.approx(0.45 / 25.45, rel=1e-14)
        assert chi.chi_plus.imag == pytest.approx(0.01768, abs=1e-5)

    def test_control_off(self):
        bare = chi_ladder_bare(DELTAS, 5.0)
        dressed = chi_ladder_dressed(DELTAS, 5.0, Drive(0.0, 3.0))
        np.testing.assert_allclose(dressed.chi_plus, bare.chi_plus, rtol=1e-12)

    @pytest.mark.parametrize("b", FIELDS)
    def test_matches_literal_form(self, b):
        got = chi_ladder_dressed(DELTAS, b, Drive(2.0, -abs(b)))
        plus, minus = ladder_forward(DELTAS, b, 2.0, -abs(b))
        np.testing.assert_allclose(got.chi_plus, plus, rtol=1e-14)
        np.testing.assert_allclose(got.chi_minus, minus, rtol=1e-14)


@pytest.mark.parametrize("system", ["lambda", "ladder"])
@pytest.mark.parametrize("b", FIELDS)
def test_bare_reversal_symmetry(system, b):
    if system == "lambda":
        med = LambdaMedium(gamma_epg=1.0, gamma_emg=1.0)
        a, r = chi_lambda_bare(DELTAS, b, med), chi_lambda_bare(DELTAS, -b, med)
    else:
        a, r = chi_ladder_bare(DELTAS, b), chi_ladder_bare(DELTAS, -b)
    np.testing.assert_array_equal(a.chi_plus, r.chi_minus)


rates = st.floats(0.0, 5.0)


@settings(max_examples=300, deadline=None)
@given(
    delta=st.floats(-50, 50), b=st.floats(-20, 20), omega=st.floats(0, 30), Delta=st.floats(-50, 50),
    g_ep=st.floats(0.01, 5.0), g_em=st.floats(0.01, 5.0), g_fg=rates,
)
def test_lambda_passive(delta, b, omega, Delta, g_ep, g_em, g_fg):
    chi = chi_lambda_dressed(delta, b, Drive(omega, Delta), LambdaMedium(g_ep, g_em, g_fg))
    assert chi.chi_plus.imag >= 0
    assert chi.chi_minus.imag >= 0


@settings(max_examples=300, deadline=None)
@given(delta=st.floats(-50, 50), b=st.floats(-20, 20), omega=st.floats(0, 30),
       Delta=st.floats(-50, 50), G=st.floats(0.01, 5.0))
def test_ladder_passive(delta, b, omega, Delta, G):
    chi = chi_ladder_dressed(delta, b, Drive(omega, Delta), LadderMedium(G))
    assert chi.chi_plus.imag >= 0
    assert chi.chi_minus.imag >= 0


class TestGammaUpper:
    def test_calcium(self):
        assert round(gamma_upper_from_wavelengths(422.7, 551.3), 2) == 0.45

    def test_equal_wavelengths(self):
        assert gamma_upper_from_wavelengths(500.0, 500.0) == 1.0

    def test_doubled_wavelength(self):
        assert gamma_upper_from_wavelengths(422.7, 845.4) == pytest.approx(0.125)

    @pytest.mark.parametrize("a,b", [(0, 1), (1, -1)])
    def test_rejects_nonpositive(self, a, b):
        with pytest.raises(ValueError):
            gamma_upper_from_wavelengths(a, b)


@pytest.mark.parametrize("kwargs", [dict(gamma_epg=-1), dict(gamma_fg=float("nan"))])
def test_lambda_medium_validation(kwargs):
    with pytest.raises(ValueError):
        LambdaMedium(**kwargs)


def test_drive_validation():
    with pytest.raises(ValueError):
        Drive(-1.0, 0.0)
    with pytest.raises(ValueError):
        LadderMedium(0.0)
