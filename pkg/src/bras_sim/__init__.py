"""Unpolarized-light transmission asymmetry under magnetic field reversal.

A coherent control field dresses one circular component of a probe in a
magnetized vapor, so reversing the field changes how much unpolarized light
gets through.  Submodules:

- ``suscept``: closed-form susceptibilities (Lambda and ladder schemes)
- ``propagate``: circular-component propagation and transmittivities
- ``doppler``: velocity averaging
- ``scenarios``: scans, figure presets and analytic locators
- ``cli``: the ``bras-sim`` command
"""

__version__ = "0.1.0"

from .suscept import (  # noqa: E402
    Drive,
    LadderMedium,
    LambdaMedium,
    SingularSusceptibilityError,
    SusceptibilityPair,
    chi_ladder_bare,
    chi_ladder_dressed,
    chi_lambda_bare,
    chi_lambda_dressed,
    gamma_upper_from_wavelengths,
)
from .propagate import (  # noqa: E402
    FieldAmplitudes,
    PropagationGeometry,
    TransmissionPair,
    monte_carlo_unpolarized,
    optical_depth_from_medium,
    propagate_polarized,
    transmission_pair,
    unpolarized_transmittivity,
)
from .doppler import (  # noqa: E402
    QuadratureError,
    VelocityProfile,
    closed_form_lorentz_average,
    doppler_average_numeric,
    lorentz_width_from_maxwell,
    profile_weight,
    shifted_chi_lambda,
)
from .scenarios import (  # noqa: E402
    ScanSpec,
    ScanTable,
    eit_window,
    figure_preset,
    opacity_drive,
    resonance_positions,
    run_scan,
)
