"""Unit conversions between the human-scale boundary (nm, fs, mm) and SI.

All internal computation uses SI units: rad/s for angular frequencies,
seconds for delays, metres for transverse position.  The CLI converts once
at the boundary using the helpers below.
"""

import math

SPEED_OF_LIGHT = 299_792_458.0  # m/s

FS = 1e-15
NM = 1e-9
MM = 1e-3


def omega_from_wavelength(wavelength_m: float) -> float:
    """Angular frequency (rad/s) of light with the given vacuum wavelength."""
    if wavelength_m <= 0.0:
        raise ValueError("wavelength must be positive")
    return 2.0 * math.pi * SPEED_OF_LIGHT / wavelength_m


def bandwidth_to_angular(center_m: float, width_m: float) -> float:
    """Angular-frequency full width (rad/s) of a wavelength band.

    Uses the first-order dispersion of omega = 2*pi*c/lambda around the band
    center: d_omega = 2*pi*c*d_lambda/lambda^2.
    """
    if center_m <= 0.0 or width_m <= 0.0:
        raise ValueError("center and width must be positive")
    return 2.0 * math.pi * SPEED_OF_LIGHT * width_m / center_m**2
