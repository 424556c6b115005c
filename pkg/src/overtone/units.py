"""Unit helpers and physical constants.

Internal convention: every frequency-like quantity is an angular
frequency in rad/s, fields are in tesla, times in seconds, angles in
radians.  Conversion from laboratory units (MHz, GHz, mT, microseconds,
degrees) happens through these helpers and nowhere else.
"""

import math

TWO_PI = 2.0 * math.pi

# Free-electron gyromagnetic ratio, gamma_e / 2pi = -28.02495 GHz/T.
GAMMA_E = -TWO_PI * 28.02495e9  # rad s^-1 T^-1


def mhz(value):
    """Angular frequency (rad/s) for a value given in MHz."""
    return TWO_PI * 1e6 * value


def ghz(value):
    """Angular frequency (rad/s) for a value given in GHz."""
    return TWO_PI * 1e9 * value


def to_mhz(omega):
    """Ordinary frequency in MHz for an angular frequency in rad/s."""
    return omega / (TWO_PI * 1e6)


def to_ghz(omega):
    """Ordinary frequency in GHz for an angular frequency in rad/s."""
    return omega / (TWO_PI * 1e9)


def mt(value):
    """Tesla for a value given in millitesla."""
    return 1e-3 * value


def to_mt(field):
    """Millitesla for a field given in tesla."""
    return 1e3 * field


def us(value):
    """Seconds for a value given in microseconds."""
    return 1e-6 * value


def ns(value):
    """Seconds for a value given in nanoseconds."""
    return 1e-9 * value


def deg(value):
    """Radians for a value given in degrees."""
    return math.radians(value)
