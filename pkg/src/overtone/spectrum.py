"""Containers for sampled spectra and time traces, plus smoothing.

A Spectrum holds a uniform axis of bin centers and a density sampled or
accumulated on it.  Densities are per unit axis, so the integral is
sum(intensity) * bin width.  A TimeTrace is the time-domain analogue.
Both carry a free-form ``meta`` dict that the writers in
:mod:`overtone.io` emit as commented header lines.
"""

import math
from dataclasses import dataclass, field

import numpy as np

#: Relative tolerance for axis uniformity checks.
AXIS_UNIFORMITY_TOL = 1e-9


def uniform_axis(lo, hi, n):
    """Centers of n equal bins covering [lo, hi]."""
    if n < 1:
        raise ValueError("need at least one bin")
    if not hi > lo:
        raise ValueError("axis upper edge must exceed lower edge")
    edges = np.linspace(lo, hi, n + 1)
    return 0.5 * (edges[:-1] + edges[1:])


def _check_uniform(x, what):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise ValueError("%s must be a 1-d array" % what)
    if x.size >= 3:
        d = np.diff(x)
        if np.max(np.abs(d - d[0])) > AXIS_UNIFORMITY_TOL * max(
            abs(d[0]), 1e-300
        ):
            raise ValueError("%s must be uniformly spaced" % what)
    return x


@dataclass
class Spectrum:
    """Uniformly sampled density over a labeled axis.

    ``axis_kind`` names the physical axis ('frequency', 'field', or
    'rate'); ``normalized`` records whether the density is meant to
    integrate to 1.  Negative intensities are rejected unless
    ``allow_negative`` is set (signed echo sweeps need it).
    """

    axis: np.ndarray
    intensity: np.ndarray
    axis_kind: str = "frequency"
    normalized: bool = True
    allow_negative: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.axis = _check_uniform(self.axis, "axis")
        self.intensity = np.asarray(self.intensity, dtype=float)
        if self.intensity.shape != self.axis.shape:
            raise ValueError("axis and intensity shapes differ")
        if not self.allow_negative and np.any(self.intensity < 0.0):
            raise ValueError("negative intensity in a non-signed spectrum")

    @property
    def bin_width(self):
        if self.axis.size == 1:
            raise ValueError("bin width undefined for a single sample")
        return float(self.axis[1] - self.axis[0])

    def integral(self):
        """Riemann sum of the density over the axis."""
        return float(math.fsum(self.intensity) * self.bin_width)

    def normalize(self):
        """Return a copy scaled to unit integral."""
        total = self.integral()
        if total <= 0.0:
            raise ValueError("cannot normalize a spectrum with no weight")
        return Spectrum(
            axis=self.axis.copy(),
            intensity=self.intensity / total,
            axis_kind=self.axis_kind,
            normalized=True,
            allow_negative=self.allow_negative,
            meta=dict(self.meta),
        )

    def as_dict(self):
        return {
            "axis": self.axis.tolist(),
            "intensity": self.intensity.tolist(),
            "axis_kind": self.axis_kind,
            "normalized": self.normalized,
            "meta": dict(self.meta),
        }


@dataclass
class TimeTrace:
    """Uniformly sampled real-valued signal versus time (s)."""

    times: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = _check_uniform(self.times, "times")
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.times.shape:
            raise ValueError("times and values shapes differ")

    @property
    def dt(self):
        if self.times.size < 2:
            raise ValueError("dt undefined for fewer than two samples")
        return float(self.times[1] - self.times[0])

    def as_dict(self):
        return {
            "times": self.times.tolist(),
            "values": self.values.tolist(),
            "meta": dict(self.meta),
        }


def gaussian_smooth(spectrum, sigma):
    """Convolve a spectrum with a unit-area Gaussian of width sigma.

    Presentation-layer smoothing: the analysis path never calls this.
    sigma is in axis units; sigma = 0 returns the input unchanged.
    Convolution is done by direct kernel summation with reflecting the
    kernel support fully inside an explicit zero padding, which keeps
    total integral exact up to rounding.
    """
    if sigma < 0.0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0.0:
        return spectrum
    dx = spectrum.bin_width
    half = int(math.ceil(4.0 * sigma / dx))
    x = np.arange(-half, half + 1) * dx
    kernel = np.exp(-0.5 * (x / sigma) ** 2)
    kernel /= math.fsum(kernel)
    smoothed = np.convolve(spectrum.intensity, kernel, mode="same")
    meta = dict(spectrum.meta)
    meta["smoothing_sigma"] = sigma
    return Spectrum(
        axis=spectrum.axis.copy(),
        intensity=smoothed,
        axis_kind=spectrum.axis_kind,
        normalized=spectrum.normalized,
        allow_negative=spectrum.allow_negative,
        meta=meta,
    )
