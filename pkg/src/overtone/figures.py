"""Deterministic matplotlib rendering of spectra and traces to SVG/PNG.

Uses the Agg backend with a fixed hash salt and no embedded timestamps,
so rendering the same data twice produces byte-identical files.
"""

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "overtone"

import matplotlib.pyplot as plt

from .io import spectrum_to_rows
from .spectrum import Spectrum, TimeTrace, gaussian_smooth

_AXIS_LABELS = {
    "frequency_mhz": "frequency (MHz)",
    "rate_mhz": "nutation rate (MHz)",
    "field_mt": "field (mT)",
    "offset_mhz": "offset (MHz)",
    "beta_deg": "beta (deg)",
}


def render(obj, path, title="", smooth_sigma=0.0):
    """Plot a Spectrum or TimeTrace as a labeled polyline figure.

    The output format follows the file extension (svg or png).  For
    spectra the axis is converted to lab units like the CSV writer.
    """
    if isinstance(obj, Spectrum):
        if smooth_sigma > 0.0:
            obj = gaussian_smooth(obj, smooth_sigma)
        (axis_name, _), x, y = spectrum_to_rows(obj)
        xlabel = _AXIS_LABELS.get(axis_name, axis_name)
        ylabel = "density" if obj.normalized else "signal"
    elif isinstance(obj, TimeTrace):
        x, y = obj.times * 1e6, obj.values
        xlabel, ylabel = "time (us)", "signal"
    else:
        raise TypeError("render handles Spectrum and TimeTrace")
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(x, y, lw=1.1)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    if str(path).endswith(".svg"):
        fig.savefig(path, metadata={"Date": None})
    else:
        fig.savefig(path)
    plt.close(fig)
