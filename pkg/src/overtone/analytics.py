"""Closed-form overtone observables: resonances, nutation rates, lineshapes.

Everything here is analytic.  The resonance and nutation formulas are
first order in eps = omega_zfs / omega_e:

    omega_res = 2 omega_e + 2 eps omega_zfs h
    omega_nut = eps omega_1 |f sin chi + g cos chi|

with the orientation functions of :mod:`overtone.orientation`.  The
population difference observed in a lab-frame nutation experiment
oscillates at twice omega_nut; :func:`overtone_rabi_frequency` returns
that observable rate.  The powder lineshape and nutation distributions
are the exact axial (eta = 0) pushforwards of the uniform orientation
measure through those formulas, including their integrable endpoint
singularities, with bin masses computed from the branch inverses so the
histograms normalize exactly.
"""

import math
import warnings

import numpy as np

from .orientation import fgh
from .spectrum import Spectrum, uniform_axis
from .units import GAMMA_E

#: Rhombicity above which the axial closed-form distributions start to
#: deviate visibly from the numeric powder histograms.
AXIAL_ETA_WARN = 0.02


def _warn_if_rhombic(eta, what):
    if abs(eta) > AXIAL_ETA_WARN:
        warnings.warn(
            "%s is an axial (eta = 0) closed form; eta = %.4f will "
            "deviate from the numeric powder result" % (what, eta),
            stacklevel=3,
        )


def overtone_resonance_from_h(ctx, zfs, h):
    """First-order overtone resonance 2 omega_e + 2 eps omega_zfs h."""
    eps = ctx.epsilon(zfs)
    return 2.0 * ctx.omega_e + 2.0 * eps * zfs.omega_zfs * np.asarray(h)


def overtone_resonance(ctx, zfs, orientation):
    """First-order overtone resonance frequency at one orientation (rad/s)."""
    v = fgh(orientation, zfs.eta)
    return float(overtone_resonance_from_h(ctx, zfs, v.h))


def overtone_nutation_from_fg(ctx, zfs, f, g):
    """Nutation rate eps omega_1 |f sin chi + g cos chi| (rad/s)."""
    eps = ctx.epsilon(zfs)
    amp = np.abs(
        np.asarray(f) * math.sin(ctx.chi) + np.asarray(g) * math.cos(ctx.chi)
    )
    return eps * ctx.omega_1 * amp


def overtone_nutation(ctx, zfs, orientation):
    """Overtone nutation rate at one orientation (rad/s)."""
    v = fgh(orientation, zfs.eta)
    return float(overtone_nutation_from_fg(ctx, zfs, v.f, v.g))


def overtone_rabi_frequency(ctx, zfs, orientation):
    """Oscillation rate of the lab-frame population difference (rad/s).

    The tilted two-level pair splits by 2 x the corner coupling, so the
    observed population oscillation runs at twice the nutation rate:
    2 eps omega_1 |f sin chi + g cos chi|.  This is the number a
    frequency fit to a rabi_trace returns on resonance.
    """
    return 2.0 * overtone_nutation(ctx, zfs, orientation)


# --- powder lineshape (axial closed form) ---------------------------------
#
# With x = cos(beta) uniform on [0, 1] and eta = 0,
#   h(x) = (9/4)(1 - x^2)(1 + 3x^2),  h in [0, 3],
# and the scaled offset u = (omega - 2 omega_e) / (6 eps omega_zfs) = h/3.
# Inverting h(x) = 3u gives x^2 = [1 +- 2 sqrt(1-u)] / 3: an outer branch
# covering all u in [0, 1] and an inner branch that opens at u = 3/4
# (the beta = pi/2 shoulder).  Singularities sit at u = 3/4 and u = 1.


def _branch_outer(u):
    return np.sqrt((1.0 + 2.0 * np.sqrt(1.0 - u)) / 3.0)


def _branch_inner(u):
    return np.sqrt(np.maximum(1.0 - 2.0 * np.sqrt(1.0 - u), 0.0) / 3.0)


def lineshape_support(ctx, zfs):
    """Frequency interval [2 omega_e, 2 omega_e + 6 eps omega_zfs]."""
    lo = 2.0 * ctx.omega_e
    return lo, lo + 6.0 * ctx.epsilon(zfs) * zfs.omega_zfs


def lineshape_singularities(ctx, zfs):
    """The shoulder and edge singularity frequencies (rad/s)."""
    s = ctx.epsilon(zfs) * zfs.omega_zfs
    lo = 2.0 * ctx.omega_e
    return lo + 4.5 * s, lo + 6.0 * s


def lineshape_density(omega, ctx, zfs):
    """Pointwise powder density of the overtone resonance (per rad/s).

    I(omega) = (sqrt(3)/36) (1/s) (1-u)^{-1/2} [ (1+2 sqrt(1-u))^{-1/2}
               + 1_{u > 3/4} (1-2 sqrt(1-u))^{-1/2} ],
    u = (omega - 2 omega_e)/(6 s), s = eps omega_zfs.  Zero outside the
    support; infinite at the two singular points.
    """
    _warn_if_rhombic(zfs.eta, "lineshape_density")
    s = ctx.epsilon(zfs) * zfs.omega_zfs
    u = (np.asarray(omega, dtype=float) - 2.0 * ctx.omega_e) / (6.0 * s)
    out = np.zeros_like(u)
    inside = (u >= 0.0) & (u <= 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        root = np.sqrt(1.0 - np.where(inside, u, 0.0))
        outer = 1.0 / np.sqrt(1.0 + 2.0 * root)
        inner = np.where(
            u > 0.75, 1.0 / np.sqrt(np.abs(1.0 - 2.0 * root)), 0.0
        )
        val = (math.sqrt(3.0) / 36.0) / s * (outer + inner) / root
    out[inside] = val[inside]
    return out if out.ndim else float(out)


def lineshape_frequency(ctx, zfs, n_bins=400):
    """Binned powder lineshape over the overtone support.

    Bin values are exact orientation masses divided by the bin width, so
    the spectrum integrates to 1 to machine precision regardless of the
    endpoint singularities.
    """
    _warn_if_rhombic(zfs.eta, "lineshape_frequency")
    lo, hi = lineshape_support(ctx, zfs)
    axis = uniform_axis(lo, hi, n_bins)
    edges = np.linspace(0.0, 1.0, n_bins + 1)  # u at bin edges
    x_out = _branch_outer(edges)
    mass = x_out[:-1] - x_out[1:]  # outer branch: x decreasing in u
    x_in = _branch_inner(np.clip(edges, 0.75, 1.0))
    mass += x_in[1:] - x_in[:-1]  # inner branch: x increasing in u
    width = (hi - lo) / n_bins
    return Spectrum(
        axis=axis,
        intensity=mass / width,
        axis_kind="frequency",
        normalized=True,
        meta={
            "quantity": "overtone-lineshape",
            "omega_e": ctx.omega_e,
            "epsilon": ctx.epsilon(zfs),
        },
    )


# --- field-swept profile ---------------------------------------------------
#
# At fixed drive frequency, an orientation with factor h resonates where
# omega_mw = 2 omega_e(B) + 2 omega_zfs^2 h / omega_e(B).  With
# y = |gamma| B this is the quadratic 2 y^2 - omega_mw y
# + 2 omega_zfs^2 h = 0, whose physical root
#   y(h) = [omega_mw + sqrt(omega_mw^2 - 16 omega_zfs^2 h)] / 4
# decreases from omega_mw / 2 (h = 0) to the h = 3 edge.  Inverting,
# h(y) = y (omega_mw - 2 y) / (2 omega_zfs^2) is monotone on the support,
# so field-bin masses map exactly to u-intervals of the lineshape.


def field_profile_support(zfs, omega_mw, gamma_e=GAMMA_E):
    """Field interval [B(h = 3), omega_mw / (2 |gamma|)] in tesla."""
    disc = omega_mw**2 - 48.0 * zfs.omega_zfs**2
    if disc <= 0.0:
        raise ValueError(
            "drive frequency too low: the h = 3 shell has no "
            "resonant field"
        )
    y_lo = (omega_mw + math.sqrt(disc)) / 4.0
    y_hi = omega_mw / 2.0
    g = abs(gamma_e)
    return y_lo / g, y_hi / g


def field_profile(zfs, omega_mw, n_bins=400, gamma_e=GAMMA_E, jacobian=True):
    """Powder overtone profile versus static field at fixed drive frequency.

    With ``jacobian`` True (the default) bins carry exact orientation
    masses per tesla, so the profile is a true density integrating to 1.
    With ``jacobian`` False each bin center is assigned the frequency-
    domain density (per unit scaled offset u) of the orientation shell
    resonant at that field, without the field-compression factor; that
    curve does not integrate to 1 and is marked ``normalized=False``.
    """
    _warn_if_rhombic(zfs.eta, "field_profile")
    b_lo, b_hi = field_profile_support(zfs, omega_mw, gamma_e)
    axis = uniform_axis(b_lo, b_hi, n_bins)
    g = abs(gamma_e)
    meta = {
        "quantity": "overtone-field-profile",
        "omega_mw": omega_mw,
        "jacobian": jacobian,
    }
    if not jacobian:
        y = g * axis
        h = y * (omega_mw - 2.0 * y) / (2.0 * zfs.omega_zfs**2)
        u = np.clip(h / 3.0, 0.0, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            root = np.sqrt(1.0 - u)
            outer = 1.0 / np.sqrt(1.0 + 2.0 * root)
            inner = np.where(
                u > 0.75, 1.0 / np.sqrt(np.abs(1.0 - 2.0 * root)), 0.0
            )
            dens = (math.sqrt(3.0) / 6.0) * (outer + inner) / root
        dens = np.where(np.isfinite(dens), dens, 0.0)
        return Spectrum(
            axis=axis,
            intensity=dens,
            axis_kind="field",
            normalized=False,
            meta=meta,
        )
    y_edges = g * np.linspace(b_lo, b_hi, n_bins + 1)
    h_edges = y_edges * (omega_mw - 2.0 * y_edges) / (2.0 * zfs.omega_zfs**2)
    u_edges = np.clip(h_edges / 3.0, 0.0, 1.0)
    # the support starts exactly on the h = 3 shell, but recomputing h
    # there loses ~1e-13 to cancellation and the square-root branch
    # inverses amplify that to ~1e-7 of missing mass; pin the edge
    u_edges[0] = 1.0
    # h decreases with field, so each bin's u-interval is [u_hi, u_lo]
    x_out = _branch_outer(u_edges)
    mass = x_out[1:] - x_out[:-1]
    x_in = _branch_inner(np.clip(u_edges, 0.75, 1.0))
    mass += x_in[:-1] - x_in[1:]
    width = (b_hi - b_lo) / n_bins
    return Spectrum(
        axis=axis,
        intensity=mass / width,
        axis_kind="field",
        normalized=True,
        meta=meta,
    )


def shift_width(zfs, omega_mw, gamma_e=GAMMA_E):
    """Center shift and width of the overtone line in field units (T).

    Relative to the bare half-field B = omega_mw / (2 |gamma|), with
    eps evaluated there (eps = 2 omega_zfs / omega_mw):

        B_shift = -(omega_mw / |gamma|) (21/16) eps^2
        B_width =  (omega_mw / |gamma|) (3/8)  eps^2

    so B_width / |B_shift| = 2/7 independent of the system.
    """
    eps = 2.0 * zfs.omega_zfs / omega_mw
    scale = omega_mw / abs(gamma_e)
    b_shift = -scale * (21.0 / 16.0) * eps**2
    b_width = scale * (3.0 / 8.0) * eps**2
    return b_shift, b_width


# --- nutation-rate distributions (axial closed forms) ----------------------
#
# With q = eps omega_1 and x = cos(beta) uniform on [0, 1]:
#   drive along B0 (chi = 0):    w = (3/2) q (1 - x^2), single branch;
#   drive perpendicular (chi = pi/2): w = 3 q x sqrt(1 - x^2), two
#   branches x^2 = (1 +- W)/2 with W = sqrt(1 - 4 (w / 3q)^2).
# Both distributions live on [0, (3/2) q] and diverge integrably at the
# upper endpoint; the perpendicular one starts at the same plateau value
# 1/(3q) as the parallel one.

_NUTATION_MODES = ("parallel", "perpendicular")


def nutation_scale(ctx, zfs):
    """The rate unit q = eps omega_1 (rad/s)."""
    return ctx.epsilon(zfs) * ctx.omega_1


def nutation_support(ctx, zfs):
    """Rate interval [0, (3/2) eps omega_1]."""
    return 0.0, 1.5 * nutation_scale(ctx, zfs)


def nutation_density(w, q, mode):
    """Pointwise powder density of the nutation rate (per rad/s)."""
    if mode not in _NUTATION_MODES:
        raise ValueError("mode must be one of %s" % (_NUTATION_MODES,))
    w = np.asarray(w, dtype=float)
    out = np.zeros_like(w)
    inside = (w >= 0.0) & (w <= 1.5 * q)
    zeta = np.where(inside, w / (3.0 * q), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        if mode == "parallel":
            val = 1.0 / (3.0 * q * np.sqrt(1.0 - 2.0 * zeta))
        else:
            big_w = np.sqrt(np.maximum(1.0 - 4.0 * zeta**2, 0.0))
            val = (
                (np.sqrt(1.0 - big_w) + np.sqrt(1.0 + big_w))
                / (3.0 * math.sqrt(2.0) * q * big_w)
            )
    out[inside] = val[inside]
    return out if out.ndim else float(out)


def _nutation_masses(edges_zeta, mode):
    """Exact orientation mass in each zeta bin (zeta = w / 3q)."""
    if mode == "parallel":
        x = np.sqrt(np.maximum(1.0 - 2.0 * edges_zeta, 0.0))
        return x[:-1] - x[1:]
    big_w = np.sqrt(np.maximum(1.0 - 4.0 * edges_zeta**2, 0.0))
    x_hi = np.sqrt((1.0 + big_w) / 2.0)  # decreasing in zeta
    x_lo = np.sqrt((1.0 - big_w) / 2.0)  # increasing in zeta
    return (x_hi[:-1] - x_hi[1:]) + (x_lo[1:] - x_lo[:-1])


def nutation_distribution(ctx, zfs, mode="perpendicular", n_bins=400):
    """Binned powder distribution of the overtone nutation rate.

    ``mode`` selects the drive geometry: 'perpendicular' (chi = pi/2,
    amplitude |f|) or 'parallel' (chi = 0, amplitude |g|).  Bin values
    are exact branch masses over width, so the result integrates to 1.
    """
    if mode not in _NUTATION_MODES:
        raise ValueError("mode must be one of %s" % (_NUTATION_MODES,))
    _warn_if_rhombic(zfs.eta, "nutation_distribution")
    q = nutation_scale(ctx, zfs)
    lo, hi = nutation_support(ctx, zfs)
    axis = uniform_axis(lo, hi, n_bins)
    edges_zeta = np.linspace(0.0, 0.5, n_bins + 1)
    mass = _nutation_masses(edges_zeta, mode)
    width = (hi - lo) / n_bins
    return Spectrum(
        axis=axis,
        intensity=mass / width,
        axis_kind="rate",
        normalized=True,
        meta={"quantity": "nutation-distribution", "mode": mode, "q": q},
    )
