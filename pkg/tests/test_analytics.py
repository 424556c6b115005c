"""Closed-form resonances, lineshapes, field profiles, nutation laws."""

import math

import numpy as np
import pytest

from overtone import analytics
from overtone.hamiltonian import FieldContext
from overtone.orientation import Orientation, ZfsTensor
from overtone.systems import NV_CENTER, PENTACENE
from overtone.units import GAMMA_E, TWO_PI, mhz

AXIAL = ZfsTensor(d=PENTACENE.zfs.d, e=0.0)
CTX = FieldContext(b0=0.207)  # T

OMEGA_MW = TWO_PI * 11.6e9  # rad/s drive used for the field-domain forms


def test_resonance_shift_closed_form_in_beta():
    """First-order shift equals (9/2) eps w_zfs sin^2(b) (4 cos^2 b + sin^2 b).

    Checked for 1000 random beta at eta = 0 to 1e-12 relative.
    """
    rng = np.random.default_rng(335)
    betas = np.arccos(rng.uniform(-1.0, 1.0, 1000))
    eps = CTX.epsilon(AXIAL)
    scale = eps * AXIAL.omega_zfs
    for beta in betas:
        o = Orientation(beta=float(beta))
        shift = analytics.overtone_resonance(CTX, AXIAL, o) - 2.0 * CTX.omega_e
        s2, c2 = math.sin(beta) ** 2, math.cos(beta) ** 2
        closed = 4.5 * scale * s2 * (4.0 * c2 + s2)
        assert abs(shift - closed) <= 1e-12 * max(abs(closed), scale)


def test_resonance_from_h_is_linear():
    h = np.array([0.0, 1.0, 2.25, 3.0])
    res = analytics.overtone_resonance_from_h(CTX, AXIAL, h)
    eps = CTX.epsilon(AXIAL)
    np.testing.assert_allclose(
        res, 2.0 * CTX.omega_e + 2.0 * eps * AXIAL.omega_zfs * h, rtol=1e-15
    )


def test_rabi_frequency_is_twice_nutation():
    ctx = FieldContext(b0=0.207, b1=5e-4, chi=math.pi / 2.0)
    o = Orientation(beta=1.0)
    nut = analytics.overtone_nutation(ctx, AXIAL, o)
    assert nut > 0.0
    assert analytics.overtone_rabi_frequency(ctx, AXIAL, o) == 2.0 * nut


def test_nutation_geometry_selects_f_or_g():
    from overtone.orientation import fgh

    o = Orientation(alpha=0.8, beta=1.2, gamma=0.5)
    v = fgh(o, 0.0)
    eps = 0.08
    b0 = AXIAL.omega_zfs / (eps * abs(GAMMA_E))
    perp = FieldContext(b0=b0, b1=4e-4, chi=math.pi / 2.0)
    par = FieldContext(b0=b0, b1=4e-4, chi=0.0)
    w_perp = analytics.overtone_nutation(perp, AXIAL, o)
    w_par = analytics.overtone_nutation(par, AXIAL, o)
    eps_actual = perp.epsilon(AXIAL)
    assert abs(w_perp - eps_actual * perp.omega_1 * abs(v.f)) < 1e-6
    assert abs(w_par - eps_actual * par.omega_1 * abs(v.g)) < 1e-6


def test_lineshape_support_and_singularities():
    lo, hi = analytics.lineshape_support(CTX, AXIAL)
    s = CTX.epsilon(AXIAL) * AXIAL.omega_zfs
    assert abs(lo - 2.0 * CTX.omega_e) < 1e-3
    assert abs(hi - lo - 6.0 * s) < 1e-3
    shoulder, edge = analytics.lineshape_singularities(CTX, AXIAL)
    assert abs(shoulder - lo - 4.5 * s) < 1e-3
    assert abs(edge - hi) < 1e-3


def test_lineshape_normalizes_exactly():
    for bins in (50, 400, 2000):
        spec = analytics.lineshape_frequency(CTX, AXIAL, n_bins=bins)
        assert abs(spec.integral() - 1.0) < 1e-9
        assert spec.normalized
        assert np.all(spec.intensity >= 0.0)


def test_lineshape_density_branches():
    lo, hi = analytics.lineshape_support(CTX, AXIAL)
    s = CTX.epsilon(AXIAL) * AXIAL.omega_zfs

    def at(u):
        return analytics.lineshape_density(lo + 6.0 * s * u, CTX, AXIAL)

    # plateau value at u = 0: (sqrt(3)/36) / (s sqrt(3)) = 1 / (36 s)
    assert abs(at(0.0) - 1.0 / (36.0 * s)) < 1e-12 / s
    # the inner branch switches on above u = 3/4
    below, above = at(0.74), at(0.76)
    assert above > 2.0 * below
    # outside the support the density vanishes
    assert at(-0.01) == 0.0
    assert at(1.01) == 0.0


def test_lineshape_density_integrates_to_bin_masses():
    # away from the singular bins the histogram equals the quadrature of
    # the pointwise density
    spec = analytics.lineshape_frequency(CTX, AXIAL, n_bins=200)
    lo, hi = analytics.lineshape_support(CTX, AXIAL)
    width = (hi - lo) / 200
    for k in (5, 60, 120):
        edges = np.linspace(lo + k * width, lo + (k + 1) * width, 2001)
        centers = 0.5 * (edges[:-1] + edges[1:])
        quad = np.sum(analytics.lineshape_density(centers, CTX, AXIAL)) * (
            edges[1] - edges[0]
        )
        assert abs(quad - spec.intensity[k] * width) < 2e-4 * spec.intensity[k] * width


def test_rhombic_warning():
    with pytest.warns(UserWarning):
        analytics.lineshape_frequency(CTX, PENTACENE.zfs, n_bins=50)


def test_field_profile_support_monotone_map():
    b_lo, b_hi = analytics.field_profile_support(AXIAL, OMEGA_MW)
    assert 0.0 < b_lo < b_hi
    assert abs(b_hi - OMEGA_MW / (2.0 * abs(GAMMA_E))) < 1e-12
    # the h = 3 edge satisfies the resonance quadratic
    y = abs(GAMMA_E) * b_lo
    lhs = 2.0 * y + 2.0 * AXIAL.omega_zfs**2 * 3.0 / y
    assert abs(lhs - OMEGA_MW) < 1e-3


def test_field_profile_normalizes():
    spec = analytics.field_profile(AXIAL, OMEGA_MW, n_bins=300)
    assert abs(spec.integral() - 1.0) < 1e-9
    assert spec.axis_kind == "field"
    raw = analytics.field_profile(AXIAL, OMEGA_MW, n_bins=300, jacobian=False)
    assert not raw.normalized


def test_field_profile_rejects_low_drive():
    # below sqrt(48) omega_zfs the h = 3 shell has no resonant field
    with pytest.raises(ValueError):
        analytics.field_profile_support(AXIAL, 6.0 * AXIAL.omega_zfs)


def test_shift_width_reference_numbers():
    # pentacene at 11.6 GHz: -3.4948 mT shift, width/|shift| = 2/7
    b_shift, b_width = analytics.shift_width(PENTACENE.zfs, OMEGA_MW)
    assert abs(b_shift * 1e3 + 3.4948) < 1e-3
    assert abs(b_width / abs(b_shift) - 2.0 / 7.0) < 1e-14
    b_shift_nv, b_width_nv = analytics.shift_width(NV_CENTER.zfs, OMEGA_MW)
    assert abs(b_shift_nv * 1e3 + 14.7801) < 1e-3
    assert abs(b_width_nv / abs(b_shift_nv) - 2.0 / 7.0) < 1e-14


def test_nutation_distribution_normalizes_and_plateau():
    ctx = FieldContext(b0=0.207, b1=5e-4, chi=math.pi / 2.0)
    q = analytics.nutation_scale(ctx, AXIAL)
    assert q > 0.0
    for mode in ("perpendicular", "parallel"):
        spec = analytics.nutation_distribution(ctx, AXIAL, mode=mode, n_bins=500)
        assert abs(spec.integral() - 1.0) < 1e-9
        lo, hi = analytics.nutation_support(ctx, AXIAL)
        assert abs(hi - 1.5 * q) < 1e-9
    # both densities start at the plateau 1 / (3 q)
    assert abs(analytics.nutation_density(0.0, q, "parallel") - 1.0 / (3.0 * q)) < 1e-12 / q
    assert (
        abs(analytics.nutation_density(1e-9 * q, q, "perpendicular") - 1.0 / (3.0 * q))
        < 1e-3 / q
    )


def test_nutation_density_diverges_at_upper_edge():
    q = 1.0
    near_edge = analytics.nutation_density(1.5 * (1.0 - 1e-10), q, "parallel")
    assert near_edge > 1e4
    assert analytics.nutation_density(1.6, q, "parallel") == 0.0
    with pytest.raises(ValueError):
        analytics.nutation_density(0.5, q, "diagonal")
