"""Experiment models: populations, sweeps, ISE transfer, buildup fits."""

import math

import numpy as np
import pytest

from overtone.analytics import field_profile_support
from overtone.experiment import (
    IseConfig,
    TripletPopulations,
    echo_field_sweep,
    eigenstate_populations,
    fit_buildup,
    ise_buildup,
    ise_nutation_rate,
    ise_shot,
    overtone_polarization_map,
    signal_ratio_estimate,
    zero_field_states,
)
from overtone.hamiltonian import FieldContext, sw_overtone_resonance
from overtone.orientation import Orientation, ZfsTensor, powder_grid, zfs_pas_matrix
from overtone.spectrum import TimeTrace, uniform_axis
from overtone.spincore import UnderResolvedError
from overtone.systems import PENTACENE
from overtone.units import GAMMA_E, TWO_PI

AXIAL = ZfsTensor(d=PENTACENE.zfs.d, e=0.0)

OMEGA_MW = TWO_PI * 11.6e9  # rad/s


def _ise_setup():
    """Axial pentacene shell driven at its second-order resonance."""
    omega_1 = TWO_PI * 5e6
    b0 = AXIAL.omega_zfs / (0.08 * abs(GAMMA_E))
    o = Orientation(beta=math.pi / 4.0)
    ctx0 = FieldContext(
        b0=b0, b1=2.0 * omega_1 / abs(GAMMA_E), chi=math.pi / 2.0
    )
    omega_mw = sw_overtone_resonance(ctx0, AXIAL, o)
    ctx = FieldContext(
        b0=b0, b1=ctx0.b1, chi=ctx0.chi, omega_mw=omega_mw
    )
    return ctx, o, omega_1


def _cfg(omega_1, half_span_rad, t_mw, **kwargs):
    # IseConfig.b_sweep is a field width; the detuning half-span it
    # produces is |gamma| * b_sweep
    return IseConfig(
        omega1=omega_1,
        t_mw=t_mw,
        b_sweep=half_span_rad / abs(GAMMA_E),
        **kwargs,
    )


def test_triplet_populations_validation():
    with pytest.raises(ValueError):
        TripletPopulations(basis="cartesian", values=(1.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        TripletPopulations(basis="ms", values=(0.5, 0.5))
    with pytest.raises(ValueError):
        TripletPopulations(basis="ms", values=(0.7, 0.4, -0.1))
    with pytest.raises(ValueError):
        TripletPopulations(basis="ms", values=(0.5, 0.4, 0.2))


def test_zero_field_states_are_exact_eigenpairs():
    states, energies = zero_field_states(PENTACENE.zfs)
    h = zfs_pas_matrix(PENTACENE.zfs)
    for k in range(3):
        v = states[:, k]
        assert np.linalg.norm(h @ v - energies[k] * v) < 1e-6
        assert abs(np.linalg.norm(v) - 1.0) < 1e-12
    # pentacene zero-field energies in MHz: 411.84, 518.54, -930.38
    mhz_vals = energies / (TWO_PI * 1e6)
    np.testing.assert_allclose(
        mhz_vals, [411.84, 518.54, -930.38], atol=0.01
    )


def test_eigenstate_populations_aligned_axial():
    # at beta = 0 with eta = 0 the Hamiltonian is diagonal, so declared
    # ms populations project onto the eigenstates unchanged
    ctx = FieldContext(b0=0.207)
    o = Orientation(beta=0.0)
    pops = TripletPopulations(basis="ms", values=(0.2, 0.5, 0.3))
    out = eigenstate_populations(ctx, AXIAL, o, pops)
    assert out.basis == "ms"
    np.testing.assert_allclose(out.values, (0.2, 0.5, 0.3), atol=1e-12)
    # zero-field basis at beta = 0: |Z> = |0>, |X> and |Y> split evenly
    zf = TripletPopulations(basis="zero-field", values=(0.76, 0.16, 0.08))
    out = eigenstate_populations(ctx, AXIAL, o, zf)
    np.testing.assert_allclose(out.values, (0.08, 0.46, 0.46), atol=1e-12)


def test_eigenstate_populations_conserve_total():
    ctx = FieldContext(b0=0.207)
    pops = TripletPopulations(
        basis=PENTACENE.population_basis, values=PENTACENE.populations
    )
    for angles in ((0.5, 0.9, 1.3), (2.0, 2.2, 0.1)):
        out = eigenstate_populations(
            ctx, PENTACENE.zfs, Orientation(*angles), pops
        )
        assert abs(sum(out.values) - 1.0) < 1e-9


def test_overtone_polarization_map_weights():
    ctx = FieldContext(b0=0.207)
    grid = powder_grid("random", 2000, seed=12)
    pops = TripletPopulations(
        basis=PENTACENE.population_basis, values=PENTACENE.populations
    )
    pol, average = overtone_polarization_map(ctx, PENTACENE.zfs, grid, pops)
    assert pol.shape == (2000,)
    assert abs(average - float(np.sum(grid.weights * pol))) < 1e-12
    # uniform extra weights must not change the average
    _pol, same = overtone_polarization_map(
        ctx, PENTACENE.zfs, grid, pops, weights=np.ones(2000)
    )
    assert abs(same - average) < 1e-12
    with pytest.raises(ValueError):
        overtone_polarization_map(
            ctx, PENTACENE.zfs, grid, pops, weights=np.zeros(2000)
        )


def test_echo_field_sweep_band_selectivity():
    """Overtone signal appears on the overtone field range, sq does not."""
    grid = powder_grid("random", 3000, seed=6)
    pops = TripletPopulations(
        basis=PENTACENE.population_basis, values=PENTACENE.populations
    )
    lo, hi = field_profile_support(PENTACENE.zfs, OMEGA_MW)
    b_axis = uniform_axis(lo - 2e-3, hi + 2e-3, 41)
    ctx = FieldContext(b0=0.207, omega_mw=OMEGA_MW)
    ov = echo_field_sweep(
        ctx, PENTACENE.zfs, grid, pops, b_axis, TWO_PI * 10e6,
        transitions="overtone",
    )
    assert np.any(ov.intensity != 0.0)
    # photoexcited pentacene has positive overtone polarization
    assert math.fsum(ov.intensity) > 0.0
    sq = echo_field_sweep(
        ctx, PENTACENE.zfs, grid, pops, b_axis, TWO_PI * 10e6,
        transitions="sq",
    )
    assert np.all(sq.intensity == 0.0)
    exact = echo_field_sweep(
        ctx, PENTACENE.zfs, grid, pops, b_axis, TWO_PI * 10e6,
        transitions="overtone", resonance_model="exact",
    )
    assert np.any(exact.intensity != 0.0)


def test_echo_field_sweep_validation():
    grid = powder_grid("random", 50, seed=1)
    pops = TripletPopulations(basis="ms", values=(0.4, 0.3, 0.3))
    axis = uniform_axis(0.19, 0.21, 5)
    ctx = FieldContext(b0=0.2, omega_mw=OMEGA_MW)
    with pytest.raises(ValueError):
        echo_field_sweep(ctx, AXIAL, grid, pops, axis, 0.0)
    with pytest.raises(ValueError):
        echo_field_sweep(
            ctx, AXIAL, grid, pops, axis, 1e6, transitions="triple"
        )
    with pytest.raises(ValueError):
        echo_field_sweep(
            ctx, AXIAL, grid, pops, axis, 1e6, resonance_model="sw"
        )
    ctx_no_mw = FieldContext(b0=0.2)
    with pytest.raises(ValueError):
        echo_field_sweep(ctx_no_mw, AXIAL, grid, pops, axis, 1e6)


def test_ise_nutation_rate_uses_observable_rate():
    ctx, o, omega_1 = _ise_setup()
    from overtone.analytics import overtone_rabi_frequency

    assert abs(
        ise_nutation_rate(ctx, AXIAL, o, omega_1)
        - overtone_rabi_frequency(ctx, AXIAL, o)
    ) < 1e-6


def test_ise_shot_null_cases():
    ctx, o, omega_1 = _ise_setup()
    # without the pseudosecular coupling, Iz commutes with the full
    # Hamiltonian and the transfer vanishes identically
    cfg = _cfg(
        omega_1, TWO_PI * 2e6, 50e-6, hyperfine_pseudosecular=0.0
    )
    assert (
        abs(ise_shot(ctx, AXIAL, o, cfg, center_offset=-TWO_PI * 8.5e6))
        < 1e-12
    )
    # unpolarized electron: nothing to transfer
    cfg = _cfg(
        omega_1, TWO_PI * 2e6, 50e-6, electron_polarization=0.0
    )
    assert (
        abs(ise_shot(ctx, AXIAL, o, cfg, center_offset=-TWO_PI * 8.5e6))
        < 1e-12
    )


def test_ise_shot_antisymmetric_in_polarization():
    ctx, o, omega_1 = _ise_setup()
    up = _cfg(omega_1, TWO_PI * 2e6, 50e-6, electron_polarization=0.6)
    down = _cfg(omega_1, TWO_PI * 2e6, 50e-6, electron_polarization=-0.6)
    t_up = ise_shot(ctx, AXIAL, o, up, center_offset=-TWO_PI * 8.5e6)
    t_down = ise_shot(ctx, AXIAL, o, down, center_offset=-TWO_PI * 8.5e6)
    assert abs(t_up + t_down) < 1e-12
    assert abs(t_up) > 1e-6  # the matched sweep actually transfers


def test_ise_shot_prefers_matched_center():
    ctx, o, omega_1 = _ise_setup()
    cfg = _cfg(omega_1, TWO_PI * 2e6, 50e-6)
    matched = ise_shot(ctx, AXIAL, o, cfg, center_offset=-TWO_PI * 8.5e6)
    far = ise_shot(ctx, AXIAL, o, cfg, center_offset=TWO_PI * 20e6)
    assert abs(matched) > 10.0 * abs(far)


def test_ise_shot_under_resolution_guard():
    ctx, o, omega_1 = _ise_setup()
    cfg = _cfg(omega_1, TWO_PI * 9e6, 50e-6)
    with pytest.raises(UnderResolvedError):
        ise_shot(ctx, AXIAL, o, cfg, n_steps=2)


def test_ise_config_validation():
    with pytest.raises(ValueError):
        IseConfig(omega1=1.0, t_mw=0.0, b_sweep=1e-4)
    with pytest.raises(ValueError):
        IseConfig(omega1=1.0, t_mw=1e-5, b_sweep=-1e-4)
    with pytest.raises(ValueError):
        IseConfig(omega1=1.0, t_mw=1e-5, b_sweep=1e-4, electron_polarization=1.5)
    with pytest.raises(ValueError):
        IseConfig(omega1=1.0, t_mw=1e-5, b_sweep=1e-4, rep_count=0)


def test_ise_buildup_matches_geometric_series():
    cfg = IseConfig(
        omega1=1.0, t_mw=1e-5, b_sweep=0.0, rep_rate=50.0, rep_count=400
    )
    shot, leak = 2.5e-4, 0.01
    trace = ise_buildup(cfg, shot, leak)
    k = np.arange(401)
    closed = (shot / leak) * (1.0 - (1.0 - leak) ** k)
    np.testing.assert_allclose(trace.values, closed, rtol=1e-10)
    np.testing.assert_allclose(trace.times, k / 50.0, rtol=1e-15)
    with pytest.raises(ValueError):
        ise_buildup(cfg, shot, 1.5)


def test_fit_buildup_recovers_saturating():
    times = np.linspace(0.0, 600.0, 61)
    truth = 0.45 * (1.0 - np.exp(-times / 120.0))
    fit = fit_buildup(TimeTrace(times=times, values=truth))
    assert abs(fit.p_max - 0.45) < 1e-6
    assert abs(fit.t_build - 120.0) < 1e-3
    assert fit.t1 is None
    assert not fit.unidentifiable


def test_fit_buildup_recovers_decaying():
    times = np.linspace(0.0, 900.0, 50)
    truth = 0.9 * np.exp(-times / 240.0)
    fit = fit_buildup(
        TimeTrace(times=times, values=truth), model="decaying-exponential"
    )
    assert abs(fit.t1 - 240.0) < 1e-3
    assert fit.t_build is None
    with pytest.raises(ValueError):
        fit_buildup(TimeTrace(times=times, values=truth), model="biexponential")


def test_signal_ratio_estimate():
    value = signal_ratio_estimate(7.2, 0.060 / 0.046, 0.165 / 0.080)
    assert 19.3 < value < 19.5
    with pytest.raises(ValueError):
        signal_ratio_estimate(-1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        signal_ratio_estimate(1.0, 0.0, 1.0)
