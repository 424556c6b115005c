"""Spin-1 operator algebra, adiabatic labeling, and propagation."""

import math

import numpy as np
import pytest

from overtone.spincore import (
    BASIS_LABELS,
    DegenerateLabelingError,
    HermiticityError,
    UnderResolvedError,
    commutator,
    eig_adiabatic,
    is_hermitian,
    is_unitary,
    propagate,
    spin1_operators,
    unitary_step,
)

OPS = spin1_operators()


def test_spin_commutation_relations():
    # [Sx, Sy] = i Sz and cyclic permutations
    np.testing.assert_allclose(
        commutator(OPS.sx, OPS.sy), 1j * OPS.sz, atol=1e-15
    )
    np.testing.assert_allclose(
        commutator(OPS.sy, OPS.sz), 1j * OPS.sx, atol=1e-15
    )
    np.testing.assert_allclose(
        commutator(OPS.sz, OPS.sx), 1j * OPS.sy, atol=1e-15
    )


def test_casimir_and_hermiticity():
    s2 = OPS.sx @ OPS.sx + OPS.sy @ OPS.sy + OPS.sz @ OPS.sz
    np.testing.assert_allclose(s2, 2.0 * np.eye(3), atol=1e-15)
    for s in (OPS.sx, OPS.sy, OPS.sz):
        assert is_hermitian(s)


def test_rank2_tensors_against_ladder_forms():
    sp = OPS.sx + 1j * OPS.sy
    sm = OPS.sx - 1j * OPS.sy
    np.testing.assert_allclose(OPS.t2[2], 0.5 * sp @ sp, atol=1e-15)
    np.testing.assert_allclose(OPS.t2[-2], 0.5 * sm @ sm, atol=1e-15)
    np.testing.assert_allclose(
        OPS.t2[0],
        (3.0 * OPS.sz @ OPS.sz - 2.0 * np.eye(3)) / math.sqrt(6.0),
        atol=1e-15,
    )
    # adjoint relation T_{2,-q} = (-1)^q T_{2,q}^dag
    for q in (1, 2):
        np.testing.assert_allclose(
            OPS.t2[-q], (-1.0) ** q * OPS.t2[q].conj().T, atol=1e-15
        )


def test_eig_adiabatic_labels_follow_basis():
    # diagonal-dominant matrix: labels must match the Zeeman order
    h = np.diag([5.0, 0.5, -4.0]).astype(complex)
    h[0, 1] = h[1, 0] = 0.01
    es = eig_adiabatic(h)
    assert set(es.labels) == set(BASIS_LABELS)
    assert es.value(1) > es.value(0) > es.value(-1)
    v = es.vector(1)
    assert abs(v[0]) ** 2 > 0.99


def test_eig_adiabatic_rejects_nonhermitian():
    h = np.zeros((3, 3), dtype=complex)
    h[0, 1] = 1.0
    with pytest.raises(HermiticityError):
        eig_adiabatic(h)


def test_eig_adiabatic_rejects_ambiguous_labels():
    # zero-field ZFS eigenstates split |+1> and |-1> symmetrically, so
    # two eigenvectors tie for the same dominant basis state
    h = np.diag([1.0, -2.0, 1.0]).astype(complex)
    h[0, 2] = h[2, 0] = 1.0
    with pytest.raises(DegenerateLabelingError):
        eig_adiabatic(h)


def test_unitary_step_matches_phase_evolution():
    h = np.diag([2.0, 0.0, -1.0]).astype(complex)
    u = unitary_step(h, 0.3)
    assert is_unitary(u)
    expected = np.diag(np.exp(-1j * np.array([2.0, 0.0, -1.0]) * 0.3))
    np.testing.assert_allclose(u, expected, atol=1e-14)


def test_propagate_constant_field_rotation():
    # under H = w Sz a state precesses with exactly known phases
    w = 2.0 * math.pi * 1e6  # rad/s
    h = w * OPS.sz
    psi0 = np.array([1.0, 1.0, 0.0], dtype=complex) / math.sqrt(2.0)
    t_grid = np.linspace(0.0, 1e-6, 11)
    states = propagate(h, psi0, t_grid, dt_max=1e-8)
    for t, psi in zip(t_grid, states):
        expected = np.array(
            [np.exp(-1j * w * t), 1.0, 0.0], dtype=complex
        ) / math.sqrt(2.0)
        np.testing.assert_allclose(psi, expected, atol=1e-9)
    norms = np.linalg.norm(states, axis=1)
    np.testing.assert_allclose(norms, 1.0, atol=1e-12)


def test_propagate_rejects_coarse_steps():
    w = 2.0 * math.pi * 1e9  # rad/s, 1 GHz splitting
    h = w * OPS.sz
    psi0 = np.array([1.0, 0.0, 0.0], dtype=complex)
    with pytest.raises(UnderResolvedError):
        propagate(h, psi0, np.linspace(0.0, 1e-6, 3), dt_max=1e-9)


def test_propagate_validates_input():
    h = OPS.sz
    bad = np.array([1.0, 1.0, 0.0], dtype=complex)  # not normalized
    with pytest.raises(ValueError):
        propagate(h, bad, np.linspace(0.0, 1.0, 3), dt_max=0.1)
    with pytest.raises(ValueError):
        propagate(h, bad / np.linalg.norm(bad), [0.0, 1.0], dt_max=0.0)
