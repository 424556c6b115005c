"""Static and driven spin-1 Hamiltonians and their block diagonalization.

The static Hamiltonian at one orientation, in units of the electron
Larmor frequency omega_e and with eps = omega_zfs / omega_e, is

        [ 1 + eps h'     -eps f / sqrt(2)    eps g          ]
  w_e * [ -eps f*/sqrt(2)  -2 eps h'         eps f / sqrt(2)]
        [ eps g*           eps f*/sqrt(2)    -1 + eps h'    ]

built from the orientation functions of :mod:`overtone.orientation`.
A Schrieffer-Wolff transformation with the anti-hermitian generator T
solving [H_diag, T] = H_offdiag removes the off-diagonal coupling at
first order; the effective Hamiltonian through second order is
H_diag + (1/2) [T, H_offdiag].  Its diagonal reproduces the exact
eigenvalues to third order in eps, which is what the resonance-formula
acceptance test leans on.
"""

import math
from dataclasses import dataclass

import numpy as np

from .orientation import fgh, fgh_arrays
from .spincore import spin1_operators
from .units import GAMMA_E

#: Largest value of eps * max(|f|, |g|, 3|h'|) accepted by the
#: perturbative operations.  Configurable module constant.
PERTURBATION_GUARD = 0.5


class PerturbationRegimeError(ValueError):
    """Inputs lie outside the validity range of the perturbative forms."""


@dataclass(frozen=True)
class FieldContext:
    """Static field, drive field, drive geometry, and drive frequency.

    Derived quantities: ``omega_e`` = -gamma_e b0 (positive for
    electrons), ``omega_1`` = -gamma_e b1 / 2, and the half-drive offset
    ``delta_omega`` = omega_e - omega_mw / 2.  ``chi`` is the angle
    between the static and microwave fields.
    """

    b0: float
    b1: float = 0.0
    chi: float = math.pi / 2.0
    omega_mw: float = 0.0
    gamma_e: float = GAMMA_E

    def __post_init__(self):
        if self.b0 <= 0.0:
            raise ValueError("b0 must be positive")
        if not 0.0 <= self.chi <= math.pi / 2.0 + 1e-12:
            raise ValueError("chi must lie in [0, pi/2]")

    @property
    def omega_e(self):
        return -self.gamma_e * self.b0

    @property
    def omega_1(self):
        return -self.gamma_e * self.b1 / 2.0

    @property
    def delta_omega(self):
        return self.omega_e - self.omega_mw / 2.0

    def epsilon(self, zfs):
        return zfs.omega_zfs / self.omega_e

    def with_b0(self, b0):
        return FieldContext(
            b0=b0,
            b1=self.b1,
            chi=self.chi,
            omega_mw=self.omega_mw,
            gamma_e=self.gamma_e,
        )


def _matrix_from_fgh(omega_e, eps, f, g, h_prime):
    r2 = math.sqrt(2.0)
    return omega_e * np.array(
        [
            [1.0 + eps * h_prime, -eps * f / r2, eps * g],
            [-eps * np.conj(f) / r2, -2.0 * eps * h_prime, eps * f / r2],
            [eps * np.conj(g), eps * np.conj(f) / r2, -1.0 + eps * h_prime],
        ],
        dtype=complex,
    )


def static_hamiltonian(ctx, zfs, orientation):
    """Zeeman plus lab-frame ZFS Hamiltonian at one orientation (rad/s)."""
    v = fgh(orientation, zfs.eta)
    return _matrix_from_fgh(
        ctx.omega_e, ctx.epsilon(zfs), v.f, v.g, v.h_prime
    )


def static_hamiltonian_batch(ctx, zfs, alphas, betas, gammas):
    """Stacked (n, 3, 3) static Hamiltonians for orientation arrays."""
    f, g, hp, _h = fgh_arrays(alphas, betas, gammas, zfs.eta)
    eps = ctx.epsilon(zfs)
    n = f.shape[0]
    r2 = math.sqrt(2.0)
    m = np.zeros((n, 3, 3), dtype=complex)
    m[:, 0, 0] = 1.0 + eps * hp
    m[:, 1, 1] = -2.0 * eps * hp
    m[:, 2, 2] = -1.0 + eps * hp
    m[:, 0, 1] = -eps * f / r2
    m[:, 1, 0] = np.conj(m[:, 0, 1])
    m[:, 1, 2] = eps * f / r2
    m[:, 2, 1] = np.conj(m[:, 1, 2])
    m[:, 0, 2] = eps * g
    m[:, 2, 0] = np.conj(m[:, 0, 2])
    return ctx.omega_e * m


def drive_operator(ctx):
    """Direction of the microwave field: sin(chi) Sx + cos(chi) Sz."""
    ops = spin1_operators()
    return math.sin(ctx.chi) * ops.sx + math.cos(ctx.chi) * ops.sz


def drive_hamiltonian(ctx, t):
    """Microwave Hamiltonian 2 omega_1 cos(omega_mw t) (sin chi Sx + cos chi Sz)."""
    return 2.0 * ctx.omega_1 * math.cos(ctx.omega_mw * t) * drive_operator(ctx)


def _guard(eps, f, g, h_prime):
    strength = eps * max(abs(f), abs(g), 3.0 * abs(h_prime))
    if strength >= PERTURBATION_GUARD:
        raise PerturbationRegimeError(
            "perturbative form invalid: eps * max(|f|, |g|, 3|h'|) = %.3f "
            ">= %.2f" % (strength, PERTURBATION_GUARD)
        )


def sw_generator(ctx, zfs, orientation):
    """Anti-hermitian generator T with [H_diag, T] = H_offdiag exactly.

    Elementwise, T_ij = H_ij / (E_i - E_j) over the first-order diagonal
    E = omega_e (1 + eps h', -2 eps h', -1 + eps h'), which gives the
    denominators (1 +- 3 eps h') for the single-quantum entries and
    2 omega_e for the corner.
    """
    v = fgh(orientation, zfs.eta)
    eps = ctx.epsilon(zfs)
    _guard(eps, v.f, v.g, v.h_prime)
    r2 = math.sqrt(2.0)
    t = np.zeros((3, 3), dtype=complex)
    t[0, 1] = -eps * v.f / (r2 * (1.0 + 3.0 * eps * v.h_prime))
    t[1, 2] = eps * v.f / (r2 * (1.0 - 3.0 * eps * v.h_prime))
    t[0, 2] = eps * v.g / 2.0
    t[1, 0] = -np.conj(t[0, 1])
    t[2, 1] = -np.conj(t[1, 2])
    t[2, 0] = -np.conj(t[0, 2])
    return t


def sw_static(ctx, zfs, orientation):
    """Static Hamiltonian transformed through second order.

    Returns H_diag + (1/2)[T, H_offdiag] truncated to second order: the
    corrected diagonal plus the residual single-quantum couplings on the
    (1,2)/(2,3) entries (leading order (3 sqrt(2)/4) eps^2 omega_e f* g).
    The (1,3) corner is third order and is zeroed here;
    :func:`sw_discarded_couplings` exposes what was dropped or kept for
    numerical bounding.
    """
    h = static_hamiltonian(ctx, zfs, orientation)
    h0 = np.diag(np.diag(h))
    h1 = h - h0
    t = sw_generator(ctx, zfs, orientation)
    heff = h0 + 0.5 * (t @ h1 - h1 @ t)
    heff[0, 2] = 0.0
    heff[2, 0] = 0.0
    return heff


def sw_discarded_couplings(ctx, zfs, orientation):
    """Magnitudes of the second-order couplings outside the overtone block.

    Returns a dict with the single-quantum couplings retained on the
    (1,2)/(2,3) entries of :func:`sw_static` and the third-order corner
    that was zeroed, so their dynamical effect can be bounded in tests.
    """
    h = static_hamiltonian(ctx, zfs, orientation)
    h0 = np.diag(np.diag(h))
    h1 = h - h0
    t = sw_generator(ctx, zfs, orientation)
    half = 0.5 * (t @ h1 - h1 @ t)
    return {
        "sq_12": complex(half[0, 1]),
        "sq_23": complex(half[1, 2]),
        "corner_13": complex(half[0, 2]),
    }


def sw_spin_operators(ctx, zfs, orientation):
    """First-order transformed drive operators {sx_sw, sz_sw}.

    S^SW = S + [T, S]; both outputs stay hermitian.  The (1,3) corner of
    sx_sw is -eps f / (1 - 9 eps^2 h'^2) and that of sz_sw is exactly
    -eps g, which is where the overtone drive amplitude comes from.
    """
    t = sw_generator(ctx, zfs, orientation)
    ops = spin1_operators()
    out = {}
    for name, s in (("sx_sw", ops.sx), ("sz_sw", ops.sz)):
        out[name] = s + (t @ s - s @ t)
    return out


def rotating_frame_hamiltonian(ctx, zfs, orientation, include_shift=True):
    """Effective time-independent Hamiltonian in the half-drive frame.

    In the frame rotating at omega_mw / 2 about Sz, after dropping
    oscillating terms, the overtone pair evolves under

        (1,1) = delta_omega + eps omega_zfs (|f|^2 + |g|^2)
        (2,2) = -3 omega_zfs h'
        (3,3) = -(1,1)
        (1,3) = (3,1)* = -eps omega_1 (f sin chi + g cos chi)

    plus an omega_zfs h' identity shift that never affects populations
    (omitted when ``include_shift`` is False).  The diagonal carries the
    first-order orientation shift convention of
    :func:`overtone.analytics.overtone_resonance`, i.e. the drive is on
    resonance when delta_omega = -eps omega_zfs h.
    """
    v = fgh(orientation, zfs.eta)
    eps = ctx.epsilon(zfs)
    _guard(eps, v.f, v.g, v.h_prime)
    shift = zfs.omega_zfs * v.h_prime if include_shift else 0.0
    diag11 = ctx.delta_omega + eps * zfs.omega_zfs * v.h
    corner = -eps * ctx.omega_1 * (
        v.f * math.sin(ctx.chi) + v.g * math.cos(ctx.chi)
    )
    m = np.zeros((3, 3), dtype=complex)
    m[0, 0] = diag11 + shift
    m[1, 1] = -3.0 * zfs.omega_zfs * v.h_prime + shift
    m[2, 2] = -diag11 + shift
    m[0, 2] = corner
    m[2, 0] = np.conj(corner)
    return m


def sw_overtone_resonance(ctx, zfs, orientation=None, *, arrays=None):
    """Second-order overtone resonance from the transformed diagonal.

    Closed form of the (1,1) - (3,3) difference of :func:`sw_static`:

        2 omega_e + eps omega_zfs (|f|^2 / (1 - 9 eps^2 h'^2) + |g|^2)

    which tracks the exact eigenvalue gap to third order in eps.  Pass
    either a single ``orientation`` or ``arrays=(alphas, betas, gammas)``
    for a vectorized evaluation.
    """
    eps = ctx.epsilon(zfs)
    if arrays is not None:
        f, g, hp, _h = fgh_arrays(*arrays, zfs.eta)
    else:
        v = fgh(orientation, zfs.eta)
        _guard(eps, v.f, v.g, v.h_prime)
        f, g, hp = v.f, v.g, v.h_prime
    fa, ga = np.abs(f), np.abs(g)
    if arrays is not None:
        strength = eps * np.maximum(
            fa, np.maximum(ga, 3.0 * np.abs(hp))
        )
        if np.any(strength >= PERTURBATION_GUARD):
            raise PerturbationRegimeError(
                "perturbative form invalid for %d orientations"
                % int(np.sum(strength >= PERTURBATION_GUARD))
            )
    return 2.0 * ctx.omega_e + eps * zfs.omega_zfs * (
        fa**2 / (1.0 - 9.0 * eps**2 * np.asarray(hp) ** 2) + ga**2
    )
