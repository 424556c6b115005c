"""Zero-field-splitting tensor, Euler orientations, and powder grids.

The principal axis system (PAS) of the ZFS tensor is carried to the
laboratory frame by ZYZ Euler angles (alpha, beta, gamma).  The rotation
operator is U = exp(-i alpha Sz) exp(-i beta Sy) exp(-i gamma Sz) and
operators transform passively, A_lab = U^dag A_pas U.  The convention is
not asserted; it is pinned by tests checking the rotated tensor against
the closed-form orientation functions

    f  = e^{i g} [3 sin b cos b - eta (cos 2a sin b cos b + i sin 2a sin b)]
    g  = e^{2i g} (1/2) [3 sin^2 b + eta (cos 2a (1 + cos^2 b) + 2i sin 2a cos b)]
    h' = (1/2) [(3 cos^2 b - 1) + eta cos 2a sin^2 b]
    h  = |f|^2 + |g|^2

which collect the whole angle dependence of the rank-2 tensor
components entering the static Hamiltonian.
"""

import math
from dataclasses import dataclass

import numpy as np

from .spincore import spin1_operators
from .units import GAMMA_E, TWO_PI


@dataclass(frozen=True)
class ZfsTensor:
    """Axial and rhombic zero-field-splitting parameters (rad/s).

    Derived quantities: ``omega_zfs`` = d/3 and ``eta`` = 3 e / d.
    The conventional ordering of principal values requires |eta| <= 1.
    """

    d: float
    e: float = 0.0

    def __post_init__(self):
        if self.d == 0.0 and self.e != 0.0:
            raise ValueError("rhombic ZFS with d = 0 is not representable")
        if self.d != 0.0 and abs(self.eta) > 1.0 + 1e-12:
            raise ValueError("|eta| = |3 e / d| must not exceed 1")

    @property
    def omega_zfs(self):
        return self.d / 3.0

    @property
    def eta(self):
        if self.d == 0.0:
            return 0.0
        return 3.0 * self.e / self.d


@dataclass
class Orientation:
    """ZYZ Euler angles (rad) carrying the PAS to the laboratory frame."""

    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.beta <= math.pi:
            raise ValueError("beta must lie in [0, pi]")
        self.alpha = self.alpha % TWO_PI
        self.gamma = self.gamma % TWO_PI


@dataclass(frozen=True)
class FghValues:
    """Dimensionless orientation functions at one orientation."""

    f: complex
    g: complex
    h_prime: float
    h: float


@dataclass(frozen=True)
class PowderGrid:
    """Weighted orientation ensemble approximating the uniform measure."""

    alphas: np.ndarray
    betas: np.ndarray
    gammas: np.ndarray
    weights: np.ndarray
    scheme: str = "random"
    seed: int = 0

    def __post_init__(self):
        w = self.weights
        if np.any(w < 0.0) or abs(float(np.sum(w)) - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")

    @property
    def n(self):
        return self.weights.size

    def orientation(self, i):
        return Orientation(
            alpha=float(self.alphas[i]),
            beta=float(self.betas[i]),
            gamma=float(self.gammas[i]),
        )


def fgh_arrays(alpha, beta, gamma, eta):
    """Vectorized orientation functions; returns (f, g, h_prime, h)."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    sb, cb = np.sin(beta), np.cos(beta)
    c2a, s2a = np.cos(2.0 * alpha), np.sin(2.0 * alpha)
    f = np.exp(1j * gamma) * (3.0 * sb * cb - eta * (c2a * sb * cb + 1j * s2a * sb))
    g = (
        np.exp(2j * gamma)
        * 0.5
        * (3.0 * sb**2 + eta * (c2a * (1.0 + cb**2) + 2j * s2a * cb))
    )
    h_prime = 0.5 * ((3.0 * cb**2 - 1.0) + eta * c2a * sb**2)
    h = np.abs(f) ** 2 + np.abs(g) ** 2
    return f, g, h_prime, h


def fgh(orientation, eta):
    """Orientation functions f, g, h', h at a single orientation."""
    if abs(eta) > 1.0 + 1e-12:
        raise ValueError("|eta| must not exceed 1")
    f, g, hp, h = fgh_arrays(
        orientation.alpha, orientation.beta, orientation.gamma, eta
    )
    return FghValues(f=complex(f), g=complex(g), h_prime=float(hp), h=float(h))


def epsilon(zfs, b0, gamma_e=GAMMA_E):
    """Perturbation parameter omega_zfs / omega_e with omega_e = -gamma_e B0."""
    if b0 <= 0.0:
        raise ValueError(
            "electron Larmor frequency vanishes at b0 = 0; epsilon undefined"
        )
    return zfs.omega_zfs / (-gamma_e * b0)


def rotation_z(angle):
    """exp(-i angle Sz) in the spin-1 basis."""
    return np.diag(
        [np.exp(-1j * angle), 1.0, np.exp(1j * angle)]
    ).astype(complex)


def rotation_y(beta):
    """exp(-i beta Sy): the closed-form spin-1 Wigner d matrix."""
    c, s = math.cos(beta), math.sin(beta)
    r2 = math.sqrt(2.0)
    return np.array(
        [
            [(1 + c) / 2.0, -s / r2, (1 - c) / 2.0],
            [s / r2, c, -s / r2],
            [(1 - c) / 2.0, s / r2, (1 + c) / 2.0],
        ],
        dtype=complex,
    )


def euler_rotation(orientation):
    """U = Rz(alpha) Ry(beta) Rz(gamma); lab operators are U^dag A_pas U."""
    return (
        rotation_z(orientation.alpha)
        @ rotation_y(orientation.beta)
        @ rotation_z(orientation.gamma)
    )


def euler_rotation_batch(alphas, betas, gammas):
    """Stacked (n, 3, 3) Euler rotations for orientation arrays.

    Uses the diagonal structure of the z rotations:
    U[i, j] = exp(-i alpha m_i) Ry(beta)[i, j] exp(-i gamma m_j).
    """
    alphas = np.asarray(alphas, dtype=float)
    betas = np.asarray(betas, dtype=float)
    gammas = np.asarray(gammas, dtype=float)
    c, s = np.cos(betas), np.sin(betas)
    r2 = math.sqrt(2.0)
    ry = np.empty((alphas.shape[0], 3, 3), dtype=complex)
    ry[:, 0, 0] = (1.0 + c) / 2.0
    ry[:, 0, 1] = -s / r2
    ry[:, 0, 2] = (1.0 - c) / 2.0
    ry[:, 1, 0] = s / r2
    ry[:, 1, 1] = c
    ry[:, 1, 2] = -s / r2
    ry[:, 2, 0] = (1.0 - c) / 2.0
    ry[:, 2, 1] = s / r2
    ry[:, 2, 2] = (1.0 + c) / 2.0
    m = np.array([1.0, 0.0, -1.0])
    left = np.exp(-1j * alphas[:, None] * m)
    right = np.exp(-1j * gammas[:, None] * m)
    return left[:, :, None] * ry * right[:, None, :]


def zfs_pas_matrix(zfs):
    """ZFS Hamiltonian in its principal axis system (rad/s)."""
    ops = spin1_operators()
    eye = np.eye(3, dtype=complex)
    return zfs.omega_zfs * (3.0 * ops.sz @ ops.sz - 2.0 * eye) + zfs.e * (
        ops.sx @ ops.sx - ops.sy @ ops.sy
    )


def zfs_lab_matrix(zfs, orientation):
    """ZFS Hamiltonian rotated to the laboratory frame.

    Independent of the closed-form route through fgh: builds the tensor
    in the PAS and applies the Euler similarity transform, so the two
    paths cross-validate each other.
    """
    u = euler_rotation(orientation)
    return u.conj().T @ zfs_pas_matrix(zfs) @ u


def project_t2(m):
    """Coefficients of a 3x3 matrix on the rank-2 tensor operators."""
    ops = spin1_operators()
    out = {}
    for q, t in ops.t2.items():
        norm = np.trace(t.conj().T @ t)
        out[q] = complex(np.trace(t.conj().T @ m) / norm)
    return out


def powder_grid(scheme, n, seed=0):
    """Deterministic orientation ensemble for powder averaging.

    scheme 'random': n orientations drawn from the uniform measure
    sin(beta) d(beta) d(alpha) d(gamma) / (8 pi^2) with a seeded
    generator, each with weight 1/n.

    scheme 'gauss-legendre': balanced product grid with Gauss-Legendre
    nodes in cos(beta) and uniform midpoint nodes in alpha and gamma;
    the total node count is the largest balanced cube not exceeding n.
    """
    if n < 1:
        raise ValueError("orientation count must be at least 1")
    if scheme == "random":
        rng = np.random.default_rng(seed)
        alphas = rng.uniform(0.0, TWO_PI, n)
        betas = np.arccos(rng.uniform(-1.0, 1.0, n))
        gammas = rng.uniform(0.0, TWO_PI, n)
        weights = np.full(n, 1.0 / n)
    elif scheme == "gauss-legendre":
        m = max(1, int(round(n ** (1.0 / 3.0))))
        while m**3 > n:
            m -= 1
        nodes, wts = np.polynomial.legendre.leggauss(m)
        betas_ax = np.arccos(nodes)
        w_beta = wts / 2.0
        ring = (np.arange(m) + 0.5) * TWO_PI / m
        alphas, betas, gammas, weights = [], [], [], []
        for ib in range(m):
            for ia in range(m):
                for ig in range(m):
                    alphas.append(ring[ia])
                    betas.append(betas_ax[ib])
                    gammas.append(ring[ig])
                    weights.append(w_beta[ib] / (m * m))
        alphas = np.array(alphas)
        betas = np.array(betas)
        gammas = np.array(gammas)
        weights = np.array(weights)
        weights = weights / weights.sum()
    else:
        raise ValueError("unknown powder scheme: %r" % (scheme,))
    return PowderGrid(
        alphas=alphas,
        betas=betas,
        gammas=gammas,
        weights=weights,
        scheme=scheme,
        seed=seed,
    )
