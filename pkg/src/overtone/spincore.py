"""Spin-1 operator algebra and dense 3x3 propagation utilities.

All matrices are plain (3, 3) complex numpy arrays over the fixed basis
|+1>, |0>, |-1>.  Hamiltonians carry angular frequencies (rad/s); pure
spin operators are dimensionless.  Propagation is piecewise-constant
with the exact matrix exponential of each step obtained by hermitian
eigendecomposition, so every step is exactly unitary up to rounding.
"""

import math
from dataclasses import dataclass

import numpy as np

HERMITICITY_TOL = 1e-12
UNITARITY_TOL = 1e-10

#: Zeeman labels attached to the basis rows in order.
BASIS_LABELS = (1, 0, -1)


class HermiticityError(ValueError):
    """Matrix expected to be hermitian is not, beyond tolerance."""


class DegenerateLabelingError(RuntimeError):
    """Two eigenvectors claim the same Zeeman label (equal max overlap)."""


class UnderResolvedError(ValueError):
    """Time step too coarse for the fastest frequency in the Hamiltonian."""


@dataclass(frozen=True)
class SpinOperators:
    """Cartesian spin-1 operators and rank-2 spherical tensor operators.

    ``t2[q]`` for q in -2..2 are the rank-2 tensors built from the
    ladder operators: t2[0] = (3 Sz^2 - 2) / sqrt(6),
    t2[+-1] = -+ (Sz S+- + S+- Sz) / 2, t2[+-2] = S+-^2 / 2.
    """

    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    t2: dict


@dataclass
class EigenSystem:
    """Eigendecomposition with adiabatic (max-overlap) Zeeman labels.

    ``values[i]`` and ``vectors[:, i]`` form the i-th eigenpair in
    ascending-value order; ``labels[i]`` is the Zeeman tag (+1, 0, -1)
    of the basis state the eigenvector overlaps most.
    """

    values: np.ndarray
    vectors: np.ndarray
    labels: tuple

    def value(self, label):
        return self.values[self.labels.index(label)]

    def vector(self, label):
        return self.vectors[:, self.labels.index(label)]


def commutator(a, b):
    return a @ b - b @ a


def is_hermitian(m, tol=HERMITICITY_TOL):
    scale = max(np.abs(m).max(), 1e-300)
    return np.abs(m - m.conj().T).max() <= tol * scale


def is_unitary(m, tol=UNITARITY_TOL):
    return np.abs(m @ m.conj().T - np.eye(m.shape[0])).max() <= tol


def assert_hermitian(m, tol=HERMITICITY_TOL):
    if not is_hermitian(m, tol):
        raise HermiticityError(
            "matrix is not hermitian within relative tolerance %g" % tol
        )


def spin1_operators():
    """Return the fixed spin-1 operators in the basis |+1>, |0>, |-1>."""
    sp = math.sqrt(2.0) * np.array(
        [[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=complex
    )
    sm = sp.conj().T
    sx = (sp + sm) / 2.0
    sy = (sp - sm) / 2.0j
    sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    eye = np.eye(3, dtype=complex)
    t2 = {
        0: (3.0 * sz @ sz - 2.0 * eye) / math.sqrt(6.0),
        1: -0.5 * (sz @ sp + sp @ sz),
        -1: 0.5 * (sz @ sm + sm @ sz),
        2: 0.5 * sp @ sp,
        -2: 0.5 * sm @ sm,
    }
    return SpinOperators(sx=sx, sy=sy, sz=sz, t2=t2)


def eig_adiabatic(h):
    """Diagonalize a hermitian 3x3 matrix and label eigenvectors.

    Labels are assigned by maximum squared overlap with the Zeeman basis
    states, so they follow states adiabatically through parameter sweeps
    instead of tracking energy order.

    Raises HermiticityError for non-hermitian input and
    DegenerateLabelingError when two eigenvectors have their maximum
    overlap on the same basis state.
    """
    h = np.asarray(h, dtype=complex)
    assert_hermitian(h)
    values, vectors = np.linalg.eigh(h)
    overlaps = np.abs(vectors) ** 2  # overlaps[k, i] = |<k|v_i>|^2
    rows = np.argmax(overlaps, axis=0)
    if len(set(rows.tolist())) != 3:
        raise DegenerateLabelingError(
            "ambiguous adiabatic labels: two eigenvectors share their "
            "dominant basis state"
        )
    labels = tuple(BASIS_LABELS[k] for k in rows)
    return EigenSystem(values=values, vectors=vectors, labels=labels)


def unitary_step(h, dt):
    """Exact propagator exp(-i h dt) of a constant hermitian matrix."""
    values, vectors = np.linalg.eigh(h)
    return (vectors * np.exp(-1j * values * dt)) @ vectors.conj().T


def _spectral_radius(h):
    return float(np.abs(np.linalg.eigvalsh(h)).max())


def propagate(h_of_t, psi0, t_grid, dt_max):
    """Piecewise-constant propagation of a state under h_of_t.

    Parameters
    ----------
    h_of_t:
        Either a constant (3, 3) matrix or a callable t -> (3, 3)
        hermitian matrix in rad/s.  Each step uses the matrix evaluated
        at the step midpoint.
    psi0:
        Normalized initial state, shape (3,).
    t_grid:
        Increasing sample times (s); the state is recorded at each.
    dt_max:
        Upper bound on the internal step (s).  Rejected as
        under-resolved when larger than 1/(20 f_max) with f_max the
        largest eigenfrequency magnitude encountered, in Hz.

    Returns
    -------
    (len(t_grid), 3) complex array of states.
    """
    if dt_max <= 0.0:
        raise ValueError("dt_max must be positive")
    t_grid = np.asarray(t_grid, dtype=float)
    psi = np.asarray(psi0, dtype=complex).copy()
    if abs(np.linalg.norm(psi) - 1.0) > 1e-8:
        raise ValueError("initial state must be normalized")
    if callable(h_of_t):
        h_fun = h_of_t
    else:
        h_const = np.asarray(h_of_t, dtype=complex)
        h_fun = lambda _t: h_const  # noqa: E731

    out = np.empty((t_grid.size, 3), dtype=complex)
    t = t_grid[0]
    out[0] = psi
    for i in range(1, t_grid.size):
        span = t_grid[i] - t
        nstep = max(1, int(math.ceil(span / dt_max)))
        dt = span / nstep
        for k in range(nstep):
            h = np.asarray(h_fun(t + (k + 0.5) * dt), dtype=complex)
            radius = _spectral_radius(h)
            if radius > 0 and dt_max > 2.0 * math.pi / (20.0 * radius):
                raise UnderResolvedError(
                    "dt_max %.3e s cannot resolve the fastest frequency "
                    "%.3e Hz (limit 1/(20 f_max))"
                    % (dt_max, radius / (2.0 * math.pi))
                )
            psi = unitary_step(h, dt) @ psi
        t = t_grid[i]
        out[i] = psi
    return out
