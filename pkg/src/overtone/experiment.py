"""Experiment-level models built on the core layers.

Covers the measurement-facing pieces: projecting photoexcited triplet
populations onto high-field eigenstates (sudden approximation), powder
maps of the overtone polarization, synthetic echo-detected field
sweeps, a reduced four-level integrated-solid-effect (ISE) transfer
model with Hartmann-Hahn matching, multi-shot buildup with leakage,
buildup/relaxation curve fitting, and the overall signal-ratio
estimate.  Quantities that depend on unmodeled spin diffusion or
relaxation (absolute nuclear polarization, buildup times) are treated
as fit inputs, never predicted.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from .hamiltonian import (
    drive_operator,
    static_hamiltonian,
    static_hamiltonian_batch,
    sw_overtone_resonance,
)
from .orientation import euler_rotation, euler_rotation_batch, fgh, fgh_arrays
from .oracle import labeled_eigensystem_batch
from .spectrum import Spectrum, TimeTrace
from .spincore import UnderResolvedError, eig_adiabatic
from .units import TWO_PI

#: Tolerance on population normalization.
POPULATION_TOL = 1e-12

#: Default ISE propagation steps across the sweep.
ISE_STEPS = 4000

#: A fitted time constant whose standard error exceeds this multiple of
#: its value is reported as unidentifiable.
UNIDENTIFIABLE_ERR_RATIO = 10.0


@dataclass(frozen=True)
class TripletPopulations:
    """Triplet sublevel populations in a declared basis.

    basis 'zero-field' orders values as (P_x, P_y, P_z) over the
    zero-field eigenstates; basis 'ms' orders values as (p0, p+1, p-1)
    over the PAS-frame Zeeman states.  Values must be a probability
    vector.
    """

    basis: str
    values: tuple

    def __post_init__(self):
        if self.basis not in ("zero-field", "ms"):
            raise ValueError("basis must be 'zero-field' or 'ms'")
        if len(self.values) != 3:
            raise ValueError("need exactly three populations")
        if min(self.values) < 0.0:
            raise ValueError("populations must be non-negative")
        if abs(sum(self.values) - 1.0) > POPULATION_TOL:
            raise ValueError("populations must sum to 1")


def zero_field_states(zfs):
    """Zero-field eigenstates and energies in the PAS Zeeman basis.

    Returns (states, energies): states is a (3, 3) complex matrix whose
    columns are |X>, |Y>, |Z> expressed over (|+1>, |0>, |-1>), and
    energies are (omega_zfs (1 - eta), omega_zfs (1 + eta),
    -2 omega_zfs).  These are the exact eigenpairs of the PAS ZFS
    Hamiltonian for any rhombicity.
    """
    r2 = math.sqrt(2.0)
    states = np.array(
        [
            [-1.0 / r2, 1j / r2, 0.0],
            [0.0, 0.0, 1.0],
            [1.0 / r2, 1j / r2, 0.0],
        ],
        dtype=complex,
    )
    energies = np.array(
        [
            zfs.omega_zfs * (1.0 - zfs.eta),
            zfs.omega_zfs * (1.0 + zfs.eta),
            -2.0 * zfs.omega_zfs,
        ]
    )
    return states, energies


def _pas_density_matrix(zfs, pops):
    """Diagonal-population density matrix in the PAS Zeeman basis."""
    if pops.basis == "ms":
        p0, p_plus, p_minus = pops.values
        return np.diag([p_plus, p0, p_minus]).astype(complex)
    states, _ = zero_field_states(zfs)
    weights = np.asarray(pops.values, dtype=float)
    return (states * weights) @ np.conj(states.T)


def eigenstate_populations(ctx, zfs, orientation, pops):
    """Project sublevel populations onto the labeled field eigenstates.

    Sudden approximation: p(label) = <e_label| rho_lab |e_label> with
    rho built from the declared-basis populations in the PAS, rotated to
    the lab frame.  Returns ms-basis TripletPopulations (p0, p+1, p-1).
    """
    rho_pas = _pas_density_matrix(zfs, pops)
    u = euler_rotation(orientation)
    rho_lab = np.conj(u.T) @ rho_pas @ u
    es = eig_adiabatic(static_hamiltonian(ctx, zfs, orientation))
    p = {}
    for label in (1, 0, -1):
        v = es.vector(label)
        p[label] = float(np.real(np.vdot(v, rho_lab @ v)))
    return TripletPopulations(basis="ms", values=(p[0], p[1], p[-1]))


def overtone_polarization_map(ctx, zfs, grid, pops, weights=None):
    """Per-orientation overtone polarization and its powder average.

    Returns (polarizations, average) where polarizations[i] is
    p(+1) - p(-1) across the overtone pair at grid orientation i and the
    average is taken with the grid measure (optionally multiplied by a
    caller-supplied per-orientation ``weights`` array).
    """
    rho_pas = _pas_density_matrix(zfs, pops)
    u = euler_rotation_batch(grid.alphas, grid.betas, grid.gammas)
    rho_lab = np.einsum("nji,jk,nkl->nil", np.conj(u), rho_pas, u)
    hams = static_hamiltonian_batch(
        ctx, zfs, grid.alphas, grid.betas, grid.gammas
    )
    _energies, vectors = labeled_eigensystem_batch(hams)
    v_plus, v_minus = vectors[:, :, 0], vectors[:, :, 2]
    p_plus = np.real(
        np.einsum("ni,nij,nj->n", np.conj(v_plus), rho_lab, v_plus)
    )
    p_minus = np.real(
        np.einsum("ni,nij,nj->n", np.conj(v_minus), rho_lab, v_minus)
    )
    pol = p_plus - p_minus
    w = grid.weights if weights is None else grid.weights * np.asarray(weights)
    total = math.fsum(w)
    if total <= 0.0:
        raise ValueError("weights remove the whole grid")
    average = math.fsum(w * pol) / total
    return pol, average


_SWEEP_TRANSITIONS = ("all", "overtone", "sq")


def echo_field_sweep(
    ctx,
    zfs,
    grid,
    pops,
    b_axis,
    excitation_bandwidth,
    transitions="all",
    resonance_model="formula",
):
    """Synthetic echo-detected field sweep at fixed drive frequency.

    For each field bin, every (orientation, transition) pair whose
    resonance lies within ``excitation_bandwidth`` of ctx.omega_mw
    contributes moment^2 times the population difference across the
    transition.  Populations and drive moments come from the exact
    eigensystem at that field; resonance positions follow
    ``resonance_model``: 'formula' uses the first-order forms (overtone
    2 omega_e + 2 eps omega_zfs h, single-quantum omega_e +- 3 omega_zfs
    h'), 'exact' uses the eigenvalue gaps.  The result is a signed,
    unnormalized spectrum over the field axis.
    """
    if excitation_bandwidth <= 0.0:
        raise ValueError("excitation_bandwidth must be positive")
    if transitions not in _SWEEP_TRANSITIONS:
        raise ValueError("transitions must be one of %s" % (_SWEEP_TRANSITIONS,))
    if resonance_model not in ("formula", "exact"):
        raise ValueError("resonance_model must be 'formula' or 'exact'")
    if ctx.omega_mw <= 0.0:
        raise ValueError("ctx.omega_mw must be set for a field sweep")
    b_axis = np.asarray(b_axis, dtype=float)
    f, g, hp, h = fgh_arrays(grid.alphas, grid.betas, grid.gammas, zfs.eta)
    rho_pas = _pas_density_matrix(zfs, pops)
    u = euler_rotation_batch(grid.alphas, grid.betas, grid.gammas)
    rho_lab = np.einsum("nji,jk,nkl->nil", np.conj(u), rho_pas, u)
    d = drive_operator(ctx)
    gamma_abs = abs(ctx.gamma_e)
    use_overtone = transitions in ("all", "overtone")
    use_sq = transitions in ("all", "sq")
    signal = np.empty(b_axis.shape[0])
    for i, b0 in enumerate(b_axis):
        ctx_b = ctx.with_b0(float(b0))
        hams = static_hamiltonian_batch(
            ctx_b, zfs, grid.alphas, grid.betas, grid.gammas
        )
        energies, vectors = labeled_eigensystem_batch(hams)
        pops_lab = np.real(
            np.einsum(
                "nik,nij,njk->nk", np.conj(vectors), rho_lab, vectors
            )
        )
        p_plus, p_zero, p_minus = pops_lab[:, 0], pops_lab[:, 1], pops_lab[:, 2]
        omega_e = gamma_abs * float(b0)
        contributions = []
        if use_overtone:
            if resonance_model == "formula":
                res = 2.0 * omega_e + 2.0 * zfs.omega_zfs**2 * h / omega_e
            else:
                res = energies[:, 0] - energies[:, 2]
            mask = np.abs(res - ctx.omega_mw) < excitation_bandwidth
            if np.any(mask):
                elem = np.einsum(
                    "ni,ij,nj->n",
                    np.conj(vectors[:, :, 0]),
                    d,
                    vectors[:, :, 2],
                )
                contributions.append(
                    mask * np.abs(elem) ** 2 * (p_plus - p_minus)
                )
        if use_sq:
            for sign, cols, pol in (
                (1.0, (0, 1), p_plus - p_zero),
                (-1.0, (1, 2), p_zero - p_minus),
            ):
                if resonance_model == "formula":
                    res = omega_e + sign * 3.0 * zfs.omega_zfs * hp
                else:
                    res = energies[:, cols[0]] - energies[:, cols[1]]
                mask = np.abs(res - ctx.omega_mw) < excitation_bandwidth
                if np.any(mask):
                    elem = np.einsum(
                        "ni,ij,nj->n",
                        np.conj(vectors[:, :, cols[0]]),
                        d,
                        vectors[:, :, cols[1]],
                    )
                    contributions.append(mask * np.abs(elem) ** 2 * pol)
        if contributions:
            signal[i] = math.fsum(
                math.fsum(grid.weights * c) for c in contributions
            )
        else:
            signal[i] = 0.0
    return Spectrum(
        axis=b_axis,
        intensity=signal,
        axis_kind="field",
        normalized=False,
        allow_negative=True,
        meta={
            "quantity": "echo-field-sweep",
            "omega_mw": ctx.omega_mw,
            "bandwidth": excitation_bandwidth,
            "transitions": transitions,
            "resonance_model": resonance_model,
            "n_orientations": grid.n,
        },
    )


@dataclass(frozen=True)
class IseConfig:
    """Parameters of the reduced integrated-solid-effect model.

    omega1 is the microwave drive amplitude entering the effective
    overtone nutation rate; t_mw the sweep duration; b_sweep the total
    field-sweep width; omega_0n the nuclear Larmor frequency; a and b
    the secular and pseudosecular hyperfine couplings (defaults are
    model placeholders, not measured values); rep_rate and rep_count
    configure multi-shot buildup.
    """

    omega1: float
    t_mw: float
    b_sweep: float
    omega_0n: float = TWO_PI * 8.74e6
    hyperfine_secular: float = TWO_PI * 1.0e6
    hyperfine_pseudosecular: float = TWO_PI * 0.3e6
    electron_polarization: float = 1.0
    rep_rate: float = 50.0
    rep_count: int = 1

    def __post_init__(self):
        if self.t_mw <= 0.0:
            raise ValueError("t_mw must be positive")
        if self.b_sweep < 0.0:
            raise ValueError("b_sweep must be non-negative")
        if abs(self.electron_polarization) > 1.0:
            raise ValueError("|electron_polarization| must be <= 1")
        if self.rep_rate <= 0.0 or self.rep_count < 1:
            raise ValueError("rep_rate must be positive, rep_count >= 1")


def _ise_operators():
    sz = np.diag([1.0, -1.0]).astype(complex)
    sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    return {
        "sz_e": np.kron(sz, eye),
        "sx_e": np.kron(sx, eye),
        "iz": np.kron(eye, sz / 2.0),
        "ix": np.kron(eye, sx / 2.0),
        "sz_iz": np.kron(sz, sz / 2.0),
        "sz_ix": np.kron(sz, sx / 2.0),
    }


def ise_nutation_rate(ctx, zfs, orientation, omega1):
    """Observable overtone nutation rate entering the ISE model."""
    v = fgh(orientation, zfs.eta)
    eps = ctx.epsilon(zfs)
    return (
        2.0
        * eps
        * omega1
        * abs(v.f * math.sin(ctx.chi) + v.g * math.cos(ctx.chi))
    )


def ise_shot(ctx, zfs, orientation, cfg, n_steps=ISE_STEPS, center_offset=0.0):
    """Nuclear polarization change from one swept-field microwave pulse.

    Reduced model: the overtone pair is a pseudo-spin-1/2 coupled to one
    nuclear spin-1/2,

        H(t) = Delta(t) sz/2 + omega_nut sx/2 + omega_0n Iz
               + a sz Iz + b sz Ix,

    with Delta swept linearly across 2 |gamma| b_sweep (the overtone
    resonance moves twice as fast as the field) centered on the
    orientation's second-order resonance offset from ctx.omega_mw plus
    ``center_offset``.  The electron starts at the configured
    polarization, the nucleus unpolarized; the return value is the
    change of 2 <Iz>.
    """
    omega_nut = ise_nutation_rate(ctx, zfs, orientation, cfg.omega1)
    delta_center = (
        sw_overtone_resonance(ctx, zfs, orientation)
        - ctx.omega_mw
        + center_offset
    )
    half_span = abs(ctx.gamma_e) * cfg.b_sweep
    delta_step = 2.0 * half_span / n_steps
    scale = max(cfg.omega_0n, omega_nut)
    if scale > 0.0 and delta_step > 0.5 * scale:
        raise UnderResolvedError(
            "sweep under-resolved: per-step detuning change %.3g rad/s "
            "exceeds half the matching scale %.3g rad/s"
            % (delta_step, scale)
        )
    ops = _ise_operators()
    h_fixed = (
        cfg.omega_0n * ops["iz"]
        + cfg.hyperfine_secular * ops["sz_iz"]
        + cfg.hyperfine_pseudosecular * ops["sz_ix"]
        + 0.5 * omega_nut * ops["sx_e"]
    )
    p = cfg.electron_polarization
    rho = np.kron(
        np.diag([(1.0 + p) / 2.0, (1.0 - p) / 2.0]).astype(complex),
        np.eye(2, dtype=complex) / 2.0,
    )
    dt = cfg.t_mw / n_steps
    start = float(np.real(np.trace(ops["iz"] @ rho)))
    for k in range(n_steps):
        frac = (k + 0.5) / n_steps
        delta = delta_center + half_span * (2.0 * frac - 1.0)
        h = h_fixed + 0.5 * delta * ops["sz_e"]
        vals, vecs = np.linalg.eigh(h)
        u = (vecs * np.exp(-1j * vals * dt)) @ np.conj(vecs.T)
        rho = u @ rho @ np.conj(u.T)
    end = float(np.real(np.trace(ops["iz"] @ rho)))
    return 2.0 * (end - start)


def ise_buildup(cfg, shot_transfer, leakage):
    """Multi-shot nuclear polarization accumulation with leakage.

    Independent-shot model: P_{k+1} = (1 - leakage) P_k + shot_transfer,
    sampled at the repetition rate.  With 0 < leakage <= 1 this
    saturates exponentially toward shot_transfer / leakage with time
    constant 1 / (rep_rate * leakage).
    """
    if not 0.0 <= leakage <= 1.0:
        raise ValueError("leakage must lie in [0, 1]")
    values = np.empty(cfg.rep_count + 1)
    values[0] = 0.0
    for k in range(cfg.rep_count):
        values[k + 1] = (1.0 - leakage) * values[k] + shot_transfer
    times = np.arange(cfg.rep_count + 1) / cfg.rep_rate
    return TimeTrace(
        times=times,
        values=values,
        meta={"shot_transfer": shot_transfer, "leakage": leakage},
    )


@dataclass(frozen=True)
class BuildupFit:
    """Saturating or decaying exponential fit of a polarization curve.

    For the saturating model p_max (1 - exp(-t / t_build)); for the
    decaying model p_max exp(-t / t1).  Unused time constants are None.
    ``unidentifiable`` flags a time constant whose standard error is
    not finite or exceeds the estimate tenfold.
    """

    p_max: float
    t_build: float
    t1: float
    p_max_err: float
    time_err: float
    residual_norm: float
    unidentifiable: bool


def fit_buildup(trace, model="saturating-exponential"):
    """Least-squares buildup or relaxation fit with standard errors."""
    times = np.asarray(trace.times, dtype=float)
    values = np.asarray(trace.values, dtype=float)
    if len(times) < 4:
        raise ValueError("need at least 4 samples")
    span = times[-1] - times[0]
    if model == "saturating-exponential":

        def f(t, p_max, tau):
            return p_max * (1.0 - np.exp(-t / tau))

        p0 = [values[-1] if values[-1] != 0.0 else 1.0, span / 3.0]
    elif model == "decaying-exponential":

        def f(t, p_max, tau):
            return p_max * np.exp(-t / tau)

        p0 = [values[0] if values[0] != 0.0 else 1.0, span / 3.0]
    else:
        raise ValueError("unknown model %r" % model)
    popt, pcov = curve_fit(
        f, times, values, p0=p0, bounds=([-np.inf, 1e-12], [np.inf, np.inf]),
        maxfev=20000,
    )
    errs = np.sqrt(np.abs(np.diag(pcov)))
    residual = float(np.linalg.norm(f(times, *popt) - values))
    bad = not np.isfinite(errs[1]) or errs[1] > UNIDENTIFIABLE_ERR_RATIO * abs(
        popt[1]
    )
    if model == "saturating-exponential":
        return BuildupFit(
            p_max=float(popt[0]),
            t_build=float(popt[1]),
            t1=None,
            p_max_err=float(errs[0]),
            time_err=float(errs[1]),
            residual_norm=residual,
            unidentifiable=bool(bad),
        )
    return BuildupFit(
        p_max=float(popt[0]),
        t_build=None,
        t1=float(popt[1]),
        p_max_err=float(errs[0]),
        time_err=float(errs[1]),
        residual_norm=residual,
        unidentifiable=bool(bad),
    )


def signal_ratio_estimate(n_spins_ratio, polarization_ratio, epsilon_ratio):
    """Product of spin-count, polarization, and moment-scaling ratios."""
    for name, value in (
        ("n_spins_ratio", n_spins_ratio),
        ("polarization_ratio", polarization_ratio),
        ("epsilon_ratio", epsilon_ratio),
    ):
        if value <= 0.0:
            raise ValueError("%s must be positive" % name)
    return n_spins_ratio * polarization_ratio * epsilon_ratio
