"""Brute-force numerical oracles for the closed-form catalog.

Everything in :mod:`overtone.analytics` is first order in eps or an
axial pushforward; everything here is exact up to floating point:
transition frequencies from eigendecomposition, lab-frame Rabi traces
with the full cosine drive (no rotating-wave approximation), damped
sinusoid fitting, deterministic powder histograms, and an L1 spectrum
distance.  The validation suite compares the two layers.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, least_squares

from .hamiltonian import drive_operator, static_hamiltonian, static_hamiltonian_batch
from .analytics import (
    lineshape_support,
    nutation_support,
    overtone_nutation_from_fg,
    overtone_resonance_from_h,
)
from .orientation import Orientation, fgh_arrays
from .spectrum import Spectrum, TimeTrace, uniform_axis
from .spincore import (
    DegenerateLabelingError,
    UnderResolvedError,
    eig_adiabatic,
    spin1_operators,
    unitary_step,
)
from .units import GAMMA_E

#: Lab-frame propagation steps per microwave period.
STEPS_PER_PERIOD = 50

#: Spectral peak must exceed this multiple of the median spectrum
#: magnitude for a fit seed to count as an oscillation.
PEAK_OVER_FLOOR = 5.0

#: Orientations per chunk in batched eigendecompositions (memory cap).
BATCH_CHUNK = 200_000


class NoOscillationError(RuntimeError):
    """The trace has no spectral peak above the noise floor."""


@dataclass(frozen=True)
class TransitionSet:
    """Exact transition frequencies and drive moments at one orientation.

    ``overtone`` is defined as ``sq_plus + sq_minus`` so the sum rule
    holds exactly in floating point.  ``moments`` maps the label pairs
    (1, 0), (0, -1), (1, -1) to the squared matrix elements of
    sin(chi) Sx + cos(chi) Sz between the labeled eigenvectors.
    """

    sq_plus: float
    sq_minus: float
    overtone: float
    moments: dict


def exact_transitions(ctx, zfs, orientation):
    """Diagonalize the static Hamiltonian and return labeled gaps."""
    h = static_hamiltonian(ctx, zfs, orientation)
    es = eig_adiabatic(h)
    e_plus, e_zero, e_minus = es.value(1), es.value(0), es.value(-1)
    d = drive_operator(ctx)
    moments = {}
    for pair in ((1, 0), (0, -1), (1, -1)):
        vi, vj = es.vector(pair[0]), es.vector(pair[1])
        moments[pair] = float(abs(np.vdot(vi, d @ vj)) ** 2)
    sq_plus = e_plus - e_zero
    sq_minus = e_zero - e_minus
    return TransitionSet(
        sq_plus=sq_plus,
        sq_minus=sq_minus,
        overtone=sq_plus + sq_minus,
        moments=moments,
    )


def labeled_eigensystem_batch(hams):
    """Eigendecompose a (n, 3, 3) stack with adiabatic label ordering.

    Returns (energies, vectors): energies is (n, 3) with columns ordered
    (+1, 0, -1); vectors is (n, 3, 3) with vectors[:, :, k] the
    eigenvector for column k.  Raises DegenerateLabelingError when the
    max-overlap labeling of any member is not a permutation.
    """
    vals, vecs = np.linalg.eigh(hams)
    amp = np.abs(vecs) ** 2
    # basis index (0 -> m=+1, 1 -> m=0, 2 -> m=-1) claiming each column
    claim = np.argmax(amp, axis=1)
    if not np.all(np.sort(claim, axis=1) == np.array([0, 1, 2])):
        bad = int(np.sum(np.any(np.sort(claim, axis=1) != [0, 1, 2], axis=1)))
        raise DegenerateLabelingError(
            "ambiguous adiabatic labels for %d orientation(s)" % bad
        )
    col_for_basis = np.argsort(claim, axis=1)
    energies = np.take_along_axis(vals, col_for_basis, axis=1)
    vectors = np.take_along_axis(
        vecs, col_for_basis[:, None, :], axis=2
    )
    return energies, vectors


def exact_overtone_batch(ctx, zfs, alphas, betas, gammas, with_moments=False):
    """Exact labeled gaps (and overtone moments) for orientation arrays.

    Returns a dict of (n,) arrays: 'overtone', 'sq_plus', 'sq_minus',
    plus 'moment2' (squared overtone drive moment) when requested.
    Work is chunked to bound memory.
    """
    alphas = np.asarray(alphas, dtype=float)
    n = alphas.shape[0]
    out = {
        "overtone": np.empty(n),
        "sq_plus": np.empty(n),
        "sq_minus": np.empty(n),
    }
    if with_moments:
        out["moment2"] = np.empty(n)
        d = drive_operator(ctx)
    for start in range(0, n, BATCH_CHUNK):
        sl = slice(start, min(start + BATCH_CHUNK, n))
        hams = static_hamiltonian_batch(
            ctx, zfs, alphas[sl], betas[sl], gammas[sl]
        )
        energies, vectors = labeled_eigensystem_batch(hams)
        sq_plus = energies[:, 0] - energies[:, 1]
        sq_minus = energies[:, 1] - energies[:, 2]
        out["sq_plus"][sl] = sq_plus
        out["sq_minus"][sl] = sq_minus
        out["overtone"][sl] = sq_plus + sq_minus
        if with_moments:
            v_plus = vectors[:, :, 0]
            v_minus = vectors[:, :, 2]
            elem = np.einsum("ni,ij,nj->n", np.conj(v_plus), d, v_minus)
            out["moment2"][sl] = np.abs(elem) ** 2
    return out


def _initial_state(es, initial):
    if isinstance(initial, np.ndarray):
        psi = initial.astype(complex)
        return psi / np.linalg.norm(psi)
    labels = {"plus": 1, "zero": 0, "minus": -1}
    if initial not in labels:
        raise ValueError("initial must be 'plus', 'zero', 'minus', or a state")
    return es.vector(labels[initial])


def rabi_trace(
    ctx,
    zfs,
    orientation,
    drive_freq,
    duration,
    frame="lab",
    n_samples=256,
    initial="plus",
    steps_per_period=STEPS_PER_PERIOD,
):
    """Population difference p(+1) - p(-1) under resonant cosine drive.

    The labels refer to the adiabatic eigenbasis of the static
    Hamiltonian; the returned oscillation frequency on resonance is the
    observable Rabi rate (twice the corner coupling).

    frame='lab' propagates H_static + 2 omega_1 cos(drive_freq t) D
    with no rotating-wave approximation.  The drive is exactly periodic,
    so one microwave period is compiled into a single unitary
    (``steps_per_period`` midpoint steps) and the trace is sampled
    stroboscopically at integer periods.

    frame='rotating' evaluates the closed two-level form in the frame
    rotating at drive_freq / 2: with detuning Delta = overtone gap -
    drive_freq and coupling c = omega_1 <e+|D|e->,

        p(+1) - p(-1) = (Delta^2 + 4|c|^2 cos(Omega t)) / Omega^2,
        Omega = sqrt(Delta^2 + 4 |c|^2).
    """
    if drive_freq <= 0.0:
        raise ValueError("drive_freq must be positive")
    if duration <= 0.0:
        raise ValueError("duration must be positive")
    h_static = static_hamiltonian(ctx, zfs, orientation)
    es = eig_adiabatic(h_static)
    meta = {
        "frame": frame,
        "drive_freq": drive_freq,
        "omega_1": ctx.omega_1,
        "chi": ctx.chi,
    }

    if frame == "rotating":
        if initial not in ("plus", "minus"):
            raise ValueError("rotating frame supports 'plus' or 'minus'")
        delta = (es.value(1) - es.value(-1)) - drive_freq
        d = drive_operator(ctx)
        c = ctx.omega_1 * np.vdot(es.vector(1), d @ es.vector(-1))
        omega = math.hypot(delta, 2.0 * abs(c))
        times = np.linspace(0.0, duration, n_samples)
        if omega == 0.0:
            values = np.ones_like(times)
        else:
            values = (
                delta**2 + 4.0 * abs(c) ** 2 * np.cos(omega * times)
            ) / omega**2
        if initial == "minus":
            values = -values
        meta["detuning"] = delta
        meta["coupling"] = abs(c)
        return TimeTrace(times=times, values=values, meta=meta)

    if frame != "lab":
        raise ValueError("frame must be 'lab' or 'rotating'")
    if steps_per_period < 20:
        raise UnderResolvedError(
            "need at least 20 steps per microwave period, got %d"
            % steps_per_period
        )
    t_mw = 2.0 * math.pi / drive_freq
    dt = t_mw / steps_per_period
    d = drive_operator(ctx)
    # one-period propagator from midpoint-evaluated constant steps
    u_period = np.eye(3, dtype=complex)
    for k in range(steps_per_period):
        t_mid = (k + 0.5) * dt
        h = h_static + 2.0 * ctx.omega_1 * math.cos(drive_freq * t_mid) * d
        u_period = unitary_step(h, dt) @ u_period
    total_periods = int(math.floor(duration / t_mw))
    if total_periods < n_samples - 1:
        raise ValueError(
            "duration covers %d drive periods; need at least %d for "
            "stroboscopic sampling" % (total_periods, n_samples - 1)
        )
    stride = max(1, total_periods // max(n_samples - 1, 1))
    psi = _initial_state(es, initial)
    v_plus, v_minus = es.vector(1), es.vector(-1)
    times = np.arange(n_samples) * (stride * t_mw)
    values = np.empty(n_samples)
    for k in range(n_samples):
        if k > 0:
            for _ in range(stride):
                psi = u_period @ psi
        values[k] = abs(np.vdot(v_plus, psi)) ** 2 - abs(
            np.vdot(v_minus, psi)
        ) ** 2
    meta["norm_drift"] = abs(float(np.linalg.norm(psi)) - 1.0)
    meta["stride_periods"] = stride
    return TimeTrace(times=times, values=values, meta=meta)


@dataclass(frozen=True)
class FitResult:
    """Parameters of a * exp(-decay t) * sin(frequency t + phase) + offset.

    ``seed_agreement`` is False when the converged frequency moved more
    than half a spectral bin away from the discrete-spectrum seed.
    """

    amplitude: float
    decay: float
    frequency: float
    phase: float
    offset: float
    residual_norm: float
    seed_frequency: float
    seed_agreement: bool


def _spectral_seed(times, values):
    """Frequency, amplitude, and phase seeds from the padded spectrum."""
    n = len(values)
    dt = times[1] - times[0]
    y = values - np.mean(values)
    scale = float(np.max(np.abs(y)))
    window = np.hanning(n)
    nfft = 1 << (int(np.ceil(np.log2(n))) + 3)
    spec = np.fft.rfft(y * window, nfft)
    mag = np.abs(spec)
    k = int(np.argmax(mag[1:])) + 1
    floor = float(np.median(mag[1:]))
    if mag[k] <= PEAK_OVER_FLOOR * floor or mag[k] <= 1e-12 * max(scale, 1e-300) * n:
        raise NoOscillationError(
            "no spectral peak above the noise floor (peak %.3g, floor %.3g)"
            % (mag[k], floor)
        )
    # parabolic refinement on the log magnitude around the peak
    delta = 0.0
    if 1 <= k < len(mag) - 1 and mag[k - 1] > 0 and mag[k + 1] > 0:
        lm, l0, lp = np.log(mag[k - 1]), np.log(mag[k]), np.log(mag[k + 1])
        denom = lm - 2.0 * l0 + lp
        if denom < 0.0:
            delta = 0.5 * (lm - lp) / denom
            delta = float(np.clip(delta, -0.5, 0.5))
    omega_seed = 2.0 * math.pi * (k + delta) / (nfft * dt)
    phase_seed = float(np.angle(spec[k])) + math.pi / 2.0
    amp_seed = math.sqrt(2.0) * float(np.std(y))
    return omega_seed, amp_seed, phase_seed


def fit_decaying_sinusoid(trace):
    """Least-squares fit of a decaying sinusoid to a TimeTrace.

    The frequency seed is the maximum of the zero-padded discrete
    spectrum of the detrended trace; the nonlinear fit then refines all
    five parameters.  Raises NoOscillationError when no peak stands
    above the spectral floor, ValueError when the trace is too short.
    """
    times = np.asarray(trace.times, dtype=float)
    values = np.asarray(trace.values, dtype=float)
    if len(times) < 16:
        raise ValueError("need at least 16 samples to fit")
    omega_seed, amp_seed, phase_seed = _spectral_seed(times, values)
    span = times[-1] - times[0]
    if span * omega_seed < 1.5 * 2.0 * math.pi:
        raise ValueError(
            "trace spans %.2f oscillation periods; need at least 1.5"
            % (span * omega_seed / (2.0 * math.pi))
        )

    def residual(p):
        a, gamma, omega, phi, c = p
        return a * np.exp(-gamma * times) * np.sin(omega * times + phi) + c - values

    x0 = np.array(
        [amp_seed, 0.1 / span, omega_seed, phase_seed, float(np.mean(values))]
    )
    lower = [-np.inf, -np.inf, 0.0, -np.inf, -np.inf]
    upper = [np.inf, np.inf, np.inf, np.inf, np.inf]
    sol = least_squares(
        residual,
        x0,
        bounds=(lower, upper),
        x_scale=[max(amp_seed, 1e-30), 1.0 / span, omega_seed, 1.0, max(amp_seed, 1e-30)],
    )
    a, gamma, omega, phi, c = sol.x
    if a < 0.0:
        a, phi = -a, phi + math.pi
    phi = math.remainder(phi, 2.0 * math.pi)
    half_bin = math.pi / span
    return FitResult(
        amplitude=float(a),
        decay=float(gamma),
        frequency=float(omega),
        phase=float(phi),
        offset=float(c),
        residual_norm=float(np.linalg.norm(sol.fun)),
        seed_frequency=float(omega_seed),
        seed_agreement=bool(abs(omega - omega_seed) <= half_bin),
    )


_HIST_QUANTITIES = ("resonance", "resonance-exact", "nutation")
_HIST_WEIGHTS = ("unit", "moment2", "moment2xpol")


def _deterministic_histogram(values, weights, edges):
    """Per-bin exactly rounded sums, invariant under input permutation."""
    idx = np.digitize(values, edges) - 1
    n_bins = len(edges) - 1
    keep = (idx >= 0) & (idx < n_bins)
    idx, w = idx[keep], weights[keep]
    order = np.argsort(idx, kind="stable")
    idx, w = idx[order], w[order]
    sums = np.zeros(n_bins)
    bounds = np.searchsorted(idx, np.arange(n_bins + 1))
    for b in range(n_bins):
        lo, hi = bounds[b], bounds[b + 1]
        if hi > lo:
            sums[b] = math.fsum(w[lo:hi])
    return sums


def powder_histogram(
    ctx,
    zfs,
    grid,
    quantity="resonance",
    weight="unit",
    bins=400,
    support=None,
    pops=None,
):
    """Deterministic weighted histogram of a per-orientation quantity.

    quantity: 'resonance' (first-order formula), 'resonance-exact'
    (eigenvalue gaps), or 'nutation' (first-order rate with the drive
    geometry taken from ctx.chi).  weight: 'unit' (powder measure only),
    'moment2' (times the squared overtone drive moment), 'moment2xpol'
    (times moment and the overtone polarization from ``pops``), or an
    explicit per-orientation array.  Bin sums use exactly rounded
    compensated summation, so the result is bit-identical under any
    permutation of the grid.
    """
    if quantity not in _HIST_QUANTITIES:
        raise ValueError("quantity must be one of %s" % (_HIST_QUANTITIES,))
    if bins < 10:
        raise ValueError("need at least 10 bins")
    f, g, hp, h = fgh_arrays(grid.alphas, grid.betas, grid.gammas, zfs.eta)
    eps = ctx.epsilon(zfs)

    if quantity == "resonance":
        values = overtone_resonance_from_h(ctx, zfs, h)
        if support is None:
            support = lineshape_support(ctx, zfs)
    elif quantity == "resonance-exact":
        batch = exact_overtone_batch(
            ctx, zfs, grid.alphas, grid.betas, grid.gammas
        )
        values = batch["overtone"]
        if support is None:
            support = lineshape_support(ctx, zfs)
    else:
        values = overtone_nutation_from_fg(ctx, zfs, f, g)
        if support is None:
            support = nutation_support(ctx, zfs)

    w = grid.weights.copy()
    if isinstance(weight, np.ndarray):
        if weight.shape != w.shape:
            raise ValueError("weight array length does not match the grid")
        w = w * weight
    elif weight == "moment2":
        w = w * eps**2 * np.abs(
            f * math.sin(ctx.chi) + g * math.cos(ctx.chi)
        ) ** 2
    elif weight == "moment2xpol":
        if pops is None:
            raise ValueError("weight 'moment2xpol' requires pops")
        from .experiment import overtone_polarization_map

        pol, _avg = overtone_polarization_map(ctx, zfs, grid, pops)
        w = w * eps**2 * np.abs(
            f * math.sin(ctx.chi) + g * math.cos(ctx.chi)
        ) ** 2 * pol
    elif weight != "unit":
        raise ValueError("weight must be an array or one of %s" % (_HIST_WEIGHTS,))

    lo, hi = support
    edges = np.linspace(lo, hi, bins + 1)
    sums = _deterministic_histogram(np.asarray(values, dtype=float), w, edges)
    width = (hi - lo) / bins
    total = math.fsum(sums)
    signed = bool(np.any(sums < 0.0))
    meta = {
        "quantity": quantity,
        "weight": weight if isinstance(weight, str) else "custom",
        "n_orientations": grid.n,
        "included_weight": total,
    }
    if not signed and total > 0.0:
        return Spectrum(
            axis=uniform_axis(lo, hi, bins),
            intensity=sums / (total * width),
            axis_kind="frequency" if quantity != "nutation" else "rate",
            normalized=True,
            meta=meta,
        )
    return Spectrum(
        axis=uniform_axis(lo, hi, bins),
        intensity=sums / width,
        axis_kind="frequency" if quantity != "nutation" else "rate",
        normalized=False,
        allow_negative=True,
        meta=meta,
    )


def compare_spectra(a, b, exclusion=()):
    """L1 distance between two spectra as probability-mass vectors.

    Both spectra are renormalized to unit total mass over the full axis;
    bins whose centers fall inside any (lo, hi) exclusion interval are
    then dropped from the sum.  Identical spectra give 0; spectra with
    all mass in different single bins give 2.
    """
    if a.axis.shape != b.axis.shape or np.max(np.abs(a.axis - b.axis)) > 1e-9 * max(
        abs(float(a.axis[-1])), 1.0
    ):
        raise ValueError("spectra are on different axes")
    pa = a.intensity * a.bin_width
    pb = b.intensity * b.bin_width
    ta, tb = math.fsum(pa), math.fsum(pb)
    if ta <= 0.0 or tb <= 0.0:
        raise ValueError("cannot compare spectra without positive mass")
    pa, pb = pa / ta, pb / tb
    keep = np.ones(len(pa), dtype=bool)
    for lo, hi in exclusion:
        keep &= ~((a.axis >= lo) & (a.axis <= hi))
    return float(np.sum(np.abs(pa[keep] - pb[keep])))


def sq_resonance_field(
    ctx, zfs, orientation, omega_mw, which="plus", b_lo=0.02, b_hi=1.5
):
    """Static field (T) where an exact single-quantum gap meets omega_mw.

    Solves gap(B) = omega_mw by bracketed root finding; ``which``
    selects the (+1, 0) or (0, -1) transition.  Raises ValueError when
    the bracket does not straddle a resonance.
    """
    if which not in ("plus", "minus"):
        raise ValueError("which must be 'plus' or 'minus'")

    def gap_minus_target(b0):
        ts = exact_transitions(ctx.with_b0(b0), zfs, orientation)
        gap = ts.sq_plus if which == "plus" else ts.sq_minus
        return gap - omega_mw

    flo, fhi = gap_minus_target(b_lo), gap_minus_target(b_hi)
    if flo * fhi > 0.0:
        raise ValueError(
            "no single-quantum resonance between %.3f T and %.3f T"
            % (b_lo, b_hi)
        )
    return float(brentq(gap_minus_target, b_lo, b_hi, xtol=1e-10))


def powder_rabi_trace(
    ctx,
    zfs,
    grid,
    drive_freq,
    duration,
    n_samples=512,
    transition="overtone",
    selection_bandwidth=None,
):
    """Powder-averaged rotating-frame nutation trace.

    Each orientation contributes its closed two-level population
    difference (exact gaps and exact drive moments) weighted by the
    powder measure and, when ``selection_bandwidth`` is given, by a
    Gaussian excitation factor exp(-Delta^2 / (2 bw^2)) on the detuning.
    ``transition`` picks the overtone pair (+1, -1) or the 'sq'
    (+1, 0) pair.
    """
    if transition not in ("overtone", "sq"):
        raise ValueError("transition must be 'overtone' or 'sq'")
    hams = static_hamiltonian_batch(
        ctx, zfs, grid.alphas, grid.betas, grid.gammas
    )
    energies, vectors = labeled_eigensystem_batch(hams)
    d = drive_operator(ctx)
    if transition == "overtone":
        gap = (energies[:, 0] - energies[:, 1]) + (
            energies[:, 1] - energies[:, 2]
        )
        vi, vj = vectors[:, :, 0], vectors[:, :, 2]
    else:
        gap = energies[:, 0] - energies[:, 1]
        vi, vj = vectors[:, :, 0], vectors[:, :, 1]
    coupling = ctx.omega_1 * np.abs(
        np.einsum("ni,ij,nj->n", np.conj(vi), d, vj)
    )
    delta = gap - drive_freq
    omega = np.sqrt(delta**2 + 4.0 * coupling**2)
    w = grid.weights.copy()
    if selection_bandwidth is not None:
        w = w * np.exp(-(delta**2) / (2.0 * selection_bandwidth**2))
    total = w.sum()
    if total <= 0.0:
        raise ValueError("selection removed all orientations")
    w = w / total
    times = np.linspace(0.0, duration, n_samples)
    safe = np.where(omega > 0.0, omega, 1.0)
    base = np.where(omega > 0.0, (delta / safe) ** 2, 1.0)
    amp = np.where(omega > 0.0, (2.0 * coupling / safe) ** 2, 0.0)
    values = base @ w + np.cos(np.outer(times, omega)) @ (amp * w)
    return TimeTrace(
        times=times,
        values=values,
        meta={
            "transition": transition,
            "drive_freq": drive_freq,
            "selection_bandwidth": selection_bandwidth,
            "n_orientations": grid.n,
        },
    )
