"""Built-in validation suite: the closed forms against their oracles.

Each criterion function measures one documented accuracy or property
claim at full scale and returns a CriterionResult; nothing here adjusts
tolerances to the data.  The CLI `validate` subcommand and the
acceptance test module both run these.
"""

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import analytics
from .experiment import (
    IseConfig,
    TripletPopulations,
    fit_buildup,
    ise_buildup,
    ise_shot,
    overtone_polarization_map,
    signal_ratio_estimate,
)
from .hamiltonian import FieldContext, sw_overtone_resonance
from .oracle import (
    compare_spectra,
    exact_overtone_batch,
    exact_transitions,
    fit_decaying_sinusoid,
    powder_histogram,
    powder_rabi_trace,
    rabi_trace,
)
from .orientation import Orientation, ZfsTensor, powder_grid
from .systems import NV_CENTER, PENTACENE
from .units import GAMMA_E, TWO_PI, mhz

#: Frozen accuracy constant for the resonance-formula bound
#: max |omega_exact - omega_formula| <= C eps^3 omega_e.  Measured
#: 0.25 at eps = 0.080; frozen with headroom.
RESONANCE_ERROR_C = 0.4

#: Microwave frequency the reference-number criteria evaluate at (rad/s).
OMEGA_MW_REF = TWO_PI * 11.6e9


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float
    #: optional machine-readable intermediates for per-clause assertions
    data: dict = None


def _axial_pentacene():
    """Pentacene D with the rhombic part removed (closed-form regime)."""
    return ZfsTensor(d=PENTACENE.zfs.d, e=0.0)


def _context_for_epsilon(zfs, epsilon, **kwargs):
    """FieldContext whose static field gives the requested epsilon."""
    b0 = zfs.omega_zfs / (epsilon * abs(GAMMA_E))
    return FieldContext(b0=b0, **kwargs)


def criterion_1():
    """Lineshape normalization by singularity-aware integration."""
    start = time.perf_counter()
    zfs = _axial_pentacene()
    ctx = FieldContext(b0=PENTACENE.reference_field)
    spectrum = analytics.lineshape_frequency(ctx, zfs, n_bins=2000)
    integral = spectrum.integral()
    err = abs(integral - 1.0)
    seconds = time.perf_counter() - start
    passed = err <= 1e-6 and seconds < 1.0
    return CriterionResult(
        1,
        "lineshape-normalization",
        passed,
        "integral = %.12f (|err| = %.3g, limit 1e-6), %.2f s (budget 1 s)"
        % (integral, err, seconds),
        seconds,
    )


def criterion_2():
    """Closed-form lineshape vs 1e6-orientation histogram."""
    start = time.perf_counter()
    zfs = _axial_pentacene()
    ctx = FieldContext(b0=PENTACENE.reference_field)
    bins = 400
    grid = powder_grid("random", 1_000_000, seed=20260301)
    reference = analytics.lineshape_frequency(ctx, zfs, n_bins=bins)
    hist = powder_histogram(
        ctx, zfs, grid, quantity="resonance", weight="unit", bins=bins
    )
    width = reference.bin_width
    exclusion = [
        (s - 2.0 * width, s + 2.0 * width)
        for s in analytics.lineshape_singularities(ctx, zfs)
    ]
    l1 = compare_spectra(reference, hist, exclusion)
    hist_exact = powder_histogram(
        ctx, zfs, grid, quantity="resonance-exact", weight="unit", bins=bins
    )
    l1_exact = compare_spectra(reference, hist_exact, exclusion)
    seconds = time.perf_counter() - start
    passed = l1 < 0.05 and seconds < 60.0
    return CriterionResult(
        2,
        "lineshape-oracle-equivalence",
        passed,
        "L1 = %.4f (limit 0.05) vs formula histogram; %.4f vs exact-gap "
        "histogram; %.1f s (budget 60 s)" % (l1, l1_exact, seconds),
        seconds,
    )


def criterion_3():
    """Second-order resonance error bound and its scaling under halved eps."""
    start = time.perf_counter()
    zfs = _axial_pentacene()
    rng = np.random.default_rng(20260302)
    n = 1000
    alphas = rng.uniform(0.0, 2.0 * math.pi, n)
    betas = np.arccos(rng.uniform(-1.0, 1.0, n))
    gammas = rng.uniform(0.0, 2.0 * math.pi, n)

    def max_error(ctx):
        exact = exact_overtone_batch(ctx, zfs, alphas, betas, gammas)
        formula = sw_overtone_resonance(
            ctx, zfs, arrays=(alphas, betas, gammas)
        )
        return float(np.max(np.abs(exact["overtone"] - formula)))

    ctx1 = FieldContext(b0=PENTACENE.reference_field)
    ctx2 = ctx1.with_b0(2.0 * PENTACENE.reference_field)
    err1, err2 = max_error(ctx1), max_error(ctx2)
    eps1 = ctx1.epsilon(zfs)
    bound = RESONANCE_ERROR_C * eps1**3 * ctx1.omega_e
    ratio = err1 / err2
    seconds = time.perf_counter() - start
    passed = err1 <= bound and 6.0 <= ratio <= 10.0
    return CriterionResult(
        3,
        "resonance-formula-scaling",
        passed,
        "max err = %.3e rad/s (bound %.3e, C = %.2f); halved-eps error "
        "ratio = %.2f (window [6, 10])" % (err1, bound, RESONANCE_ERROR_C, ratio),
        seconds,
    )


def criterion_4():
    """Lab-frame fitted nutation vs the observable-rate formula."""
    start = time.perf_counter()
    zfs = PENTACENE.zfs
    omega_1 = zfs.omega_zfs / 20.0
    b1 = 2.0 * omega_1 / abs(GAMMA_E)
    rng = np.random.default_rng(20260304)
    chis = [math.pi / 2.0, 0.0, math.pi / 4.0]
    worst = 0.0
    tested = 0
    draws = 0
    while tested < 20:
        draws += 1
        if draws > 1000:
            raise RuntimeError("orientation filter rejected too many draws")
        o = Orientation(
            alpha=rng.uniform(0.0, 2.0 * math.pi),
            beta=math.acos(rng.uniform(-1.0, 1.0)),
            gamma=rng.uniform(0.0, 2.0 * math.pi),
        )
        chi = chis[tested % len(chis)]
        ctx = _context_for_epsilon(zfs, 0.08, b1=b1, chi=chi)
        predicted = 2.0 * analytics.overtone_nutation(ctx, zfs, o)
        # orientation filter: omega_nut above 20% of the (3/2) eps w1 scale
        if predicted <= 2.0 * 0.2 * 1.5 * ctx.epsilon(zfs) * omega_1:
            continue
        gap = exact_transitions(ctx, zfs, o).overtone
        duration = 4.0 * 2.0 * math.pi / predicted
        trace = rabi_trace(
            ctx, zfs, o, drive_freq=gap, duration=duration, frame="lab"
        )
        fitted = fit_decaying_sinusoid(trace).frequency
        worst = max(worst, abs(fitted - predicted) / predicted)
        tested += 1
    seconds = time.perf_counter() - start
    passed = worst <= 0.05 and seconds < 300.0
    return CriterionResult(
        4,
        "nutation-formula-accuracy",
        passed,
        "worst relative error over 20 filtered orientations = %.3f%% "
        "(limit 5%%), %.1f s (budget 300 s)" % (100.0 * worst, seconds),
        seconds,
    )


def criterion_5():
    """Nutation distributions: normalization, MC match, endpoints."""
    start = time.perf_counter()
    zfs = _axial_pentacene()
    omega_1 = zfs.omega_zfs / 20.0
    b1 = 2.0 * omega_1 / abs(GAMMA_E)
    bins = 400
    checks = []
    grid = powder_grid("random", 1_000_000, seed=20260305)
    for mode, chi in (("perpendicular", math.pi / 2.0), ("parallel", 0.0)):
        ctx = _context_for_epsilon(zfs, 0.08, b1=b1, chi=chi)
        q = analytics.nutation_scale(ctx, zfs)
        dist = analytics.nutation_distribution(ctx, zfs, mode=mode, n_bins=bins)
        integral_err = abs(dist.integral() - 1.0)
        hist = powder_histogram(
            ctx, zfs, grid, quantity="nutation", weight="unit", bins=bins
        )
        width = dist.bin_width
        top = 1.5 * q
        l1 = compare_spectra(
            dist, hist, [(top - 2.0 * width, top + 2.0 * width)]
        )
        checks.append((mode, integral_err, l1))
    ctx = _context_for_epsilon(zfs, 0.08, b1=b1, chi=0.0)
    q = analytics.nutation_scale(ctx, zfs)
    origin = analytics.nutation_density(0.0, q, "parallel")
    origin_err = abs(origin * 3.0 * q - 1.0)
    near_edge = analytics.nutation_density(
        1.5 * q * (1.0 - 1e-9), q, "perpendicular"
    )
    divergence_ok = near_edge > 100.0 / (3.0 * q)
    seconds = time.perf_counter() - start
    passed = (
        all(ie <= 1e-6 and l1 < 0.05 for _m, ie, l1 in checks)
        and origin_err <= 1e-9
        and divergence_ok
    )
    detail = "; ".join(
        "%s: integral err %.2g, L1 %.4f" % c for c in checks
    ) + "; I_par(0) err %.2g; edge density %.1f / (3q)" % (
        origin_err,
        near_edge * 3.0 * q,
    )
    return CriterionResult(5, "nutation-distributions", passed, detail, seconds)


def criterion_6():
    """Field-domain shift and width of the overtone line."""
    start = time.perf_counter()
    results = []
    for zfs, target_mt in ((PENTACENE.zfs, -3.5), (NV_CENTER.zfs, -15.0)):
        b_shift, b_width = analytics.shift_width(zfs, OMEGA_MW_REF)
        rel = abs(b_shift * 1e3 - target_mt) / abs(target_mt)
        ratio_err = abs(b_width / abs(b_shift) - 2.0 / 7.0)
        results.append((b_shift * 1e3, target_mt, rel, ratio_err))
    seconds = time.perf_counter() - start
    passed = all(rel <= 0.05 and ratio_err < 1e-14 for _s, _t, rel, ratio_err in results)
    detail = "; ".join(
        "shift %.3f mT vs %.1f mT (%.1f%%), width/|shift| - 2/7 = %.1e"
        % (s, t, 100.0 * rel, ratio_err)
        for s, t, rel, ratio_err in results
    )
    return CriterionResult(6, "shift-width-numbers", passed, detail, seconds)


def criterion_7():
    """Powder-averaged overtone polarization for both systems."""
    start = time.perf_counter()
    grid = powder_grid("random", 100_000, seed=20260307)
    results = []
    for preset, target in ((PENTACENE, 0.046), (NV_CENTER, 0.060)):
        ctx = FieldContext(b0=preset.reference_field)
        pops = TripletPopulations(
            basis=preset.population_basis, values=preset.populations
        )
        _pol, average = overtone_polarization_map(ctx, preset.zfs, grid, pops)
        results.append((preset.name, average, target))
    seconds = time.perf_counter() - start
    passed = (
        all(abs(abs(avg) - t) <= 0.005 for _n, avg, t in results)
        and seconds < 30.0
    )
    detail = "; ".join(
        "%s: |avg| = %.4f (signed %.4f) vs %.3f +- 0.005" % (n, abs(a), a, t)
        for n, a, t in results
    ) + "; %.1f s (budget 30 s)" % seconds
    return CriterionResult(7, "powder-polarization", passed, detail, seconds)


def criterion_8():
    """Overtone-vs-standard signal ratio estimate."""
    start = time.perf_counter()
    value = signal_ratio_estimate(7.2, 0.060 / 0.046, 0.165 / 0.080)
    seconds = time.perf_counter() - start
    passed = 18.0 <= value <= 21.0
    return CriterionResult(
        8,
        "signal-ratio-estimate",
        passed,
        "estimate = %.3f (window [18, 21])" % value,
        seconds,
    )


def _overtone_edge_field(zfs, grid, omega_mw):
    """Field where the largest exact overtone gap on the grid is resonant.

    The second-order edge (solve 2 y + omega_zfs^2 h / y = omega_mw at
    h = 3) brackets the root; the exact edge is displaced from it by
    higher orders in epsilon, which matters once the displacement
    exceeds the excitation bandwidth.
    """
    guess = (
        omega_mw + math.sqrt(omega_mw**2 - 24.0 * zfs.omega_zfs**2)
    ) / (4.0 * abs(GAMMA_E))

    def excess(b0):
        ctx = FieldContext(b0=b0, omega_mw=omega_mw)
        gaps = exact_overtone_batch(
            ctx, zfs, grid.alphas, grid.betas, grid.gammas
        )["overtone"]
        return float(gaps.max()) - omega_mw

    return brentq(
        excess, 0.93 * guess, omega_mw / (2.0 * abs(GAMMA_E)), xtol=1e-10
    )


def _powder_rate(preset, transition, omega_1, bandwidth, grid):
    """Fitted dominant rate of a selective powder nutation trace.

    The operating field sits on the low edge of the exact overtone
    line, where the resonant shell carries |f| = sqrt(2); the
    single-quantum reference runs at the nominal field
    omega_mw / |gamma|.
    """
    zfs = preset.zfs
    b1 = 2.0 * omega_1 / abs(GAMMA_E)
    if transition == "overtone":
        b0 = _overtone_edge_field(zfs, grid, OMEGA_MW_REF)
    else:
        b0 = OMEGA_MW_REF / abs(GAMMA_E)
    ctx = FieldContext(
        b0=b0, b1=b1, chi=math.pi / 2.0, omega_mw=OMEGA_MW_REF
    )
    if transition == "overtone":
        expected = 3.0 * ctx.epsilon(zfs) * omega_1
    else:
        expected = math.sqrt(2.0) * omega_1
    duration = 6.0 * 2.0 * math.pi / expected
    trace = powder_rabi_trace(
        ctx,
        zfs,
        grid,
        drive_freq=OMEGA_MW_REF,
        duration=duration,
        n_samples=1024,
        transition=transition,
        selection_bandwidth=bandwidth,
    )
    return fit_decaying_sinusoid(trace).frequency


def criterion_9():
    """Powder overtone/single-quantum rate ratio structure."""
    start = time.perf_counter()
    omega_1 = TWO_PI * 1.0e6
    bandwidth = TWO_PI * 2.0e6
    grid = powder_grid("random", 20_000, seed=20260309)
    rates = {}
    for preset in (PENTACENE, NV_CENTER):
        ov = _powder_rate(preset, "overtone", omega_1, bandwidth, grid)
        sq = _powder_rate(preset, "sq", omega_1, bandwidth, grid)
        rates[preset.name] = (ov, sq, ov / sq)
    ref = FieldContext(b0=PENTACENE.reference_field)
    eps_ratio = ref.epsilon(NV_CENTER.zfs) / ref.epsilon(PENTACENE.zfs)
    rate_ratio = rates["nv"][0] / rates["pentacene"][0]
    prop_err = abs(rate_ratio - eps_ratio) / eps_ratio
    in_window = {
        name: 0.2 <= r[2] <= 0.4 for name, r in rates.items()
    }
    seconds = time.perf_counter() - start
    passed = all(in_window.values()) and prop_err <= 0.15
    detail = "; ".join(
        "%s: overtone/sq = %.3f (window [0.2, 0.4]%s)"
        % (name, r[2], "" if in_window[name] else ", OUTSIDE")
        for name, r in rates.items()
    ) + "; nv/pentacene rate ratio %.3f vs eps ratio %.3f (%.1f%%)" % (
        rate_ratio,
        eps_ratio,
        100.0 * prop_err,
    )
    data = {
        "pentacene_ratio": rates["pentacene"][2],
        "nv_ratio": rates["nv"][2],
        "rate_ratio": rate_ratio,
        "eps_ratio": eps_ratio,
        "prop_err": prop_err,
    }
    return CriterionResult(9, "rabi-rate-ratios", passed, detail, seconds, data)


def _ise_setup():
    zfs = _axial_pentacene()
    omega_1 = TWO_PI * 5.0e6
    b1 = 2.0 * omega_1 / abs(GAMMA_E)
    o = Orientation(alpha=0.0, beta=math.pi / 4.0, gamma=0.0)
    ctx = _context_for_epsilon(zfs, 0.08, b1=b1, chi=math.pi / 2.0)
    res = sw_overtone_resonance(ctx, zfs, o)
    ctx = FieldContext(
        b0=ctx.b0, b1=ctx.b1, chi=ctx.chi, omega_mw=res
    )
    return ctx, zfs, o, omega_1


def criterion_10():
    """Property suite of the reduced ISE transfer model."""
    start = time.perf_counter()
    ctx, zfs, o, omega_1 = _ise_setup()
    gamma_abs = abs(GAMMA_E)

    def cfg(b_sweep_rad, t_mw, pol=1.0, b_pseudo=TWO_PI * 0.3e6,
            a_sec=TWO_PI * 1.0e6):
        return IseConfig(
            omega1=omega_1,
            t_mw=t_mw,
            b_sweep=b_sweep_rad / gamma_abs,
            electron_polarization=pol,
            hyperfine_secular=a_sec,
            hyperfine_pseudosecular=b_pseudo,
        )

    half_span = TWO_PI * 2.0e6
    zero_b = abs(
        ise_shot(ctx, zfs, o, cfg(half_span, 50e-6, b_pseudo=0.0),
                 center_offset=-TWO_PI * 8.5e6)
    )
    zero_pol = abs(
        ise_shot(ctx, zfs, o, cfg(half_span, 50e-6, pol=0.0),
                 center_offset=-TWO_PI * 8.5e6)
    )
    plus = ise_shot(ctx, zfs, o, cfg(half_span, 50e-6),
                    center_offset=-TWO_PI * 8.5e6)
    minus = ise_shot(ctx, zfs, o, cfg(half_span, 50e-6, pol=-1.0),
                     center_offset=-TWO_PI * 8.5e6)
    antisym = abs(plus + minus)

    # single-crossing window (detuning swept over [-20, -2] MHz): the
    # transfer magnitude must grow with sweep duration until it levels
    # off (growth below 5 percent per doubling)
    sweep_half = TWO_PI * 9.0e6
    center = -TWO_PI * 11.0e6
    mags = []
    t_mw = 20e-6
    plateau = False
    for _ in range(12):
        mags.append(
            abs(ise_shot(ctx, zfs, o, cfg(sweep_half, t_mw), center_offset=center))
        )
        if len(mags) > 1 and mags[-1] <= 1.05 * mags[-2]:
            plateau = True
            break
        t_mw *= 2.0
    monotone = all(
        mags[i + 1] >= mags[i] - 1e-9 for i in range(len(mags) - 1)
    )

    # Hartmann-Hahn scan over sweep-center offsets (one step = 1 MHz),
    # with a sweep window narrow enough (+-0.5 MHz) that only centers
    # near the matching point cross it.  The secular hyperfine term is
    # zeroed here: it offsets the nuclear frequency by +-a and would
    # shift the matching point away from the bare-omega_0n crossing
    # that this sub-check locates.
    scan_step = TWO_PI * 1.0e6
    scan_cfg = cfg(TWO_PI * 0.5e6, 80e-6, a_sec=0.0)
    centers = -TWO_PI * 1e6 * np.arange(3.0, 15.0)
    scan = [
        ise_shot(ctx, zfs, o, scan_cfg, center_offset=c) for c in centers
    ]
    peak_idx = int(np.argmax(np.abs(scan)))
    omega_nut = 2.0 * ctx.epsilon(zfs) * omega_1 * 1.5
    crossing = -math.sqrt(scan_cfg.omega_0n ** 2 - omega_nut**2)
    peak_err = abs(centers[peak_idx] - crossing)
    peak_ok = peak_err <= scan_step

    fine = ise_shot(
        ctx, zfs, o, scan_cfg,
        n_steps=40_000, center_offset=float(centers[peak_idx]),
    )
    coarse = scan[peak_idx]
    oracle_ok = abs(fine - coarse) <= 0.02 * max(abs(fine), 1e-12)

    seconds = time.perf_counter() - start
    passed = (
        zero_b < 1e-12
        and zero_pol < 1e-12
        and antisym < 1e-12
        and monotone
        and plateau
        and peak_ok
        and oracle_ok
    )
    detail = (
        "b=0 transfer %.1e; pol=0 transfer %.1e; antisymmetry %.1e; "
        "slowness |transfer| %s monotone=%s plateau=%s; HH peak at "
        "%.2f MHz vs crossing %.2f MHz (step 1 MHz); fine-step drift %.2f%%"
        % (
            zero_b,
            zero_pol,
            antisym,
            "/".join("%.4f" % m for m in mags),
            monotone,
            plateau,
            centers[peak_idx] / TWO_PI / 1e6,
            crossing / TWO_PI / 1e6,
            100.0 * abs(fine - coarse) / max(abs(fine), 1e-12),
        )
    )
    return CriterionResult(10, "ise-property-suite", passed, detail, seconds)


def criterion_11():
    """Buildup and relaxation fit recovery at experimental scale."""
    start = time.perf_counter()
    rng = np.random.default_rng(20260311)
    times = np.linspace(0.0, 600.0, 61)
    p_max, t_build = 0.00183, 137.0
    values = p_max * (1.0 - np.exp(-times / t_build))
    values = values + rng.normal(0.0, 0.01 * p_max, times.shape)
    from .spectrum import TimeTrace

    fit = fit_buildup(TimeTrace(times=times, values=values))
    ok_build = (
        abs(fit.p_max - p_max) <= 2.0 * 0.005e-2
        and abs(fit.t_build - t_build) <= 2.0 * 16.0
    )
    t1 = 240.0
    values_t1 = 0.00183 * np.exp(-times / t1)
    values_t1 = values_t1 + rng.normal(0.0, 0.01 * 0.00183, times.shape)
    fit_t1 = fit_buildup(
        TimeTrace(times=times, values=values_t1), model="decaying-exponential"
    )
    ok_t1 = abs(fit_t1.t1 - t1) <= 2.0 * 13.0
    seconds = time.perf_counter() - start
    passed = ok_build and ok_t1
    detail = (
        "buildup: p_max %.5f%% (truth 0.18300%%), t_build %.1f s "
        "(truth 137); relaxation: t1 %.1f s (truth 240)"
        % (100.0 * fit.p_max, fit.t_build, fit_t1.t1)
    )
    return CriterionResult(11, "fit-recovery", passed, detail, seconds)


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
}

SUITES = {
    "all": tuple(range(1, 12)),
    "lineshape": (1, 2),
    "resonance": (3,),
    "nutation": (4, 5),
    "reference-numbers": (6, 7, 8, 9),
    "ise": (10,),
    "fit": (11,),
}


def run_suite(suite="all"):
    """Run a named criterion group; returns a list of CriterionResult."""
    if suite not in SUITES:
        raise ValueError(
            "unknown suite %r; choose from %s" % (suite, sorted(SUITES))
        )
    return [CRITERIA[n]() for n in SUITES[suite]]


def report_dict(results):
    """JSON-ready summary of a validation run."""
    return {
        "criteria": [
            {
                "number": r.number,
                "name": r.name,
                "passed": r.passed,
                "detail": r.detail,
                "seconds": round(r.seconds, 3),
            }
            for r in results
        ],
        "passed": all(r.passed for r in results),
    }
