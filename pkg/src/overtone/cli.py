"""Command line interface.

Every subcommand converts lab units (GHz, MHz, mT, T, microseconds,
degrees) to SI angular quantities at this boundary, runs the library,
and writes one artifact (csv, json, or svg).  Exit codes: 0 success,
2 usage or configuration error, 3 numerical guard tripped, 4 validation
suite failure.
"""

import argparse
import math
import sys

import numpy as np

from . import analytics, figures, io
from .experiment import (
    IseConfig,
    TripletPopulations,
    echo_field_sweep,
    fit_buildup,
    ise_buildup,
    ise_shot,
    overtone_polarization_map,
)
from .hamiltonian import (
    FieldContext,
    PerturbationRegimeError,
    sw_overtone_resonance,
)
from .oracle import (
    NoOscillationError,
    exact_transitions,
    fit_decaying_sinusoid,
    powder_histogram,
    powder_rabi_trace,
    rabi_trace,
)
from .orientation import Orientation, ZfsTensor, powder_grid
from .spincore import (
    DegenerateLabelingError,
    HermiticityError,
    UnderResolvedError,
)
from .spectrum import Spectrum, TimeTrace, gaussian_smooth, uniform_axis
from .systems import get_system, system_names
from .units import GAMMA_E, TWO_PI
from .validate import SUITES, report_dict, run_suite

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICS = 3
EXIT_VALIDATION = 4

#: exceptions that mean "a numerical guard tripped", not "bad input";
#: several subclass ValueError, so they must be caught first
GUARD_ERRORS = (
    PerturbationRegimeError,
    UnderResolvedError,
    DegenerateLabelingError,
    NoOscillationError,
    HermiticityError,
)

MHZ = TWO_PI * 1e6  # rad/s per MHz
GHZ = TWO_PI * 1e9  # rad/s per GHz


def _zfs(args):
    """(ZfsTensor, preset or None) from the system flags."""
    if args.system == "custom":
        if args.d_mhz is None:
            raise ValueError("--system custom requires --d-mhz")
        return ZfsTensor(d=args.d_mhz * MHZ, e=args.e_mhz * MHZ), None
    preset = get_system(args.system)
    return preset.zfs, preset


def _b0(args, preset):
    if args.b0 is not None:
        return args.b0
    if preset is not None:
        return preset.reference_field
    raise ValueError("--b0 (tesla) is required for custom systems")


def _b1(args):
    if args.b1 is None or args.b1 <= 0.0:
        raise ValueError("--b1 (mT) must be positive for this subcommand")
    return args.b1 * 1e-3


def _orientation(args):
    return Orientation(
        alpha=math.radians(args.alpha),
        beta=math.radians(args.beta),
        gamma=math.radians(args.gamma),
    )


def _populations(args, preset):
    if args.pops is not None:
        values = tuple(float(x) for x in args.pops.split(","))
        return TripletPopulations(basis=args.pops_basis, values=values)
    if preset is not None:
        return TripletPopulations(
            basis=preset.population_basis, values=preset.populations
        )
    raise ValueError("custom systems need --pops P1,P2,P3")


def _sigma_si(args, obj):
    """Export smoothing width converted from the axis lab unit."""
    sigma = getattr(args, "smooth_sigma", 0.0) or 0.0
    if sigma <= 0.0 or not isinstance(obj, Spectrum):
        return 0.0
    if obj.axis_kind == "field":
        return sigma * 1e-3
    if obj.axis_kind == "angle":
        return math.radians(sigma)
    return sigma * MHZ


def _out_path(args):
    return args.out if args.out else "%s.%s" % (args.command, args.format)


def _emit(obj, args, title=""):
    path = _out_path(args)
    sigma = _sigma_si(args, obj)
    if args.format == "svg":
        figures.render(obj, path, title=title, smooth_sigma=sigma)
    elif args.format == "json":
        if sigma > 0.0:
            obj = gaussian_smooth(obj, sigma)
        io.write_json(obj, path)
    else:
        io.write_csv(obj, path, smooth_sigma=sigma)
    print("wrote %s" % path)
    return EXIT_OK


def _emit_scalar(payload, args):
    path = _out_path(args)
    if args.format == "svg":
        raise ValueError(
            "svg output needs a spectrum or time trace; use csv or json"
        )
    if args.format == "json":
        io.write_json(payload, path)
    else:
        with open(path, "w") as fh:
            fh.write("key,value\n")
            for key in sorted(payload):
                value = payload[key]
                if isinstance(value, float):
                    value = io.FLOAT_FORMAT % value
                fh.write("%s,%s\n" % (key, value))
    print("wrote %s" % path)
    return EXIT_OK


def _cmd_spectrum(args):
    zfs, preset = _zfs(args)
    ctx = FieldContext(b0=_b0(args, preset))
    spec = analytics.lineshape_frequency(ctx, zfs, n_bins=args.bins)
    return _emit(spec, args, "overtone lineshape")


def _cmd_field_profile(args):
    zfs, _preset = _zfs(args)
    spec = analytics.field_profile(
        zfs, args.mw_freq * GHZ, n_bins=args.bins, jacobian=not args.raw
    )
    b_shift, b_width = analytics.shift_width(zfs, args.mw_freq * GHZ)
    print(
        "centroid shift %.4f mT, width %.4f mT" % (b_shift * 1e3, b_width * 1e3)
    )
    return _emit(spec, args, "overtone field profile")


def _cmd_nutation_dist(args):
    zfs, preset = _zfs(args)
    ctx = FieldContext(b0=_b0(args, preset), b1=_b1(args))
    spec = analytics.nutation_distribution(
        ctx, zfs, mode=args.mode, n_bins=args.bins
    )
    return _emit(spec, args, "%s nutation distribution" % args.mode)


def _cmd_rabi(args):
    zfs, preset = _zfs(args)
    ctx = FieldContext(
        b0=_b0(args, preset), b1=_b1(args), chi=math.radians(args.chi)
    )
    if args.duration is None or args.duration <= 0.0:
        raise ValueError("--duration (microseconds) must be positive")
    duration = args.duration * 1e-6
    if args.powder:
        grid = powder_grid(args.scheme, args.n_orient, seed=args.seed)
        factor = 2.0 if args.transition == "overtone" else 1.0
        drive = (
            args.drive_freq * GHZ
            if args.drive_freq is not None
            else factor * ctx.omega_e
        )
        bandwidth = (
            args.bandwidth * MHZ if args.bandwidth is not None else None
        )
        trace = powder_rabi_trace(
            ctx,
            zfs,
            grid,
            drive_freq=drive,
            duration=duration,
            n_samples=args.samples,
            transition=args.transition,
            selection_bandwidth=bandwidth,
        )
        title = "powder %s nutation" % args.transition
    else:
        o = _orientation(args)
        drive = (
            args.drive_freq * GHZ
            if args.drive_freq is not None
            else exact_transitions(ctx, zfs, o).overtone
        )
        trace = rabi_trace(
            ctx,
            zfs,
            o,
            drive_freq=drive,
            duration=duration,
            frame=args.frame,
            n_samples=args.samples,
        )
        title = "single-orientation nutation (%s frame)" % args.frame
    return _emit(trace, args, title)


def _cmd_powder(args):
    zfs, preset = _zfs(args)
    b1 = (args.b1 or 0.0) * 1e-3
    if args.quantity == "nutation" and b1 <= 0.0:
        raise ValueError("--b1 (mT) is needed for nutation histograms")
    ctx = FieldContext(
        b0=_b0(args, preset), b1=b1, chi=math.radians(args.chi)
    )
    grid = powder_grid(args.scheme, args.n_orient, seed=args.seed)
    pops = (
        _populations(args, preset) if args.weight == "moment2xpol" else None
    )
    spec = powder_histogram(
        ctx,
        zfs,
        grid,
        quantity=args.quantity,
        weight=args.weight,
        bins=args.bins,
        pops=pops,
    )
    return _emit(spec, args, "powder %s histogram" % args.quantity)


def _cmd_polarization(args):
    zfs, preset = _zfs(args)
    pops = _populations(args, preset)
    b0 = _b0(args, preset)
    grid = powder_grid(args.scheme, args.n_orient, seed=args.seed)
    if args.report == "average":
        ctx = FieldContext(b0=b0)
        _pol, average = overtone_polarization_map(ctx, zfs, grid, pops)
        print("powder average overtone polarization = %.6f" % average)
        return _emit_scalar(
            {
                "abs_average": abs(average),
                "average": average,
                "b0_t": b0,
                "n_orientations": grid.n,
                "system": args.system,
            },
            args,
        )
    if args.mw_freq is None:
        raise ValueError("--mw-freq (GHz) is required for --report sweep")
    omega_mw = args.mw_freq * GHZ
    ctx = FieldContext(b0=b0, omega_mw=omega_mw)
    if args.b_from is None or args.b_to is None:
        lo, hi = analytics.field_profile_support(zfs, omega_mw)
        b_lo = lo - 5e-3 if args.b_from is None else args.b_from * 1e-3
        b_hi = hi + 5e-3 if args.b_to is None else args.b_to * 1e-3
    else:
        b_lo, b_hi = args.b_from * 1e-3, args.b_to * 1e-3
    if b_hi <= b_lo:
        raise ValueError("field sweep range is empty")
    b_axis = uniform_axis(b_lo, b_hi, args.b_points)
    spec = echo_field_sweep(
        ctx,
        zfs,
        grid,
        pops,
        b_axis,
        args.bandwidth * MHZ,
        transitions=args.transitions,
        resonance_model=args.resonance_model,
    )
    return _emit(spec, args, "echo-detected field sweep")


def _cmd_ise(args):
    zfs, preset = _zfs(args)
    o = _orientation(args)
    omega1 = args.omega1 * MHZ
    ctx0 = FieldContext(
        b0=_b0(args, preset),
        b1=2.0 * omega1 / abs(GAMMA_E),
        chi=math.radians(args.chi),
    )
    omega_mw = (
        args.mw_freq * GHZ
        if args.mw_freq is not None
        else sw_overtone_resonance(ctx0, zfs, o)
    )
    ctx = FieldContext(
        b0=ctx0.b0, b1=ctx0.b1, chi=ctx0.chi, omega_mw=omega_mw
    )
    cfg = IseConfig(
        omega1=omega1,
        t_mw=args.t_mw * 1e-6,
        b_sweep=args.sweep_mt * 1e-3,
        omega_0n=args.nuclear_mhz * MHZ,
        hyperfine_secular=args.a_mhz * MHZ,
        hyperfine_pseudosecular=args.b_mhz * MHZ,
        electron_polarization=args.polarization,
        rep_rate=args.rep_rate,
        rep_count=args.shots,
    )
    if args.mode == "shot":
        transfer = ise_shot(
            ctx, zfs, o, cfg,
            n_steps=args.steps,
            center_offset=args.center_offset * MHZ,
        )
        print("polarization transfer per shot = %.6e" % transfer)
        return _emit_scalar(
            {
                "center_offset_mhz": args.center_offset,
                "mw_freq_ghz": omega_mw / GHZ,
                "transfer": transfer,
            },
            args,
        )
    if args.mode == "scan":
        offsets = uniform_axis(
            args.scan_from * MHZ, args.scan_to * MHZ, args.scan_points
        )
        transfers = np.array(
            [
                ise_shot(
                    ctx, zfs, o, cfg,
                    n_steps=args.steps,
                    center_offset=float(c),
                )
                for c in offsets
            ]
        )
        spec = Spectrum(
            axis=offsets,
            intensity=transfers,
            axis_kind="offset",
            normalized=False,
            allow_negative=True,
            meta={"mode": "ise-scan", "mw_freq_ghz": omega_mw / GHZ},
        )
        return _emit(spec, args, "ISE sweep-center scan")
    transfer = (
        args.shot_transfer
        if args.shot_transfer is not None
        else ise_shot(
            ctx, zfs, o, cfg,
            n_steps=args.steps,
            center_offset=args.center_offset * MHZ,
        )
    )
    trace = ise_buildup(cfg, transfer, args.leakage)
    return _emit(trace, args, "ISE buildup")


def _cmd_fit(args):
    columns, axis, values, meta = io.read_csv(args.input)
    if columns[0] != "time_us":
        raise ValueError(
            "fit expects a time-trace CSV (first column time_us), got %r"
            % columns[0]
        )
    trace = TimeTrace(
        times=np.asarray(axis) * 1e-6, values=np.asarray(values), meta=meta
    )
    if args.model == "sinusoid":
        fit = fit_decaying_sinusoid(trace)
        payload = {
            "amplitude": fit.amplitude,
            "decay_per_us": fit.decay * 1e-6,
            "frequency_mhz": fit.frequency / MHZ,
            "model": "decaying-sinusoid",
            "offset": fit.offset,
            "phase_rad": fit.phase,
            "residual_norm": fit.residual_norm,
            "seed_agreement": fit.seed_agreement,
            "seed_frequency_mhz": fit.seed_frequency / MHZ,
        }
        print("fitted frequency = %.6f MHz" % payload["frequency_mhz"])
    else:
        model = (
            "saturating-exponential"
            if args.model == "buildup"
            else "decaying-exponential"
        )
        fit = fit_buildup(trace, model=model)
        payload = {
            "model": model,
            "p_max": fit.p_max,
            "p_max_err": fit.p_max_err,
            "residual_norm": fit.residual_norm,
            "t1_s": fit.t1,
            "t_build_s": fit.t_build,
            "time_err_s": fit.time_err,
            "unidentifiable": fit.unidentifiable,
        }
        time_name = "t_build_s" if args.model == "buildup" else "t1_s"
        print(
            "fitted %s = %s, p_max = %.6g%s"
            % (
                time_name,
                payload[time_name],
                fit.p_max,
                " (unidentifiable)" if fit.unidentifiable else "",
            )
        )
    payload = {k: v for k, v in payload.items() if v is not None}
    return _emit_scalar(payload, args)


def _cmd_validate(args):
    results = run_suite(args.suite)
    for r in results:
        print(
            "%s  criterion %2d  %-26s  %s"
            % ("PASS" if r.passed else "FAIL", r.number, r.name, r.detail)
        )
    if args.out:
        io.write_json(report_dict(results), args.out)
        print("wrote %s" % args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


_HANDLERS = {
    "spectrum": _cmd_spectrum,
    "field-profile": _cmd_field_profile,
    "nutation-dist": _cmd_nutation_dist,
    "rabi": _cmd_rabi,
    "powder": _cmd_powder,
    "polarization": _cmd_polarization,
    "ise": _cmd_ise,
    "fit": _cmd_fit,
    "validate": _cmd_validate,
}


def _add_system_args(p):
    p.add_argument(
        "--system",
        choices=list(system_names()) + ["custom"],
        default="pentacene",
        help="spin system preset, or 'custom' with --d-mhz/--e-mhz",
    )
    p.add_argument(
        "--d-mhz", type=float, default=None, help="custom ZFS D/2pi in MHz"
    )
    p.add_argument(
        "--e-mhz", type=float, default=0.0, help="custom ZFS E/2pi in MHz"
    )
    p.add_argument(
        "--b0", type=float, default=None,
        help="static field in tesla (default: the preset reference field)",
    )


def _add_orientation_args(p):
    p.add_argument("--alpha", type=float, default=0.0, help="Euler alpha, degrees")
    p.add_argument("--beta", type=float, default=45.0, help="Euler beta, degrees")
    p.add_argument("--gamma", type=float, default=0.0, help="Euler gamma, degrees")


def _add_powder_args(p, n_default):
    p.add_argument(
        "--n-orient", type=int, default=n_default,
        help="orientation count (default %d)" % n_default,
    )
    p.add_argument(
        "--scheme", choices=["random", "gauss-legendre"], default="random",
        help="orientation sampling scheme",
    )
    p.add_argument("--seed", type=int, default=2026, help="sampling seed")


def _add_output_args(p):
    p.add_argument(
        "--out", default=None,
        help="output path (default <subcommand>.<format>)",
    )
    p.add_argument(
        "--format", choices=["csv", "json", "svg"], default="csv",
        help="output format",
    )
    p.add_argument(
        "--smooth-sigma", type=float, default=0.0,
        help="export-only Gaussian smoothing width in the axis lab unit "
        "(MHz for frequency or rate axes, mT for field axes)",
    )


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config", default=None,
        help="flat key = value file supplying defaults; explicit flags win",
    )
    parser = argparse.ArgumentParser(
        prog="overtone",
        description="Overtone transitions of spin-1 systems: closed forms, "
        "oracles, and experiment models.",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    registry = {}

    def sub(name, help_text):
        p = subs.add_parser(name, help=help_text, parents=[common])
        registry[name] = p
        return p

    p = sub("spectrum", "closed-form overtone lineshape vs frequency")
    _add_system_args(p)
    p.add_argument("--bins", type=int, default=400)
    _add_output_args(p)

    p = sub("field-profile", "overtone line vs static field at fixed drive")
    _add_system_args(p)
    p.add_argument(
        "--mw-freq", type=float, default=11.6,
        help="microwave frequency in GHz",
    )
    p.add_argument("--bins", type=int, default=400)
    p.add_argument(
        "--raw", action="store_true",
        help="omit the frequency-to-field Jacobian (pointwise density)",
    )
    _add_output_args(p)

    p = sub("nutation-dist", "closed-form powder nutation-rate distribution")
    _add_system_args(p)
    p.add_argument("--b1", type=float, default=None, help="drive field in mT")
    p.add_argument(
        "--mode", choices=["parallel", "perpendicular"],
        default="perpendicular", help="drive geometry",
    )
    p.add_argument("--bins", type=int, default=400)
    _add_output_args(p)

    p = sub("rabi", "time-domain nutation trace (single orientation or powder)")
    _add_system_args(p)
    _add_orientation_args(p)
    p.add_argument("--b1", type=float, default=None, help="drive field in mT")
    p.add_argument(
        "--chi", type=float, default=90.0,
        help="drive polar angle from z in degrees",
    )
    p.add_argument(
        "--duration", type=float, default=None, help="trace length in microseconds"
    )
    p.add_argument(
        "--drive-freq", type=float, default=None,
        help="drive frequency in GHz (default: the exact overtone gap, "
        "or 2 omega_e for powder mode)",
    )
    p.add_argument("--samples", type=int, default=256)
    p.add_argument(
        "--frame", choices=["lab", "rotating"], default="lab",
        help="full cosine-drive propagation or rotating-frame closed form",
    )
    p.add_argument(
        "--powder", action="store_true",
        help="powder-averaged rotating-frame trace instead of one orientation",
    )
    p.add_argument(
        "--transition", choices=["overtone", "sq"], default="overtone",
        help="transition driven in powder mode",
    )
    p.add_argument(
        "--bandwidth", type=float, default=None,
        help="Gaussian excitation bandwidth in MHz (powder mode)",
    )
    _add_powder_args(p, 20000)
    _add_output_args(p)

    p = sub("powder", "deterministic powder histogram of resonance or nutation")
    _add_system_args(p)
    p.add_argument("--b1", type=float, default=None, help="drive field in mT")
    p.add_argument(
        "--chi", type=float, default=90.0,
        help="drive polar angle from z in degrees",
    )
    p.add_argument(
        "--quantity",
        choices=["resonance", "resonance-exact", "nutation"],
        default="resonance",
    )
    p.add_argument(
        "--weight", choices=["unit", "moment2", "moment2xpol"], default="unit",
        help="histogram weight: powder measure, times squared drive "
        "moment, or additionally times transition polarization",
    )
    p.add_argument(
        "--pops", default=None,
        help="sublevel populations P1,P2,P3 (default: preset populations)",
    )
    p.add_argument(
        "--pops-basis", choices=["zero-field", "ms"], default="zero-field",
        help="basis of --pops values",
    )
    p.add_argument("--bins", type=int, default=400)
    _add_powder_args(p, 200000)
    _add_output_args(p)

    p = sub("polarization", "overtone polarization: powder average or field sweep")
    _add_system_args(p)
    p.add_argument(
        "--report", choices=["average", "sweep"], default="average",
        help="single powder-average number or an echo-detected field sweep",
    )
    p.add_argument(
        "--pops", default=None,
        help="sublevel populations P1,P2,P3 (default: preset populations)",
    )
    p.add_argument(
        "--pops-basis", choices=["zero-field", "ms"], default="zero-field",
        help="basis of --pops values",
    )
    p.add_argument(
        "--mw-freq", type=float, default=None,
        help="microwave frequency in GHz (sweep mode)",
    )
    p.add_argument(
        "--bandwidth", type=float, default=5.0,
        help="excitation bandwidth in MHz (sweep mode)",
    )
    p.add_argument(
        "--b-from", type=float, default=None,
        help="sweep start in mT (default: just below the line support)",
    )
    p.add_argument(
        "--b-to", type=float, default=None,
        help="sweep end in mT (default: just above the line support)",
    )
    p.add_argument("--b-points", type=int, default=81)
    p.add_argument(
        "--transitions", choices=["all", "overtone", "sq"], default="all",
        help="transition family included in the sweep",
    )
    p.add_argument(
        "--resonance-model", choices=["formula", "exact"], default="formula",
        help="resonance positions from first-order formulas or exact gaps",
    )
    _add_powder_args(p, 20000)
    _add_output_args(p)

    p = sub("ise", "integrated solid effect: shot, matching scan, or buildup")
    _add_system_args(p)
    _add_orientation_args(p)
    p.add_argument(
        "--mode", choices=["shot", "scan", "buildup"], default="shot"
    )
    p.add_argument(
        "--chi", type=float, default=90.0,
        help="drive polar angle from z in degrees",
    )
    p.add_argument(
        "--omega1", type=float, default=5.0,
        help="drive amplitude omega_1/2pi in MHz",
    )
    p.add_argument(
        "--t-mw", type=float, default=50.0, help="sweep duration in microseconds"
    )
    p.add_argument(
        "--sweep-mt", type=float, default=0.3,
        help="total field sweep width in mT",
    )
    p.add_argument(
        "--mw-freq", type=float, default=None,
        help="microwave frequency in GHz (default: the orientation's "
        "second-order overtone resonance)",
    )
    p.add_argument(
        "--center-offset", type=float, default=0.0,
        help="sweep-center detuning offset in MHz",
    )
    p.add_argument(
        "--nuclear-mhz", type=float, default=8.74,
        help="nuclear Larmor frequency in MHz",
    )
    p.add_argument(
        "--a-mhz", type=float, default=1.0,
        help="secular hyperfine coupling in MHz",
    )
    p.add_argument(
        "--b-mhz", type=float, default=0.3,
        help="pseudosecular hyperfine coupling in MHz",
    )
    p.add_argument(
        "--polarization", type=float, default=1.0,
        help="initial electron polarization in [-1, 1]",
    )
    p.add_argument("--steps", type=int, default=4000, help="propagation steps")
    p.add_argument(
        "--scan-from", type=float, default=-14.0,
        help="scan start offset in MHz (scan mode)",
    )
    p.add_argument(
        "--scan-to", type=float, default=-3.0,
        help="scan end offset in MHz (scan mode)",
    )
    p.add_argument("--scan-points", type=int, default=12)
    p.add_argument(
        "--shots", type=int, default=1000,
        help="repetition count (buildup mode)",
    )
    p.add_argument(
        "--rep-rate", type=float, default=50.0,
        help="repetition rate in Hz (buildup mode)",
    )
    p.add_argument(
        "--shot-transfer", type=float, default=None,
        help="per-shot transfer override (default: computed shot)",
    )
    p.add_argument(
        "--leakage", type=float, default=0.005,
        help="per-shot nuclear polarization loss fraction (buildup mode)",
    )
    _add_output_args(p)

    p = sub("fit", "fit an exported time-trace CSV")
    p.add_argument("--input", required=True, help="CSV written by this tool")
    p.add_argument(
        "--model", choices=["sinusoid", "buildup", "t1"], default="sinusoid",
        help="decaying sinusoid, saturating buildup, or decaying exponential",
    )
    _add_output_args(p)

    p = sub("validate", "run the built-in validation suite")
    p.add_argument(
        "--suite", choices=sorted(SUITES), default="all",
        help="criterion group to run",
    )
    p.add_argument("--out", default=None, help="optional JSON report path")

    return parser, registry


def _apply_config(sub, overrides):
    """Install config values as subcommand defaults, validated and typed."""
    actions = {
        a.dest: a
        for a in sub._actions
        if a.dest not in ("help", "config")
    }
    for key in sorted(overrides):
        dest = key.replace("-", "_")
        if dest not in actions:
            raise ValueError("unknown config key %r for this subcommand" % key)
        action = actions[dest]
        value = overrides[key]
        if action.const is True:  # store_true flag
            if not isinstance(value, bool):
                raise ValueError("config key %r expects true/false" % key)
        elif action.type is not None and not isinstance(value, bool):
            value = action.type(str(value))
        elif isinstance(value, bool):
            raise ValueError("config key %r does not take a boolean" % key)
        if action.choices is not None and value not in action.choices:
            raise ValueError(
                "config key %r must be one of %s" % (key, list(action.choices))
            )
        sub.set_defaults(**{dest: value})


def main(argv=None):
    parser, registry = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        try:
            overrides = io.read_config(args.config)
            parser, registry = _build_parser()
            _apply_config(registry[args.command], overrides)
        except (OSError, ValueError) as exc:
            print("config error: %s" % exc, file=sys.stderr)
            return EXIT_USAGE
        args = parser.parse_args(argv)
    handler = _HANDLERS.get(args.command)
    if handler is None:
        parser.error("unknown subcommand %r" % args.command)
    try:
        return handler(args)
    except GUARD_ERRORS as exc:
        print("numerical guard: %s" % exc, file=sys.stderr)
        return EXIT_NUMERICS
    except (ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
