"""Overtone (double-quantum) transitions of spin-1 electron systems.

Closed-form resonance, nutation, and lineshape results with exact
numerical oracles, plus echo, polarization, and polarization-transfer
experiment models and a CLI.

The environment variable OVERTONE_THREADS, when set, caps the BLAS
thread count; it must be read before numpy is first imported, which is
why this block sits above the submodule imports.
"""

import os as _os

_threads = _os.environ.get("OVERTONE_THREADS")
if _threads:
    for _var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        _os.environ.setdefault(_var, _threads)

from .analytics import (
    field_profile,
    field_profile_support,
    lineshape_density,
    lineshape_frequency,
    lineshape_singularities,
    lineshape_support,
    nutation_density,
    nutation_distribution,
    nutation_scale,
    nutation_support,
    overtone_nutation,
    overtone_rabi_frequency,
    overtone_resonance,
    shift_width,
)
from .experiment import (
    BuildupFit,
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
from .hamiltonian import (
    FieldContext,
    PerturbationRegimeError,
    rotating_frame_hamiltonian,
    static_hamiltonian,
    sw_generator,
    sw_overtone_resonance,
    sw_static,
)
from .oracle import (
    FitResult,
    NoOscillationError,
    TransitionSet,
    compare_spectra,
    exact_overtone_batch,
    exact_transitions,
    fit_decaying_sinusoid,
    powder_histogram,
    powder_rabi_trace,
    rabi_trace,
    sq_resonance_field,
)
from .orientation import (
    FghValues,
    Orientation,
    PowderGrid,
    ZfsTensor,
    epsilon,
    fgh,
    powder_grid,
)
from .spectrum import Spectrum, TimeTrace, gaussian_smooth, uniform_axis
from .spincore import (
    DegenerateLabelingError,
    HermiticityError,
    UnderResolvedError,
)
from .systems import NV_CENTER, PENTACENE, get_system, system_names
from .units import GAMMA_E, TWO_PI

__version__ = "1.0.0"
