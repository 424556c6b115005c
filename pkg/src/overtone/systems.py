"""Built-in spin systems used throughout the package and the CLI."""

from dataclasses import dataclass

from .orientation import ZfsTensor
from .units import mhz


@dataclass(frozen=True)
class SystemPreset:
    """A named triplet system with its ZFS tensor and initial populations.

    ``populations`` are ordered (P_x, P_y, P_z) for the 'zero-field'
    basis and (p_0, p_+1, p_-1) for the 'ms' basis, where the ms values
    refer to the molecular (PAS) quantization axis.
    ``reference_field`` (tesla) is the static field at which the
    overtone line of the system is observed with an 11.6 GHz drive.
    """

    name: str
    zfs: ZfsTensor
    populations: tuple
    population_basis: str
    reference_field: float


PENTACENE = SystemPreset(
    name="pentacene",
    zfs=ZfsTensor(d=mhz(1395.57), e=mhz(53.35)),
    populations=(0.76, 0.16, 0.08),
    population_basis="zero-field",
    reference_field=0.207,
)

NV_CENTER = SystemPreset(
    name="nv",
    zfs=ZfsTensor(d=mhz(2870.0), e=0.0),
    populations=(0.48, 0.26, 0.26),
    population_basis="ms",
    reference_field=0.196,
)

_PRESETS = {p.name: p for p in (PENTACENE, NV_CENTER)}


def get_system(name):
    try:
        return _PRESETS[name]
    except KeyError:
        raise ValueError(
            "unknown system %r (available: %s)"
            % (name, ", ".join(sorted(_PRESETS)))
        ) from None


def system_names():
    return sorted(_PRESETS)
