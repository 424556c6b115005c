"""Delimited export, JSON export, and flat key=value config parsing.

CSV files carry `#`-prefixed metadata lines (sorted by key), a column
header, then data rows printed with %.15g so reruns are byte-identical.
CSV axes are converted to laboratory units at this boundary (MHz for
frequencies and rates, mT for fields, microseconds for times); when a
spectrum is a normalized density its intensity is rescaled to stay a
density per lab unit.  JSON mirrors the in-memory data model (SI
units).  SVG rendering is delegated to :mod:`overtone.figures`.
"""

import dataclasses
import json
import math

import numpy as np

from .spectrum import Spectrum, TimeTrace, gaussian_smooth

FLOAT_FORMAT = "%.15g"

#: axis_kind -> (column name, lab-unit scale factor applied to the axis)
_AXIS_COLUMNS = {
    "frequency": ("frequency_mhz", 1.0 / (2.0 * math.pi * 1e6)),
    "rate": ("rate_mhz", 1.0 / (2.0 * math.pi * 1e6)),
    "field": ("field_mt", 1e3),
    "offset": ("offset_mhz", 1.0 / (2.0 * math.pi * 1e6)),
    "angle": ("beta_deg", 180.0 / math.pi),
}


def _format(value):
    if isinstance(value, float):
        return FLOAT_FORMAT % value
    return str(value)


def _meta_lines(meta):
    lines = []
    for key in sorted(meta):
        lines.append("# %s = %s" % (key, _format(meta[key])))
    return lines


def spectrum_to_rows(spectrum):
    """Lab-unit (column names, axis, intensity) for CSV export."""
    name, scale = _AXIS_COLUMNS.get(spectrum.axis_kind, (spectrum.axis_kind, 1.0))
    axis = spectrum.axis * scale
    intensity = spectrum.intensity
    if spectrum.normalized:
        intensity = intensity / scale
    return (name, "intensity"), axis, intensity


def write_csv(obj, path, smooth_sigma=0.0):
    """Write a Spectrum or TimeTrace as metadata-commented CSV."""
    if isinstance(obj, Spectrum):
        if smooth_sigma > 0.0:
            obj = gaussian_smooth(obj, smooth_sigma)
        meta = dict(obj.meta)
        meta["axis_kind"] = obj.axis_kind
        meta["normalized"] = obj.normalized
        columns, axis, values = spectrum_to_rows(obj)
    elif isinstance(obj, TimeTrace):
        meta = dict(obj.meta)
        columns = ("time_us", "value")
        axis, values = obj.times * 1e6, obj.values
    else:
        raise TypeError("write_csv handles Spectrum and TimeTrace")
    lines = _meta_lines(meta)
    lines.append(",".join(columns))
    for x, y in zip(axis, values):
        lines.append(FLOAT_FORMAT % x + "," + FLOAT_FORMAT % y)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path):
    """Parse a file written by write_csv.

    Returns (columns, axis, values, meta) with axis and values exactly
    as printed (lab units).
    """
    meta = {}
    columns = None
    axis, values = [], []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, val = body.partition("=")
                    meta[key.strip()] = _parse_typed(val.strip())
                continue
            if columns is None:
                columns = tuple(line.split(","))
                continue
            parts = line.split(",")
            axis.append(float(parts[0]))
            values.append(float(parts[1]))
    if columns is None:
        raise ValueError("%s: no column header found" % path)
    return columns, np.array(axis), np.array(values), meta


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_json(obj, path):
    """Write a data-model object (or plain dict) as sorted JSON."""
    if isinstance(obj, (Spectrum, TimeTrace)):
        payload = obj.as_dict()
    elif dataclasses.is_dataclass(obj):
        payload = dataclasses.asdict(obj)
    elif isinstance(obj, dict):
        payload = obj
    else:
        raise TypeError("cannot serialize %r" % type(obj))
    with open(path, "w") as fh:
        json.dump(_jsonable(payload), fh, sort_keys=True, indent=2)
        fh.write("\n")


def _parse_typed(text):
    """Typed value parsing for config files: bool, int, float, string."""
    lowered = text.lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def read_config(path):
    """Parse a flat key = value config file into a typed dict.

    Grammar: one `key = value` per line; keys are [a-z0-9_-]; blank
    lines and lines starting with `#` are ignored.  Values are typed as
    bool (true/false/yes/no/on/off), int, float, or string, tried in
    that order.  Duplicate keys are an error.
    """
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(
                    "%s:%d: expected 'key = value', got %r" % (path, lineno, line)
                )
            key, _, value = line.partition("=")
            key = key.strip()
            if not key or not all(
                c.isalnum() or c in "_-" for c in key
            ) or key != key.lower():
                raise ValueError("%s:%d: bad key %r" % (path, lineno, key))
            if key in out:
                raise ValueError("%s:%d: duplicate key %r" % (path, lineno, key))
            out[key] = _parse_typed(value.strip())
    return out
