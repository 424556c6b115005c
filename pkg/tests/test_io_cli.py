"""Serialization boundary and command-line exit behavior."""

import json
import math

import numpy as np
import pytest

import overtone
from overtone import io as oio
from overtone.cli import main
from overtone.spectrum import Spectrum, TimeTrace, uniform_axis
from overtone.units import TWO_PI

MHZ = TWO_PI * 1e6  # rad/s per MHz


def test_version_exported():
    assert isinstance(overtone.__version__, str)
    assert overtone.__version__


def test_read_config_typed_values(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# comment line\n"
        "bins = 123\n"
        "b1 = 0.5\n"
        "raw = true\n"
        "scheme = gauss-legendre\n"
    )
    assert oio.read_config(path) == {
        "bins": 123,
        "b1": 0.5,
        "raw": True,
        "scheme": "gauss-legendre",
    }


def test_read_config_rejects_malformed(tmp_path):
    dup = tmp_path / "dup.cfg"
    dup.write_text("bins = 2\nbins = 3\n")
    with pytest.raises(ValueError):
        oio.read_config(dup)
    badkey = tmp_path / "key.cfg"
    badkey.write_text("BINS = 2\n")
    with pytest.raises(ValueError):
        oio.read_config(badkey)
    noeq = tmp_path / "eq.cfg"
    noeq.write_text("bins 2\n")
    with pytest.raises(ValueError):
        oio.read_config(noeq)


def _toy_spectrum():
    axis = uniform_axis(MHZ * 10.0, MHZ * 20.0, 25)
    width = axis[1] - axis[0]
    intensity = np.full(25, 1.0 / (25.0 * width))
    return Spectrum(
        axis=axis,
        intensity=intensity,
        axis_kind="frequency",
        meta={"alpha": 1.5, "label": "toy", "flag": True, "count": 7},
    )


def test_csv_round_trip_scales_to_lab_units(tmp_path):
    spec = _toy_spectrum()
    path = tmp_path / "spec.csv"
    oio.write_csv(spec, path)
    columns, axis, values, meta = oio.read_csv(path)
    assert columns == ("frequency_mhz", "intensity")
    np.testing.assert_allclose(axis, spec.axis / MHZ, rtol=1e-12)
    # density rescaled so it still integrates to 1 over the MHz axis
    np.testing.assert_allclose(values, spec.intensity * MHZ, rtol=1e-12)
    assert abs(math.fsum(values) * (axis[1] - axis[0]) - 1.0) < 1e-9
    assert meta["alpha"] == 1.5
    assert meta["label"] == "toy"
    assert meta["flag"] is True
    assert meta["count"] == 7
    assert meta["axis_kind"] == "frequency"
    assert meta["normalized"] is True


def test_csv_rerun_is_byte_identical(tmp_path):
    spec = _toy_spectrum()
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    oio.write_csv(spec, a)
    oio.write_csv(spec, b)
    assert a.read_bytes() == b.read_bytes()
    trace = TimeTrace(
        times=np.linspace(0.0, 1e-5, 11), values=np.cos(np.arange(11.0))
    )
    t = tmp_path / "t.csv"
    oio.write_csv(trace, t)
    cols, axis, _values, _meta = oio.read_csv(t)
    assert cols == ("time_us", "value")
    assert abs(axis[-1] - 10.0) < 1e-12


def test_write_json_sorts_keys(tmp_path):
    path = tmp_path / "obj.json"
    oio.write_json({"zeta": 1, "alpha": [1, 2], "mid": {"b": 1, "a": 2}}, path)
    text = path.read_text()
    assert text.index('"alpha"') < text.index('"mid"') < text.index('"zeta"')
    assert json.loads(text)["mid"] == {"a": 2, "b": 1}


def test_cli_spectrum_writes_csv(tmp_path, capsys):
    out = tmp_path / "line.csv"
    assert main(["spectrum", "--out", str(out)]) == 0
    assert out.exists()
    first = out.read_text().splitlines()[0]
    assert first.startswith("# ")
    assert "wrote" in capsys.readouterr().out


def test_cli_config_defaults_and_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("bins = 123\n")
    out = tmp_path / "a.json"
    rc = main(
        ["spectrum", "--config", str(cfg), "--format", "json", "--out", str(out)]
    )
    assert rc == 0
    assert len(json.loads(out.read_text())["axis"]) == 123
    # an explicit flag beats the config default
    out2 = tmp_path / "b.json"
    rc = main(
        [
            "spectrum", "--config", str(cfg), "--bins", "50",
            "--format", "json", "--out", str(out2),
        ]
    )
    assert rc == 0
    assert len(json.loads(out2.read_text())["axis"]) == 50


def test_cli_config_rejects_unknown_key_and_bad_type(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("binz = 12\n")
    assert main(["spectrum", "--config", str(cfg)]) == 2
    cfg2 = tmp_path / "type.cfg"
    cfg2.write_text("bins = maybe\n")
    assert main(["spectrum", "--config", str(cfg2)]) == 2


def test_cli_nutation_dist_requires_b1(tmp_path):
    assert main(["nutation-dist", "--out", str(tmp_path / "n.csv")]) == 2
    assert (
        main(
            [
                "nutation-dist", "--b1", "0.5",
                "--out", str(tmp_path / "n.csv"),
            ]
        )
        == 0
    )


def test_cli_ise_underresolved_returns_numerics_code(tmp_path):
    rc = main(
        [
            "ise", "--mode", "shot", "--steps", "2",
            "--out", str(tmp_path / "ise.csv"),
        ]
    )
    assert rc == 3


def test_cli_validate_passing_suite(tmp_path):
    out = tmp_path / "report.json"
    rc = main(["validate", "--suite", "lineshape", "--out", str(out)])
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["passed"] is True
    assert [c["number"] for c in report["criteria"]] == [1, 2]
    assert all(c["passed"] for c in report["criteria"])


def test_cli_validate_failing_suite_returns_4(tmp_path):
    # the reference-numbers group contains the powder-rate criterion whose
    # pentacene ratio falls below its acceptance window, so the suite
    # honestly fails
    out = tmp_path / "report.json"
    rc = main(["validate", "--suite", "reference-numbers", "--out", str(out)])
    assert rc == 4
    report = json.loads(out.read_text())
    failed = [c["number"] for c in report["criteria"] if not c["passed"]]
    assert failed == [9]


def test_cli_svg_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert main(["spectrum", "--bins", "60", "--format", "svg", "--out", str(a)]) == 0
    assert main(["spectrum", "--bins", "60", "--format", "svg", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert b"<svg" in a.read_bytes()


def test_cli_rabi_fit_pipeline(tmp_path):
    trace_path = tmp_path / "trace.csv"
    rc = main(
        [
            "rabi", "--frame", "rotating", "--b1", "0.5",
            "--duration", "6", "--samples", "64",
            "--out", str(trace_path),
        ]
    )
    assert rc == 0
    fit_path = tmp_path / "fit.json"
    rc = main(
        [
            "fit", "--input", str(trace_path), "--model", "sinusoid",
            "--format", "json", "--out", str(fit_path),
        ]
    )
    assert rc == 0
    payload = json.loads(fit_path.read_text())
    # beta = 45 deg, b1 = 0.5 mT: observable rate 2 eps omega_1 |f|
    # is about 1.7 MHz
    assert 1.2 < payload["frequency_mhz"] < 2.2
    assert payload["seed_agreement"]


def test_cli_fit_rejects_non_time_axis(tmp_path):
    spec_path = tmp_path / "spec.csv"
    assert main(["spectrum", "--out", str(spec_path)]) == 0
    assert main(["fit", "--input", str(spec_path)]) == 2


def test_cli_polarization_average(tmp_path):
    out = tmp_path / "pol.json"
    rc = main(
        [
            "polarization", "--report", "average", "--n-orient", "20000",
            "--format", "json", "--out", str(out),
        ]
    )
    assert rc == 0
    payload = json.loads(out.read_text())
    assert 0.02 < payload["average"] < 0.07
    assert payload["system"] == "pentacene"


def test_cli_powder_histogram_runs(tmp_path):
    out = tmp_path / "powder.csv"
    rc = main(
        [
            "powder", "--quantity", "resonance", "--n-orient", "5000",
            "--bins", "60", "--out", str(out),
        ]
    )
    assert rc == 0
    cols, axis, values, meta = oio.read_csv(out)
    assert cols[0] == "frequency_mhz"
    assert meta["normalized"] is True
    assert abs(math.fsum(values) * (axis[1] - axis[0]) - 1.0) < 1e-6
