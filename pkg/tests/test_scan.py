"""Tests for scan configuration, the per-point pipeline, exports and the CLI."""

import json
import math

import numpy as np
import pandas as pd
import pytest

import scan
from config.settings import SAMPLING_SETTINGS
from src.numerics.base_numerics import ConfigError, ScanPointError, TruncationError
from src.analysis.scan_runner import (
    GridSpec,
    ScanRunner,
    auto_cutoff,
    build_signal,
    load_config,
    resolve_config,
    run_scan,
    validate_config,
)
from src.reporting.result_writer import COLUMNS, emit_csv, emit_json, format_summary


def _config(raw, **changes):
    raw = dict(raw)
    raw.update(changes)
    return validate_config(raw)


def _write(path, document):
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


# =============================================================================
# CONFIGURATION
# =============================================================================

@pytest.mark.parametrize(
    "changes",
    [
        {"T": 1.5},
        {"T": 1.0},
        {"T": "unit"},
        {"eta": 0.0},
        {"events": -1},
        {"cutoff": 0},
        {"grid": {"kind": "radial", "r_max": 1.0, "steps": 0}},
        {"signal": {"kind": "fock", "value": 1.5}},
        {"signal": {"kind": "squeezed", "value": 1.0}},
        {"unknown_field": 1},
    ],
)
def test_invalid_configs(scan_dict, changes):
    with pytest.raises(ConfigError):
        _config(scan_dict, **changes)


def test_config_error_exit_code(scan_dict):
    with pytest.raises(ConfigError) as excinfo:
        _config(scan_dict, eta=2.0)
    assert excinfo.value.exit_code == 2
    assert "eta" in excinfo.value.message


def test_load_config_with_overrides(tmp_path, scan_dict):
    path = _write(tmp_path / "scan.json", scan_dict)
    config = load_config(path, {"events": 10, "compensate": None})
    assert config.events == 10
    assert config.compensate is False


def test_load_config_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_load_config_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_config(str(tmp_path / "absent.json"))


def test_grid_points():
    radial = GridSpec(kind="radial", r_min=0.0, r_max=2.5, steps=41, phase=math.pi / 2)
    points = radial.points()
    assert points.shape == (41,)
    assert points[-1] == pytest.approx(2.5j)
    cartesian = GridSpec(kind="cartesian", x_min=-1, x_max=1, y_min=0, y_max=2, steps=3).points()
    np.testing.assert_allclose(cartesian[:3], [-1, 0, 1])
    assert cartesian[3] == pytest.approx(-1 + 1j)


def test_auto_cutoff(scan_dict):
    config = _config(scan_dict, grid={"kind": "radial", "r_max": 2.5, "steps": 41})
    assert auto_cutoff(config) == math.ceil(6.25 + 6 * math.sqrt(7.25) + 4) + 8
    assert resolve_config(config).cutoff == auto_cutoff(config)
    assert resolve_config(_config(scan_dict, cutoff=40)).cutoff == 40


def test_build_signal_kinds(scan_dict):
    thermal = build_signal(_config(scan_dict, signal={"kind": "thermal", "value": 0.5}))
    coherent = build_signal(_config(scan_dict, signal={"kind": "coherent", "value": 1.0, "phase": 0.5}))
    assert thermal.elements[0, 0].real == pytest.approx(2 / 3)
    assert abs(coherent.elements[1, 0]) == pytest.approx(math.exp(-1.0))


# =============================================================================
# PIPELINE
# =============================================================================

def test_origin_uncompensated(scan_dict):
    row = run_scan(_config(scan_dict))[0]
    assert row.analytic_mean == pytest.approx(-0.6, abs=1e-12)
    assert row.exact_quasi == pytest.approx(-1.0, abs=1e-10)
    assert row.base == -1.0


def test_origin_compensated(scan_dict):
    row = run_scan(_config(scan_dict, compensate=True, events=1000))[0]
    assert row.analytic_mean == pytest.approx(-1.0, abs=1e-12)
    assert row.analytic_sigma == pytest.approx(1.0, abs=1e-12)
    assert row.analytic_stderr == pytest.approx(1 / math.sqrt(1000))
    assert row.base == pytest.approx(-1.5)


def test_analytic_only_rows(scan_dict):
    rows = run_scan(_config(scan_dict, events=0))
    assert len(rows) == 4
    assert all(r.mc_mean is None and r.mc_stderr is None and r.analytic_stderr is None for r in rows)


def test_lossless_parity_equals_quasidistribution(scan_dict):
    config = _config(
        scan_dict,
        T=0.7,
        eta=1.0,
        signal={"kind": "thermal", "value": 0.5},
        grid={"kind": "cartesian", "x_min": -1, "x_max": 1, "y_min": -1, "y_max": 1, "steps": 3},
        events=0,
    )
    for row in run_scan(config):
        assert row.analytic_mean == pytest.approx(row.exact_quasi, abs=1e-8)


def test_finite_transmission_amplitudes(scan_dict):
    rows = run_scan(_config(scan_dict, T=0.8, events=0))
    assert rows[-1].alpha_re == pytest.approx(rows[-1].target_re * 2.0)


def test_limit_scale_converts_targets(scan_dict):
    rows = run_scan(_config(scan_dict, limit_scale=0.5, events=0))
    assert rows[-1].alpha_re == pytest.approx(3.0)


def test_uncompensated_means_are_bounded(scan_dict):
    for row in run_scan(_config(scan_dict, events=300)):
        assert -1.0 <= row.mc_mean <= 1.0


def test_thread_count_does_not_change_rows(scan_dict):
    single = run_scan(_config(scan_dict, n_jobs=1))
    threaded = run_scan(_config(scan_dict, n_jobs=3))
    assert [r.model_dump() for r in single] == [r.model_dump() for r in threaded]


def test_failing_point_is_identified(scan_dict, mocker):
    mocker.patch(
        "src.analysis.scan_runner.limit_displaced_distribution",
        side_effect=TruncationError("padding exhausted"),
    )
    with pytest.raises(ScanPointError) as excinfo:
        run_scan(_config(scan_dict))
    assert excinfo.value.index == 0
    assert excinfo.value.exit_code == 3
    assert "padding exhausted" in excinfo.value.message


def test_runner_exposes_point_distribution(scan_dict):
    runner = ScanRunner(_config(scan_dict))
    assert runner.distribution(0.0).p[:2] == pytest.approx([0.2, 0.8])


# =============================================================================
# EXPORTS
# =============================================================================

def test_csv_header_only_for_empty_scan(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv([], str(path))
    assert path.read_bytes() == (",".join(COLUMNS) + "\n").encode("utf-8")


def test_csv_rows_and_format(tmp_path, scan_dict):
    rows = run_scan(_config(scan_dict))
    path = tmp_path / "rows.csv"
    emit_csv(rows, str(path))
    raw = path.read_bytes()
    assert b"\r" not in raw
    frame = pd.read_csv(path, float_precision="round_trip")
    assert list(frame.columns) == COLUMNS
    assert len(frame) == 4
    assert frame["analytic_mean"].iloc[0] == rows[0].analytic_mean


def test_csv_analytic_only_leaves_cells_empty(tmp_path, scan_dict):
    path = tmp_path / "analytic.csv"
    emit_csv(run_scan(_config(scan_dict, events=0)), str(path))
    assert pd.read_csv(path)["mc_mean"].isna().all()


def test_csv_is_reproducible(tmp_path, scan_dict):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv(run_scan(_config(scan_dict)), str(first))
    emit_csv(run_scan(_config(scan_dict)), str(second))
    assert first.read_bytes() == second.read_bytes()


def test_json_document(tmp_path, scan_dict):
    config = _config(scan_dict)
    rows = run_scan(config)
    path = tmp_path / "rows.json"
    emit_json(rows, config, str(path))
    document = json.loads(path.read_text(encoding="utf-8"))
    assert document["config"]["cutoff"] == auto_cutoff(config)
    assert document["config"]["rng_algorithm"] == SAMPLING_SETTINGS["rng_algorithm"]
    assert document["config"]["T"] == "limit"
    assert len(document["rows"]) == 4
    assert document["rows"][0]["analytic_mean"] == rows[0].analytic_mean


def test_json_analytic_only_uses_null(tmp_path, scan_dict):
    config = _config(scan_dict, events=0)
    path = tmp_path / "analytic.json"
    emit_json(run_scan(config), config, str(path))
    assert json.loads(path.read_text(encoding="utf-8"))["rows"][0]["mc_mean"] is None


def test_summary(scan_dict):
    config = _config(scan_dict)
    text = format_summary(run_scan(config), config)
    assert "| Points | 4 |" in text
    assert "| Signal mean photons | 1 |" in text
    assert "within 4 sigma" in text
    assert "No points scanned" in format_summary([], config)


# =============================================================================
# CLI
# =============================================================================

def test_cli_success(tmp_path, scan_dict, capsys):
    config_path = _write(tmp_path / "scan.json", scan_dict)
    out_csv, out_json = tmp_path / "out.csv", tmp_path / "out.json"
    code = scan.main([
        "--config", config_path, "--events", "50", "--seed", "5", "--compensate", "true",
        "--out-csv", str(out_csv), "--out-json", str(out_json), "--jobs", "2",
    ])
    assert code == 0
    assert len(pd.read_csv(out_csv)) == 4
    document = json.loads(out_json.read_text(encoding="utf-8"))
    assert document["config"]["compensate"] is True
    assert document["config"]["master_seed"] == 5
    assert document["config"]["events"] == 50
    assert "SCAN COMPLETE" in capsys.readouterr().out


def test_cli_analytic_only(tmp_path, scan_dict):
    config_path = _write(tmp_path / "scan.json", scan_dict)
    out_csv = tmp_path / "out.csv"
    assert scan.main(["--config", config_path, "--analytic-only", "--out-csv", str(out_csv)]) == 0
    assert pd.read_csv(out_csv)["mc_mean"].isna().all()


def test_cli_config_error(tmp_path, scan_dict):
    config_path = _write(tmp_path / "scan.json", dict(scan_dict, eta=1.5))
    assert scan.main(["--config", config_path]) == 2


def test_cli_missing_config(tmp_path):
    assert scan.main(["--config", str(tmp_path / "absent.json")]) == 4


def test_cli_unwritable_output(tmp_path, scan_dict):
    config_path = _write(tmp_path / "scan.json", scan_dict)
    target = tmp_path / "no_such_dir" / "out.csv"
    assert scan.main(["--config", config_path, "--out-csv", str(target)]) == 4


def test_cli_numerics_error(tmp_path, scan_dict, mocker):
    config_path = _write(tmp_path / "scan.json", scan_dict)
    mocker.patch("scan.run_scan", side_effect=TruncationError("cutoff too small"))
    assert scan.main(["--config", config_path]) == 3


def test_cli_rejects_bad_boolean(tmp_path, scan_dict):
    config_path = _write(tmp_path / "scan.json", scan_dict)
    with pytest.raises(SystemExit) as excinfo:
        scan.main(["--config", config_path, "--compensate", "maybe"])
    assert excinfo.value.code == 2
