import csv
import io
import json

import pytest

from rfpollution import ConfigurationError
from rfpollution.cli import (
    EXIT_COMPUTE,
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_NONCOMPLIANT,
    EXIT_OK,
    emit_report,
    main,
    parse_config,
    reports_to_csv,
    reports_to_json,
)
from rfpollution.scenarios import ComparisonReport, build_comparison, preset, run_comparison
from rfpollution.schema import comparison_to_dict


def test_parse_scenario_flags():
    cfg = parse_config(["scenario", "--id", "S5", "--policy", "msp", "--neighbors", "6", "--method", "both"])
    assert cfg.scenario == "S5"
    assert cfg.n_i == 6
    assert cfg.methods == ("model", "simulation")
    assert cfg.pixel_size == 1.0
    assert cfg.fmt == "json"


def test_unknown_scenario():
    with pytest.raises(ConfigurationError, match="unknown scenario"):
        parse_config(["scenario", "--id", "S9"])


def test_file_override_moves_fixed_distance(tmp_path):
    p = tmp_path / "over.json"
    p.write_text(json.dumps({"schema_version": 1, "scenario": "S5", "dep2": {"d_min_m": 5.0}}))
    cfg = parse_config(["scenario", "--config", str(p)])
    spec = build_comparison(preset(cfg.scenario), cfg.policy, cfg.n_i, cfg.overrides)
    assert spec.dep2.d_min == 5.0
    assert spec.d_fx2 == 6.0


def test_flag_beats_file(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"scenario": "S1", "policy": "elp"}))
    cfg = parse_config(["scenario", "--config", str(p), "--id", "S3", "--policy", "msp"])
    assert (cfg.scenario, cfg.policy) == ("S3", "msp")
    assert parse_config(["scenario", "--config", str(p)]).policy == "elp"


def test_conflicting_and_missing_flags(tmp_path):
    with pytest.raises(ConfigurationError, match="conflicts"):
        parse_config(["simulate", "--id", "S1", "--neighbors", "0", "--levels", "1"])
    with pytest.raises(ConfigurationError):
        parse_config(["heatmap", "--id", "S1"])
    with pytest.raises(ConfigurationError):
        parse_config(["compare"])
    with pytest.raises(ConfigurationError):
        parse_config(["scenario", "--id", "S1", "--pixel-size", "-1"])


def test_malformed_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"scenario": "S1",,}')
    with pytest.raises(ConfigurationError, match="line 1"):
        parse_config(["scenario", "--config", str(p)])
    assert main(["scenario", "--config", str(p)]) == EXIT_CONFIG


def test_csv_row_for_s4():
    text = reports_to_csv([run_comparison("S4", "msp")])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert text.splitlines()[0].startswith(
        "scenario,policy,n_i,method,fixed_ratio,cell_ratio,pe1_w,pe2_w,cell1_w,cell2_w,fx1_w,fx2_w"
    )
    assert len(rows) == 1
    assert round(float(rows[0]["fixed_ratio"]), 4) == 0.5012
    assert round(float(rows[0]["cell_ratio"]), 4) == 0.5012


def test_json_round_trip_bit_exact():
    reps = [run_comparison(s, "msp", 6) for s in ("S1", "S5")]
    back = json.loads(reports_to_json(reps))
    for r, d in zip(reps, back):
        for k, v in r.as_dict().items():
            assert d[k] == v
        assert d["schema_version"] == 1


def test_csv_round_trip_bit_exact():
    r = run_comparison("S2", "elp")
    row = next(csv.DictReader(io.StringIO(reports_to_csv([r]))))
    assert float(row["cell_ratio"]) == r.cell_ratio
    assert float(row["pe2_w"]) == r.pe2_w


def test_empty_reports_create_no_file(tmp_path):
    out = tmp_path / "r.json"
    with pytest.raises(ConfigurationError):
        emit_report([], "json", out)
    assert not out.exists()
    assert not (tmp_path / "r.json.meta.json").exists()


def test_emit_writes_sidecar(tmp_path):
    out = tmp_path / "r.csv"
    emit_report([run_comparison("S1", "msp")], "csv", out)
    meta = json.loads((tmp_path / "r.csv.meta.json").read_text())
    assert meta["format"] == "csv"
    assert "runtime_s" not in out.read_text()


def test_unwritable_path(tmp_path):
    out = tmp_path / "missing" / "r.json"
    with pytest.raises(OSError, match="missing"):
        emit_report([run_comparison("S1", "msp")], "json", out)
    assert main(["scenario", "--id", "S1", "-o", str(out)]) == EXIT_IO


def test_identical_invocations_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["scenario", "--id", "S4", "--method", "both", "--pixel-size", "4"]
    assert main(args + ["-o", str(a)]) == EXIT_OK
    assert main(args + ["-o", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_compare_with_pair_file(tmp_path):
    spec = build_comparison(preset("S3"), "elp")
    p = tmp_path / "pair.json"
    p.write_text(json.dumps(comparison_to_dict(spec)))
    out = tmp_path / "out.json"
    assert main(["compare", "--config", str(p), "-o", str(out)]) == EXIT_OK
    data = json.loads(out.read_text())
    assert data[0]["fixed_ratio"] == pytest.approx(27.94, rel=1e-3)
    assert data[0]["scenario"] == "custom"


def test_exit_codes(tmp_path, capsys):
    assert main(["scenario", "--id", "S9"]) == EXIT_CONFIG
    assert main(["scenario", "--id", "S1", "--policy", "sps"]) == EXIT_CONFIG
    assert main(["scenario", "--id", "S1", "--policy", "sps", "--b1-mhz", "20", "--b2-mhz", "20"]) == EXIT_OK
    assert main(["verify-elp", "--id", "S5", "--policy", "elp", "--neighbors", "6"]) == EXIT_NONCOMPLIANT
    assert main(["verify-elp", "--id", "S1", "--policy", "elp", "--deployment", "2"]) == EXIT_OK
    assert main(["verify-elp", "--id", "S1", "--policy", "msp"]) == EXIT_CONFIG
    over = tmp_path / "eps.json"
    over.write_text(json.dumps({"scenario": "S1", "epsilon_m": 0.01, "d_fx1_m": 15.05, "d_fx2_m": 15.05}))
    assert main(["scenario", "--config", str(over), "--method", "simulation", "--pixel-size", "1"]) == EXIT_COMPUTE
    assert main(["--version"]) == EXIT_OK
    capsys.readouterr()


def test_simulate_and_heatmap(tmp_path, capsys):
    assert main(["simulate", "--id", "S5", "--deployment", "2"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "bin_m,mean_rfp_dbm,pixels"
    assert len(lines) == 36
    hm = tmp_path / "hm.csv"
    assert main(["heatmap", "--id", "S5", "--deployment", "2", "-o", str(hm)]) == EXIT_OK
    rows = hm.read_text().splitlines()
    assert len(rows) == 100
    meta = json.loads((tmp_path / "hm.csv.meta.json").read_text())
    assert meta["first_center_m"] == -49.5


def test_sweep_command(tmp_path):
    out = tmp_path / "sw.csv"
    assert main(["sweep", "--id", "S5", "--dmin2", "15", "10", "5", "-o", str(out)]) == EXIT_OK
    rows = list(csv.DictReader(out.open()))
    assert [float(r["d_fx2_m"]) for r in rows] == [16.0, 11.0, 6.0]
    assert main(["sweep", "--id", "S5", "--levels", "0", "1", "--method", "model"]) == EXIT_CONFIG
