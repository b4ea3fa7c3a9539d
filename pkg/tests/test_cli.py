import json
import math
import subprocess
import sys

import numpy as np
import pytest

from metalfilm.cli import EXIT_CONFIG, EXIT_DOMAIN, EXIT_OK, EXIT_VALIDATION, main
from metalfilm.config import parse_config
from metalfilm.errors import ConfigError
from metalfilm.io import CSV_HEADER, metadata_path, read_csv
from metalfilm.sweep import local_extrema, run_sweep

BASE = {"material": "sodium", "nu_over_omega_p": 0.001, "eps1": 4, "eps2": 1, "d_nm": 10,
        "theta_deg": 45, "omega_over_omega_p": 1.0}
ANGLE_SCAN = {"material": "sodium", "nu_over_omega_p": 0.001, "eps1": 4, "eps2": 1, "d_nm": 10,
        "omega_over_omega_p": 1.0, "axis": "theta", "start": 0, "stop": 89.5, "count": 180}


@pytest.fixture
def write(tmp_path):
    def _write(obj, name="cfg.json"):
        path = tmp_path / name
        path.write_text(json.dumps(obj))
        return str(path)
    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_point_total_internal_reflection(capsys, write):
    code, out, _ = run(capsys, "point", "--config", write(BASE), "--json")
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["T"] == 0 and data["flag"] == "total_internal_reflection"
    assert data["A"] == 1 - data["T"] - data["R"]
    assert parse_config(data["config"]) == parse_config(BASE)


def test_point_text_report(capsys, write):
    code, out, _ = run(capsys, "point", "--config", write(BASE))
    assert code == EXIT_OK
    for label in ("Omega", "theta", "d ", "eps1", "eps2", "Z1", "Z2", "p1", "p2", "T ", "R ", "A ",
                  "flag", "n_odd", "tail_estimate"):
        assert label in out


def test_point_compare_free_standing(capsys, write):
    cfg = dict(BASE, eps1=1, eps2=1, theta_deg=30, d_nm=5, omega_over_omega_p=0.8)
    code, out, _ = run(capsys, "point", "--config", write(cfg), "--json", "--compare")
    cmp = json.loads(out)["compare"]
    assert code == EXIT_OK
    for key in ("T_R_unsimplified", "T_R_energy_flux", "T_R_free_standing"):
        assert cmp[key] == pytest.approx(cmp["T_R_simplified"], rel=1e-12)
    assert "transformed_Z_rel_discrepancy" in cmp


def test_bad_angle_names_field(capsys, write):
    code, _, err = run(capsys, "point", "--config", write(dict(BASE, theta_deg=95)))
    assert code == EXIT_CONFIG and "theta_deg" in err


@pytest.mark.parametrize("change, field", [
    ({"colour": 1}, "colour"),
    ({"axis": "theta", "start": 0, "stop": 10, "count": 3}, "theta_deg"),
    ({"axis": "Omega"}, "start"),
    ({"omega_p": 1e16}, "material"),
    ({"material": "gold"}, "material"),
    ({"nu": 1e12}, "nu"),
    ({"eps1": "four"}, "eps1"),
    ({"eps1": -4}, "eps1"),
    ({"eps2": [1, 2, 3]}, "eps2"),
    ({"d_nm": 0}, "d_nm"),
    ({"series": {"rel_tol": 0}}, "series"),
    ({"series": {"tolerance": 1e-8}}, "series"),
    ({"series": {"n_max": 100.5}}, "n_max"),
    ({"kinematics": "relativistic"}, "kinematics"),
])
def test_config_errors(capsys, write, change, field):
    code, _, err = run(capsys, "point", "--config", write(dict(BASE, **change)))
    assert code == EXIT_CONFIG
    assert field in err


def test_missing_keys_and_files(capsys, write, tmp_path):
    for key in ("eps1", "d_nm", "omega_over_omega_p", "nu_over_omega_p"):
        cfg = {k: v for k, v in BASE.items() if k != key}
        code, _, err = run(capsys, "point", "--config", write(cfg))
        assert code == EXIT_CONFIG and key in err
    assert run(capsys, "point", "--config", str(tmp_path / "nope.json"))[0] == EXIT_CONFIG
    (tmp_path / "broken.json").write_text("{")
    assert run(capsys, "point", "--config", str(tmp_path / "broken.json"))[0] == EXIT_CONFIG
    with pytest.raises(SystemExit) as info:  # argparse usage error
        main(["point"])
    assert info.value.code == EXIT_CONFIG
    assert run(capsys, "sweep", "--config", write(BASE), "--out", "x.csv")[0] == EXIT_CONFIG


def test_custom_material_and_complex_substrate(capsys, write):
    cfg = {"omega_p": 1.4e16, "v_F": 1.4e8, "nu": 1.4e13, "eps1": 1, "eps2": [2.25, 0.1],
           "d_nm": 8, "theta_deg": 30, "omega_over_omega_p": 0.7}
    code, out, _ = run(capsys, "point", "--config", write(cfg), "--json")
    data = json.loads(out)
    assert code == EXIT_OK and data["config"]["eps2"] == [2.25, 0.1]
    assert data["config"]["nu_over_omega_p"] == pytest.approx(1e-3)
    assert parse_config(data["config"]).plasma == parse_config(cfg).plasma


def test_domain_error_exit_code(capsys, write):
    eps2 = math.sin(math.radians(45)) ** 2
    cfg = dict(BASE, eps1=1, eps2=eps2, kinematics="vacuum")
    code, _, err = run(capsys, "point", "--config", write(cfg))
    assert code == EXIT_DOMAIN and "beta2" in err


def test_sweep_two_points_csv(capsys, write, tmp_path):
    out = tmp_path / "two.csv"
    code, stdout, _ = run(capsys, "sweep", "--config", write(dict(ANGLE_SCAN, count=2)), "--out", str(out))
    assert code == EXIT_OK
    raw = out.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode("utf-8").splitlines()
    assert lines[0] == ",".join(CSV_HEADER) and len(lines) == 3
    assert lines[1].startswith("0,") and lines[2].startswith("89.5,")
    assert "T: min" in stdout and "R: min" in stdout and "A: min" in stdout


def test_csv_round_trip_and_config_echo(capsys, write, tmp_path):
    out = tmp_path / "run.csv"
    cfg_path = write(dict(ANGLE_SCAN, count=25))
    assert run(capsys, "sweep", "--config", cfg_path, "--out", str(out))[0] == EXIT_OK
    meta = json.loads(metadata_path(out).read_text())
    spec = parse_config(meta["config"]).sweep_spec()
    assert parse_config(meta["config"]) == parse_config(json.loads(open(cfg_path).read()))
    fresh = run_sweep(spec).rows
    assert read_csv(out) == list(fresh)


def test_parallel_and_serial_csv_bytes_match(capsys, write, tmp_path):
    cfg = write(dict(ANGLE_SCAN, count=40))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "sweep", "--config", cfg, "--out", str(a))[0] == EXIT_OK
    assert run(capsys, "sweep", "--config", cfg, "--out", str(b), "--threads", "4")[0] == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert run(capsys, "sweep", "--config", cfg, "--out", str(b), "--threads", "0")[0] == EXIT_CONFIG


def test_angle_scan_csv_shape(capsys, write, tmp_path):
    out = tmp_path / "scan.csv"
    code, stdout, _ = run(capsys, "sweep", "--config", write(ANGLE_SCAN), "--out", str(out), "--json",
                          "--threads", "2")
    assert code == EXIT_OK and json.loads(stdout)["rows"] == 180
    rows = read_csv(out)
    theta = np.array([r.axis_value for r in rows])
    T, R, A = (np.array([getattr(r, c) for r in rows]) for c in "TRA")
    assert np.all(np.diff(T) <= 1e-10)
    assert np.all(np.diff(R) >= 0)
    assert [e.kind for e in local_extrema(theta, A)] == ["max"]
    assert np.all(T[theta >= 30] == 0)


def test_plot_script(capsys, write, tmp_path):
    out, script = tmp_path / "data" / "s.csv", tmp_path / "plot.py"
    out.parent.mkdir()
    code, stdout, _ = run(capsys, "sweep", "--config", write(dict(ANGLE_SCAN, count=3)), "--out",
                          str(out), "--plot-script", str(script))
    text = script.read_text()
    assert code == EXIT_OK and "plot script" in stdout
    compile(text, str(script), "exec")
    assert "'data/s.csv'" in text and '"axis": "theta"' in text


def test_validate_passes(capsys):
    code, out, _ = run(capsys, "validate")
    assert code == EXIT_OK, out
    assert "free-standing reduction" in out
    assert out.count("PASS") == len(out.strip().splitlines()) - 1


def test_validate_fails_loudly_with_loose_tolerance(capsys, write):
    code, out, err = run(capsys, "validate", "--config", write({"series": {"rel_tol": 1e-2}}),
                         "--json")
    data = json.loads(out)
    failed = {c["name"] for c in data["checks"] if not c["passed"]}
    assert code == EXIT_VALIDATION and not data["passed"]
    assert "impedance tail bound" in failed
    assert "impedance tail bound" in err


def test_validate_rejects_unrelated_keys(capsys, write):
    assert run(capsys, "validate", "--config", write({"d_nm": 3}))[0] == EXIT_CONFIG


def test_module_entry_point(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(BASE))
    proc = subprocess.run([sys.executable, "-m", "metalfilm", "point", "--config", str(cfg),
                           "--json"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["T"] == 0


def test_parse_config_requires_object():
    with pytest.raises(ConfigError):
        parse_config([1, 2])
