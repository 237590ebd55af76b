import csv
import io
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from capa_isac import default_scene, dump_config
from capa_isac.cli import main
from capa_isac.report import RATE_COLUMNS


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "scene.cfg"
    path.write_text(dump_config(default_scene()))
    return path


def test_rates_default_table(capsys):
    code, out, _ = run(capsys, "rates")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["quantity", "value"]
    assert [r[0] for r in rows[1:]] == list(RATE_COLUMNS)
    values = [float(r[1]) for r in rows[1:]]
    assert len(values) == 20
    assert all(math.isfinite(v) and v > 0 for v in values)


def test_rates_csv_format(capsys, config, tmp_path):
    out = tmp_path / "rates.csv"
    assert run(capsys, "rates", "--config", str(config), "--out", str(out))[0] == 0
    raw = out.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")
    first = raw.decode().splitlines()[1].split(",")[1]
    assert first == f"{float(first):.12g}"
    assert len(first.replace(".", "").lstrip("0")) <= 12


def test_rates_same_config_twice_identical(capsys, config, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, "rates", "--config", str(config), "--out", str(a))
    run(capsys, "rates", "--config", str(config), "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_malformed_key_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text(dump_config(default_scene()).replace("lx_m", "lx_meters"))
    code, _, err = run(capsys, "rates", "--config", str(bad))
    assert code == 2
    assert "lx_meters" in err and "line 2" in err


def test_missing_config_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "rates", "--config", str(tmp_path / "nope.cfg"))
    assert code == 2 and "cannot read" in err


def test_position_override_in_degrees(capsys):
    _, base, _ = run(capsys, "rates")
    _, same, _ = run(capsys, "rates", "--target", "10", "45", "45")
    _, moved, _ = run(capsys, "rates", "--target", "12", "45", "45")
    assert same == base and moved != base


def _columns(text):
    rows = list(csv.reader(io.StringIO(text)))
    header, data = rows[0], np.array(rows[1:], dtype=float)
    return {name: data[:, i] for i, name in enumerate(header)}


def test_snr_sweep_cr_columns_increase(capsys):
    code, out, _ = run(capsys, "sweep", "--axis", "snr", "--start", "0", "--stop", "30",
                       "--steps", "31")
    assert code == 0
    cols = _columns(out)
    assert len(cols["snr_db"]) == 31
    for name, values in cols.items():
        if name.endswith("_cr"):
            assert np.all(np.diff(values) > 0), name


def test_aperture_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "--axis", "aperture", "--start", "0.1", "--stop", "0.5",
                       "--steps", "9")
    assert code == 0
    cols = _columns(out)
    np.testing.assert_allclose(cols["aperture_m2"], cols["side_m"] ** 2, rtol=1e-11)
    assert np.all(np.diff(cols["capa_dl_cc_cr"]) > 0)


def test_sweep_workers_do_not_change_output(capsys):
    args = ("sweep", "--axis", "aperture", "--steps", "3")
    _, serial, _ = run(capsys, *args)
    _, parallel, _ = run(capsys, *args, "--workers", "2")
    assert serial == parallel


def test_sweep_bad_range_exit_2(capsys):
    code, _, err = run(capsys, "sweep", "--start", "5", "--stop", "1")
    assert code == 2 and "start" in err


def test_region_dl_verdicts(capsys, tmp_path):
    out = tmp_path / "dl.csv"
    code, stdout, _ = run(capsys, "region", "--which", "dl", "--out", str(out))
    assert code == 0
    assert "SPDA ⊆ CAPA: true" in stdout and "FDSAC ⊆ CAPA: true" in stdout
    text = out.read_text(encoding="utf-8")
    assert text.startswith("system,param,sr,cr\n")
    assert "# SPDA ⊆ CAPA: true\n" in text


def test_region_grid_two(capsys):
    _, out, _ = run(capsys, "region", "--which", "dl", "--grid", "2")
    systems = [line.split(",")[0] for line in out.splitlines()[1:] if not line.startswith("#")]
    assert systems.count("capa") == 2 and systems.count("spda") == 2


def test_region_ul_reports_gap(capsys):
    code, out, _ = run(capsys, "region", "--which", "ul")
    assert code == 0
    assert "# UL corner gap: " in out
    assert "# UL S-C total: " in out and "# UL C-C total: " in out


def test_validate_fast(capsys):
    start = time.perf_counter()
    code, out, _ = run(capsys, "validate", "--level", "fast")
    assert code == 0, out
    assert time.perf_counter() - start < 10
    assert "FAIL" not in out


def test_validate_fault_injection(capsys):
    code, out, _ = run(capsys, "validate", "--perturb-gain", "1e-3")
    assert code == 1
    assert "FAIL  gains closed form vs oracle" in out


def test_validate_full_includes_grid_oracle(capsys):
    code, out, _ = run(capsys, "validate", "--level", "full", "--seed", "3")
    assert code == 0, out
    assert "PASS  KKT Pareto vs grid oracle" in out


def test_dump_kernel(capsys):
    code, out, _ = run(capsys, "dump-kernel", "--grid", "3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "endpoint,aperture,x_m,z_m,re,im"
    assert len(lines) == 1 + 2 * 2 * 9


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "capa_isac", "rates"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("quantity,value\n")
