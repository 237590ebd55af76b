"""Acceptance suite: one marked group per criterion, summarized after the run."""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from capa_isac import (
    Gain,
    Regime,
    Rho,
    SubspaceGeometry,
    achieved_gammas,
    gain_closed,
    gain_oracle,
    kkt_pareto,
    pareto_grid_oracle,
    random_scene,
    rayleigh_max,
    rho_chebyshev,
    rho_oracle,
)
from capa_isac import rates as R
from capa_isac.baselines import FdsacSplit, fdsac_dl, fdsac_dl_region, fdsac_ul, \
    fdsac_ul_region, spda_channel
from capa_isac.cli import main
from capa_isac.report import RATE_COLUMNS, SweepSpec, rate_row, sweep_rows
from capa_isac.subspace import pareto_objective, rayleigh_eig_oracle

from frozen import ORACLE_RHO

EXACT = 1e-12


def _rel(a, b):
    return abs(a - b) / abs(b)


# -- criterion 1 ----------------------------------------------------------

@pytest.mark.acceptance(1)
def test_gains_closed_form_vs_oracle(scene):
    rng = np.random.default_rng(20240601)
    scenes = [scene] + [random_scene(rng) for _ in range(100)]
    start = time.perf_counter()
    worst = 0.0
    for s in scenes:
        for g in Gain:
            worst = max(worst, _rel(gain_closed(s, g), gain_oracle(s, g)))
    elapsed = time.perf_counter() - start
    print(f"gains: worst relative error {worst:.3e} over {len(scenes)} scenes in {elapsed:.2f} s")
    assert worst < 1e-9
    assert elapsed < 20.0


# -- criterion 2 ----------------------------------------------------------

@pytest.mark.acceptance(2)
@pytest.mark.parametrize("which", list(Rho))
def test_rho_chebyshev_200_vs_oracle(scene, which):
    oracle = rho_oracle(scene, which)
    assert abs(oracle - ORACLE_RHO[which.value]) <= 1e-11 * abs(oracle)
    c = rho_chebyshev(scene, which, 200)
    mod_err = abs(abs(c) - abs(oracle)) / abs(oracle)
    phase_err = abs(np.angle(c) - np.angle(oracle))
    print(f"{which.value} N=200: modulus {mod_err:.3e}, phase {phase_err:.3e}")
    assert mod_err < 1e-6
    assert phase_err < 1e-6


@pytest.mark.acceptance(2)
@pytest.mark.parametrize("which", list(Rho))
def test_rho_self_convergence_geometric(scene, which):
    ns = (50, 100, 200, 400, 800)
    values = [rho_chebyshev(scene, which, n) for n in ns]
    inc = [abs(b - a) / abs(b) for a, b in zip(values, values[1:])]
    ratios = [b / a for a, b in zip(inc, inc[1:])]
    print(f"{which.value} increments {['%.3e' % x for x in inc]}, ratios "
          f"{['%.3f' % r for r in ratios]}")
    assert all(r <= 0.5 for r in ratios)


# -- criterion 3 ----------------------------------------------------------

@pytest.fixture(scope="module")
def dl_geo(gains, rho):
    return SubspaceGeometry(gains.g_d, gains.g_t, rho.rho_d)


@pytest.mark.acceptance(3)
@pytest.mark.parametrize("eps", [0.3, 0.5, 0.7])
def test_kkt_matches_grid_oracle(dl_geo, eps):
    closed = pareto_objective(eps, achieved_gammas(kkt_pareto(eps, dl_geo), dl_geo))
    grid, _ = pareto_grid_oracle(eps, dl_geo, grid_n=2000, refine=2)
    err = _rel(grid, closed)
    print(f"eps={eps}: KKT {closed:.12g}, grid {grid:.12g}, relative gap {err:.3e}")
    assert err < 1e-4


@pytest.mark.acceptance(3)
def test_kkt_active_constraint_identity(dl_geo):
    worst, interior = 0.0, 0
    for eps in np.linspace(0.0, 1.0, 1001):
        w = kkt_pareto(float(eps), dl_geo)
        if w.regime is Regime.INTERIOR:
            g = achieved_gammas(w, dl_geo)
            worst = max(worst, _rel(g.gamma_c_hat / eps, g.gamma_s_hat / (1 - eps)))
            interior += 1
    print(f"interior samples {interior}, worst identity error {worst:.3e}")
    assert interior > 0
    assert worst < 1e-9


# -- criterion 4 ----------------------------------------------------------

@pytest.mark.acceptance(4)
def test_rayleigh_closed_form_vs_eig():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(1000):
        a, h = 10 ** rng.uniform(-2, 5, 2)
        cross = math.sqrt(a * h) * rng.uniform(0, 1) * np.exp(1j * rng.uniform(-math.pi, math.pi))
        scale = 10 ** rng.uniform(-3, 4) / h
        worst = max(worst, _rel(rayleigh_max(a, h, cross, scale),
                                rayleigh_eig_oracle(a, h, cross, scale)))
    print(f"Rayleigh quotient: worst relative error {worst:.3e} over 1000 draws")
    assert worst < 1e-10


# -- criterion 5 ----------------------------------------------------------

@pytest.mark.acceptance(5)
def test_pareto_endpoints_equal_corner_rates(scene, gains, rho):
    p0 = R.dl_pareto_pair(scene, gains, rho.rho_d, 0.0)
    p1 = R.dl_pareto_pair(scene, gains, rho.rho_d, 1.0)
    expected = [R.dl_sr_sc(scene, gains), R.dl_cr_sc(scene, gains, rho.rho_d),
                R.dl_sr_cc(scene, gains, rho.rho_d), R.dl_cr_cc(scene, gains)]
    np.testing.assert_allclose([p0.sr, p0.cr, p1.sr, p1.cr], expected, rtol=EXACT)


@pytest.mark.acceptance(5)
def test_timeshare_endpoints_equal_sic_corners(scene, gains, rho):
    s1 = R.ul_timeshare_pair(scene, gains, rho.rho_u, 1.0)
    s0 = R.ul_timeshare_pair(scene, gains, rho.rho_u, 0.0)
    expected = [R.ul_sr_sc(scene, gains), R.ul_cr_sc(scene, gains, rho.rho_u),
                R.ul_sr_cc(scene, gains, rho.rho_u), R.ul_cr_cc(scene, gains)]
    np.testing.assert_allclose([s1.sr, s1.cr, s0.sr, s0.cr], expected, rtol=EXACT)


@pytest.mark.acceptance(5)
def test_fdsac_limits_recover_corners(scene, gains):
    dl_comm = fdsac_dl(scene, gains, FdsacSplit(0.0, 0.0))
    dl_sense = fdsac_dl(scene, gains, FdsacSplit(1.0, 1.0))
    ul_comm = fdsac_ul(scene, gains, 0.0)
    ul_sense = fdsac_ul(scene, gains, 1.0)
    np.testing.assert_allclose(
        [dl_comm.cr, dl_sense.sr, ul_comm.cr, ul_sense.sr],
        [R.dl_cr_cc(scene, gains), R.dl_sr_sc(scene, gains),
         R.ul_cr_cc(scene, gains), R.ul_sr_sc(scene, gains)], rtol=EXACT)
    assert dl_comm.sr == dl_sense.cr == ul_comm.sr == ul_sense.cr == 0.0


@pytest.mark.acceptance(5)
def test_zero_correlation_collapses(scene, gains):
    np.testing.assert_allclose(R.ul_sr_cc(scene, gains, 0.0), R.ul_sr_sc(scene, gains),
                               rtol=EXACT)
    np.testing.assert_allclose(R.ul_cr_sc(scene, gains, 0.0), R.ul_cr_cc(scene, gains),
                               rtol=EXACT)
    # with orthogonal channels each downlink beam serves one function only
    assert R.dl_sr_cc(scene, gains, 0.0) == 0.0
    assert R.dl_cr_sc(scene, gains, 0.0) == 0.0
    for eps in np.linspace(0.05, 0.95, 19):
        p = R.dl_pareto_pair(scene, gains, 0.0, float(eps))
        assert p.cr <= R.dl_cr_cc(scene, gains) * (1 + EXACT)
        assert p.sr <= R.dl_sr_sc(scene, gains) * (1 + EXACT)


# -- criterion 6 ----------------------------------------------------------

@pytest.mark.acceptance(6)
def test_spda_rates_below_capa(scene):
    row = rate_row(scene)
    for key in R.CORNER_KEYS:
        print(f"{key}: CAPA {row['capa_' + key]:.6g}, SPDA {row['spda_' + key]:.6g}")
        assert row["spda_" + key] < row["capa_" + key], key


@pytest.mark.acceptance(6)
def test_baseline_regions_inside_capa(scene, gains, rho):
    sg, sr = spda_channel(scene)
    pairs = {
        "dl": (R.dl_region(scene, 101, gains=gains, rho=rho),
               R.dl_region(scene, 101, gains=sg, rho=sr),
               fdsac_dl_region(scene, gains=gains)),
        "ul": (R.ul_region(scene, 101, gains=gains, rho=rho),
               R.ul_region(scene, 101, gains=sg, rho=sr),
               fdsac_ul_region(scene, 101, gains=gains)),
    }
    for link, (capa, spda, fdsac) in pairs.items():
        assert capa.contains_region(spda), f"SPDA {link}"
        assert capa.contains_region(fdsac), f"FDSAC {link}"


@pytest.mark.acceptance(6)
def test_cr_columns_increase_over_snr_sweep(scene):
    rows = np.array(sweep_rows(scene, SweepSpec("snr", 0.0, 30.0, 31)))
    names = ("snr_db",) + tuple(RATE_COLUMNS)
    for i, name in enumerate(names):
        if name.endswith("_cr"):
            assert np.all(np.diff(rows[:, i]) > 0), name


@pytest.mark.acceptance(6)
def test_dl_cc_cr_increases_over_aperture_sweep(scene):
    rows = np.array(sweep_rows(scene, SweepSpec("aperture", 0.1, 0.5, 21)))
    col = 2 + RATE_COLUMNS.index("capa_dl_cc_cr")
    print(f"capa_dl_cc_cr from {rows[0, col]:.6g} to {rows[-1, col]:.6g}")
    assert np.all(np.diff(rows[:, col]) > 0)


@pytest.mark.acceptance(6)
def test_ul_corner_gap_reported(scene, gains, rho):
    sc = R.ul_timeshare_pair(scene, gains, rho.rho_u, 1.0)
    cc = R.ul_timeshare_pair(scene, gains, rho.rho_u, 0.0)
    gap = math.hypot(sc.sr - cc.sr, sc.cr - cc.cr)
    print(f"UL corners at Lx=Lz={scene.lx}: S-C {sc}, C-C {cc}, gap {gap:.4g}, "
          f"sr gap {(sc.sr - cc.sr) / sc.sr:.3%}, cr gap {(cc.cr - sc.cr) / cc.cr:.3%}")
    assert math.isfinite(gap)


# -- criterion 7 ----------------------------------------------------------

FRAME_LENGTHS = (1, 2, 4, 8, 16)


@pytest.mark.acceptance(7)
@pytest.mark.parametrize("product", [1e-3, 0.5, 10.0, 3.7e4])
def test_sensing_rate_decreasing_in_frame_length(product):
    values = [R.sensing_rate(product, n) for n in FRAME_LENGTHS]
    np.testing.assert_allclose(values, [math.log2(1 + n * product) / n for n in FRAME_LENGTHS],
                               rtol=1e-15)
    assert all(b < a for a, b in zip(values, values[1:]))


@pytest.mark.acceptance(7)
def test_sensing_rates_decreasing_in_frame_length(scene, gains):
    for fn in (R.dl_sr_sc, R.ul_sr_sc):
        values = [fn(scene.replace(frame_len=n), gains) for n in FRAME_LENGTHS]
        assert all(b < a for a, b in zip(values, values[1:])), fn.__name__


# -- criterion 8 ----------------------------------------------------------

@pytest.mark.acceptance(8)
@pytest.mark.parametrize("argv", [("rates",), ("region", "--which", "dl"),
                                  ("region", "--which", "ul")])
def test_csv_byte_identical_in_process(tmp_path, capsys, argv):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main([*argv, "--out", str(a)]) == 0
    assert main([*argv, "--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.acceptance(8)
@pytest.mark.parametrize("argv", [("rates",), ("region", "--which", "dl")])
def test_csv_byte_identical_across_processes(tmp_path, argv):
    outputs = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        subprocess.run([sys.executable, "-m", "capa_isac", *argv, "--out", str(path)],
                       check=True, capture_output=True)
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
