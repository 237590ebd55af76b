"""Self-check suite: closed forms against oracles, plus identities.

``fast`` runs everything except the 2000 x 2000 Pareto grid search;
``full`` adds it and checks more random scenes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .baselines import FdsacSplit, fdsac_dl, fdsac_ul, spda_channel
from .channel import (
    Gain,
    Rho,
    channel_gains,
    correlations,
    gain_oracle,
    rho_oracle,
)
from .rates import (
    dl_cr_cc,
    dl_cr_sc,
    dl_geometry,
    dl_pareto_pair,
    dl_region,
    dl_sr_cc,
    dl_sr_sc,
    ul_cr_cc,
    ul_cr_sc,
    ul_region,
    ul_sr_cc,
    ul_sr_sc,
    ul_timeshare_pair,
)
from .scene import Scene, random_scene
from .subspace import (
    Regime,
    achieved_gammas,
    kkt_pareto,
    pareto_grid_oracle,
    pareto_objective,
    rayleigh_eig_oracle,
    rayleigh_max,
)

GAIN_TOL = 1e-9
RHO_TOL = 1e-5
RAYLEIGH_TOL = 1e-10
KKT_TOL = 1e-9
GRID_TOL = 1e-4
IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _rel(a, b) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _check(name, err, tol) -> CheckResult:
    return CheckResult(name, bool(err <= tol), f"max error {err:.3e} (tol {tol:g})")


def run_validation(scene: Scene, level: str = "fast", seed: int = 0,
                   perturb_gain: float = 0.0) -> list[CheckResult]:
    """Run the suite on ``scene``.

    ``perturb_gain`` scales every closed-form gain by ``1 + perturb_gain``
    before the checks, to confirm that the suite catches a wrong gain.
    """
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    rng = np.random.default_rng(seed)
    n_random = 100 if level == "full" else 10

    def gains_of(s):
        return channel_gains(s).scaled(1.0 + perturb_gain)

    gains, rho = gains_of(scene), correlations(scene)
    out = []

    scenes = [scene] + [random_scene(rng, scene) for _ in range(n_random)]
    err = max(_rel(getattr(gains_of(s), g.value), gain_oracle(s, g))
              for s in scenes for g in Gain)
    out.append(_check(f"gains closed form vs oracle ({len(scenes)} scenes)", err, GAIN_TOL))

    err = max(_rel(getattr(rho, r.value), rho_oracle(scene, r)) for r in Rho)
    out.append(_check("correlations Chebyshev vs oracle", err, RHO_TOL))

    err = 0.0
    for _ in range(200):
        h, a = rng.uniform(0.1, 10.0, size=2)
        cross = math.sqrt(a * h) * rng.uniform(0, 1) * np.exp(1j * rng.uniform(-np.pi, np.pi))
        scale = rng.uniform(0.0, 10.0)
        err = max(err, _rel(rayleigh_max(a, h, cross, scale),
                            rayleigh_eig_oracle(a, h, cross, scale)))
    out.append(_check("Rayleigh quotient vs eigenvalue oracle", err, RAYLEIGH_TOL))

    geo = dl_geometry(gains, rho.rho_d)
    err = 0.0
    for eps in np.linspace(0.0, 1.0, 101):
        w = kkt_pareto(float(eps), geo)
        if w.regime is Regime.INTERIOR:
            g = achieved_gammas(w, geo)
            err = max(err, _rel(g.gamma_c_hat / eps, g.gamma_s_hat / (1.0 - eps)))
    out.append(_check("KKT interior active-constraint identity", err, KKT_TOL))

    if level == "full":
        err = 0.0
        for eps in (0.3, 0.5, 0.7):
            closed = pareto_objective(eps, achieved_gammas(kkt_pareto(eps, geo), geo))
            err = max(err, _rel(pareto_grid_oracle(eps, geo)[0], closed))
        out.append(_check("KKT Pareto vs grid oracle", err, GRID_TOL))

    p0, p1 = dl_pareto_pair(scene, gains, rho.rho_d, 0.0), dl_pareto_pair(scene, gains, rho.rho_d, 1.0)
    t0, t1 = ul_timeshare_pair(scene, gains, rho.rho_u, 0.0), ul_timeshare_pair(scene, gains, rho.rho_u, 1.0)
    f_dl0 = fdsac_dl(scene, gains, FdsacSplit(0.0, 0.0))
    f_dl1 = fdsac_dl(scene, gains, FdsacSplit(1.0, 1.0))
    f_ul0, f_ul1 = fdsac_ul(scene, gains, 0.0), fdsac_ul(scene, gains, 1.0)
    pairs = [
        (p0.sr, dl_sr_sc(scene, gains)), (p0.cr, dl_cr_sc(scene, gains, rho.rho_d)),
        (p1.sr, dl_sr_cc(scene, gains, rho.rho_d)), (p1.cr, dl_cr_cc(scene, gains)),
        (t1.sr, ul_sr_sc(scene, gains)), (t1.cr, ul_cr_sc(scene, gains, rho.rho_u)),
        (t0.sr, ul_sr_cc(scene, gains, rho.rho_u)), (t0.cr, ul_cr_cc(scene, gains)),
        (f_dl0.cr, dl_cr_cc(scene, gains)), (f_dl1.sr, dl_sr_sc(scene, gains)),
        (f_ul0.cr, ul_cr_cc(scene, gains)), (f_ul1.sr, ul_sr_sc(scene, gains)),
        (ul_sr_cc(scene, gains, 0.0), ul_sr_sc(scene, gains)),
        (ul_cr_sc(scene, gains, 0.0), ul_cr_cc(scene, gains)),
    ]
    err = max(_rel(a, b) for a, b in pairs)
    out.append(_check("endpoint and limit identities", err, IDENTITY_TOL))

    spda_gains, spda_rho = spda_channel(scene)
    ok = (dl_region(scene, gains=gains, rho=rho).contains_region(
              dl_region(scene, gains=spda_gains, rho=spda_rho))
          and ul_region(scene, gains=gains, rho=rho).contains_region(
              ul_region(scene, gains=spda_gains, rho=spda_rho)))
    out.append(CheckResult("SPDA regions inside CAPA regions", ok, "boundary dominance"))
    return out


def format_report(results: list[CheckResult]) -> str:
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}" for r in results]
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"
