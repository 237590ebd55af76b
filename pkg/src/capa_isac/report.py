"""Tables behind the CLI: per-scene rates, sweeps and region boundaries.

All numbers are written with 12 significant digits and ``\\n`` line
endings, in a fixed column order, so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .baselines import (
    FdsacSplit,
    fdsac_dl,
    fdsac_dl_region,
    fdsac_ul,
    fdsac_ul_region,
    spda_channel,
)
from .channel import ChannelGains, Correlation, channel_gains, correlations
from .rates import CORNER_KEYS, corner_rates, dl_region, ul_region
from .scene import Scene

# FDSAC reference split for the per-scene tables
FDSAC_KAPPA = 0.5
FDSAC_IOTA = 0.5
FDSAC_DL_GRID = 41

RATE_COLUMNS = (
    tuple(f"capa_{k}" for k in CORNER_KEYS)
    + tuple(f"spda_{k}" for k in CORNER_KEYS)
    + ("fdsac_dl_cr", "fdsac_dl_sr", "fdsac_ul_cr", "fdsac_ul_sr")
)
SWEEP_X = {"snr": ("snr_db",), "aperture": ("side_m", "aperture_m2")}
REGION_COLUMNS = ("system", "param", "sr", "cr")


def fmt(value) -> str:
    if isinstance(value, str):
        return value
    return f"{value:.12g}"


def to_csv(header, rows, comments=()) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    for line in comments:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# -- rates ---------------------------------------------------------------

def rate_row(scene: Scene, gains: ChannelGains | None = None, rho: Correlation | None = None,
             spda: tuple[ChannelGains, Correlation] | None = None) -> dict[str, float]:
    """All CAPA, SPDA and FDSAC rates of one scene, keyed by :data:`RATE_COLUMNS`."""
    gains = channel_gains(scene) if gains is None else gains
    rho = correlations(scene) if rho is None else rho
    spda_gains, spda_rho = spda_channel(scene) if spda is None else spda
    row = {f"capa_{k}": v for k, v in corner_rates(scene, gains, rho).items()}
    row.update({f"spda_{k}": v for k, v in corner_rates(scene, spda_gains, spda_rho).items()})
    dl = fdsac_dl(scene, gains, FdsacSplit(FDSAC_KAPPA, FDSAC_IOTA))
    ul = fdsac_ul(scene, gains, FDSAC_KAPPA)
    row.update(fdsac_dl_cr=dl.cr, fdsac_dl_sr=dl.sr, fdsac_ul_cr=ul.cr, fdsac_ul_sr=ul.sr)
    return row


def rates_csv(scene: Scene, gains: ChannelGains | None = None) -> str:
    row = rate_row(scene, gains)
    return to_csv(("quantity", "value"), [(k, row[k]) for k in RATE_COLUMNS])


# -- sweeps --------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    """``steps`` uniform points from ``start`` to ``stop``.

    The ``snr`` axis is in dB and sets all four SNRs; the ``aperture`` axis
    is the edge of the square apertures in meters.
    """

    axis: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.axis not in SWEEP_X:
            raise ValueError(f"unknown sweep axis {self.axis!r}")
        if self.steps < 2:
            raise ValueError("steps must be >= 2")
        if not self.start < self.stop:
            raise ValueError("start must be < stop")
        if self.axis == "aperture" and self.start <= 0:
            raise ValueError("aperture side must be positive")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


def _aperture_point(args):
    scene, side = args
    return rate_row(scene.with_side(side))


def sweep_rows(scene: Scene, spec: SweepSpec, workers: int = 1) -> list[list[float]]:
    xs = spec.values()
    if spec.axis == "snr":
        # the channels do not depend on the SNR
        gains, rho, spda = channel_gains(scene), correlations(scene), spda_channel(scene)
        rows = [rate_row(scene.with_snr_db(float(x)), gains, rho, spda) for x in xs]
        prefix = [[float(x)] for x in xs]
    else:
        jobs = [(scene, float(x)) for x in xs]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(_aperture_point, jobs))
        else:
            rows = [_aperture_point(j) for j in jobs]
        prefix = [[float(x), float(x) ** 2] for x in xs]
    return [p + [r[c] for c in RATE_COLUMNS] for p, r in zip(prefix, rows)]


def sweep_csv(scene: Scene, spec: SweepSpec, workers: int = 1) -> str:
    return to_csv(SWEEP_X[spec.axis] + RATE_COLUMNS, sweep_rows(scene, spec, workers))


# -- regions -------------------------------------------------------------

def _param(p) -> str:
    if isinstance(p, tuple):
        return ";".join(fmt(v) for v in p)
    return fmt(p)


def region_report(scene: Scene, which: str, grid_n: int = 101):
    """Boundary rows of the CAPA, SPDA and FDSAC regions plus verdict lines."""
    gains, rho = channel_gains(scene), correlations(scene)
    spda_gains, spda_rho = spda_channel(scene)
    if which == "dl":
        capa = dl_region(scene, grid_n, gains=gains, rho=rho)
        spda = dl_region(scene, grid_n, gains=spda_gains, rho=spda_rho)
        fdsac = fdsac_dl_region(scene, FDSAC_DL_GRID, gains=gains)
    elif which == "ul":
        capa = ul_region(scene, grid_n, gains=gains, rho=rho)
        spda = ul_region(scene, grid_n, gains=spda_gains, rho=spda_rho)
        fdsac = fdsac_ul_region(scene, grid_n, gains=gains)
    else:
        raise ValueError(f"which must be 'dl' or 'ul', got {which!r}")

    rows = []
    for name, region in (("capa", capa), ("spda", spda), ("fdsac", fdsac)):
        rows += [(name, _param(p), b.sr, b.cr)
                 for p, b in zip(region.param_grid, region.boundary)]

    verdicts = [
        f"SPDA ⊆ CAPA: {str(capa.contains_region(spda)).lower()}",
        f"FDSAC ⊆ CAPA: {str(capa.contains_region(fdsac)).lower()}",
    ]
    if which == "ul":
        sc, cc = capa.corners["S-C"], capa.corners["C-C"]
        verdicts += [
            f"UL corner gap: {fmt(math.hypot(sc.sr - cc.sr, sc.cr - cc.cr))}",
            f"UL sr gap relative: {fmt((sc.sr - cc.sr) / sc.sr)}",
            f"UL cr gap relative: {fmt((cc.cr - sc.cr) / cc.cr)}",
            f"UL S-C total: {fmt(sc.sr + sc.cr)}",
            f"UL C-C total: {fmt(cc.sr + cc.cr)}",
        ]
    return rows, verdicts


def region_csv(scene: Scene, which: str, grid_n: int = 101) -> tuple[str, list[str]]:
    rows, verdicts = region_report(scene, which, grid_n)
    return to_csv(REGION_COLUMNS, rows, verdicts), verdicts
