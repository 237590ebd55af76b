"""Reference systems: a discrete half-wavelength array (SPDA) and FDSAC.

The SPDA replaces each continuous aperture by ``floor(Lx/d) x floor(Lz/d)``
point elements of area ``lambda**2/(4*pi)`` on a ``d = lambda/2`` grid.  Its
gains and correlations are element sums of the same kernels, so the CAPA
rate formulas apply unchanged.

FDSAC (frequency-division sensing and communication) gives sensing a
bandwidth fraction ``kappa`` and, on the downlink, a power fraction ``iota``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelGains, Correlation, Endpoint, Gain, Rho, channel_gains, green_kernel
from .rates import (
    EffectiveSnrs,
    RatePair,
    RateRegion,
    corner_rates,
    dl_region,
    ul_region,
)
from .scene import ApertureId, Scene


class EmptyArray(ValueError):
    """The aperture is too small to hold a single element."""


@dataclass(frozen=True)
class SpdaArray:
    """Element centres ``(x, z)`` of one discrete aperture, shape ``(n, 2)``."""

    centers: np.ndarray
    element_area: float
    spacing: float
    aperture: ApertureId

    @property
    def size(self) -> int:
        return len(self.centers)


def spda_build(scene: Scene, aperture, spacing: float | None = None,
               element_area: float | None = None) -> SpdaArray:
    """Lay out the discrete elements covering one aperture.

    ``spacing`` and ``element_area`` default to ``lambda/2`` and
    ``lambda**2/(4*pi)``; overriding them is meant for convergence studies.
    """
    aperture = ApertureId(aperture)
    d = scene.wavelength / 2.0 if spacing is None else spacing
    area = scene.wavelength**2 / (4.0 * math.pi) if element_area is None else element_area
    # the epsilon keeps exact multiples (0.5 / 0.0625) from flooring down
    nx = math.floor(scene.lx / d + 1e-9)
    nz = math.floor(scene.lz / d + 1e-9)
    if nx == 0 or nz == 0:
        raise EmptyArray(f"aperture {scene.lx} x {scene.lz} m holds no element at spacing {d} m")
    x_off = aperture.x_range(scene.lx)[0]
    xs = (2 * np.arange(1, nx + 1) - 1) / 2.0 * d + x_off
    zs = (2 * np.arange(1, nz + 1) - 1) / 2.0 * d - scene.lz / 2.0
    xx, zz = np.meshgrid(xs, zs, indexing="ij")
    centers = np.column_stack([xx.ravel(), zz.ravel()])
    centers.setflags(write=False)
    return SpdaArray(centers, area, d, aperture)


def spda_gain(scene: Scene, array: SpdaArray, endpoint) -> float:
    h = green_kernel(scene, endpoint, array.centers[:, 0], array.centers[:, 1])
    return float(array.element_area * np.sum(np.abs(h) ** 2))


def spda_rho(scene: Scene, array: SpdaArray) -> complex:
    x, z = array.centers[:, 0], array.centers[:, 1]
    hc = green_kernel(scene, Endpoint.CU, x, z)
    hs = green_kernel(scene, Endpoint.TARGET, x, z)
    return complex(array.element_area * np.sum(np.conj(hc) * hs))


def spda_channel(scene: Scene) -> tuple[ChannelGains, Correlation]:
    arrays = {a: spda_build(scene, a) for a in ApertureId}
    gains = ChannelGains(*(spda_gain(scene, arrays[g.aperture], g.endpoint) for g in Gain))
    rho = Correlation(spda_rho(scene, arrays[Rho.RHO_D.aperture]),
                      spda_rho(scene, arrays[Rho.RHO_U.aperture]))
    return gains, rho


@dataclass(frozen=True)
class SpdaRates:
    rates: dict
    dl_region: RateRegion
    ul_region: RateRegion


def spda_rates(scene: Scene, grid_n: int = 101) -> SpdaRates:
    """The eight corner rates and both regions with discrete-array channels."""
    gains, rho = spda_channel(scene)
    return SpdaRates(
        rates=corner_rates(scene, gains, rho),
        dl_region=dl_region(scene, grid_n, gains=gains, rho=rho),
        ul_region=ul_region(scene, grid_n, gains=gains, rho=rho),
    )


# -- FDSAC ---------------------------------------------------------------

@dataclass(frozen=True)
class FdsacSplit:
    """Sensing share of bandwidth (``kappa``) and downlink power (``iota``)."""

    kappa: float
    iota: float = 0.5

    def __post_init__(self):
        for name in ("kappa", "iota"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")


def _band_rate(share: float, snr: float) -> float:
    # share*log2(1 + snr/share), extended by 0 at share = 0
    return share * math.log2(1.0 + snr / share) if share > 0 else 0.0


def fdsac_dl(scene: Scene, gains: ChannelGains, split: FdsacSplit) -> RatePair:
    snr = EffectiveSnrs.from_scene(scene)
    big_l = scene.frame_len
    k, i = split.kappa, split.iota
    sr = _band_rate(k, i * big_l * snr.gamma_bar_s * gains.g_t * gains.g_r) / big_l
    cr = _band_rate(1.0 - k, (1.0 - i) * snr.gamma_bar_c * gains.g_d)
    return RatePair(sr=sr, cr=cr)


def fdsac_ul(scene: Scene, gains: ChannelGains, kappa: float) -> RatePair:
    split = FdsacSplit(kappa)
    snr = EffectiveSnrs.from_scene(scene)
    big_l = scene.frame_len
    sr = _band_rate(split.kappa, big_l * snr.gamma_tilde_s * gains.g_t * gains.g_r) / big_l
    cr = _band_rate(1.0 - split.kappa, snr.gamma_tilde_c * gains.g_u)
    return RatePair(sr=sr, cr=cr)


def pareto_frontier(pairs, params=None):
    """Non-dominated subset of ``pairs``, ordered by increasing ``cr``.

    Returns ``(frontier, frontier_params)``; among equal ``cr`` only the
    largest ``sr`` survives, and ``sr`` strictly decreases along the result.
    """
    params = list(range(len(pairs))) if params is None else list(params)
    # by cr descending, then sr descending; stable so ties keep input order
    order = sorted(range(len(pairs)), key=lambda n: (-pairs[n].cr, -pairs[n].sr))
    keep = []
    best_sr = -math.inf
    for n in order:
        if pairs[n].sr > best_sr:
            keep.append(n)
            best_sr = pairs[n].sr
    keep.reverse()
    return [pairs[n] for n in keep], [params[n] for n in keep]


def fdsac_dl_region(scene: Scene, grid_n: int = 41, *,
                    gains: ChannelGains | None = None) -> RateRegion:
    """Frontier of the FDSAC downlink pairs over a ``grid_n x grid_n`` (kappa, iota) grid."""
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    gains = channel_gains(scene) if gains is None else gains
    grid = np.linspace(0.0, 1.0, grid_n)
    params = [(float(k), float(i)) for k in grid for i in grid]
    pairs = [fdsac_dl(scene, gains, FdsacSplit(k, i)) for k, i in params]
    front, front_params = pareto_frontier(pairs, params)
    return RateRegion(
        boundary=tuple(front),
        corners={"S-C": front[0], "C-C": front[-1]},
        param_grid=tuple(front_params),
    )


def fdsac_ul_region(scene: Scene, grid_n: int = 101, *,
                    gains: ChannelGains | None = None) -> RateRegion:
    """FDSAC uplink boundary at ``grid_n`` uniform ``kappa``, from 1 down to 0."""
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    gains = channel_gains(scene) if gains is None else gains
    kappas = np.linspace(1.0, 0.0, grid_n)
    pairs = [fdsac_ul(scene, gains, float(k)) for k in kappas]
    return RateRegion(
        boundary=tuple(pairs),
        corners={"S-C": pairs[0], "C-C": pairs[-1]},
        param_grid=tuple(float(k) for k in kappas),
    )
