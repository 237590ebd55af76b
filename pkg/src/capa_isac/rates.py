"""Downlink and uplink communication (CR) and sensing (SR) rates.

Rates are in bits per channel use.  Every function takes the scene (for the
SNRs and frame length) plus precomputed channel gains and correlations, so
the same formulas serve the CAPA and the discrete-array baseline.

Downlink designs: C-C (beam matched to the CU), S-C (beam matched to the
target) and the Pareto family between them.  Uplink designs: the two SIC
orders, C-C decoding sensing first and S-C decoding communication first,
plus time sharing between them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelGains, Correlation, channel_gains, correlations
from .scene import Scene
from .subspace import (
    DegenerateChannels,
    SubspaceGeometry,
    achieved_gammas,
    kkt_pareto,
    pareto_objective,
    rayleigh_max,
)


@dataclass(frozen=True)
class EffectiveSnrs:
    """Receive SNRs folded with the CU aperture area or the target RCS."""

    gamma_bar_c: float
    gamma_bar_s: float
    gamma_tilde_c: float
    gamma_tilde_s: float

    @classmethod
    def from_scene(cls, scene: Scene) -> "EffectiveSnrs":
        area = abs(scene.cu_aperture_area)
        return cls(
            gamma_bar_c=scene.snr_dl_c * area,
            gamma_bar_s=scene.snr_dl_s * scene.alpha_s,
            gamma_tilde_c=scene.snr_ul_c * area,
            gamma_tilde_s=scene.snr_ul_s * scene.alpha_s,
        )


@dataclass(frozen=True)
class RatePair:
    sr: float
    cr: float

    def __post_init__(self):
        for name in ("sr", "cr"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and non-negative, got {v}")


_ORDER_TOL = 1e-9


@dataclass(frozen=True)
class RateRegion:
    """Down-closed SR-CR region given by its sampled Pareto boundary.

    ``boundary`` runs by increasing ``cr`` with ``sr`` non-increasing;
    ``param_grid[i]`` is the design parameter that produced ``boundary[i]``.
    Between samples the boundary is linear.
    """

    boundary: tuple[RatePair, ...]
    corners: dict = field(default_factory=dict)
    param_grid: tuple[float, ...] = ()

    def __post_init__(self):
        if not self.boundary:
            raise ValueError("empty boundary")
        if self.param_grid and len(self.param_grid) != len(self.boundary):
            raise ValueError("param_grid and boundary lengths differ")
        cr = np.array([p.cr for p in self.boundary])
        sr = np.array([p.sr for p in self.boundary])
        scale = max(cr.max(), sr.max(), 1.0)
        if np.any(np.diff(cr) < -_ORDER_TOL * scale):
            raise ValueError("boundary cr must be non-decreasing")
        if np.any(np.diff(sr) > _ORDER_TOL * scale):
            raise ValueError("boundary sr must be non-increasing")
        for label, pair in self.corners.items():
            if pair not in self.boundary:
                raise ValueError(f"corner {label!r} is not on the boundary")

    def sr_at(self, cr: float) -> float:
        """Largest SR in the region at communication rate ``cr`` (-inf beyond it)."""
        xs = np.array([p.cr for p in self.boundary])
        ys = np.array([p.sr for p in self.boundary])
        if cr > xs[-1]:
            return -math.inf
        # equal cr samples: keep the largest sr so np.interp sees a function
        ux, inv = np.unique(xs, return_inverse=True)
        uy = np.full(ux.shape, -np.inf)
        np.maximum.at(uy, inv, ys)
        return float(np.interp(cr, ux, uy, left=uy[0]))

    def contains(self, pair: RatePair, tol: float = 1e-9) -> bool:
        scale = max(self.boundary[-1].cr, self.boundary[0].sr, 1.0)
        t = tol * scale
        max_cr = self.boundary[-1].cr
        if pair.cr > max_cr + t:
            return False
        return pair.sr <= self.sr_at(min(pair.cr, max_cr)) + t

    def contains_region(self, other: "RateRegion", tol: float = 1e-9) -> bool:
        """Boundary dominance: every boundary sample of ``other`` lies in ``self``."""
        return all(self.contains(p, tol) for p in other.boundary)


# -- scalar rate maps ----------------------------------------------------

def comm_rate(snr_gain: float) -> float:
    return math.log2(1.0 + snr_gain)


def sensing_rate(snr_gain: float, frame_len: int) -> float:
    """``(1/L) log2(1 + L*x)``, the per-symbol sensing mutual information."""
    return math.log2(1.0 + frame_len * snr_gain) / frame_len


# -- downlink ------------------------------------------------------------

def dl_cr_cc(scene: Scene, gains: ChannelGains) -> float:
    return comm_rate(EffectiveSnrs.from_scene(scene).gamma_bar_c * gains.g_d)


def dl_sr_cc(scene: Scene, gains: ChannelGains, rho_d: complex) -> float:
    snr = EffectiveSnrs.from_scene(scene)
    return sensing_rate(snr.gamma_bar_s * gains.g_r * abs(rho_d) ** 2 / gains.g_d,
                        scene.frame_len)


def dl_sr_sc(scene: Scene, gains: ChannelGains) -> float:
    snr = EffectiveSnrs.from_scene(scene)
    return sensing_rate(snr.gamma_bar_s * gains.g_t * gains.g_r, scene.frame_len)


def dl_cr_sc(scene: Scene, gains: ChannelGains, rho_d: complex) -> float:
    return comm_rate(EffectiveSnrs.from_scene(scene).gamma_bar_c * abs(rho_d) ** 2 / gains.g_t)


def dl_geometry(gains: ChannelGains, rho_d: complex) -> SubspaceGeometry:
    """Subspace of the CU and target channels on the transmit aperture."""
    return SubspaceGeometry(gains.g_d, gains.g_t, rho_d)


def _pair_from_gammas(scene, gains, gammas) -> RatePair:
    snr = EffectiveSnrs.from_scene(scene)
    return RatePair(
        sr=sensing_rate(snr.gamma_bar_s * gammas.gamma_s_hat * gains.g_r, scene.frame_len),
        cr=comm_rate(snr.gamma_bar_c * gammas.gamma_c_hat),
    )


def dl_pareto_pair(scene: Scene, gains: ChannelGains, rho_d: complex, eps: float) -> RatePair:
    """Rates of the Pareto-optimal beam for trade-off weight ``eps``.

    Raises
    ------
    DegenerateChannels
        From the interior weights when the channels are parallel.
    """
    geo = dl_geometry(gains, rho_d)
    return _pair_from_gammas(scene, gains, achieved_gammas(kkt_pareto(eps, geo), geo))


def _endpoint_fallback(scene, gains, rho_d, eps) -> RatePair:
    # parallel channels: keep the endpoint beam with the larger objective
    geo = dl_geometry(gains, rho_d)
    best = max(
        (achieved_gammas(kkt_pareto(e, geo), geo) for e in (0.0, 1.0)),
        key=lambda g: pareto_objective(eps, g),
    )
    return _pair_from_gammas(scene, gains, best)


def _channels(scene, gains, rho):
    gains = channel_gains(scene) if gains is None else gains
    rho = correlations(scene) if rho is None else rho
    return gains, rho


def dl_region(scene: Scene, grid_n: int = 101, *, gains: ChannelGains | None = None,
              rho: Correlation | None = None) -> RateRegion:
    """Downlink Pareto boundary sampled at ``grid_n`` uniform ``eps`` in [0, 1]."""
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    gains, rho = _channels(scene, gains, rho)
    eps_grid = np.linspace(0.0, 1.0, grid_n)
    pairs = []
    for eps in eps_grid:
        try:
            pairs.append(dl_pareto_pair(scene, gains, rho.rho_d, float(eps)))
        except DegenerateChannels:
            pairs.append(_endpoint_fallback(scene, gains, rho.rho_d, float(eps)))
    return RateRegion(
        boundary=tuple(pairs),
        corners={"S-C": pairs[0], "C-C": pairs[-1]},
        param_grid=tuple(float(e) for e in eps_grid),
    )


# -- uplink --------------------------------------------------------------

def ul_sr_cc(scene: Scene, gains: ChannelGains, rho_u: complex) -> float:
    """Sensing decoded first, with the communication signal as interference."""
    snr = EffectiveSnrs.from_scene(scene)
    eff = rayleigh_max(gains.g_r, gains.g_u, rho_u, snr.gamma_tilde_c)
    return sensing_rate(snr.gamma_tilde_s * gains.g_t * eff, scene.frame_len)


def ul_cr_cc(scene: Scene, gains: ChannelGains) -> float:
    return comm_rate(EffectiveSnrs.from_scene(scene).gamma_tilde_c * gains.g_u)


def ul_cr_sc(scene: Scene, gains: ChannelGains, rho_u: complex) -> float:
    """Communication decoded first, with the target echo as interference."""
    snr = EffectiveSnrs.from_scene(scene)
    eff = rayleigh_max(gains.g_u, gains.g_r, np.conj(rho_u), snr.gamma_tilde_s * gains.g_t)
    return comm_rate(snr.gamma_tilde_c * eff)


def ul_sr_sc(scene: Scene, gains: ChannelGains) -> float:
    snr = EffectiveSnrs.from_scene(scene)
    return sensing_rate(snr.gamma_tilde_s * gains.g_t * gains.g_r, scene.frame_len)


def ul_timeshare_pair(scene: Scene, gains: ChannelGains, rho_u: complex,
                      sigma: float) -> RatePair:
    """Use the S-C order a fraction ``sigma`` of the time, C-C otherwise."""
    if not 0.0 <= sigma <= 1.0:
        raise ValueError(f"sigma must lie in [0, 1], got {sigma}")
    sr = sigma * ul_sr_sc(scene, gains) + (1.0 - sigma) * ul_sr_cc(scene, gains, rho_u)
    cr = sigma * ul_cr_sc(scene, gains, rho_u) + (1.0 - sigma) * ul_cr_cc(scene, gains)
    return RatePair(sr=sr, cr=cr)


def ul_region(scene: Scene, grid_n: int = 101, *, gains: ChannelGains | None = None,
              rho: Correlation | None = None) -> RateRegion:
    """Uplink time-sharing boundary at ``grid_n`` uniform ``sigma`` in [0, 1].

    Samples run from ``sigma = 1`` to ``0`` so that ``cr`` increases.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    gains, rho = _channels(scene, gains, rho)
    sigmas = np.linspace(1.0, 0.0, grid_n)
    pairs = [ul_timeshare_pair(scene, gains, rho.rho_u, float(s)) for s in sigmas]
    return RateRegion(
        boundary=tuple(pairs),
        corners={"S-C": pairs[0], "C-C": pairs[-1]},
        param_grid=tuple(float(s) for s in sigmas),
    )


CORNER_KEYS = ("dl_cc_cr", "dl_sc_cr", "dl_cc_sr", "dl_sc_sr",
               "ul_cc_cr", "ul_sc_cr", "ul_cc_sr", "ul_sc_sr")


def corner_rates(scene: Scene, gains: ChannelGains, rho: Correlation) -> dict[str, float]:
    """The eight C-C / S-C rates, keyed as in :data:`CORNER_KEYS`."""
    return {
        "dl_cc_cr": dl_cr_cc(scene, gains),
        "dl_sc_cr": dl_cr_sc(scene, gains, rho.rho_d),
        "dl_cc_sr": dl_sr_cc(scene, gains, rho.rho_d),
        "dl_sc_sr": dl_sr_sc(scene, gains),
        "ul_cc_cr": ul_cr_cc(scene, gains),
        "ul_sc_cr": ul_cr_sc(scene, gains, rho.rho_u),
        "ul_cc_sr": ul_sr_cc(scene, gains, rho.rho_u),
        "ul_sc_sr": ul_sr_sc(scene, gains),
    }

