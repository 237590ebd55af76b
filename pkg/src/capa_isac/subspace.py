"""Two-dimensional signal-subspace beamforming.

Every optimal beamformer or detector in the system lies in the span of two
channel functions, so all optimisation happens on 2-vectors.  A pair of
channels is summarised by a :class:`SubspaceGeometry` ``(g1, g2, rho)``:
their squared norms and their inner product.  Gram-Schmidt coordinates
``c1 = (sqrt(g1), 0)`` and ``c2 = (conj(rho)/sqrt(g1), sqrt(g2 - |rho|**2/g1))``
reproduce that geometry with ``g1 = vdot(c1, c1)``, ``g2 = vdot(c2, c2)`` and
``rho = vdot(c2, c1)``.  A beamformer with coordinates ``w`` then achieves
gains ``|vdot(c1, w)|**2`` and ``|vdot(c2, w)|**2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh


_CS_SLACK = 1e-4


class DegenerateChannels(ValueError):
    """The interior Pareto weights are undefined (parallel channels)."""


@dataclass(frozen=True)
class SubspaceGeometry:
    """Squared norms of two channels and their inner product."""

    g1: float
    g2: float
    rho: complex

    def __post_init__(self):
        if not (self.g1 > 0 and self.g2 > 0 and math.isfinite(self.g1) and math.isfinite(self.g2)):
            raise ValueError(f"norms must be positive and finite, got {self.g1}, {self.g2}")
        # slack: rho comes from a quadrature, the norms from closed forms;
        # rho_abs clamps the excess
        if abs(self.rho) ** 2 > self.g1 * self.g2 * (1.0 + _CS_SLACK):
            raise ValueError("|rho|^2 exceeds g1*g2 (Cauchy-Schwarz)")

    @property
    def rho_abs(self) -> float:
        return min(abs(self.rho), math.sqrt(self.g1 * self.g2))

    @property
    def eps_lo(self) -> float:
        """Largest eps for which the sensing-only beam is Pareto optimal."""
        r2 = self.rho_abs**2
        return r2 / (r2 + self.g2**2)

    @property
    def eps_hi(self) -> float:
        """Smallest eps for which the communication-only beam is Pareto optimal."""
        r2 = self.rho_abs**2
        return self.g1**2 / (self.g1**2 + r2)


class Regime(enum.Enum):
    SENSING_ENDPOINT = "sensing_endpoint"
    INTERIOR = "interior"
    COMM_ENDPOINT = "comm_endpoint"


@dataclass(frozen=True)
class BeamWeights:
    """Beamformer ``(upsilon1*u1 + upsilon2*exp(j*phase)*u2)/tau`` on the two channel directions."""

    upsilon1: float
    upsilon2: float
    tau: float
    phase: float
    regime: Regime

    def __post_init__(self):
        if self.upsilon1 < 0 or self.upsilon2 < 0:
            raise ValueError("weights must be non-negative")
        if not self.tau > 0:
            raise ValueError("tau must be positive")


@dataclass(frozen=True)
class AchievedGammas:
    gamma_c_hat: float
    gamma_s_hat: float


def gram_schmidt_coeffs(geo: SubspaceGeometry) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal-basis coordinates of the two channels.

    For parallel channels the second coordinate of ``c2`` is zero.
    """
    s1 = math.sqrt(geo.g1)
    c1 = np.array([s1, 0.0], dtype=complex)
    perp = max(geo.g2 - geo.rho_abs**2 / geo.g1, 0.0)
    c2 = np.array([np.conj(geo.rho) / s1, math.sqrt(perp)], dtype=complex)
    return c1, c2


def _weights(u1, u2, geo, regime, phase):
    tau2 = u1 * u1 * geo.g1 + u2 * u2 * geo.g2 + 2.0 * u1 * u2 * geo.rho_abs
    return BeamWeights(u1, u2, math.sqrt(tau2), phase, regime)


def interior_weights(eps: float, geo: SubspaceGeometry) -> BeamWeights:
    """Interior-regime weights, evaluated for any ``eps`` in [0, 1].

    Raises
    ------
    DegenerateChannels
        If the common denominator is not positive.
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    r = geo.rho_abs
    se, sc = math.sqrt(eps), math.sqrt(1.0 - eps)
    den = (1.0 - eps) * geo.g1 + eps * geo.g2 - 2.0 * se * sc * r
    if not den > 0:
        raise DegenerateChannels(f"interior denominator {den:.3e} <= 0 at eps={eps}")
    u1 = max((se * geo.g2 - sc * r) / den, 0.0)
    u2 = max((sc * geo.g1 - se * r) / den, 0.0)
    return _weights(u1, u2, geo, Regime.INTERIOR, float(np.angle(geo.rho)))


def kkt_pareto(eps: float, geo: SubspaceGeometry) -> BeamWeights:
    """Closed-form Pareto-optimal beam for the trade-off weight ``eps``.

    ``eps = 1`` favours communication and ``eps = 0`` sensing.  Both
    threshold intervals are closed; at a threshold the interior formula
    agrees with the endpoint.
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    phase = float(np.angle(geo.rho))
    if eps <= geo.eps_lo:
        return _weights(0.0, 1.0, geo, Regime.SENSING_ENDPOINT, phase)
    if eps >= geo.eps_hi:
        return _weights(1.0, 0.0, geo, Regime.COMM_ENDPOINT, phase)
    return interior_weights(eps, geo)


def beam_coefficients(w: BeamWeights, geo: SubspaceGeometry) -> np.ndarray:
    """Coordinates of the beamformer in the Gram-Schmidt basis."""
    c1, c2 = gram_schmidt_coeffs(geo)
    return (w.upsilon1 * c1 + w.upsilon2 * np.exp(1j * w.phase) * c2) / w.tau


def achieved_gammas(w: BeamWeights, geo: SubspaceGeometry) -> AchievedGammas:
    r = geo.rho_abs
    gc = (w.upsilon1 * geo.g1 + w.upsilon2 * r) ** 2 / w.tau**2
    gs = (w.upsilon1 * r + w.upsilon2 * geo.g2) ** 2 / w.tau**2
    return AchievedGammas(gc, gs)


def pareto_objective(eps: float, gammas: AchievedGammas) -> float:
    """``min(gamma_c/eps, gamma_s/(1 - eps))``, a zero weight dropping its term."""
    return float(_objective(eps, np.asarray(gammas.gamma_c_hat), np.asarray(gammas.gamma_s_hat)))


def _objective(eps, gc, gs):
    tc = gc / eps if eps > 0 else np.full_like(gc, np.inf)
    ts = gs / (1.0 - eps) if eps < 1 else np.full_like(gs, np.inf)
    return np.minimum(tc, ts)


def _grid_eval(eps, c1, c2, a, b):
    ca = np.cos(a)[:, None]
    sa = np.sin(a)[:, None]
    phase = np.exp(1j * b)[None, :]
    # |vdot(c, w)|^2 with w = (cos a, sin a * e^{jb})
    gc = np.abs(np.conj(c1[0]) * ca + np.conj(c1[1]) * sa * phase) ** 2
    gs = np.abs(np.conj(c2[0]) * ca + np.conj(c2[1]) * sa * phase) ** 2
    return _objective(eps, gc, gs)


_MAX_SLIDES = 1000


def pareto_grid_oracle(eps: float, geo: SubspaceGeometry, grid_n: int = 2000,
                       refine: int = 2) -> tuple[float, np.ndarray]:
    """Brute-force Pareto search over unit-norm 2-D beamformers.

    Scans ``w = (cos a, sin a * exp(j b))`` on a ``grid_n x grid_n`` grid,
    then ``refine`` times rescans a window of two coarse steps either side of
    the best point at ten (``b``) and a thousand (``a``) times finer spacing,
    re-centring the window until it no longer improves.  Ties go to the smallest ``(a, b)``
    index.

    Returns
    -------
    gamma : float
        Best objective ``min(gamma_c/eps, gamma_s/(1 - eps))``.
    w : ndarray
        The maximising beamformer coordinates.
    """
    if grid_n < 100:
        raise ValueError("grid_n must be >= 100")
    c1, c2 = gram_schmidt_coeffs(geo)
    a = np.linspace(0.0, math.pi / 2, grid_n)
    b = np.linspace(-math.pi, math.pi, grid_n, endpoint=False)
    da, db = a[1] - a[0], b[1] - b[0]
    vals = _grid_eval(eps, c1, c2, a, b)
    i, j = np.unravel_index(np.argmax(vals), vals.shape)
    best_a, best_b, best = a[i], b[j], vals[i, j]
    for _ in range(refine):
        # The objective is a ridge, steep in a and flat along b, so the coarse
        # argmax can sit far along it: a gets a 1000x finer window so the
        # search can follow the ridge, and the window slides until it stops
        # improving before shrinking.
        for _ in range(_MAX_SLIDES):
            fa = np.clip(np.linspace(best_a - 2 * da, best_a + 2 * da, 4001), 0.0, math.pi / 2)
            fb = np.linspace(best_b - 2 * db, best_b + 2 * db, 41)
            vals = _grid_eval(eps, c1, c2, fa, fb)
            i, j = np.unravel_index(np.argmax(vals), vals.shape)
            if vals[i, j] <= best:
                break
            best_a, best_b, best = fa[i], fb[j], vals[i, j]
        da, db = da / 10.0, db / 10.0
    w = np.array([math.cos(best_a), math.sin(best_a) * np.exp(1j * best_b)])
    return float(best), w


def rayleigh_max(a_norm_sq: float, h_norm_sq: float, cross: complex, gamma_scale: float) -> float:
    """Maximum of ``|<w, a>|^2 / (gamma_scale*|<w, h>|^2 + ||w||^2)`` over ``w``.

    ``cross`` is the inner product of the two channels; only its modulus
    matters.
    """
    if not (a_norm_sq > 0 and h_norm_sq > 0):
        raise ValueError("norms must be positive")
    if gamma_scale < 0:
        raise ValueError("gamma_scale must be non-negative")
    return a_norm_sq - gamma_scale * abs(cross) ** 2 / (1.0 + gamma_scale * h_norm_sq)


def rayleigh_eig_oracle(a_norm_sq: float, h_norm_sq: float, cross: complex,
                        gamma_scale: float) -> float:
    """Largest generalized eigenvalue of ``(a a^H, gamma_scale h h^H + I)`` in 2-D."""
    geo = SubspaceGeometry(h_norm_sq, a_norm_sq, cross)
    h_vec, a_vec = gram_schmidt_coeffs(geo)
    lhs = np.outer(a_vec, np.conj(a_vec))
    rhs = gamma_scale * np.outer(h_vec, np.conj(h_vec)) + np.eye(2)
    return float(eigh(lhs, rhs, eigvals_only=True)[-1])
