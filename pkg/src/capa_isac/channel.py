"""Line-of-sight channel kernels and aperture integrals.

Every channel in the system is, on an aperture point ``(x, 0, z)``, the
radiating Green's function seen from one endpoint (the CU or the target)
weighted by the effective-aperture projection.  On the plane ``y = 0`` this
collapses to

    hhat_k(x, z) = j*eta*k0*sqrt(r_k*Psi_k/(4*pi)) * exp(-j*k0*sqrt(D)) / D**(3/4),
    D = x**2 + z**2 - 2*r_k*(Phi_k*x + Theta_k*z) + r_k**2,

so the four gains are squared-kernel integrals with a closed form and the two
correlations are integrals of ``conj(hhat_c) * hhat_s`` over the transmit
(``rho_d``) or receive (``rho_u``) aperture.  The closed forms are paired
with a brute-force adaptive Gauss-Legendre integrator that only sees the
kernels.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from .scene import ApertureId, Scene


class NonConvergence(RuntimeError):
    """The adaptive oracle hit its refinement cap before reaching tolerance."""


class Endpoint(str, enum.Enum):
    CU = "cu"
    TARGET = "target"


class Gain(str, enum.Enum):
    """The four aperture gains: which endpoint kernel, over which aperture."""

    G_D = "g_d"  # CU kernel over the transmit aperture
    G_T = "g_t"  # target kernel over the transmit aperture
    G_R = "g_r"  # target kernel over the receive aperture
    G_U = "g_u"  # CU kernel over the receive aperture

    @property
    def endpoint(self) -> Endpoint:
        return Endpoint.CU if self in (Gain.G_D, Gain.G_U) else Endpoint.TARGET

    @property
    def aperture(self) -> ApertureId:
        if self in (Gain.G_D, Gain.G_T):
            return ApertureId.TRANSMIT
        return ApertureId.RECEIVE


class Rho(str, enum.Enum):
    RHO_D = "rho_d"  # transmit aperture
    RHO_U = "rho_u"  # receive aperture

    @property
    def aperture(self) -> ApertureId:
        return ApertureId.TRANSMIT if self is Rho.RHO_D else ApertureId.RECEIVE


@dataclass(frozen=True)
class ChannelGains:
    g_d: float
    g_t: float
    g_r: float
    g_u: float

    def scaled(self, factor: float) -> "ChannelGains":
        return ChannelGains(self.g_d * factor, self.g_t * factor,
                            self.g_r * factor, self.g_u * factor)


@dataclass(frozen=True)
class Correlation:
    rho_d: complex
    rho_u: complex


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy knobs for the quadratures.

    ``cheby_n`` is the Chebyshev-Gauss node count per axis used for the
    correlations.  The rule converges as ``O(N**-2)``; ``N = 1600`` keeps
    the relative error near 1e-6 at the reference scene.  The oracle starts
    from a single 16x16 Gauss-Legendre panel and doubles the panel count per
    axis at every level until two successive estimates agree to
    ``oracle_rel_tol``.
    """

    cheby_n: int = 1600
    oracle_rel_tol: float = 1e-12
    oracle_max_level: int = 8
    oracle_order: int = 16

    def __post_init__(self):
        if self.cheby_n < 2:
            raise ValueError("cheby_n must be >= 2")
        if not 0.0 < self.oracle_rel_tol <= 1e-3:
            raise ValueError("oracle_rel_tol must lie in (0, 1e-3]")
        if self.oracle_max_level < 1:
            raise ValueError("oracle_max_level must be >= 1")


# -- kernels -------------------------------------------------------------

def _endpoint_params(scene: Scene, endpoint):
    endpoint = Endpoint(endpoint)
    pos = scene.cu if endpoint is Endpoint.CU else scene.target
    cos = scene.cu_cosines if endpoint is Endpoint.CU else scene.target_cosines
    return pos.r, cos


def green_kernel(scene: Scene, endpoint, x, z):
    """Complex kernel ``hhat_k(x, z)`` of the CU or target on the ``y = 0`` plane.

    ``x`` and ``z`` broadcast against each other.
    """
    r, c = _endpoint_params(scene, endpoint)
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    k0 = scene.k0
    d2 = x * x + z * z - 2.0 * r * (c.Phi * x + c.Theta * z) + r * r
    amp = scene.eta * k0 * math.sqrt(r * c.Psi / (4.0 * math.pi))
    return 1j * amp * np.exp(-1j * k0 * np.sqrt(d2)) / d2**0.75


def green_kernel_direct(scene: Scene, endpoint, x, z):
    """Same channel built from 3-D geometry: projection factor times Green's function.

    Evaluates ``sqrt(|e_y . (p - t)| / |p - t|) * g(p, t)`` with the
    radiating-only scalar Green's function
    ``g = -j*eta*k0*exp(-j*k0*|p - t|) / (4*pi*|p - t|)``.  The result times
    ``-sqrt(4*pi)`` equals :func:`green_kernel`, whose normalization the
    closed-form gains follow.
    """
    r, c = _endpoint_params(scene, endpoint)
    p = r * np.array([c.Phi, c.Psi, c.Theta])
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    dx, dy, dz = p[0] - x, p[1], p[2] - z
    dist = np.sqrt(dx * dx + dy * dy + dz * dz)
    k0 = scene.k0
    g = -1j * scene.eta * k0 * np.exp(-1j * k0 * dist) / (4.0 * math.pi * dist)
    return np.sqrt(abs(dy) / dist) * g


# -- closed-form gains ---------------------------------------------------

def _zeta(x, z, psi):
    return math.atan(x * z / (psi * math.sqrt(psi * psi + x * x + z * z)))


def gain_terms(scene: Scene, which) -> list[float]:
    """The four signed arctan terms of a gain, x-outer / z-inner order.

    Individual terms may be negative (e.g. an endpoint beyond the aperture
    edge); only their sum is a gain.
    """
    which = Gain(which)
    r, c = _endpoint_params(scene, which.endpoint)
    if which.aperture is ApertureId.TRANSMIT:
        xs = (c.Phi, scene.lx / r - c.Phi)
    else:
        xs = (-c.Phi, scene.lx / r + c.Phi)
    zs = (scene.lz / (2.0 * r) + c.Theta, scene.lz / (2.0 * r) - c.Theta)
    return [_zeta(x, z, c.Psi) for x in xs for z in zs]


def gain_closed(scene: Scene, which) -> float:
    """Closed-form aperture gain ``eta**2 k0**2 / (4 pi) * sum(zeta)``."""
    # fsum: the terms are O(1) and can nearly cancel for distant endpoints
    prefactor = scene.eta**2 * scene.k0**2 / (4.0 * math.pi)
    return prefactor * math.fsum(gain_terms(scene, which))


def channel_gains(scene: Scene) -> ChannelGains:
    return ChannelGains(*(gain_closed(scene, g) for g in Gain))


# -- Chebyshev-Gauss correlations ---------------------------------------

@lru_cache(maxsize=16)
def _chebyshev_nodes(n: int):
    k = np.arange(1, n + 1)
    xi = np.cos((2 * k - 1) * np.pi / (2 * n))
    xi.setflags(write=False)
    w = np.sqrt(1.0 - xi * xi)
    w.setflags(write=False)
    return xi, w


def _product_kernel(scene: Scene, x, z):
    return np.conj(green_kernel(scene, Endpoint.CU, x, z)) * green_kernel(
        scene, Endpoint.TARGET, x, z)


def rho_chebyshev(scene: Scene, which, n: int = QuadratureSpec.cheby_n) -> complex:
    """Correlation ``int conj(hhat_c) hhat_s`` by an ``n x n`` Chebyshev-Gauss rule."""
    which = Rho(which)
    if n < 2:
        raise ValueError("n must be >= 2")
    xi, w = _chebyshev_nodes(n)
    shift = 1.0 if which is Rho.RHO_D else -1.0
    xs = (xi + shift) / 2.0 * scene.lx
    zs = xi / 2.0 * scene.lz
    vals = _product_kernel(scene, xs[:, None], zs[None, :])
    total = w @ vals @ w
    return complex(math.pi**2 * scene.lx * scene.lz / (4.0 * n * n) * total)


def correlations(scene: Scene, n: int = QuadratureSpec.cheby_n) -> Correlation:
    return Correlation(rho_chebyshev(scene, Rho.RHO_D, n),
                       rho_chebyshev(scene, Rho.RHO_U, n))


# -- adaptive Gauss-Legendre oracle -------------------------------------

def _panel_rule(lo, hi, panels, order):
    t, w = leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = (edges[1:] - edges[:-1])[:, None] / 2.0
    mid = (edges[1:] + edges[:-1])[:, None] / 2.0
    return (mid + half * t).ravel(), (half * w).ravel()


def _tensor_gl(f, x_range, z_range, panels, order, block=1024):
    xs, wx = _panel_rule(*x_range, panels, order)
    zs, wz = _panel_rule(*z_range, panels, order)
    total = 0.0
    for i in range(0, xs.size, block):
        vals = f(xs[i:i + block, None], zs[None, :])
        total = total + wx[i:i + block] @ vals @ wz
    return total


def integrate_aperture(f, scene: Scene, aperture, spec: QuadratureSpec = QuadratureSpec()):
    """Adaptive tensor Gauss-Legendre integral of ``f(x, z)`` over one aperture.

    Real and imaginary parts must each settle to ``spec.oracle_rel_tol``
    relative to the modulus of the estimate.

    Raises
    ------
    NonConvergence
        If ``spec.oracle_max_level`` refinements do not reach the tolerance.
    """
    x_range = ApertureId(aperture).x_range(scene.lx)
    z_range = (-scene.lz / 2.0, scene.lz / 2.0)
    prev = _tensor_gl(f, x_range, z_range, 1, spec.oracle_order)
    for level in range(1, spec.oracle_max_level + 1):
        cur = _tensor_gl(f, x_range, z_range, 2**level, spec.oracle_order)
        diff = cur - prev
        scale = abs(cur)
        if (abs(np.real(diff)) <= spec.oracle_rel_tol * scale
                and abs(np.imag(diff)) <= spec.oracle_rel_tol * scale):
            return cur
        prev = cur
    raise NonConvergence(
        f"no convergence to {spec.oracle_rel_tol:g} after {spec.oracle_max_level} levels "
        f"(last change {abs(diff):.3e} of {abs(cur):.3e})")


def gain_oracle(scene: Scene, which, spec: QuadratureSpec = QuadratureSpec()) -> float:
    which = Gain(which)

    def integrand(x, z):
        return np.abs(green_kernel(scene, which.endpoint, x, z)) ** 2

    return float(integrate_aperture(integrand, scene, which.aperture, spec))


def rho_oracle(scene: Scene, which, spec: QuadratureSpec = QuadratureSpec(),
               conj_target: bool = False) -> complex:
    """Brute-force correlation over the aperture of ``which``.

    With ``conj_target`` the conjugation moves to the target kernel, which
    yields the complex conjugate of the correlation.
    """
    which = Rho(which)

    def integrand(x, z):
        hc = green_kernel(scene, Endpoint.CU, x, z)
        hs = green_kernel(scene, Endpoint.TARGET, x, z)
        return hc * np.conj(hs) if conj_target else np.conj(hc) * hs

    return complex(integrate_aperture(integrand, scene, which.aperture, spec))


def channel_gains_oracle(scene: Scene, spec: QuadratureSpec = QuadratureSpec()) -> ChannelGains:
    return ChannelGains(*(gain_oracle(scene, g, spec) for g in Gain))


def correlations_oracle(scene: Scene, spec: QuadratureSpec = QuadratureSpec()) -> Correlation:
    return Correlation(rho_oracle(scene, Rho.RHO_D, spec), rho_oracle(scene, Rho.RHO_U, spec))
