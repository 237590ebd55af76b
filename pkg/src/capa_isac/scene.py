"""Physical scene description, geometry helpers and the scene config format.

Conventions used everywhere in the package:

* lengths in meters, angles in radians, SNRs as linear power ratios;
* the transmit CAPA occupies ``x in [0, Lx]`` and the receive CAPA
  ``x in [-Lx, 0]``, both with ``z in [-Lz/2, Lz/2]`` on the ``y = 0`` plane;
* the wavenumber ``k0 = 2*pi/wavelength`` is always derived, never stored.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Below this the projected aperture seen from the point vanishes.
_MIN_PSI = 1e-9


class DegenerateScene(ValueError):
    """A CU or target lies (numerically) in the array plane, Psi = 0."""


class ConfigError(ValueError):
    """Malformed or invalid scene config file.

    Attributes
    ----------
    line : int or None
        1-based line number the error refers to, if any.
    key : str or None
        Offending key, if any.
    """

    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class PolarPosition:
    """Point given as (distance, elevation, azimuth) from the array origin."""

    r: float
    theta: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r > 0):
            raise ValueError(f"r must be positive, got {self.r}")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi <= math.pi:
            raise ValueError(f"phi must lie in [0, pi], got {self.phi}")


@dataclass(frozen=True)
class DirectionCosines:
    Phi: float
    Psi: float
    Theta: float


class ApertureId(enum.Enum):
    """The two base-station apertures, placed edge to edge along x."""

    TRANSMIT = "transmit"
    RECEIVE = "receive"

    def x_range(self, lx):
        return (0.0, lx) if self is ApertureId.TRANSMIT else (-lx, 0.0)


def direction_cosines(p: PolarPosition) -> DirectionCosines:
    st = math.sin(p.theta)
    return DirectionCosines(
        Phi=math.cos(p.phi) * st,
        Psi=math.sin(p.phi) * st,
        Theta=math.cos(p.theta),
    )


def cartesian_center(p: PolarPosition) -> np.ndarray:
    """Cartesian coordinates ``r * (Phi, Psi, Theta)`` of a polar position."""
    c = direction_cosines(p)
    return p.r * np.array([c.Phi, c.Psi, c.Theta])


@dataclass(frozen=True)
class Scene:
    """Full physical configuration of the CAPA ISAC link.

    Parameters
    ----------
    wavelength : float
        Carrier wavelength in meters.
    lx, lz : float
        Edge lengths of each (transmit and receive) CAPA in meters.
    cu, target : PolarPosition
        Centre of the communication user's aperture and the point target.
    cu_aperture_area : float
        Area of the CU antenna aperture in m^2.
    snr_dl_c, snr_dl_s : float
        Downlink transmit SNRs ``P/sigma_c^2`` and ``P/sigma_s^2`` (linear).
    snr_ul_c, snr_ul_s : float
        Uplink SNRs ``P_c/sigma^2`` and ``P_s/sigma^2`` (linear).
    frame_len : int
        Frame / pulse length ``L``.
    alpha_s : float
        Mean radar cross section of the target.
    eta : float
        Wave impedance in ohms.
    """

    wavelength: float
    lx: float
    lz: float
    cu: PolarPosition
    target: PolarPosition
    cu_aperture_area: float
    snr_dl_c: float
    snr_dl_s: float
    snr_ul_c: float
    snr_ul_s: float
    frame_len: int
    alpha_s: float
    eta: float = 120.0 * math.pi

    def __post_init__(self):
        positive = ("wavelength", "lx", "lz", "cu_aperture_area", "snr_dl_c",
                    "snr_dl_s", "snr_ul_c", "snr_ul_s", "alpha_s", "eta")
        for name in positive:
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value}")
        if int(self.frame_len) != self.frame_len or self.frame_len < 1:
            raise ValueError(f"frame_len must be a positive integer, got {self.frame_len}")
        for name in ("cu", "target"):
            if direction_cosines(getattr(self, name)).Psi < _MIN_PSI:
                raise DegenerateScene(f"{name} lies in the array plane (Psi = 0)")

    @property
    def k0(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def cu_cosines(self) -> DirectionCosines:
        return direction_cosines(self.cu)

    @property
    def target_cosines(self) -> DirectionCosines:
        return direction_cosines(self.target)

    def replace(self, **changes) -> "Scene":
        return dataclasses.replace(self, **changes)

    def with_snr_db(self, snr_db: float) -> "Scene":
        """Copy with all four SNRs set to the same value given in dB."""
        lin = db_to_linear(snr_db)
        return self.replace(snr_dl_c=lin, snr_dl_s=lin, snr_ul_c=lin, snr_ul_s=lin)

    def with_side(self, side: float) -> "Scene":
        """Copy with square apertures of edge ``side``."""
        return self.replace(lx=side, lz=side)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(lin: float) -> float:
    return 10.0 * math.log10(lin)


def default_scene() -> Scene:
    """The reference configuration of the numerical study."""
    wavelength = 0.125
    snr = db_to_linear(10.0)
    return Scene(
        wavelength=wavelength,
        lx=0.5,
        lz=0.5,
        cu=PolarPosition(20.0, math.pi / 3, math.pi / 3),
        target=PolarPosition(10.0, math.pi / 4, math.pi / 4),
        cu_aperture_area=wavelength**2 / (4.0 * math.pi),
        snr_dl_c=snr,
        snr_dl_s=snr,
        snr_ul_c=snr,
        snr_ul_s=snr,
        frame_len=8,
        alpha_s=1.0,
    )


def random_scene(rng: np.random.Generator, base: Scene | None = None) -> Scene:
    """Draw a scene for randomized property checks.

    Distances are uniform in [5, 50] m, both angles of both endpoints in
    [pi/6, 5*pi/6] and the (square) aperture side in [0.1, 0.5] m; the
    remaining fields come from ``base`` (the default scene if omitted).
    """
    base = default_scene() if base is None else base

    def pos():
        r = rng.uniform(5.0, 50.0)
        theta, phi = rng.uniform(math.pi / 6, 5 * math.pi / 6, size=2)
        return PolarPosition(float(r), float(theta), float(phi))

    side = float(rng.uniform(0.1, 0.5))
    return base.replace(cu=pos(), target=pos(), lx=side, lz=side)


# -- config file ---------------------------------------------------------
#
# Flat ``key = value`` lines; ``#`` starts a comment.  SNRs are in dB,
# angles in radians.

_REQUIRED_KEYS = (
    "lambda_m", "lx_m", "lz_m",
    "cu.r_m", "cu.theta_rad", "cu.phi_rad",
    "target.r_m", "target.theta_rad", "target.phi_rad",
    "snr_dl_c_db", "snr_dl_s_db", "snr_ul_c_db", "snr_ul_s_db",
    "frame_len", "alpha_s",
)
_OPTIONAL_KEYS = ("cu_aperture_area_m2",)
CONFIG_KEYS = _REQUIRED_KEYS + _OPTIONAL_KEYS


def parse_config(text: str) -> Scene:
    values = {}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, _, value = (s.strip() for s in line.partition("="))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno, key)
        if key in values:
            raise ConfigError(f"duplicate key {key!r} (first on line {lines[key]})",
                              lineno, key)
        try:
            values[key] = int(value) if key == "frame_len" else float(value)
        except ValueError:
            raise ConfigError(f"bad value {value!r} for key {key!r}", lineno, key) from None
        lines[key] = lineno

    missing = [k for k in _REQUIRED_KEYS if k not in values]
    if missing:
        raise ConfigError(f"missing required key {missing[0]!r}", key=missing[0])

    wavelength = values["lambda_m"]
    try:
        cu = PolarPosition(values["cu.r_m"], values["cu.theta_rad"], values["cu.phi_rad"])
        target = PolarPosition(values["target.r_m"], values["target.theta_rad"],
                               values["target.phi_rad"])
        return Scene(
            wavelength=wavelength,
            lx=values["lx_m"],
            lz=values["lz_m"],
            cu=cu,
            target=target,
            cu_aperture_area=values.get("cu_aperture_area_m2",
                                        wavelength**2 / (4.0 * math.pi)),
            snr_dl_c=db_to_linear(values["snr_dl_c_db"]),
            snr_dl_s=db_to_linear(values["snr_dl_s_db"]),
            snr_ul_c=db_to_linear(values["snr_ul_c_db"]),
            snr_ul_s=db_to_linear(values["snr_ul_s_db"]),
            frame_len=values["frame_len"],
            alpha_s=values["alpha_s"],
        )
    except ValueError as exc:
        raise ConfigError(f"invalid scene: {exc}") from exc


def load_config(path) -> Scene:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def dump_config(scene: Scene) -> str:
    """Serialize ``scene`` in the config format (floats written with ``repr``).

    The wave impedance is not part of the format; scenes with a non-default
    ``eta`` cannot be written.
    """
    if scene.eta != 120.0 * math.pi:
        raise ValueError("config format has no key for a non-default eta")
    items = [
        ("lambda_m", scene.wavelength),
        ("lx_m", scene.lx),
        ("lz_m", scene.lz),
        ("cu.r_m", scene.cu.r),
        ("cu.theta_rad", scene.cu.theta),
        ("cu.phi_rad", scene.cu.phi),
        ("target.r_m", scene.target.r),
        ("target.theta_rad", scene.target.theta),
        ("target.phi_rad", scene.target.phi),
        ("snr_dl_c_db", linear_to_db(scene.snr_dl_c)),
        ("snr_dl_s_db", linear_to_db(scene.snr_dl_s)),
        ("snr_ul_c_db", linear_to_db(scene.snr_ul_c)),
        ("snr_ul_s_db", linear_to_db(scene.snr_ul_s)),
        ("frame_len", scene.frame_len),
        ("alpha_s", scene.alpha_s),
        ("cu_aperture_area_m2", scene.cu_aperture_area),
    ]
    return "".join(
        f"{k} = {int(v) if k == 'frame_len' else float(v)!r}\n" for k, v in items
    )
