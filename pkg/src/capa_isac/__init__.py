"""Communication and sensing rates for continuous-aperture-array (CAPA) ISAC.

The package is organised bottom-up:

* :mod:`capa_isac.scene`     -- physical scene, geometry, config file format
* :mod:`capa_isac.channel`   -- Green's-function kernels, aperture gains, correlations
* :mod:`capa_isac.subspace`  -- 2-D signal-subspace beamforming and Rayleigh quotients
* :mod:`capa_isac.rates`     -- downlink/uplink rates and SR-CR regions
* :mod:`capa_isac.baselines` -- SPDA (discrete array) and FDSAC baselines
* :mod:`capa_isac.cli`       -- command-line front end
"""

from .scene import (
    ApertureId,
    ConfigError,
    DegenerateScene,
    DirectionCosines,
    PolarPosition,
    Scene,
    cartesian_center,
    default_scene,
    direction_cosines,
    dump_config,
    load_config,
    parse_config,
    random_scene,
)
from .channel import (
    ChannelGains,
    Correlation,
    Endpoint,
    Gain,
    NonConvergence,
    QuadratureSpec,
    Rho,
    channel_gains,
    channel_gains_oracle,
    correlations,
    correlations_oracle,
    gain_closed,
    gain_oracle,
    green_kernel,
    rho_chebyshev,
    rho_oracle,
)
from .subspace import (
    AchievedGammas,
    BeamWeights,
    DegenerateChannels,
    Regime,
    SubspaceGeometry,
    achieved_gammas,
    gram_schmidt_coeffs,
    kkt_pareto,
    pareto_grid_oracle,
    rayleigh_max,
)
from .rates import EffectiveSnrs, RatePair, RateRegion

__version__ = "0.1.0"
