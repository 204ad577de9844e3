"""Outage analysis of cooperative NOMA/OMA mmWave links at a road intersection.

Closed-form outage probabilities built on interference Laplace transforms,
cross-validated by an independent Monte Carlo simulator, with sweep
protocols, CSV output and figure rendering behind a CLI.
"""

from .analytic import (
    NomaParams,
    SirThresholds,
    kernel_exact,
    kernel_factorized,
    outage_o1,
    outage_o2,
    outage_oma,
    psi_values,
    threshold,
)
from .channel import (
    BeamParams,
    BlockageParams,
    FadingParams,
    PathLossParams,
    gamma_ccdf,
    los_probability,
    upsilon,
)
from .config import ScenarioConfig, build_config, load_config
from .errors import ConfigError, NumericalError
from .geometry import NodePolar, Position, distance, to_polar
from .laplace import laplace_closed, laplace_quadrature, laplace_taylor
from .montecarlo import OutageEstimate, TrialOutcome, estimate
from .pointprocess import InterferenceRealization, PppConfig, draw_realization
from .taylor import TaylorScalar

__version__ = "0.1.0"

__all__ = [
    "BeamParams",
    "BlockageParams",
    "ConfigError",
    "FadingParams",
    "InterferenceRealization",
    "NodePolar",
    "NomaParams",
    "NumericalError",
    "OutageEstimate",
    "PathLossParams",
    "Position",
    "PppConfig",
    "ScenarioConfig",
    "SirThresholds",
    "TaylorScalar",
    "TrialOutcome",
    "build_config",
    "distance",
    "draw_realization",
    "estimate",
    "gamma_ccdf",
    "kernel_exact",
    "kernel_factorized",
    "laplace_closed",
    "laplace_quadrature",
    "laplace_taylor",
    "load_config",
    "los_probability",
    "outage_o1",
    "outage_o2",
    "outage_oma",
    "psi_values",
    "threshold",
    "to_polar",
    "upsilon",
]
