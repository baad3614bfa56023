"""Raman cooling and coherent sideband dynamics of a quantum-dot nuclear-spin ensemble.

Subpackages:

* core        -- parameter types, units, config parsing
* cooling     -- semiclassical drift/diffusion rate model and figures of merit
* dynamics    -- coherent 10-level master-equation propagation
* thermometry -- spin-temperature inference from polarization variance
* analysis    -- fitting utilities for measured and simulated traces
* cli         -- command-line entry points
"""

from .core import (
    CONSTANTS,
    ConfigError,
    ConvergenceError,
    DegenerateRateError,
    DriveSettings,
    ModelParams,
    NucoolError,
    RunConfig,
    UnphysicalDampingError,
    ValidationError,
    load_config,
    serialize,
)

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS",
    "ConfigError",
    "ConvergenceError",
    "DegenerateRateError",
    "DriveSettings",
    "ModelParams",
    "NucoolError",
    "RunConfig",
    "UnphysicalDampingError",
    "ValidationError",
    "load_config",
    "serialize",
    "__version__",
]
