"""Shared parameter types, unit conventions and configuration parsing.

Unit conventions, fixed at this boundary and used by every module:

* frequencies, rates and linewidths: MHz (linear frequency, i.e. cycles/us);
  the carrier Rabi period is exactly 1/rabi us
* times: microseconds
* magnetic field: Tesla
* temperature: millikelvin
* decay rates entering exponentials are face-value inverse times, so a
  coherence subject to ``1/t2`` decays as exp(-t/t2) with t in us

All types here are immutable after construction and safe to share across
worker processes.
"""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass, field
from typing import Optional

try:
    import tomllib as _toml_reader
except ModuleNotFoundError:  # python 3.10
    import tomli as _toml_reader

import tomlkit

__all__ = [
    "NucoolError",
    "ConfigError",
    "ValidationError",
    "ConvergenceError",
    "UnphysicalDampingError",
    "DegenerateRateError",
    "PhysicalConstants",
    "CONSTANTS",
    "ModelParams",
    "DriveSettings",
    "IntegratorSettings",
    "SweepAxis",
    "OutputSettings",
    "MagnonConfig",
    "OverhauserConfig",
    "SpectrumConfig",
    "RabiConfig",
    "ThermometryConfig",
    "RunConfig",
    "load_config",
    "loads_config",
    "serialize",
    "omega_n",
    "t2_hahn_lookup",
    "pump_rabi_for_linewidth",
    "CONFIG_ENV_VAR",
]

CONFIG_ENV_VAR = "NUCOOL_CONFIG"


class NucoolError(Exception):
    """Base class for all package errors."""


class ConfigError(NucoolError):
    """Config file missing or syntactically malformed."""


class ValidationError(ConfigError):
    """A config field is out of range or unknown; message names the field."""


class ConvergenceError(NucoolError):
    """An iterative solver exhausted its budget; message reports the bracket."""


class UnphysicalDampingError(NucoolError):
    """Damping too strong for the linearized variance formula (denominator <= 0)."""


class DegenerateRateError(NucoolError):
    """Rate evaluation requested in a degenerate limit (e.g. zero linewidth with drive on)."""


@dataclass(frozen=True)
class PhysicalConstants:
    """Unit-conversion constants.

    planck_over_boltzmann: h*f/k_B with f in MHz yields temperature in mK.
    """

    planck_over_boltzmann: float = 4.7992e-2  # mK per MHz

    def __post_init__(self):
        if self.planck_over_boltzmann <= 0:
            raise ValidationError("planck_over_boltzmann must be positive")


CONSTANTS = PhysicalConstants()

# Hahn-echo T2 of the electron, us, measured at discrete fields.  Interpolated
# log-linearly (ln T2 linear in B) and extrapolated with the edge slope.
T2_HAHN_TABLE_US = {
    2.0: 0.015,
    3.0: 0.765,
    5.0: 2.22,
}


def t2_hahn_lookup(b_field: float) -> float:
    """Electron homogeneous dephasing time in us at the given field (Tesla)."""
    if b_field <= 0:
        raise ValidationError("b_field must be positive")
    bs = sorted(T2_HAHN_TABLE_US)
    logs = [math.log(T2_HAHN_TABLE_US[b]) for b in bs]
    if b_field <= bs[0]:
        i = 0
    elif b_field >= bs[-1]:
        i = len(bs) - 2
    else:
        i = max(j for j in range(len(bs) - 1) if bs[j] <= b_field)
    slope = (logs[i + 1] - logs[i]) / (bs[i + 1] - bs[i])
    return math.exp(logs[i] + slope * (b_field - bs[i]))


_SUPPORTED_SPINS = (0.5, 1.5)


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the electron-nuclear system.

    Defaults are the fitted values for the reference device.  ``a_nc`` is an
    independent input; its two documented provenances disagree (the closed
    form a_c*b_q/omega_n at the 3 T reference gives ~0.078*a_c, while the
    directly fitted ratio is 0.015*a_c), so neither is asserted as truth and
    the closed-form value is merely the default.
    """

    n_nuclei: float = 3.0e4          # N, number of participating nuclei
    spin: float = 1.5                # I, per-nucleus spin (1/2 or 3/2)
    a_c: float = 0.6                 # collinear hyperfine constant per nucleus, MHz
    a_nc: float = 0.6 * 1.7 / 21.66  # non-collinear hyperfine constant, MHz
    b_q: float = 1.7                 # quadrupolar strength, MHz
    theta: float = math.radians(20.4)  # quadrupolar angle, radians
    alpha: float = 0.8               # relative spread of the anharmonic shift
    gamma_ratio: float = 7.22        # nuclear gyromagnetic ratio, MHz/T
    gamma0: float = 150.0            # trion linewidth, MHz
    delta_omega_n: float = 10.0      # nuclear Zeeman inhomogeneous spread, MHz
    t2_hahn: Optional[float] = None  # us; None -> field lookup table
    gamma_em_ref: float = 1.0 / 41.7  # electron-mediated diffusion at b_ref, 1/ms
    b_ref: float = 3.0               # reference field for eta_ref/gamma_em_ref, T
    b_field: float = 3.0             # applied field, T
    eta_ref: float = 0.063           # cooling sideband fraction at b_ref

    def __post_init__(self):
        if not self.n_nuclei >= 1:
            raise ValidationError("n_nuclei must be >= 1")
        if self.spin not in _SUPPORTED_SPINS:
            raise ValidationError("spin must be 1/2 or 3/2")
        for name in ("a_c", "a_nc", "b_q", "alpha", "gamma_ratio", "gamma0",
                     "delta_omega_n", "gamma_em_ref", "eta_ref"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0")
        if not 0 <= self.theta <= math.pi / 2:
            raise ValidationError("theta must lie in [0, pi/2]")
        if self.t2_hahn is not None and not self.t2_hahn > 0:
            raise ValidationError("t2_hahn must be positive")
        if not self.b_ref > 0:
            raise ValidationError("b_ref must be positive")
        if not self.b_field > 0:
            raise ValidationError("b_field must be positive")

    def omega_n(self) -> float:
        """Nuclear Zeeman splitting gamma_ratio * b_field, MHz."""
        return self.gamma_ratio * self.b_field

    def max_polarization(self) -> float:
        """N*I, the edge of the collective polarization ladder."""
        return self.n_nuclei * self.spin

    def thermal_variance(self) -> float:
        """Polarization variance of the unpolarized ensemble: N*I(I+1)/3.

        5N/4 for spin 3/2, N/4 for spin 1/2.
        """
        return self.n_nuclei * self.spin * (self.spin + 1.0) / 3.0

    def t2(self) -> float:
        """Electron Hahn-echo T2 in us (explicit value or field lookup)."""
        if self.t2_hahn is not None:
            return self.t2_hahn
        return t2_hahn_lookup(self.b_field)

    def eta_cool(self) -> float:
        """Cooling sideband fraction at the applied field (scales as 1/B^2)."""
        return self.eta_ref * (self.b_ref / self.b_field) ** 2

    def gamma_em(self) -> float:
        """Electron-mediated diffusion rate at the applied field, 1/us.

        Reference value is given in 1/ms and scales as 1/B^2.
        """
        return self.gamma_em_ref * 1e-3 * (self.b_ref / self.b_field) ** 2


def omega_n(params: ModelParams) -> float:
    """Nuclear Zeeman splitting in MHz."""
    return params.omega_n()


def pump_rabi_for_linewidth(gamma_eff: float, gamma0: float) -> float:
    """Optical-pumping Rabi frequency producing the requested effective linewidth.

    Inverts gamma_eff = (gamma0/4) * s_p/(1+s_p) with s_p = 2(pump/gamma0)^2;
    only linewidths strictly below the gamma0/4 saturation bound are reachable.
    """
    if gamma_eff < 0:
        raise ValidationError("gamma_eff must be >= 0")
    if gamma_eff >= gamma0 / 4:
        raise ValidationError("gamma_eff must lie below gamma0/4")
    s_p = 4.0 * gamma_eff / (gamma0 - 4.0 * gamma_eff)
    return gamma0 * math.sqrt(s_p / 2.0)


@dataclass(frozen=True)
class DriveSettings:
    """Optical knobs of one experiment: Raman Rabi drive, pumping, detuning (MHz)."""

    rabi: float = 0.0
    pump_rabi: float = 0.0
    detuning: float = 0.0

    def __post_init__(self):
        if self.rabi < 0:
            raise ValidationError("rabi must be >= 0")
        if self.pump_rabi < 0:
            raise ValidationError("pump_rabi must be >= 0")


@dataclass(frozen=True)
class IntegratorSettings:
    """Fixed-step integrator controls.

    step_safety: steps per period of the fastest frequency in the problem;
    must be >= 50.  max_step optionally caps the step in us.  rel_tol is the
    threshold for the half-step (Richardson) error check.
    """

    step_safety: float = 320.0
    max_step: Optional[float] = None
    rel_tol: float = 1e-6

    def __post_init__(self):
        if not self.step_safety >= 50.0:
            raise ValidationError("step_safety must be >= 50")
        if self.max_step is not None and not self.max_step > 0:
            raise ValidationError("max_step must be positive")
        if not self.rel_tol > 0:
            raise ValidationError("rel_tol must be positive")


_SWEEPABLE = ("rabi", "gamma_eff", "detuning", "b_field", "beta", "tau")


@dataclass(frozen=True)
class SweepAxis:
    name: str
    min: float
    max: float
    steps: int

    def __post_init__(self):
        if self.name not in _SWEEPABLE:
            raise ValidationError(
                f"sweep axis name {self.name!r} not one of {_SWEEPABLE}")
        if self.steps < 1:
            raise ValidationError("sweep steps must be >= 1")
        if self.steps > 1 and not self.max > self.min:
            raise ValidationError("sweep max must exceed min for steps > 1")

    def values(self):
        import numpy as np
        if self.steps == 1:
            return np.array([self.min])
        return np.linspace(self.min, self.max, self.steps)


@dataclass(frozen=True)
class OutputSettings:
    dir: str = "out"
    format: str = "csv"

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise ValidationError("output format must be 'csv' or 'json'")


@dataclass(frozen=True)
class MagnonConfig:
    """Collective sideband parameters; None fields are derived from ModelParams."""

    eta1: Optional[float] = None
    eta2: Optional[float] = None
    gamma_n: Optional[float] = None   # MHz (face-value rate)
    include_anharmonic: bool = False  # apply the quadrupolar level shift

    def __post_init__(self):
        for name in ("eta1", "eta2"):
            v = getattr(self, name)
            if v is not None and not 0 <= v < 1:
                raise ValidationError(f"{name} must lie in [0, 1)")
        if self.gamma_n is not None and self.gamma_n < 0:
            raise ValidationError("gamma_n must be >= 0")


@dataclass(frozen=True)
class OverhauserConfig:
    """How the polarization distribution p(I_z) is chosen for dynamics runs.

    mode 'cooled' derives a Gaussian whose variance comes from the cooling
    model optimum at the configured field; 'gaussian' uses sigma_mhz (std of
    the Overhauser shift 2*a_c*I_z) directly; 'delta' pins I_z to center.
    """

    mode: str = "cooled"
    sigma_mhz: Optional[float] = None
    center: float = 0.0
    grid_points: int = 41
    span_sigmas: float = 4.0

    def __post_init__(self):
        if self.mode not in ("cooled", "gaussian", "delta"):
            raise ValidationError("overhauser mode must be cooled|gaussian|delta")
        if self.mode == "gaussian" and (self.sigma_mhz is None or self.sigma_mhz <= 0):
            raise ValidationError("overhauser sigma_mhz must be positive in gaussian mode")
        if self.grid_points < 1:
            raise ValidationError("overhauser grid_points must be >= 1")
        if self.span_sigmas <= 0:
            raise ValidationError("overhauser span_sigmas must be positive")


@dataclass(frozen=True)
class SpectrumConfig:
    tau_max: float = 1.0   # us
    tau_points: int = 101
    readout_scale: float = 0.6
    fit_components: int = 5     # Gaussians fitted to the late-time slice
    slice_lo_us: float = 0.85
    slice_hi_us: float = 1.0

    def __post_init__(self):
        if not self.tau_max >= 0:
            raise ValidationError("spectrum tau_max must be >= 0")
        if self.tau_points < 1:
            raise ValidationError("spectrum tau_points must be >= 1")
        if not 0 < self.readout_scale <= 1:
            raise ValidationError("spectrum readout_scale must lie in (0, 1]")
        if self.fit_components < 1:
            raise ValidationError("spectrum fit_components must be >= 1")
        if not 0 <= self.slice_lo_us < self.slice_hi_us:
            raise ValidationError("spectrum slice window must satisfy 0 <= lo < hi")


@dataclass(frozen=True)
class RabiConfig:
    """Sideband Rabi run: drive parked on the sideband_order-th nuclear line."""

    rabi_values: tuple = (12.0,)
    sideband_order: int = -2          # detuning = sideband_order * omega_n
    tau_max: float = 2.0
    tau_points: int = 401

    def __post_init__(self):
        if len(self.rabi_values) == 0:
            raise ValidationError("rabi rabi_values must be non-empty")
        if any(v < 0 for v in self.rabi_values):
            raise ValidationError("rabi rabi_values must be >= 0")
        if not -2 <= self.sideband_order <= 2:
            raise ValidationError("rabi sideband_order must lie in [-2, 2]")
        if not self.tau_max > 0:
            raise ValidationError("rabi tau_max must be positive")
        if self.tau_points < 2:
            raise ValidationError("rabi tau_points must be >= 2")


@dataclass(frozen=True)
class ThermometryConfig:
    variance_target: Optional[float] = None
    include_infinite_beta: bool = False   # append the zero-variance limit row

    def __post_init__(self):
        if self.variance_target is not None and not self.variance_target > 0:
            raise ValidationError("thermometry variance_target must be positive")


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams = field(default_factory=ModelParams)
    drive: DriveSettings = field(default_factory=DriveSettings)
    integrator: IntegratorSettings = field(default_factory=IntegratorSettings)
    sweep: tuple = ()                 # tuple of SweepAxis
    magnon: MagnonConfig = field(default_factory=MagnonConfig)
    overhauser: OverhauserConfig = field(default_factory=OverhauserConfig)
    spectrum: SpectrumConfig = field(default_factory=SpectrumConfig)
    rabi: RabiConfig = field(default_factory=RabiConfig)
    thermometry: ThermometryConfig = field(default_factory=ThermometryConfig)
    output: OutputSettings = field(default_factory=OutputSettings)
    seed: int = 0

    def axis(self, name: str) -> Optional[SweepAxis]:
        for ax in self.sweep:
            if ax.name == name:
                return ax
        return None

    def require_axis(self, name: str) -> SweepAxis:
        ax = self.axis(name)
        if ax is None:
            raise ValidationError(f"config requires a sweep axis named {name!r}")
        return ax


_SECTION_TYPES = {
    "params": ModelParams,
    "drive": DriveSettings,
    "integrator": IntegratorSettings,
    "magnon": MagnonConfig,
    "overhauser": OverhauserConfig,
    "spectrum": SpectrumConfig,
    "rabi": RabiConfig,
    "thermometry": ThermometryConfig,
    "output": OutputSettings,
}


def _build_section(cls, table: dict, section: str):
    known = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in table.items():
        if key not in known:
            raise ValidationError(f"unknown field {section}.{key}")
        if isinstance(value, list):
            value = tuple(value)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ValidationError(f"bad value in [{section}]: {exc}") from exc


def loads_config(text: str) -> RunConfig:
    """Parse a TOML config string into a validated RunConfig."""
    try:
        data = _toml_reader.loads(text)
    except _toml_reader.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from exc

    kwargs = {}
    for section, table in data.items():
        if section == "sweep":
            axes = table.get("axes", []) if isinstance(table, dict) else table
            for key in table if isinstance(table, dict) else ():
                if key != "axes":
                    raise ValidationError(f"unknown field sweep.{key}")
            kwargs["sweep"] = tuple(
                _build_section(SweepAxis, ax, "sweep.axes") for ax in axes)
        elif section == "rng":
            for key in table:
                if key != "seed":
                    raise ValidationError(f"unknown field rng.{key}")
            seed = table.get("seed", 0)
            if not isinstance(seed, int):
                raise ValidationError("rng.seed must be an integer")
            kwargs["seed"] = seed
        elif section in _SECTION_TYPES:
            kwargs[section] = _build_section(_SECTION_TYPES[section], table, section)
        else:
            raise ValidationError(f"unknown config section [{section}]")
    return RunConfig(**kwargs)


def load_config(path: str) -> RunConfig:
    """Load and validate a config file; defaults fill any omitted field."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, "rb") as fh:
        text = fh.read().decode("utf-8")
    return loads_config(text)


def _section_dict(obj) -> dict:
    out = {}
    for f in dataclasses.fields(obj):
        value = getattr(obj, f.name)
        if value is None:
            continue  # omitted optional; reparses to the same None default
        if isinstance(value, tuple):
            value = list(value)
        out[f.name] = value
    return out


def serialize(config: RunConfig) -> str:
    """Render a RunConfig back to TOML.

    Round trip contract: loads_config(serialize(c)) == c.
    """
    doc = {name: _section_dict(getattr(config, name)) for name in _SECTION_TYPES}
    doc["sweep"] = {"axes": [_section_dict(ax) for ax in config.sweep]}
    doc["rng"] = {"seed": config.seed}
    return tomlkit.dumps(doc)
