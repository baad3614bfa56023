"""Effective spin temperature of the nuclear ensemble from polarization statistics.

The collective polarization of N spin-3/2 nuclei lives on the ladder
I_z = -3N/2 ... +3N/2.  Near the fully polarized edge the level degeneracy
is dominated by single-unit excitations, g(I_z) = C(N, I_z + 3N/2), and the
canonical partition sum is truncated at I_z = -N where that approximation
holds.  Everything here is computed in the log domain so the full fitted
range (N up to 1e6, beta up to 50) stays finite.

Conventions: beta is dimensionless (hbar*omega_n/kT), the Overhauser shift
of the electron resonance is 2*a_c*I_z in MHz, and the Ramsey decay C(tau)
accumulates phase (2*a_c*I_z)*tau with tau in us.  Under this convention a
Gaussian ensemble of variance v decays as exp(-(tau/T2*)^2) with
v = 1/(2*(a_c*T2*)^2), which is what variance_to_t2star inverts.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .core import CONSTANTS, ConvergenceError, ValidationError

__all__ = [
    "BETA_MIN",
    "BETA_MAX",
    "ThermalState",
    "OverhauserDistribution",
    "log_partition",
    "thermal_moments",
    "thermal_state",
    "invert_variance",
    "effective_temperature",
    "coherence_function",
    "variance_to_t2star",
    "t2star_to_variance",
    "gaussian_distribution",
    "delta_distribution",
]

BETA_MIN = 0.5   # documented validity edge of the truncated sum
BETA_MAX = 50.0
_N_MAX = 1e6


@dataclass(frozen=True)
class ThermalState:
    """Canonical-ensemble summary at one inverse temperature."""

    beta: float
    mean_iz: float
    variance: float
    polarization_fraction: float
    temperature: float  # mK

    def __post_init__(self):
        if not self.beta > 0:
            raise ValidationError("beta must be positive")
        if not self.variance >= 0:
            raise ValidationError("variance must be >= 0")
        if not 0 <= self.polarization_fraction <= 1:
            raise ValidationError("polarization_fraction must lie in [0, 1]")


class OverhauserDistribution:
    """Discretized p(I_z) together with the shift scale 2*a_c (MHz per unit I_z)."""

    def __init__(self, iz, p, overhauser_scale):
        iz = np.asarray(iz, dtype=float)
        p = np.asarray(p, dtype=float)
        if iz.shape != p.shape or iz.ndim != 1 or iz.size == 0:
            raise ValidationError("iz and p must be equal-length 1-d arrays")
        if np.any(p < 0):
            raise ValidationError("p must be non-negative")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ValidationError(f"p must sum to 1 within 1e-9 (got {p.sum()!r})")
        if overhauser_scale < 0:
            raise ValidationError("overhauser_scale must be >= 0")
        self.iz = iz
        self.p = p
        self.overhauser_scale = float(overhauser_scale)

    @property
    def mean(self) -> float:
        return float(np.dot(self.p, self.iz))

    @property
    def variance(self) -> float:
        return float(np.dot(self.p, (self.iz - self.mean) ** 2))


def _check_domain(beta: float, n_nuclei: float):
    if not beta > BETA_MIN:
        raise ValidationError(f"beta must exceed {BETA_MIN} (got {beta})")
    if not 1 <= n_nuclei <= _N_MAX:
        raise ValidationError(f"n_nuclei must lie in [1, {_N_MAX:g}]")


def _log_terms(beta: float, n: int):
    # ladder index j = I_z + 3N/2 runs over the truncated range [0, N/2]
    j = np.arange(math.floor(n / 2) + 1, dtype=float)
    iz = j - 1.5 * n
    log_binom = gammaln(n + 1.0) - gammaln(j + 1.0) - gammaln(n - j + 1.0)
    return iz, log_binom - beta * iz


def log_partition(beta: float, n_nuclei: float) -> float:
    """log Z(beta) of the truncated spin-3/2 ensemble."""
    _check_domain(beta, n_nuclei)
    _, logt = _log_terms(beta, int(n_nuclei))
    return float(logsumexp(logt))


def thermal_moments(beta: float, n_nuclei: float):
    """(mean I_z, variance) of the truncated canonical distribution.

    Probability-weighted sums in the log domain; differentiating log Z
    numerically loses all precision once beta*N is large.
    """
    _check_domain(beta, n_nuclei)
    iz, logt = _log_terms(beta, int(n_nuclei))
    logt = logt - logsumexp(logt)
    p = np.exp(logt)
    mean = float(np.dot(p, iz))
    variance = float(np.dot(p, (iz - mean) ** 2))
    return mean, variance


def thermal_state(beta: float, n_nuclei: float, omega_n_mhz: float) -> ThermalState:
    mean, variance = thermal_moments(beta, n_nuclei)
    frac = min(abs(mean) / (1.5 * n_nuclei), 1.0)
    return ThermalState(beta=beta, mean_iz=mean, variance=variance,
                        polarization_fraction=frac,
                        temperature=effective_temperature(beta, omega_n_mhz))


def invert_variance(target_variance: float, n_nuclei: float) -> float:
    """Inverse temperature whose thermal variance equals the target.

    variance(beta) is strictly decreasing, so plain bisection suffices.
    """
    if not target_variance > 0:
        raise ValidationError("target_variance must be positive")
    lo, hi = BETA_MIN + 1e-9, BETA_MAX
    v_hi = thermal_moments(lo, n_nuclei)[1]   # largest achievable
    v_lo = thermal_moments(hi, n_nuclei)[1]   # smallest achievable
    if not v_lo <= target_variance <= v_hi:
        raise ConvergenceError(
            f"target variance {target_variance:g} outside achievable range "
            f"[{v_lo:g}, {v_hi:g}] for beta in [{BETA_MIN}, {BETA_MAX}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if thermal_moments(mid, n_nuclei)[1] > target_variance:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13 * max(1.0, mid):
            break
    return 0.5 * (lo + hi)


def effective_temperature(beta: float, omega_n_mhz: float) -> float:
    """Temperature in mK: T = (h*f/k_B)/beta with f in MHz."""
    if not beta > 0:
        raise ValidationError("beta must be positive")
    if math.isinf(beta):
        return 0.0
    return CONSTANTS.planck_over_boltzmann * omega_n_mhz / beta


def coherence_function(p: OverhauserDistribution, tau_grid) -> np.ndarray:
    """Ramsey envelope |sum_Iz p(I_z) exp(-i (2 a_c I_z) tau)| on the tau grid (us)."""
    tau = np.atleast_1d(np.asarray(tau_grid, dtype=float))
    phase = np.exp(-1j * p.overhauser_scale * np.outer(tau, p.iz))
    return np.abs(phase @ p.p)


def variance_to_t2star(variance: float, a_c: float) -> float:
    """Inhomogeneous dephasing time (us) of a Gaussian ensemble of this variance."""
    if not variance > 0:
        raise ValidationError("variance must be positive")
    if not a_c > 0:
        raise ValidationError("a_c must be positive")
    return 1.0 / (a_c * math.sqrt(2.0 * variance))


def t2star_to_variance(t2_star: float, a_c: float) -> float:
    if not t2_star > 0:
        raise ValidationError("t2_star must be positive")
    if not a_c > 0:
        raise ValidationError("a_c must be positive")
    return 1.0 / (2.0 * (a_c * t2_star) ** 2)


def gaussian_distribution(sigma_iz: float, a_c: float, center: float = 0.0,
                          points: int = 41, span_sigmas: float = 4.0) -> OverhauserDistribution:
    """Gaussian p(I_z) sampled on a symmetric grid of center +- span_sigmas*sigma."""
    if not sigma_iz > 0:
        raise ValidationError("sigma_iz must be positive")
    if points < 3:
        raise ValidationError("points must be >= 3")
    iz = np.linspace(center - span_sigmas * sigma_iz,
                     center + span_sigmas * sigma_iz, points)
    w = np.exp(-0.5 * ((iz - center) / sigma_iz) ** 2)
    return OverhauserDistribution(iz, w / w.sum(), 2.0 * a_c)


def delta_distribution(iz: float, a_c: float) -> OverhauserDistribution:
    return OverhauserDistribution(np.array([float(iz)]), np.array([1.0]), 2.0 * a_c)
