import json
import math

import numpy as np
import pytest

from nucool.analysis import (
    extract_oscillation_frequency,
    fit_exponential_relaxation,
    fit_gaussian_sum,
    fit_stretched_exponential,
)
from nucool.core import ConvergenceError, ValidationError
from nucool.thermometry import (
    coherence_function,
    gaussian_distribution,
    variance_to_t2star,
)


def gaussian_sum(x, amps, centers, sigmas):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for a, c, s in zip(amps, centers, sigmas):
        out += a * np.exp(-0.5 * ((x - c) / s) ** 2)
    return out


class TestGaussianSum:
    AMPS = (0.40, 0.27, 0.27, 0.10, 0.13)
    CENTERS = (0.0, 22.0, -22.6, 46.3, -47.8)
    SIGMAS = (7.5, 7.2, 7.1, 9.6, 11.9)

    def _matched(self, fit, k=5):
        """Map fitted components onto the truth components by center."""
        vals = fit.values
        fc = vals[k:2 * k]
        out = []
        for c in self.CENTERS:
            i = int(np.argmin(np.abs(fc - c)))
            out.append((vals[i], vals[k + i], vals[2 * k + i]))
        return out

    def test_recovers_five_component_reference(self):
        x = np.linspace(-80, 80, 161)
        y = gaussian_sum(x, self.AMPS, self.CENTERS, self.SIGMAS)
        fit = fit_gaussian_sum(x, y, 5, centers=(0.0, 21.66, -21.66, 43.32, -43.32))
        assert fit.converged
        for (ra, rc, rs), a, c, s in zip(self._matched(fit), self.AMPS,
                                         self.CENTERS, self.SIGMAS):
            assert ra == pytest.approx(a, rel=0.01)
            assert rs == pytest.approx(s, rel=0.01)
            assert rc == pytest.approx(c, abs=0.01 * max(abs(c), 1.0))

    def test_default_centers_find_the_peaks(self):
        x = np.linspace(-80, 80, 161)
        y = gaussian_sum(x, self.AMPS, self.CENTERS, self.SIGMAS)
        fit = fit_gaussian_sum(x, y, 5)
        assert fit.rss < 1e-12

    def test_single_gaussian_exact(self):
        x = np.linspace(-10, 30, 81)
        y = gaussian_sum(x, [0.8], [11.0], [3.5])
        fit = fit_gaussian_sum(x, y, 1)
        assert fit["amp0"] == pytest.approx(0.8, abs=1e-6)
        assert fit["center0"] == pytest.approx(11.0, abs=1e-6)
        assert fit["sigma0"] == pytest.approx(3.5, abs=1e-6)

    def test_translation_equivariance(self):
        x = np.linspace(-40, 40, 101)
        y = gaussian_sum(x, [0.5, 0.3], [-12.0, 9.0], [4.0, 6.0])
        base = fit_gaussian_sum(x, y, 2, centers=(-12.0, 9.0))
        shift = 137.25
        moved = fit_gaussian_sum(x + shift, y, 2, centers=(-12.0 + shift, 9.0 + shift))
        for i in range(2):
            assert moved[f"center{i}"] - base[f"center{i}"] == pytest.approx(
                shift, abs=1e-9)
            assert moved[f"amp{i}"] == pytest.approx(base[f"amp{i}"], abs=1e-9)
            assert moved[f"sigma{i}"] == pytest.approx(base[f"sigma{i}"], abs=1e-9)

    def test_deterministic(self):
        x = np.linspace(-40, 40, 101)
        y = gaussian_sum(x, [0.5, 0.3], [-12.0, 9.0], [4.0, 6.0])
        a = fit_gaussian_sum(x, y, 2, seed=3)
        b = fit_gaussian_sum(x, y, 2, seed=3)
        assert np.array_equal(a.values, b.values)
        assert a.rss == b.rss and a.iterations == b.iterations

    def test_result_surface(self):
        x = np.linspace(-10, 10, 41)
        y = gaussian_sum(x, [1.0], [0.0], [2.0])
        fit = fit_gaussian_sum(x, y, 1)
        d = fit.as_dict()
        assert d["model"] == "gaussian_sum_1"
        assert set(d["parameters"]) == {"amp0", "center0", "sigma0"}
        assert d["parameters"]["center0"]["unit"] == "MHz"
        assert fit.uncertainty("amp0") >= 0 or math.isnan(fit.uncertainty("amp0"))
        round_trip = json.loads(fit.to_json())
        assert round_trip["converged"] is True

    def test_validation(self):
        x = np.linspace(0, 1, 5)
        with pytest.raises(ValidationError):
            fit_gaussian_sum(x, np.zeros(5), 2)       # needs 3k+1 points
        with pytest.raises(ValidationError):
            fit_gaussian_sum(np.zeros(9), np.zeros(9), 1)   # degenerate x
        with pytest.raises(ValidationError):
            fit_gaussian_sum(np.linspace(0, 1, 9), np.zeros(9), 1,
                             centers=(0.0, 1.0))
        with pytest.raises(ValidationError):
            fit_gaussian_sum(np.linspace(0, 1, 9), np.full(9, np.nan), 1)


class TestStretchedExponential:
    def test_reference_parameters(self):
        t = np.linspace(0, 0.08, 60)    # us; T2* = 26 ns
        y = np.exp(-np.where(t > 0, (t / 0.026) ** 1.6, 0.0))
        fit = fit_stretched_exponential(t, y)
        assert fit["t2_star"] == pytest.approx(0.026, rel=0.01)
        assert fit["alpha"] == pytest.approx(1.6, rel=0.01)
        assert fit.converged

    def test_fixed_alpha_matches_thermometry_gaussian(self):
        """Cross-module loop: Gaussian ensemble -> Ramsey envelope -> fit with
        alpha frozen at 2 must recover the closed-form dephasing time."""
        sigma_iz, a_c = 60.0, 0.6
        p = gaussian_distribution(sigma_iz, a_c, points=801, span_sigmas=8.0)
        t2_true = variance_to_t2star(sigma_iz ** 2, a_c)
        tau = np.linspace(0.0, 2.5 * t2_true, 50)
        y = coherence_function(p, tau)
        fit = fit_stretched_exponential(tau, y, alpha=2.0)
        assert fit.names == ("t2_star",)
        assert fit["t2_star"] == pytest.approx(t2_true, rel=0.005)

    def test_flat_input_flagged_not_raised(self):
        t = np.linspace(0, 1, 20)
        fit = fit_stretched_exponential(t, np.ones(20))
        assert not fit.converged

    def test_negative_time_rejected(self):
        with pytest.raises(ValidationError):
            fit_stretched_exponential(np.linspace(-1, 1, 20), np.ones(20))


class TestExponentialRelaxation:
    def test_reference_parameters_ten_points(self):
        t = np.linspace(0, 150, 10)     # ms scale enters as plain numbers
        y = 1.0 - 0.9974 * np.exp(-t / 41.7)
        fit = fit_exponential_relaxation(t, y)
        assert fit["a"] == pytest.approx(0.9974, rel=0.01)
        assert fit["tau"] == pytest.approx(41.7, rel=0.01)
        assert fit.converged

    def test_flat_data_unidentifiable(self):
        t = np.linspace(0, 10, 12)
        fit = fit_exponential_relaxation(t, np.ones(12))
        assert not fit.converged

    def test_closed_loop_random_parameters(self):
        rng = np.random.default_rng(5)
        for _ in range(4):
            a = float(rng.uniform(0.3, 1.0))
            tau = float(rng.uniform(5.0, 80.0))
            t = np.linspace(0, 4 * tau, 30)
            fit = fit_exponential_relaxation(t, 1.0 - a * np.exp(-t / tau))
            assert fit["a"] == pytest.approx(a, rel=0.01)
            assert fit["tau"] == pytest.approx(tau, rel=0.01)


class TestOscillationFrequency:
    def test_sin_squared_synthetic(self):
        tau = np.linspace(0, 2.0, 201)
        y = np.sin(np.pi * 1.8 * tau) ** 2
        assert extract_oscillation_frequency(tau, y) == pytest.approx(1.8, rel=0.01)

    def test_ramp_does_not_mask_oscillation(self):
        # a slow incoherent transfer ramp must not win over the real line
        tau = np.linspace(0, 2.0, 201)
        y = 0.02 * tau + 0.005 * np.sin(2 * np.pi * 1.5 * tau)
        assert extract_oscillation_frequency(tau, y) == pytest.approx(1.5, rel=0.01)

    def test_flat_series_raises(self):
        tau = np.linspace(0, 2.0, 64)
        with pytest.raises(ConvergenceError):
            extract_oscillation_frequency(tau, np.full(64, 0.3))

    def test_nonuniform_grid_rejected(self):
        tau = np.concatenate([np.linspace(0, 1, 30), [1.5, 2.5]])
        with pytest.raises(ValidationError):
            extract_oscillation_frequency(tau, np.sin(tau))

    def test_frequency_resolution_improves_with_padding(self):
        tau = np.linspace(0, 1.3, 131)
        y = np.cos(2 * np.pi * 3.37 * tau)
        f8 = extract_oscillation_frequency(tau, y, pad_factor=8)
        assert f8 == pytest.approx(3.37, rel=0.005)
