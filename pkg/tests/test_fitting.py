"""Tests for the estimation module: fits, linewidths, periodograms."""

import numpy as np
import pytest

from cavityqfc import (
    CavityParams,
    NoiseParams,
    ScanSeries,
    bandwidth_nm_to_GHz,
    comb_rate_in_band,
    enhancement_factor,
    extract_fsr,
    extract_fwhm,
    fit_linear,
    fit_saturating_noise,
    periodogram,
)
from cavityqfc.errors import NoPeriodicity, SamplingError, ShapeError, SingularFit


def linear_scan(alpha, gamma_all, pmax=250.0, points=26):
    power = np.linspace(0.0, pmax, points)
    return ScanSeries(power, gamma_all + alpha * power, unit="mW")


def noise_scan(alpha_noise, alpha_tilde, gamma_r, pmax=250.0, points=12):
    power = np.linspace(pmax / points, pmax, points)
    values = gamma_r * alpha_noise * power / (2.0 * (1.0 + alpha_tilde * power))
    return ScanSeries(power, values, unit="mW")


def lorentzian_scan(center, fwhm, amplitude=1.0, offset=0.0, span_factor=6.0, points=241):
    x = center + np.linspace(-span_factor / 2, span_factor / 2, points) * fwhm
    y = offset + amplitude / (1.0 + ((x - center) / (fwhm / 2.0)) ** 2)
    return ScanSeries(x, y, unit="GHz")


class TestLinearFit:
    @pytest.mark.parametrize("alpha,gamma", [(0.49, 70.4), (0.56, 34.4)])
    def test_noiseless_recovery(self, alpha, gamma):
        result = fit_linear(linear_scan(alpha, gamma))
        assert result.parameters["slope"] == pytest.approx(alpha, rel=1e-10)
        assert result.parameters["intercept"] == pytest.approx(gamma, rel=1e-10)
        assert result.converged

    def test_two_points_interpolate(self):
        result = fit_linear(ScanSeries(np.array([0.0, 10.0]), np.array([70.4, 75.3]), unit="mW"))
        assert result.residual_norm == pytest.approx(0.0, abs=1e-18)
        assert result.parameters["slope"] == pytest.approx(0.49, rel=1e-12)

    def test_weighted_fit_uses_sigma(self):
        scan = linear_scan(0.49, 70.4)
        weighted = ScanSeries(scan.abscissa, scan.values, 0.05 * scan.values, unit="mW")
        result = fit_linear(weighted)
        assert result.parameters["slope"] == pytest.approx(0.49, rel=1e-10)
        assert result.std_errors["slope"] > 0

    def test_degenerate_abscissa(self):
        with pytest.raises((SingularFit, ValueError)):
            fit_linear(ScanSeries(np.array([1.0, 1.0, 1.0]), np.array([1.0, 2.0, 3.0]), unit="mW"))


class TestSaturatingFit:
    @pytest.mark.parametrize(
        "alpha_noise,alpha_tilde", [(230.0, 1.0 / 144.0), (85.0, 1.0 / 61.0)]
    )
    def test_noiseless_recovery(self, alpha_noise, alpha_tilde):
        result = fit_saturating_noise(noise_scan(alpha_noise, alpha_tilde, 0.7), 0.7)
        assert result.parameters["alpha_noise"] == pytest.approx(alpha_noise, rel=1e-3)
        assert result.parameters["alpha_tilde"] == pytest.approx(alpha_tilde, rel=1e-3)
        assert result.converged
        assert result.iterations <= 200

    def test_linear_limit(self):
        # data with no saturation: slope pins alpha_noise, alpha_tilde ~ 0
        power = np.linspace(5.0, 250.0, 12)
        values = 0.7 * 230.0 * power / 2.0
        result = fit_saturating_noise(ScanSeries(power, values, unit="mW"), 0.7)
        assert result.parameters["alpha_noise"] == pytest.approx(230.0, rel=1e-6)
        alpha_tilde = result.parameters["alpha_tilde"]
        assert alpha_tilde <= max(result.std_errors["alpha_tilde"], 1e-9)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            fit_saturating_noise(noise_scan(230.0, 1 / 144, 0.7, points=4), 0.7)
        narrow = ScanSeries(
            np.linspace(100.0, 200.0, 8),
            np.linspace(1.0, 2.0, 8),
            unit="mW",
        )
        with pytest.raises(ValueError):
            fit_saturating_noise(narrow, 0.7)
        with pytest.raises(ValueError):
            fit_saturating_noise(noise_scan(230.0, 1 / 144, 0.7), 0.0)

    def test_noisy_recovery_within_three_sigma(self):
        rng = np.random.default_rng(99)
        hits = 0
        trials = 40
        for _ in range(trials):
            scan = noise_scan(230.0, 1.0 / 144.0, 0.7)
            sigma = 0.05 * scan.values
            noisy = ScanSeries(scan.abscissa, scan.values + rng.normal(0, sigma), sigma, "mW")
            result = fit_saturating_noise(noisy, 0.7)
            ok_a = abs(result.parameters["alpha_noise"] - 230.0) <= 3 * result.std_errors["alpha_noise"]
            ok_b = abs(result.parameters["alpha_tilde"] - 1 / 144) <= 3 * result.std_errors["alpha_tilde"]
            hits += ok_a and ok_b
        assert hits >= 0.9 * trials


class TestExtractFwhm:
    def test_cold_linewidth(self):
        fwhm, err = extract_fwhm(lorentzian_scan(0.0, 70.4, amplitude=0.9, offset=0.05))
        assert fwhm == pytest.approx(70.4, abs=0.5)
        assert err < 0.5

    def test_broadened_linewidth(self):
        target = 70.4 + 0.49 * 140.0
        fwhm, _ = extract_fwhm(lorentzian_scan(0.0, target))
        assert fwhm == pytest.approx(target, rel=0.01)

    def test_scale_and_shift_invariance(self):
        base = lorentzian_scan(0.0, 50.0, amplitude=2.0, offset=0.3)
        ref, _ = extract_fwhm(base)
        scaled, _ = extract_fwhm(ScanSeries(base.abscissa, 7.3 * base.values, unit="GHz"))
        shifted, _ = extract_fwhm(ScanSeries(base.abscissa + 500.0, base.values, unit="GHz"))
        assert scaled == pytest.approx(ref, rel=1e-8)
        assert shifted == pytest.approx(ref, rel=1e-8)

    def test_flat_series_rejected(self):
        x = np.linspace(0, 10, 50)
        with pytest.raises(ShapeError):
            extract_fwhm(ScanSeries(x, np.full_like(x, 3.0), unit="GHz"))

    def test_double_peak_rejected(self):
        x = np.linspace(-10, 10, 201)
        y = 1 / (1 + (x - 4) ** 2) + 1 / (1 + (x + 4) ** 2)
        with pytest.raises(ShapeError):
            extract_fwhm(ScanSeries(x, y, unit="GHz"))

    def test_underresolved_peak_rejected(self):
        x = np.linspace(-50, 50, 11)
        y = 1 / (1 + (x / 0.5) ** 2)
        with pytest.raises(ShapeError):
            extract_fwhm(ScanSeries(x, y, unit="GHz"))


class TestPeriodogram:
    def test_energy_conservation(self):
        rng = np.random.default_rng(17)
        x = np.linspace(0.0, 10.0, 257)
        y = rng.normal(0, 1, x.size) + 3.0 + 0.2 * x
        freqs, power = periodogram(ScanSeries(x, y, unit="GHz"))
        design = np.column_stack([x, np.ones_like(x)])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        detrended = y - design @ coef
        assert power.sum() == pytest.approx(np.sum(detrended**2), rel=1e-9)
        assert freqs.shape == power.shape


def comb_scan(power=100.0, step_nm=0.01, span_nm=2.0, bpf_nm=0.03):
    """Synthetic bandpass-filtered comb scan over wavelength."""
    cav = CavityParams(5200.0, 70.4, 0.7)
    noise = NoiseParams.from_cavity(cav, 230.0, 1.0 / 144.0)
    ghz_per_nm = bandwidth_nm_to_GHz(1.0, 1540.0)
    lam = 1540.0 + np.arange(-span_nm / 2, span_nm / 2 + step_nm / 2, step_nm)
    offsets = (lam - 1540.0) * ghz_per_nm
    half = bpf_nm * ghz_per_nm / 2.0
    counts = np.array(
        [comb_rate_in_band(cav, noise, power, f - half, f + half) for f in offsets]
    )
    return lam, counts


class TestExtractFsr:
    def test_clean_comb_scan(self):
        lam, counts = comb_scan()
        value, err = extract_fsr(ScanSeries(lam, counts, unit="nm"))
        assert value == pytest.approx(5.2, abs=0.1)
        assert err == pytest.approx(0.107, abs=0.01)

    def test_poisson_noisy_comb_scan(self):
        lam, counts = comb_scan()
        rng = np.random.default_rng(42)
        noisy = rng.poisson(counts * (25.0 / counts.mean())).astype(float)
        value, _ = extract_fsr(ScanSeries(lam, noisy, unit="nm"))
        assert value == pytest.approx(5.2, abs=0.2)

    def test_offset_and_trend_invariance(self):
        lam, counts = comb_scan()
        ref, _ = extract_fsr(ScanSeries(lam, counts, unit="nm"))
        shifted, _ = extract_fsr(ScanSeries(lam, counts + 1e4, unit="nm"))
        trended, _ = extract_fsr(ScanSeries(lam, counts + 40.0 * (lam - 1539.0), unit="nm"))
        assert shifted == pytest.approx(ref, rel=1e-9)
        assert trended == pytest.approx(ref, rel=1e-9)

    def test_delay_fringe(self):
        tau = np.arange(0.0, 8.0, 0.02)
        values = 100.0 * (1.0 + 0.8 * np.cos(2 * np.pi * 5.2 * tau)) * np.exp(-tau / 6.0)
        value, err = extract_fsr(ScanSeries(tau, values, unit="ns"))
        assert value == pytest.approx(5.2, abs=err)

    def test_constant_series(self):
        x = np.linspace(0, 10, 64)
        with pytest.raises(NoPeriodicity):
            extract_fsr(ScanSeries(x, np.full_like(x, 5.0), unit="GHz"))

    def test_nonuniform_sampling_rejected(self):
        rng = np.random.default_rng(3)
        x = np.cumsum(rng.uniform(0.5, 1.5, 64))
        y = np.sin(2 * np.pi * x / 3.0)
        with pytest.raises(SamplingError):
            extract_fsr(ScanSeries(x, y, unit="GHz"))

    def test_power_scan_rejected(self):
        x = np.linspace(1, 100, 32)
        with pytest.raises(ValueError):
            extract_fsr(ScanSeries(x, np.sin(x), unit="mW"))


class TestEnhancementFactor:
    def test_reference_cases(self):
        value = enhancement_factor(0.49 / 70.4, 17.3e-3, 45.0, 13.26)
        assert value == pytest.approx(18.5, abs=0.1)
        value2 = enhancement_factor(0.56 / 34.4, 3.6e-3, 20.0, 13.26)
        assert value2 == pytest.approx(41.2, abs=0.1)

    def test_identity_case(self):
        assert enhancement_factor(0.25, 1.0, 10.0, 10.0) == pytest.approx(1.0, rel=1e-14)

    def test_quadratic_length_scaling(self):
        base = enhancement_factor(0.01, 0.01, 10.0, 10.0)
        for scale in (2.0, 3.0, 7.5):
            assert enhancement_factor(0.01, 0.01, 10.0 * scale, 10.0) == pytest.approx(
                base * scale**2, rel=1e-12
            )

    def test_positive_inputs_required(self):
        with pytest.raises(ValueError):
            enhancement_factor(0.0, 1.0, 1.0, 1.0)


class TestScanSeries:
    def test_validation(self):
        with pytest.raises(ValueError):
            ScanSeries(np.array([1.0, 1.0]), np.array([1.0, 2.0]), unit="mW")
        with pytest.raises(ValueError):
            ScanSeries(np.array([1.0, 2.0]), np.array([1.0]), unit="mW")
        with pytest.raises(ValueError):
            ScanSeries(np.array([1.0, 2.0]), np.array([1.0, 2.0]), unit="parsec")
        with pytest.raises(ValueError):
            ScanSeries(
                np.array([1.0, 2.0]), np.array([1.0, 2.0]), np.array([1.0, 0.0]), "mW"
            )

    def test_counting_sigma_floor(self):
        series = ScanSeries.counting(np.array([0.0, 1.0, 2.0]), np.array([0.0, 4.0, 100.0]))
        assert np.allclose(series.sigma, [1.0, 2.0, 10.0])
