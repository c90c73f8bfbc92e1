"""Parameter estimation from scan data.

Covers the four extraction tasks the workbench needs: straight-line fits of
resonance width vs pump power, the saturating pump-power law of the cavity
noise, Lorentzian linewidth extraction from a single spectrum, and free
spectral range extraction from periodic scans via a periodogram.  Only
these model families are supported; this is not a general fitting
framework.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .conversion import bandwidth_nm_to_GHz
from .errors import NoPeriodicity, NumericFailure, SamplingError, ShapeError, SingularFit

__all__ = [
    "ScanSeries",
    "FitResult",
    "fit_linear",
    "fit_saturating_noise",
    "extract_fwhm",
    "periodogram",
    "extract_fsr",
    "enhancement_factor",
]

_UNITS = ("mW", "nm", "GHz", "ns")


@dataclass(frozen=True)
class ScanSeries:
    """Ordered (abscissa, value[, sigma]) records from one scan.

    ``unit`` tags the abscissa: pump power in mW, wavelength in nm,
    frequency in GHz or delay in ns.
    """

    abscissa: np.ndarray
    values: np.ndarray
    sigma: np.ndarray | None = None
    unit: str = "GHz"

    def __post_init__(self):
        x = np.asarray(self.abscissa, dtype=float)
        y = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "abscissa", x)
        object.__setattr__(self, "values", y)
        if x.ndim != 1 or y.shape != x.shape:
            raise ValueError("abscissa and values must be 1-d arrays of equal length")
        if np.any(np.diff(x) <= 0):
            raise ValueError("abscissa must be strictly increasing")
        if self.unit not in _UNITS:
            raise ValueError(f"unit must be one of {_UNITS}")
        if self.sigma is not None:
            s = np.asarray(self.sigma, dtype=float)
            object.__setattr__(self, "sigma", s)
            if s.shape != x.shape:
                raise ValueError("sigma must match the abscissa length")
            if np.any(s <= 0):
                raise ValueError("sigma must be positive where present")

    def __len__(self) -> int:
        return len(self.abscissa)

    @classmethod
    def counting(cls, abscissa, counts, unit: str = "GHz", floor: float = 1.0):
        """Series with Poisson uncertainties ``sqrt(counts)``, floored."""
        counts = np.asarray(counts, dtype=float)
        return cls(abscissa, counts, np.maximum(np.sqrt(np.abs(counts)), floor), unit)


@dataclass(frozen=True)
class FitResult:
    """Named parameter estimates with standard errors."""

    parameters: dict[str, float]
    std_errors: dict[str, float]
    residual_norm: float
    converged: bool
    iterations: int

    def __post_init__(self):
        if self.residual_norm < 0:
            raise ValueError("residual_norm must be non-negative")
        if any(e < 0 for e in self.std_errors.values()):
            raise ValueError("std_errors must be non-negative")
        if self.converged and not all(np.isfinite(v) for v in self.parameters.values()):
            raise ValueError("converged fit must have finite parameters")


def _weights(data: ScanSeries) -> np.ndarray:
    if data.sigma is None:
        return np.ones(len(data))
    return 1.0 / data.sigma


def fit_linear(data: ScanSeries) -> FitResult:
    """Weighted least-squares straight line, ``slope * x + intercept``.

    Exact on noiseless linear data; two points give the interpolating line
    with zero residual.
    """
    if len(data) < 2:
        raise ValueError("need at least 2 points for a line")
    x, y, w = data.abscissa, data.values, _weights(data)
    if np.ptp(x) == 0:
        raise SingularFit("all abscissa values are equal")
    design = np.column_stack([x, np.ones_like(x)]) * w[:, None]
    rhs = y * w
    coef, *_ = np.linalg.lstsq(design, rhs, rcond=None)
    residual = design @ coef - rhs
    residual_norm = float(residual @ residual)
    normal = design.T @ design
    cov = np.linalg.inv(normal)
    if data.sigma is None:
        dof = len(data) - 2
        cov = cov * (residual_norm / dof if dof > 0 else 0.0)
    err = np.sqrt(np.diag(cov))
    return FitResult(
        parameters={"slope": float(coef[0]), "intercept": float(coef[1])},
        std_errors={"slope": float(err[0]), "intercept": float(err[1])},
        residual_norm=residual_norm,
        converged=True,
        iterations=0,
    )


def _saturating_model(P, alpha_noise, alpha_tilde, gamma_r_ratio):
    return gamma_r_ratio * alpha_noise * P / (2.0 * (1.0 + alpha_tilde * P))


def fit_saturating_noise(data: ScanSeries, gamma_r_ratio: float) -> FitResult:
    """Fit the saturating cavity-noise law, estimating both coefficients.

    Model: ``N(P) = gamma_r_ratio * alpha_noise * P / (2*(1 +
    alpha_tilde*P))`` with ``gamma_r_ratio`` held fixed.  Trust-region
    least squares on log-parameters (which keeps both coefficients
    positive) with an analytic Jacobian, started from a deterministic
    initializer: the low-power slope fixes ``alpha_noise``, the droop of
    the highest-power point relative to that slope fixes ``alpha_tilde``.
    """
    if not 0.0 < gamma_r_ratio <= 1.0:
        raise ValueError("gamma_r_ratio must lie in (0, 1]")
    if len(data) < 5:
        raise ValueError("need at least 5 points")
    x, y, w = data.abscissa, data.values, _weights(data)
    positive = x > 0
    if np.count_nonzero(positive) < 3 or x[positive].max() < 5.0 * x[positive].min():
        raise ValueError("powers must span at least a factor of 5")

    # deterministic initializer
    xp, yp = x[positive], y[positive]
    n_low = max(2, int(np.ceil(0.2 * len(xp))))
    slope0 = float(np.mean(yp[:n_low] / xp[:n_low]))
    if slope0 <= 0:
        raise ValueError("noise values must rise with power")
    alpha_noise0 = 2.0 * slope0 / gamma_r_ratio
    p_max, y_max = xp[-1], yp[-1]
    droop = slope0 * p_max / y_max if y_max > 0 else 1.0
    alpha_tilde0 = max((droop - 1.0) / p_max, 1e-3 / p_max)

    def residuals(theta):
        a, b = np.exp(theta)
        return (_saturating_model(x, a, b, gamma_r_ratio) - y) * w

    def jacobian(theta):
        a, b = np.exp(theta)
        f = _saturating_model(x, a, b, gamma_r_ratio)
        col_a = f * w
        col_b = -f * (b * x) / (1.0 + b * x) * w
        return np.column_stack([col_a, col_b])

    theta0 = np.log([alpha_noise0, alpha_tilde0])
    lower = np.array([-np.inf, np.log(1e-12 / p_max)])
    result = least_squares(
        residuals,
        theta0,
        jac=jacobian,
        bounds=(lower, np.inf),
        method="trf",
        xtol=1e-12,
        ftol=1e-12,
        gtol=1e-12,
        max_nfev=200,
    )
    if result.status <= 0 or not np.all(np.isfinite(result.x)):
        raise NumericFailure(
            "saturating-noise fit did not converge within 200 evaluations: "
            f"status={result.status}, residual={2 * result.cost:.3e}, theta={result.x}"
        )
    a, b = np.exp(result.x)
    residual_norm = float(2.0 * result.cost)
    jac = result.jac
    try:
        cov_log = np.linalg.inv(jac.T @ jac)
    except np.linalg.LinAlgError:
        cov_log = np.linalg.pinv(jac.T @ jac)
    if data.sigma is None:
        dof = len(data) - 2
        cov_log = cov_log * (residual_norm / dof if dof > 0 else 0.0)
    err_log = np.sqrt(np.maximum(np.diag(cov_log), 0.0))
    return FitResult(
        parameters={"alpha_noise": float(a), "alpha_tilde": float(b)},
        std_errors={"alpha_noise": float(a * err_log[0]), "alpha_tilde": float(b * err_log[1])},
        residual_norm=residual_norm,
        converged=True,
        iterations=int(result.nfev),
    )


def _half_crossings(x: np.ndarray, y: np.ndarray, level: float) -> list[float]:
    """Linear-interpolated abscissa positions where ``y`` crosses ``level``."""
    crossings = []
    above = y >= level
    for i in range(len(x) - 1):
        if above[i] != above[i + 1]:
            frac = (level - y[i]) / (y[i + 1] - y[i])
            crossings.append(float(x[i] + frac * (x[i + 1] - x[i])))
    return crossings


def extract_fwhm(data: ScanSeries) -> tuple[float, float]:
    """Full width at half maximum of a single-peaked series.

    Least-squares Lorentzian fit (peak position, half-width, amplitude,
    offset); if the fit fails the width falls back to linearly
    interpolated half-maximum crossings.  Returns ``(fwhm, uncertainty)``
    in abscissa units.
    """
    x, y = data.abscissa, data.values
    if len(x) < 8:
        raise ShapeError("need at least 8 points")
    span = float(np.ptp(y))
    if span == 0 or span < 1e-12 * np.max(np.abs(y)):
        raise ShapeError("flat series has no peak")

    smooth = np.convolve(y, np.ones(3) / 3.0, mode="same")
    level = smooth.min() + 0.5 * (smooth.max() - smooth.min())
    above = smooth >= level
    n_regions = int(np.count_nonzero(np.diff(above.astype(int)) == 1) + int(above[0]))
    if n_regions > 1:
        raise ShapeError(f"series has {n_regions} peaks, expected a single one")

    half_level = y.min() + 0.5 * (y.max() - y.min())
    if np.count_nonzero(y >= half_level) < 8:
        raise ShapeError("need at least 8 points above half maximum")
    crossings = _half_crossings(x, y, half_level)
    if len(crossings) < 2:
        raise ShapeError("peak is not resolved within the scan")
    width0 = crossings[-1] - crossings[0]

    offset0 = float(y.min())
    amp0 = float(y.max() - offset0)
    center0 = float(x[np.argmax(y)])
    w = _weights(data)

    def residuals(theta):
        center, hwhm, amp, offset = theta
        model = offset + amp / (1.0 + ((x - center) / hwhm) ** 2)
        return (model - y) * w

    fwhm = err = None
    try:
        result = least_squares(
            residuals,
            x0=[center0, width0 / 2.0, amp0, offset0],
            method="lm" if data.sigma is None else "trf",
            xtol=1e-12,
            ftol=1e-12,
            max_nfev=2000,
        )
        if result.status > 0 and np.all(np.isfinite(result.x)) and result.x[1] != 0:
            fwhm = 2.0 * abs(float(result.x[1]))
            jac = result.jac
            try:
                cov = np.linalg.inv(jac.T @ jac)
            except np.linalg.LinAlgError:
                cov = np.linalg.pinv(jac.T @ jac)
            if data.sigma is None:
                dof = len(x) - 4
                cov = cov * (2.0 * result.cost / dof if dof > 0 else 0.0)
            err = 2.0 * float(np.sqrt(max(cov[1, 1], 0.0)))
    except (ValueError, np.linalg.LinAlgError):
        pass
    if fwhm is None:
        # fall back to the interpolated half-maximum crossings
        fwhm = width0
        err = float(np.max(np.diff(x)))
    return fwhm, err


def periodogram(data: ScanSeries) -> tuple[np.ndarray, np.ndarray]:
    """Power spectrum of the linearly detrended series.

    Returns the full two-sided DFT frequency axis (cycles per abscissa
    unit) and ``|X_k|^2 / n``, normalized so the total spectral power
    equals the sum of squared detrended samples.
    """
    x, y = data.abscissa, data.values
    design = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    detrended = y - design @ coef
    spectrum = np.fft.fft(detrended)
    power = np.abs(spectrum) ** 2 / len(x)
    freqs = np.fft.fftfreq(len(x), d=float(np.mean(np.diff(x))))
    return freqs, power


def extract_fsr(data: ScanSeries) -> tuple[float, float]:
    """Dominant periodicity of a scan, reported as an FSR in GHz.

    Wavelength scans are linearized to frequency around the scan center
    before analysis (the comb is periodic in frequency, not wavelength);
    delay scans yield the FSR directly as the fringe frequency.  The
    dominant periodogram peak is refined by quadratic interpolation of the
    three surrounding bins and quoted with a one-bin uncertainty.
    """
    if data.unit == "mW":
        raise ValueError("a power scan has no spectral periodicity to extract")
    x, y = data.abscissa, data.values
    if len(x) < 16:
        raise ValueError("need at least 16 samples")

    if data.unit == "nm":
        center = float(np.mean(x))
        ghz_per_nm = bandwidth_nm_to_GHz(1.0, center)
        x = (x - center) * ghz_per_nm
    dx = np.diff(x)
    step = float(np.mean(dx))
    if np.max(np.abs(dx - step)) > 0.01 * abs(step):
        raise SamplingError("abscissa jitter exceeds 1 % of the mean step")

    freqs, power = periodogram(ScanSeries(x, y, unit="GHz" if data.unit != "ns" else "ns"))
    half = len(x) // 2
    pos_power = power[1 : half + 1]
    if pos_power.size < 4:
        raise ValueError("series too short for spectral analysis")
    peak_index = int(np.argmax(pos_power)) + 1
    if power[peak_index] <= 1e-18 * max(float(np.sum(y * y)), 1.0):
        raise NoPeriodicity("series carries no spectral power after detrending")
    if power[peak_index] < 3.0 * np.median(pos_power):
        raise NoPeriodicity("dominant peak below 3x the median spectral power")
    if peak_index < 4:
        raise NoPeriodicity("fewer than 4 oscillation periods in the scan span")

    bin_width = 1.0 / (len(x) * step)
    f_hat = freqs[peak_index]
    if 1 <= peak_index < half:
        p_lo, p_mid, p_hi = power[peak_index - 1 : peak_index + 2]
        denom = p_lo - 2.0 * p_mid + p_hi
        if denom != 0:
            f_hat += 0.5 * (p_lo - p_hi) / denom * bin_width
    f_hat = abs(float(f_hat))

    if data.unit == "ns":
        # fringe frequency in 1/ns is the FSR in GHz
        return f_hat, bin_width
    return 1.0 / f_hat, bin_width / f_hat**2


def enhancement_factor(alpha_tilde: float, B_ref: float, L_ref: float, L: float) -> float:
    """Cavity enhancement inferred from a cavity-free reference device.

    ``4*alpha_tilde / B_ref * (L_ref/L)^2``: the length rescaling accounts
    for the quadratic dependence of the bare conversion coefficient on the
    interaction length.  Compare against the ideal ``F_cold/pi``.
    """
    for name, value in (
        ("alpha_tilde", alpha_tilde),
        ("B_ref", B_ref),
        ("L_ref", L_ref),
        ("L", L),
    ):
        if value <= 0:
            raise ValueError(f"{name} must be positive")
    return 4.0 * alpha_tilde / B_ref * (L_ref / L) ** 2
